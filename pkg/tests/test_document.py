from __future__ import annotations

import json

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from flowcat import generators as gen
from flowcat.document import DocumentError, loads, make_document, validate_document
from flowcat.examples import CATEGORIES, PARAMS
from flowcat.kuranishi import interval_chart


def round_trip(obj) -> None:
    text = make_document(obj, "test", 1).dumps()
    doc = loads(text)
    assert doc.dumps() == text
    assert doc.provenance == {"generator": "test", "seed": 1}


@pytest.mark.parametrize("name", sorted(CATEGORIES) + sorted(PARAMS))
def test_builtin_round_trip(name):
    obj = (CATEGORIES.get(name) or PARAMS[name])()
    round_trip(obj)
    assert validate_document(loads(make_document(obj).dumps())).ok


def test_chart_and_complex_round_trip():
    from flowcat.category import cell_complex

    round_trip(interval_chart(func=lambda t: t * t - 1))
    round_trip(cell_complex(CATEGORIES["c2-handle-slide"]()))


@settings(max_examples=15, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_random_documents_round_trip_and_are_deterministic(seed):
    make = [
        lambda r: gen.random_category(r),
        lambda r: gen.random_vdim0_chart(r),
        lambda r: gen.random_free_param(r, gen.random_gposet(r, int(r.choice([1, 2, 3, 4, 6]))), 3),
    ]
    for build in make:
        a = build(np.random.default_rng(seed))
        b = build(np.random.default_rng(seed))
        assert make_document(a, "g", seed).dumps() == make_document(b, "g", seed).dumps()
        round_trip(a)


@pytest.mark.parametrize(
    "text",
    [
        "not json",
        "[]",
        json.dumps({"format_version": "2", "kind": "chart", "payload": {}}),
        json.dumps({"format_version": "1", "kind": "banana", "payload": {}}),
        json.dumps({"format_version": "1", "kind": "chart"}),
        json.dumps({"format_version": "1", "kind": "chart", "payload": {"group_order": 1, "t_blocks": ["bogus"]}}),
        json.dumps({"format_version": "1", "kind": "flow_category", "payload": {"skeleton": {}}}),
    ],
)
def test_malformed_documents(text):
    with pytest.raises(DocumentError):
        loads(text)
