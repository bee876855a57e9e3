from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as o
from flowcat.repring import (
    IrrepLabel,
    VirtualRep,
    dim,
    fixed_points,
    induce,
    irreps,
    regular_rep,
    restrict,
    rotation,
    sign,
    trivial,
)


def rep(n: int, **kw) -> VirtualRep:
    return VirtualRep.of(n, **kw)


def test_dimensions():
    assert dim(regular_rep(3)) == 3
    assert dim(VirtualRep.from_labels([trivial(2)], 2) - VirtualRep.from_labels([sign(2)], 2)) == 0
    assert dim(VirtualRep.from_labels([rotation(1, 5)] * 2, 5)) == 4


def test_fixed_points_examples():
    assert fixed_points(regular_rep(2), 2) == rep(1, triv=1)
    assert fixed_points(VirtualRep.from_labels([rotation(1, 4)], 4), 2).is_zero
    v = rep(2, triv=1) - rep(2, sgn=1)
    f = fixed_points(v, 2)
    assert f == rep(1, triv=1) and f.dim == 1
    assert o.decompose(o.fixed_char(o.rep_character(v), 2)) == o.as_dict(f)


def test_restrict_examples():
    assert restrict(VirtualRep.from_labels([rotation(1, 4)], 4), 2) == rep(2, sgn=2)
    assert restrict(rep(2, sgn=1), 1) == rep(1, triv=1)
    got = restrict(VirtualRep.from_labels([rotation(2, 12)], 12), 6)
    assert got == VirtualRep.from_labels([rotation(2, 6)], 6)
    chi = o.restrict_char(o.irrep_character("rot", 2, 12), 6)
    assert o.decompose(chi) == {("rot", 2): 1}


def test_induce_examples():
    for n in (1, 3, 4, 6):
        assert induce(rep(1, triv=1), n) == regular_rep(n)
    # the dimension of an induced representation is the index times the dimension
    up = induce(rep(2, triv=1), 4)
    assert up == rep(4, triv=1, sgn=1)
    assert o.decompose(o.induce_char(o.irrep_character("triv", 0, 2), 4)) == o.as_dict(up)
    up = induce(rep(2, sgn=1), 4)
    assert up == VirtualRep.from_labels([rotation(1, 4)], 4)
    assert o.decompose(o.induce_char(o.irrep_character("sgn", 0, 2), 4)) == o.as_dict(up)


def test_regular_rep_examples():
    assert regular_rep(1) == rep(1, triv=1)
    assert regular_rep(2) == rep(2, triv=1, sgn=1)
    assert regular_rep(4) == rep(4, triv=1, sgn=1) + VirtualRep.from_labels([rotation(1, 4)], 4)


def test_label_validation():
    with pytest.raises(ValueError):
        sign(3)
    with pytest.raises(ValueError):
        rotation(2, 4)
    with pytest.raises(ValueError):
        restrict(rep(4, triv=1), 3)
    with pytest.raises(ValueError):
        VirtualRep.of(0)
    assert IrrepLabel.parse(rotation(2, 7).name, 7) == rotation(2, 7)


def test_det_sign_counts_sign_summands():
    assert rep(2, sgn=3, triv=1).det_sign() == -1
    assert (rep(4, sgn=2) + VirtualRep.from_labels([rotation(1, 4)], 4)).det_sign() == 1


def test_json_round_trip():
    v = rep(6, triv=2, sgn=-1) + VirtualRep.from_labels([rotation(2, 6)], 6)
    assert VirtualRep.from_json(v.to_json()) == v


@st.composite
def virtual_reps(draw, n=None):
    n = n or draw(st.sampled_from([1, 2, 3, 4, 5, 6, 8, 12]))
    labs = irreps(n)
    mult = {lab: draw(st.integers(-3, 3)) for lab in labs}
    return VirtualRep(n, mult)


@settings(max_examples=80, deadline=None)
@given(virtual_reps(), st.data())
def test_operations_match_character_oracle(v, data):
    n = v.n
    chi = o.rep_character(v)
    assert o.decompose(chi) == o.as_dict(v)
    assert v.dim == int(round(chi[0]))
    divs = [m for m in range(1, n + 1) if n % m == 0]
    m = data.draw(st.sampled_from(divs))
    assert o.as_dict(restrict(v, m)) == o.decompose(o.restrict_char(chi, m))
    assert o.as_dict(fixed_points(v, m)) == o.decompose(o.fixed_char(chi, m))
    k = data.draw(st.sampled_from([1, 2, 3]))
    assert o.as_dict(induce(v, n * k)) == o.decompose(o.induce_char(chi, n * k))


@settings(max_examples=50, deadline=None)
@given(st.data())
def test_ring_laws(data):
    n = data.draw(st.sampled_from([2, 3, 4, 6]))
    a, b = data.draw(virtual_reps(n)), data.draw(virtual_reps(n))
    assert a + b == b + a
    assert (a - b) + b == a
    assert (a + b).dim == a.dim + b.dim
    assert fixed_points(a + b, n) == fixed_points(a, n) + fixed_points(b, n)
    # restriction to the trivial subgroup keeps the dimension
    assert restrict(a, 1).dim == a.dim
    assert np.isclose(o.rep_character(a * 3)[0], 3 * a.dim)
