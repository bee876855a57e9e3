from __future__ import annotations

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

import oracles as o
from flowcat import generators as gen
from flowcat.examples import c2_handle_slide, ms_chain
from flowcat.category import compute_degrees, family_members, pair_order
from flowcat.kuranishi import (
    BoundaryZeroError,
    ChartError,
    PLChart,
    family_degrees,
    fixed_chart,
    interval_chart,
    point_chart,
    pt_degree,
    stabilize_chart,
    subdivide,
    sum_model_degree,
    validate_chart,
)
from flowcat.repring import IrrepLabel, VirtualRep

SGN2 = IrrepLabel("sgn", 2)


@pytest.mark.parametrize(
    "func, expected",
    [(lambda t: t, 1), (lambda t: t * t - 1, 0), (lambda t: t * t + 1, 0), (lambda t: -t, -1),
     (lambda t: (t - 0.3) * (t + 0.7) * (t - 1.5), 1)],
)
def test_interval_degrees(func, expected):
    c = interval_chart(func=func, n_cells=16)
    assert validate_chart(c, require_zeros=False).ok
    assert pt_degree(c) == expected
    assert o.grid_sign_count(func, -2.0, 2.0) == expected
    assert o.winding_degree(c) == expected


def test_boundary_zero_refused():
    c = interval_chart(func=lambda t: t + 2.0)
    with pytest.raises(BoundaryZeroError):
        pt_degree(c)


def test_vdim_mismatch_refused():
    c = stabilize_chart(point_chart(1), VirtualRep.of(1, triv=1))
    c = PLChart(1, c.t_labels, c.coords, c.simplices, c.mults, (), np.zeros((c.n_vertices, 0)), c.perm)
    with pytest.raises(ChartError):
        pt_degree(c)


def test_stabilization_examples():
    p = point_chart(1)
    assert stabilize_chart(p, VirtualRep.zero(1)) == p
    s = stabilize_chart(p, VirtualRep.of(1, triv=1))
    assert s.d == 1 and s.r == 1 and s.vdim == 0
    assert np.allclose(s.section, s.coords)
    assert sorted(s.coords[:, 0]) == [-1.0, 0.0, 1.0]
    assert pt_degree(s) == 1
    q = point_chart(2, (SGN2,), [0.0])
    qs = stabilize_chart(q, VirtualRep.of(2, sgn=1))
    assert q.vdim == qs.vdim == -1
    zeros = [v for v in range(qs.n_vertices) if np.allclose(qs.section[v], 0)]
    assert len(zeros) == 1 and np.allclose(qs.coords[zeros[0]], 0)
    assert validate_chart(qs).ok


def test_fixed_chart_examples():
    q = point_chart(2, (SGN2,), [0.0])
    f = fixed_chart(q, 2)
    assert f.r == 0 and f.vdim == 0 and f.group_order == 1
    assert pt_degree(f) == 1
    free = PLChart(2, (SGN2,), [[1.0], [-1.0]], ((0,), (1,)), (1, -1), (), np.zeros((2, 0)), (1, 0))
    assert fixed_chart(free, 2).is_empty()
    c = interval_chart(func=lambda t: t)
    assert fixed_chart(c, 1) == c


def test_validate_chart_detects_problems():
    c = c2_handle_slide().pairs[("x", "z")].chart
    assert validate_chart(c).ok
    bad = PLChart(c.group_order, c.t_labels, c.coords, c.simplices, c.mults, c.v_labels,
                  c.section + np.array([[0.0], [0.0], [0.0], [0.5]]), c.perm, c.k, c.strata)
    assert "equivariance" in validate_chart(bad).codes()
    broken = interval_chart(func=lambda t: t, n_cells=4)
    broken = PLChart(1, broken.t_labels, broken.coords, broken.simplices, (1, -1, 1, 1), broken.v_labels,
                     broken.section, broken.perm)
    assert "orientation" in validate_chart(broken).codes()
    no_zero = interval_chart(func=lambda t: t * t + 1)
    assert "zero-free-stratum" in validate_chart(no_zero).codes()


def test_sum_model():
    a = interval_chart(func=lambda t: t, a=-2, b=2)
    b = interval_chart(func=lambda t: -(t - 5) * (t - 4.5) * (t - 6), a=4, b=7)
    assert sum_model_degree(a, b) == pt_degree(a) + pt_degree(b)
    c = interval_chart(func=lambda t: t - 11, a=10, b=12)
    assert sum_model_degree(a, c) == 2


def test_c2_family_degree_is_odd():
    f = c2_handle_slide()
    degs = compute_degrees(f).degrees
    assert degs[("x", "z")] % 2 == 1
    # the (y, z) chart is two exchanged points with opposite orientation
    assert degs[("y", "z")] == 0


def test_ms_chain_boundary_pairing():
    f = ms_chain()
    members = family_members(f)
    res = family_degrees(members, pair_order(f, members), seed=3)
    assert res.degrees[("x", "y")] == 1
    assert res.boundary_counts[("x", "z")] == 0
    # the signed arc ends on the face through y equal d(x, y) * d(y, z)
    assert res.face_counts[("x", "z")].get("y", 0) == res.degrees[("x", "y")] * res.degrees[("y", "z")]


def test_chart_json_round_trip():
    c = c2_handle_slide().pairs[("x", "z")].chart
    back = PLChart.from_json(c.to_json())
    assert back.to_json() == c.to_json()
    assert validate_chart(back).ok
    r = gen.random_vdim0_chart(np.random.default_rng(5))
    assert pt_degree(PLChart.from_json(r.to_json())) == pt_degree(r)


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_pt_degree_robust(seed):
    rng = np.random.default_rng(seed)
    c = gen.random_vdim0_chart(rng)
    d = pt_degree(c)
    assert d == o.winding_degree(c)
    assert all(pt_degree(c, s) == d for s in range(1, 5))
    assert pt_degree(subdivide(c)) == d
    w = gen.random_rep(rng, c.group_order, min(2 - c.d, 2))
    assert pt_degree(stabilize_chart(c, w)) == d


@settings(max_examples=40, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([2, 3]))
def test_degree_congruent_to_fixed_degree(seed, p):
    rng = np.random.default_rng(seed)
    c = gen.random_vdim0_chart(rng, p)
    fc = fixed_chart(c, p)
    if fc.vdim != 0:
        return
    assert validate_chart(fc, require_zeros=False).ok
    fixed_deg = pt_degree(fc) if fc.simplices else 0
    assert (pt_degree(c) - fixed_deg) % p == 0
