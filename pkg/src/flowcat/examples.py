"""Built-in flow categories and parameterizations."""

from __future__ import annotations

import numpy as np

from .category import ChartPair, DegreeEntry, FlowCategory, adapted_grading
from .gposet import GPoset
from .kuranishi import PLChart, point_chart
from .params import EParam, SemiFreeParam, build_free
from .repring import SGN, TRIV, IrrepLabel, VirtualRep


def _finish(poset: GPoset, v0: SemiFreeParam, v1: SemiFreeParam, pairs) -> FlowCategory:
    mu = adapted_grading(poset, v0, v1)
    p = poset.with_mu(mu)
    v0 = SemiFreeParam(EParam(p, v0.free.spaces, v0.free.emb, v0.free.act), v0.f)
    v1 = SemiFreeParam(EParam(p, v1.free.spaces, v1.free.emb, v1.free.act), v1.f)
    return FlowCategory(p, v0, v1, pairs)


def chain_poset() -> GPoset:
    return GPoset(["x", "y", "z"], [("x", "y"), ("y", "z")], 2, None, {"x": 2, "y": 0, "z": -1})


def chain_param() -> EParam:
    """Free C2-parameterization on x > y > z seeded by sgn at y and triv at x."""
    p = chain_poset()
    return build_free(p, {"y": VirtualRep.of(2, sgn=1), "x": VirtualRep.of(2, triv=1)})


def c2_handle_slide() -> FlowCategory:
    """Three C2-fixed objects; x -> z is realized only through the obstructed x -> y flow."""
    p = chain_poset()
    sgn = IrrepLabel(SGN, 2)
    v0 = SemiFreeParam(chain_param(), (0, 0, 0))
    v1 = SemiFreeParam(build_free(p, {"x": VirtualRep.of(2, sgn=1)}), (1, 1, 1))
    # x -> y: one flow line, obstructed in the sign direction
    cxy = point_chart(2, (sgn,), [0.0]).with_strata(1, ())
    # y -> z: two flow lines exchanged by the involution, opposite orientations
    cyz = PLChart(2, (sgn,), [[1.0], [-1.0]], ((0,), (1,)), (1, -1), (), np.zeros((2, 0)), (1, 0), 0)
    # x -> z: two exchanged arcs, each ending on the broken configuration through y
    cxz = PLChart(
        2, (sgn,), [[1.0], [2.0], [-1.0], [-2.0]], ((0, 1), (2, 3)), (1, -1), (sgn,),
        [[0.0], [1.0], [0.0], [-1.0]], (2, 3, 0, 1), 2,
        ((frozenset({0}), frozenset({1})), (frozenset({2}), frozenset({1}))),
    )
    pairs = {
        ("x", "y"): ChartPair(cxy),
        ("y", "z"): ChartPair(cyz),
        ("x", "z"): ChartPair(cxz, {0: [("y", 0, 0)], 2: [("y", 0, 1)]}, {"y": np.eye(1)}),
    }
    return _finish(p, v0, v1, pairs)


def _trivial_framing(p: GPoset, f0, f1) -> tuple[SemiFreeParam, SemiFreeParam]:
    return SemiFreeParam(build_free(p, {}), tuple(f0)), SemiFreeParam(build_free(p, {}), tuple(f1))


def s1_height() -> FlowCategory:
    """Height function on the circle: two flow lines from max to min with opposite signs."""
    p = GPoset(["max", "min"], [("max", "min")], 1, None, {"max": 0, "min": -1})
    v0, v1 = _trivial_framing(p, (0,), (0,))
    triv = IrrepLabel(TRIV, 1)
    c = PLChart(1, (triv,), [[1.0], [-1.0]], ((0,), (1,)), (1, -1), (), np.zeros((2, 0)), (0, 1), 0)
    return _finish(p, v0, v1, {("max", "min"): ChartPair(c)})


def s2_height() -> FlowCategory:
    """Height function on the sphere: a circle of flow lines from max to min."""
    p = GPoset(["max", "min"], [("max", "min")], 1, None, {"max": 0, "min": -1})
    v0, v1 = _trivial_framing(p, (1,), (0,))
    triv = IrrepLabel(TRIV, 1)
    ang = 2 * np.pi * np.arange(3) / 3
    c = PLChart(
        1, (triv, triv), np.column_stack([np.cos(ang), np.sin(ang)]), ((0, 1), (1, 2), (2, 0)), (1, 1, 1),
        (), np.zeros((3, 0)), (0, 1, 2), 0,
    )
    return _finish(p, v0, v1, {("max", "min"): ChartPair(c)})


def ms_chain() -> FlowCategory:
    """Regular three-object chain: d(x,y) = +1 and two cancelling y -> z lines.

    The one-dimensional x -> z moduli space is an arc whose two ends are the
    broken trajectories through y; their orientations cancel.
    """
    p = GPoset(["x", "y", "z"], [("x", "y"), ("y", "z")], 1, None, {"x": 1, "y": 0, "z": -1})
    v0, v1 = _trivial_framing(p, (0, 0), (0, 0))
    triv = IrrepLabel(TRIV, 1)
    cxy = point_chart(1)
    cyz = PLChart(1, (triv,), [[1.0], [-1.0]], ((0,), (1,)), (1, -1), (), np.zeros((2, 0)), (0, 1), 0)
    cxz = PLChart(
        1, (triv,), [[0.0], [1.0]], ((0, 1),), (1,), (), np.zeros((2, 0)), (0, 1), 1,
        ((frozenset({0}), frozenset({0})), (frozenset({1}), frozenset({0}))),
    )
    pairs = {
        ("x", "y"): ChartPair(cxy),
        ("y", "z"): ChartPair(cyz),
        ("x", "z"): ChartPair(cxz, {0: [("y", 0, 1)], 1: [("y", 0, 0)]}, {"y": np.zeros((0, 0))}),
    }
    return _finish(p, v0, v1, pairs)


def s1_degree_only() -> FlowCategory:
    p = GPoset(["max", "min"], [("max", "min")], 1, None, {"max": 0, "min": -1})
    v0, v1 = _trivial_framing(p, (0,), (0,))
    return _finish(p, v0, v1, {("max", "min"): DegreeEntry(0)})


CATEGORIES = {
    "c2-handle-slide": c2_handle_slide,
    "s1-height": s1_height,
    "s2-height": s2_height,
    "ms-chain": ms_chain,
}

PARAMS = {
    "chain-param": chain_param,
}
