"""Pairwise parameterizations (F-parameterizations)."""

from __future__ import annotations

from typing import Mapping

import numpy as np

from ..config import TOLERANCE
from ..gposet import GPoset
from ..linalg import canonicalize, orthogonal_complement
from ..report import Report
from ..repring import VirtualRep
from .eparam import EParam


class FParam:
    """Spaces V(x, y) = R^{k_xy} with compositions tau and generator maps."""

    def __init__(
        self,
        poset: GPoset,
        dims: Mapping[tuple[str, str], int],
        tau: Mapping[tuple[str, str, str], np.ndarray],
        act: Mapping[tuple[str, str], np.ndarray],
        alpha_bar: Mapping[tuple[str, str], np.ndarray] | None = None,
    ):
        self.poset = poset
        self.dims = dict(dims)
        self.tau = dict(tau)
        self.act = dict(act)
        self.alpha_bar = dict(alpha_bar or {})

    def action_power(self, x: str, y: str, j: int) -> np.ndarray:
        out = np.eye(self.dims[(x, y)])
        for _ in range(j):
            out = self.act[(x, y)] @ out
            x, y = self.poset.perm[x], self.poset.perm[y]
        return out

    def pair_rep(self, x: str, y: str) -> VirtualRep:
        """Class of V(x, y) as a representation of Stab(x) ∩ Stab(y)."""
        s = self.poset.pair_stab_order(x, y)
        step = self.poset.n // s
        if not self.dims[(x, y)]:
            return VirtualRep(s)
        v, _ = canonicalize(self.action_power(x, y, step), s)
        return v

    def validate(self, tol: float = TOLERANCE) -> Report:
        rep = Report()
        p = self.poset
        triples = [(x, y, z) for x, y in p.pairs() for z in p.below(y)]
        for x, y, z in triples:
            t = self.tau[(x, y, z)]
            if t.size and np.max(np.abs(t.T @ t - np.eye(t.shape[1]))) > tol:
                rep.add("tau-isometry", f"tau_{x}{y}{z} is not an isometry", x, y, z)
            gx, gy, gz = (p.perm[w] for w in (x, y, z))
            lhs = self.tau[(gx, gy, gz)] @ _block(self.act[(x, y)], self.act[(y, z)])
            rhs = self.act[(x, z)] @ t
            if lhs.size and np.max(np.abs(lhs - rhs)) > tol:
                rep.add("tau-equivariance", f"tau_{x}{y}{z} is not equivariant", x, y, z)
            for w in p.below(z):
                a, b, c = self.dims[(x, y)], self.dims[(y, z)], self.dims[(z, w)]
                left = self.tau[(x, z, w)] @ _block(t, np.eye(c))
                right = self.tau[(x, y, w)] @ _block(np.eye(a), self.tau[(y, z, w)])
                if left.size and np.max(np.abs(left - right)) > tol:
                    rep.add("associativity", f"tau fails associativity on {x}>{y}>{z}>{w}", x, y, z, w)
                _ = b
        return rep


def _block(a: np.ndarray, b: np.ndarray) -> np.ndarray:
    out = np.zeros((a.shape[0] + b.shape[0], a.shape[1] + b.shape[1]))
    out[: a.shape[0], : a.shape[1]] = a
    out[a.shape[0] :, a.shape[1] :] = b
    return out


def induced_F(e: EParam) -> FParam:
    """V(x, y) := complement of the image of V(y) in V(x); tau includes and adds."""
    p = e.poset
    basis: dict[tuple[str, str], np.ndarray] = {}
    for x, y in p.pairs():
        basis[(x, y)] = orthogonal_complement(e.emb[(x, y)], e.dim(x))
    dims = {k: b.shape[1] for k, b in basis.items()}
    tau = {}
    for x, y in p.pairs():
        for z in p.below(y):
            b_xz = basis[(x, z)]
            tau[(x, y, z)] = b_xz.T @ np.hstack([basis[(x, y)], e.emb[(x, y)] @ basis[(y, z)]])
    act = {}
    for x, y in p.pairs():
        gx, gy = p.perm[x], p.perm[y]
        act[(x, y)] = basis[(gx, gy)].T @ e.act[x] @ basis[(x, y)]
    alpha_bar = {(x, y): np.hstack([basis[(x, y)], e.emb[(x, y)]]) for x, y in p.pairs()}
    return FParam(p, dims, tau, act, alpha_bar)
