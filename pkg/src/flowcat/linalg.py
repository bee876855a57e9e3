"""Numerical helpers for orthogonal representations of cyclic groups.

A *model* of an actual representation v of C_s is R^{dim v} with the
generator acting block-diagonally in canonical irrep order: 1 on trivial
coordinates, -1 on sign coordinates and the rotation by 2 pi k / s on each
coordinate pair of a rot(k) block.
"""

from __future__ import annotations

import numpy as np

from .config import TOLERANCE
from .repring import ROT, SGN, TRIV, IrrepLabel, VirtualRep, irreps


def irrep_block(lab: IrrepLabel, power: int = 1) -> np.ndarray:
    if lab.kind == TRIV:
        return np.ones((1, 1))
    if lab.kind == SGN:
        return np.array([[(-1.0) ** (power % 2)]])
    theta = 2.0 * np.pi * lab.k * (power % lab.n) / lab.n
    c, s = np.cos(theta), np.sin(theta)
    return np.array([[c, -s], [s, c]])


def labels_matrix(labels: list[IrrepLabel], power: int = 1) -> np.ndarray:
    """Block-diagonal action of g^power on the model with the given block order."""
    size = sum(l.dim for l in labels)
    out = np.zeros((size, size))
    i = 0
    for lab in labels:
        d = lab.dim
        out[i : i + d, i : i + d] = irrep_block(lab, power)
        i += d
    return out


def rep_matrix(v: VirtualRep, power: int = 1) -> np.ndarray:
    return labels_matrix(v.labels(), power)


def coordinate_labels(labels: list[IrrepLabel]) -> list[IrrepLabel]:
    """The irrep owning each real coordinate."""
    out: list[IrrepLabel] = []
    for lab in labels:
        out.extend([lab] * lab.dim)
    return out


def orthonormal_columns(m: np.ndarray, tol: float = 1e-7) -> np.ndarray:
    """Orthonormal basis of the column space of m."""
    if m.size == 0:
        return np.zeros((m.shape[0], 0))
    u, s, _ = np.linalg.svd(m, full_matrices=False)
    rank = int(np.sum(s > tol * max(1.0, s[0] if s.size else 1.0)))
    return u[:, :rank]


def orthogonal_complement(b: np.ndarray, ambient: int) -> np.ndarray:
    """Orthonormal basis of the complement of span(b) in R^ambient."""
    if b.shape[1] == 0:
        return np.eye(ambient)
    q = orthonormal_columns(b)
    if q.shape[1] == ambient:
        return np.zeros((ambient, 0))
    full, _ = np.linalg.qr(np.hstack([q, np.eye(ambient)]))
    comp = full[:, q.shape[1] : ambient]
    # re-orthogonalize against q for stability
    comp = comp - q @ (q.T @ comp)
    comp, _ = np.linalg.qr(comp)
    return comp[:, : ambient - q.shape[1]]


def _power(a: np.ndarray, t: int) -> np.ndarray:
    return np.linalg.matrix_power(a, t)


def canonicalize(a: np.ndarray, s: int) -> tuple[VirtualRep, np.ndarray]:
    """Decompose an orthogonal matrix of order dividing s into canonical form.

    Returns (v, Q) with Q orthogonal and Q^T a Q equal to the canonical model
    matrix of v.  Columns of Q are grouped in canonical irrep order.
    """
    size = a.shape[0]
    if size == 0:
        return VirtualRep(s), np.zeros((0, 0))
    powers = [np.eye(size)]
    for _ in range(1, s):
        powers.append(powers[-1] @ a)
    if np.max(np.abs(powers[-1] @ a - np.eye(size))) > 1e-7:
        raise ValueError(f"matrix does not have order dividing {s}")
    cols: list[np.ndarray] = []
    mult: dict[IrrepLabel, int] = {}
    for lab in irreps(s):
        if lab.kind == TRIV:
            proj = sum(powers) / s
        elif lab.kind == SGN:
            proj = sum(((-1) ** t) * powers[t] for t in range(s)) / s
        else:
            proj = sum(np.cos(2 * np.pi * lab.k * t / s) * powers[t] for t in range(s)) * (2.0 / s)
        basis = orthonormal_columns(proj, tol=1e-6)
        if basis.shape[1] == 0:
            continue
        if lab.kind != ROT:
            cols.append(basis)
            mult[lab] = basis.shape[1]
            continue
        theta = 2 * np.pi * lab.k / s
        jmat = (a - np.cos(theta) * np.eye(size)) / np.sin(theta)
        chosen: list[np.ndarray] = []
        for j in range(basis.shape[1]):
            u = basis[:, j].copy()
            for _ in range(2):
                for w in chosen:
                    u -= w * (w @ u)
            nu = np.linalg.norm(u)
            if nu < 1e-6:
                continue
            u /= nu
            ju = jmat @ u
            ju /= np.linalg.norm(ju)
            chosen.extend([u, ju])
            if len(chosen) == basis.shape[1]:
                break
        if len(chosen) != basis.shape[1]:
            raise ArithmeticError("failed to find a complex basis for a rotation block")
        cols.append(np.column_stack(chosen))
        mult[lab] = basis.shape[1] // 2
    q = np.hstack(cols)
    if q.shape[1] != size:
        raise ArithmeticError("isotypic decomposition lost dimensions")
    return VirtualRep(s, mult), q


def is_orthogonal_embedding(m: np.ndarray, tol: float = TOLERANCE) -> bool:
    if m.shape[1] == 0:
        return True
    return bool(np.max(np.abs(m.T @ m - np.eye(m.shape[1]))) <= tol)


def close(a: np.ndarray, b: np.ndarray, tol: float = TOLERANCE) -> bool:
    if a.shape != b.shape:
        return False
    if a.size == 0:
        return True
    return bool(np.max(np.abs(a - b)) <= tol)


def restriction_basis(v: VirtualRep, m: int) -> tuple[VirtualRep, np.ndarray]:
    """Canonical form of the model of v restricted to C_m = <g^{s/m}>.

    The change of basis is a signed permutation, so it is exact.
    """
    s = v.n
    if s % m:
        raise ValueError(f"{m} does not divide {s}")
    step = s // m
    labels = v.labels()
    buckets: dict[IrrepLabel, list[np.ndarray]] = {}
    offset = 0
    total = v.dim
    for lab in labels:
        e = np.eye(total)
        if lab.kind == TRIV:
            buckets.setdefault(IrrepLabel(TRIV, m), []).append(e[:, [offset]])
        elif lab.kind == SGN:
            target = IrrepLabel(TRIV, m) if step % 2 == 0 else IrrepLabel(SGN, m)
            buckets.setdefault(target, []).append(e[:, [offset]])
        else:
            j = lab.k % m
            x, y = e[:, [offset]], e[:, [offset + 1]]
            if j == 0:
                buckets.setdefault(IrrepLabel(TRIV, m), []).extend([x, y])
            elif 2 * j == m:
                buckets.setdefault(IrrepLabel(SGN, m), []).extend([x, y])
            elif 2 * j < m:
                buckets.setdefault(IrrepLabel(ROT, m, j), []).append(np.hstack([x, y]))
            else:
                buckets.setdefault(IrrepLabel(ROT, m, m - j), []).append(np.hstack([x, -y]))
        offset += lab.dim
    cols = []
    mult: dict[IrrepLabel, int] = {}
    for lab in irreps(m):
        pieces = buckets.get(lab, [])
        if pieces:
            cols.extend(pieces)
            mult[lab] = sum(p.shape[1] for p in pieces) // lab.dim
    q = np.hstack(cols) if cols else np.zeros((total, 0))
    return VirtualRep(m, mult), q


def fixed_basis(v: VirtualRep, m: int) -> tuple[VirtualRep, np.ndarray]:
    """C_m-fixed coordinates of the model of v, as a canonical C_{s/m} model.

    Returns (w, P) where P has orthonormal coordinate columns spanning the
    fixed subspace, ordered canonically for the quotient group.
    """
    s = v.n
    if s % m:
        raise ValueError(f"{m} does not divide {s}")
    q = s // m
    total = v.dim
    e = np.eye(total)
    cols = []
    mult: dict[IrrepLabel, int] = {}
    offset = 0
    for lab in v.labels():
        if all(j % m == 0 for j in lab.characters()):
            if lab.kind == TRIV:
                new = IrrepLabel(TRIV, q)
            elif lab.kind == SGN:
                new = IrrepLabel(SGN, q)
            else:
                new = IrrepLabel(ROT, q, lab.k // m)
            mult[new] = mult.get(new, 0) + 1
            cols.append(e[:, offset : offset + lab.dim])
        offset += lab.dim
    p = np.hstack(cols) if cols else np.zeros((total, 0))
    return VirtualRep(q, mult), p
