"""Exact arithmetic in the real representation ring RO(C_n).

Every real irrep of C_n is a sum of one or two complex characters
chi_j(g) = exp(2 pi i j / n).  All operations are carried out on the integer
vector of complex-character multiplicities, so no floating point is involved:

* trivial   <-> chi_0
* sign      <-> chi_{n/2}            (n even)
* rot(k)    <-> chi_k + chi_{n-k}    (1 <= k < n/2)
"""

from __future__ import annotations

from dataclasses import dataclass, field
from typing import Iterable, Mapping

from .config import MAX_GROUP_ORDER

TRIV = "triv"
SGN = "sgn"
ROT = "rot"


def _check_order(n: int) -> None:
    if not isinstance(n, int) or n < 1:
        raise ValueError(f"group order must be a positive integer, got {n!r}")
    if n > MAX_GROUP_ORDER:
        raise ValueError(f"group order {n} exceeds the cap {MAX_GROUP_ORDER}")


def _check_divides(m: int, n: int) -> None:
    if not isinstance(m, int) or m < 1 or n % m:
        raise ValueError(f"{m!r} does not divide {n}")


@dataclass(frozen=True, order=False)
class IrrepLabel:
    """A real irreducible representation of C_n."""

    kind: str
    n: int
    k: int = 0

    def __post_init__(self) -> None:
        _check_order(self.n)
        if self.kind == TRIV:
            if self.k != 0:
                raise ValueError("trivial irrep carries no index")
        elif self.kind == SGN:
            if self.n % 2 or self.k != 0:
                raise ValueError(f"sign irrep requires even order, got n={self.n}")
        elif self.kind == ROT:
            if not (1 <= self.k and 2 * self.k < self.n):
                raise ValueError(f"rotation({self.k}) requires 1 <= k < n/2 for n={self.n}")
        else:
            raise ValueError(f"unknown irrep kind {self.kind!r}")

    @property
    def dim(self) -> int:
        return 2 if self.kind == ROT else 1

    @property
    def key(self) -> tuple[int, int]:
        return {TRIV: (0, 0), SGN: (1, 0)}.get(self.kind, (2, self.k))

    @property
    def name(self) -> str:
        return f"rot{self.k}" if self.kind == ROT else self.kind

    def characters(self) -> tuple[int, ...]:
        """Complex character indices (mod n) making up this irrep."""
        if self.kind == TRIV:
            return (0,)
        if self.kind == SGN:
            return (self.n // 2,)
        return (self.k, self.n - self.k)

    def __lt__(self, other: "IrrepLabel") -> bool:
        return (self.n, self.key) < (other.n, other.key)

    def __repr__(self) -> str:
        return f"{self.name}(C{self.n})"

    @classmethod
    def parse(cls, name: str, n: int) -> "IrrepLabel":
        if name in (TRIV, "trivial"):
            return cls(TRIV, n)
        if name in (SGN, "sign"):
            return cls(SGN, n)
        if name.startswith(ROT):
            try:
                k = int(name[len(ROT):])
            except ValueError as exc:
                raise ValueError(f"bad irrep name {name!r}") from exc
            return cls(ROT, n, k)
        raise ValueError(f"bad irrep name {name!r}")


def trivial(n: int) -> IrrepLabel:
    return IrrepLabel(TRIV, n)


def sign(n: int) -> IrrepLabel:
    return IrrepLabel(SGN, n)


def rotation(k: int, n: int) -> IrrepLabel:
    return IrrepLabel(ROT, n, k)


def irreps(n: int) -> list[IrrepLabel]:
    """All real irreps of C_n in canonical order."""
    _check_order(n)
    out = [trivial(n)]
    if n % 2 == 0:
        out.append(sign(n))
    out.extend(rotation(k, n) for k in range(1, (n + 1) // 2) if 2 * k < n)
    return out


def label_of_character(j: int, n: int) -> IrrepLabel:
    """The real irrep containing the complex character chi_j."""
    j %= n
    if j == 0:
        return trivial(n)
    if 2 * j == n:
        return sign(n)
    return rotation(min(j, n - j), n)


@dataclass(frozen=True)
class VirtualRep:
    """An element of RO(C_n): integer multiplicities of real irreps."""

    n: int
    _mult: tuple[tuple[IrrepLabel, int], ...] = field(default=())

    def __init__(self, n: int, mult: Mapping[IrrepLabel, int] | None = None):
        _check_order(n)
        clean: dict[IrrepLabel, int] = {}
        for lab, m in (mult or {}).items():
            if lab.n != n:
                raise ValueError(f"irrep {lab!r} does not belong to C{n}")
            if not isinstance(m, int):
                raise TypeError("multiplicities must be integers")
            if m:
                clean[lab] = clean.get(lab, 0) + m
        object.__setattr__(self, "n", n)
        object.__setattr__(
            self, "_mult", tuple(sorted(((l, m) for l, m in clean.items() if m), key=lambda t: t[0].key))
        )

    # construction helpers
    @classmethod
    def zero(cls, n: int) -> "VirtualRep":
        return cls(n)

    @classmethod
    def of(cls, n: int, **mult: int) -> "VirtualRep":
        return cls(n, {IrrepLabel.parse(k, n): v for k, v in mult.items()})

    @classmethod
    def from_labels(cls, labels: Iterable[IrrepLabel], n: int) -> "VirtualRep":
        acc: dict[IrrepLabel, int] = {}
        for lab in labels:
            acc[lab] = acc.get(lab, 0) + 1
        return cls(n, acc)

    @classmethod
    def from_characters(cls, chars: list[int]) -> "VirtualRep":
        """Inverse of :meth:`characters`; the vector must be conjugation-symmetric."""
        n = len(chars)
        for j in range(n):
            if chars[j] != chars[(-j) % n]:
                raise ValueError("character vector is not conjugation-symmetric")
        mult = {lab: chars[lab.characters()[0]] for lab in irreps(n)}
        return cls(n, mult)

    # accessors
    @property
    def mult(self) -> dict[IrrepLabel, int]:
        return dict(self._mult)

    def __getitem__(self, lab: IrrepLabel) -> int:
        for l, m in self._mult:
            if l == lab:
                return m
        return 0

    def multiplicity_vector(self) -> list[int]:
        return [self[lab] for lab in irreps(self.n)]

    def characters(self) -> list[int]:
        """Multiplicity of each complex character chi_0 .. chi_{n-1}."""
        out = [0] * self.n
        for lab, m in self._mult:
            for j in lab.characters():
                out[j] += m
        return out

    @property
    def dim(self) -> int:
        return sum(lab.dim * m for lab, m in self._mult)

    @property
    def is_actual(self) -> bool:
        return all(m >= 0 for _, m in self._mult)

    @property
    def is_zero(self) -> bool:
        return not self._mult

    def labels(self) -> list[IrrepLabel]:
        """Irreps with multiplicity, in canonical order (actual reps only)."""
        if not self.is_actual:
            raise ValueError("labels() requires an actual representation")
        return [lab for lab, m in self._mult for _ in range(m)]

    def det_sign(self) -> int:
        """Determinant of the generator acting on an actual model: (-1)^{#sign}."""
        if self.n % 2:
            return 1
        return -1 if self[sign(self.n)] % 2 else 1

    # arithmetic
    def _combine(self, other: "VirtualRep", s: int) -> "VirtualRep":
        if not isinstance(other, VirtualRep):
            return NotImplemented
        if other.n != self.n:
            raise ValueError(f"group orders differ: {self.n} vs {other.n}")
        acc = self.mult
        for lab, m in other._mult:
            acc[lab] = acc.get(lab, 0) + s * m
        return VirtualRep(self.n, acc)

    def __add__(self, other: "VirtualRep") -> "VirtualRep":
        return self._combine(other, 1)

    def __sub__(self, other: "VirtualRep") -> "VirtualRep":
        return self._combine(other, -1)

    def __neg__(self) -> "VirtualRep":
        return VirtualRep(self.n, {l: -m for l, m in self._mult})

    def __mul__(self, k: int) -> "VirtualRep":
        if not isinstance(k, int):
            return NotImplemented
        return VirtualRep(self.n, {l: k * m for l, m in self._mult})

    __rmul__ = __mul__

    def inner(self, other: "VirtualRep") -> int:
        """Character inner product <chi_self, chi_other> (exact)."""
        if other.n != self.n:
            raise ValueError("group orders differ")
        a, b = self.characters(), other.characters()
        return sum(x * y for x, y in zip(a, b))

    # serialization
    def to_json(self) -> dict:
        return {"n": self.n, "mult": {lab.name: m for lab, m in self._mult}}

    @classmethod
    def from_json(cls, data: Mapping) -> "VirtualRep":
        n = int(data["n"])
        mult = {IrrepLabel.parse(k, n): int(v) for k, v in dict(data.get("mult", {})).items()}
        return cls(n, mult)

    def __str__(self) -> str:
        if not self._mult:
            return "0"
        parts = []
        for lab, m in self._mult:
            parts.append(lab.name if m == 1 else f"{m}{lab.name}")
        return " + ".join(parts).replace("+ -", "- ")

    def __repr__(self) -> str:
        return f"VirtualRep(C{self.n}: {self})"


def regular_rep(n: int) -> VirtualRep:
    _check_order(n)
    return VirtualRep.from_characters([1] * n)


def dim(v: VirtualRep) -> int:
    return v.dim


def restrict(v: VirtualRep, m: int) -> VirtualRep:
    """Restrict along C_m = <g^{n/m}> inside C_n."""
    _check_divides(m, v.n)
    out = [0] * m
    for j, c in enumerate(v.characters()):
        out[j % m] += c
    return VirtualRep.from_characters(out)


def fixed_points(v: VirtualRep, m: int) -> VirtualRep:
    """C_m-fixed part of v as a representation of C_n / C_m = C_{n/m}."""
    _check_divides(m, v.n)
    q = v.n // m
    chars = v.characters()
    return VirtualRep.from_characters([chars[m * j] for j in range(q)])


def induce(v: VirtualRep, n: int) -> VirtualRep:
    """Induce from C_m (m = v.n) to C_n."""
    _check_order(n)
    _check_divides(v.n, n)
    m = v.n
    chars = v.characters()
    return VirtualRep.from_characters([chars[j % m] for j in range(n)])
