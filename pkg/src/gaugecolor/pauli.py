"""Pauli operators and Pauli groups in the GF(2) symplectic picture.

An operator is ``i**phase * X^x Z^z`` with ``x`` and ``z`` bit vectors.  Group
level questions (membership, centralizers, centres) are answered on the
``(x | z)`` row space, i.e. up to phase, unless stated otherwise.
"""

from __future__ import annotations

import io
from dataclasses import dataclass, field
from functools import cached_property
from pathlib import Path
from typing import Iterable, Sequence

import numpy as np

from . import gf2


@dataclass(frozen=True, eq=False)
class PauliOperator:
    x: np.ndarray
    z: np.ndarray
    phase: int = 0

    def __post_init__(self) -> None:
        x = np.asarray(self.x, dtype=np.uint8) & 1
        z = np.asarray(self.z, dtype=np.uint8) & 1
        if x.shape != z.shape or x.ndim != 1:
            raise ValueError("x and z masks must be 1D and of equal length")
        x.flags.writeable = False
        z.flags.writeable = False
        object.__setattr__(self, "x", x)
        object.__setattr__(self, "z", z)
        object.__setattr__(self, "phase", int(self.phase) % 4)

    @classmethod
    def identity(cls, n: int) -> "PauliOperator":
        return cls(np.zeros(n, np.uint8), np.zeros(n, np.uint8))

    @classmethod
    def from_supports(
        cls, n: int, x_support: Iterable[int] = (), z_support: Iterable[int] = (), phase: int = 0
    ) -> "PauliOperator":
        x = np.zeros(n, np.uint8)
        z = np.zeros(n, np.uint8)
        x[list(x_support)] = 1
        z[list(z_support)] = 1
        return cls(x, z, phase)

    @classmethod
    def X(cls, n: int, support: Iterable[int]) -> "PauliOperator":
        return cls.from_supports(n, x_support=support)

    @classmethod
    def Z(cls, n: int, support: Iterable[int]) -> "PauliOperator":
        return cls.from_supports(n, z_support=support)

    @classmethod
    def from_vector(cls, v: np.ndarray, phase: int = 0) -> "PauliOperator":
        v = np.asarray(v, dtype=np.uint8)
        n = v.size // 2
        return cls(v[:n], v[n:], phase)

    @classmethod
    def from_label(cls, label: str) -> "PauliOperator":
        """Parse strings such as ``"-iXIZY"``; qubit 0 is the leftmost letter."""
        phase = 0
        body = label
        for prefix, p in (("-i", 3), ("+i", 1), ("i", 1), ("-", 2), ("+", 0)):
            if body.startswith(prefix):
                phase, body = p, body[len(prefix):]
                break
        x = np.array([c in "XY" for c in body], np.uint8)
        z = np.array([c in "ZY" for c in body], np.uint8)
        # Y = i X Z
        return cls(x, z, phase + int(np.sum(x & z)))

    @property
    def n(self) -> int:
        return self.x.size

    @property
    def vector(self) -> np.ndarray:
        return np.concatenate([self.x, self.z])

    @property
    def weight(self) -> int:
        return int(np.count_nonzero(self.x | self.z))

    @property
    def is_x_type(self) -> bool:
        return not self.z.any()

    @property
    def is_z_type(self) -> bool:
        return not self.x.any()

    @property
    def is_hermitian(self) -> bool:
        return (self.phase - int(np.sum(self.x & self.z))) % 2 == 0

    def __mul__(self, other: "PauliOperator") -> "PauliOperator":
        if self.n != other.n:
            raise ValueError("operators act on different numbers of qubits")
        # Z^z1 X^x2 = (-1)^{z1.x2} X^x2 Z^z1
        swap = int(np.sum(self.z & other.x)) % 2
        return PauliOperator(self.x ^ other.x, self.z ^ other.z, self.phase + other.phase + 2 * swap)

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, PauliOperator):
            return NotImplemented
        return (
            self.phase == other.phase
            and np.array_equal(self.x, other.x)
            and np.array_equal(self.z, other.z)
        )

    def __hash__(self) -> int:
        return hash((self.phase, self.x.tobytes(), self.z.tobytes()))

    def equal_mod_phase(self, other: "PauliOperator") -> bool:
        return np.array_equal(self.x, other.x) and np.array_equal(self.z, other.z)

    def __repr__(self) -> str:
        return f"PauliOperator({self.label()})"

    def label(self) -> str:
        letters = "".join("IXZY"[int(a) + 2 * int(b)] for a, b in zip(self.x, self.z))
        p = (self.phase - int(np.sum(self.x & self.z))) % 4
        return ("", "i", "-", "-i")[p] + letters

    def to_matrix(self) -> np.ndarray:
        """Dense ``2^n x 2^n`` matrix; qubit 0 is the leftmost tensor factor."""
        X = np.array([[0, 1], [1, 0]], complex)
        Z = np.diag([1, -1]).astype(complex)
        out = np.eye(1, dtype=complex)
        for a, b in zip(self.x, self.z):
            f = (X if a else np.eye(2)) @ (Z if b else np.eye(2))
            out = np.kron(out, f)
        return (1j ** self.phase) * out


def symplectic_product(a: PauliOperator, b: PauliOperator) -> int:
    if a.n != b.n:
        raise ValueError("operators act on different numbers of qubits")
    return int(np.sum(a.x & b.z) + np.sum(a.z & b.x)) % 2


def commutes(a: PauliOperator, b: PauliOperator) -> bool:
    return symplectic_product(a, b) == 0


def symplectic_gram(rows_a: np.ndarray, rows_b: np.ndarray) -> np.ndarray:
    """Matrix of symplectic products between two stacks of ``(x | z)`` rows."""
    n = rows_a.shape[1] // 2
    swapped = np.concatenate([rows_b[:, n:], rows_b[:, :n]], axis=1)
    return gf2.matmul(rows_a, swapped.T)


@dataclass(frozen=True, eq=False)
class GeneratorSet:
    """An ordered, possibly redundant, list of generators of a Pauli group.

    ``labels`` optionally records where each generator came from (for
    lattice groups, ``("X" | "Z", simplex)``).
    """

    n: int
    generators: tuple[PauliOperator, ...]
    labels: tuple = field(default=())

    def __post_init__(self) -> None:
        gens = tuple(self.generators)
        for g in gens:
            if g.n != self.n:
                raise ValueError("generator length does not match the qubit count")
        object.__setattr__(self, "generators", gens)
        if self.labels and len(self.labels) != len(gens):
            raise ValueError("labels must match generators one to one")

    @classmethod
    def from_matrix(cls, rows: np.ndarray, phases: Sequence[int] | None = None) -> "GeneratorSet":
        rows = gf2.as_bits(rows)
        n = rows.shape[1] // 2
        phases = phases if phases is not None else [0] * rows.shape[0]
        return cls(n, tuple(PauliOperator.from_vector(r, p) for r, p in zip(rows, phases)))

    def __len__(self) -> int:
        return len(self.generators)

    def __iter__(self):
        return iter(self.generators)

    def __getitem__(self, i: int) -> PauliOperator:
        return self.generators[i]

    @cached_property
    def matrix(self) -> np.ndarray:
        if not self.generators:
            return np.zeros((0, 2 * self.n), np.uint8)
        return np.array([g.vector for g in self.generators], dtype=np.uint8)

    @cached_property
    def basis(self) -> np.ndarray:
        """Row-reduced basis of the ``(x | z)`` row space."""
        return gf2.row_basis(self.matrix)

    @property
    def rank(self) -> int:
        return self.basis.shape[0]

    def x_part(self) -> "GeneratorSet":
        keep = [i for i, g in enumerate(self.generators) if g.is_x_type]
        return self._subset(keep)

    def z_part(self) -> "GeneratorSet":
        keep = [i for i, g in enumerate(self.generators) if g.is_z_type]
        return self._subset(keep)

    def _subset(self, keep: Sequence[int]) -> "GeneratorSet":
        labels = tuple(self.labels[i] for i in keep) if self.labels else ()
        return GeneratorSet(self.n, tuple(self.generators[i] for i in keep), labels)

    def extend(self, others: Iterable[PauliOperator]) -> "GeneratorSet":
        return GeneratorSet(self.n, self.generators + tuple(others))

    def without(self, index: int) -> "GeneratorSet":
        return self._subset([i for i in range(len(self)) if i != index])

    def is_abelian(self) -> bool:
        if not self.generators:
            return True
        return not symplectic_gram(self.matrix, self.matrix).any()

    def product(self, coefficients: Sequence[int]) -> PauliOperator:
        """Ordered product of the generators selected by a 0/1 vector."""
        out = PauliOperator.identity(self.n)
        for c, g in zip(coefficients, self.generators):
            if c:
                out = out * g
        return out

    @cached_property
    def _phase_subgroup(self) -> int:
        """Generator ``g`` of the phases ``i^(g k)`` the group contains times the identity."""
        phases = []
        if not self.is_abelian():
            phases.append(2)
        if self.generators:
            for dep in gf2.nullspace(self.matrix.T):
                phases.append(self.product(dep).phase)
        g = 4
        for p in phases:
            g = int(np.gcd(g, p))
        return g

    def contains(self, P: PauliOperator, mod_phase: bool = True) -> bool:
        return member(P, self, mod_phase)

    def to_text(self) -> str:
        return write_check_matrix(self)


def member(P: PauliOperator, G: GeneratorSet, mod_phase: bool = True) -> bool:
    """Is ``P`` in the group generated by ``G``?  Up to phase unless ``mod_phase`` is false."""
    if P.n != G.n:
        raise ValueError("operator and group act on different numbers of qubits")
    v = P.vector
    if not v.any():
        return mod_phase or P.phase % G._phase_subgroup == 0
    if len(G) == 0:
        return False
    coeffs = gf2.combination(G.matrix, v)
    if coeffs is None:
        return False
    if mod_phase:
        return True
    diff = (P.phase - G.product(coeffs).phase) % 4
    return diff % G._phase_subgroup == 0


def product_group(*groups: GeneratorSet) -> GeneratorSet:
    n = groups[0].n
    gens: tuple[PauliOperator, ...] = ()
    for g in groups:
        gens += g.generators
    return GeneratorSet(n, gens)


def centralizer(G: GeneratorSet) -> GeneratorSet:
    """Generators (phase 0) of every Pauli commuting with all of ``G``."""
    n = G.n
    if len(G) == 0:
        return GeneratorSet.from_matrix(np.eye(2 * n, dtype=np.uint8))
    m = G.basis
    # <g, v> = g_x . v_z + g_z . v_x
    swapped = np.concatenate([m[:, n:], m[:, :n]], axis=1)
    return GeneratorSet.from_matrix(gf2.nullspace(swapped))


def center(G: GeneratorSet) -> GeneratorSet:
    """Generators (phase 0) of ``centralizer(G) ∩ G``."""
    if len(G) == 0:
        return G
    inter = gf2.rowspace_intersection(centralizer(G).matrix, G.matrix)
    return GeneratorSet.from_matrix(inter.reshape(-1, 2 * G.n))


def same_group(a: GeneratorSet, b: GeneratorSet) -> bool:
    """Row-space equality, i.e. equality of the groups up to phases."""
    if a.n != b.n:
        return False
    return gf2.rowspace_equal(_rows(a), _rows(b))


def subgroup(a: GeneratorSet, b: GeneratorSet) -> bool:
    """``a ⊆ b`` up to phases."""
    return gf2.rowspace_contains(_rows(b), _rows(a))


def _rows(G: GeneratorSet) -> np.ndarray:
    return G.matrix if len(G) else np.zeros((0, 2 * G.n), np.uint8)


# --------------------------------------------------------------------------
# canonical generators


class CanonicalBasisError(ValueError):
    def __init__(self, message: str, witness: PauliOperator | None = None) -> None:
        super().__init__(message)
        self.witness = witness


@dataclass(frozen=True)
class SymplecticBasis:
    """Canonical generators ``X_i, Z_i`` (0-based here) with the nested indices ``r <= s <= t``.

    ``Z_0..Z_{r-1}`` span ``S1``, ``Z_0..Z_{s-1}`` span ``S2``, and ``G1`` is spanned
    by ``Z_0..Z_{r-1}`` together with the pairs ``r..t-1``.  Pairs ``t..n-1`` are
    logical; ``X_0..X_{r-1}`` are destabilizers lying outside ``G1``.
    """

    xs: np.ndarray
    zs: np.ndarray
    r: int
    s: int
    t: int

    @property
    def n(self) -> int:
        return self.xs.shape[0]

    def gram(self) -> np.ndarray:
        rows = np.vstack([self.xs, self.zs])
        return symplectic_gram(rows, rows)

    def is_canonical(self) -> bool:
        n = self.n
        expect = np.zeros((2 * n, 2 * n), np.uint8)
        expect[np.arange(n), n + np.arange(n)] = 1
        expect[n + np.arange(n), np.arange(n)] = 1
        return np.array_equal(self.gram(), expect)

    def group(self, xs: range = range(0), zs: range = range(0)) -> GeneratorSet:
        rows = [self.xs[i] for i in xs] + [self.zs[i] for i in zs]
        if not rows:
            return GeneratorSet(self.n, ())
        return GeneratorSet.from_matrix(np.array(rows))


def _omega(u: np.ndarray, v: np.ndarray) -> int:
    n = u.size // 2
    return int(np.sum(u[:n] & v[n:]) + np.sum(u[n:] & v[:n])) % 2


def _solve_pairing(pool: np.ndarray, against: list[np.ndarray], target: list[int]) -> np.ndarray | None:
    """A vector in ``rowspace(pool)`` with prescribed symplectic products."""
    if not against:
        return np.zeros(pool.shape[1], np.uint8)
    gram = symplectic_gram(np.array(against), pool)  # rows: constraints, cols: pool vectors
    coeffs = gf2.solve(gram, np.array(target, np.uint8))
    if coeffs is None:
        return None
    return gf2.matmul(coeffs.reshape(1, -1), pool)[0]


def _hyperbolic_pairs(vectors: list[np.ndarray]) -> tuple[list[tuple[np.ndarray, np.ndarray]], list[np.ndarray]]:
    """Symplectic Gram-Schmidt: split a spanning list into hyperbolic pairs and a radical part."""
    rest = [v.copy() for v in vectors if v.any()]
    pairs, radical = [], []
    while rest:
        u = rest.pop(0)
        if not u.any():
            continue
        j = next((k for k, w in enumerate(rest) if _omega(u, w)), None)
        if j is None:
            radical.append(u)
            continue
        w = rest.pop(j)
        rest = [v ^ (_omega(v, w) * u) ^ (_omega(v, u) * w) for v in rest]
        pairs.append((u, w))
    return pairs, radical


def canonical_basis(
    S1: GeneratorSet,
    S2: GeneratorSet,
    G1: GeneratorSet,
    logicals: Sequence[PauliOperator] = (),
) -> SymplecticBasis:
    """Canonical generators adapted to ``S1 ⊆ S2 ⊆ G1`` with ``S1`` the centre of ``G1``.

    Optional ``logicals`` (alternating X, Z representatives) are placed first
    among the logical pairs when they fit.
    """
    n = G1.n
    for g in S1:
        if not member(g, S2):
            raise CanonicalBasisError("S1 is not contained in S2", g)
    for g in S2:
        if not member(g, G1):
            raise CanonicalBasisError("S2 is not contained in G1", g)
    if not S2.is_abelian():
        raise CanonicalBasisError("S2 is not abelian")
    cen = center(G1)
    if not same_group(cen, S1):
        witness = next((g for g in cen if not member(g, S1)), None)
        if witness is None:
            witness = next((g for g in S1 if not member(g, cen)), None)
        raise CanonicalBasisError("S1 is not the centre of G1", witness)

    zs = [r.copy() for r in S1.basis]
    r = len(zs)
    span = S1.basis
    for v in gf2.row_basis(S2.matrix):
        if not gf2.in_rowspace(v, span):
            zs.append(v.copy())
            span = np.vstack([span, v])
    s = len(zs)

    g1 = G1.basis
    xs_mid: list[np.ndarray] = []
    for i in range(r, s):
        target = [int(j == i) for j in range(s)]
        x = _solve_pairing(g1, zs, target)
        if x is None:
            raise CanonicalBasisError("no partner for a generator of S2/S1 inside G1",
                                      PauliOperator.from_vector(zs[i]))
        xs_mid.append(x)
    # make the new X's commute among themselves (adding Z_k only touches pair k)
    for a in range(len(xs_mid)):
        for b in range(a):
            if _omega(xs_mid[a], xs_mid[b]):
                xs_mid[a] = xs_mid[a] ^ zs[r + b]

    fixed = zs + xs_mid
    gram = symplectic_gram(np.array(fixed), g1) if fixed else np.zeros((0, g1.shape[0]), np.uint8)
    rest = gf2.matmul(gf2.nullspace(gram), g1) if fixed else g1
    pairs, _ = _hyperbolic_pairs(list(rest))
    gauge_z = [p[0] for p in pairs]
    gauge_x = [p[1] for p in pairs]
    t = s + len(pairs)

    all_z = zs + gauge_z
    all_x_known = xs_mid + gauge_x
    logical_vecs = [op.vector for op in logicals]
    eye = np.eye(2 * n, dtype=np.uint8)
    destab: list[np.ndarray] = []
    for i in range(r):
        # also orthogonal to the requested logicals so they survive into the complement
        target = [int(j == i) for j in range(t)] + [0] * (len(all_x_known) + len(logical_vecs))
        x = _solve_pairing(eye, all_z + all_x_known + logical_vecs, target)
        if x is None:
            raise CanonicalBasisError("supplied logicals are not independent of G1")
        assert x is not None  # the constraints are independent functionals
        destab.append(x)
    for a in range(r):
        for b in range(a):
            if _omega(destab[a], destab[b]):
                destab[a] = destab[a] ^ zs[b]

    used = all_z + all_x_known + destab
    comp = gf2.nullspace(symplectic_gram(np.array(used), eye)) if used else eye
    seeds = [v for v in logical_vecs if gf2.in_rowspace(v, comp)]
    lpairs, rad = _hyperbolic_pairs(seeds + list(comp))
    assert not rad, "complement of a symplectic subspace must be symplectic"
    xs = destab + xs_mid + gauge_x + [p[0] for p in lpairs]
    zs_all = zs + gauge_z + [p[1] for p in lpairs]
    basis = SymplecticBasis(np.array(xs, np.uint8), np.array(zs_all, np.uint8), r, s, t)
    if basis.n != n or not basis.is_canonical():
        raise CanonicalBasisError("failed to complete a canonical basis")
    return basis


# --------------------------------------------------------------------------
# check-matrix text format


def write_check_matrix(G: GeneratorSet) -> str:
    """``PAULI <n_qubits> <n_rows>`` then ``<x-bits> <z-bits>`` per row."""
    lines = [f"PAULI {G.n} {len(G)}"]
    for g in G:
        lines.append("".join(map(str, g.x)) + " " + "".join(map(str, g.z)))
    return "\n".join(lines) + "\n"


def read_check_matrix(source: str | Path | io.TextIOBase) -> GeneratorSet:
    if isinstance(source, Path):
        text = source.read_text()
    elif isinstance(source, str):
        text = source
    else:
        text = source.read()
    lines = [ln.strip() for ln in text.splitlines() if ln.strip()]
    head = lines[0].split()
    if len(head) != 3 or head[0] != "PAULI":
        raise ValueError(f"bad check-matrix header: {lines[0]!r}")
    n, m = int(head[1]), int(head[2])
    if len(lines) - 1 != m:
        raise ValueError(f"header announces {m} rows, found {len(lines) - 1}")
    gens = []
    for ln in lines[1:]:
        xs, zs = ln.split()
        if len(xs) != n or len(zs) != n or set(xs + zs) - {"0", "1"}:
            raise ValueError(f"malformed row: {ln!r}")
        gens.append(PauliOperator(np.array([int(c) for c in xs]), np.array([int(c) for c in zs])))
    return GeneratorSet(n, tuple(gens))
