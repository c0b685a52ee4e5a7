"""Transversal ``R_n = diag(1, exp(2 pi i / 2^n))`` on gauge color codes.

A plan applies ``R_n^k`` to every qubit outside a set ``T`` and ``R_n^-k`` to
the qubits in ``T``.  ``T`` depends only on the lattice; it is chosen so that
every colex ``d``-cell satisfies ``|V_c|_T = 0 mod 2^d``.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass
from typing import Iterable

import numpy as np

from . import gf2
from .code import GaugeColorCode
from .lattice import (
    SUBDIVISION,
    ColoredComplex,
    Simplex,
    Vertex,
    colex_cells,
    support,
    triad_parity,
)


class DimensionConditionError(ValueError):
    """``D >= n * ebar`` fails, so no transversal ``R_n`` is promised."""


class InvalidColexError(ValueError):
    """The lattice violates a colex constraint (odd 2-cells, inconsistent bad-cell syndrome)."""


@dataclass(frozen=True)
class TSet:
    """A set of qubits on which the rotation is inverted."""

    n_qubits: int
    qubits: frozenset[int]

    def __post_init__(self) -> None:
        object.__setattr__(self, "qubits", frozenset(int(q) for q in self.qubits))
        if any(not 0 <= q < self.n_qubits for q in self.qubits):
            raise ValueError("T contains an index outside the qubit range")

    @classmethod
    def empty(cls, n_qubits: int) -> "TSet":
        return cls(n_qubits, frozenset())

    def __len__(self) -> int:
        return len(self.qubits)

    def __contains__(self, q: int) -> bool:
        return q in self.qubits

    def signed_count(self, subset: Iterable[int] | None = None) -> int:
        """``|A|_T = |A - T| - |A & T|``; the whole qubit set when ``subset`` is omitted."""
        a = set(range(self.n_qubits)) if subset is None else set(subset)
        return len(a) - 2 * len(a & self.qubits)

    @property
    def indicator(self) -> np.ndarray:
        v = np.zeros(self.n_qubits, dtype=np.uint8)
        v[sorted(self.qubits)] = 1
        return v

    @property
    def mask(self) -> int:
        return sum(1 << q for q in self.qubits)

    def to_json(self) -> list[int]:
        return sorted(self.qubits)


@dataclass(frozen=True)
class GatePlan:
    n: int
    k: int
    T: TSet

    @property
    def exponents(self) -> list[int]:
        """Power of ``R_n`` applied to each qubit."""
        return [-self.k if q in self.T else self.k for q in range(self.T.n_qubits)]

    def to_json(self) -> dict:
        return {"n": self.n, "k": self.k, "T": self.T.to_json(), "exponents": self.exponents}


def _as_tset(K_or_n: ColoredComplex | int, T: TSet | Iterable[int] | None) -> TSet:
    n = K_or_n if isinstance(K_or_n, int) else len(K_or_n.qubits)
    if T is None:
        return TSet.empty(n)
    if isinstance(T, TSet):
        if T.n_qubits != n:
            raise ValueError(f"T is defined on {T.n_qubits} qubits, lattice has {n}")
        return T
    return TSet(n, frozenset(T))


# --------------------------------------------------------------------------
# intersection condition


def _mask(qubits: Iterable[int]) -> int:
    m = 0
    for q in qubits:
        m |= 1 << int(q)
    return m


def _signed(mask: int, tmask: int) -> int:
    return mask.bit_count() - 2 * (mask & tmask).bit_count()


def intersection_violations(
    code: GaugeColorCode, T: TSet | Iterable[int] | None, n: int, limit: int = 10
) -> list[tuple[tuple[int, ...], int]]:
    """Generator-index tuples whose support intersection breaks the condition.

    Subsets are grown depth-first; an empty intersection can be pruned because
    every extension is empty too.
    """
    if n < 1:
        raise ValueError("gate level n must be >= 1")
    K = code.lattice
    T = _as_tset(K, T)
    tmask = T.mask
    gens = [
        (i, _mask(np.flatnonzero(g.x)))
        for i, g in enumerate(code.G)
        if g.is_x_type and g.x.any()
    ]
    found: list[tuple[tuple[int, ...], int]] = []
    seen: set[tuple[int, int]] = set()

    def grow(start: int, chosen: tuple[int, ...], inter: int) -> bool:
        m = len(chosen)
        key = (m, inter)
        if key not in seen:
            seen.add(key)
            if _signed(inter, tmask) % (1 << (n - m + 1)):
                found.append((chosen, _signed(inter, tmask)))
                if len(found) >= limit:
                    return True
        if m == n:
            return False
        for j in range(start, len(gens)):
            nxt = inter & gens[j][1]
            if nxt and grow(j + 1, chosen + (gens[j][0],), nxt):
                return True
        return False

    for j, (i, mk) in enumerate(gens):
        if grow(j + 1, (i,), mk):
            break
    return found


def check_intersection_condition(code: GaugeColorCode, T: TSet | Iterable[int] | None, n: int) -> bool:
    """For every ``m <= n`` X-type gauge generators, ``|S_1 & ... & S_m|_T = 0 mod 2^(n-m+1)``."""
    return not intersection_violations(code, T, n, limit=1)


def intersection_by_cells(code: GaugeColorCode, indices: Iterable[int]) -> frozenset[int]:
    """Support intersection predicted from the color structure.

    Supports of simplices intersect in the support of their union when the
    union is a properly colored simplex of the lattice, and are disjoint
    otherwise.
    """
    K = code.lattice
    verts: set[int] = set()
    for i in indices:
        kind, simplex = code.G.labels[i]
        if kind != "X":
            raise ValueError(f"generator {i} is not X-type")
        verts |= set(simplex)
    u = tuple(sorted(verts))
    if len(K.colors(u)) != len(u) or u not in K.cofaces:
        return frozenset()
    return support(K, u)


# --------------------------------------------------------------------------
# bad cells and the T solver


def two_cells(K: ColoredComplex):
    if K.D < 2:
        raise ValueError("two-cells need D >= 2")
    return colex_cells(K, 2)


def bad_cell_syndrome(K: ColoredComplex) -> np.ndarray:
    """Bit per colex 2-cell (``Delta_{D-2}`` order): set iff ``|V_c| = 2 mod 4``."""
    cells = two_cells(K)
    sizes = np.array([len(c.qubits) for c in cells])
    if (sizes % 2).any():
        odd = cells[int(np.flatnonzero(sizes % 2)[0])]
        raise InvalidColexError(f"2-cell at {odd.simplex} has {len(odd.qubits)} vertices")
    return ((sizes % 4) == 2).astype(np.uint8)


def bad_cell_parity_violations(K: ColoredComplex) -> list[tuple[Simplex, dict[int, int]]]:
    """3-cells whose 2-cell color classes hold bad-cell counts of different parity.

    Returns ``(simplex of the 3-cell, {color of the extending vertex: bad count})``.
    """
    if K.D < 3:
        return []
    syndrome = bad_cell_syndrome(K)
    counts: dict[Simplex, dict[int, int]] = {s: {} for s in K.delta(K.D - 3)}
    for bit, cell in zip(syndrome, two_cells(K)):
        for v in cell.simplex:
            s = tuple(u for u in cell.simplex if u != v)
            if s in counts:
                cls = counts[s]
                cls[K.color(v)] = cls.get(K.color(v), 0) + int(bit)
    return [
        (s, cls) for s, cls in counts.items() if len({x % 2 for x in cls.values()}) > 1
    ]


def two_cell_matrix(K: ColoredComplex) -> np.ndarray:
    cells = two_cells(K)
    a = np.zeros((len(cells), len(K.qubits)), dtype=np.uint8)
    for i, c in enumerate(cells):
        a[i, sorted(c.qubits)] = 1
    return a


def solve_tset(K: ColoredComplex) -> TSet:
    """Qubits ``T`` such that ``X_T`` flips exactly the bad 2-cells.

    Returns the particular solution of the row-reduction solver (free variables
    zero), so the result is deterministic.
    """
    if not K.is_closed:
        raise ValueError("solve_tset needs a closed complex")
    a = two_cell_matrix(K)
    b = bad_cell_syndrome(K)
    x = gf2.solve(a, b)
    if x is None:
        raise InvalidColexError("bad-cell syndrome is not realisable by any qubit set")
    return TSet(len(K.qubits), frozenset(int(q) for q in np.flatnonzero(x)))


def explicit_tset_3d(K: ColoredComplex) -> TSet:
    """The prescribed T for the tetrahedral family.

    ``T_3``: bulk tetrahedra with an even triad.  ``T_2``: face-attached qubits
    whose triangle is not a face of a ``T_3`` tetrahedron.  ``T_1``: edge-attached
    qubits whose edge lies in no ``T_2`` triangle.
    """
    if K.D != 3 or not K.is_closed:
        raise ValueError("explicit_tset_3d needs a closed 3D complex")
    qs = K.qubits.simplices
    core = [tuple(v for v in s if K.is_original(v)) for s in qs]
    try:
        t3 = [q for q, m in enumerate(core) if len(m) == 4 and triad_parity(K, m) == 1]
    except ValueError as exc:
        raise ValueError(f"lattice lacks triad metadata: {exc}") from None
    t3_faces = {f for q in t3 for f in itertools.combinations(core[q], 3)}
    t2 = [q for q, m in enumerate(core) if len(m) == 3 and m not in t3_faces]
    t2_edges = {e for q in t2 for e in itertools.combinations(core[q], 2)}
    t1 = [q for q, m in enumerate(core) if len(m) == 2 and m not in t2_edges]
    return TSet(len(qs), frozenset(t3 + t2 + t1))


def cell_violations(K: ColoredComplex, T: TSet | Iterable[int] | None = None) -> list[tuple[int, Simplex, int]]:
    """``(d, simplex, |V_c|_T)`` for every colex d-cell with ``|V_c|_T != 0 mod 2^d``."""
    T = _as_tset(K, T)
    out = []
    for d in range(1, K.D + 1):
        for c in colex_cells(K, d):
            val = T.signed_count(c.qubits)
            if val % (1 << d):
                out.append((d, c.simplex, val))
    return out


def verify_cellsT(K: ColoredComplex, T: TSet | Iterable[int] | None = None) -> bool:
    return not cell_violations(K, T)


def compute_k(T: TSet, n: int) -> int:
    """Inverse of ``|Q|_T`` modulo ``2^n``."""
    q = T.signed_count()
    if q % 2 == 0:
        raise ValueError(f"|Q|_T = {q} is even; T is corrupted")
    return pow(q, -1, 1 << n)


def gate_plan(
    code: GaugeColorCode,
    n: int,
    method: str = "solve",
    T: TSet | Iterable[int] | None = None,
) -> GatePlan:
    """Plan a transversal logical ``R_n``.

    ``method`` picks how ``T`` is obtained when it is not given: ``"solve"``
    (any lattice) or ``"explicit"`` (3D tetrahedral family).
    """
    if n < 1:
        raise ValueError("gate level n must be >= 1")
    if code.D < n * code.ebar:
        raise DimensionConditionError(
            f"D = {code.D} < n * ebar = {n} * {code.ebar}; R_{n} is not transversal on "
            f"the ({code.d},{code.e}) code"
        )
    K = code.lattice
    if T is not None:
        tset = _as_tset(K, T)
    elif method == "solve":
        tset = solve_tset(K)
    elif method == "explicit":
        tset = explicit_tset_3d(K)
    else:
        raise ValueError(f"unknown method {method!r}")
    bad = intersection_violations(code, tset, n, limit=1)
    if bad:
        idx, val = bad[0]
        raise InvalidColexError(
            f"T breaks the intersection condition: generators {idx} meet in |.|_T = {val}"
        )
    return GatePlan(n, compute_k(tset, n), tset)


# --------------------------------------------------------------------------
# subdivision


def perfect_subdivision(K: ColoredComplex, T: TSet | Iterable[int] | None) -> ColoredComplex:
    """Replace each qubit simplex in ``T`` by ``2^(D+1) - 1`` smaller ones.

    Each replaced simplex gets one new vertex per color; for every nonempty
    color set ``kappa`` the new simplex joins the new vertices colored ``kappa``
    with the old vertices of the remaining colors.
    """
    if not K.is_closed:
        raise ValueError("perfect_subdivision needs a closed complex")
    if T is not None and not isinstance(T, TSet):
        T = list(T)
        if any(not isinstance(q, (int, np.integer)) for q in T):
            raise ValueError("T must list qubit indices (top simplices)")
    T = _as_tset(K, T)
    if not T.qubits:
        return K
    D = K.D
    qs = K.qubits.simplices
    replaced = {qs[q] for q in T.qubits}
    vertices: list[Vertex] = list(K.vertices)
    tops: list[Simplex] = [s for s in K.top_simplices if s not in replaced]
    next_id = max(v.id for v in K.vertices) + 1
    for sigma in sorted(replaced):
        by_color = {K.color(v): v for v in sigma}
        new = {}
        for c in range(D + 1):
            new[c] = next_id
            vertices.append(Vertex(next_id, c, (0, 0, 0), SUBDIVISION))
            next_id += 1
        for size in range(1, D + 2):
            for kappa in itertools.combinations(range(D + 1), size):
                piece = [new[c] for c in kappa]
                piece += [by_color[c] for c in range(D + 1) if c not in kappa]
                tops.append(tuple(sorted(piece)))
    return ColoredComplex(D, vertices, tops, is_closed=True)


def cell_growth_violations(
    K: ColoredComplex, T: TSet | Iterable[int], K2: ColoredComplex | None = None
) -> list[tuple[Simplex, int, int]]:
    """Cells whose size after subdivision differs from ``|V| + (2^d - 2)|T & V|``.

    Returns ``(simplex, expected, actual)``.
    """
    T = _as_tset(K, T)
    if K2 is None:
        K2 = perfect_subdivision(K, T)
    out = []
    for d in range(1, K.D + 1):
        for c in colex_cells(K, d):
            expected = len(c.qubits) + ((1 << d) - 2) * len(c.qubits & T.qubits)
            actual = len(support(K2, c.simplex))
            if actual != expected:
                out.append((c.simplex, expected, actual))
    return out
