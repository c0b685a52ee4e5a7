"""Gauge fixing between nested codes and low-weight schedules for stabilizer extraction."""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from . import gf2
from .code import GaugeColorCode, StructureError
from .lattice import ColexCell, ColoredComplex, Simplex, support
from .pauli import (
    GeneratorSet,
    PauliOperator,
    canonical_basis,
    centralizer,
    same_group,
    subgroup,
    symplectic_gram,
)


class InconsistentPlanError(RuntimeError):
    pass


def _same_lattice(code1: GaugeColorCode, code2: GaugeColorCode) -> None:
    a, b = code1.lattice, code2.lattice
    if a is b:
        return
    if a.D != b.D or a.top_simplices != b.top_simplices or a.vertices != b.vertices:
        raise ValueError("codes live on different lattices")


def _intersection(a: GeneratorSet, b: GeneratorSet) -> GeneratorSet:
    rows = gf2.rowspace_intersection(a.basis, b.basis)
    return GeneratorSet.from_matrix(rows) if rows.shape[0] else GeneratorSet(a.n, ())


def is_gauge_fixing_pair(code1: GaugeColorCode, code2: GaugeColorCode) -> bool:
    """Whether ``code2`` is a gauge-fixed version of ``code1``.

    The group conditions ``S1 ⊆ S2 ⊆ G1`` and ``G2 = C(S2) ∩ G1`` are evaluated
    directly and must agree with ``d1 <= d2 and e1 <= e2``.
    """
    _same_lattice(code1, code2)
    algebraic = (
        subgroup(code1.S, code2.S)
        and subgroup(code2.S, code1.G)
        and same_group(code2.G, _intersection(centralizer(code2.S), code1.G))
    )
    by_params = code1.d <= code2.d and code1.e <= code2.e
    if algebraic != by_params:
        raise StructureError(
            f"gauge-fixing test on ({code1.d},{code1.e}) -> ({code2.d},{code2.e}) gives "
            f"{algebraic} algebraically but {by_params} from the parameters"
        )
    return algebraic


def _outcome_bits(outcomes: Sequence[int]) -> np.ndarray:
    vals = [int(v) for v in outcomes]
    if any(v not in (1, -1) for v in vals):
        raise ValueError("outcomes must be +1 or -1")
    return np.array([v == -1 for v in vals], dtype=np.uint8)


@dataclass(frozen=True, eq=False)
class GaugeFixPlan:
    """Measure ``measure_list``; undo ``-1`` outcomes with products of ``fix_basis``.

    ``measure_rows`` index ``target.S`` and ``fix_rows`` index ``source.G``.
    ``pairing[i, j]`` is the symplectic product of measurement ``i`` and fix ``j``.
    """

    source: GaugeColorCode
    target: GaugeColorCode
    measure_rows: tuple[int, ...]
    fix_rows: tuple[int, ...]
    pairing: np.ndarray
    pairing_inverse: np.ndarray = field(repr=False)

    @property
    def measure_list(self) -> list[PauliOperator]:
        return [self.target.S[i] for i in self.measure_rows]

    @property
    def fix_basis(self) -> list[PauliOperator]:
        return [self.source.G[i] for i in self.fix_rows]

    def __len__(self) -> int:
        return len(self.measure_rows)

    def correction(self, outcomes: Sequence[int]) -> PauliOperator:
        """Gauge operator flipping every ``-1`` outcome back to ``+1``."""
        bits = _outcome_bits(outcomes)
        if bits.size != len(self):
            raise ValueError(f"expected {len(self)} outcomes, got {bits.size}")
        out = PauliOperator.identity(self.source.n_qubits)
        if not len(self):
            return out
        y = gf2.matmul(self.pairing_inverse, bits.reshape(-1, 1)).ravel()
        for j in np.flatnonzero(y):
            out = out * self.fix_basis[j]
        return out

    def to_json(self) -> dict:
        return {
            "source": [self.source.d, self.source.e],
            "target": [self.target.d, self.target.e],
            "measurements": list(self.measure_rows),
            "corrections": list(self.fix_rows),
            "pairing_matrix": self.pairing.astype(int).tolist(),
        }


def gauge_fix_plan(code1: GaugeColorCode, code2: GaugeColorCode) -> GaugeFixPlan:
    """Plan the switch from ``code1`` to its gauge-fixed version ``code2``.

    Measurements are lattice generators of ``S2`` that are independent modulo
    ``S1``; fixes are lattice generators of ``G1`` chosen greedily so that the
    pairing matrix is invertible.
    """
    if not is_gauge_fixing_pair(code1, code2):
        raise ValueError(
            f"({code2.d},{code2.e}) is not a gauge-fixed version of ({code1.d},{code1.e})"
        )
    n = code1.n_qubits
    span = code1.S.basis
    measure: list[int] = []
    for i, g in enumerate(code2.S):
        if not gf2.in_rowspace(g.vector, span):
            measure.append(i)
            span = np.vstack([span, g.vector])
    expected = code2.S.rank - code1.S.rank
    basis = canonical_basis(code1.S, code2.S, code1.G)
    if len(measure) != expected or basis.s - basis.r != expected:
        raise InconsistentPlanError(
            f"{len(measure)} measurements, rank difference {expected}, "
            f"canonical basis gives {basis.s - basis.r}"
        )
    m_rows = np.array([code2.S[i].vector for i in measure], dtype=np.uint8).reshape(-1, 2 * n)

    fixes: list[int] = []
    cols = np.zeros((0, len(measure)), dtype=np.uint8)
    if measure:
        gram = symplectic_gram(m_rows, code1.G.matrix)
        for j in range(len(code1.G)):
            if len(fixes) == len(measure):
                break
            col = gram[:, j]
            if col.any() and not gf2.in_rowspace(col, cols):
                fixes.append(j)
                cols = np.vstack([cols, col])
        if len(fixes) != len(measure):
            raise InconsistentPlanError("gauge generators cannot flip every measured operator")
    pairing = cols.T.copy()
    try:
        inv = gf2.inverse(pairing) if measure else pairing
    except ValueError:
        raise InconsistentPlanError("pairing matrix is singular") from None
    return GaugeFixPlan(code1, code2, tuple(measure), tuple(fixes), pairing, inv)


# --------------------------------------------------------------------------
# stabilizers from small gauge cells


def decompose_stabilizer(K: ColoredComplex, simplex: Simplex, kappa) -> list[ColexCell]:
    """The ``kappa``-colored cells inside the cell dual to ``simplex``.

    Their supports partition the stabilizer support, so the product of their
    operators is the stabilizer itself.
    """
    s = tuple(sorted(simplex))
    kappa = frozenset(kappa)
    all_colors = frozenset(range(K.D + 1))
    cell_colors = all_colors - K.colors(s)
    if not kappa or not kappa <= cell_colors:
        raise ValueError(f"color set {sorted(kappa)} is not inside the cell colors {sorted(cell_colors)}")
    want = all_colors - kappa
    size = len(want)
    pieces = set()
    for t in K.cofaces[s]:
        top = K.top_simplices[t]
        piece = tuple(sorted(v for v in top if K.color(v) in want))
        if len(piece) == size:
            pieces.add(piece)
    return [ColexCell(p, kappa, support(K, p)) for p in sorted(pieces)]


def minimal_color_cover(n_colors: int, piece: int, target: int) -> list[frozenset[int]]:
    """Fewest ``piece``-sized color sets such that every ``target``-sized set contains one.

    Exhaustive over families in increasing size, first hit in lexicographic order.
    """
    if not 1 <= piece <= target <= n_colors:
        raise ValueError("need 1 <= piece <= target <= number of colors")
    pieces = list(itertools.combinations(range(n_colors), piece))
    targets = [frozenset(t) for t in itertools.combinations(range(n_colors), target)]
    for size in range(1, len(pieces) + 1):
        for family in itertools.combinations(pieces, size):
            fam = [frozenset(f) for f in family]
            if all(any(f <= t for f in fam) for t in targets):
                return fam
    raise AssertionError("the full family always covers")


@dataclass(frozen=True)
class MeasurementSchedule:
    """Rounds of disjoint gauge measurements that reveal one stabilizer sector.

    ``reconstruction`` maps a row of ``code.S`` to ``(round, position)`` pairs
    whose measured operators multiply to that generator.
    """

    sector: str
    dprime: int
    cover: tuple[frozenset[int], ...]
    rounds: tuple[tuple[ColexCell, ...], ...]
    reconstruction: dict[int, tuple[tuple[int, int], ...]]

    def operator(self, n_qubits: int, r: int, i: int) -> PauliOperator:
        cell = self.rounds[r][i]
        make = PauliOperator.X if self.sector == "X" else PauliOperator.Z
        return make(n_qubits, sorted(cell.qubits))

    def to_json(self) -> dict:
        return {
            "sector": self.sector,
            "dprime": self.dprime,
            "cover": [sorted(k) for k in self.cover],
            "rounds": [[list(c.simplex) for c in rnd] for rnd in self.rounds],
            "reconstruction": {str(k): [list(p) for p in v] for k, v in self.reconstruction.items()},
        }


def dprime_range(code: GaugeColorCode, sector: str) -> tuple[int, int]:
    """Allowed gauge-cell dimensions for measuring the given stabilizer sector."""
    if sector == "Z":
        return code.d + 1, code.ebar + 1
    if sector == "X":
        return code.e + 1, code.dbar + 1
    raise ValueError("sector must be 'X' or 'Z'")


def measurement_schedule(code: GaugeColorCode, dprime: int, sector: str = "Z") -> MeasurementSchedule:
    """Measure ``dprime``-cell gauge operators instead of the large stabilizer cells."""
    lo, hi = dprime_range(code, sector)
    if not lo <= dprime <= hi:
        raise ValueError(f"d' must lie in [{lo}, {hi}] for the {sector} sector; got {dprime}")
    K = code.lattice
    D = K.D
    all_colors = frozenset(range(D + 1))
    cover = minimal_color_cover(D + 1, dprime, hi)
    by_colors: dict[frozenset[int], list[Simplex]] = {}
    for s in K.delta(D - dprime):
        by_colors.setdefault(all_colors - K.colors(s), []).append(s)
    rounds = []
    where: dict[Simplex, tuple[int, int]] = {}
    for r, kappa in enumerate(cover):
        cells = tuple(ColexCell(s, kappa, support(K, s)) for s in by_colors.get(kappa, []))
        for i, c in enumerate(cells):
            where[c.simplex] = (r, i)
        rounds.append(cells)
    reconstruction = {}
    for row, (kind, simplex) in enumerate(code.S.labels):
        if kind != sector:
            continue
        colors = all_colors - K.colors(simplex)
        r = next(i for i, k in enumerate(cover) if k <= colors)
        pieces = decompose_stabilizer(K, simplex, cover[r])
        reconstruction[row] = tuple(where[p.simplex] for p in pieces)
    return MeasurementSchedule(sector, dprime, tuple(cover), tuple(rounds), reconstruction)


def schedule_violations(code: GaugeColorCode, schedule: MeasurementSchedule) -> list[str]:
    """Overlaps inside a round and stabilizers whose reconstruction is wrong."""
    out = []
    for r, rnd in enumerate(schedule.rounds):
        seen = 0
        for c in rnd:
            mask = sum(1 << q for q in c.qubits)
            if seen & mask:
                out.append(f"round {r}: cell {c.simplex} overlaps an earlier cell")
            seen |= mask
    n = code.n_qubits
    for row, refs in schedule.reconstruction.items():
        acc = np.zeros(n, dtype=np.uint8)
        for r, i in refs:
            acc[sorted(schedule.rounds[r][i].qubits)] ^= 1
        g = code.S[row]
        target = g.x if schedule.sector == "X" else g.z
        if not np.array_equal(acc, target):
            out.append(f"stabilizer row {row} is not the product of its pieces")
    return out
