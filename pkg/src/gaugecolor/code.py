"""The groups C(d, e) and the (d, e) gauge color codes built from them."""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import cached_property
from pathlib import Path

import numpy as np

from . import gf2
from .lattice import ColoredComplex, support
from .pauli import (
    GeneratorSet,
    PauliOperator,
    center,
    centralizer,
    commutes,
    member,
    product_group,
    read_check_matrix,
    same_group,
    subgroup,
    write_check_matrix,
)
from .report import Report


class StructureError(RuntimeError):
    """A structural identity failed on a constructed code (signals a lattice bug)."""


def build_group_C(K: ColoredComplex, d: int, e: int) -> GeneratorSet:
    """``X_{S_δ}`` for ``δ ∈ Δ_{d-1}`` and ``Z_{S_δ}`` for ``δ ∈ Δ_{e-1}``, in Δ-set order.

    Generators are kept even when linearly dependent.
    """
    D = K.D
    if not (1 <= d < D and 1 <= e < D):
        raise ValueError(f"C(d, e) needs 1 <= d, e < {D}; got d={d}, e={e}")
    n = len(K.qubits)
    gens, labels = [], []
    for s in K.delta(d - 1):
        gens.append(PauliOperator.X(n, sorted(support(K, s))))
        labels.append(("X", s))
    for s in K.delta(e - 1):
        gens.append(PauliOperator.Z(n, sorted(support(K, s))))
        labels.append(("Z", s))
    return GeneratorSet(n, tuple(gens), tuple(labels))


@dataclass(frozen=True, eq=False)
class GaugeColorCode:
    lattice: ColoredComplex
    d: int
    e: int
    S: GeneratorSet
    G: GeneratorSet
    logical_x: PauliOperator
    logical_z: PauliOperator

    @property
    def D(self) -> int:
        return self.lattice.D

    @property
    def n_qubits(self) -> int:
        return self.S.n

    @property
    def dbar(self) -> int:
        return self.D - self.d

    @property
    def ebar(self) -> int:
        return self.D - self.e

    @property
    def is_conventional(self) -> bool:
        return self.e == self.dbar

    @property
    def gauge_qubits(self) -> int:
        return (self.G.rank - self.S.rank) // 2

    @property
    def logical_qubits(self) -> int:
        return self.n_qubits - self.S.rank - self.gauge_qubits

    @property
    def logical_y(self) -> PauliOperator:
        """``i X_Q Z_Q``, the Hermitian third logical Pauli."""
        xz = self.logical_x * self.logical_z
        return PauliOperator(xz.x, xz.z, xz.phase + 1)

    @cached_property
    def logicals(self) -> GeneratorSet:
        return GeneratorSet(self.n_qubits, (self.logical_x, self.logical_z))

    def __repr__(self) -> str:
        return (
            f"GaugeColorCode(D={self.D}, d={self.d}, e={self.e}, n={self.n_qubits}, "
            f"rank S={self.S.rank}, rank G={self.G.rank})"
        )


def build_code(K: ColoredComplex, d: int, e: int, check: bool = True) -> GaugeColorCode:
    """The (d, e) gauge color code: stabilizer ``C(d, e)``, gauge group ``C(D-e, D-d)``."""
    D = K.D
    if d < 1 or e < 1 or d + e > D:
        raise ValueError(f"(d, e) must satisfy d, e >= 1 and d + e <= D = {D}; got ({d}, {e})")
    if not K.is_closed:
        raise ValueError("codes are built on closed complexes; call close_to_sphere first")
    n = len(K.qubits)
    code = GaugeColorCode(
        lattice=K,
        d=d,
        e=e,
        S=build_group_C(K, d, e),
        G=build_group_C(K, D - e, D - d),
        logical_x=PauliOperator.X(n, range(n)),
        logical_z=PauliOperator.Z(n, range(n)),
    )
    if check:
        problems = []
        if not code.S.is_abelian():
            problems.append("S is not abelian")
        if not same_group(center(code.G), code.S):
            problems.append("S is not the centre of G")
        for op in _nontrivial_logicals(code):
            if member(op, code.G):
                problems.append(f"logical {op.label()[:12]}... lies in G")
        if problems:
            raise StructureError("; ".join(problems))
    return code


def _nontrivial_logicals(code: GaugeColorCode) -> list[PauliOperator]:
    return [code.logical_x, code.logical_z, code.logical_x * code.logical_z]


def valid_parameters(D: int) -> list[tuple[int, int]]:
    return [(d, e) for d in range(1, D) for e in range(1, D) if d + e <= D]


def verify_structure(code: GaugeColorCode) -> Report:
    """Check every identity the construction promises; failures carry a witness."""
    K = code.lattice
    D = code.D
    n = code.n_qubits
    report = Report()
    L = code.logicals

    fails = []
    if not code.S.is_abelian():
        for a, b in itertools.combinations(range(len(code.S)), 2):
            if not commutes(code.S[a], code.S[b]):
                fails.append(f"stabilizer generators {a} and {b} anticommute")
                break
    report.add("stabilizer_abelian", fails)

    fails = []
    cen = center(code.G)
    if not same_group(cen, code.S):
        fails.append(f"rank(center(G)) = {cen.rank}, rank(S) = {code.S.rank}")
    report.add("stabilizer_is_center", fails)

    groups = {(a, b): build_group_C(K, a, b) for a in range(1, D) for b in range(1, D)}
    fails = []
    for (p1, g1), (p2, g2) in itertools.permutations(groups.items(), 2):
        expected = p1[0] <= p2[0] and p1[1] <= p2[1]
        if subgroup(g1, g2) != expected:
            verb = "is not" if expected else "is"
            fails.append(f"C{p1} {verb} contained in C{p2}")
    report.add("partial_order", fails)

    fails = []
    pairs = [(code.S, code.G, "S"), (code.G, code.S, "G")]
    pairs += [(g, groups[(D - b, D - a)], f"C({a},{b})") for (a, b), g in groups.items()]
    for grp, dual, name in pairs:
        lhs = centralizer(grp)
        rhs = product_group(L, dual)
        if not same_group(lhs, rhs):
            fails.append(
                f"centralizer({name}) has rank {lhs.rank}, <X_Q, Z_Q>.dual has rank {rhs.rank}"
            )
    report.add("centralizer_formula", fails)

    report.add("odd_qubit_count", [] if n % 2 else [f"|Q| = {n} is even"])

    fails = []
    for name, grp in [("S", code.S), ("G", code.G)] + [(f"C{p}", g) for p, g in groups.items()]:
        for op in _nontrivial_logicals(code):
            if member(op, grp):
                fails.append(f"{op.label()[:3]}... (logical) lies in {name}")
    report.add("trivial_logical_intersection", fails)

    fails = []
    for i, g in enumerate(code.G):
        for op, nm in ((code.logical_x, "X_Q"), (code.logical_z, "Z_Q")):
            if not commutes(op, g):
                fails.append(f"{nm} anticommutes with gauge generator {i}")
    report.add("bare_logicals", fails)

    k = code.logical_qubits
    report.add("single_logical_qubit", [] if k == 1 else [f"{k} logical qubits from ranks"])
    return report


def self_dual(code: GaugeColorCode) -> bool:
    """X-part and Z-part of the gauge group span the same supports."""
    n = code.n_qubits
    xs = code.G.x_part().matrix[:, :n]
    zs = code.G.z_part().matrix[:, n:]
    return gf2.rowspace_equal(xs, zs)


class DistanceSearchError(ValueError):
    pass


def code_distance_bruteforce(
    code: GaugeColorCode, kind: str = "X", weight_cap: int | None = None, max_candidates: int = 5_000_000
) -> int:
    """Minimum weight of a dressed logical of one Pauli type, by exhaustive search.

    An ``X``-type dressed logical commutes with the Z part of ``S`` and lies
    outside the X part of ``G``.
    """
    if kind not in ("X", "Z"):
        raise ValueError("kind must be 'X' or 'Z'")
    n = code.n_qubits
    if weight_cap is None:
        weight_cap = n if n <= 31 else 7
    if kind == "X":
        checks = code.S.z_part().matrix[:, n:]
        gauge = code.G.x_part().matrix[:, :n]
    else:
        checks = code.S.x_part().matrix[:, :n]
        gauge = code.G.z_part().matrix[:, n:]
    col_syndrome = [_to_int(checks[:, q]) for q in range(n)]
    basis, pivots = gf2.rref(gauge) if gauge.shape[0] else (gauge, [])
    reducers = [(1 << int(p), _to_int(basis[i])) for i, p in enumerate(pivots)]

    def in_gauge(mask: int) -> bool:
        for bit, row in reducers:
            if mask & bit:
                mask ^= row
        return mask == 0

    examined = 0
    for w in range(1, weight_cap + 1):
        examined += math.comb(n, w)
        if examined > max_candidates:
            raise DistanceSearchError(
                f"search up to weight {w} on {n} qubits exceeds {max_candidates} candidates"
            )
        for combo in itertools.combinations(range(n), w):
            syn = 0
            for q in combo:
                syn ^= col_syndrome[q]
            if syn:
                continue
            mask = 0
            for q in combo:
                mask |= 1 << q
            if not in_gauge(mask):
                return w
    raise DistanceSearchError(f"no {kind}-type logical of weight <= {weight_cap}")


def _to_int(bits: np.ndarray) -> int:
    out = 0
    for i in np.flatnonzero(bits):
        out |= 1 << int(i)
    return out


def export_check_matrices(code: GaugeColorCode, destination: str | Path) -> list[Path]:
    """Write ``stabilizer.txt``, ``gauge.txt`` and ``logicals.txt`` into a directory."""
    dest = Path(destination)
    dest.mkdir(parents=True, exist_ok=True)
    out = []
    for name, grp in (("stabilizer", code.S), ("gauge", code.G), ("logicals", code.logicals)):
        path = dest / f"{name}.txt"
        path.write_text(write_check_matrix(grp))
        out.append(path)
    return out


def load_check_matrices(source: str | Path) -> dict[str, GeneratorSet]:
    src = Path(source)
    return {
        name: read_check_matrix(src / f"{name}.txt")
        for name in ("stabilizer", "gauge", "logicals")
    }
