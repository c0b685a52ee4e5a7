"""Properly colored simplicial lattices, their spherical closure and the
dual colex view.

Qubits live on the top simplices of the closed complex that touch at least one
vertex of the open lattice ``M``.  Everything the code module needs (the
``Delta_d`` sets, supports, colex cells) is read off the coface index that is
built once per complex.
"""

from __future__ import annotations

import itertools
import json
from collections import defaultdict
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Sequence

from .report import CheckResult, Report

ORIGINAL = "original"
CLOSURE = "closure"
SUBDIVISION = "subdivision"
ORIGINS = (ORIGINAL, CLOSURE, SUBDIVISION)

COLOR_NAMES = {
    2: ("red", "green", "blue"),
    3: ("red", "green", "blue", "yellow"),
}

Simplex = tuple[int, ...]


@dataclass(frozen=True)
class Vertex:
    id: int
    color: int
    pos: tuple[int, int, int] = (0, 0, 0)
    origin: str = ORIGINAL


class ColoredComplex:
    """A pure simplicial ``D``-complex with vertex colors in ``range(D + 1)``.

    The constructor does not validate; use :func:`validate_complex` (the JSON
    loader does so automatically).  Instances are treated as immutable.
    """

    def __init__(
        self,
        D: int,
        vertices: Iterable[Vertex],
        top_simplices: Iterable[Sequence[int]],
        is_closed: bool = False,
    ) -> None:
        self.D = D
        self.vertices: tuple[Vertex, ...] = tuple(sorted(vertices, key=lambda v: v.id))
        self.top_simplices: tuple[Simplex, ...] = tuple(
            sorted(tuple(sorted(s)) for s in top_simplices)
        )
        self.is_closed = is_closed
        self._vertex = {v.id: v for v in self.vertices}
        cofaces: dict[Simplex, list[int]] = defaultdict(list)
        for t, top in enumerate(self.top_simplices):
            for k in range(1, len(top) + 1):
                for sub in itertools.combinations(top, k):
                    cofaces[sub].append(t)
        self.cofaces: dict[Simplex, tuple[int, ...]] = {
            s: tuple(ts) for s, ts in cofaces.items()
        }

    def __repr__(self) -> str:
        state = "closed" if self.is_closed else "open"
        return (
            f"ColoredComplex(D={self.D}, {len(self.vertices)} vertices, "
            f"{len(self.top_simplices)} top simplices, {state})"
        )

    def vertex(self, vid: int) -> Vertex:
        return self._vertex[vid]

    def color(self, vid: int) -> int:
        return self._vertex[vid].color

    def colors(self, simplex: Iterable[int]) -> frozenset[int]:
        return frozenset(self._vertex[v].color for v in simplex)

    def is_original(self, vid: int) -> bool:
        """Vertices that survive when the closure's extra vertices are punctured."""
        return self._vertex[vid].origin != CLOSURE

    def simplices(self, d: int) -> list[Simplex]:
        return sorted(s for s in self.cofaces if len(s) == d + 1)

    @cached_property
    def _deltas(self) -> dict[int, tuple[Simplex, ...]]:
        out: dict[int, list[Simplex]] = defaultdict(list)
        for s in self.cofaces:
            if any(self.is_original(v) for v in s):
                out[len(s) - 1].append(s)
        return {d: tuple(sorted(out.get(d, ()))) for d in range(self.D + 1)}

    def delta(self, d: int) -> tuple[Simplex, ...]:
        if not 0 <= d <= self.D:
            raise ValueError(f"d must lie in [0, {self.D}], got {d}")
        return self._deltas[d]

    @cached_property
    def qubits(self) -> "QubitIndexing":
        return QubitIndexing(self.delta(self.D))

    @cached_property
    def _top_to_qubit(self) -> dict[int, int]:
        where = {s: t for t, s in enumerate(self.top_simplices)}
        return {where[s]: q for q, s in enumerate(self.qubits.simplices)}


@dataclass(frozen=True)
class QubitIndexing:
    """Qubits are the elements of ``Delta_D`` in lexicographic order."""

    simplices: tuple[Simplex, ...]
    index: dict[Simplex, int] = field(init=False, repr=False, compare=False)

    def __post_init__(self) -> None:
        object.__setattr__(self, "index", {s: i for i, s in enumerate(self.simplices)})

    def __len__(self) -> int:
        return len(self.simplices)


@dataclass(frozen=True)
class ColexCell:
    """A dual cell: ``simplex`` is the dual simplex, ``qubits`` its vertex set ``V_c``."""

    simplex: Simplex
    colors: frozenset[int]
    qubits: frozenset[int]

    @property
    def dim(self) -> int:
        return len(self.colors)


# --------------------------------------------------------------------------
# construction


def build_3d_tetrahedron(n: int) -> ColoredComplex:
    """Tetrahedron of side ``n`` carved from the colored BCC tetrahedral lattice.

    Positions are stored multiplied by 4, so integer lattice points have all
    coordinates divisible by 4 and body centres all coordinates equal to 2 mod 4.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    # x . l_k <= k/4 + (n-1) delta_k0, scaled by 8
    normals = ((1, 1, 1), (1, -1, -1), (-1, 1, -1), (-1, -1, 1))
    bounds = (8 * (n - 1), 2, 4, 6)

    def inside(p: tuple[int, int, int]) -> bool:
        return all(
            m[0] * p[0] + m[1] * p[1] + m[2] * p[2] <= b for m, b in zip(normals, bounds)
        )

    tets: set[tuple[tuple[int, int, int], ...]] = set()
    rng = range(-2, n + 2)
    for x in itertools.product(rng, repeat=3):
        base = tuple(4 * c for c in x)
        for a in range(3):
            for c in range(3):
                if c == a:
                    continue
                b = 3 - a - c
                for s in (1, -1):
                    pts = [base, _shift(base, {a: 4})]
                    pts.append(_shift(base, {a: 2, b: 2 * s, c: 2}))
                    pts.append(_shift(base, {a: 2, b: 2 * s, c: -2}))
                    if all(inside(p) for p in pts):
                        tets.add(tuple(sorted(pts)))
    positions = sorted({p for t in tets for p in t})
    ids = {p: i for i, p in enumerate(positions)}
    vertices = [Vertex(ids[p], bcc_color(p), p, ORIGINAL) for p in positions]
    return ColoredComplex(3, vertices, [[ids[p] for p in t] for t in tets])


def _shift(p: tuple[int, int, int], delta: dict[int, int]) -> tuple[int, int, int]:
    return tuple(p[i] + delta.get(i, 0) for i in range(3))  # type: ignore[return-value]


def bcc_color(pos: Sequence[int]) -> int:
    """Color from ``x . l_0 mod 1`` (0, 1/2, 3/4, 1/4 -> red, green, blue, yellow)."""
    return {0: 0, 4: 1, 6: 2, 2: 3}[sum(pos) % 8]


def triad_parity(K: ColoredComplex, top: Simplex) -> int:
    """+1 if the tetrahedron's triad (a, b, c) is an even permutation of (i, j, k), else -1.

    ``a`` is the axis of the edge joining the two integer vertices and ``c`` the
    axis of the edge joining the two body-centre vertices.
    """
    pos = [K.vertex(v).pos for v in top]
    if len(top) != 4 or any(not K.is_original(v) for v in top):
        raise ValueError(f"{top} is not a tetrahedron of the BCC lattice")
    ints = [p for p in pos if all(c % 4 == 0 for c in p)]
    halves = [p for p in pos if all(c % 4 == 2 for c in p)]
    if len(ints) != 2 or len(halves) != 2:
        raise ValueError(f"{top} lacks BCC position data")
    a = _axis(ints[0], ints[1])
    c = _axis(halves[0], halves[1])
    b = 3 - a - c
    perm = (a, b, c)
    inversions = sum(1 for i in range(3) for j in range(i + 1, 3) if perm[i] > perm[j])
    return 1 if inversions % 2 == 0 else -1


def _axis(p: Sequence[int], q: Sequence[int]) -> int:
    diff = [abs(p[i] - q[i]) for i in range(3)]
    if sorted(diff) != [0, 0, 4]:
        raise ValueError("vertices are not axis neighbours")
    return diff.index(4)


_HEX_NEIGHBOURS = ((1, 0), (-1, 0), (0, 1), (0, -1), (1, -1), (-1, 1))


def build_2d_triangle(n: int) -> ColoredComplex:
    """Triangulated triangle whose closure carries the 6.6.6 triangular color code.

    Sites of a triangular patch of side ``3n`` with ``(i - j) % 3 == 1`` are the
    plaquettes (vertices of ``M``); every other site is a qubit.  A qubit
    adjacent to three plaquettes becomes a triangle of ``M``.
    """
    if n < 1:
        raise ValueError("n must be a positive integer")
    side = 3 * n
    sites = [(i, j) for i in range(side + 1) for j in range(side + 1 - i)]
    plaquettes = sorted(p for p in sites if (p[0] - p[1]) % 3 == 1)
    pset = set(plaquettes)
    ids = {p: k for k, p in enumerate(plaquettes)}
    tris = []
    for q in sites:
        if q in pset:
            continue
        around = [(q[0] + a, q[1] + b) for a, b in _HEX_NEIGHBOURS]
        around = [p for p in around if p in pset]
        if len(around) == 3:
            tris.append([ids[p] for p in around])
    vertices = [Vertex(ids[p], p[1] % 3, (p[0], p[1], 0), ORIGINAL) for p in plaquettes]
    return ColoredComplex(2, vertices, tris)


def boundary_strata(M: ColoredComplex) -> dict[frozenset[int], list[Simplex]]:
    """Map each proper color set ``λ`` to the simplices triangulating the face of ``M`` colored ``λ``.

    A simplex with colors ``λ`` lies on that face when, for every color outside
    ``λ``, it is contained in a boundary facet missing that color.
    """
    D = M.D
    all_colors = frozenset(range(D + 1))
    missing: dict[Simplex, set[int]] = defaultdict(set)
    for facet in M.simplices(D - 1):
        if len(M.cofaces[facet]) != 1:
            continue
        gone = all_colors - M.colors(facet)
        if len(gone) != 1:
            raise ValueError(f"boundary facet {facet} is not properly colored")
        (c,) = gone
        for k in range(1, D + 1):
            for sub in itertools.combinations(facet, k):
                missing[sub].add(c)
    strata: dict[frozenset[int], list[Simplex]] = defaultdict(list)
    for s, cols in missing.items():
        lam = M.colors(s)
        if len(lam) == len(s) and all_colors - lam <= cols:
            strata[lam].append(s)
    return {lam: sorted(v) for lam, v in strata.items()}


def close_to_sphere(M: ColoredComplex) -> ColoredComplex:
    """Close ``M`` to a sphere by adding one new vertex per color.

    Each simplex ``σ`` triangulating a face of ``M`` with colors ``λ`` is coned
    with the new vertices of the colors missing from ``λ``; the simplex on all
    new vertices completes the sphere.
    """
    if M.is_closed:
        raise ValueError("complex is already closed")
    D = M.D
    all_colors = frozenset(range(D + 1))
    strata = boundary_strata(M)
    for c in range(D + 1):
        corners = strata.get(frozenset({c}), [])
        if len(corners) != 1:
            raise ValueError(
                f"M is not shaped as a colored simplex: {len(corners)} corners of color {c}"
            )
    start = max(v.id for v in M.vertices) + 1
    new = {c: start + c for c in range(D + 1)}
    vertices = list(M.vertices) + [Vertex(new[c], c, (0, 0, 0), CLOSURE) for c in range(D + 1)]
    tops = [list(s) for s in M.top_simplices]
    for lam in sorted(strata, key=lambda s: (len(s), sorted(s))):
        extra = [new[c] for c in sorted(all_colors - lam)]
        tops.extend(list(s) + extra for s in strata[lam])
    tops.append(list(new.values()))
    K = ColoredComplex(D, vertices, tops, is_closed=True)
    bad = [f for f in K.simplices(D - 1) if len(K.cofaces[f]) != 2]
    if bad:
        raise ValueError(
            f"boundary strata of M violate the coloring precondition; "
            f"{len(bad)} facets of the closure are not shared by two simplices, e.g. {bad[0]}"
        )
    return K


def build_lattice(family: str, n: int) -> ColoredComplex:
    """Closed lattice of the ``"2d"`` or ``"3d"`` family."""
    if family == "2d":
        return close_to_sphere(build_2d_triangle(n))
    if family == "3d":
        return close_to_sphere(build_3d_tetrahedron(n))
    raise ValueError(f"unknown family {family!r}; expected '2d' or '3d'")


# --------------------------------------------------------------------------
# Delta sets, supports and dual cells


def delta_set(K: ColoredComplex, d: int) -> list[Simplex]:
    """All ``d``-simplices of ``K`` containing at least one vertex of ``M``."""
    return list(K.delta(d))


def support(K: ColoredComplex, simplex: Sequence[int]) -> frozenset[int]:
    """``S_δ``: the qubits (top simplices) containing ``simplex``."""
    s = tuple(sorted(simplex))
    if s not in K.cofaces or not any(K.is_original(v) for v in s):
        raise KeyError(f"{s} is not in any Delta set")
    to_q = K._top_to_qubit
    return frozenset(to_q[t] for t in K.cofaces[s])


def colex_cells(K: ColoredComplex, d: int) -> list[ColexCell]:
    """The ``d``-cells of the punctured colex, i.e. supports of ``Delta_{D-d}``."""
    if not 1 <= d <= K.D:
        raise ValueError(f"cell dimension must lie in [1, {K.D}], got {d}")
    all_colors = frozenset(range(K.D + 1))
    return [
        ColexCell(s, all_colors - K.colors(s), support(K, s)) for s in K.delta(K.D - d)
    ]


# --------------------------------------------------------------------------
# validation


ValidationReport = Report


def validate_complex(K: ColoredComplex) -> ValidationReport:
    """Run the structural checks; failures are collected, never raised."""
    checks: list[CheckResult] = []
    D = K.D

    fails = []
    ids = [v.id for v in K.vertices]
    if len(set(ids)) != len(ids):
        fails.append("duplicate vertex ids")
    for v in K.vertices:
        if not 0 <= v.color <= D:
            fails.append(f"vertex {v.id} has color {v.color} outside [0, {D}]")
        if v.origin not in ORIGINS:
            fails.append(f"vertex {v.id} has unknown origin {v.origin!r}")
    if len(set(K.top_simplices)) != len(K.top_simplices):
        fails.append("duplicate top simplices")
    checks.append(CheckResult("vertices", not fails, fails))

    fails = []
    for s in K.top_simplices:
        if len(s) != D + 1 or any(v not in K._vertex for v in s):
            fails.append(f"{s} is not a {D}-simplex on known vertices")
        elif len(K.colors(s)) != D + 1:
            fails.append(f"{s} is not properly colored")
    checks.append(CheckResult("proper_coloring", not fails, fails))
    if fails:
        return ValidationReport(checks)

    if K.is_closed:
        fails = [
            f"{f} lies in {len(K.cofaces[f])} top simplices"
            for f in K.simplices(D - 1)
            if len(K.cofaces[f]) != 2
        ]
        checks.append(CheckResult("pseudomanifold", not fails, fails))

        fails = []
        if D >= 2:
            fails = [
                f"2-cell dual to {c.simplex} has {len(c.qubits)} vertices"
                for c in colex_cells(K, 2)
                if len(c.qubits) % 2
            ]
        checks.append(CheckResult("two_cell_evenness", not fails, fails))

        fails = []
        for d in range(1, D + 1):
            by_colors: dict[frozenset[int], list[ColexCell]] = defaultdict(list)
            for c in colex_cells(K, d):
                by_colors[c.colors].append(c)
            for cols, cells in by_colors.items():
                seen: dict[int, Simplex] = {}
                for c in cells:
                    for q in c.qubits:
                        if q in seen:
                            fails.append(
                                f"cells dual to {seen[q]} and {c.simplex} share color set "
                                f"{sorted(cols)} and qubit {q}"
                            )
                        seen[q] = c.simplex
        checks.append(CheckResult("color_set_disjointness", not fails, fails))
    return ValidationReport(checks)


# --------------------------------------------------------------------------
# JSON


def to_json(K: ColoredComplex) -> dict:
    return {
        "D": K.D,
        "vertices": [
            {"id": v.id, "color": v.color, "pos": list(v.pos), "origin": v.origin}
            for v in K.vertices
        ],
        "top_simplices": [list(s) for s in K.top_simplices],
    }


def from_json(data: dict | str) -> ColoredComplex:
    """Load a complex written by :func:`to_json`; raises ``ValueError`` if it is invalid.

    A complex is closed exactly when it carries closure vertices.
    """
    if isinstance(data, str):
        data = json.loads(data)
    try:
        vertices = [
            Vertex(int(v["id"]), int(v["color"]), tuple(int(c) for c in v["pos"]), v["origin"])
            for v in data["vertices"]
        ]
        D = int(data["D"])
        tops = [[int(i) for i in s] for s in data["top_simplices"]]
    except (KeyError, TypeError) as exc:
        raise ValueError(f"malformed lattice JSON: {exc}") from exc
    closed = any(v.origin == CLOSURE for v in vertices)
    K = ColoredComplex(D, vertices, tops, is_closed=closed)
    report = validate_complex(K)
    if not report.ok:
        bad = [c for c in report.checks if not c.passed]
        raise ValueError(
            "invalid lattice: " + "; ".join(f"{c.name}: {c.failures[0]}" for c in bad)
        )
    return K
