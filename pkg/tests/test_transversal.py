from __future__ import annotations

import itertools
from collections import Counter

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaugecolor import gf2
from gaugecolor.lattice import SUBDIVISION, colex_cells, support, triad_parity, validate_complex
from gaugecolor.transversal import (
    DimensionConditionError,
    GatePlan,
    InvalidColexError,
    TSet,
    bad_cell_parity_violations,
    bad_cell_syndrome,
    cell_growth_violations,
    cell_violations,
    check_intersection_condition,
    compute_k,
    explicit_tset_3d,
    gate_plan,
    intersection_by_cells,
    intersection_violations,
    perfect_subdivision,
    solve_tset,
    two_cell_matrix,
    verify_cellsT,
)

from conftest import code, lattice


def brute_intersection_ok(c, T: set[int], n: int) -> bool:
    """Every m <= n X-type gauge generators, intersected as Python sets."""
    gens = [set(np.flatnonzero(g.x).tolist()) for g in c.G if g.is_x_type and g.x.any()]
    for m in range(1, n + 1):
        for combo in itertools.combinations(gens, m):
            inter = set.intersection(*combo)
            val = len(inter) - 2 * len(inter & T)
            if val % 2 ** (n - m + 1):
                return False
    return True


# --------------------------------------------------------------------------
# TSet and k


def test_tset_basics():
    T = TSet(7, {1, 3})
    assert len(T) == 2 and 3 in T and 0 not in T
    assert T.signed_count() == 3
    assert T.signed_count({1, 2}) == 0
    assert T.indicator.tolist() == [0, 1, 0, 1, 0, 0, 0]
    assert T.mask == 0b1010
    assert T.to_json() == [1, 3]
    with pytest.raises(ValueError):
        TSet(3, {3})


@given(st.integers(0, 20), st.integers(0, 41), st.integers(1, 6))
def test_compute_k_matches_search(half, t, n):
    size = 2 * half + 1
    T = TSet(size, set(range(min(t, size))))
    q = T.signed_count()
    expected = next(k for k in range(2**n) if (k * q) % 2**n == 1)
    assert compute_k(T, n) == expected


def test_compute_k_examples():
    assert compute_k(TSet.empty(7), 2) == 3
    assert compute_k(TSet.empty(15), 3) == 7
    for n in range(1, 6):
        assert compute_k(TSet.empty(1), n) == 1
    with pytest.raises(ValueError, match="even"):
        compute_k(TSet.empty(8), 3)


def test_gate_plan_exponents():
    plan = GatePlan(3, 7, TSet(4, {2}))
    assert plan.exponents == [7, 7, -7, 7]
    assert plan.to_json() == {"n": 3, "k": 7, "T": [2], "exponents": [7, 7, -7, 7]}


# --------------------------------------------------------------------------
# intersection condition


def test_intersection_examples(steane, rm15):
    assert check_intersection_condition(steane, None, 2)
    assert check_intersection_condition(rm15, None, 3)
    q = next(iter(np.flatnonzero(steane.G[0].x)))
    assert not check_intersection_condition(steane, {int(q)}, 2)


@settings(max_examples=60, deadline=None)
@given(st.sets(st.integers(0, 6)))
def test_intersection_matches_bruteforce_steane(T):
    c = code("2d", 1, 1, 1)
    assert check_intersection_condition(c, T, 2) == brute_intersection_ok(c, T, 2)


@settings(max_examples=60, deadline=None)
@given(st.sets(st.integers(0, 14)), st.integers(1, 3))
def test_intersection_matches_bruteforce_15(T, n):
    c = code("3d", 1, 1, 2)
    assert check_intersection_condition(c, T, n) == brute_intersection_ok(c, T, n)


def test_intersection_violation_witnesses_are_real():
    c = code("3d", 2, 1, 2)
    bad = intersection_violations(c, None, 3, limit=5)
    assert bad
    for idx, val in bad:
        sets = [set(np.flatnonzero(c.G[i].x).tolist()) for i in idx]
        inter = set.intersection(*sets)
        assert val == len(inter)
        assert val % 2 ** (3 - len(idx) + 1)
    with pytest.raises(ValueError):
        intersection_violations(c, None, 0)


@pytest.mark.parametrize("family,n,d,e", [("2d", 2, 1, 1), ("3d", 1, 1, 2), ("3d", 2, 1, 2)])
def test_intersections_follow_color_structure(family, n, d, e):
    c = code(family, n, d, e)
    xs = [i for i, (kind, _) in enumerate(c.G.labels) if kind == "X"]
    for m in (1, 2, 3):
        for combo in itertools.combinations(xs, m):
            direct = frozenset.intersection(
                *(frozenset(np.flatnonzero(c.G[i].x).tolist()) for i in combo)
            )
            assert intersection_by_cells(c, combo) == direct


def test_intersection_by_cells_rejects_z_generators(steane):
    z = next(i for i, (kind, _) in enumerate(steane.G.labels) if kind == "Z")
    with pytest.raises(ValueError):
        intersection_by_cells(steane, [z])


# --------------------------------------------------------------------------
# bad cells and the solver


def test_bad_cells_absent_at_n1():
    for family in ("2d", "3d"):
        K = lattice(family, 1)
        assert not bad_cell_syndrome(K).any()
        assert len(solve_tset(K)) == 0
    assert len(colex_cells(lattice("3d", 1), 2)) == 18


@pytest.mark.parametrize("n,bad,size", [(2, 3, 1), (3, 9, 3)])
def test_2d_solver_counts(n, bad, size):
    K = lattice("2d", n)
    assert int(bad_cell_syndrome(K).sum()) == bad
    assert len(solve_tset(K)) == size


@pytest.mark.parametrize("family,n", [("2d", 2), ("2d", 3), ("3d", 2), ("3d", 3)])
def test_solver_commutation_pattern_is_the_syndrome(family, n):
    K = lattice(family, n)
    T = solve_tset(K)
    flips = gf2.matmul(two_cell_matrix(K), T.indicator.reshape(-1, 1)).ravel()
    assert np.array_equal(flips, bad_cell_syndrome(K))
    assert solve_tset(K) == T


@pytest.mark.parametrize("family,n", [("2d", 1), ("2d", 2), ("2d", 3), ("3d", 1), ("3d", 2), ("3d", 3)])
def test_solver_t_passes_both_conditions(family, n):
    K = lattice(family, n)
    T = solve_tset(K)
    assert verify_cellsT(K, T)
    for d in range(1, K.D):
        for e in range(1, K.D - d + 1):
            c = code(family, n, d, e)
            for gate in range(1, K.D // c.ebar + 1):
                assert check_intersection_condition(c, T, gate)


@pytest.mark.parametrize("family,n", [("3d", 1), ("3d", 2), ("3d", 3)])
def test_bad_cell_parity(family, n):
    assert bad_cell_parity_violations(lattice(family, n)) == []
    assert bad_cell_parity_violations(lattice("2d", 2)) == []


@pytest.mark.parametrize("n", [2, 3])
def test_empty_t_fails_once_bad_cells_exist(n):
    K = lattice("3d", n)
    assert not verify_cellsT(K, None)
    assert all(d >= 2 for d, _, _ in cell_violations(K, None))


def test_cell_condition_examples():
    assert verify_cellsT(lattice("2d", 1))
    assert verify_cellsT(lattice("3d", 1))
    K = lattice("3d", 1)
    cell = next(c for c in colex_cells(K, 2) if len(c.qubits) == 4)
    assert not verify_cellsT(K, {min(cell.qubits)})


# --------------------------------------------------------------------------
# explicit prescription


@pytest.mark.parametrize("n", [1, 2, 3])
def test_explicit_t_passes_both_conditions(n):
    K = lattice("3d", n)
    T = explicit_tset_3d(K)
    assert verify_cellsT(K, T)
    assert check_intersection_condition(code("3d", n, 1, 2), T, 3)


def test_explicit_t3_counts_even_triads():
    K = lattice("3d", 1)
    T = explicit_tset_3d(K)
    qs = K.qubits.simplices
    bulk = [q for q, s in enumerate(qs) if all(K.is_original(v) for v in s)]
    even = [q for q in bulk if triad_parity(K, qs[q]) == 1]
    assert set(even) <= T.qubits
    assert not (set(bulk) - set(even)) & T.qubits
    # |Q|_T = 1 at n=1, so k = 1 for every gate level
    assert T.signed_count() == 1 and compute_k(T, 3) == 1


def test_explicit_t_needs_3d():
    with pytest.raises(ValueError):
        explicit_tset_3d(lattice("2d", 1))


# --------------------------------------------------------------------------
# gate plans


def test_gate_plan_examples(steane, rm15, gauge15):
    p = gate_plan(steane, 2)
    assert (p.k, len(p.T)) == (3, 0)
    p = gate_plan(rm15, 3)
    assert (p.k, len(p.T)) == (7, 0)
    with pytest.raises(DimensionConditionError, match="ebar"):
        gate_plan(gauge15, 3)
    with pytest.raises(ValueError):
        gate_plan(rm15, 0)
    with pytest.raises(ValueError, match="method"):
        gate_plan(rm15, 3, method="guess")


def test_gate_plan_rejects_bad_t():
    c = code("3d", 2, 1, 2)
    with pytest.raises(InvalidColexError):
        gate_plan(c, 3, T=set())
    p = gate_plan(c, 3, method="explicit")
    assert (p.k * p.T.signed_count() - 1) % 8 == 0


# --------------------------------------------------------------------------
# subdivision


def test_subdividing_one_triangle():
    K = lattice("2d", 1)
    K2 = perfect_subdivision(K, {0})
    assert len(K2.top_simplices) == len(K.top_simplices) - 1 + 7
    new = [v for v in K2.vertices if v.origin == SUBDIVISION]
    assert sorted(v.color for v in new) == [0, 1, 2]
    assert validate_complex(K2).ok


def test_subdivision_with_empty_t_is_identity():
    K = lattice("3d", 1)
    assert perfect_subdivision(K, None) is K
    assert perfect_subdivision(K, []) is K


def test_subdivision_rejects_non_qubit_entries():
    K = lattice("2d", 1)
    with pytest.raises(ValueError):
        perfect_subdivision(K, [(0, 1, 2)])
    with pytest.raises(ValueError):
        perfect_subdivision(K, [len(K.qubits)])


@pytest.mark.parametrize("family,n", [("2d", 2), ("2d", 3), ("3d", 2)])
def test_subdivision_is_perfect(family, n):
    K = lattice(family, n)
    T = solve_tset(K)
    K2 = perfect_subdivision(K, T)
    assert validate_complex(K2).ok
    assert cell_growth_violations(K, T, K2) == []
    assert verify_cellsT(K2)
    assert len(K2.qubits) == len(K.qubits) + (2 ** (K.D + 1) - 2) * len(T)


@settings(max_examples=15, deadline=None)
@given(st.sets(st.integers(0, 18), max_size=5))
def test_growth_law_for_any_t(T):
    K = lattice("2d", 2)
    assert cell_growth_violations(K, T) == []


def test_subdivision_preserves_cell_colors():
    K = lattice("2d", 2)
    T = solve_tset(K)
    K2 = perfect_subdivision(K, T)
    before = Counter(c.colors for c in colex_cells(K, 2))
    after = Counter(c.colors for c in colex_cells(K2, 2) if c.simplex in K.cofaces)
    assert before == after
    for c in colex_cells(K, 1):
        assert len(support(K2, c.simplex)) % 2 == 0
