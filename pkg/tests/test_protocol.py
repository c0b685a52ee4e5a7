from __future__ import annotations

import itertools

import numpy as np
import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from gaugecolor import gf2
from gaugecolor.code import build_code
from gaugecolor.lattice import ColoredComplex, colex_cells
from gaugecolor.pauli import PauliOperator, commutes, member, symplectic_product
from gaugecolor.protocol import (
    decompose_stabilizer,
    dprime_range,
    gauge_fix_plan,
    is_gauge_fixing_pair,
    measurement_schedule,
    minimal_color_cover,
    schedule_violations,
)

from conftest import code, lattice

PAIRS_3D = [((1, 1), (1, 2)), ((1, 1), (2, 1)), ((1, 1), (1, 1)), ((1, 2), (1, 2))]


def test_gauge_fixing_pair_examples(gauge15, rm15):
    assert is_gauge_fixing_pair(gauge15, rm15)
    assert not is_gauge_fixing_pair(rm15, code("3d", 1, 2, 1))
    assert not is_gauge_fixing_pair(code("3d", 1, 2, 1), rm15)
    assert not is_gauge_fixing_pair(rm15, gauge15)
    assert is_gauge_fixing_pair(rm15, rm15)


def test_gauge_fixing_pair_needs_one_lattice(steane, gauge15):
    with pytest.raises(ValueError):
        is_gauge_fixing_pair(steane, gauge15)
    # an equal but separately built lattice is accepted
    K = lattice("3d", 1)
    other = build_code(ColoredComplex(3, K.vertices, K.top_simplices, True), 1, 2)
    assert is_gauge_fixing_pair(gauge15, other)


@pytest.mark.parametrize("n", [1, 2])
@pytest.mark.parametrize("src,dst", PAIRS_3D)
def test_plan_counts_and_pairing(n, src, dst):
    c1, c2 = code("3d", n, *src), code("3d", n, *dst)
    plan = gauge_fix_plan(c1, c2)
    assert len(plan) == c2.S.rank - c1.S.rank
    if len(plan):
        assert np.array_equal(
            gf2.matmul(plan.pairing, plan.pairing_inverse), np.eye(len(plan), dtype=np.uint8)
        )
        for i, m in enumerate(plan.measure_list):
            for j, f in enumerate(plan.fix_basis):
                assert symplectic_product(m, f) == plan.pairing[i, j]


def test_plan_examples(gauge15, rm15):
    plan = gauge_fix_plan(gauge15, rm15)
    assert len(plan.measure_list) == 6
    assert all(m.is_z_type for m in plan.measure_list)
    assert all(member(m, gauge15.G) for m in plan.measure_list)
    assert all(member(f, gauge15.G) for f in plan.fix_basis)
    assert len(gauge_fix_plan(rm15, rm15)) == 0
    with pytest.raises(ValueError):
        gauge_fix_plan(rm15, gauge15)
    data = plan.to_json()
    assert data["source"] == [1, 1] and data["target"] == [1, 2]
    assert len(data["measurements"]) == len(data["corrections"]) == 6


@pytest.mark.parametrize("n", [1, 2])
def test_plan_operators_are_logically_trivial(n):
    c1, c2 = code("3d", n, 1, 1), code("3d", n, 1, 2)
    plan = gauge_fix_plan(c1, c2)
    for op in plan.measure_list + plan.fix_basis:
        assert commutes(op, c1.logical_x) and commutes(op, c1.logical_z)


@settings(max_examples=40, deadline=None)
@given(st.lists(st.sampled_from([1, -1]), min_size=6, max_size=6))
def test_correction_flips_exactly_the_minus_outcomes(outcomes):
    c1, c2 = code("3d", 1, 1, 1), code("3d", 1, 1, 2)
    plan = gauge_fix_plan(c1, c2)
    corr = plan.correction(outcomes)
    assert member(corr, c1.G)
    for m, o in zip(plan.measure_list, outcomes):
        assert commutes(corr, m) == (o == 1)


def test_correction_validates_outcomes(gauge15, rm15):
    plan = gauge_fix_plan(gauge15, rm15)
    with pytest.raises(ValueError):
        plan.correction([1] * 5)
    with pytest.raises(ValueError):
        plan.correction([0] * 6)
    assert plan.correction([1] * 6) == PauliOperator.identity(15)


# --------------------------------------------------------------------------
# decomposition and schedules


def _xor(n, cells):
    acc = np.zeros(n, dtype=np.uint8)
    for c in cells:
        acc[sorted(c.qubits)] ^= 1
    return acc


@pytest.mark.parametrize("n", [1, 2])
def test_three_cells_split_into_two_cells(n):
    K = lattice("3d", n)
    nq = len(K.qubits)
    for cell in colex_cells(K, 3):
        for kappa in itertools.combinations(sorted(cell.colors), 2):
            pieces = decompose_stabilizer(K, cell.simplex, kappa)
            assert sum(len(p.qubits) for p in pieces) == len(cell.qubits)
            full = np.zeros(nq, dtype=np.uint8)
            full[sorted(cell.qubits)] = 1
            assert np.array_equal(_xor(nq, pieces), full)
            assert all(p.colors == frozenset(kappa) for p in pieces)
            if n == 1:
                assert all(len(p.qubits) == 4 for p in pieces)


def test_decompose_full_color_set_is_the_cell_itself():
    K = lattice("3d", 1)
    cell = colex_cells(K, 3)[0]
    (piece,) = decompose_stabilizer(K, cell.simplex, cell.colors)
    assert piece.qubits == cell.qubits
    with pytest.raises(ValueError):
        decompose_stabilizer(K, cell.simplex, K.colors(cell.simplex))


def test_cover_is_minimal_by_brute_force():
    cover = minimal_color_cover(4, 2, 3)
    assert cover == [frozenset({0, 1}), frozenset({2, 3})]
    pairs = [frozenset(p) for p in itertools.combinations(range(4), 2)]
    triples = [frozenset(t) for t in itertools.combinations(range(4), 3)]
    assert not any(all(p <= t for t in triples) for p in pairs)
    assert minimal_color_cover(4, 3, 3) == triples
    with pytest.raises(ValueError):
        minimal_color_cover(4, 3, 2)


@pytest.mark.parametrize("n", [1, 2])
def test_schedule_for_the_subsystem_code(n):
    c = code("3d", n, 1, 1)
    sched = measurement_schedule(c, 2)
    assert len(sched.cover) == 2
    assert schedule_violations(c, sched) == []
    rows = [i for i, (kind, _) in enumerate(c.S.labels) if kind == "Z"]
    assert sorted(sched.reconstruction) == rows
    for r, rnd in enumerate(sched.rounds):
        for i in range(len(rnd)):
            assert member(sched.operator(c.n_qubits, r, i), c.G)


def test_schedule_x_sector_and_direct_measurement():
    c = code("3d", 1, 1, 1)
    x = measurement_schedule(c, 2, sector="X")
    assert schedule_violations(c, x) == []
    assert all(x.operator(15, r, 0).is_x_type for r in range(len(x.rounds)))
    direct = measurement_schedule(c, 3)
    assert len(direct.cover) == 4
    assert all(len(refs) == 1 for refs in direct.reconstruction.values())
    assert dprime_range(c, "Z") == (2, 3)
    with pytest.raises(ValueError):
        measurement_schedule(c, 1)
    with pytest.raises(ValueError):
        dprime_range(c, "Y")


def test_schedule_json_shape(gauge15):
    data = measurement_schedule(gauge15, 2).to_json()
    assert data["cover"] == [[0, 1], [2, 3]]
    assert [len(r) for r in data["rounds"]] == [3, 3]
