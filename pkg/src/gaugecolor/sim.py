"""Dense statevector checks for small codes, plus symbolic Clifford transversality."""

from __future__ import annotations

from dataclasses import dataclass, field

import numpy as np

from . import gf2
from .code import GaugeColorCode, build_code
from .lattice import build_lattice
from .pauli import GeneratorSet, PauliOperator, member
from .protocol import GaugeFixPlan, gauge_fix_plan
from .report import Report
from .transversal import GatePlan, gate_plan

MAX_QUBITS = 20
NORM_TOL = 1e-12


def _rng(rng: np.random.Generator | int | None) -> tuple[np.random.Generator, int | None]:
    if isinstance(rng, np.random.Generator):
        return rng, None
    return np.random.default_rng(rng), rng


@dataclass(frozen=True, eq=False)
class StateVector:
    """Amplitudes indexed by basis strings; qubit ``q`` is bit ``q`` of the index."""

    n_qubits: int
    amplitudes: np.ndarray

    def __post_init__(self) -> None:
        amp = np.asarray(self.amplitudes, dtype=np.complex128)
        if amp.shape != (1 << self.n_qubits,):
            raise ValueError(f"expected {1 << self.n_qubits} amplitudes, got {amp.shape}")
        object.__setattr__(self, "amplitudes", amp)
        norm = np.linalg.norm(amp)
        if abs(norm - 1) > NORM_TOL:
            raise ValueError(f"state norm {norm!r} differs from 1")

    @classmethod
    def zero(cls, n_qubits: int) -> "StateVector":
        amp = np.zeros(1 << n_qubits, dtype=np.complex128)
        amp[0] = 1
        return cls(n_qubits, amp)

    @classmethod
    def normalized(cls, n_qubits: int, amplitudes: np.ndarray) -> "StateVector":
        amp = np.asarray(amplitudes, dtype=np.complex128)
        norm = np.linalg.norm(amp)
        if norm == 0:
            raise ValueError("cannot normalize the zero vector")
        return cls(n_qubits, amp / norm)

    def inner(self, other: "StateVector") -> complex:
        """``<self|other>``."""
        return complex(np.vdot(self.amplitudes, other.amplitudes))

    def fidelity(self, other: "StateVector") -> float:
        return abs(self.inner(other)) ** 2


def _masks(op: PauliOperator) -> tuple[int, int]:
    xm = sum(1 << int(q) for q in np.flatnonzero(op.x))
    zm = sum(1 << int(q) for q in np.flatnonzero(op.z))
    return xm, zm


def _pauli_action(amp: np.ndarray, op: PauliOperator) -> np.ndarray:
    xm, zm = _masks(op)
    idx = np.arange(amp.size, dtype=np.int64)
    sign = 1 - 2 * (np.bitwise_count(idx & zm) & 1).astype(np.int8)
    out = np.empty_like(amp)
    out[idx ^ xm] = (1j ** (op.phase % 4)) * sign * amp
    return out


def apply_pauli(state: StateVector, op: PauliOperator) -> StateVector:
    if op.n != state.n_qubits:
        raise ValueError("operator and state sizes differ")
    return StateVector(state.n_qubits, _pauli_action(state.amplitudes, op))


def expectation(state: StateVector, op: PauliOperator) -> complex:
    """``<psi|P|psi>``; real for Hermitian ``P``."""
    return complex(np.vdot(state.amplitudes, _pauli_action(state.amplitudes, op)))


def _check_size(code: GaugeColorCode) -> None:
    if code.n_qubits > MAX_QUBITS:
        raise ValueError(f"{code.n_qubits} qubits exceed the simulation limit of {MAX_QUBITS}")


def _x_gauge_strings(code: GaugeColorCode) -> np.ndarray:
    """Every basis string ``X_g |0...0>`` for ``g`` in the X part of ``G``."""
    n = code.n_qubits
    xs = code.G.x_part()
    strings = np.zeros(1, dtype=np.int64)
    if len(xs):
        for row in gf2.row_basis(xs.matrix[:, :n]):
            m = sum(1 << int(q) for q in np.flatnonzero(row))
            strings = np.concatenate([strings, strings ^ m])
    return strings


def encode_logical(code: GaugeColorCode, a: int) -> StateVector:
    """Equal superposition of ``X_g X_Q^a |0...0>`` over the X part of ``G``."""
    if a not in (0, 1):
        raise ValueError("logical bit must be 0 or 1")
    _check_size(code)
    n = code.n_qubits
    strings = _x_gauge_strings(code)
    if a:
        strings = strings ^ ((1 << n) - 1)
    amp = np.zeros(1 << n, dtype=np.complex128)
    amp[strings] = 1
    return StateVector.normalized(n, amp)


def encode_state(code: GaugeColorCode, alpha: complex, beta: complex) -> StateVector:
    """``alpha |0> + beta |1>`` on the encoded qubit (normalized)."""
    amp = alpha * encode_logical(code, 0).amplitudes + beta * encode_logical(code, 1).amplitudes
    return StateVector.normalized(code.n_qubits, amp)


def apply_gate_plan(state: StateVector, plan: GatePlan) -> StateVector:
    """Diagonal ``R_n^{e_q}`` on each qubit ``q``."""
    exps = plan.exponents
    if len(exps) != state.n_qubits:
        raise ValueError("plan and state sizes differ")
    idx = np.arange(1 << state.n_qubits, dtype=np.int64)
    total = np.zeros(idx.size, dtype=np.int64)
    for q, e in enumerate(exps):
        if e:
            total += e * ((idx >> q) & 1)
    modulus = 1 << plan.n
    phase = np.exp(2j * np.pi * (total % modulus) / modulus)
    return StateVector(state.n_qubits, state.amplitudes * phase)


def basis_phase(plan: GatePlan, support) -> complex:
    """Phase the plan puts on the basis string with the given support."""
    k = sum(plan.exponents[q] for q in support)
    return complex(np.exp(2j * np.pi * (k % (1 << plan.n)) / (1 << plan.n)))


@dataclass
class MeasurementRecord:
    seed: int | None
    entries: list[tuple[object, int]] = field(default_factory=list)

    @property
    def outcomes(self) -> list[int]:
        return [o for _, o in self.entries]

    def to_json(self) -> dict:
        return {"seed": self.seed, "entries": [[str(k), o] for k, o in self.entries]}


def measure_pauli(
    state: StateVector, op: PauliOperator, rng: np.random.Generator
) -> tuple[int, StateVector]:
    """Projective measurement of a Hermitian Pauli; returns ``(+-1, post-measurement state)``."""
    if not op.is_hermitian:
        raise ValueError("only Hermitian Paulis can be measured")
    image = _pauli_action(state.amplitudes, op)
    ev = float(np.vdot(state.amplitudes, image).real)
    p_plus = min(max((1 + ev) / 2, 0.0), 1.0)
    if p_plus >= 1 - NORM_TOL:
        outcome = 1
    elif p_plus <= NORM_TOL:
        outcome = -1
    else:
        outcome = 1 if rng.random() < p_plus else -1
    projected = (state.amplitudes + outcome * image) / 2
    return outcome, StateVector.normalized(state.n_qubits, projected)


def stabilizer_expectations(state: StateVector, group: GeneratorSet) -> np.ndarray:
    return np.array([expectation(state, g).real for g in group])


def run_gauge_fixing(
    state: StateVector,
    plan: GaugeFixPlan,
    rng: np.random.Generator | int | None = None,
    skip_correction: bool = False,
) -> tuple[StateVector, MeasurementRecord]:
    """Measure the plan's operators, then apply the gauge correction."""
    gen, seed = _rng(rng)
    ev = stabilizer_expectations(state, plan.source.S)
    if np.any(np.abs(ev - 1) > 1e-9):
        bad = int(np.argmax(np.abs(ev - 1)))
        raise ValueError(f"input is not in the source code space: stabilizer row {bad} has <S> = {ev[bad]:.3g}")
    record = MeasurementRecord(seed)
    for row, op in zip(plan.measure_rows, plan.measure_list):
        outcome, state = measure_pauli(state, op, gen)
        record.entries.append((row, outcome))
    if not skip_correction:
        state = apply_pauli(state, plan.correction(record.outcomes))
    return state, record


def logical_expectations(state: StateVector, code: GaugeColorCode) -> dict[str, float]:
    return {
        "X": expectation(state, code.logical_x).real,
        "Y": expectation(state, code.logical_y).real,
        "Z": expectation(state, code.logical_z).real,
    }


def logical_action(code: GaugeColorCode, plan: GatePlan) -> np.ndarray:
    """2x2 matrix ``<a|U|b>`` in the logical basis of ``code``, global phase removed."""
    basis = [encode_logical(code, a) for a in (0, 1)]
    images = [apply_gate_plan(b, plan) for b in basis]
    m = np.array([[basis[a].inner(images[b]) for b in (0, 1)] for a in (0, 1)])
    ref = m[0, 0] if abs(m[0, 0]) > 1e-12 else m[np.unravel_index(np.argmax(abs(m)), m.shape)]
    return m / (ref / abs(ref))


def rotation(n: int) -> np.ndarray:
    """``R_n = diag(1, exp(2 pi i / 2^n))``."""
    return np.diag([1, np.exp(2j * np.pi / (1 << n))])


def gate_fidelity(actual: np.ndarray, target: np.ndarray) -> float:
    """``|tr(A^dag B)|^2 / 4``, insensitive to global phase."""
    return float(abs(np.trace(actual.conj().T @ target)) ** 2 / 4)


# --------------------------------------------------------------------------
# Clifford gates, checked on check matrices


def _block_group(code: GaugeColorCode, group: GeneratorSet) -> GeneratorSet:
    """``group`` on both blocks of a two-block system (layout x1 x2 z1 z2)."""
    n = code.n_qubits
    rows = []
    for g in group:
        zero = np.zeros(n, np.uint8)
        rows.append(np.concatenate([g.x, zero, g.z, zero]))
        rows.append(np.concatenate([zero, g.x, zero, g.z]))
    return GeneratorSet.from_matrix(np.array(rows, dtype=np.uint8))


def _cnot_image(v: np.ndarray, n: int) -> np.ndarray:
    x1, x2, z1, z2 = v[:n], v[n : 2 * n], v[2 * n : 3 * n], v[3 * n :]
    return np.concatenate([x1, x1 ^ x2, z1 ^ z2, z2])


def _two_block(a: PauliOperator, b: PauliOperator) -> np.ndarray:
    return np.concatenate([a.x, b.x, a.z, b.z]).astype(np.uint8)


def clifford_transversal_check(code: GaugeColorCode) -> Report:
    """Transversal CNOT (always) and Hadamard (when ``d = e``) on check matrices."""
    n = code.n_qubits
    report = Report()
    ident = PauliOperator.identity(n)
    XQ, ZQ = code.logical_x, code.logical_z

    for name, group in (("S", code.S), ("G", code.G)):
        fails = []
        both = _block_group(code, group)
        for i, row in enumerate(both.matrix):
            img = PauliOperator.from_vector(_cnot_image(row, n))
            if not member(img, both):
                fails.append(f"CNOT image of {name} row {i} (block {1 + i % 2}) leaves {name} x {name}")
        report.add(f"cnot_preserves_{name}", fails)

    fails = []
    gauge = _block_group(code, code.G)
    cases = [
        ((XQ, ident), (XQ, XQ), "X1"),
        ((ident, XQ), (ident, XQ), "X2"),
        ((ZQ, ident), (ZQ, ident), "Z1"),
        ((ident, ZQ), (ZQ, ZQ), "Z2"),
    ]
    for (a, b), (ea, eb), label in cases:
        img = _cnot_image(_two_block(a, b), n)
        diff = PauliOperator.from_vector(img ^ _two_block(ea, eb))
        if not member(diff, gauge):
            fails.append(f"CNOT maps logical {label} incorrectly")
    report.add("cnot_logicals", fails)

    if code.d == code.e:
        fails = []
        for name, group in (("S", code.S), ("G", code.G)):
            for i, g in enumerate(group):
                if not member(PauliOperator(g.z, g.x), group):
                    fails.append(f"Hadamard image of {name} row {i} leaves {name}")
                    break
        swapped_x = PauliOperator(XQ.z, XQ.x)
        if not swapped_x.equal_mod_phase(ZQ):
            fails.append("Hadamard does not send X_Q to Z_Q")
        report.add("hadamard", fails)
    else:
        xs = code.G.x_part().matrix[:, :n]
        zs = code.G.z_part().matrix[:, n:]
        same = gf2.rowspace_equal(xs, zs)
        witness = [] if same else [
            f"x-part rank {gf2.rank(xs)} vs z-part rank {gf2.rank(zs)}; row spaces differ"
        ]
        report.add("hadamard", witness)
    return report


# --------------------------------------------------------------------------
# the universal-gate narrative on the 15-qubit lattice


@dataclass
class DemoResult:
    seed: int | None
    hadamard_transversal: bool
    fixed_stabilizers: np.ndarray
    logicals_before: dict[str, float]
    logicals_after_fix: dict[str, float]
    logical_action: np.ndarray
    action_fidelity: float
    state_fidelity: float
    record: MeasurementRecord
    plan: GatePlan

    @property
    def stabilizers_ok(self) -> bool:
        return bool(np.all(np.abs(self.fixed_stabilizers - 1) <= 1e-10))

    @property
    def logicals_preserved(self) -> bool:
        return all(
            abs(self.logicals_before[k] - self.logicals_after_fix[k]) <= 1e-10 for k in "XYZ"
        )

    def to_json(self) -> dict:
        phases = np.angle(np.diag(self.logical_action)) / np.pi
        return {
            "seed": self.seed,
            "hadamard_transversal": self.hadamard_transversal,
            "fidelity": self.state_fidelity,
            "gate_fidelity": self.action_fidelity,
            "phases": {"0": float(phases[0]), "1": float(phases[1]), "unit": "pi"},
            "stabilizer_expectations": self.fixed_stabilizers.round(12).tolist(),
            "stabilizers_ok": self.stabilizers_ok,
            "logicals_before": self.logicals_before,
            "logicals_after_fix": self.logicals_after_fix,
            "logicals_preserved": self.logicals_preserved,
            "plan": self.plan.to_json(),
            "record": self.record.to_json(),
        }


def universal_demo(
    seed: int | None = 0,
    alpha: complex = 1 / np.sqrt(2),
    beta: complex = 1 / np.sqrt(2),
    n: int = 1,
    skip_correction: bool = False,
) -> DemoResult:
    """Encode in (1,1), check Hadamard, gauge-fix to (1,2), then apply transversal ``R_3``."""
    K = build_lattice("3d", n)
    src = build_code(K, 1, 1)
    dst = build_code(K, 1, 2)
    _check_size(src)
    had = clifford_transversal_check(src)["hadamard"].passed
    psi = encode_state(src, alpha, beta)
    before = logical_expectations(psi, src)
    fixed, record = run_gauge_fixing(psi, gauge_fix_plan(src, dst), seed, skip_correction)
    after = logical_expectations(fixed, dst)
    stabs = stabilizer_expectations(fixed, dst.S)
    plan = gate_plan(dst, 3)
    out = apply_gate_plan(fixed, plan)
    target = rotation(3)
    expected = encode_state(dst, target[0, 0] * alpha, target[1, 1] * beta)
    action = logical_action(dst, plan)
    return DemoResult(
        seed=seed,
        hadamard_transversal=had,
        fixed_stabilizers=stabs,
        logicals_before=before,
        logicals_after_fix=after,
        logical_action=action,
        action_fidelity=gate_fidelity(action, target),
        state_fidelity=expected.fidelity(out),
        record=record,
        plan=plan,
    )
