"""Dense statevector simulation: parameterized circuits, exact expectations,
shot sampling with global depolarizing noise, and readout confusion.

Statevectors are plain complex ndarrays of length 2**n; qubit 0 is the least
significant bit of the basis index, so basis labels read qubit (n-1) ... 0
left to right.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .pauli import PauliString, PauliSum

ROTATION_KINDS = ("ry", "rz", "pauli_rot")
GATE_KINDS = ("x", "h", "cnot", "cz") + ROTATION_KINDS


@dataclass(frozen=True)
class Gate:
    """One circuit element. Rotations carry either a fixed angle or a
    parameter slot; pauli_rot implements exp(-i theta/2 P)."""

    kind: str
    qubits: tuple
    slot: int | None = None
    angle: float | None = None
    pauli: PauliString | None = None

    def __post_init__(self):
        if self.kind not in GATE_KINDS:
            raise ValueError(f"unknown gate kind {self.kind!r}")
        if len(set(self.qubits)) != len(self.qubits):
            raise ValueError("duplicate qubit indices")
        if self.kind in ROTATION_KINDS and (self.slot is None) == (self.angle is None):
            raise ValueError(f"{self.kind} needs exactly one of slot or angle")
        if self.kind == "pauli_rot" and self.pauli is None:
            raise ValueError("pauli_rot needs a PauliString")

    def resolve_angle(self, params) -> float:
        return self.angle if self.slot is None else float(params[self.slot])


@dataclass(frozen=True)
class ParamCircuit:
    """Ordered gate list whose rotation angles reference parameter slots."""

    n_qubits: int
    gates: tuple
    n_params: int = 0
    label: str = ""

    def __post_init__(self):
        object.__setattr__(self, "gates", tuple(self.gates))
        used = set()
        for gate in self.gates:
            if any(q >= self.n_qubits or q < 0 for q in gate.qubits):
                raise ValueError(f"gate {gate.kind} out of range")
            if gate.slot is not None:
                if gate.slot >= self.n_params:
                    raise ValueError("parameter slot out of range")
                used.add(gate.slot)
        if used != set(range(self.n_params)):
            raise ValueError("every parameter slot must be referenced")

    def to_text(self) -> str:
        """One gate per line: kind, qubits, then slot=/angle= and the generator
        label for pauli_rot. Stable golden-file format."""
        lines = []
        for g in self.gates:
            parts = [g.kind]
            if g.kind == "pauli_rot":
                parts.append(g.pauli.label())
            parts.extend(str(q) for q in g.qubits)
            if g.slot is not None:
                parts.append(f"slot={g.slot}")
            elif g.angle is not None:
                parts.append(f"angle={g.angle!r}")
            lines.append(" ".join(parts))
        return "\n".join(lines) + "\n"

    @classmethod
    def from_text(cls, text: str, n_qubits: int, label: str = "") -> "ParamCircuit":
        gates = []
        max_slot = -1
        for line in text.splitlines():
            line = line.strip()
            if not line or line.startswith("#"):
                continue
            parts = line.split()
            kind = parts[0]
            rest = parts[1:]
            pauli = None
            if kind == "pauli_rot":
                pauli = PauliString.from_label(rest[0], n_qubits)
                rest = rest[1:]
            slot = angle = None
            if rest and rest[-1].startswith("slot="):
                slot = int(rest[-1][5:])
                max_slot = max(max_slot, slot)
                rest = rest[:-1]
            elif rest and rest[-1].startswith("angle="):
                angle = float(rest[-1][6:])
                rest = rest[:-1]
            qubits = tuple(int(tok) for tok in rest)
            gates.append(Gate(kind, qubits, slot=slot, angle=angle, pauli=pauli))
        return cls(n_qubits, tuple(gates), n_params=max_slot + 1, label=label)


@dataclass(frozen=True)
class ConfusionMatrix:
    """Column-stochastic readout map, T[i, j] = P(measured i | prepared j)."""

    T: np.ndarray

    def __post_init__(self):
        T = np.asarray(self.T, dtype=float)
        object.__setattr__(self, "T", T)
        if T.ndim != 2 or T.shape[0] != T.shape[1]:
            raise ValueError("confusion matrix must be square")
        if np.any(T < 0):
            raise ValueError("confusion matrix entries must be >= 0")
        if not np.allclose(T.sum(axis=0), 1.0, atol=1e-9):
            raise ValueError("confusion matrix columns must sum to 1")

    @property
    def n_states(self) -> int:
        return self.T.shape[0]

    @classmethod
    def symmetric_flip(cls, n_qubits: int, flip_rate: float) -> "ConfusionMatrix":
        t1 = np.array([[1 - flip_rate, flip_rate], [flip_rate, 1 - flip_rate]])
        T = np.array([[1.0]])
        for _ in range(n_qubits):
            T = np.kron(T, t1)
        return cls(T)


@dataclass(frozen=True)
class NoiseModel:
    """Global depolarization with per-layer rate depol_p over n_layers, plus
    optional readout confusion. n_layers=None means "derive from the circuit"
    and must be materialized before sampling."""

    depol_p: float = 0.0
    n_layers: int | None = None
    confusion: ConfusionMatrix | None = None

    def __post_init__(self):
        if not 0.0 <= self.depol_p <= 1.0:
            raise ValueError("depolarizing rate must be in [0, 1]")

    def total_depolarization(self) -> float:
        """P_n = 1 - (1 - p)^n, the weight of the uniform component."""
        if self.depol_p == 0.0:
            return 0.0
        if self.n_layers is None:
            raise ValueError("n_layers not set; derive it from the circuit first")
        return 1.0 - (1.0 - self.depol_p) ** self.n_layers

    def with_layers(self, n_layers: int) -> "NoiseModel":
        return NoiseModel(self.depol_p, n_layers, self.confusion)


def zero_state(n_qubits: int) -> np.ndarray:
    state = np.zeros(1 << n_qubits, dtype=complex)
    state[0] = 1.0
    return state


def basis_label(index: int, n_qubits: int) -> str:
    return format(index, f"0{n_qubits}b")


_H = np.array([[1, 1], [1, -1]], dtype=complex) / math.sqrt(2)
_X = np.array([[0, 1], [1, 0]], dtype=complex)


def _ry(theta):
    c, s = math.cos(theta / 2), math.sin(theta / 2)
    return np.array([[c, -s], [s, c]], dtype=complex)


def _rz(theta):
    return np.array([[np.exp(-0.5j * theta), 0], [0, np.exp(0.5j * theta)]])


def _apply_1q(state, mat, q, n):
    psi = state.reshape([2] * n)
    axis = n - 1 - q
    psi = np.tensordot(mat, psi, axes=([1], [axis]))
    return np.moveaxis(psi, 0, axis).reshape(-1)


def _apply_cnot(state, control, target, n):
    psi = state.reshape([2] * n).copy()
    sel = [slice(None)] * n
    sel[n - 1 - control] = 1
    sub = psi[tuple(sel)]
    t_axis = n - 1 - target - (1 if control > target else 0)
    psi[tuple(sel)] = np.flip(sub, axis=t_axis)
    return psi.reshape(-1)


def _apply_cz(state, a, b, n):
    psi = state.reshape([2] * n).copy()
    sel = [slice(None)] * n
    sel[n - 1 - a] = 1
    sel[n - 1 - b] = 1
    psi[tuple(sel)] *= -1
    return psi.reshape(-1)


def apply_gate(state: np.ndarray, gate: Gate, params=(), n_qubits: int | None = None) -> np.ndarray:
    n = n_qubits if n_qubits is not None else int(math.log2(state.shape[0]))
    if gate.kind == "x":
        return _apply_1q(state, _X, gate.qubits[0], n)
    if gate.kind == "h":
        return _apply_1q(state, _H, gate.qubits[0], n)
    if gate.kind == "ry":
        return _apply_1q(state, _ry(gate.resolve_angle(params)), gate.qubits[0], n)
    if gate.kind == "rz":
        return _apply_1q(state, _rz(gate.resolve_angle(params)), gate.qubits[0], n)
    if gate.kind == "cnot":
        return _apply_cnot(state, gate.qubits[0], gate.qubits[1], n)
    if gate.kind == "cz":
        return _apply_cz(state, gate.qubits[0], gate.qubits[1], n)
    if gate.kind == "pauli_rot":
        theta = gate.resolve_angle(params)
        return math.cos(theta / 2) * state - 1j * math.sin(theta / 2) * gate.pauli.apply(state)
    raise ValueError(f"unknown gate kind {gate.kind!r}")


def run_circuit(circuit: ParamCircuit, params=()) -> np.ndarray:
    """Run the circuit on |0...0> and return the normalized statevector."""
    params = np.asarray(params, dtype=float)
    if params.shape != (circuit.n_params,):
        raise ValueError(f"expected {circuit.n_params} parameters, got {params.shape}")
    state = zero_state(circuit.n_qubits)
    for gate in circuit.gates:
        state = apply_gate(state, gate, params, circuit.n_qubits)
    return state


def exact_expectation(state: np.ndarray, obs: PauliSum) -> float:
    """<state|obs|state>, checked to be real within 1e-10."""
    if state.shape[0] != 1 << obs.n_qubits:
        raise ValueError("state/observable width mismatch")
    value = complex(np.vdot(state, obs.apply(state)))
    if abs(value.imag) > 1e-10:
        raise ValueError(f"expectation has imaginary part {value.imag:.3e}")
    return value.real


def apply_confusion(probabilities: np.ndarray, confusion: ConfusionMatrix) -> np.ndarray:
    """Push ideal outcome probabilities through the readout map, y = T x."""
    p = np.asarray(probabilities, dtype=float)
    if p.shape[0] != confusion.n_states:
        raise ValueError("probability/confusion dimension mismatch")
    return confusion.T @ p


def outcome_probabilities(state: np.ndarray, basis_rotations=(), noise: NoiseModel | None = None) -> np.ndarray:
    """Deterministic (infinite-shot) outcome distribution after basis rotations,
    depolarizing admixture, and readout confusion."""
    n = int(math.log2(state.shape[0]))
    rotated = state
    for gate in basis_rotations:
        rotated = apply_gate(rotated, gate, (), n)
    probs = np.abs(rotated) ** 2
    probs /= probs.sum()
    if noise is not None:
        p_n = noise.total_depolarization()
        if p_n > 0.0:
            probs = (1.0 - p_n) * probs + p_n / probs.shape[0]
        if noise.confusion is not None:
            probs = apply_confusion(probs, noise.confusion)
    return probs


def sample_counts(state: np.ndarray, basis_rotations=(), shots: int = 1,
                  noise: NoiseModel | None = None, rng_seed=None) -> dict:
    """Multinomial shot histogram over bit strings (qubit 0 rightmost).

    Deterministic for a fixed rng_seed; keys are sorted and zero-count
    outcomes omitted.
    """
    if shots < 1:
        raise ValueError("shots must be >= 1")
    n = int(math.log2(state.shape[0]))
    probs = outcome_probabilities(state, basis_rotations, noise)
    rng = np.random.default_rng(rng_seed)
    counts = rng.multinomial(shots, probs)
    return {basis_label(i, n): int(c) for i, c in enumerate(counts) if c}


def histogram_probabilities(histogram: dict, n_qubits: int) -> np.ndarray:
    """Dense probability vector from a bit-string histogram."""
    probs = np.zeros(1 << n_qubits)
    total = float(sum(histogram.values()))
    for key, count in histogram.items():
        probs[int(key, 2)] = count / total
    return probs
