"""Parameterized circuits: the fixed 2-qubit sector circuits for ethylene and
greedy qubit-ADAPT construction from a UCCSD-derived operator pool for H3.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .fermion import EncodingSpec, encode_ladder_product, taper_string
from .optimize import OptimizerBudget, cobyla_minimize
from .pauli import PauliString, PauliSum
from .sim import Gate, ParamCircuit, exact_expectation, run_circuit


@dataclass(frozen=True)
class OperatorPool:
    """Rotation generators exp(-i theta/2 P); odd Y-count keeps states real."""

    ops: tuple

    def __post_init__(self):
        object.__setattr__(self, "ops", tuple(self.ops))
        for op in self.ops:
            if op.y_count % 2 == 0:
                raise ValueError(f"pool generator {op.label()} has even Y count")

    def __len__(self):
        return len(self.ops)


def ethylene_sector_circuit(sector: str) -> ParamCircuit:
    """One-parameter circuit spanning a mirror-symmetry sector of the tapered
    2-qubit ethylene register: "a_prime" spans {|00>, |11>}, "a_double_prime"
    puts an X on qubit 1 first and spans {|01>, |10>}."""
    gates = []
    if sector == "a_double_prime":
        gates.append(Gate("x", (1,)))
    elif sector != "a_prime":
        raise ValueError(f"unknown ethylene sector {sector!r}")
    gates.append(Gate("ry", (0,), slot=0))
    gates.append(Gate("cnot", (0, 1)))
    return ParamCircuit(2, tuple(gates), n_params=1, label=sector)


def pauli_rotation_block(pauli: PauliString, slot: int):
    """Gate sequence for exp(-i theta/2 P): per-qubit basis changes, a CNOT
    ladder over the support, RZ on the last support qubit, and the inverse."""
    if pauli.is_identity():
        raise ValueError("cannot build a rotation block for the identity")
    support = list(pauli.support)
    fwd = []
    rev = []
    for q in support:
        letter = pauli.letter(q)
        if letter == "X":
            fwd.append(Gate("h", (q,)))
            rev.append(Gate("h", (q,)))
        elif letter == "Y":
            # S^dag then H maps Y to Z; inverse is H then S
            fwd.extend([Gate("rz", (q,), angle=-math.pi / 2), Gate("h", (q,))])
            rev.extend([Gate("rz", (q,), angle=math.pi / 2), Gate("h", (q,))])
    ladder = [Gate("cnot", (support[i], support[i + 1])) for i in range(len(support) - 1)]
    middle = [Gate("rz", (support[-1],), slot=slot)]
    return tuple(fwd + ladder + middle + ladder[::-1] + [g for g in reversed(rev)])


def reference_gates(reference: int, n_qubits: int):
    return tuple(Gate("x", (q,)) for q in range(n_qubits) if (reference >> q) & 1)


def electron_counts_from_spec(spec: EncodingSpec, n_active_elec: int):
    """(n_alpha, n_beta) consistent with the tapering sector: the alpha-count
    parity is read off the sector eigenvalues and the alpha-majority split
    closest to half filling is chosen."""
    if spec.taper is None:
        raise ValueError("encoding has no tapering sector to read counts from")
    alpha_mask = sum(1 << m for m in range(0, spec.n_modes, 2))
    masks = spec.taper.mode_masks
    sectors = spec.taper.sectors
    alpha_parity = None
    for pick in range(1, 1 << len(masks)):
        combined = 0
        sector = 1
        for k in range(len(masks)):
            if (pick >> k) & 1:
                combined ^= masks[k]
                sector *= sectors[k]
        if combined == alpha_mask:
            alpha_parity = 0 if sector == 1 else 1
            break
    if alpha_parity is None:
        raise ValueError("tapering symmetries do not determine the alpha parity")
    for n_alpha in range((n_active_elec + 1) // 2, n_active_elec + 1):
        if n_alpha % 2 == alpha_parity:
            return n_alpha, n_active_elec - n_alpha
    raise ValueError("no alpha count matches the sector parity")


def uccsd_qubit_pool(n_active_elec: int, n_qubits: int, spec: EncodingSpec) -> OperatorPool:
    """Encode every anti-Hermitian UCCSD single/double excitation generator,
    split into individual Pauli strings, keep the odd-Y ones, deduplicate.

    For a real ladder product T the strings of i(T - T^dag) are exactly the
    imaginary-coefficient (odd-Y) strings of T's raw expansion.
    """
    n_modes = spec.n_modes
    n_alpha, n_beta = electron_counts_from_spec(spec, n_active_elec)
    occupied = [2 * i for i in range(n_alpha)] + [2 * i + 1 for i in range(n_beta)]
    virtual = [m for m in range(n_modes) if m not in occupied]
    excitations = []
    for p in occupied:
        for a in virtual:
            if (a - p) % 2 == 0:
                excitations.append(((a, True), (p, False)))
    occ_pairs = [(p, q) for i, p in enumerate(occupied) for q in occupied[i + 1:]]
    virt_pairs = [(a, b) for i, a in enumerate(virtual) for b in virtual[i + 1:]]
    for p, q in occ_pairs:
        for a, b in virt_pairs:
            if (p % 2 + q % 2) == (a % 2 + b % 2):
                excitations.append(((a, True), (b, True), (q, False), (p, False)))
    strings = {}
    for ops in excitations:
        for string, coeff in encode_ladder_product(ops, spec).items():
            if abs(complex(coeff).imag) < 1e-12:
                continue
            _, reduced = taper_string(string, spec)
            if reduced.y_count % 2 == 1 and not reduced.is_identity():
                strings[reduced.label()] = reduced
    if any(s.n_qubits != n_qubits for s in strings.values()):
        raise ValueError("pool width does not match the requested qubit count")
    ordered = [strings[k] for k in sorted(strings)]
    return OperatorPool(tuple(ordered))


@dataclass
class AdaptResult:
    circuit: ParamCircuit
    params: np.ndarray
    energy: float
    history: list  # (generator label or "reference", energy after optimization)


def _energy_objective(ham, circuit):
    def objective(theta):
        return exact_expectation(run_circuit(circuit, theta), ham)

    return objective


def adapt_build(ham: PauliSum, pool: OperatorPool, reference: int,
                eps_grad: float = 1e-3, eps_energy: float = 1e-6,
                max_ops: int = 8, opt_evals: int = 400,
                label: str = "adapt") -> AdaptResult:
    """Greedy qubit-ADAPT: at each step append the pool generator with the
    largest energy-gradient magnitude |<[H, P]>| at the current optimized
    state, then re-optimize every parameter at noiseless exact expectations.

    Stops when the best gradient falls below eps_grad, the energy improvement
    falls below eps_energy (the candidate operator is then dropped), or
    max_ops operators have been accepted. Ties pick the lowest pool index.
    """
    if len(pool) == 0:
        raise ValueError("empty operator pool")
    n = ham.n_qubits
    if reference >> n:
        raise ValueError("reference does not fit the Hamiltonian register")
    chosen = []
    params = np.zeros(0)
    circuit = ParamCircuit(n, reference_gates(reference, n), n_params=0, label=label)
    state = run_circuit(circuit, params)
    energy = exact_expectation(state, ham)
    history = [("reference", energy)]
    while len(chosen) < max_ops:
        h_state = ham.apply(state)
        grads = np.array([2.0 * abs(np.vdot(h_state, op.apply(state)).imag) for op in pool.ops])
        best_idx = int(np.argmax(grads))
        if grads[best_idx] < eps_grad:
            break
        candidate = pool.ops[best_idx]
        gates = circuit.gates + pauli_rotation_block(candidate, slot=len(chosen))
        trial = ParamCircuit(n, gates, n_params=len(chosen) + 1, label=label)
        x0 = np.append(params, 0.0)
        result = cobyla_minimize(
            _energy_objective(ham, trial), x0,
            OptimizerBudget(max_evals=opt_evals, tol=min(eps_energy, 1e-8)),
        )
        if energy - result.best_value < eps_energy:
            break
        circuit, params, energy = trial, result.best_params, result.best_value
        chosen.append(candidate)
        history.append((candidate.label(), energy))
        state = run_circuit(circuit, params)
    return AdaptResult(circuit, params, energy, history)
