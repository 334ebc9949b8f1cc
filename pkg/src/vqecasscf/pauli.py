"""Pauli-string algebra: products with phase tracking, qubit-wise commutativity,
and real-coefficient Pauli sums used for Hamiltonians and observables.

Strings are stored as two bit masks (x_mask, z_mask); qubit q corresponds to
bit q, i.e. qubit 0 is the least significant bit of a basis-state index.
"""

from __future__ import annotations

import re
from dataclasses import dataclass

import numpy as np

# single-qubit products: (left, right) -> (power of i, letter)
_MUL = {
    ("I", "I"): (0, "I"), ("I", "X"): (0, "X"), ("I", "Y"): (0, "Y"), ("I", "Z"): (0, "Z"),
    ("X", "I"): (0, "X"), ("X", "X"): (0, "I"), ("X", "Y"): (1, "Z"), ("X", "Z"): (3, "Y"),
    ("Y", "I"): (0, "Y"), ("Y", "X"): (3, "Z"), ("Y", "Y"): (0, "I"), ("Y", "Z"): (1, "X"),
    ("Z", "I"): (0, "Z"), ("Z", "X"): (1, "Y"), ("Z", "Y"): (3, "X"), ("Z", "Z"): (0, "I"),
}

_LETTER_TO_BITS = {"I": (0, 0), "X": (1, 0), "Y": (1, 1), "Z": (0, 1)}
_BITS_TO_LETTER = {v: k for k, v in _LETTER_TO_BITS.items()}

_PHASES = (1, 1j, -1, -1j)

_MAT_1Q = {
    "I": np.eye(2, dtype=complex),
    "X": np.array([[0, 1], [1, 0]], dtype=complex),
    "Y": np.array([[0, -1j], [1j, 0]], dtype=complex),
    "Z": np.array([[1, 0], [0, -1]], dtype=complex),
}

COEFF_PRUNE_TOL = 1e-14


@dataclass(frozen=True)
class PauliString:
    """Tensor product of single-qubit Paulis, e.g. Z1Z0 on two qubits."""

    n_qubits: int
    x_mask: int = 0
    z_mask: int = 0

    def __post_init__(self):
        limit = 1 << self.n_qubits
        if not (0 <= self.x_mask < limit and 0 <= self.z_mask < limit):
            raise ValueError("mask exceeds qubit count")

    @classmethod
    def from_letters(cls, letters) -> "PauliString":
        """Build from a per-qubit iterable, letters[q] acting on qubit q."""
        x = z = 0
        for q, letter in enumerate(letters):
            xb, zb = _LETTER_TO_BITS[letter]
            x |= xb << q
            z |= zb << q
        return cls(len(tuple(letters)), x, z)

    @classmethod
    def from_label(cls, label: str, n_qubits: int) -> "PauliString":
        """Parse labels like "X1Y0", "Z2", or "I" (letter followed by qubit index)."""
        if label in ("", "I"):
            return cls(n_qubits)
        x = z = 0
        for letter, idx in re.findall(r"([IXYZ])(\d+)", label):
            q = int(idx)
            if q >= n_qubits:
                raise ValueError(f"qubit {q} out of range for {n_qubits} qubits")
            xb, zb = _LETTER_TO_BITS[letter]
            x |= xb << q
            z |= zb << q
        return cls(n_qubits, x, z)

    @classmethod
    def identity(cls, n_qubits: int) -> "PauliString":
        return cls(n_qubits)

    def letter(self, q: int) -> str:
        return _BITS_TO_LETTER[((self.x_mask >> q) & 1, (self.z_mask >> q) & 1)]

    @property
    def letters(self) -> str:
        """Letters indexed by qubit, letters[q] on qubit q."""
        return "".join(self.letter(q) for q in range(self.n_qubits))

    @property
    def support(self) -> tuple:
        mask = self.x_mask | self.z_mask
        return tuple(q for q in range(self.n_qubits) if (mask >> q) & 1)

    @property
    def weight(self) -> int:
        return bin(self.x_mask | self.z_mask).count("1")

    @property
    def y_count(self) -> int:
        return bin(self.x_mask & self.z_mask).count("1")

    def is_identity(self) -> bool:
        return self.x_mask == 0 and self.z_mask == 0

    def is_diagonal(self) -> bool:
        return self.x_mask == 0

    def label(self) -> str:
        """Compact label, qubit index descending ("Z1Z0"); identity is "I"."""
        if self.is_identity():
            return "I"
        return "".join(
            f"{self.letter(q)}{q}" for q in reversed(self.support)
        )

    def __str__(self):
        return self.label()

    def to_matrix(self) -> np.ndarray:
        if self.n_qubits > 12:
            raise ValueError("dense matrix limited to 12 qubits")
        mat = np.array([[1.0 + 0j]])
        for q in reversed(range(self.n_qubits)):
            mat = np.kron(mat, _MAT_1Q[self.letter(q)])
        return mat

    def apply(self, state: np.ndarray) -> np.ndarray:
        """Apply this string to a statevector without forming the matrix."""
        dim = 1 << self.n_qubits
        if state.shape[0] != dim:
            raise ValueError("state width mismatch")
        idx = np.arange(dim)
        src = idx ^ self.x_mask
        # phase of P|b> with b the SOURCE basis state: i^{nY} * (-1)^{popcount(b & z)}
        signs = 1 - 2 * (np.bitwise_count(src & self.z_mask) & 1).astype(np.int64)
        phase = 1j ** self.y_count
        out = np.empty_like(state, dtype=complex)
        out[idx] = phase * signs * state[src]
        return out


def pauli_mul(a: PauliString, b: PauliString):
    """Product a*b, returned as (phase, string) with phase in {1,-1,1j,-1j}."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("qubit count mismatch")
    power = 0
    x = z = 0
    both = (a.x_mask | a.z_mask) | (b.x_mask | b.z_mask)
    q = 0
    while both >> q:
        if (both >> q) & 1:
            p, letter = _MUL[(a.letter(q), b.letter(q))]
            power += p
            xb, zb = _LETTER_TO_BITS[letter]
            x |= xb << q
            z |= zb << q
        q += 1
    return _PHASES[power % 4], PauliString(a.n_qubits, x, z)


def qubit_wise_commutes(a: PauliString, b: PauliString) -> bool:
    """True iff on every qubit the letters agree or at least one is identity."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("qubit count mismatch")
    shared = (a.x_mask | a.z_mask) & (b.x_mask | b.z_mask)
    differ = (a.x_mask ^ b.x_mask) | (a.z_mask ^ b.z_mask)
    return shared & differ == 0


def commutes(a: PauliString, b: PauliString) -> bool:
    """Full (not qubit-wise) commutation: even number of anticommuting positions."""
    anti = bin((a.x_mask & b.z_mask)).count("1") + bin((a.z_mask & b.x_mask)).count("1")
    return anti % 2 == 0


class PauliSum:
    """Real linear combination of Pauli strings on a fixed qubit register.

    Coefficients must be real (Hamiltonians and RDM observables in scope are
    real after encoding); complex input is rejected so mapping bugs surface
    early. Terms with |coeff| < 1e-14 are pruned. Instances are treated as
    immutable after construction.
    """

    def __init__(self, n_qubits: int, terms=None):
        self.n_qubits = n_qubits
        self._terms: dict[PauliString, float] = {}
        if terms:
            for string, coeff in dict(terms).items():
                if string.n_qubits != n_qubits:
                    raise ValueError("term width mismatch")
                if isinstance(coeff, complex):
                    if abs(coeff.imag) > 1e-12:
                        raise ValueError(f"complex coefficient {coeff} for {string}")
                    coeff = coeff.real
                if abs(coeff) >= COEFF_PRUNE_TOL:
                    self._terms[string] = self._terms.get(string, 0.0) + float(coeff)
            self._terms = {s: c for s, c in self._terms.items() if abs(c) >= COEFF_PRUNE_TOL}

    @classmethod
    def from_labels(cls, n_qubits: int, labeled: dict) -> "PauliSum":
        return cls(n_qubits, {PauliString.from_label(k, n_qubits): v for k, v in labeled.items()})

    @property
    def terms(self) -> dict:
        return dict(self._terms)

    def __len__(self):
        return len(self._terms)

    def __iter__(self):
        return iter(self.sorted_terms())

    def coefficient(self, string: PauliString) -> float:
        return self._terms.get(string, 0.0)

    def strings(self):
        return list(self._terms)

    def sorted_terms(self):
        """Terms in the canonical order: lexicographic on the displayed letters."""
        return sorted(self._terms.items(), key=lambda item: item[0].letters[::-1])

    def identity_part(self) -> float:
        return self._terms.get(PauliString.identity(self.n_qubits), 0.0)

    def non_identity(self):
        return [s for s in self._terms if not s.is_identity()]

    def __add__(self, other):
        if isinstance(other, PauliSum):
            return pauli_sum_add(self, other)
        return NotImplemented

    def __mul__(self, scalar):
        if isinstance(scalar, (int, float)):
            return PauliSum(self.n_qubits, {s: c * scalar for s, c in self._terms.items()})
        if isinstance(scalar, PauliSum):
            return pauli_sum_mul(self, scalar)
        return NotImplemented

    __rmul__ = __mul__

    def __sub__(self, other):
        if isinstance(other, PauliSum):
            return pauli_sum_add(self, other * -1.0)
        return NotImplemented

    def to_matrix(self) -> np.ndarray:
        dim = 1 << self.n_qubits
        mat = np.zeros((dim, dim), dtype=complex)
        for string, coeff in self._terms.items():
            mat += coeff * string.to_matrix()
        return mat

    def apply(self, state: np.ndarray) -> np.ndarray:
        out = np.zeros_like(state, dtype=complex)
        for string, coeff in self._terms.items():
            out += coeff * string.apply(state)
        return out

    def __str__(self):
        if not self._terms:
            return "0"
        return " + ".join(f"{coeff!r}*{string.label()}" for string, coeff in self.sorted_terms())

    def __repr__(self):
        return f"PauliSum({self.n_qubits}, {len(self._terms)} terms)"

    def __eq__(self, other):
        if not isinstance(other, PauliSum):
            return NotImplemented
        return self.n_qubits == other.n_qubits and self._terms == other._terms

    def allclose(self, other: "PauliSum", tol: float = 1e-10) -> bool:
        keys = set(self._terms) | set(other._terms)
        return all(abs(self.coefficient(k) - other.coefficient(k)) <= tol for k in keys)


def pauli_sum_add(a: PauliSum, b: PauliSum) -> PauliSum:
    """Merged term map, pruned below the coefficient tolerance."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("qubit count mismatch")
    merged = dict(a.terms)
    for string, coeff in b.terms.items():
        merged[string] = merged.get(string, 0.0) + coeff
    return PauliSum(a.n_qubits, merged)


def pauli_sum_mul(a: PauliSum, b: PauliSum, imag_tol: float = 1e-10) -> PauliSum:
    """Operator product a@b; the result must come out real (commuting Hermitian
    inputs), otherwise the imaginary residue is reported as an error."""
    if a.n_qubits != b.n_qubits:
        raise ValueError("qubit count mismatch")
    acc: dict[PauliString, complex] = {}
    for sa, ca in a.terms.items():
        for sb, cb in b.terms.items():
            phase, out = pauli_mul(sa, sb)
            acc[out] = acc.get(out, 0.0) + phase * ca * cb
    bad = max((abs(c.imag) for c in acc.values()), default=0.0)
    if bad > imag_tol:
        raise ValueError(f"product has imaginary residue {bad:.3e}")
    return PauliSum(a.n_qubits, {s: c.real for s, c in acc.items()})
