"""Molecular integral ingestion (FCIDUMP), active-space folding, and the
conversion of an active Hamiltonian to a spin-orbital fermionic operator.

Two-electron integrals are kept in chemists' notation (pq|rs) throughout this
module, matching the FCIDUMP convention; the switch to the antisymmetrized
physicists' form happens inside active_to_fermion.
"""

from __future__ import annotations

import re
from dataclasses import dataclass, field

import numpy as np

from .fermion import FermionOperator

_V_SYM_AXES = [(1, 0, 2, 3), (0, 1, 3, 2), (1, 0, 3, 2),
               (2, 3, 0, 1), (3, 2, 0, 1), (2, 3, 1, 0), (3, 2, 1, 0)]


@dataclass
class IntegralSet:
    """Spatial molecular integrals in Hartree: one-electron h[p,q], chemists'
    two-electron v[p,q,r,s] = (pq|rs), the nuclear repulsion scalar, and the
    electron bookkeeping from the FCIDUMP header."""

    n_orb: int
    e_nuc: float
    h: np.ndarray
    v: np.ndarray
    n_elec: int
    ms2: int = 0

    def __post_init__(self):
        self.h = np.asarray(self.h, dtype=float)
        self.v = np.asarray(self.v, dtype=float)
        n = self.n_orb
        if self.h.shape != (n, n) or self.v.shape != (n, n, n, n):
            raise ValueError("integral tensor shapes do not match n_orb")
        if not (np.isfinite(self.h).all() and np.isfinite(self.v).all() and np.isfinite(self.e_nuc)):
            raise ValueError("integrals must be finite")
        if not np.allclose(self.h, self.h.T, atol=1e-9):
            raise ValueError("one-electron integrals must be symmetric")
        for axes in _V_SYM_AXES:
            if not np.allclose(self.v, self.v.transpose(axes), atol=1e-9):
                raise ValueError("two-electron integrals must have 8-fold symmetry")

    def copy(self) -> "IntegralSet":
        return IntegralSet(self.n_orb, self.e_nuc, self.h.copy(), self.v.copy(),
                           self.n_elec, self.ms2)


@dataclass(frozen=True)
class ActiveSpace:
    """Core (doubly occupied) and active orbital indices, 0-based."""

    core: tuple
    active: tuple
    n_active_elec: int

    def __post_init__(self):
        object.__setattr__(self, "core", tuple(self.core))
        object.__setattr__(self, "active", tuple(self.active))
        if set(self.core) & set(self.active):
            raise ValueError("core and active orbitals must be disjoint")
        if self.n_active_elec > 2 * len(self.active):
            raise ValueError("too many active electrons")

    def validate(self, n_orb: int):
        if any(i >= n_orb or i < 0 for i in self.core + self.active):
            raise ValueError("orbital index out of range")

    @property
    def n_active(self) -> int:
        return len(self.active)

    def electron_counts(self, ms2: int):
        """(n_alpha, n_beta) of the active space; the core is closed shell."""
        if (self.n_active_elec + ms2) % 2:
            raise ValueError("electron count and ms2 have inconsistent parity")
        n_alpha = (self.n_active_elec + ms2) // 2
        n_beta = (self.n_active_elec - ms2) // 2
        if n_beta < 0:
            raise ValueError("ms2 exceeds the active electron count")
        return n_alpha, n_beta


@dataclass
class ActiveHamiltonian:
    """Core-folded effective integrals of the active space."""

    e_const: float
    h_eff: np.ndarray
    v_act: np.ndarray

    def __post_init__(self):
        self.h_eff = np.asarray(self.h_eff, dtype=float)
        self.v_act = np.asarray(self.v_act, dtype=float)
        if not np.isfinite(self.e_const):
            raise ValueError("core energy must be finite")
        if not np.allclose(self.h_eff, self.h_eff.T, atol=1e-9):
            raise ValueError("effective one-electron integrals must be symmetric")

    @property
    def n_active(self) -> int:
        return self.h_eff.shape[0]


def parse_fcidump(text: str) -> IntegralSet:
    """Parse FCIDUMP text: namelist header, then "value i j k l" lines with
    1-based indices, chemists' (ij|kl) four-index entries, h for k=l=0, and
    the nuclear repulsion on the all-zero-index line."""
    match = re.search(r"&FCI(.*?)(?:&END|/)", text, re.S | re.I)
    if not match:
        raise ValueError("missing FCIDUMP namelist header")
    header = match.group(1)

    def header_int(key):
        m = re.search(rf"{key}\s*=\s*([-\d]+)", header, re.I)
        if m is None:
            raise ValueError(f"missing header key {key}")
        return int(m.group(1))

    n_orb = header_int("NORB")
    n_elec = header_int("NELEC")
    ms2 = int(re.search(r"MS2\s*=\s*([-\d]+)", header, re.I).group(1)) \
        if re.search(r"MS2\s*=", header, re.I) else 0

    h = np.zeros((n_orb, n_orb))
    v = np.zeros((n_orb, n_orb, n_orb, n_orb))
    e_nuc = 0.0
    seen: dict = {}

    def record(kind, key, value):
        if key in seen and abs(seen[key] - value) > 1e-10:
            raise ValueError(f"conflicting duplicate {kind} entry {key}")
        seen[key] = value

    for line in text[match.end():].splitlines():
        tokens = line.split()
        if not tokens:
            continue
        if len(tokens) != 5:
            raise ValueError(f"malformed integral line: {line.strip()!r}")
        value = float(tokens[0].replace("D", "E").replace("d", "e"))
        i, j, k, l = (int(t) for t in tokens[1:])
        if max(i, j, k, l) > n_orb or min(i, j, k, l) < 0:
            raise ValueError(f"orbital index out of range: {line.strip()!r}")
        if i == j == k == l == 0:
            record("e_nuc", ("e",), value)
            e_nuc = value
        elif k == 0 and l == 0:
            if i == 0 or j == 0:
                raise ValueError(f"malformed one-electron line: {line.strip()!r}")
            record("h", ("h",) + tuple(sorted((i, j))), value)
            h[i - 1, j - 1] = h[j - 1, i - 1] = value
        elif min(i, j, k, l) == 0:
            raise ValueError(f"malformed two-electron line: {line.strip()!r}")
        else:
            p, q, r, s = i - 1, j - 1, k - 1, l - 1
            images = {(p, q, r, s), (q, p, r, s), (p, q, s, r), (q, p, s, r),
                      (r, s, p, q), (s, r, p, q), (r, s, q, p), (s, r, q, p)}
            record("v", ("v", min(images)), value)
            for idx in images:
                v[idx] = value
    return IntegralSet(n_orb, e_nuc, h, v, n_elec, ms2)


def write_fcidump(ints: IntegralSet, tol: float = 0.0) -> str:
    """Serialize with canonical 8-fold-unique index loops; %.16e values
    round-trip float64 exactly."""
    n = ints.n_orb
    lines = [f" &FCI NORB={n},NELEC={ints.n_elec},MS2={ints.ms2},",
             "  ORBSYM=" + "1," * n,
             "  ISYM=1,",
             " &END"]

    def emit(value, i, j, k, l):
        lines.append(f"{value: .16e} {i:4d} {j:4d} {k:4d} {l:4d}")

    for i in range(n):
        for j in range(i + 1):
            for k in range(i + 1):
                lmax = j if k == i else k
                for l in range(lmax + 1):
                    if abs(ints.v[i, j, k, l]) > tol:
                        emit(ints.v[i, j, k, l], i + 1, j + 1, k + 1, l + 1)
    for i in range(n):
        for j in range(i + 1):
            if abs(ints.h[i, j]) > tol:
                emit(ints.h[i, j], i + 1, j + 1, 0, 0)
    emit(ints.e_nuc, 0, 0, 0, 0)
    return "\n".join(lines) + "\n"


def load_fcidump(path) -> IntegralSet:
    with open(path) as fh:
        return parse_fcidump(fh.read())


def build_active_hamiltonian(ints: IntegralSet, cas: ActiveSpace) -> ActiveHamiltonian:
    """Fold the closed-shell core into a constant and an effective one-electron
    operator; restrict the two-electron tensor to the active indices."""
    cas.validate(ints.n_orb)
    core = list(cas.core)
    act = list(cas.active)
    e_const = ints.e_nuc
    for i in core:
        e_const += 2.0 * ints.h[i, i]
        for j in core:
            e_const += 2.0 * ints.v[i, i, j, j] - ints.v[i, j, j, i]
    h_eff = ints.h[np.ix_(act, act)].copy()
    for a, t in enumerate(act):
        for b, u in enumerate(act):
            for i in core:
                h_eff[a, b] += 2.0 * ints.v[t, u, i, i] - ints.v[t, i, i, u]
    v_act = ints.v[np.ix_(act, act, act, act)].copy()
    return ActiveHamiltonian(e_const, h_eff, v_act)


def active_to_fermion(ah: ActiveHamiltonian) -> FermionOperator:
    """Spin-orbital second-quantized operator for the active space, including
    the scalar core energy. Interleaved mode ordering (alpha at 2i)."""
    m = ah.n_active
    op = FermionOperator(2 * m)
    if ah.e_const != 0.0:
        op.add_term(ah.e_const, ())
    for t in range(m):
        for u in range(m):
            if abs(ah.h_eff[t, u]) < 1e-14:
                continue
            for spin in (0, 1):
                op.add_term(ah.h_eff[t, u], ((2 * t + spin, True), (2 * u + spin, False)))
    for t in range(m):
        for u in range(m):
            for vv in range(m):
                for w in range(m):
                    coeff = 0.5 * ah.v_act[t, u, vv, w]
                    if abs(coeff) < 1e-14:
                        continue
                    for sig in (0, 1):
                        for tau in (0, 1):
                            p, q = 2 * t + sig, 2 * vv + tau
                            s, r = 2 * w + tau, 2 * u + sig
                            if p == q or s == r:
                                continue
                            op.add_term(coeff, ((p, True), (q, True), (s, False), (r, False)))
    return op
