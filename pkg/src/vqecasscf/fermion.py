"""Second-quantized operators and fermion-to-qubit encodings (Jordan-Wigner,
parity, Bravyi-Kitaev) with Z2 symmetry reduction.

All three encodings are linear over GF(2): the qubit configuration is b = A n
(mod 2) for an invertible binary matrix A acting on the mode-occupation vector
n. Ladder operators then factor into an X-type flip on the column support of
A, a Z-type parity factor, and a Z-type occupation projector, which covers
Jordan-Wigner (A = I), parity (A = lower-triangular ones), and Bravyi-Kitaev
(the standard recursive matrix) uniformly.

Spin-orbital ordering is interleaved: alpha of spatial orbital i sits at mode
2i, beta at mode 2i+1.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .pauli import PauliString, PauliSum, pauli_mul

SCHEMES = ("jordan_wigner", "parity", "bravyi_kitaev")

IMAG_RESIDUE_TOL = 1e-12


class FermionOperator:
    """Linear combination of ladder-operator products.

    terms: list of (coefficient, ops) where ops is a tuple of
    (mode index, is_creation) applied left to right as written, e.g.
    (0.5, ((1, True), (0, False))) is 0.5 * a1^dag a0. An empty ops tuple is
    the identity (scalar term). Normal ordering is not required.
    """

    def __init__(self, n_modes: int, terms=()):
        self.n_modes = n_modes
        self.terms = []
        for coeff, ops in terms:
            ops = tuple((int(m), bool(c)) for m, c in ops)
            for mode, _ in ops:
                if not 0 <= mode < n_modes:
                    raise ValueError(f"mode {mode} out of range for {n_modes} modes")
            if coeff != 0.0:
                self.terms.append((float(coeff), ops))

    def add_term(self, coeff, ops):
        self.terms.extend(FermionOperator(self.n_modes, [(coeff, ops)]).terms)

    def __add__(self, other):
        if not isinstance(other, FermionOperator) or other.n_modes != self.n_modes:
            return NotImplemented
        return FermionOperator(self.n_modes, self.terms + other.terms)

    def __mul__(self, scalar):
        return FermionOperator(self.n_modes, [(c * scalar, ops) for c, ops in self.terms])

    __rmul__ = __mul__

    def __sub__(self, other):
        return self + other * -1.0

    def dagger(self) -> "FermionOperator":
        flipped = [
            (c, tuple((m, not cre) for m, cre in reversed(ops)))
            for c, ops in self.terms
        ]
        return FermionOperator(self.n_modes, flipped)

    def __len__(self):
        return len(self.terms)


def _gf2_inverse(A: np.ndarray) -> np.ndarray:
    n = A.shape[0]
    M = np.concatenate([A.astype(np.uint8) % 2, np.eye(n, dtype=np.uint8)], axis=1)
    row = 0
    for col in range(n):
        pivot = next((r for r in range(row, n) if M[r, col]), None)
        if pivot is None:
            raise ValueError("encoding matrix is singular over GF(2)")
        M[[row, pivot]] = M[[pivot, row]]
        for r in range(n):
            if r != row and M[r, col]:
                M[r] ^= M[row]
        row += 1
    return M[:, n:]


def _bk_matrix(n: int) -> np.ndarray:
    size = 1
    B = np.ones((1, 1), dtype=np.uint8)
    while size < n:
        top = np.concatenate([B, np.zeros((size, size), dtype=np.uint8)], axis=1)
        low_left = np.zeros((size, size), dtype=np.uint8)
        low_left[-1, :] = 1
        bottom = np.concatenate([low_left, B], axis=1)
        B = np.concatenate([top, bottom], axis=0)
        size *= 2
    return B[:n, :n]


def encoding_matrix(scheme: str, n_modes: int) -> np.ndarray:
    """Binary matrix A with qubit configuration b = A n (mod 2)."""
    if scheme == "jordan_wigner":
        return np.eye(n_modes, dtype=np.uint8)
    if scheme == "parity":
        return np.tril(np.ones((n_modes, n_modes), dtype=np.uint8))
    if scheme == "bravyi_kitaev":
        return _bk_matrix(n_modes)
    raise ValueError(f"unknown encoding scheme {scheme!r}")


def _vec_to_mask(vec) -> int:
    return int(sum(1 << i for i, bit in enumerate(vec) if bit))


def _mask_to_vec(mask: int, n: int) -> np.ndarray:
    return np.array([(mask >> i) & 1 for i in range(n)], dtype=np.uint8)


@dataclass(frozen=True)
class TaperInfo:
    """Z2 reduction data: Z-type symmetry strings in reduced form (string k has
    Z at its pivot qubit and identity at every other pivot), the occupation
    masks they measure the parity of, the chosen sector eigenvalues, and the
    pivot qubits that get removed."""

    symmetries: tuple
    mode_masks: tuple
    sectors: tuple
    removed: tuple


@dataclass(frozen=True)
class EncodingSpec:
    scheme: str
    n_modes: int
    taper: TaperInfo | None = None

    def __post_init__(self):
        if self.scheme not in SCHEMES:
            raise ValueError(f"unknown encoding scheme {self.scheme!r}")
        if self.taper is not None:
            removed = self.taper.removed
            if len(set(removed)) != len(removed) or any(q >= self.n_modes for q in removed):
                raise ValueError("removed qubit indices must be distinct and in range")

    @property
    def n_qubits(self) -> int:
        return self.n_modes - (len(self.taper.removed) if self.taper else 0)


def make_encoding(scheme: str, n_modes: int, n_alpha: int | None = None,
                  n_beta: int | None = None, taper: bool = False) -> EncodingSpec:
    """Build an EncodingSpec; with taper=True the total-number and alpha-spin
    parity strings are reduced and the sector is fixed by (n_alpha, n_beta)."""
    if not taper:
        return EncodingSpec(scheme, n_modes)
    if n_alpha is None or n_beta is None:
        raise ValueError("tapering needs the electron counts to fix the sector")
    A_inv = _gf2_inverse(encoding_matrix(scheme, n_modes))
    total_mask = (1 << n_modes) - 1
    alpha_mask = sum(1 << m for m in range(0, n_modes, 2))
    hf_mask = hf_occupation_mask(n_modes, n_alpha, n_beta)

    rows = []
    for mode_mask in (total_mask, alpha_mask):
        zvec = _mask_to_vec(mode_mask, n_modes) @ A_inv % 2
        zmask = _vec_to_mask(zvec)
        sector = 1 if bin(mode_mask & hf_mask).count("1") % 2 == 0 else -1
        rows.append([zmask, mode_mask, sector])

    # GF(2) row reduction so each symmetry owns one pivot qubit (highest bit)
    pivots = []
    for k, row in enumerate(rows):
        pivot = row[0].bit_length() - 1
        if pivot < 0:
            raise ValueError("dependent symmetry strings")
        pivots.append(pivot)
        for j, other in enumerate(rows):
            if j != k and (other[0] >> pivot) & 1:
                other[0] ^= row[0]
                other[1] ^= row[1]
                other[2] *= row[2]
    order = np.argsort(pivots)
    info = TaperInfo(
        symmetries=tuple(PauliString(n_modes, 0, rows[k][0]) for k in order),
        mode_masks=tuple(rows[k][1] for k in order),
        sectors=tuple(rows[k][2] for k in order),
        removed=tuple(pivots[k] for k in order),
    )
    return EncodingSpec(scheme, n_modes, info)


def hf_occupation_mask(n_modes: int, n_alpha: int, n_beta: int) -> int:
    """Aufbau reference determinant as a mode-occupation bit mask."""
    mask = 0
    for i in range(n_alpha):
        mask |= 1 << (2 * i)
    for i in range(n_beta):
        mask |= 1 << (2 * i + 1)
    if mask >> n_modes:
        raise ValueError("electron count exceeds mode count")
    return mask


def _ladder_paulis(spec: EncodingSpec):
    """Per-mode (annihilator, creator) as {PauliString: complex} maps."""
    n = spec.n_modes
    A = encoding_matrix(spec.scheme, n)
    A_inv = _gf2_inverse(A)
    ops = []
    for j in range(n):
        flip = PauliString(n, x_mask=_vec_to_mask(A[:, j]))
        below = np.zeros(n, dtype=np.uint8)
        below[:j] = 1
        parity = PauliString(n, z_mask=_vec_to_mask(below @ A_inv % 2))
        occ = PauliString(n, z_mask=_vec_to_mask(A_inv[j] % 2))
        phase, base = pauli_mul(flip, parity)
        phase2, base_occ = pauli_mul(base, occ)
        # a_j = F Z(w) (1 - Z(u))/2, a_j^dag = F Z(w) (1 + Z(u))/2
        lower = {base: 0.5 * phase, base_occ: -0.5 * phase * phase2}
        raise_ = {base: 0.5 * phase, base_occ: 0.5 * phase * phase2}
        ops.append((_merge(lower), _merge(raise_)))
    return ops


def _merge(pairs: dict) -> dict:
    return {s: c for s, c in pairs.items() if c != 0}


def _dict_mul(a: dict, b: dict) -> dict:
    out: dict = {}
    for sa, ca in a.items():
        for sb, cb in b.items():
            phase, s = pauli_mul(sa, sb)
            out[s] = out.get(s, 0.0) + phase * ca * cb
    return out


def encode(op: FermionOperator, spec: EncodingSpec) -> PauliSum:
    """Map a fermionic operator to a PauliSum on n_modes qubits (no tapering).

    Imaginary coefficient residues below 1e-12 are dropped; anything larger
    means the input was not Hermitian and raises.
    """
    if op.n_modes != spec.n_modes:
        raise ValueError("operator/encoding mode count mismatch")
    ladder = _ladder_paulis(spec)
    identity = PauliString.identity(spec.n_modes)
    acc: dict = {}
    for coeff, ops in op.terms:
        prod = {identity: complex(coeff)}
        for mode, creation in ops:
            prod = _dict_mul(prod, ladder[mode][1 if creation else 0])
        for string, value in prod.items():
            acc[string] = acc.get(string, 0.0) + value
    worst = max((abs(complex(c).imag) for c in acc.values()), default=0.0)
    if worst > IMAG_RESIDUE_TOL:
        raise ValueError(f"non-Hermitian input: imaginary residue {worst:.3e}")
    return PauliSum(spec.n_modes, {s: complex(c).real for s, c in acc.items()})


def taper_string(string: PauliString, spec: EncodingSpec):
    """Conjugate one string through the tapering Cliffords and substitute the
    sector eigenvalues at the removed qubits. Returns (sign, reduced string)."""
    info = spec.taper
    coeff = 1.0
    for sym, pivot in zip(info.symmetries, info.removed):
        anti = bin(string.x_mask & sym.z_mask).count("1") % 2
        if anti:
            raise ValueError(f"term {string.label()} anticommutes with a symmetry string")
        if (string.z_mask >> pivot) & 1:  # anticommutes with X at the pivot
            x_pivot = PauliString(string.n_qubits, x_mask=1 << pivot)
            p1, tmp = pauli_mul(x_pivot, sym)
            p2, string = pauli_mul(tmp, string)
            phase = p1 * p2
            if abs(complex(phase).imag) > 1e-12:
                raise AssertionError("tapering produced a non-Hermitian term")
            coeff *= complex(phase).real
    for k, pivot in enumerate(info.removed):
        if (string.x_mask >> pivot) & 1:
            coeff *= info.sectors[k]
    kept = [q for q in range(spec.n_modes) if q not in info.removed]
    x = z = 0
    for new_q, q in enumerate(kept):
        x |= ((string.x_mask >> q) & 1) << new_q
        z |= ((string.z_mask >> q) & 1) << new_q
    return coeff, PauliString(len(kept), x, z)


def taper(ham: PauliSum, spec: EncodingSpec) -> PauliSum:
    """Remove the symmetry qubits of spec.taper from a commuting PauliSum."""
    if spec.taper is None or not spec.taper.removed:
        return ham
    if ham.n_qubits != spec.n_modes:
        raise ValueError("operator width does not match the encoding")
    acc: dict = {}
    for string, coeff in ham.terms.items():
        sign, reduced = taper_string(string, spec)
        acc[reduced] = acc.get(reduced, 0.0) + sign * coeff
    return PauliSum(spec.n_qubits, acc)


def encode_and_taper(op: FermionOperator, spec: EncodingSpec) -> PauliSum:
    return taper(encode(op, spec), spec)


def encode_ladder_product(ops, spec: EncodingSpec) -> dict:
    """Raw complex Pauli expansion of a single ladder-operator product.

    Unlike encode() this skips the Hermiticity validation; it exists for
    excitation generators T whose anti-Hermitian combination i(T - T^dag)
    lives entirely in the odd-Y (imaginary-coefficient) strings of T.
    """
    ladder = _ladder_paulis(spec)
    prod = {PauliString.identity(spec.n_modes): 1.0 + 0.0j}
    for mode, creation in ops:
        if not 0 <= mode < spec.n_modes:
            raise ValueError(f"mode {mode} out of range")
        prod = _dict_mul(prod, ladder[mode][1 if creation else 0])
    return prod


def encode_occupation(spec: EncodingSpec, occ_mask: int) -> int:
    """Qubit configuration b = A n for a determinant, before tapering."""
    A = encoding_matrix(spec.scheme, spec.n_modes)
    vec = A @ _mask_to_vec(occ_mask, spec.n_modes) % 2
    return _vec_to_mask(vec)


def tapered_bits(spec: EncodingSpec, occ_mask: int) -> int:
    """Computational-basis label of a determinant in the tapered register."""
    bits = encode_occupation(spec, occ_mask)
    if spec.taper is None:
        return bits
    for mode_mask, sector in zip(spec.taper.mode_masks, spec.taper.sectors):
        parity = bin(mode_mask & occ_mask).count("1") % 2
        if (-1) ** parity != sector:
            raise ValueError("determinant lies outside the chosen symmetry sector")
    out = 0
    new_q = 0
    for q in range(spec.n_modes):
        if q in spec.taper.removed:
            continue
        out |= ((bits >> q) & 1) << new_q
        new_q += 1
    return out


def tapered_basis_occupations(spec: EncodingSpec) -> list:
    """Mode-occupation mask for every tapered computational basis state.

    The removed bits are fixed by the sector eigenvalues, so each tapered
    basis state labels exactly one determinant.
    """
    info = spec.taper
    n = spec.n_modes
    A_inv = _gf2_inverse(encoding_matrix(spec.scheme, n))
    kept = [q for q in range(n) if q not in info.removed]
    out = []
    for idx in range(1 << len(kept)):
        bits = 0
        for pos, q in enumerate(kept):
            bits |= ((idx >> pos) & 1) << q
        for sym, sector, pivot in zip(info.symmetries, info.sectors, info.removed):
            want = 0 if sector == 1 else 1
            have = bin(sym.z_mask & bits & ~(1 << pivot)).count("1") % 2
            bits |= (want ^ have) << pivot
        occ = A_inv @ _mask_to_vec(bits, n) % 2
        out.append(_vec_to_mask(occ))
    return out


def occupation_parity_string(spec: EncodingSpec, modes: list) -> PauliSum:
    """Encoded (and tapered) Z-type operator measuring the occupation parity
    of the given modes; used for spatial-symmetry projectors."""
    A_inv = _gf2_inverse(encoding_matrix(spec.scheme, spec.n_modes))
    mode_mask = 0
    for m in modes:
        mode_mask |= 1 << m
    zvec = _mask_to_vec(mode_mask, spec.n_modes) @ A_inv % 2
    string = PauliString(spec.n_modes, 0, _vec_to_mask(zvec))
    if spec.taper is None:
        return PauliSum(spec.n_modes, {string: 1.0})
    sign, reduced = taper_string(string, spec)
    return PauliSum(spec.n_qubits, {reduced: sign})


def encode_rdm_observables(spec: EncodingSpec, n_active: int) -> list:
    """Hermitian observables for the canonical 1- and 2-RDM elements.

    Keys are ("g", p, q) with p <= q for gamma_pq = <ap^dag aq> and
    ("G", p, q, r, s) with p < q, r < s, (p,q) <= (r,s) for
    Gamma_pqrs = <ap^dag aq^dag as ar>, all in spin-orbital (mode) indices.
    Only spin-conserving elements are emitted; the rest vanish on states with
    definite alpha/beta counts. Real wavefunctions make every element the
    expectation of the returned (T + T^dag)/2 observable.
    """
    if spec.n_modes != 2 * n_active:
        raise ValueError("encoding must have 2 modes per active orbital")
    out = []
    n = spec.n_modes
    for p in range(n):
        for q in range(p, n):
            if p % 2 != q % 2:
                continue
            op = FermionOperator(n, [(0.5, ((p, True), (q, False))),
                                     (0.5, ((q, True), (p, False)))])
            out.append((("g", p, q), encode_and_taper(op, spec)))
    pairs = [(p, q) for p in range(n) for q in range(p + 1, n)]
    for i, (p, q) in enumerate(pairs):
        for r, s in pairs[i:]:
            if (p % 2 + q % 2) != (r % 2 + s % 2):
                continue
            op = FermionOperator(n, [(0.5, ((p, True), (q, True), (s, False), (r, False))),
                                     (0.5, ((r, True), (s, True), (q, False), (p, False)))])
            obs = encode_and_taper(op, spec)
            if len(obs) == 0:
                continue
            out.append((("G", p, q, r, s), obs))
    return out


def assemble_spin_orbital_rdms(values: dict, n_active: int):
    """Symmetry-complete measured canonical elements into full spin-orbital
    gamma (2n x 2n) and Gamma (2n)^4 tensors."""
    n = 2 * n_active
    gamma = np.zeros((n, n))
    Gamma = np.zeros((n, n, n, n))
    for key, value in values.items():
        if key[0] == "g":
            _, p, q = key
            gamma[p, q] = gamma[q, p] = value
        else:
            _, p, q, r, s = key
            for (a, b), sign1 in (((p, q), 1.0), ((q, p), -1.0)):
                for (c, d), sign2 in (((r, s), 1.0), ((s, r), -1.0)):
                    Gamma[a, b, c, d] = sign1 * sign2 * value
                    Gamma[c, d, a, b] = sign1 * sign2 * value
    return gamma, Gamma


def spin_trace_rdms(gamma_so: np.ndarray, Gamma_so: np.ndarray):
    """Spatial 1-RDM and chemists'-order spatial 2-RDM from spin-orbital
    tensors; E = sum h*gamma + 1/2 sum (tu|vw) Gamma[t,u,v,w]."""
    n = gamma_so.shape[0] // 2
    gamma = np.zeros((n, n))
    Gamma = np.zeros((n, n, n, n))
    for t in range(n):
        for u in range(n):
            gamma[t, u] = gamma_so[2 * t, 2 * u] + gamma_so[2 * t + 1, 2 * u + 1]
    for t in range(n):
        for u in range(n):
            for v in range(n):
                for w in range(n):
                    val = 0.0
                    for sig in (0, 1):
                        for tau in (0, 1):
                            val += Gamma_so[2 * t + sig, 2 * v + tau, 2 * u + sig, 2 * w + tau]
                    Gamma[t, u, v, w] = val
    return gamma, Gamma
