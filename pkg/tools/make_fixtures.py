#!/usr/bin/env python3
"""Generate the FCIDUMP fixtures shipped under fixtures/.

Molecular integrals come from a small McMurchie-Davidson engine (s and p
Cartesian Gaussians, Boys function via scipy) followed by RHF (ethylene) or
Roothaan ROHF (H3) and a MO transform. This is dev-time tooling: the package
itself only ever ingests the FCIDUMP files.

Usage:
    python3 tools/make_fixtures.py selftest          # H2/STO-3G reference check
    python3 tools/make_fixtures.py explore           # scan tables for grid choice
    python3 tools/make_fixtures.py generate          # write fixtures/*.fcidump
"""

import math
import sys
from functools import lru_cache
from pathlib import Path

import numpy as np
import scipy.linalg
import scipy.sparse as sp
from scipy.special import gammainc, gammaln

sys.path.insert(0, str(Path(__file__).resolve().parent.parent / "src"))

from vqecasscf.chem_io import IntegralSet, write_fcidump  # noqa: E402

BOHR_PER_ANGSTROM = 1.8897259886

# exponents / contraction coefficients, EMSL standard values
STO3G_H = [("S", [(3.42525091, 0.15432897), (0.62391373, 0.53532814), (0.16885540, 0.44463454)])]
STO3G_C = [
    ("S", [(71.6168370, 0.15432897), (13.0450960, 0.53532814), (3.5305122, 0.44463454)]),
    ("S", [(2.9412494, -0.09996723), (0.6834831, 0.39951283), (0.2222899, 0.70011547)]),
    ("P", [(2.9412494, 0.15591627), (0.6834831, 0.60768372), (0.2222899, 0.39195739)]),
]
G631_H = [
    ("S", [(18.7311370, 0.03349460), (2.8253937, 0.23472695), (0.6401217, 0.81375733)]),
    ("S", [(0.1612778, 1.0)]),
]
# STO-3G plus one loose p per carbon; the extra radial freedom lets the ionic
# (closed-shell-sector) states drop enough to cross the covalent ones along
# the pyramidalization scan, which the bare minimal basis cannot do.
STO3GP_C = STO3G_C + [("P", [(0.25, 1.0)])]

ANGULAR = {"S": [(0, 0, 0)], "P": [(1, 0, 0), (0, 1, 0), (0, 0, 1)]}


def double_factorial(n):
    return 1 if n <= 0 else n * double_factorial(n - 2)


def primitive_norm(a, l, m, n):
    L = l + m + n
    dd = double_factorial(2 * l - 1) * double_factorial(2 * m - 1) * double_factorial(2 * n - 1)
    return (2 * a / math.pi) ** 0.75 * (4 * a) ** (L / 2) / math.sqrt(dd)


class Basis:
    """Flat list of contracted Cartesian Gaussians."""

    def __init__(self):
        self.exps = []     # per function: array of primitive exponents
        self.coefs = []    # per function: normalized contraction coefficients
        self.centers = []
        self.lmn = []

    def add_atom(self, shells, center):
        for shell_type, primitives in shells:
            for lmn in ANGULAR[shell_type]:
                exps = np.array([a for a, _ in primitives])
                coefs = np.array([c * primitive_norm(a, *lmn) for a, c in primitives])
                self.exps.append(exps)
                self.coefs.append(coefs)
                self.centers.append(np.asarray(center, dtype=float))
                self.lmn.append(lmn)
        return self

    def normalize(self):
        for i in range(len(self.exps)):
            s = 0.0
            for a, ca in zip(self.exps[i], self.coefs[i]):
                for b, cb in zip(self.exps[i], self.coefs[i]):
                    s += ca * cb * _overlap_prim(a, self.lmn[i], self.centers[i],
                                                 b, self.lmn[i], self.centers[i])
            self.coefs[i] = self.coefs[i] / math.sqrt(s)
        return self

    def __len__(self):
        return len(self.exps)


def boys(nmax, x):
    """F_0..F_nmax via downward recursion from the incomplete gamma form."""
    out = np.empty(nmax + 1)
    if x < 1e-13:
        for m in range(nmax + 1):
            out[m] = 1.0 / (2 * m + 1)
        return out
    a = nmax + 0.5
    out[nmax] = 0.5 * math.exp(gammaln(a)) * gammainc(a, x) / x**a
    ex = math.exp(-x)
    for m in range(nmax - 1, -1, -1):
        out[m] = (2 * x * out[m + 1] + ex) / (2 * m + 1)
    return out


@lru_cache(maxsize=1 << 20)
def _E(i, j, t, Qx, a, b):
    """Hermite expansion coefficient of x^i_A x^j_B in the overlap Gaussian."""
    p = a + b
    q = a * b / p
    if t < 0 or t > i + j:
        return 0.0
    if i == j == t == 0:
        return math.exp(-q * Qx * Qx)
    if j == 0:
        return (_E(i - 1, j, t - 1, Qx, a, b) / (2 * p)
                - q * Qx / a * _E(i - 1, j, t, Qx, a, b)
                + (t + 1) * _E(i - 1, j, t + 1, Qx, a, b))
    return (_E(i, j - 1, t - 1, Qx, a, b) / (2 * p)
            + q * Qx / b * _E(i, j - 1, t, Qx, a, b)
            + (t + 1) * _E(i, j - 1, t + 1, Qx, a, b))


def _overlap_prim(a, lmn1, A, b, lmn2, B):
    p = a + b
    s = (math.pi / p) ** 1.5
    for k in range(3):
        s *= _E(lmn1[k], lmn2[k], 0, A[k] - B[k], a, b)
    return s


def _kinetic_prim(a, lmn1, A, b, lmn2, B):
    l2, m2, n2 = lmn2
    term0 = b * (2 * (l2 + m2 + n2) + 3) * _overlap_prim(a, lmn1, A, b, lmn2, B)
    term1 = -2 * b**2 * (
        _overlap_prim(a, lmn1, A, b, (l2 + 2, m2, n2), B)
        + _overlap_prim(a, lmn1, A, b, (l2, m2 + 2, n2), B)
        + _overlap_prim(a, lmn1, A, b, (l2, m2, n2 + 2), B)
    )
    term2 = -0.5 * (
        l2 * (l2 - 1) * _overlap_prim(a, lmn1, A, b, (l2 - 2, m2, n2), B)
        + m2 * (m2 - 1) * _overlap_prim(a, lmn1, A, b, (l2, m2 - 2, n2), B)
        + n2 * (n2 - 1) * _overlap_prim(a, lmn1, A, b, (l2, m2, n2 - 2), B)
    )
    return term0 + term1 + term2


def _hermite_coulomb(t, u, v, n, p, PC, boys_table):
    if t == u == v == 0:
        return (-2 * p) ** n * boys_table[n]
    if t > 0:
        val = PC[0] * _hermite_coulomb(t - 1, u, v, n + 1, p, PC, boys_table)
        if t > 1:
            val += (t - 1) * _hermite_coulomb(t - 2, u, v, n + 1, p, PC, boys_table)
        return val
    if u > 0:
        val = PC[1] * _hermite_coulomb(t, u - 1, v, n + 1, p, PC, boys_table)
        if u > 1:
            val += (u - 1) * _hermite_coulomb(t, u - 2, v, n + 1, p, PC, boys_table)
        return val
    val = PC[2] * _hermite_coulomb(t, u, v - 1, n + 1, p, PC, boys_table)
    if v > 1:
        val += (v - 1) * _hermite_coulomb(t, u, v - 2, n + 1, p, PC, boys_table)
    return val


def _nuclear_prim(a, lmn1, A, b, lmn2, B, C):
    p = a + b
    P = (a * np.asarray(A) + b * np.asarray(B)) / p
    PC = P - np.asarray(C)
    lmax = sum(lmn1) + sum(lmn2)
    table = boys(lmax, p * float(PC @ PC))
    val = 0.0
    for t in range(lmn1[0] + lmn2[0] + 1):
        Ex = _E(lmn1[0], lmn2[0], t, A[0] - B[0], a, b)
        for u in range(lmn1[1] + lmn2[1] + 1):
            Ey = _E(lmn1[1], lmn2[1], u, A[1] - B[1], a, b)
            for v in range(lmn1[2] + lmn2[2] + 1):
                Ez = _E(lmn1[2], lmn2[2], v, A[2] - B[2], a, b)
                val += Ex * Ey * Ez * _hermite_coulomb(t, u, v, 0, p, PC, table)
    return 2 * math.pi / p * val


def _eri_prim(a, lmn1, A, b, lmn2, B, c, lmn3, C, d, lmn4, D):
    p = a + b
    q = c + d
    alpha = p * q / (p + q)
    P = (a * np.asarray(A) + b * np.asarray(B)) / p
    Q = (c * np.asarray(C) + d * np.asarray(D)) / q
    PQ = P - Q
    lmax = sum(lmn1) + sum(lmn2) + sum(lmn3) + sum(lmn4)
    table = boys(lmax, alpha * float(PQ @ PQ))
    val = 0.0
    for t in range(lmn1[0] + lmn2[0] + 1):
        E1x = _E(lmn1[0], lmn2[0], t, A[0] - B[0], a, b)
        for u in range(lmn1[1] + lmn2[1] + 1):
            E1y = _E(lmn1[1], lmn2[1], u, A[1] - B[1], a, b)
            for v in range(lmn1[2] + lmn2[2] + 1):
                E1z = _E(lmn1[2], lmn2[2], v, A[2] - B[2], a, b)
                e1 = E1x * E1y * E1z
                if e1 == 0.0:
                    continue
                for tau in range(lmn3[0] + lmn4[0] + 1):
                    E2x = _E(lmn3[0], lmn4[0], tau, C[0] - D[0], c, d)
                    for nu in range(lmn3[1] + lmn4[1] + 1):
                        E2y = _E(lmn3[1], lmn4[1], nu, C[1] - D[1], c, d)
                        for phi in range(lmn3[2] + lmn4[2] + 1):
                            E2z = _E(lmn3[2], lmn4[2], phi, C[2] - D[2], c, d)
                            e2 = E2x * E2y * E2z
                            if e2 == 0.0:
                                continue
                            val += e1 * e2 * (-1) ** (tau + nu + phi) * _hermite_coulomb(
                                t + tau, u + nu, v + phi, 0, alpha, PQ, table)
    return 2 * math.pi**2.5 / (p * q * math.sqrt(p + q)) * val


def _contracted(fn, basis, indices, *extra):
    idx = list(indices)
    total = 0.0
    for combo in np.ndindex(*[len(basis.exps[i]) for i in idx]):
        coeff = 1.0
        args = []
        for which, (i, k) in enumerate(zip(idx, combo)):
            coeff *= basis.coefs[i][k]
            args.extend([basis.exps[i][k], basis.lmn[i], basis.centers[i]])
        total += coeff * fn(*args, *extra)
    return total


def one_electron_integrals(basis, charges, coords):
    n = len(basis)
    S = np.zeros((n, n))
    T = np.zeros((n, n))
    V = np.zeros((n, n))
    for i in range(n):
        for j in range(i + 1):
            S[i, j] = S[j, i] = _contracted(_overlap_prim, basis, (i, j))
            T[i, j] = T[j, i] = _contracted(_kinetic_prim, basis, (i, j))
            v = 0.0
            for Z, R in zip(charges, coords):
                v -= Z * _contracted(_nuclear_prim, basis, (i, j), R)
            V[i, j] = V[j, i] = v
    return S, T, V


def two_electron_integrals(basis):
    n = len(basis)
    eri = np.zeros((n, n, n, n))
    pair = lambda i, j: i * (i + 1) // 2 + j
    for i in range(n):
        for j in range(i + 1):
            ij = pair(i, j)
            for k in range(i + 1):
                for l in range(k + 1):
                    if pair(k, l) > ij:
                        continue
                    val = _contracted(_eri_prim, basis, (i, j, k, l))
                    for a, b in ((i, j), (j, i)):
                        for c, d in ((k, l), (l, k)):
                            eri[a, b, c, d] = val
                            eri[c, d, a, b] = val
    return eri


def nuclear_repulsion(charges, coords):
    e = 0.0
    for i in range(len(charges)):
        for j in range(i):
            e += charges[i] * charges[j] / np.linalg.norm(coords[i] - coords[j])
    return e


def _diis_extrapolate(fock_list, err_list):
    m = len(fock_list)
    B = -np.ones((m + 1, m + 1))
    B[m, m] = 0.0
    for i in range(m):
        for j in range(m):
            B[i, j] = np.sum(err_list[i] * err_list[j])
    rhs = np.zeros(m + 1)
    rhs[m] = -1.0
    try:
        w = np.linalg.solve(B, rhs)[:m]
    except np.linalg.LinAlgError:
        return fock_list[-1]
    return sum(wi * f for wi, f in zip(w, fock_list))


def rhf(S, h, eri, n_occ, max_iter=300, tol=1e-10, level_shift=0.0):
    n = h.shape[0]
    X = scipy.linalg.fractional_matrix_power(S, -0.5).real
    eps, C = scipy.linalg.eigh(h, S)
    focks, errs = [], []
    e_old = 0.0
    for it in range(max_iter):
        D = C[:, :n_occ] @ C[:, :n_occ].T
        J = np.einsum("pqrs,rs->pq", eri, D)
        K = np.einsum("prqs,rs->pq", eri, D)
        F = h + 2 * J - K
        e_elec = np.sum(D * (h + F))
        err = X.T @ (F @ D @ S - S @ D @ F) @ X
        focks.append(F)
        errs.append(err)
        if len(focks) > 8:
            focks.pop(0)
            errs.pop(0)
        if np.max(np.abs(err)) < tol and abs(e_elec - e_old) < tol and it > 1:
            return e_elec, C, True
        e_old = e_elec
        F_use = _diis_extrapolate(focks, errs) if it > 0 else F
        if level_shift:
            # S - S D S projects onto the virtual space: shifts virtuals up
            F_use = F_use + level_shift * (S - S @ D @ S)
        eps, C = scipy.linalg.eigh(F_use, S)
    return e_elec, C, False


def rohf(S, h, eri, n_closed, n_open, max_iter=400, tol=1e-10):
    """Roothaan single-matrix ROHF for a high-spin open shell."""
    n = h.shape[0]
    eps, C = scipy.linalg.eigh(h, S)
    e_old = 0.0
    for it in range(max_iter):
        Ca = C[:, : n_closed + n_open]
        Cb = C[:, :n_closed]
        Da = Ca @ Ca.T
        Db = Cb @ Cb.T
        Jt = np.einsum("pqrs,rs->pq", eri, Da + Db)
        Ka = np.einsum("prqs,rs->pq", eri, Da)
        Kb = np.einsum("prqs,rs->pq", eri, Db)
        Fa = h + Jt - Ka
        Fb = h + Jt - Kb
        e_elec = 0.5 * (np.sum(Da * (h + Fa)) + np.sum(Db * (h + Fb)))
        # Roothaan effective Fock in the current MO basis
        Fc = 0.5 * (Fa + Fb)
        Fa_mo = C.T @ Fa @ C
        Fb_mo = C.T @ Fb @ C
        Fc_mo = C.T @ Fc @ C
        R = Fc_mo.copy()
        c_slice = slice(0, n_closed)
        o_slice = slice(n_closed, n_closed + n_open)
        v_slice = slice(n_closed + n_open, n)
        R[c_slice, o_slice] = Fb_mo[c_slice, o_slice]
        R[o_slice, c_slice] = Fb_mo[o_slice, c_slice]
        R[o_slice, v_slice] = Fa_mo[o_slice, v_slice]
        R[v_slice, o_slice] = Fa_mo[v_slice, o_slice]
        if abs(e_elec - e_old) < tol and it > 3:
            return e_elec, C, True
        e_old = e_elec
        _, U = np.linalg.eigh(R)
        C = C @ U
    return e_elec, C, False


def mo_transform(h, eri, C):
    h_mo = C.T @ h @ C
    tmp = np.einsum("pqrs,pa->aqrs", eri, C, optimize=True)
    tmp = np.einsum("aqrs,qb->abrs", tmp, C, optimize=True)
    tmp = np.einsum("abrs,rc->abcs", tmp, C, optimize=True)
    eri_mo = np.einsum("abcs,sd->abcd", tmp, C, optimize=True)
    return h_mo, eri_mo


# --- geometries (angstrom in, bohr out) ---

def h3_geometry(z):
    coords = np.array([[-0.409, 0.0, 0.0], [0.409, 0.0, 0.0], [0.0, 0.0, z]])
    return coords * BOHR_PER_ANGSTROM


def ethylene_geometry(theta_deg, cc=1.33, ch=1.09, hch_deg=116.36):
    gamma = math.radians(hch_deg / 2)
    theta = math.radians(theta_deg)
    c1 = np.zeros(3)
    c2 = np.array([0.0, 0.0, cc])
    h1a = ch * np.array([math.sin(gamma), 0.0, -math.cos(gamma)])
    h1b = ch * np.array([-math.sin(gamma), 0.0, -math.cos(gamma)])

    def rot_x(vec):
        x, y, z_ = vec
        return np.array([x, y * math.cos(theta) - z_ * math.sin(theta),
                         y * math.sin(theta) + z_ * math.cos(theta)])

    h2a = c2 + rot_x(ch * np.array([0.0, math.sin(gamma), math.cos(gamma)]))
    h2b = c2 + rot_x(ch * np.array([0.0, -math.sin(gamma), math.cos(gamma)]))
    coords = np.vstack([c1, c2, h1a, h1b, h2a, h2b])
    return coords * BOHR_PER_ANGSTROM


def h3_integrals(z):
    coords = h3_geometry(z)
    charges = [1.0, 1.0, 1.0]
    basis = Basis()
    for c in coords:
        basis.add_atom(G631_H, c)
    basis.normalize()
    S, T, V = one_electron_integrals(basis, charges, coords)
    eri = two_electron_integrals(basis)
    e_elec, C, ok = rohf(S, T + V, eri, n_closed=1, n_open=1)
    if not ok:
        raise RuntimeError(f"ROHF failed to converge at z={z}")
    C = symmetrize_active(C, basis, S, axis=0, active=(0, 1, 2))
    e_nuc = nuclear_repulsion(charges, coords)
    h_mo, eri_mo = mo_transform(T + V, eri, C)
    return IntegralSet(len(basis), e_nuc, h_mo, eri_mo, n_elec=3, ms2=1), C, basis, e_elec + e_nuc


def ethylene_integrals(theta_deg):
    coords = ethylene_geometry(theta_deg)
    charges = [6.0, 6.0, 1.0, 1.0, 1.0, 1.0]
    basis = Basis()
    basis.add_atom(STO3GP_C, coords[0])
    basis.add_atom(STO3GP_C, coords[1])
    for c in coords[2:]:
        basis.add_atom(STO3G_H, c)
    basis.normalize()
    S, T, V = one_electron_integrals(basis, charges, coords)
    eri = two_electron_integrals(basis)
    e_elec, C, ok = rhf(S, T + V, eri, n_occ=8, level_shift=0.0)
    if not ok:
        e_elec, C, ok = rhf(S, T + V, eri, n_occ=8, level_shift=0.3)
    if not ok:
        raise RuntimeError(f"RHF failed to converge at theta={theta_deg}")
    C = symmetrize_active(C, basis, S, axis=0, active=(7, 8))
    e_nuc = nuclear_repulsion(charges, coords)
    h_mo, eri_mo = mo_transform(T + V, eri, C)
    return IntegralSet(len(basis), e_nuc, h_mo, eri_mo, n_elec=16, ms2=0), C, basis, e_elec + e_nuc, S


def mirror_cross(basis, axis):
    """AO matrix <chi_i | sigma chi_j> for the reflection axis -> -axis."""
    n = len(basis)
    reflected = Basis()
    for i in range(n):
        center = basis.centers[i].copy()
        center[axis] *= -1
        reflected.exps.append(basis.exps[i])
        sign = -1.0 if basis.lmn[i][axis] % 2 else 1.0
        reflected.coefs.append(basis.coefs[i] * sign)
        reflected.centers.append(center)
        reflected.lmn.append(basis.lmn[i])
    cross = np.zeros((n, n))
    for i in range(n):
        for j in range(n):
            total = 0.0
            for a, ca in zip(basis.exps[i], basis.coefs[i]):
                for b, cb in zip(reflected.exps[j], reflected.coefs[j]):
                    total += ca * cb * _overlap_prim(a, basis.lmn[i], basis.centers[i],
                                                     b, reflected.lmn[j], reflected.centers[j])
            cross[i, j] = total
    return cross


def mirror_parity(C, basis, S, axis):
    """Orbital parities under reflection axis -> -axis (overlap-weighted)."""
    cross = mirror_cross(basis, axis)
    return np.einsum("pi,pq,qi->i", C, cross, C)


def symmetrize_active(C, basis, S, axis, active):
    """Rotate the active MOs among themselves so each is a mirror eigenstate.

    Active-active rotations leave the CASCI spectrum invariant, so this only
    cleans up symmetry-broken SCF solutions at (near-)degenerate geometries.
    Columns are reordered to best overlap the original ones.
    """
    cross = mirror_cross(basis, axis)
    act = list(active)
    sub = C[:, act]
    M = sub.T @ cross @ sub
    _, U = np.linalg.eigh(M)
    rotated = sub @ U
    overlap = np.abs(rotated.T @ S @ sub)
    order = [-1] * len(act)
    used = set()
    for _ in act:
        i, j = np.unravel_index(np.argmax(overlap), overlap.shape)
        order[j] = i
        used.add(i)
        overlap[i, :] = -1
        overlap[:, j] = -1
    C = C.copy()
    C[:, act] = rotated[:, order]
    return C


# --- CASCI oracle for validation (determinant basis, independent of package) ---

def _annihilator(n_modes, j):
    dim = 1 << n_modes
    rows, cols, data = [], [], []
    for b in range(dim):
        if (b >> j) & 1:
            sign = (-1) ** bin(b & ((1 << j) - 1)).count("1")
            rows.append(b ^ (1 << j))
            cols.append(b)
            data.append(float(sign))
    return sp.csr_matrix((data, (rows, cols)), shape=(dim, dim))


def casci_eigs(e_const, h, v, n_alpha, n_beta, k=4):
    m = h.shape[0]
    n_modes = 2 * m
    dim = 1 << n_modes
    E = {}
    for t in range(m):
        for u in range(m):
            op = sp.csr_matrix((dim, dim))
            for spin in (0, 1):
                op = op + _annihilator(n_modes, 2 * t + spin).T @ _annihilator(n_modes, 2 * u + spin)
            E[t, u] = op
    H = e_const * sp.identity(dim, format="csr")
    for t in range(m):
        for u in range(m):
            if h[t, u]:
                H = H + h[t, u] * E[t, u]
            for vv in range(m):
                for w in range(m):
                    c = 0.5 * v[t, u, vv, w]
                    if c == 0.0:
                        continue
                    H = H + c * (E[t, u] @ E[vv, w])
                    if u == vv:
                        H = H - c * E[t, w]
    idx = [b for b in range(dim)
           if sum((b >> q) & 1 for q in range(0, n_modes, 2)) == n_alpha
           and sum((b >> q) & 1 for q in range(1, n_modes, 2)) == n_beta]
    block = H[np.ix_(idx, idx)].toarray()
    vals, vecs = np.linalg.eigh(block)
    return vals[:k], vecs[:, :k], idx


def mirror_label_of_state(vec, idx, odd_orbital, m):
    """Mirror eigenvalue of a CASCI eigenvector from its determinant support."""
    parities = []
    for amp, b in zip(vec, idx):
        if abs(amp) > 1e-8:
            n_odd = ((b >> (2 * odd_orbital)) & 1) + ((b >> (2 * odd_orbital + 1)) & 1)
            parities.append((-1) ** n_odd)
    return parities[0] if len(set(parities)) == 1 else 0


def cmd_selftest():
    # Szabo-Ostlund H2/STO-3G at R = 1.4 bohr: E_HF = -1.1167 Ha
    coords = np.array([[0.0, 0.0, 0.0], [0.0, 0.0, 1.4]])
    charges = [1.0, 1.0]
    basis = Basis()
    for c in coords:
        basis.add_atom(STO3G_H, c)
    basis.normalize()
    S, T, V = one_electron_integrals(basis, charges, coords)
    eri = two_electron_integrals(basis)
    e_elec, C, ok = rhf(S, T + V, eri, n_occ=1)
    e_tot = e_elec + nuclear_repulsion(charges, coords)
    print(f"H2/STO-3G  S12={S[0, 1]:.4f} (ref 0.6593)  (11|11)={eri[0, 0, 0, 0]:.4f} (ref 0.7746)")
    print(f"H2/STO-3G  E_HF={e_tot:.4f} Ha (ref -1.1167), converged={ok}")
    assert abs(S[0, 1] - 0.6593) < 2e-4
    assert abs(eri[0, 0, 0, 0] - 0.7746) < 2e-4
    assert abs(e_tot - (-1.1167)) < 2e-4
    # full CI in the minimal basis: E_corr = -0.0206 below RHF (Szabo table 4.7)
    h_mo, eri_mo = mo_transform(T + V, eri, C)
    vals, _, _ = casci_eigs(nuclear_repulsion(charges, coords), h_mo, eri_mo, 1, 1, k=1)
    print(f"H2/STO-3G  E_FCI={vals[0]:.4f} Ha (ref -1.1373)")
    assert abs(vals[0] - (-1.1373)) < 2e-4
    print("selftest OK")


H3_Z_EQUILATERAL = 0.818 * math.sqrt(3) / 2  # 0.70840...
H3_Z_GRID = [0.40, 0.45, 0.50, 0.55, 0.60, 0.65, round(H3_Z_EQUILATERAL, 3)]
# chosen from the explore table: one clean CASCI(HF) sector crossing at 40-50 deg
ETHYLENE_THETA_GRID = [20, 30, 40, 50, 60, 70, 80, 90]


def cmd_explore():
    print("# H3 CAS(3e,3o) in 6-31G: lowest sector energies per z")
    for z in H3_Z_GRID:
        zval = H3_Z_EQUILATERAL if abs(z - 0.708) < 1e-9 else z
        ints, C, basis, e_hf = h3_integrals(zval)
        vals, vecs, idx = casci_eigs(ints.e_nuc, ints.h[:3, :3], ints.v[:3, :3, :3, :3], 2, 1, k=3)
        labels = [mirror_label_of_state(vecs[:, i], idx, 1, 3) for i in range(3)]
        print(f"z={z:6.3f}  E_HF={e_hf: .6f}  E0={vals[0]: .6f}({labels[0]:+d}) "
              f"E1={vals[1]: .6f}({labels[1]:+d})  gap={vals[1] - vals[0]:.6f}")
    print("# ethylene CAS(2e,2o) in STO-3G: sector energies per theta (mirror = x -> -x)")
    for theta in range(10, 115, 10):
        try:
            ints, C, basis, e_hf, S = ethylene_integrals(theta)
        except RuntimeError as err:
            print(f"theta={theta}: {err}")
            continue
        par = mirror_parity(C, basis, S, axis=0)
        odd_active = 0 if par[7] < 0 else 1
        vals, vecs, idx = casci_eigs(*_fold_ethylene(ints), 1, 1, k=4)
        labels = [mirror_label_of_state(vecs[:, i], idx, odd_active, 2) for i in range(4)]
        e_even = min(v for v, lab in zip(vals, labels) if lab == +1)
        e_odd = min(v for v, lab in zip(vals, labels) if lab == -1)
        print(f"theta={theta:5.1f}  E_HF={e_hf: .6f}  par(act)={par[7]:+.2f},{par[8]:+.2f}  "
              f"E_A'={e_even: .6f}  E_A''={e_odd: .6f}  diff={e_even - e_odd:+.6f}")


def _fold_ethylene(ints):
    core = list(range(7))
    act = [7, 8]
    e = ints.e_nuc
    for i in core:
        e += 2 * ints.h[i, i]
        for j in core:
            e += 2 * ints.v[i, i, j, j] - ints.v[i, j, j, i]
    h_eff = ints.h[np.ix_(act, act)].copy()
    for a, t in enumerate(act):
        for b, u in enumerate(act):
            for i in core:
                h_eff[a, b] += 2 * ints.v[t, u, i, i] - ints.v[t, i, i, u]
    return e, h_eff, ints.v[np.ix_(act, act, act, act)]


def cmd_generate(out_dir):
    out_dir.mkdir(parents=True, exist_ok=True)
    for z in H3_Z_GRID:
        zval = H3_Z_EQUILATERAL if abs(z - 0.708) < 1e-9 else z
        ints, C, basis, e_hf = h3_integrals(zval)
        path = out_dir / f"h3_z{z:.3f}.fcidump"
        path.write_text(write_fcidump(ints))
        print(f"wrote {path}  (E_HF={e_hf:.6f})")
    for theta in ETHYLENE_THETA_GRID:
        ints, C, basis, e_hf, S = ethylene_integrals(theta)
        par = mirror_parity(C, basis, S, axis=0)
        if not (par[7] < -0.99 and par[8] > 0.99) and not (par[7] > 0.99 and par[8] < -0.99):
            raise RuntimeError(f"theta={theta}: active orbitals are not mirror-pure: {par[7]:.3f} {par[8]:.3f}")
        path = out_dir / f"c2h4_theta{theta:.0f}.fcidump"
        path.write_text(write_fcidump(ints))
        print(f"wrote {path}  (E_HF={e_hf:.6f}, active parities {par[7]:+.2f} {par[8]:+.2f})")


def cmd_check_h3_orbitals():
    """Mirror purity of the H3 active orbitals (x -> -x swaps the fixed pair)."""
    for z in H3_Z_GRID:
        zval = H3_Z_EQUILATERAL if abs(z - 0.708) < 1e-9 else z
        ints, C, basis, e_hf = h3_integrals(zval)
        coords = h3_geometry(zval)
        S, _, _ = one_electron_integrals(basis, [1.0] * 3, coords)
        par = mirror_parity(C, basis, S, axis=0)
        print(f"z={z:6.3f}  parities {par[0]:+.3f} {par[1]:+.3f} {par[2]:+.3f}")


if __name__ == "__main__":
    cmd = sys.argv[1] if len(sys.argv) > 1 else "selftest"
    if cmd == "selftest":
        cmd_selftest()
    elif cmd == "explore":
        cmd_explore()
    elif cmd == "check-h3":
        cmd_check_h3_orbitals()
    elif cmd == "generate":
        cmd_generate(Path(__file__).resolve().parent.parent / "fixtures")
    else:
        raise SystemExit(f"unknown command {cmd}")
