import numpy as np
import pytest

from vqecasscf.chem_io import ActiveHamiltonian, active_to_fermion
from vqecasscf.fermion import (
    SCHEMES,
    EncodingSpec,
    FermionOperator,
    assemble_spin_orbital_rdms,
    encode,
    encode_and_taper,
    encode_occupation,
    encode_rdm_observables,
    hf_occupation_mask,
    make_encoding,
    occupation_parity_string,
    spin_trace_rdms,
    taper,
    tapered_basis_occupations,
    tapered_bits,
)
from vqecasscf.pauli import PauliSum, commutes

from oracles import casci_energies, fermion_matrix, random_integrals, sector_masks


def random_hermitian_fermion_op(rng, n_modes, n_terms=4):
    op = FermionOperator(n_modes)
    for _ in range(n_terms):
        length = int(rng.integers(1, 5))
        ops = tuple(
            (int(rng.integers(n_modes)), bool(rng.integers(2))) for _ in range(length)
        )
        coeff = float(rng.normal())
        op.add_term(coeff, ops)
    return op + op.dagger()


def test_number_operator_jw():
    op = FermionOperator(1, [(1.0, ((0, True), (0, False)))])
    ps = encode(op, make_encoding("jordan_wigner", 1))
    assert ps.allclose(PauliSum.from_labels(1, {"I": 0.5, "Z0": -0.5}))


def test_hopping_jw():
    op = FermionOperator(2, [(1.0, ((1, True), (0, False))), (1.0, ((0, True), (1, False)))])
    ps = encode(op, make_encoding("jordan_wigner", 2))
    assert ps.allclose(PauliSum.from_labels(2, {"X1X0": 0.5, "Y1Y0": 0.5}))


def test_non_hermitian_rejected():
    op = FermionOperator(2, [(1.0, ((1, True), (0, False)))])
    with pytest.raises(ValueError, match="non-Hermitian"):
        encode(op, make_encoding("jordan_wigner", 2))


def test_index_overflow_rejected():
    with pytest.raises(ValueError):
        FermionOperator(2, [(1.0, ((2, True), (2, False)))])


@pytest.mark.parametrize("scheme", SCHEMES)
def test_spectrum_preservation_random_ops(scheme):
    rng = np.random.default_rng(17)
    for _ in range(12):
        n_modes = int(rng.integers(1, 4))
        op = random_hermitian_fermion_op(rng, n_modes)
        want = np.sort(np.linalg.eigvalsh(fermion_matrix(op)))
        got = np.sort(np.linalg.eigvalsh(encode(op, make_encoding(scheme, n_modes)).to_matrix()))
        assert np.allclose(want, got, atol=1e-10)


@pytest.mark.parametrize("scheme", SCHEMES)
def test_canonical_anticommutation_relations(scheme):
    # {a_p, a_q^dag} = delta_pq through the encoded matrices; a^dag is
    # reconstructed as (a + a^dag) projected on the unoccupied mode.
    n = 4
    spec = make_encoding(scheme, n)

    def ladder_matrix(mode, creation):
        s = encode(FermionOperator(n, [(1.0, ((mode, True),)), (1.0, ((mode, False),))]), spec).to_matrix()
        n_op = encode(FermionOperator(n, [(1.0, ((mode, True), (mode, False)))]), spec).to_matrix()
        a_dag = s @ (np.eye(s.shape[0]) - n_op)
        return a_dag if creation else a_dag.conj().T

    for p in range(n):
        for q in range(n):
            ap = ladder_matrix(p, False)
            aq_dag = ladder_matrix(q, True)
            anti = ap @ aq_dag + aq_dag @ ap
            want = np.eye(anti.shape[0]) if p == q else np.zeros_like(anti)
            assert np.allclose(anti, want, atol=1e-10)


def _h3_like_active_hamiltonian(rng):
    h, v = random_integrals(rng, 3, scale=0.5)
    return ActiveHamiltonian(0.37, h, v)


def test_parity_encoding_preserves_casci_spectrum():
    rng = np.random.default_rng(23)
    ah = _h3_like_active_hamiltonian(rng)
    op = active_to_fermion(ah)
    ps = encode(op, make_encoding("parity", 6))
    got = np.sort(np.linalg.eigvalsh(ps.to_matrix()))
    want = np.sort(np.linalg.eigvalsh(fermion_matrix(op)))
    assert np.allclose(got, want, atol=1e-9)


@pytest.mark.parametrize("scheme,n_orb,n_alpha,n_beta", [
    ("bravyi_kitaev", 2, 1, 1),   # ethylene-like CAS(2e,2o) -> 2 qubits
    ("parity", 3, 2, 1),          # H3-like CAS(3e,3o) -> 4 qubits
    ("jordan_wigner", 2, 1, 1),
])
def test_taper_reduces_and_preserves_sector_ground_state(scheme, n_orb, n_alpha, n_beta):
    rng = np.random.default_rng(5 + n_orb)
    h, v = random_integrals(rng, n_orb, scale=0.6)
    ah = ActiveHamiltonian(-0.2, h, v)
    op = active_to_fermion(ah)
    spec = make_encoding(scheme, 2 * n_orb, n_alpha, n_beta, taper=True)
    full = encode(op, spec)
    reduced = taper(full, spec)
    assert reduced.n_qubits == 2 * n_orb - 2
    tapered_eigs = np.linalg.eigvalsh(reduced.to_matrix())
    full_eigs = np.linalg.eigvalsh(full.to_matrix())
    # tapered spectrum is a subset of the full spectrum
    for val in tapered_eigs:
        assert np.min(np.abs(full_eigs - val)) < 1e-9
    # and contains the chosen-sector ground state
    sector_ground = casci_energies(ah.e_const, h, v, n_alpha, n_beta)[0]
    assert np.min(np.abs(tapered_eigs - sector_ground)) < 1e-10
    # restricted to the physical particle sector, the ground energies match
    occs = tapered_basis_occupations(spec)
    idx = [i for i, occ in enumerate(occs)
           if bin(occ & 0x555555).count("1") == n_alpha and bin(occ & 0xAAAAAA).count("1") == n_beta]
    block = reduced.to_matrix()[np.ix_(idx, idx)]
    assert np.min(np.linalg.eigvalsh(block)) == pytest.approx(sector_ground, abs=1e-10)


def test_taper_identity_when_disabled():
    spec = make_encoding("parity", 4)
    ps = PauliSum.from_labels(4, {"Z3Z2": 0.5, "X1X0": 0.25})
    assert taper(ps, spec) is ps


def test_taper_rejects_anticommuting_term():
    spec = make_encoding("jordan_wigner", 4, 1, 1, taper=True)
    bad = PauliSum.from_labels(4, {"X0": 1.0})
    with pytest.raises(ValueError, match="anticommutes"):
        taper(bad, spec)


def test_tapered_basis_occupations_roundtrip():
    for scheme in SCHEMES:
        spec = make_encoding(scheme, 6, 2, 1, taper=True)
        occs = tapered_basis_occupations(spec)
        assert len(set(occs)) == 16
        for idx, occ in enumerate(occs):
            assert tapered_bits(spec, occ) == idx


def test_hf_reference_energy_survives_tapering():
    rng = np.random.default_rng(31)
    h, v = random_integrals(rng, 3, scale=0.5)
    ah = ActiveHamiltonian(0.1, h, v)
    op = active_to_fermion(ah)
    spec = make_encoding("parity", 6, 2, 1, taper=True)
    reduced = encode_and_taper(op, spec)
    hf_mask = hf_occupation_mask(6, 2, 1)
    ref = tapered_bits(spec, hf_mask)
    state = np.zeros(16, dtype=complex)
    state[ref] = 1.0
    from vqecasscf.sim import exact_expectation

    want = float(np.real(
        fermion_matrix(op)[hf_mask, hf_mask]
    ))
    assert exact_expectation(state, reduced) == pytest.approx(want, abs=1e-10)


def test_rdm_observable_number_operator():
    spec = make_encoding("jordan_wigner", 2)
    obs = dict(encode_rdm_observables(spec, 1))
    assert obs[("g", 0, 0)].allclose(PauliSum.from_labels(2, {"I": 0.5, "Z0": -0.5}))


def test_rdm_observables_spin_conserving_and_commute_with_taper():
    spec = make_encoding("bravyi_kitaev", 4, 1, 1, taper=True)
    obs = encode_rdm_observables(spec, 2)
    keys = [k for k, _ in obs]
    assert ("g", 0, 1) not in keys  # alpha-beta element dropped
    for _, ps in obs:
        assert ps.n_qubits == 2


def test_rdm_occupations_on_closed_shell_determinant():
    # both electrons in spatial orbital 0: gamma = diag(2, 0)
    spec = make_encoding("bravyi_kitaev", 4, 1, 1, taper=True)
    occ = hf_occupation_mask(4, 1, 1)
    ref = tapered_bits(spec, occ)
    state = np.zeros(4, dtype=complex)
    state[ref] = 1.0
    from vqecasscf.sim import exact_expectation

    values = {key: exact_expectation(state, ps) for key, ps in encode_rdm_observables(spec, 2)}
    gamma_so, Gamma_so = assemble_spin_orbital_rdms(values, 2)
    gamma, Gamma = spin_trace_rdms(gamma_so, Gamma_so)
    assert np.allclose(gamma, np.diag([2.0, 0.0]), atol=1e-10)
    assert np.trace(gamma) == pytest.approx(2.0)
    # 2-RDM contraction on a determinant: E2 = (00|00) for the doubly occupied orbital
    assert Gamma[0, 0, 0, 0] == pytest.approx(2.0)


def test_rdm_trace_identity_random_state():
    spec = make_encoding("parity", 6, 2, 1, taper=True)
    occs = tapered_basis_occupations(spec)
    idx = [i for i, occ in enumerate(occs)
           if bin(occ & 0x555555).count("1") == 2 and bin(occ & 0xAAAAAA).count("1") == 1]
    rng = np.random.default_rng(2)
    state = np.zeros(16, dtype=complex)
    state[idx] = rng.normal(size=len(idx))
    state /= np.linalg.norm(state)
    from vqecasscf.sim import exact_expectation

    values = {key: exact_expectation(state, ps) for key, ps in encode_rdm_observables(spec, 3)}
    gamma_so, Gamma_so = assemble_spin_orbital_rdms(values, 3)
    gamma, _ = spin_trace_rdms(gamma_so, Gamma_so)
    assert np.trace(gamma) == pytest.approx(3.0, abs=1e-10)
    assert np.allclose(gamma, gamma.T)


def test_rdm_energy_contraction_matches_expectation():
    rng = np.random.default_rng(41)
    h, v = random_integrals(rng, 2, scale=0.7)
    ah = ActiveHamiltonian(0.21, h, v)
    spec = make_encoding("jordan_wigner", 4, 1, 1, taper=True)
    ham = encode_and_taper(active_to_fermion(ah), spec)
    occs = tapered_basis_occupations(spec)
    idx = [i for i, occ in enumerate(occs)
           if bin(occ & 0x55).count("1") == 1 and bin(occ & 0xAA).count("1") == 1]
    state = np.zeros(1 << ham.n_qubits, dtype=complex)
    state[idx] = rng.normal(size=len(idx))
    state /= np.linalg.norm(state)
    from vqecasscf.sim import exact_expectation

    values = {key: exact_expectation(state, ps) for key, ps in encode_rdm_observables(spec, 2)}
    gamma_so, Gamma_so = assemble_spin_orbital_rdms(values, 2)
    gamma, Gamma = spin_trace_rdms(gamma_so, Gamma_so)
    e_rdm = ah.e_const + np.einsum("tu,tu->", ah.h_eff, gamma) + 0.5 * np.einsum(
        "tuvw,tuvw->", ah.v_act, Gamma)
    assert e_rdm == pytest.approx(exact_expectation(state, ham), abs=1e-10)


def test_occupation_parity_string_tracks_mirror_symmetry():
    # parity of orbital-1 occupation distinguishes determinants
    spec = make_encoding("parity", 6, 2, 1, taper=True)
    mirror = occupation_parity_string(spec, [2, 3])
    occs = tapered_basis_occupations(spec)
    mat = mirror.to_matrix()
    for idx, occ in enumerate(occs):
        n_orb1 = ((occ >> 2) & 1) + ((occ >> 3) & 1)
        assert mat[idx, idx].real == pytest.approx((-1.0) ** n_orb1)


def test_symmetry_strings_commute_with_hamiltonian():
    rng = np.random.default_rng(13)
    h, v = random_integrals(rng, 3, scale=0.5)
    op = active_to_fermion(ActiveHamiltonian(0.0, h, v))
    for scheme in SCHEMES:
        spec = make_encoding(scheme, 6, 2, 1, taper=True)
        ham = encode(op, spec)
        for sym in spec.taper.symmetries:
            assert all(commutes(s, sym) for s in ham.strings())
