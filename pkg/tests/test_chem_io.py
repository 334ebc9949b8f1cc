import numpy as np
import pytest

from vqecasscf.chem_io import (
    ActiveSpace,
    IntegralSet,
    active_to_fermion,
    build_active_hamiltonian,
    parse_fcidump,
    write_fcidump,
)

from oracles import casci_energies, fermion_matrix, random_integrals

HEADER = " &FCI NORB={n},NELEC={ne},MS2={ms},\n  ORBSYM=1,1,\n  ISYM=1,\n &END\n"


def test_parse_single_v_entry():
    text = HEADER.format(n=2, ne=2, ms=0) + "0.75 1 1 1 1\n"
    ints = parse_fcidump(text)
    assert ints.v[0, 0, 0, 0] == 0.75
    assert np.count_nonzero(ints.v) == 1
    assert np.count_nonzero(ints.h) == 0


def test_parse_h_symmetry_completion():
    text = HEADER.format(n=2, ne=2, ms=0) + "-1.25 1 2 0 0\n"
    ints = parse_fcidump(text)
    assert ints.h[0, 1] == -1.25
    assert ints.h[1, 0] == -1.25


def test_parse_v_eightfold_completion():
    text = HEADER.format(n=2, ne=2, ms=0) + "0.3 1 2 1 1\n"
    ints = parse_fcidump(text)
    for idx in [(0, 1, 0, 0), (1, 0, 0, 0), (0, 0, 0, 1), (0, 0, 1, 0)]:
        assert ints.v[idx] == 0.3


def test_parse_errors():
    with pytest.raises(ValueError, match="missing header key"):
        parse_fcidump(" &FCI NELEC=2, &END\n0.0 0 0 0 0\n")
    with pytest.raises(ValueError, match="out of range"):
        parse_fcidump(HEADER.format(n=2, ne=2, ms=0) + "0.1 3 1 1 1\n")
    with pytest.raises(ValueError, match="conflicting duplicate"):
        parse_fcidump(HEADER.format(n=2, ne=2, ms=0) + "0.1 1 2 1 1\n0.2 2 1 1 1\n")
    # exact duplicates are tolerated
    parse_fcidump(HEADER.format(n=2, ne=2, ms=0) + "0.1 1 2 1 1\n0.1 2 1 1 1\n")


def test_roundtrip_random_integrals():
    rng = np.random.default_rng(3)
    h, v = random_integrals(rng, 3)
    ints = IntegralSet(3, 0.7177, h, v, n_elec=4, ms2=0)
    back = parse_fcidump(write_fcidump(ints))
    assert back.n_orb == 3 and back.n_elec == 4 and back.ms2 == 0
    assert back.e_nuc == ints.e_nuc
    assert np.array_equal(back.h, ints.h)
    assert np.array_equal(back.v, ints.v)


def test_active_space_validation():
    with pytest.raises(ValueError):
        ActiveSpace(core=(0,), active=(0, 1), n_active_elec=2)
    with pytest.raises(ValueError):
        ActiveSpace(core=(), active=(0,), n_active_elec=3)
    cas = ActiveSpace(core=(0,), active=(1, 2), n_active_elec=2)
    with pytest.raises(ValueError):
        cas.validate(2)
    assert cas.electron_counts(0) == (1, 1)
    with pytest.raises(ValueError):
        cas.electron_counts(1)


def _random_intset(rng, n_orb, n_elec, ms2=0):
    h, v = random_integrals(rng, n_orb, scale=0.5)
    return IntegralSet(n_orb, 0.5, h, v, n_elec, ms2)


def test_empty_core_is_identity_folding():
    rng = np.random.default_rng(11)
    ints = _random_intset(rng, 3, 2)
    cas = ActiveSpace((), (0, 1, 2), 2)
    ah = build_active_hamiltonian(ints, cas)
    assert ah.e_const == ints.e_nuc
    assert np.array_equal(ah.h_eff, ints.h)
    assert np.array_equal(ah.v_act, ints.v)


def test_all_active_reproduces_fci():
    rng = np.random.default_rng(13)
    ints = _random_intset(rng, 2, 2)
    ah = build_active_hamiltonian(ints, ActiveSpace((), (0, 1), 2))
    want = casci_energies(ints.e_nuc, ints.h, ints.v, 1, 1)
    got = casci_energies(ah.e_const, ah.h_eff, ah.v_act, 1, 1)
    assert np.allclose(want, got, atol=1e-10)


def test_core_folding_against_explicit_fci():
    # folding the first orbital of a 3-orbital system must reproduce the
    # full FCI spectrum restricted to doubly-occupied orbital 0
    rng = np.random.default_rng(17)
    ints = _random_intset(rng, 3, 4)
    cas = ActiveSpace((0,), (1, 2), 2)
    ah = build_active_hamiltonian(ints, cas)
    folded = casci_energies(ah.e_const, ah.h_eff, ah.v_act, 1, 1)

    from oracles import hamiltonian_matrix, sector_masks

    H = hamiltonian_matrix(ints.e_nuc, ints.h, ints.v)
    masks = sector_masks(6, 2, 2)
    keep = [m for m in masks if (m & 0b11) == 0b11]
    block = H[np.ix_(keep, keep)].toarray()
    want = np.sort(np.linalg.eigvalsh(block))
    assert np.allclose(folded, want, atol=1e-10)


def test_variational_containment():
    # CASCI ground energy is above the full-space FCI ground energy
    rng = np.random.default_rng(19)
    ints = _random_intset(rng, 3, 2)
    fci = casci_energies(ints.e_nuc, ints.h, ints.v, 1, 1)[0]
    ah = build_active_hamiltonian(ints, ActiveSpace((), (0, 1), 2))
    casci = casci_energies(ah.e_const, ah.h_eff, ah.v_act, 1, 1)[0]
    assert casci >= fci - 1e-12


def test_one_orbital_fermion_operator():
    ah_small = build_active_hamiltonian(
        IntegralSet(1, 0.0, np.array([[0.37]]), np.zeros((1, 1, 1, 1)), 2),
        ActiveSpace((), (0,), 2),
    )
    op = active_to_fermion(ah_small)
    mat = fermion_matrix(op)
    # eps*(n_alpha + n_beta): eigenvalues are 0, eps, eps, 2 eps
    assert np.allclose(np.sort(np.diag(mat)), [0.0, 0.37, 0.37, 0.74])


def test_fermion_operator_spectrum_matches_fci():
    rng = np.random.default_rng(23)
    ints = _random_intset(rng, 2, 2)
    ah = build_active_hamiltonian(ints, ActiveSpace((), (0, 1), 2))
    op = active_to_fermion(ah)
    mat = fermion_matrix(op)
    from oracles import sector_masks

    idx = sector_masks(4, 1, 1)
    got = np.sort(np.linalg.eigvalsh(mat[np.ix_(idx, idx)]))
    want = casci_energies(ah.e_const, ah.h_eff, ah.v_act, 1, 1)
    assert np.allclose(got, want, atol=1e-10)


def test_e_const_shifts_spectrum_uniformly():
    rng = np.random.default_rng(29)
    ints = _random_intset(rng, 2, 2)
    ah = build_active_hamiltonian(ints, ActiveSpace((), (0, 1), 2))
    base = np.sort(np.linalg.eigvalsh(fermion_matrix(active_to_fermion(ah))))
    ah.e_const += 1.5
    shifted = np.sort(np.linalg.eigvalsh(fermion_matrix(active_to_fermion(ah))))
    assert np.allclose(shifted, base + 1.5, atol=1e-12)
