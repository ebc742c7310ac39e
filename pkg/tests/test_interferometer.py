import numpy as np
import pytest

from qcslab import (
    DensityOperator,
    HeadroomError,
    MemoryGuardError,
    PhotonDistribution,
    ValidationError,
    beam_splitter_unitary,
    coherent,
    fock,
    hom_photon_distribution,
    multimode_two_copy_output,
    partial_trace,
    photon_distribution,
    photon_distribution_phase_invariant,
    tensor,
    thermal,
    thermal_photon_distribution,
    two_copy_output,
)
from qcslab.errors import RoundoffBudgetError
from qcslab.interferometer import hom_amplitudes, is_fock_diagonal


def test_beam_splitter_is_unitary():
    u = beam_splitter_unitary(6)
    assert np.max(np.abs(u @ u.conj().T - np.eye(36))) < 1e-12


def test_beam_splitter_conserves_photon_number():
    dim = 5
    u = beam_splitter_unitary(dim)
    total = np.add.outer(np.arange(dim), np.arange(dim)).reshape(-1)
    mixing = np.abs(u)[total[:, None] != total[None, :]]
    assert np.max(mixing, initial=0.0) < 1e-14


def test_identical_coherent_inputs_cancel():
    rho = coherent(0.7, 24)
    pn = photon_distribution(rho, rho)
    assert abs(pn.probs[0] - 1.0) < 1e-9
    assert np.max(pn.probs[1:]) < 1e-9


def test_two_copy_output_of_coherent_is_vacuum():
    rho_d = two_copy_output(coherent(0.5, 20))
    assert abs(rho_d.matrix[0, 0].real - 1.0) < 1e-9


def test_two_copy_output_is_valid_state():
    rho_d = two_copy_output(thermal(0.3, 32))
    rho_d.validate()


def test_hom_dip():
    p = hom_photon_distribution(1, 1)
    assert np.allclose(p, [0.5, 0.0, 0.5], atol=1e-12)


def test_hom_distributions_normalized():
    for big_n in range(7):
        for big_np in range(7):
            p = hom_photon_distribution(big_n, big_np)
            assert abs(p.sum() - 1.0) < 1e-10


def test_hom_amplitude_closed_form_small_case():
    # |1>|1>: the odd output n=1 has two equal-magnitude opposite-sign terms
    c = hom_amplitudes(1, 1, 1)
    assert abs(c.sum()) < 1e-12
    for n_out in (0, 2):
        c = hom_amplitudes(n_out, 1, 1)
        assert abs(c.sum() ** 2 - 0.5) < 1e-12


def test_fast_path_matches_dense_pipeline():
    rng = np.random.default_rng(5)
    diag = np.zeros(26)
    diag[:9] = rng.dirichlet(np.ones(9))
    rho = DensityOperator(np.diag(diag).astype(complex), (26,))
    fast = photon_distribution_phase_invariant(diag)
    dense = photon_distribution(rho, rho)
    m = min(len(fast.probs), len(dense.probs))
    assert np.max(np.abs(fast.probs[:m] - dense.probs[:m])) < 1e-10
    assert np.max(np.abs(dense.probs[m:])) < 1e-10


def test_thermal_closed_form_matches_dense():
    rho = thermal(0.3, 44)
    dense = photon_distribution(rho, rho)
    closed = thermal_photon_distribution(0.3, len(dense.probs) - 1)
    assert np.max(np.abs(dense.probs - closed.probs)) < 1e-9


def test_headroom_violation_raises():
    with pytest.raises(HeadroomError):
        two_copy_output(thermal(0.5, 12, deficit_tol=1e-3))
    with pytest.raises(HeadroomError):
        photon_distribution(coherent(1.0, 8, deficit_tol=1e-3),
                            coherent(1.0, 8, deficit_tol=1e-3))


def test_memory_guard():
    with pytest.raises(MemoryGuardError):
        two_copy_output(fock(0, 80))


def test_distribution_validation():
    with pytest.raises(RoundoffBudgetError):
        PhotonDistribution.from_values(np.array([1.0, -1e-3]))
    ok = PhotonDistribution.from_values(np.array([0.7, 0.3, -1e-12]))
    assert ok.probs[2] == 0.0
    assert ok.roundoff <= 1e-12


def test_distribution_csv(tmp_path):
    pn = PhotonDistribution(probs=np.array([0.5, 0.25, 0.25]))
    path = tmp_path / "pn.csv"
    pn.to_csv(path)
    lines = path.read_text().splitlines()
    assert lines[0] == "n,p_n,cumulative"
    assert lines[1] == "0,0.5,0.5"
    assert lines[3].startswith("2,0.25,")


def test_is_fock_diagonal():
    assert is_fock_diagonal(thermal(0.5, 10, deficit_tol=1e-2))
    assert not is_fock_diagonal(coherent(0.5, 10))


def test_multimode_matches_single_mode_pipeline():
    rho = thermal(0.2, 8, deficit_tol=1e-3)
    single = two_copy_output(rho, headroom_tol=1e-2)
    multi = multimode_two_copy_output(rho, headroom_tol=1e-2)
    assert np.max(np.abs(single.matrix - multi.matrix)) < 1e-12


def test_multimode_product_state_factorizes():
    a = fock(1, 6)
    b = fock(0, 6)
    joint = multimode_two_copy_output(tensor(a, b))
    expected = tensor(two_copy_output(a), two_copy_output(b))
    assert np.max(np.abs(joint.matrix - expected.matrix)) < 1e-12
    assert joint.dims == (6, 6)


def test_multimode_memory_guard():
    big = tensor(fock(0, 16), fock(0, 16))
    with pytest.raises(MemoryGuardError):
        multimode_two_copy_output(big)


def test_input_validation():
    with pytest.raises(ValidationError):
        photon_distribution(fock(0, 8), fock(0, 10))
    with pytest.raises(ValidationError):
        two_copy_output(tensor(fock(0, 4), fock(0, 4)))
    with pytest.raises(ValidationError):
        thermal_photon_distribution(1.0, 10)
