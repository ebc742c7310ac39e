import numpy as np
import pytest

from qcslab import (
    GridError,
    ValidationError,
    WignerGrid,
    coherent,
    fock,
    overlap_wigner,
    purity_direct,
    qcs_wigner_gradient,
    qcs_wigner_laplacian,
    rho_even_m,
    squeezed_vacuum,
    thermal,
    two_copy_output,
    wigner_eval,
    wigner_origin,
)
from qcslab.fock import displacement_operator, parity_operator
from qcslab.phase_space import _wigner_values, default_axes, wigner_laplacian_origin


def wigner_point_oracle(mat, x, p, pad_dim=80):
    """Slow reference: W = Tr[rho D(2 alpha) parity]/pi with the displacement
    built by matrix exponential in a padded space (truncation-safe)."""
    padded = np.zeros((pad_dim, pad_dim), dtype=complex)
    padded[: mat.shape[0], : mat.shape[0]] = mat
    d = displacement_operator(np.sqrt(2.0) * (x + 1j * p), pad_dim)
    return float(np.real(np.trace(padded @ d @ parity_operator(pad_dim))) / np.pi)


def test_vacuum_wigner_is_gaussian():
    grid = wigner_eval(fock(0, 6))
    xx, pp = np.meshgrid(grid.x_axis, grid.p_axis, indexing="ij")
    expected = np.exp(-(xx ** 2 + pp ** 2)) / np.pi
    assert np.max(np.abs(grid.values - expected)) < 1e-12


def test_fock_one_negative_at_origin():
    rho = fock(1, 8)
    assert abs(wigner_origin(rho) - (-1.0 / np.pi)) < 1e-14
    grid = wigner_eval(rho)
    i = np.argmin(np.abs(grid.x_axis))
    assert abs(grid.values[i, i] - (-1.0 / np.pi)) < 1e-12


def test_wigner_values_match_displaced_parity_oracle():
    points = [(-2.1, 0.4), (0.0, 0.0), (1.3, -1.7)]
    states = [coherent(0.6 - 0.3j, 24), squeezed_vacuum(0.5, 30), fock(3, 16)]
    for rho in states:
        for x, p in points:
            fast = _wigner_values(rho.matrix, np.array([x]), np.array([p]))[0, 0]
            assert abs(fast - wigner_point_oracle(rho.matrix, x, p)) < 1e-12


def test_normalization_invariant():
    for rho in (coherent(0.7, 28), thermal(0.5, 40), squeezed_vacuum(0.6, 40),
                rho_even_m(3, 16)):
        grid = wigner_eval(rho)  # raises GridError if the check fails
        assert abs(grid.integrate() - rho.trace()) < 1e-6


def test_purity_identity():
    for rho in (thermal(0.5, 40), squeezed_vacuum(0.5, 36), fock(2, 12)):
        assert abs(overlap_wigner(rho, rho) - purity_direct(rho)) < 1e-6


def test_overlap_coherent_closed_form():
    alpha, beta = 0.7, -0.3 + 0.4j
    value = overlap_wigner(coherent(alpha, 28), coherent(beta, 28))
    assert abs(value - np.exp(-abs(alpha - beta) ** 2)) < 1e-6


def test_difference_mode_wigner_nonnegative_for_identical_inputs():
    rho_d = two_copy_output(coherent(0.8, 28))
    grid = wigner_eval(rho_d)
    assert grid.values.min() > -1e-10


def test_parity_identity_for_two_copy_output():
    rho = thermal(0.3, 32)
    rho_d = two_copy_output(rho)
    assert abs(np.pi * wigner_origin(rho_d) - purity_direct(rho)) < 1e-8


def test_laplacian_route_examples():
    assert abs(qcs_wigner_laplacian(fock(0, 8)).c_squared - 1.0) < 1e-12
    assert abs(qcs_wigner_laplacian(rho_even_m(5, 24)).c_squared - 13.0) < 1e-9
    assert abs(qcs_wigner_laplacian(thermal(0.5, 62)).c_squared - 1.0 / 3.0) < 1e-9


def test_laplacian_origin_analytic():
    # vacuum: W = e^{-r^2}/pi so the origin Laplacian is -4/pi
    assert abs(wigner_laplacian_origin(fock(0, 6)) - (-4.0 / np.pi)) < 1e-14


def test_gradient_route_examples():
    assert abs(qcs_wigner_gradient(fock(0, 6)).c_squared - 1.0) < 1e-4
    assert abs(qcs_wigner_gradient(fock(1, 10)).c_squared - 3.0) < 1e-3


def test_gradient_route_rejects_coarse_grid():
    with pytest.raises(ValidationError):
        qcs_wigner_gradient(fock(0, 6), spacing=0.2)


def test_grid_error_when_extent_too_small():
    axis = np.linspace(-1.0, 1.0, 51)
    with pytest.raises(GridError):
        wigner_eval(thermal(0.5, 30), axis, axis)


def test_grid_io(tmp_path):
    grid = wigner_eval(fock(0, 6))
    csv_path = tmp_path / "w.csv"
    grid.to_csv(csv_path)
    header = csv_path.read_text().splitlines()[0]
    assert header == "x,p,W"
    bin_path = tmp_path / "w.bin"
    grid.to_binary(bin_path)
    raw = bin_path.read_bytes()
    nx = int(np.frombuffer(raw[:8], dtype="<i8")[0])
    assert nx == len(grid.x_axis)
    values = np.frombuffer(raw[16 + 4 * 8:], dtype="<f8").reshape(nx, -1)
    assert np.allclose(values, grid.values)


def test_default_axes_cover_displaced_states():
    rho = coherent(2.0, 40)
    axis, _ = default_axes(rho)
    assert axis[-1] > np.sqrt(2) * 2.0 + 4.0  # mean offset plus several sigma
