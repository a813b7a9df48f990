import math

import numpy as np
import pytest

from modes_saa import aoa, channel, frames, waveform
from modes_saa.aoa import ScanSector
from modes_saa.channel import ArrayGeometry, ChannelParams
from modes_saa.waveform import ReceiverSetup

from oracles import charpoly_eigenvalues, music_denominator_loops

RX = ReceiverSetup()
GEOM = ArrayGeometry()
LAM = 3e8 / 1090e6


def random_hermitian(rng, n=4):
    X = rng.standard_normal((n, n)) + 1j * rng.standard_normal((n, n))
    return X + X.conj().T


def test_eigendecompose_matches_charpoly_oracle():
    rng = np.random.default_rng(0)
    for _ in range(200):
        A = random_hermitian(rng)
        es = aoa.eigendecompose(A)
        assert np.allclose(es.eigenvalues, charpoly_eigenvalues(A), atol=1e-8)


def test_eigensystem_invariants():
    rng = np.random.default_rng(1)
    A = random_hermitian(rng, 6)
    es = aoa.eigendecompose(A)
    V, w = es.eigenvectors, es.eigenvalues
    assert np.all(np.diff(w) <= 0)
    assert np.allclose(V.conj().T @ V, np.eye(6), atol=1e-9)
    assert np.linalg.norm(V @ np.diag(w) @ V.conj().T - A) <= 1e-9 * np.linalg.norm(A)
    piv = V[np.argmax(np.abs(V), axis=0), np.arange(6)]
    assert np.allclose(piv.imag, 0) and np.all(piv.real > 0)


def test_eigendecompose_simple_cases():
    assert np.allclose(aoa.eigendecompose(np.eye(4)).eigenvalues, 1)
    a = channel.manifold(20.0, 60.0, GEOM, LAM)
    es = aoa.eigendecompose(np.outer(a, a.conj()))
    assert es.eigenvalues[0] == pytest.approx(4)
    assert np.allclose(es.eigenvalues[1:], 0, atol=1e-12)
    with pytest.raises(ValueError):
        aoa.eigendecompose(np.array([[1, 2], [0, 1]]))


def noiseless_snapshot(theta, phi, R=600.0, N0=0.0, seed=0):
    fr = frames.build_frame(3000, 0x4840D6)
    d = RX.delay_index(2 * R / 3e8)
    s = waveform.synthesize_clean(fr, RX.sampled, d, RX.D)
    I = frames.nonzero_chip_indices(frames.ppm_expand(fr))
    p = ChannelParams(R=R, f_D=150.0, N0=N0)
    return channel.synthesize_snapshot(s, I, d, RX.M, p, GEOM, theta, phi, RX.T_s, 0.4, rng=seed)


def test_sample_correlation_properties():
    Y = noiseless_snapshot(20.0, 60.0)
    C = aoa.sample_correlation(Y)
    assert C.sample_count == 56 * 3
    assert np.allclose(C.A_hat, C.A_hat.conj().T)
    w = aoa.eigendecompose(C).eigenvalues
    assert np.all(w[1:] <= 1e-9 * w[0])
    assert np.trace(C.A_hat).real == pytest.approx(np.mean(np.sum(np.abs(Y) ** 2, axis=1)))


def test_noise_only_correlation_is_white():
    rng = np.random.default_rng(2)
    acc = np.zeros((4, 4), dtype=complex)
    for _ in range(1000):
        acc += aoa.sample_correlation(channel.complex_noise(rng, (168, 4), 3.0)).A_hat
    acc /= 1000
    assert np.allclose(np.diag(acc).real, 3.0, rtol=0.01)
    assert np.max(np.abs(acc - np.diag(np.diag(acc)))) < 0.02


def test_noise_subspace_orthogonal_to_manifold():
    es = aoa.eigendecompose(aoa.sample_correlation(noiseless_snapshot(20.0, 60.0)))
    a = channel.manifold(20.0, 60.0, GEOM, LAM)
    assert np.all(np.abs(a.conj() @ es.noise) <= 1e-6)


def test_music_spectrum_peak_and_positivity():
    es = aoa.eigendecompose(aoa.sample_correlation(noiseless_snapshot(20.0, 60.0)))
    sector = ScanSector.centered(20.0, 60.0)
    _, _, P = aoa.spectrum_grid(es.noise, sector, GEOM, LAM)
    peak = aoa.music_spectrum(es.noise, 20.0, 60.0, GEOM, LAM)
    assert peak >= 1e6 * np.median(P)
    assert np.all(P > 0)
    rotated = es.noise * np.exp(1j * np.array([0.3, -1.2, 2.0]))
    assert np.allclose(aoa.music_spectrum(rotated, 10.0, 40.0, GEOM, LAM), aoa.music_spectrum(es.noise, 10.0, 40.0, GEOM, LAM))


def test_music_denominator_matches_loops():
    rng = np.random.default_rng(3)
    es = aoa.eigendecompose(random_hermitian(rng))
    for th, ph in [(10.0, 30.0), (-45.0, 120.0), (70.0, 5.0)]:
        ref = music_denominator_loops(es.noise, th, ph, 2, 2, 0.1375, 0.1375, LAM)
        assert aoa.music_denominator(es.noise, th, ph, GEOM, LAM) == pytest.approx(ref, rel=1e-12)


def test_noiseless_estimate_within_grid_step():
    sector = ScanSector.centered(20.0, 60.0)
    th, ph = aoa.estimate_aoa(noiseless_snapshot(20.0, 60.0), sector, GEOM, LAM)
    assert abs(th - 20.0) <= sector.step and abs(ph - 60.0) <= sector.step
    th, ph = aoa.estimate_aoa(noiseless_snapshot(20.0, 60.0), sector, GEOM, LAM, refine=False)
    assert abs(th - 20.0) <= sector.step and abs(ph - 60.0) <= sector.step


def test_sector_excluding_truth_lands_on_boundary():
    sector = ScanSector(30.0, 50.0, 40.0, 80.0)
    th, ph = aoa.estimate_aoa(noiseless_snapshot(20.0, 60.0), sector, GEOM, LAM)
    assert sector.contains(th, ph)
    assert th == pytest.approx(30.0)


def test_scale_invariance_of_argmax():
    Y = noiseless_snapshot(-35.0, 110.0, R=3000.0, N0=2.4e-21, seed=4)
    sector = ScanSector.centered(-35.0, 110.0)
    base = aoa.estimate_aoa(Y, sector, GEOM, LAM)
    scaled = aoa.estimate_aoa((2.5 - 1.5j) * Y, sector, GEOM, LAM)
    assert np.allclose(base, scaled, atol=1e-6)


def test_scan_sector_validation_and_grid():
    s = ScanSector(-10.0, 10.0, 20.0, 21.2, step=0.5)
    assert s.theta_grid()[0] == -10 and s.theta_grid()[-1] == 10
    assert s.phi_grid()[-1] == pytest.approx(21.2)
    with pytest.raises(ValueError):
        ScanSector(10.0, 5.0, 20.0, 30.0)
    with pytest.raises(ValueError):
        ScanSector(-90.0, 5.0, 20.0, 30.0)
    c = ScanSector.centered(80.0, 170.0)
    assert c.theta_hi < 90 and c.phi_hi < 180


def model_xi(R):
    return aoa.xi(10**0.8, 1.0, 1.0, 4 * math.pi * R / LAM, RX.sampled.g)


def test_model_lambda_max():
    x = model_xi(600.0)
    a = channel.manifold(20.0, 60.0, GEOM, LAM)
    es = aoa.eigendecompose(x * np.outer(a, a.conj()) + 2.4e-21 * np.eye(4))
    assert es.eigenvalues[0] == pytest.approx(4 * x + 2.4e-21, rel=1e-10)


def test_theoretical_mse_scaling():
    x = model_xi(600.0)
    m1 = aoa.aoa_mse_theoretical(20.0, 60.0, GEOM, LAM, x, 2.4e-21, 3)
    m2 = aoa.aoa_mse_theoretical(20.0, 60.0, GEOM, LAM, x, 2.4e-21, 6)
    assert m2[0] == pytest.approx(m1[0] / 2) and m2[1] == pytest.approx(m1[1] / 2)
    hi = aoa.aoa_mse_theoretical(20.0, 60.0, GEOM, LAM, 100 * x, 2.4e-21, 3)
    assert hi[0] < m1[0] / 50
    with pytest.raises(ValueError):
        aoa.aoa_mse_theoretical(0.0, 60.0, GEOM, LAM, x, 2.4e-21, 3)


def test_joint_mse_never_below_single_angle():
    x = model_xi(600.0)
    for th, ph in [(20.0, 60.0), (5.0, 30.0), (-40.0, 150.0), (70.0, 89.0)]:
        single = aoa.aoa_mse_theoretical(th, ph, GEOM, LAM, x, 2.4e-21, 3)
        joint = aoa.aoa_mse_joint(th, ph, GEOM, LAM, x, 2.4e-21, 3)
        assert joint[0] >= single[0] * (1 - 1e-9)
        assert joint[1] >= single[1] * (1 - 1e-9)


@pytest.mark.slow
def test_empirical_mse_tracks_joint_formula():
    x = model_xi(600.0)
    sector = ScanSector.centered(20.0, 60.0)
    errs = []
    for seed in range(300):
        th, _ = aoa.estimate_aoa(noiseless_snapshot(20.0, 60.0, N0=2.4e-21, seed=seed), sector, GEOM, LAM)
        errs.append(math.sin(math.radians(th)) - math.sin(math.radians(20.0)))
    emp = np.mean(np.square(errs))
    joint, _ = aoa.aoa_mse_joint(20.0, 60.0, GEOM, LAM, x, 2.4e-21, 3)
    assert emp == pytest.approx(joint, rel=0.3)


def test_spectrum_csv(tmp_path):
    path = tmp_path / "p.csv"
    aoa.dump_spectrum_csv(path, np.array([0.0, 1.0]), np.array([10.0, 20.0, 30.0]), np.arange(6.0).reshape(2, 3))
    data = np.loadtxt(path, delimiter=",", skiprows=1)
    assert data.shape == (6, 3)
    assert list(data[4]) == [1.0, 20.0, 4.0]
