"""2D-MUSIC elevation/azimuth estimation for the planar array.

Angles are in degrees throughout: theta is the elevation in (-90, 90) and
phi the azimuth in (0, 180).  The snapshot ``Y`` has one row per sample and
one column per element, each row being ``s_k a^T`` plus noise.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np
from scipy import optimize

from .channel import ArrayGeometry, manifold


@dataclass(frozen=True)
class CorrelationMatrix:
    A_hat: np.ndarray
    sample_count: int

    @property
    def N_a(self) -> int:
        return self.A_hat.shape[0]


@dataclass(frozen=True)
class EigenSystem:
    eigenvalues: np.ndarray
    eigenvectors: np.ndarray  # columns, matching eigenvalues

    @property
    def signal(self) -> np.ndarray:
        return self.eigenvectors[:, 0]

    @property
    def noise(self) -> np.ndarray:
        return self.eigenvectors[:, 1:]


@dataclass(frozen=True)
class ScanSector:
    theta_lo: float
    theta_hi: float
    phi_lo: float
    phi_hi: float
    step: float = 0.5

    def __post_init__(self):
        if not -90 < self.theta_lo <= self.theta_hi < 90:
            raise ValueError("theta range must be nonempty and inside (-90, 90)")
        if not 0 < self.phi_lo <= self.phi_hi < 180:
            raise ValueError("phi range must be nonempty and inside (0, 180)")
        if self.step <= 0:
            raise ValueError("grid step must be positive")

    @classmethod
    def centered(cls, theta, phi, width_theta=60.0, width_phi=60.0, step=0.5, margin=1e-6):
        """Sector of the given widths around (theta, phi), clipped to the open domain."""
        return cls(
            theta_lo=max(theta - width_theta / 2, -90 + margin),
            theta_hi=min(theta + width_theta / 2, 90 - margin),
            phi_lo=max(phi - width_phi / 2, margin),
            phi_hi=min(phi + width_phi / 2, 180 - margin),
            step=step,
        )

    def _axis(self, lo, hi):
        n = int(math.floor((hi - lo) / self.step + 1e-9))
        pts = lo + self.step * np.arange(n + 1)
        return pts if pts[-1] >= hi - 1e-9 else np.append(pts, hi)

    def theta_grid(self) -> np.ndarray:
        return self._axis(self.theta_lo, self.theta_hi)

    def phi_grid(self) -> np.ndarray:
        return self._axis(self.phi_lo, self.phi_hi)

    def contains(self, theta, phi, tol=1e-9) -> bool:
        return (
            self.theta_lo - tol <= theta <= self.theta_hi + tol
            and self.phi_lo - tol <= phi <= self.phi_hi + tol
        )


def sample_correlation(Y: np.ndarray) -> CorrelationMatrix:
    """(1/K) sum_k y_k^* y_k^T, rows y_k of Y, symmetrized.

    With rows equal to ``s_k a^T`` this estimates ``xi a a^H + sigma^2 I``,
    the orientation under which the noise eigenvectors are orthogonal to
    ``a(theta, phi)`` itself.
    """
    Y = np.asarray(Y, dtype=complex)
    if Y.ndim != 2 or Y.shape[0] < 1:
        raise ValueError("snapshot must be a nonempty 2-D array")
    A = Y.T @ Y.conj() / Y.shape[0]
    return CorrelationMatrix(A_hat=0.5 * (A + A.conj().T), sample_count=Y.shape[0])


def _phase_normalize(V: np.ndarray) -> np.ndarray:
    idx = np.argmax(np.abs(V) - 1e-12 * np.arange(V.shape[0])[:, None], axis=0)
    piv = V[idx, np.arange(V.shape[1])]
    return V * (np.abs(piv) / piv)[None, :]


def eigendecompose(A, tol: float = 1e-12, max_sweeps: int = 100) -> EigenSystem:
    """Cyclic complex Jacobi eigendecomposition of a small Hermitian matrix.

    Pivots are visited in fixed row-major order.  Each step strips the phase
    of the pivot with a diagonal unitary, then applies a real rotation.
    Eigenvalues come out descending; each eigenvector is scaled so its
    largest-magnitude entry is real and positive.
    """
    A = np.array(A.A_hat if isinstance(A, CorrelationMatrix) else A, dtype=complex)
    if A.ndim != 2 or A.shape[0] != A.shape[1]:
        raise ValueError("matrix must be square")
    scale = max(np.abs(A).max(), np.finfo(float).tiny)
    if np.abs(A - A.conj().T).max() > 1e-10 * scale:
        raise ValueError("matrix is not Hermitian")
    A = 0.5 * (A + A.conj().T)
    n = A.shape[0]
    V = np.eye(n, dtype=complex)
    for _ in range(max_sweeps):
        off = np.sqrt(np.sum(np.abs(A - np.diag(np.diag(A))) ** 2))
        if off <= tol * scale:
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = A[p, q]
                mag = abs(apq)
                if mag <= 1e-300 or mag <= 1e-18 * scale:
                    continue
                # A'[p,q] = conj(U[:,p]) A U[:,q] becomes real positive
                d = np.conj(apq) / mag
                app, aqq = A[p, p].real, A[q, q].real
                h = (aqq - app) / (2 * mag)
                t = math.copysign(1.0, h) / (abs(h) + math.sqrt(h * h + 1))
                c = 1 / math.sqrt(t * t + 1)
                s = t * c
                U = np.eye(n, dtype=complex)
                U[p, p] = c
                U[p, q] = s
                U[q, p] = -s * d
                U[q, q] = c * d
                A = U.conj().T @ A @ U
                A[p, q] = A[q, p] = 0.0
                V = V @ U
        A = 0.5 * (A + A.conj().T)
    else:
        raise RuntimeError("Jacobi iteration did not converge")
    w = np.diag(A).real
    order = np.argsort(-w, kind="stable")
    return EigenSystem(eigenvalues=w[order], eigenvectors=_phase_normalize(V[:, order]))


def music_denominator(e_noise, theta, phi, geom: ArrayGeometry, wavelength: float):
    """sum_n |a^H(theta, phi) e_n|^2 over the noise eigenvectors."""
    a = manifold(theta, phi, geom, wavelength)
    proj = a.conj() @ np.asarray(e_noise)
    return np.sum(np.abs(proj) ** 2, axis=-1)


def music_spectrum(e_noise, theta, phi, geom: ArrayGeometry, wavelength: float):
    den = music_denominator(e_noise, theta, phi, geom, wavelength)
    return 1.0 / np.maximum(den, np.finfo(float).tiny)


def spectrum_grid(e_noise, sector: ScanSector, geom: ArrayGeometry, wavelength: float):
    """(theta_grid, phi_grid, P) with P indexed [theta, phi]."""
    th, ph = sector.theta_grid(), sector.phi_grid()
    TH, PH = np.meshgrid(th, ph, indexing="ij")
    return th, ph, music_spectrum(e_noise, TH, PH, geom, wavelength)


def _denominator_and_grad(x, P_n, geom: ArrayGeometry, wavelength: float):
    th, ph = x
    m, n = geom.element_offsets()
    k = 2 * math.pi / wavelength
    psi = k * (geom.d_x * m * math.cos(th) + geom.d_y * n * math.sin(th) * math.sin(ph))
    a = np.exp(1j * psi)
    Pa = P_n @ a
    f = float(np.real(a.conj() @ Pa))
    d_th = k * (-geom.d_x * m * math.sin(th) + geom.d_y * n * math.cos(th) * math.sin(ph))
    d_ph = k * geom.d_y * n * math.sin(th) * math.cos(ph)
    grad = np.array([2 * np.real(np.conj(1j * d * a) @ Pa) for d in (d_th, d_ph)])
    return f, grad


def refine_peak(e_noise, theta0, phi0, sector: ScanSector, geom: ArrayGeometry, wavelength: float):
    """Continuous minimization of the MUSIC denominator from a grid point.

    Both angles are refined jointly: the manifold couples them through
    sin(theta) sin(phi), so separate one-dimensional refinements leave a
    bias along the ridge.
    """
    E = np.asarray(e_noise)
    P_n = E @ E.conj().T
    bounds = np.deg2rad([(sector.theta_lo, sector.theta_hi), (sector.phi_lo, sector.phi_hi)])
    x0 = np.deg2rad([theta0, phi0])
    f0, _ = _denominator_and_grad(x0, P_n, geom, wavelength)
    res = optimize.minimize(
        _denominator_and_grad,
        x0,
        args=(P_n, geom, wavelength),
        jac=True,
        method="L-BFGS-B",
        bounds=bounds,
        options=dict(ftol=1e-15, gtol=1e-14, maxiter=200),
    )
    if not np.all(np.isfinite(res.x)) or res.fun > f0:
        return float(theta0), float(phi0)
    th, ph = np.rad2deg(res.x)
    return float(np.clip(th, sector.theta_lo, sector.theta_hi)), float(np.clip(ph, sector.phi_lo, sector.phi_hi))


def estimate_aoa(
    Y: np.ndarray,
    sector: ScanSector,
    geom: ArrayGeometry,
    wavelength: float,
    refine: bool = True,
) -> tuple[float, float]:
    """Arg-max of the 2D-MUSIC spectrum inside the sector, in degrees.

    The grid is scanned theta-outer, phi-inner; the first maximum wins.
    """
    es = eigendecompose(sample_correlation(Y))
    th, ph, P = spectrum_grid(es.noise, sector, geom, wavelength)
    i, j = np.unravel_index(int(np.argmax(P)), P.shape)
    if not refine:
        return float(th[i]), float(ph[j])
    return refine_peak(es.noise, th[i], ph[j], sector, geom, wavelength)


def xi(P_t: float, eta: float, alpha: float, L: float, g, pattern: float = 1.0) -> float:
    """Per-sample signal power alpha^2 f^2 P_t eta mean(g^2) / L^2."""
    g = np.asarray(g, dtype=float)
    return alpha**2 * pattern**2 * P_t * eta * float(np.mean(g**2)) / L**2


def manifold_derivatives(theta, phi, geom: ArrayGeometry, wavelength: float):
    """(d a / d sin(theta), d a / d sin(phi)) at fixed phi and theta respectively."""
    th, ph = math.radians(theta), math.radians(phi)
    m, n = geom.element_offsets()
    k = 2 * math.pi / wavelength
    a = manifold(theta, phi, geom, wavelength)
    alpha = 1j * k * (geom.d_y * n * math.sin(ph) - math.tan(th) * geom.d_x * m) * a
    beta = 1j * k * geom.d_y * n * math.sin(th) * a
    return alpha, beta


def _model_eigensystem(theta, phi, geom, wavelength, xi_, sigma_w_sq):
    a = manifold(theta, phi, geom, wavelength)
    Lam = xi_ * np.outer(a, a.conj()) + sigma_w_sq * np.eye(geom.N_a)
    return a, eigendecompose(Lam)


def _check_inputs(theta, geom, xi_, sigma_w_sq, M):
    if geom.N_a < 2:
        raise ValueError("need at least two array elements")
    if theta == 0 or abs(theta) >= 90:
        raise ValueError("theta must be nonzero and inside (-90, 90)")
    if xi_ <= 0 or sigma_w_sq <= 0 or M < 1:
        raise ValueError("xi, sigma_w_sq and M must be positive")


def aoa_mse_theoretical(theta, phi, geom: ArrayGeometry, wavelength: float, xi_: float, sigma_w_sq: float, M: int):
    """Asymptotic MSE of sin(theta_hat) and sin(phi_hat), one angle at a time.

    Each angle is treated as the only unknown with the other held at truth:
    mse = sigma^2/(112 M) * lam/(sigma^2 - lam)^2 * |a^H e_1|^2 / sum_n |d^H e_n|^2.
    """
    _check_inputs(theta, geom, xi_, sigma_w_sq, M)
    a, es = _model_eigensystem(theta, phi, geom, wavelength, xi_, sigma_w_sq)
    lam = es.eigenvalues[0]
    num = sigma_w_sq / (112 * M) * lam / (sigma_w_sq - lam) ** 2 * abs(a.conj() @ es.signal) ** 2
    alpha, beta = manifold_derivatives(theta, phi, geom, wavelength)
    h_th = float(np.sum(np.abs(alpha.conj() @ es.noise) ** 2))
    h_ph = float(np.sum(np.abs(beta.conj() @ es.noise) ** 2))
    mse_ph = num / h_ph if h_ph > 0 else math.inf
    return float(num / h_th), float(mse_ph)


def aoa_mse_joint(theta, phi, geom: ArrayGeometry, wavelength: float, xi_: float, sigma_w_sq: float, M: int):
    """Asymptotic MSE of (sin theta_hat, sin phi_hat) with both angles unknown.

    Uses the full 2x2 curvature matrix H_ij = Re(d_i^H P_n d_j); the error
    covariance is the scalar factor times inv(H).  Differs from the one-angle
    value whenever the two derivative directions are correlated.
    """
    _check_inputs(theta, geom, xi_, sigma_w_sq, M)
    a, es = _model_eigensystem(theta, phi, geom, wavelength, xi_, sigma_w_sq)
    lam = es.eigenvalues[0]
    num = sigma_w_sq / (112 * M) * lam / (sigma_w_sq - lam) ** 2 * abs(a.conj() @ es.signal) ** 2
    alpha, beta = manifold_derivatives(theta, phi, geom, wavelength)
    Dn = np.stack([alpha, beta]).conj() @ es.noise
    H = np.real(Dn @ Dn.conj().T)
    if abs(np.linalg.det(H)) <= 1e-12 * np.abs(H).max() ** 2:
        raise ValueError("angles not jointly identifiable at this geometry")
    cov = num * np.linalg.inv(H)
    return float(cov[0, 0]), float(cov[1, 1])


def dump_spectrum_csv(path, theta_grid, phi_grid, P) -> None:
    TH, PH = np.meshgrid(theta_grid, phi_grid, indexing="ij")
    np.savetxt(
        path,
        np.column_stack([TH.ravel(), PH.ravel(), np.asarray(P).ravel()]),
        delimiter=",",
        header="theta,phi,P",
        comments="",
    )
