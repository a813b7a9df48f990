"""Independent reference implementations used only by the tests.

Each oracle takes a different route from the code under test: long division
instead of a shift register, dense matrix inverses instead of closed forms,
characteristic-polynomial roots instead of Jacobi sweeps, brute-force
correlation instead of running sums.
"""

import math

import numpy as np

# x^24 + x^23 + ... + x^12 + x^10 + x^3 + 1 written out term by term
MODE_S_POLY_TERMS = list(range(12, 25)) + [10, 3, 0]


def crc_long_division(bits):
    """Remainder of bits(x) * x^24 divided by the Mode S generator."""
    gen = [0] * 25
    for t in MODE_S_POLY_TERMS:
        gen[24 - t] = 1
    work = [int(b) for b in bits] + [0] * 24
    for i in range(len(bits)):
        if work[i]:
            for j in range(25):
                work[i + j] ^= gen[j]
    rem = work[-24:]
    return int("".join(map(str, rem)), 2)


def altitude_from_ac_string(ac: int) -> int:
    """25-ft decode by deleting the M and Q characters of the 13-bit string."""
    s = format(ac, "013b")
    # MSB-first positions: bit 6 (M) is index 6, bit 4 (Q) is index 8
    n = int(s[:6] + s[7] + s[9:], 2)
    return 25 * n - 1000


def tridiag_cov(K):
    """Covariance of K-1 first differences of unit-variance white noise."""
    C = 2 * np.eye(K - 1) - np.eye(K - 1, k=1) - np.eye(K - 1, k=-1)
    return C


def wls_grid_doppler(u, varphi, M, T_s, f_grid):
    """Grid argmin of the weighted LS cost on wrapped phase differences."""
    u = np.asarray(u, dtype=float)
    dphi = np.angle(np.exp(1j * (varphi[:-1] - varphi[1:])))
    du = u[:-1] - u[1:]
    W = np.linalg.inv(tridiag_cov(u.size))
    costs = []
    for f in f_grid:
        r = dphi - 2 * np.pi * f * M * T_s * du
        costs.append(r @ W @ r)
    return float(f_grid[int(np.argmin(costs))])


def charpoly_eigenvalues(A):
    """Eigenvalues of a Hermitian matrix from its characteristic polynomial.

    Coefficients by the Faddeev-LeVerrier recursion, roots by numpy, then a
    few Newton steps on the polynomial to polish each root.
    """
    A = np.asarray(A, dtype=complex)
    n = A.shape[0]
    coeffs = [1.0 + 0j]
    Mk = np.zeros_like(A)
    for k in range(1, n + 1):
        Mk = A @ Mk + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(A @ Mk) / k)
    c = np.array(coeffs)
    roots = np.sort(np.roots(c).real)[::-1]
    dc = np.polyder(c)
    for _ in range(5):
        step = np.polyval(c, roots) / np.polyval(dc, roots)
        roots = roots - np.real(step)
    return np.sort(roots)[::-1]


def correlation_metric_direct(y, template_chips, M, n0_values):
    """|sum_k conj(y[n0 + k]) r[k]|^2 with r expanded to M samples per chip."""
    r = np.repeat(np.asarray(template_chips, dtype=float), M)
    out = []
    for n0 in n0_values:
        out.append(abs(np.vdot(y[n0 : n0 + r.size], r)) ** 2)
    return np.array(out)


def music_denominator_loops(E_noise, theta, phi, N_x, N_y, d_x, d_y, wavelength):
    """Element-by-element evaluation of sum_n |a^H e_n|^2."""
    th, ph = math.radians(theta), math.radians(phi)
    total = 0.0
    for col in range(E_noise.shape[1]):
        acc = 0j
        idx = 0
        for n in range(N_y):
            for m in range(N_x):
                psi = 2 * math.pi / wavelength * (d_x * m * math.cos(th) + d_y * n * math.sin(th) * math.sin(ph))
                acc += np.conj(np.exp(1j * psi)) * E_noise[idx, col]
                idx += 1
        total += abs(acc) ** 2
    return total


def filtered_pulse_riemann(t_points, T, tau_r, A, B, beta, span, n_grid=400001):
    """Trapezoid convolved with a unit-energy truncated RRC on a dense grid."""
    ts = (1 + beta) / (2 * B)
    half_span = span * ts / 2
    s = np.linspace(-half_span, half_span, n_grid)
    ds = s[1] - s[0]

    def rrc(t):
        x = t / ts
        out = np.empty_like(x)
        z = np.abs(x) < 1e-12
        sing = np.abs(np.abs(4 * beta * x) - 1) < 1e-9
        reg = ~(z | sing)
        xr = x[reg]
        out[reg] = (np.sin(np.pi * xr * (1 - beta)) + 4 * beta * xr * np.cos(np.pi * xr * (1 + beta))) / (
            np.pi * xr * (1 - (4 * beta * xr) ** 2)
        )
        out[z] = 1 - beta + 4 * beta / np.pi
        q = np.pi / (4 * beta)
        out[sing] = beta / np.sqrt(2) * ((1 + 2 / np.pi) * np.sin(q) + (1 - 2 / np.pi) * np.cos(q))
        return out

    h = rrc(s)
    h /= np.sqrt(np.sum(h**2) * ds)

    def trap(t):
        half = T / 2
        return A * np.clip(np.minimum(t + half, half - t) / tau_r, 0.0, 1.0)

    return np.array([np.sum(trap(tp - s) * h) * ds for tp in t_points])
