"""Independent numerical oracles used to cross-check package results.

These deliberately avoid the code paths they verify: eigenvalues via cyclic
Jacobi rotations or characteristic-polynomial companion roots instead of
LAPACK, Wigner values via the position-basis quadrature integral instead of
displaced parity, separatrix areas via adaptive quadrature instead of the
closed forms.
"""

import numpy as np
from scipy.integrate import quad


def jacobi_eigenvalues(mat, tol=1e-14, max_sweeps=60):
    """Cyclic Jacobi rotation eigensolver for real symmetric matrices."""
    a = np.array(mat, dtype=float)
    n = a.shape[0]
    assert np.allclose(a, a.T)
    for _ in range(max_sweeps):
        off = np.sqrt((np.tril(a, -1) ** 2).sum())
        if off < tol * max(1.0, np.abs(a).max()):
            break
        for p in range(n - 1):
            for q in range(p + 1, n):
                apq = a[p, q]
                if abs(apq) < 1e-300:
                    continue
                theta = (a[q, q] - a[p, p]) / (2.0 * apq)
                if theta >= 0:
                    t = 1.0 / (theta + np.sqrt(theta * theta + 1.0))
                else:
                    t = -1.0 / (-theta + np.sqrt(theta * theta + 1.0))
                c = 1.0 / np.sqrt(t * t + 1.0)
                s = t * c
                rot_p = a[:, p].copy()
                rot_q = a[:, q].copy()
                a[:, p] = c * rot_p - s * rot_q
                a[:, q] = s * rot_p + c * rot_q
                rot_p = a[p, :].copy()
                rot_q = a[q, :].copy()
                a[p, :] = c * rot_p - s * rot_q
                a[q, :] = s * rot_p + c * rot_q
    return np.sort(np.diag(a))


def charpoly_roots(mat):
    """Eigenvalues via Faddeev-LeVerrier coefficients + companion-matrix roots."""
    a = np.array(mat, dtype=complex)
    n = a.shape[0]
    coeffs = [1.0 + 0j]
    m = np.zeros_like(a)
    for k in range(1, n + 1):
        m = a @ m + coeffs[-1] * np.eye(n)
        coeffs.append(-np.trace(a @ m) / k)
    return np.sort(np.roots(np.array(coeffs)).real)


def hermite_functions(dim, xs):
    """Harmonic-oscillator eigenfunctions for x = (a + a^dag)/sqrt(2)."""
    xs = np.asarray(xs, dtype=float)
    out = np.zeros((dim, len(xs)))
    out[0] = np.pi ** -0.25 * np.exp(-xs**2 / 2)
    if dim > 1:
        out[1] = np.sqrt(2.0) * xs * out[0]
    for n in range(2, dim):
        out[n] = np.sqrt(2.0 / n) * xs * out[n - 1] - np.sqrt((n - 1) / n) * out[n - 2]
    return out


def wigner_q_integral(state, x, p, qmax=25.0, nq=6001):
    """W(x,p) = (1/2pi) Int dq e^{-iqp} psi(x+q/2) psi*(x-q/2)."""
    state = np.asarray(state)
    dim = len(state)
    q = np.linspace(-qmax, qmax, nq)
    psi_plus = state @ hermite_functions(dim, x + q / 2)
    psi_minus = state @ hermite_functions(dim, x - q / 2)
    integrand = psi_plus * np.conj(psi_minus) * np.exp(-1j * q * p)
    return float(np.real(np.trapezoid(integrand, q))) / (2 * np.pi)


def separatrix_area_quadrature(delta, eps2, kerr=1.0):
    """Lobe area by adaptive quadrature of the polar separatrix integrands."""
    if delta < -2 * eps2 or eps2 == 0:
        return 0.0
    if delta < 2 * eps2:
        theta_c = 0.5 * np.arccos(-delta / (2 * eps2))
        val, err = quad(
            lambda th: 2 * delta / kerr + 4 * eps2 / kerr * np.cos(2 * th),
            0.0, theta_c, epsabs=1e-12, epsrel=1e-12)
        return val
    val, err = quad(
        lambda th: (4 * eps2 / kerr) * np.cos(th)
        * np.sqrt(max(delta / (2 * eps2) - np.sin(th) ** 2, 0.0)),
        -np.pi / 2, np.pi / 2, epsabs=1e-12, epsrel=1e-12)
    return val


def newton_critical_point(delta, eps2, kerr, x0, p0, metapotential, steps=60):
    """2D Newton iteration on the gradient of the metapotential surface."""
    z = np.array([x0, p0], dtype=float)
    h = 1e-6
    for _ in range(steps):
        def grad(pt):
            gx = (metapotential(pt[0] + h, pt[1], delta, eps2, kerr)
                  - metapotential(pt[0] - h, pt[1], delta, eps2, kerr)) / (2 * h)
            gp = (metapotential(pt[0], pt[1] + h, delta, eps2, kerr)
                  - metapotential(pt[0], pt[1] - h, delta, eps2, kerr)) / (2 * h)
            return np.array([gx, gp])
        g = grad(z)
        hess = np.zeros((2, 2))
        for j, dz in enumerate(np.eye(2) * h):
            hess[:, j] = (grad(z + dz) - grad(z - dz)) / (2 * h)
        step = np.linalg.solve(hess, g)
        z = z - step
        if np.linalg.norm(step) < 1e-12:
            break
    return z
