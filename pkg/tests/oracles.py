"""Independent reference computations used only by the tests."""

import numpy as np


def circular_convolve_naive(f, x):
    """sum_l f^l * x^l by direct summation over the periodic grid."""
    H, W, d = x.shape
    out = np.zeros((H, W))
    for l in range(d):
        for n1 in range(H):
            for n2 in range(W):
                acc = 0.0
                for m1 in range(H):
                    for m2 in range(W):
                        acc += f[m1, m2, l] * x[(n1 - m1) % H, (n2 - m2) % W, l]
                out[n1, n2] += acc
    return out


def circulant_block(x):
    """Dense matrix of f -> sum_l f^l * x^l, built entry by entry."""
    H, W, d = x.shape
    n = H * W
    C = np.zeros((n, n * d))
    for l in range(d):
        for n1 in range(H):
            for n2 in range(W):
                for m1 in range(H):
                    for m2 in range(W):
                        C[n1 * W + n2, l * n + m1 * W + m2] = x[(n1 - m1) % H, (n2 - m2) % W, l]
    return C


def dense_ridge_filter(samples, alpha, lam):
    """Weighted ridge solution via stacked least squares on explicit circulants."""
    H, W, d = samples[0].features.shape
    rows, rhs = [], []
    for a, s in zip(alpha, samples):
        C = circulant_block(s.features)
        rows.append(np.sqrt(a) * C)
        rhs.append(np.sqrt(a) * s.label.ravel())
    n = H * W * d
    rows.append(np.sqrt(lam) * np.eye(n))
    rhs.append(np.zeros(n))
    f, *_ = np.linalg.lstsq(np.vstack(rows), np.concatenate(rhs), rcond=None)
    return f.reshape(d, H, W).transpose(1, 2, 0)


def weighted_objective(coeffs, samples, alpha, lam):
    total = lam * np.sum(coeffs**2)
    for a, s in zip(alpha, samples):
        r = s.label - circular_convolve_fft_free(coeffs, s.features)
        total += a * np.sum(r**2)
    return total


def circular_convolve_fft_free(f, x):
    C = circulant_block(x)
    H, W, d = x.shape
    return (C @ f.transpose(2, 0, 1).ravel()).reshape(H, W)


def priors_by_recursion(t, K, eta):
    """rho built backwards from the newest frame by the stated recursion."""
    rho = [1.0]
    for k in range(t - 1, 0, -1):
        in_window = k >= t - K
        rho.insert(0, rho[0] * (1 - eta) if in_window else rho[0])
    rho = np.array(rho)
    return rho / rho.sum()


def projected_subgradient_svm(X, y, c, lam, iterations=200000):
    """Projected sub-gradient on the ball ||w|| <= sqrt(sum c / lam), averaged tail, best iterate."""
    n, d = X.shape
    Xa = np.hstack([X, np.ones((n, 1))])
    radius = np.sqrt(c.sum() / lam)
    th = np.zeros(d + 1)

    def f(t):
        return c @ np.maximum(0, 1 - y * (Xa @ t)) + lam * t[:d] @ t[:d]

    best, best_f = th.copy(), f(th)
    for i in range(1, iterations + 1):
        act = y * (Xa @ th) < 1
        g = -((c * y) * act) @ Xa
        g[:d] += 2 * lam * th[:d]
        th = th - (0.5 / np.sqrt(i)) * g / max(c.sum(), 1e-300)
        nrm = np.linalg.norm(th[:d])
        if nrm > radius:
            th[:d] *= radius / nrm
        v = f(th)
        if v < best_f:
            best, best_f = th.copy(), v
    return best, best_f
