"""Exact proximal kernels for fused-lasso denoising.

Soft thresholding, the first-difference operator and its adjoint, exact 1-D
total variation denoising in worst-case linear time, the two-step fused
lasso solve built from them, and subgradient-optimality oracles used to
certify solutions independently of the solvers.
"""

from __future__ import annotations

import numpy as np


def as_signal(x, name="signal"):
    """Validate and return a 1-D float array with finite entries."""
    out = np.asarray(x, dtype=float)
    if out.ndim != 1:
        raise ValueError(f"{name} must be one-dimensional, got shape {out.shape}")
    if out.size < 1:
        raise ValueError(f"{name} must contain at least one sample")
    if not np.all(np.isfinite(out)):
        raise ValueError(f"{name} contains non-finite samples")
    return out


def _check_nonneg(value, name):
    value = float(value)
    if not np.isfinite(value) or value < 0.0:
        raise ValueError(f"{name} must be finite and >= 0, got {value!r}")
    return value


def soft_threshold(x, lam):
    """Shrink toward zero by lam, flattening the band |x| <= lam to exactly 0."""
    lam = _check_nonneg(lam, "lam")
    xa = np.asarray(x, dtype=float)
    if not np.all(np.isfinite(xa)):
        raise ValueError("x contains non-finite samples")
    out = np.sign(xa) * np.maximum(np.abs(xa) - lam, 0.0)
    if np.isscalar(x) or xa.ndim == 0:
        return float(out)
    return out


def diff(x):
    """First differences: out[n] = x[n+1] - x[n]; requires len(x) >= 2."""
    x = as_signal(x, "x")
    if x.size < 2:
        raise ValueError("diff requires at least 2 samples")
    return np.diff(x)


def diff_adjoint(z):
    """Adjoint of :func:`diff`: maps length N-1 back to length N.

    Satisfies <diff(x), z> == <x, diff_adjoint(z)> exactly in exact
    arithmetic.
    """
    z = as_signal(z, "z")
    n = z.size
    out = np.empty(n + 1)
    out[0] = -z[0]
    out[-1] = z[-1]
    if n > 1:
        out[1:-1] = z[:-1] - z[1:]
    return out


def tvd(y, lam):
    """Exact minimizer of 0.5*||y - x||^2 + lam * sum |x[n+1] - x[n]|.

    Direct non-iterative solve.  The forward pass maintains the
    piecewise-linear derivative of the running optimal-cost function as a
    list of breakpoints and clamps it between the lower bound -lam and the
    upper bound +lam, recording the clamp locations for every sample; the
    backward pass recovers the solution by clipping each sample between its
    recorded bounds.  Every breakpoint enters and leaves the active list at
    most once, so the worst case is linear in N.

    Parameters
    ----------
    y : array_like
        Input samples (1-D, finite).
    lam : float
        Regularization weight, >= 0.  lam = 0 returns y unchanged; for
        lam large enough the output is the constant mean of y.

    Returns
    -------
    numpy.ndarray
        The unique minimizer, same length as y.
    """
    y = as_signal(y, "y")
    lam = _check_nonneg(lam, "lam")
    n = y.size
    if n == 1 or lam == 0.0:
        return y.copy()

    ys = y.tolist()
    cap = 2 * n
    pos = [0.0] * cap
    d_a = [0.0] * cap
    d_b = [0.0] * cap
    head, tail = n, n - 1
    lo_clamp = [0.0] * (n - 1)
    hi_clamp = [0.0] * (n - 1)

    # Leftmost / rightmost affine pieces of the current derivative.
    a_left, b_left = 1.0, -ys[0]
    a_right, b_right = 1.0, -ys[0]

    for i in range(n - 1):
        # Where the derivative reaches -lam, scanning from the left.
        a, b = a_left, b_left
        k = head
        while k <= tail and a * pos[k] + b < -lam:
            a += d_a[k]
            b += d_b[k]
            k += 1
        lo = (-lam - b) / a
        head = k - 1
        pos[head] = lo
        d_a[head] = a
        d_b[head] = b + lam

        # Where the derivative reaches +lam, scanning from the right.  The
        # crossing never lies left of the fresh lower clamp, so that knot is
        # never consumed.
        a, b = a_right, b_right
        k = tail
        while k > head and a * pos[k] + b > lam:
            a -= d_a[k]
            b -= d_b[k]
            k -= 1
        hi = (lam - b) / a
        tail = k + 1
        pos[tail] = hi
        d_a[tail] = -a
        d_b[tail] = lam - b

        lo_clamp[i] = lo
        hi_clamp[i] = hi

        nxt = ys[i + 1]
        a_left, b_left = 1.0, -nxt - lam
        a_right, b_right = 1.0, -nxt + lam

    # Root of the final derivative gives the last sample.
    a, b = a_left, b_left
    k = head
    while k <= tail and a * pos[k] + b < 0.0:
        a += d_a[k]
        b += d_b[k]
        k += 1
    x = np.empty(n)
    x[n - 1] = -b / a
    for i in range(n - 2, -1, -1):
        xi = x[i + 1]
        if xi < lo_clamp[i]:
            xi = lo_clamp[i]
        elif xi > hi_clamp[i]:
            xi = hi_clamp[i]
        x[i] = xi
    return x


def tvd_optimality_residual(y, x, lam):
    """Maximum subgradient-optimality violation of x for the TV problem.

    Reconstructs the dual variables u from x - y = -lam * diff_adjoint(u)
    and measures how far u is from being a valid subgradient of
    lam * ||diff(x)||_1: |u| must not exceed 1, u must equal sign of the
    corresponding nonzero difference, and the residual y - x must sum to
    zero.  Returns 0 (up to roundoff) iff x is the minimizer.
    """
    y = as_signal(y, "y")
    x = as_signal(x, "x")
    if y.size != x.size:
        raise ValueError(f"length mismatch: {y.size} vs {x.size}")
    lam = _check_nonneg(lam, "lam")
    r = y - x
    if lam == 0.0:
        return float(np.max(np.abs(r)))
    p = np.cumsum(r)
    worst = abs(p[-1]) / lam
    if y.size == 1:
        return float(worst)
    u = -p[:-1] / lam
    d = np.diff(x)
    jump = d != 0.0
    if np.any(jump):
        worst = max(worst, np.max(np.abs(u[jump] - np.sign(d[jump]))))
    if np.any(~jump):
        worst = max(worst, max(0.0, np.max(np.abs(u[~jump])) - 1.0))
    return float(worst)


def fused_lasso_l1(y, lam0, lam1):
    """Exact fused lasso solve: soft threshold the TV-denoised signal.

    Minimizes 0.5*||y - x||^2 + lam0*||x||_1 + lam1*||diff(x)||_1.
    """
    lam0 = _check_nonneg(lam0, "lam0")
    lam1 = _check_nonneg(lam1, "lam1")
    return soft_threshold(tvd(y, lam1), lam0)


def fused_lasso_optimality_residual(y, x, lam0, lam1):
    """Maximum subgradient-optimality violation of x for the fused lasso.

    Certifies y - x = lam0*g + lam1*diff_adjoint(u) for some g in the
    subdifferential of ||x||_1 and u in the subdifferential of
    ||diff(x)||_1.  Fixed components of g and u are pinned by the signs of
    nonzero entries; the free ones are chased by exact interval propagation
    along the chain of cumulative sums.  Violations are reported in the
    dimensionless units of u (or of g when lam1 = 0).
    """
    y = as_signal(y, "y")
    x = as_signal(x, "x")
    if y.size != x.size:
        raise ValueError(f"length mismatch: {y.size} vs {x.size}")
    lam0 = _check_nonneg(lam0, "lam0")
    lam1 = _check_nonneg(lam1, "lam1")
    r = y - x

    if lam0 == 0.0 and lam1 == 0.0:
        return float(np.max(np.abs(r)))
    if lam1 == 0.0:
        g = r / lam0
        nz = x != 0.0
        worst = 0.0
        if np.any(nz):
            worst = np.max(np.abs(g[nz] - np.sign(x[nz])))
        if np.any(~nz):
            worst = max(worst, max(0.0, np.max(np.abs(g[~nz])) - 1.0))
        return float(worst)
    if lam0 == 0.0:
        return tvd_optimality_residual(y, x, lam1)

    n = x.size
    d = np.diff(x)
    # Reachable interval for the cumulative sum lam0 * (g_0 + ... + g_k).
    lo = hi = 0.0
    total = 0.0
    worst = 0.0
    for k in range(n):
        total += r[k]
        if x[k] != 0.0:
            step = lam0 * np.sign(x[k])
            lo += step
            hi += step
        else:
            lo -= lam0
            hi += lam0
        if k < n - 1:
            if d[k] != 0.0:
                c_lo = c_hi = total + lam1 * np.sign(d[k])
            else:
                c_lo, c_hi = total - lam1, total + lam1
        else:
            c_lo = c_hi = total
        gap = max(0.0, c_lo - hi, lo - c_hi)
        worst = max(worst, gap / lam1)
        if gap > 0.0:
            point = c_lo if hi < c_lo else c_hi
            lo = hi = point
        else:
            lo = max(lo, c_lo)
            hi = min(hi, c_hi)
    return float(worst)
