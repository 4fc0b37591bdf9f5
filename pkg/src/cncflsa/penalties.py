"""Parameterized sparsity-inducing penalties and their smooth concave residuals.

Every penalty phi(x; a) here is symmetric, strictly increasing and concave on
the positive axis, has unit slope at the origin, and second derivative bounded
below by -a.  The parameter a >= 0 sets the degree of non-convexity; a = 0
recovers the absolute value for every kind.  The residual s(x; a) =
phi(x; a) - |x| is twice continuously differentiable (including at 0) and
concave with -a <= s'' <= 0, which is what makes the tangent-line majorizer
in :meth:`PenaltySpec.majorizer` valid.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

KINDS = ("l1", "log", "atan", "rational")

_SQRT3 = np.sqrt(3.0)


def _match(out, like):
    """Return a float for scalar input, the array otherwise."""
    if np.isscalar(like) or getattr(like, "ndim", 1) == 0:
        return float(out)
    return out


@dataclass(frozen=True)
class PenaltySpec:
    """Selects a sparsity penalty: kind plus non-convexity degree ``a``.

    ``a`` has units of 1/amplitude.  Kind "l1" behaves exactly like any other
    kind with a = 0 and is normalized to a = 0 on construction.
    """

    kind: str = "l1"
    a: float = 0.0

    def __post_init__(self):
        if self.kind not in KINDS:
            raise ValueError(f"unknown penalty kind {self.kind!r}; expected one of {KINDS}")
        a = float(self.a)
        if not np.isfinite(a) or a < 0.0:
            raise ValueError(f"penalty parameter a must be finite and >= 0, got {self.a!r}")
        if self.kind == "l1":
            a = 0.0
        object.__setattr__(self, "a", a)

    def value(self, x):
        """Penalty value phi(x; a), elementwise; phi(0) = 0 and phi(-x) = phi(x)."""
        ax = np.abs(np.asarray(x, dtype=float))
        a = self.a
        if a == 0.0:
            return _match(ax, x)
        if self.kind == "log":
            out = np.log1p(a * ax) / a
        elif self.kind == "atan":
            # Difference of two arctangents folded into one; avoids
            # cancellation for small a*|x|.
            u = a * ax
            out = (2.0 / (a * _SQRT3)) * np.arctan(_SQRT3 * u / (2.0 + u))
        else:  # rational
            out = ax / (1.0 + 0.5 * a * ax)
        return _match(out, x)

    def residual(self, x):
        """Smooth concave part s(x; a) = phi(x; a) - |x|.

        Computed from closed forms per kind rather than as a numerical
        difference, which would cancel catastrophically near 0.
        """
        xa = np.asarray(x, dtype=float)
        a = self.a
        if a == 0.0:
            return _match(np.zeros_like(xa), x)
        ax = np.abs(xa)
        u = a * ax
        if self.kind == "log":
            # log1p(u) is within a factor two of u here, so the subtraction
            # is exact and the result carries no cancellation error.
            out = (np.log1p(u) - u) / a
        elif self.kind == "atan":
            out = ((2.0 / _SQRT3) * np.arctan(_SQRT3 * u / (2.0 + u)) - u) / a
        else:  # rational
            out = -(0.5 * a * xa * xa) / (1.0 + 0.5 * u)
        return _match(out, x)

    def residual_deriv(self, x):
        """Derivative s'(x; a); odd, continuous, s'(0) = 0, |s'| < 1."""
        xa = np.asarray(x, dtype=float)
        a = self.a
        if a == 0.0:
            return _match(np.zeros_like(xa), x)
        ax = np.abs(xa)
        u = a * ax
        if self.kind == "log":
            out = -a * xa / (1.0 + u)
        elif self.kind == "atan":
            out = -4.0 * a * xa * (1.0 + u) / (3.0 + (1.0 + 2.0 * u) ** 2)
        else:  # rational
            out = -a * xa * (1.0 + 0.25 * u) / (1.0 + 0.5 * u) ** 2
        return _match(out, x)

    def majorizer(self, x, v):
        """Tangent-line majorizer |x| + s'(v)(x - v) + s(v).

        Dominates phi everywhere and touches it at x = v, because the tangent
        line to the concave residual s at v lies above s.
        """
        x = np.asarray(x, dtype=float)
        out = np.abs(x) + self.residual_deriv(v) * (x - v) + self.residual(v)
        return _match(out, x)
