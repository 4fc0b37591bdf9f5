"""Synthetic pulse-train fixtures, reproducible Gaussian noise, and metrics.

The noise generator is pinned to a fixed bit-level contract so fixtures can
be regenerated identically anywhere: a SplitMix64 stream seeded by the user
produces 64-bit words, uniforms are (word >> 11) * 2**-53, and Gaussians come
from the Box-Muller transform consuming two uniforms per pair (pairs emitted
in order, u1 = 0 rejected).
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .prox import as_signal

_U64 = np.uint64(0xFFFFFFFFFFFFFFFF)
_GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_MIX1 = np.uint64(0xBF58476D1CE4E5B9)
_MIX2 = np.uint64(0x94D049BB133111EB)

#: Desk-scale default test signal: five pulses mixing narrow/wide widths and
#: positive/negative amplitudes on a zero baseline of 300 samples.
DEFAULT_LENGTH = 300
DEFAULT_PULSES = (
    (30, 15, 2.0),
    (90, 8, -1.5),
    (140, 30, 1.0),
    (210, 5, 3.0),
    (250, 20, -2.0),
)


@dataclass(frozen=True)
class PulseSpec:
    """Sparse pulse-train description: signal length plus
    (start, width, amplitude) triples written onto a zero baseline."""

    length: int
    pulses: tuple = ()

    def __post_init__(self):
        if int(self.length) != self.length or self.length < 1:
            raise ValueError(f"length must be a positive integer, got {self.length!r}")
        object.__setattr__(self, "length", int(self.length))
        norm = []
        for p in self.pulses:
            start, width, amp = p
            if int(start) != start or int(width) != width:
                raise ValueError(f"pulse start/width must be integers, got {p!r}")
            start, width, amp = int(start), int(width), float(amp)
            if width < 1:
                raise ValueError(f"pulse width must be >= 1, got {p!r}")
            if start < 0 or start + width > self.length:
                raise ValueError(f"pulse {p!r} falls outside the signal of length {self.length}")
            if not np.isfinite(amp):
                raise ValueError(f"pulse amplitude must be finite, got {p!r}")
            norm.append((start, width, amp))
        norm.sort(key=lambda t: t[0])
        for prev, cur in zip(norm, norm[1:]):
            if cur[0] < prev[0] + prev[1]:
                raise ValueError(f"pulses {prev!r} and {cur!r} overlap")
        object.__setattr__(self, "pulses", tuple(norm))


@dataclass(frozen=True)
class NoiseSpec:
    """Additive white Gaussian noise description: standard deviation and the
    64-bit seed of the deterministic generator."""

    sigma: float
    seed: int = 0

    def __post_init__(self):
        sigma = float(self.sigma)
        if not np.isfinite(sigma) or sigma < 0.0:
            raise ValueError(f"sigma must be finite and >= 0, got {self.sigma!r}")
        object.__setattr__(self, "sigma", sigma)
        if int(self.seed) != self.seed or not (0 <= self.seed < 2**64):
            raise ValueError(f"seed must be a 64-bit unsigned integer, got {self.seed!r}")
        object.__setattr__(self, "seed", int(self.seed))


def default_pulse_spec() -> PulseSpec:
    """The default desk-scale fixture used throughout the test harness."""
    return PulseSpec(DEFAULT_LENGTH, DEFAULT_PULSES)


def generate_pulses(spec: PulseSpec):
    """Render a PulseSpec: zero baseline with each pulse's amplitude written
    over [start, start + width)."""
    if not isinstance(spec, PulseSpec):
        spec = PulseSpec(*spec)
    x = np.zeros(spec.length)
    for start, width, amp in spec.pulses:
        x[start : start + width] = amp
    return x


def _splitmix64(seed, count):
    """First `count` words of the SplitMix64 stream for `seed`."""
    idx = np.arange(1, count + 1, dtype=np.uint64)
    z = (np.uint64(seed) + idx * _GOLDEN) & _U64
    z = ((z ^ (z >> np.uint64(30))) * _MIX1) & _U64
    z = ((z ^ (z >> np.uint64(27))) * _MIX2) & _U64
    return z ^ (z >> np.uint64(31))


def standard_normal(n, seed):
    """n standard-normal draws from the pinned SplitMix64 + Box-Muller chain."""
    n = int(n)
    if n < 0:
        raise ValueError(f"n must be >= 0, got {n}")
    if n == 0:
        return np.zeros(0)
    npairs = (n + 1) // 2
    nwords = 2 * npairs
    u = (_splitmix64(seed, nwords) >> np.uint64(11)) * 2.0**-53
    if np.any(u[0::2] == 0.0):
        u = _reject_zero_u1(seed, npairs, u)
    u1 = u[0::2]
    u2 = u[1::2]
    radius = np.sqrt(-2.0 * np.log(u1))
    angle = (2.0 * np.pi) * u2
    out = np.empty(2 * npairs)
    out[0::2] = radius * np.cos(angle)
    out[1::2] = radius * np.sin(angle)
    return out[:n]


def _reject_zero_u1(seed, npairs, u):
    # A zero word in u1 position occurs with probability 2**-53 per pair;
    # when it does, the word is skipped and the stream re-paired.
    words = u
    picked = np.empty(2 * npairs)
    i = 0
    j = 0
    while j < 2 * npairs:
        if i >= words.size:
            grow = (_splitmix64(seed, 2 * words.size + 8) >> np.uint64(11)) * 2.0**-53
            words = grow
        u1 = words[i]
        if j % 2 == 0 and u1 == 0.0:
            i += 1
            continue
        picked[j] = u1
        i += 1
        j += 1
    return picked


def add_awgn(x, noise: NoiseSpec):
    """x plus deterministic white Gaussian noise; sigma = 0 returns x exactly."""
    x = as_signal(x, "x")
    if noise.sigma == 0.0:
        return x.copy()
    return x + noise.sigma * standard_normal(x.size, noise.seed)


def lambda1_heuristic(n, sigma, beta=0.25):
    """Difference-penalty weight beta * sqrt(n) * sigma (beta usually 1/4)."""
    n = int(n)
    if n < 1:
        raise ValueError(f"n must be positive, got {n}")
    sigma = float(sigma)
    if not np.isfinite(sigma) or sigma < 0.0:
        raise ValueError(f"sigma must be finite and >= 0, got {sigma!r}")
    beta = float(beta)
    if not np.isfinite(beta) or beta <= 0.0:
        raise ValueError(f"beta must be positive, got {beta!r}")
    return beta * np.sqrt(n) * sigma


def lambda0_grid(n, sigma, beta=0.25):
    """Candidate lambda0 values {0.05, 0.10, ..., 1.0} * beta*sqrt(n)*sigma
    used to tune lambda0 for lowest RMSE."""
    scale = lambda1_heuristic(n, sigma, beta)
    return np.arange(1, 21) * 0.05 * scale


def rmse(x, reference):
    """Root mean squared error between two equal-length signals."""
    x = as_signal(x, "x")
    reference = as_signal(reference, "reference")
    if x.size != reference.size:
        raise ValueError(f"length mismatch: {x.size} vs {reference.size}")
    d = x - reference
    return float(np.sqrt(np.dot(d, d) / x.size))
