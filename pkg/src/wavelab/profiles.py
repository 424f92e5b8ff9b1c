"""Periodic piecewise profiles and perturbed Riemann initial data.

A profile is a p-periodic function assembled from constant pieces and linear
ramps.  Pieces are given as (width, value) or (width, left, right) tuples
whose widths sum to the period.  Exact piecewise arithmetic supplies the
mean, the essential bounds, the primitive of a zero-mean profile and the
leftmost minimizer of that primitive, which anchors the divide lines

    x = a + N p + f'(ubar) t

on which the periodic entropy solution stays equal to ubar.
"""
from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

from .fluxes import ConvexFlux, DegenerateJumpError, burgers, normalize, rh_speed

_BOUND_PAD = 1e-12


class ProfileError(ValueError):
    """Malformed piece list or precondition violation."""


@dataclass(frozen=True)
class Piece:
    """One piece of a periodic profile on [start, start + width)."""

    start: float
    width: float
    left: float
    right: float

    @property
    def is_constant(self) -> bool:
        return self.left == self.right

    @property
    def slope(self) -> float:
        return (self.right - self.left) / self.width

    def value_at(self, xi):
        """Value at local offset xi in [0, width]."""
        return self.left + (self.right - self.left) * (np.asarray(xi, dtype=float) / self.width)

    def integral_to(self, xi):
        """Integral of the piece over [0, xi]."""
        xi = np.asarray(xi, dtype=float)
        return self.left * xi + 0.5 * (self.right - self.left) * xi * xi / self.width


class PeriodicProfile:
    """p-periodic piecewise constant/linear profile."""

    def __init__(self, period: float, pieces: Sequence[Piece]):
        if period <= 0.0:
            raise ProfileError("period must be positive")
        if not pieces:
            raise ProfileError("profile needs at least one piece")
        starts = [pc.start for pc in pieces]
        if starts[0] != 0.0 or any(w <= 0 for w in (pc.width for pc in pieces)):
            raise ProfileError("pieces must start at 0 with positive widths")
        end = 0.0
        for pc in pieces:
            if abs(pc.start - end) > 1e-12 * period:
                raise ProfileError("pieces must tile the period without gaps")
            end = pc.start + pc.width
        if abs(end - period) > 1e-12 * period:
            raise ProfileError(f"piece widths sum to {end}, expected period {period}")
        self.period = float(period)
        self.pieces = tuple(pieces)
        self._starts = np.array(starts, dtype=float)
        # cumulative integral of the profile up to each piece start
        cum = np.zeros(len(pieces) + 1)
        for j, pc in enumerate(pieces):
            cum[j + 1] = cum[j] + float(pc.integral_to(pc.width))
        self._cumint = cum
        self.mean = float(cum[-1] / period)
        vals = [v for pc in pieces for v in (pc.left, pc.right)]
        self.lower_bound = min(vals) - _BOUND_PAD
        self.upper_bound = max(vals) + _BOUND_PAD

    @classmethod
    def from_spec(cls, period: float, piece_specs: Iterable[Sequence[float]]) -> "PeriodicProfile":
        """Build from (width, value) / (width, left, right) tuples."""
        pieces = []
        start = 0.0
        for spec in piece_specs:
            spec = tuple(float(s) for s in spec)
            if len(spec) == 2:
                w, v = spec
                pieces.append(Piece(start, w, v, v))
            elif len(spec) == 3:
                w, a, b = spec
                pieces.append(Piece(start, w, a, b))
            else:
                raise ProfileError(f"piece spec {spec} must have 2 or 3 entries")
            start += pieces[-1].width
        return cls(period, pieces)

    # -- evaluation ---------------------------------------------------------

    def _locate(self, x):
        arr = np.atleast_1d(np.asarray(x, dtype=float))
        red = arr - self.period * np.floor(arr / self.period)
        red = np.where(red >= self.period, 0.0, red)  # guard rounding at the seam
        idx = np.searchsorted(self._starts, red, side="right") - 1
        return red, idx

    def eval(self, x):
        """Profile value, right-continuous at breakpoints."""
        red, idx = self._locate(x)
        out = np.empty_like(red)
        for j, pc in enumerate(self.pieces):
            m = idx == j
            if np.any(m):
                out[m] = pc.value_at(red[m] - pc.start)
        return out if np.ndim(x) else float(out[0])

    def primitive(self, x):
        """W(x) = int_0^x of the profile; requires zero mean (periodic W)."""
        if abs(self.mean) > 1e-12:
            raise ProfileError(f"primitive needs zero mean, got {self.mean}")
        red, idx = self._locate(x)
        out = self._cumint[idx].copy()
        for j, pc in enumerate(self.pieces):
            m = idx == j
            if np.any(m):
                out[m] += pc.integral_to(red[m] - pc.start)
        return out if np.ndim(x) else float(out[0])

    def shift_to_zero_mean(self) -> tuple["PeriodicProfile", float]:
        """Subtract the mean from every piece; returns (shifted, mean)."""
        mu = self.mean
        shifted = PeriodicProfile(
            self.period,
            [Piece(pc.start, pc.width, pc.left - mu, pc.right - mu) for pc in self.pieces],
        )
        return shifted, mu

    def argmin_primitive(self) -> float:
        """Leftmost point of [0, p) minimizing the primitive."""
        if abs(self.mean) > 1e-12:
            raise ProfileError("argmin_primitive needs zero mean")
        cands = [0.0]
        for j, pc in enumerate(self.pieces):
            cands.append(pc.start + pc.width)
            # interior stationary point of W where a ramp crosses zero
            if not pc.is_constant and pc.left * pc.right < 0.0:
                cands.append(pc.start + pc.width * (-pc.left) / (pc.right - pc.left))
        xs = np.array(sorted(set(min(c, self.period) for c in cands)))
        ws = self.primitive(np.where(xs == self.period, 0.0, xs)) + 0.0
        # W(p) = W(0) for zero mean; evaluate the seam through the reduction
        wmin = float(np.min(ws))
        good = xs[ws <= wmin + 1e-12]
        a = float(np.min(good))
        return 0.0 if a >= self.period else a

    def breakpoints_in(self, lo: float, hi: float) -> np.ndarray:
        """All periodic piece boundaries inside [lo, hi]."""
        p = self.period
        out = []
        for s in self._starts:
            k0 = math.ceil((lo - s) / p)
            k1 = math.floor((hi - s) / p)
            if k1 >= k0:
                out.append(s + p * np.arange(k0, k1 + 1))
        if not out:
            return np.empty(0)
        return np.unique(np.concatenate(out))

    def __repr__(self) -> str:
        kinds = "".join("c" if pc.is_constant else "r" for pc in self.pieces)
        return f"PeriodicProfile(p={self.period}, pieces={kinds}, mean={self.mean:.3g})"


def shift_to_zero_mean(profile: PeriodicProfile) -> tuple[PeriodicProfile, float]:
    return profile.shift_to_zero_mean()


def primitive(profile: PeriodicProfile, x):
    return profile.primitive(x)


def argmin_primitive(profile: PeriodicProfile) -> float:
    return profile.argmin_primitive()


@dataclass(frozen=True)
class DivideLine:
    """Straight line x = anchor + slope * t carrying the value ubar."""

    anchor: float
    slope: float
    index: int

    def position(self, t: float) -> float:
        return self.anchor + self.slope * t


def divides(
    profile: PeriodicProfile, flux: ConvexFlux, ubar: float, n_range: Iterable[int]
) -> list[DivideLine]:
    """Divide lines through a + N p with slope f'(ubar)."""
    a = profile.argmin_primitive()
    slope = float(flux.deriv(ubar))
    return [DivideLine(a + n * profile.period, slope, int(n)) for n in n_range]


class RiemannPerturbedIC:
    """Riemann data (ul, ur) superposed with a zero-mean periodic profile."""

    def __init__(self, ul: float, ur: float, perturbation: PeriodicProfile, flux: ConvexFlux | None = None):
        if abs(perturbation.mean) > 1e-12:
            raise ProfileError("perturbation must have zero mean")
        self.ul = float(ul)
        self.ur = float(ur)
        self.perturbation = perturbation
        self.flux = flux if flux is not None else burgers()
        if ul == ur:
            self.shock_speed = float(self.flux.deriv(ul))
        else:
            self.shock_speed = rh_speed(self.flux, ul, ur)

    @property
    def alpha(self) -> float:
        return self.perturbation.lower_bound

    @property
    def beta(self) -> float:
        return self.perturbation.upper_bound

    def eval(self, x):
        """Initial value; right-continuous at the origin jump."""
        x = np.asarray(x, dtype=float)
        base = np.where(x < 0.0, self.ul, self.ur)
        out = base + self.perturbation.eval(x)
        return out if out.ndim else float(out)

    def initial_integral(self, y):
        """Exact int_0^y of the initial data."""
        y = np.asarray(y, dtype=float)
        base = np.where(y < 0.0, self.ul, self.ur) * y
        out = base + self.perturbation.primitive(y)
        return out if out.ndim else float(out)

    def __repr__(self) -> str:
        return (
            f"RiemannPerturbedIC(ul={self.ul}, ur={self.ur}, s={self.shock_speed:.6g}, "
            f"{self.perturbation!r})"
        )


@dataclass(frozen=True)
class TwoConstantProfile:
    """Periodic two-constant data: m1 + ubar then -m2 + ubar, mean ubar.

    The widths m2 p / (m1 + m2) and m1 p / (m1 + m2) balance the masses, and
    past T_P = max{p / f'(m1 + ubar), p / (-f'(-m2 + ubar))} (normalized f')
    the sharp periodic decay envelope is attained exactly.
    """

    m1: float
    m2: float
    period: float
    ubar: float = 0.0

    def __post_init__(self) -> None:
        if self.m1 <= 0 or self.m2 <= 0 or self.period <= 0:
            raise ProfileError("TwoConstantProfile needs m1, m2, period > 0")

    @property
    def first_width(self) -> float:
        return self.m2 * self.period / (self.m1 + self.m2)

    def as_profile(self) -> PeriodicProfile:
        w1 = self.first_width
        return PeriodicProfile.from_spec(
            self.period,
            [(w1, self.m1 + self.ubar), (self.period - w1, -self.m2 + self.ubar)],
        )

    def zero_mean_profile(self) -> PeriodicProfile:
        w1 = self.first_width
        return PeriodicProfile.from_spec(
            self.period, [(w1, self.m1), (self.period - w1, -self.m2)]
        )

    def t_attain(self, flux: ConvexFlux) -> float:
        """Time after which the periodic envelope is attained."""
        nf = normalize(flux, self.ubar)
        up = float(nf.deriv(self.m1 + self.ubar))
        dn = float(nf.deriv(-self.m2 + self.ubar))
        if up <= 0.0 or dn >= 0.0:
            raise ProfileError("degenerate two-constant slopes")
        return max(self.period / up, self.period / (-dn))
