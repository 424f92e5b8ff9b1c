"""Strictly convex scalar flux functions and the slow-decay potential.

A flux bundles the four evaluators needed throughout the package: f, f', f''
and the inverse of f', together with the closed interval of states on which
they are trusted.  Two built-in fluxes are provided (quadratic and
exponential); arbitrary strictly convex fluxes can be registered
programmatically through :class:`ConvexFlux`.

The potential ``g`` drives the sharp periodic decay bound: after normalizing
the flux so that f(ubar) = f'(ubar) = 0,

    g(v) = int_0^v [ (f')^{-1}(s) - ubar ] ds,

which is strictly convex with g(0) = g'(0) = 0.  The crossing point ``z(t)``
solves g(z/t) = g((z - p)/t) on (0, p) and yields the envelope
(f')^{-1}((z-p)/t) <= u <= (f')^{-1}(z/t) for mean-``ubar`` periodic data.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable

import numpy as np
from scipy.integrate import quad
from scipy.special import xlogy


class DomainError(ValueError):
    """Evaluation requested outside a flux's trusted interval."""


class DegenerateJumpError(ValueError):
    """Rankine-Hugoniot speed requested for equal left/right states."""


class ConvexityError(ValueError):
    """Registered flux failed the strict-convexity checks."""


_DOMAIN_SLACK = 1e-12


@dataclass(frozen=True)
class Interval:
    """Closed real interval [lo, hi]."""

    lo: float
    hi: float

    def __post_init__(self) -> None:
        if not self.lo < self.hi:
            raise ValueError(f"degenerate interval [{self.lo}, {self.hi}]")

    def contains(self, x, slack: float = _DOMAIN_SLACK) -> bool:
        x = np.asarray(x, dtype=float)
        pad = slack * max(1.0, abs(self.lo), abs(self.hi))
        return bool(np.all(x >= self.lo - pad) and np.all(x <= self.hi + pad))

    @property
    def width(self) -> float:
        return self.hi - self.lo


class ConvexFlux:
    """C^2 strictly convex flux with explicit evaluators.

    All evaluators accept scalars or numpy arrays.  Calls outside ``domain``
    (resp. outside the slope range for ``inv_deriv``) raise ``DomainError``.
    """

    def __init__(
        self,
        name: str,
        value_fn: Callable,
        deriv_fn: Callable,
        second_deriv_fn: Callable,
        inv_deriv_fn: Callable,
        domain: Interval,
        _validate: bool = True,
    ):
        self.name = name
        self._value = value_fn
        self._deriv = deriv_fn
        self._second = second_deriv_fn
        self._inv = inv_deriv_fn
        self.domain = domain
        if _validate:
            self._check_convexity()

    # -- evaluators ---------------------------------------------------------

    def eval(self, u):
        self._require_state(u)
        return self._value(u)

    def deriv(self, u):
        self._require_state(u)
        return self._deriv(u)

    def second_deriv(self, u):
        self._require_state(u)
        return self._second(u)

    def inv_deriv(self, v):
        rng = self.slope_range()
        if not rng.contains(v, slack=1e-9):
            raise DomainError(
                f"slope {v} outside range [{rng.lo}, {rng.hi}] of {self.name}'"
            )
        return self._inv(v)

    def slope_range(self) -> Interval:
        return Interval(float(self._deriv(self.domain.lo)), float(self._deriv(self.domain.hi)))

    # -- helpers ------------------------------------------------------------

    def _require_state(self, u) -> None:
        if not self.domain.contains(u):
            raise DomainError(
                f"state {u} outside domain [{self.domain.lo}, {self.domain.hi}] of {self.name}"
            )

    def _check_convexity(self, n: int = 65) -> None:
        us = np.linspace(self.domain.lo, self.domain.hi, n)
        d2 = np.asarray(self._second(us), dtype=float)
        if not np.all(d2 > 0.0):
            raise ConvexityError(f"{self.name}: second derivative not strictly positive")
        d1 = np.asarray(self._deriv(us), dtype=float)
        if not np.all(np.diff(d1) > 0.0):
            raise ConvexityError(f"{self.name}: derivative not strictly increasing")
        back = np.asarray(self._inv(d1), dtype=float)
        err = np.max(np.abs(back - us))
        if err > 1e-10 * max(1.0, abs(self.domain.lo), abs(self.domain.hi)):
            raise ConvexityError(f"{self.name}: inv_deriv(deriv(u)) deviates by {err}")

    def __repr__(self) -> str:
        return f"ConvexFlux({self.name!r}, domain=[{self.domain.lo}, {self.domain.hi}])"


def burgers(lo: float = -512.0, hi: float = 512.0) -> ConvexFlux:
    """Quadratic flux f(u) = u^2 / 2."""
    return ConvexFlux(
        "burgers",
        lambda u: 0.5 * np.multiply(u, u),
        lambda u: np.asarray(u, dtype=float) if np.ndim(u) else float(u),
        lambda u: np.ones_like(np.asarray(u, dtype=float)) if np.ndim(u) else 1.0,
        lambda v: np.asarray(v, dtype=float) if np.ndim(v) else float(v),
        Interval(lo, hi),
    )


def exp_flux(lo: float = -12.0, hi: float = 12.0) -> ConvexFlux:
    """Exponential flux f(u) = e^u - 1 - u (already normalized at u = 0).

    The default domain keeps the slope e^u - 1 far enough from its lower
    asymptote -1 that inverting it through log1p stays accurate.
    """
    return ConvexFlux(
        "exp",
        lambda u: np.expm1(u) - u,
        np.expm1,
        np.exp,
        np.log1p,
        Interval(lo, hi),
    )


def rh_speed(flux: ConvexFlux, ul: float, ur: float) -> float:
    """Rankine-Hugoniot chord speed (f(ul) - f(ur)) / (ul - ur).

    Lies strictly between f'(min(ul,ur)) and f'(max(ul,ur)) for convex f.
    """
    if ul == ur:
        raise DegenerateJumpError("rh_speed undefined for ul == ur")
    return float((flux.eval(ul) - flux.eval(ur)) / (ul - ur))


class NormalizedFlux(ConvexFlux):
    """Flux with the tangent line at ``ubar`` subtracted.

    eval(ubar) = deriv(ubar) = 0 while the second derivative is untouched, so
    shock speeds and entropy structure are preserved up to the affine shift.
    """

    def __init__(self, base: ConvexFlux, ubar: float):
        base._require_state(ubar)
        fb = float(base.eval(ubar))
        db = float(base.deriv(ubar))
        super().__init__(
            f"{base.name}@{ubar:g}",
            lambda u: base._value(u) - fb - db * (np.asarray(u, dtype=float) - ubar),
            lambda u: base._deriv(u) - db,
            base._second,
            lambda v: base._inv(np.asarray(v, dtype=float) + db),
            base.domain,
            _validate=False,
        )
        self.base = base
        self.ubar = float(ubar)
        if abs(float(self.eval(ubar))) > 1e-12 or abs(float(self.deriv(ubar))) > 1e-12:
            raise ConvexityError("normalization failed to zero out f and f' at ubar")


def normalize(flux: ConvexFlux, ubar: float) -> NormalizedFlux:
    """Subtract the tangent line at ubar so f(ubar) = f'(ubar) = 0."""
    if isinstance(flux, NormalizedFlux) and flux.ubar == ubar:
        return flux
    return NormalizedFlux(flux, ubar)


def _closed_form_g(nf: NormalizedFlux) -> Callable | None:
    base = getattr(nf, "base", None)
    if base is None:
        return None
    if base.name == "burgers":
        # inverse derivative of the normalized flux is v + ubar, so g(v) = v^2/2
        return lambda v: 0.5 * v * v
    if base.name == "exp" and nf.ubar == 0.0:
        return lambda v: float(xlogy(1.0 + v, 1.0 + v) - v)
    return None


class GPotential:
    """g(v) = int_0^v [(f')^{-1}(s) - ubar] ds for a normalized flux."""

    def __init__(self, flux: NormalizedFlux, closed_form: Callable | None = None):
        if not isinstance(flux, NormalizedFlux):
            raise TypeError("GPotential requires a NormalizedFlux")
        self.flux = flux
        self.closed_form = closed_form if closed_form is not None else _closed_form_g(flux)

    def eval(self, v: float) -> float:
        v = float(v)
        rng = self.flux.slope_range()
        if not (rng.contains(v, slack=1e-9) and rng.contains(0.0)):
            raise DomainError(f"g({v}): slope outside inverse-derivative range")
        if self.closed_form is not None:
            return float(self.closed_form(v))
        if v == 0.0:
            return 0.0
        ubar = self.flux.ubar
        integrand = lambda s: float(self.flux.inv_deriv(s)) - ubar
        val, _ = quad(integrand, 0.0, v, epsabs=1e-13, epsrel=1e-12, limit=200)
        return float(val)


def g_potential(flux: ConvexFlux, ubar: float) -> GPotential:
    """Normalize ``flux`` at ``ubar`` and wrap the decay potential g."""
    return GPotential(normalize(flux, ubar))


def g_of(gp: GPotential, v: float) -> float:
    return gp.eval(v)


def z_of(gp: GPotential, p: float, t: float) -> float:
    """Unique root z in (0, p) of g(z/t) = g((z-p)/t).

    Bisection; the residual map z -> g(z/t) - g((z-p)/t) is strictly
    increasing, negative at 0 and positive at p.  Terminates when the residual
    drops below 1e-12 * max(1, |g(p/t)|) or after 200 bisections.
    """
    if p <= 0.0 or t <= 0.0:
        raise ValueError("z_of requires p > 0 and t > 0")
    g = gp.eval
    g_right = g(p / t)
    h = lambda z: g(z / t) - g((z - p) / t)
    tol = 1e-12 * max(1.0, abs(g_right))
    h_lo = -g(-p / t)
    h_hi = g_right
    if not (h_lo < 0.0 < h_hi):
        raise RuntimeError("z_of: residual does not change sign on (0, p)")
    lo, hi = 0.0, p
    best_z, best_h = 0.5 * p, math.inf
    for _ in range(200):
        mid = 0.5 * (lo + hi)
        if mid <= lo or mid >= hi:
            break
        val = h(mid)
        if abs(val) < abs(best_h):
            best_z, best_h = mid, val
        if abs(val) <= tol:
            return mid
        if val < 0.0:
            lo = mid
        else:
            hi = mid
    return best_z
