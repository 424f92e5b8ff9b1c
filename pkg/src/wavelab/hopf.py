"""Exact entropy solutions for the quadratic flux via the Hopf construction.

For Burgers data built from piecewise constant/linear pieces the variational
potential

    F(t, x, y) = (x - y)^2 / (2 t) + int_0^y u0

is piecewise quadratic in y, so its minimizers are found exactly by closed
per-piece minimization over a finite bracket: minimizers satisfy
(x - y)/t in [min u0, max u0], giving the search window
[x - t max u0 - p, x - t min u0 + p].  The entropy solution is
u(x -, t) = (x - Y_low)/t and u(x +, t) = (x - Y_high)/t with Y_low / Y_high
the leftmost / rightmost minimizers, and the single shock of the perturbed
Riemann problem is located by bisection on the sign of
min_{y>=0} F_r - min_{y<=0} F_l, which is nonincreasing in x.

Everything here is specific to f(u) = u^2 / 2; general fluxes go through the
front-tracking solver instead.
"""
from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Callable, Literal, Sequence

import numpy as np
from scipy.integrate import quad
from scipy.special import erf, erfcx

from .profiles import PeriodicProfile, RiemannPerturbedIC

Side = Literal["left", "right"]
Constraint = Literal["all", "nonpos", "nonneg"]

TIE_TOL = 1e-10
MERGE_REL_TOL = 1e-10
BISECT_REL_TOL = 1e-12


class OracleError(ValueError):
    """Precondition violation in the exact evaluator."""


@dataclass(frozen=True)
class ExtremalMinimizers:
    """Leftmost/rightmost minimizers of the potential and the minimum value."""

    y_star_low: float
    y_star_high: float
    min_value: float


@dataclass(frozen=True)
class ShockInterval:
    """Bracket [x_low, x_high] of the zero set of m_+ - m_- at time t."""

    t: float
    x_low: float
    x_high: float
    merged: bool

    @property
    def midpoint(self) -> float:
        return 0.5 * (self.x_low + self.x_high)


class HopfPotential:
    """Variational potential with slope cl for y < 0 and cr for y > 0.

    cl == cr gives the potential of a purely periodic solution with mean cl;
    distinct slopes give the glued potential of the perturbed Riemann problem.
    """

    def __init__(self, profile: PeriodicProfile, cl: float, cr: float):
        if abs(profile.mean) > 1e-12:
            raise OracleError("potential requires a zero-mean profile")
        self.profile = profile
        self.cl = float(cl)
        self.cr = float(cr)

    @classmethod
    def from_ic(cls, ic: RiemannPerturbedIC, side: str = "joined") -> "HopfPotential":
        if side == "joined":
            return cls(ic.perturbation, ic.ul, ic.ur)
        if side == "left":
            return cls(ic.perturbation, ic.ul, ic.ul)
        if side == "right":
            return cls(ic.perturbation, ic.ur, ic.ur)
        raise OracleError(f"unknown potential side {side!r}")

    @classmethod
    def pure(cls, profile: PeriodicProfile, mean_state: float) -> "HopfPotential":
        return cls(profile, mean_state, mean_state)

    @property
    def is_joined(self) -> bool:
        return self.cl != self.cr

    def value(self, t: float, x: float, y):
        """F(t, x, y); vectorized in y."""
        if t <= 0.0:
            raise OracleError("potential needs t > 0")
        yarr = np.atleast_1d(np.asarray(y, dtype=float))
        w = self.profile.primitive(yarr)
        slope = np.where(yarr < 0.0, self.cl, self.cr)
        d = x - yarr
        out = 0.5 * d * d / t + slope * yarr + w
        return out if np.ndim(y) else float(out[0])

    def regions(self, t: float, x: float) -> list[tuple[float, float, float]]:
        """(slope, lo, hi) search regions covering all minimizers."""
        p = self.profile.period
        a_, b_ = self.profile.lower_bound, self.profile.upper_bound
        lo_l = x - t * (self.cl + b_) - p
        hi_l = x - t * (self.cl + a_) + p
        if not self.is_joined:
            return [(self.cl, lo_l, hi_l)]
        lo_r = x - t * (self.cr + b_) - p
        hi_r = x - t * (self.cr + a_) + p
        return [(self.cl, lo_l, min(hi_l, 0.0)), (self.cr, max(lo_r, 0.0), hi_r)]


def _region_candidates(
    prof: PeriodicProfile,
    c: float,
    t: float,
    x: float,
    lo: float,
    hi: float,
    ys_out: list,
    fs_out: list,
) -> None:
    """Exact candidate minima of (x-y)^2/(2t) + c y + W(y) on [lo, hi]."""
    p = prof.period
    inv_t = 1.0 / t
    cum = prof._cumint
    for j, pc in enumerate(prof.pieces):
        b0, h = pc.start, pc.width
        va = pc.left
        m = 0.0 if pc.is_constant else pc.slope
        w0 = cum[j]
        k0 = math.ceil((lo - b0 - h) / p)
        k1 = math.floor((hi - b0) / p)
        if k1 < k0:
            continue
        ks = np.arange(k0, k1 + 1, dtype=float)
        seg0 = ks * p + b0
        seg_lo = np.maximum(lo, seg0)
        seg_hi = np.minimum(hi, seg0 + h)
        ok = seg_lo <= seg_hi
        if not ok.any():
            continue
        seg0, seg_lo, seg_hi = seg0[ok], seg_lo[ok], seg_hi[ok]
        ys = [seg_lo, seg_hi]
        base = [seg0, seg0]
        curv = inv_t + m
        if curv > 0.0:
            # interior vertex of the per-piece quadratic
            yv = (x * inv_t - c - va + m * seg0) / curv
            inside = (yv > seg_lo) & (yv < seg_hi)
            if inside.any():
                ys.append(yv[inside])
                base.append(seg0[inside])
        ys = np.concatenate(ys)
        base = np.concatenate(base)
        xi = ys - base
        w = w0 + va * xi + 0.5 * m * xi * xi
        d = x - ys
        ys_out.append(ys)
        fs_out.append(0.5 * d * d * inv_t + c * ys + w)


def extremal_minimizers(
    hp: HopfPotential, t: float, x: float, constraint: Constraint = "all"
) -> ExtremalMinimizers:
    """Leftmost/rightmost global minimizers of F(t, x, .) under the constraint."""
    if t <= 0.0:
        raise OracleError("extremal_minimizers needs t > 0")
    regions = hp.regions(t, x)
    if constraint == "nonpos":
        regions = [(c, lo, min(hi, 0.0)) for (c, lo, hi) in regions]
    elif constraint == "nonneg":
        regions = [(c, max(lo, 0.0), hi) for (c, lo, hi) in regions]
    elif constraint != "all":
        raise OracleError(f"unknown constraint {constraint!r}")
    ys_list: list = []
    fs_list: list = []
    for c, rlo, rhi in regions:
        if rlo > rhi:
            continue
        _region_candidates(hp.profile, c, t, x, rlo, rhi, ys_list, fs_list)
    if hp.is_joined or constraint != "all" or not ys_list:
        # the junction y = 0 is always feasible and F(t, x, 0) = x^2 / (2 t)
        ys_list.append(np.array([0.0]))
        fs_list.append(np.array([0.5 * x * x / t]))
    ys = np.concatenate(ys_list)
    fs = np.concatenate(fs_list)
    mval = float(np.min(fs))
    tie = fs <= mval + TIE_TOL
    return ExtremalMinimizers(float(np.min(ys[tie])), float(np.max(ys[tie])), mval)


def potential(hp: HopfPotential, t: float, x: float, y):
    return hp.value(t, x, y)


def potential_min(hp: HopfPotential, t: float, x: float, constraint: Constraint = "all") -> float:
    """Minimum of the potential; x-differences of this are exact solution integrals."""
    return extremal_minimizers(hp, t, x, constraint).min_value


# -- pointwise solutions ---------------------------------------------------


def u_exact(ic: RiemannPerturbedIC, x: float, t: float, side: Side = "right") -> float:
    """One-sided value of the glued entropy solution, (x - Y)/t."""
    em = extremal_minimizers(HopfPotential.from_ic(ic, "joined"), t, x)
    y = em.y_star_low if side == "left" else em.y_star_high
    return (x - y) / t


def periodic_solution(
    profile: PeriodicProfile, ubar: float, x: float, t: float, side: Side = "right"
) -> float:
    """Entropy solution of mean-ubar periodic Burgers data ubar + w0.

    Minimizes (x - y)^2/(2t) + ubar y + W(y) directly; by Galilean
    invariance this equals w(x - ubar t, t) + ubar for the zero-mean
    solution w.
    """
    em = extremal_minimizers(HopfPotential.pure(profile, ubar), t, x)
    y = em.y_star_low if side == "left" else em.y_star_high
    return (x - y) / t


def oracle_evaluator(ic: RiemannPerturbedIC) -> Callable[[float, float, str], float]:
    hp = HopfPotential.from_ic(ic, "joined")

    def ev(x: float, t: float, side: Side = "right") -> float:
        em = extremal_minimizers(hp, t, x)
        y = em.y_star_low if side == "left" else em.y_star_high
        return (x - y) / t

    return ev


def periodic_evaluator(profile: PeriodicProfile, ubar: float) -> Callable[[float, float, str], float]:
    hp = HopfPotential.pure(profile, ubar)

    def ev(x: float, t: float, side: Side = "right") -> float:
        em = extremal_minimizers(hp, t, x)
        y = em.y_star_low if side == "left" else em.y_star_high
        return (x - y) / t

    return ev


# -- shock interval --------------------------------------------------------


def shock_interval(ic: RiemannPerturbedIC, t: float) -> ShockInterval:
    """Zero set of sigma(x) = m_+(t,x) - m_-(t,x), bracketed by bisection.

    sigma is nonincreasing (its a.e. derivative is (Y_- - Y_+)/t <= 0),
    positive left of the shock set and negative right of it.
    """
    if ic.ul <= ic.ur:
        raise OracleError("shock_interval needs ul > ur")
    if t <= 0.0:
        raise OracleError("shock_interval needs t > 0")
    prof = ic.perturbation
    hp_l = HopfPotential.from_ic(ic, "left")
    hp_r = HopfPotential.from_ic(ic, "right")
    s = ic.shock_speed

    def sigma(x: float) -> float:
        m_plus = extremal_minimizers(hp_r, t, x, "nonneg").min_value
        m_minus = extremal_minimizers(hp_l, t, x, "nonpos").min_value
        return m_plus - m_minus

    pad = 0.5 * max(1.0, prof.period)
    xa = (s + prof.lower_bound) * t - pad
    xb = (s + prof.upper_bound) * t + pad
    sa, sb = sigma(xa), sigma(xb)
    for _ in range(4):
        if sa > 0.0:
            break
        xa -= max(1.0, t)
        sa = sigma(xa)
    for _ in range(4):
        if sb < 0.0:
            break
        xb += max(1.0, t)
        sb = sigma(xb)
    if not (sa > 0.0 > sb):
        raise OracleError(f"shock_interval: sign bracket failed at t={t}")

    tol = BISECT_REL_TOL * max(t, 1e-3)

    def bisect(keep_positive: bool) -> float:
        lo, hi = xa, xb
        for _ in range(200):
            if hi - lo <= tol:
                break
            mid = 0.5 * (lo + hi)
            if mid <= lo or mid >= hi:
                break
            val = sigma(mid)
            on_low_side = val > 0.0 if keep_positive else val >= 0.0
            if on_low_side:
                lo = mid
            else:
                hi = mid
        return 0.5 * (lo + hi)

    x_low = bisect(keep_positive=True)
    x_high = bisect(keep_positive=False)
    if x_high < x_low:
        x_low, x_high = x_high, x_low
    merged = (x_high - x_low) <= MERGE_REL_TOL * max(1.0, t)
    return ShockInterval(t, x_low, x_high, merged)


def shock_position(ic: RiemannPerturbedIC, t: float) -> float:
    return shock_interval(ic, t).midpoint


# -- merge-time detection --------------------------------------------------


@dataclass(frozen=True)
class MergeScan:
    """Sampled merge flags and the bisection-refined first merge time."""

    t_merge: float
    times: tuple
    merged: tuple


def merge_time(ic: RiemannPerturbedIC, t_samples: Sequence[float], refine_tol: float = 1e-4) -> MergeScan:
    """Earliest sampled time after which the shock interval stays merged.

    Refined by bisection between the last unmerged and first merged sample;
    the merged state is monotone in t, so the refinement is well posed.
    """
    ts = tuple(sorted(float(t) for t in t_samples))
    flags = tuple(shock_interval(ic, t).merged for t in ts)
    first = None
    for i in range(len(ts)):
        if all(flags[i:]):
            first = i
            break
    if first is None:
        return MergeScan(math.inf, ts, flags)
    lo = ts[first - 1] if first > 0 else min(1e-6, 0.5 * ts[0])
    hi = ts[first]
    for _ in range(80):
        if hi - lo <= refine_tol:
            break
        mid = 0.5 * (lo + hi)
        if shock_interval(ic, mid).merged:
            hi = mid
        else:
            lo = mid
    return MergeScan(0.5 * (lo + hi), ts, flags)


# -- jump scanning and periodic extrema ------------------------------------


@dataclass(frozen=True)
class SolutionJump:
    """Refined discontinuity of u(., t) with one-sided values."""

    x: float
    u_before: float
    u_after: float
    y_before: float
    y_after: float


def _em_y(hp: HopfPotential, t: float, x: float) -> tuple[float, float]:
    em = extremal_minimizers(hp, t, x)
    return em.y_star_low, em.y_star_high


def scan_jumps(
    hp: HopfPotential, t: float, xlo: float, xhi: float, n: int = 256, xtol: float = 1e-12
) -> list[SolutionJump]:
    """Locate down-jumps of u(., t) on [xlo, xhi] via jumps of the minimizer.

    The leftmost minimizer is nondecreasing in x; across continuous branches
    it grows at most like dx / (1 + slope t), so cells whose Y increment
    clearly exceeds dx are bisected down to xtol and reported as jumps.
    """
    xs = np.linspace(xlo, xhi, n + 1)
    ylows = [_em_y(hp, t, float(xv))[0] for xv in xs]

    def jumps_inside(xa, ya, xb, yb) -> bool:
        return (yb - ya) > (xb - xa) * (1.0 + 1e-6) + 1e-8

    out: list[SolutionJump] = []
    stack = [
        (float(xs[i]), ylows[i], float(xs[i + 1]), ylows[i + 1])
        for i in range(n)
        if jumps_inside(xs[i], ylows[i], xs[i + 1], ylows[i + 1])
    ]
    guard = 0
    while stack:
        guard += 1
        if guard > 200000:
            raise OracleError("scan_jumps: refinement did not terminate")
        xa, ya, xb, yb = stack.pop()
        if xb - xa <= max(xtol, 1e-15 * max(1.0, abs(xa))):
            ylow_b = _em_y(hp, t, xb)[0]
            xm = 0.5 * (xa + xb)
            out.append(
                SolutionJump(xm, (xm - ya) / t, (xm - ylow_b) / t, ya, ylow_b)
            )
            continue
        xm = 0.5 * (xa + xb)
        ym = _em_y(hp, t, xm)[0]
        if jumps_inside(xa, ya, xm, ym):
            stack.append((xa, ya, xm, ym))
        if jumps_inside(xm, ym, xb, yb):
            stack.append((xm, ym, xb, yb))
    out.sort(key=lambda j: j.x)
    return out


def periodic_extrema(
    profile: PeriodicProfile, ubar: float, t: float, grid: int = 256
) -> tuple[float, float]:
    """(sup, inf) over one period of the mean-ubar periodic solution at time t.

    Grid scan plus exact refinement of every shock: away from shocks the
    solution is nondecreasing in x, so extrema live at one-sided shock
    limits, which the jump scan recovers to machine accuracy.
    """
    hp = HopfPotential.pure(profile, ubar)
    p = profile.period
    xs = np.linspace(0.0, p, grid + 1)
    sup = -math.inf
    inf = math.inf
    for xv in xs:
        ylo, yhi = _em_y(hp, t, float(xv))
        sup = max(sup, (xv - ylo) / t)
        inf = min(inf, (xv - yhi) / t)
    for j in scan_jumps(hp, t, 0.0, p, grid):
        sup = max(sup, j.u_before)
        inf = min(inf, j.u_after)
    return sup, inf


# -- viscous approximation -------------------------------------------------


def _weighted_gauss_mass(w_log: float, za: float, zb: float, ea: float, eb: float) -> float:
    """exp(w_log) * (erf(zb) - erf(za)) with the weight folded into the tails.

    ea = exp(w_log - za^2) and eb = exp(w_log - zb^2) are bounded by 1
    whenever w_log is the offset of a segment parabola against the global
    minimum, so expressing tail differences through erfcx avoids the
    overflow of exp(w_log) against an underflowing erfc.
    """
    if za >= 0.0:
        return ea * erfcx(za) - eb * erfcx(zb)
    if zb <= 0.0:
        return eb * erfcx(-zb) - ea * erfcx(-za)
    return math.exp(w_log) * (erf(zb) - erf(za))


def u_viscous(ic: RiemannPerturbedIC, x: float, t: float, eps: float) -> float:
    """Hopf-Cole quotient u^eps(x, t) for vanishing viscosity eps.

    The exponent is stabilized by subtracting min_y F.  For piecewise
    constant data every segment integral is an exact Gaussian mass/moment
    (erf/erfc and exponential differences), which preserves the relative
    accuracy of the quotient even when it is exponentially close to a
    constant state; ramp pieces fall back to adaptive quadrature per
    segment.  The window is truncated where the integrand is below 1e-14
    of its mass.
    """
    if eps <= 0.0 or t <= 0.0:
        raise OracleError("u_viscous needs eps > 0 and t > 0")
    prof = ic.perturbation
    p = prof.period
    m = extremal_minimizers(HopfPotential.from_ic(ic, "joined"), t, x).min_value
    umin = min(ic.ul, ic.ur) + prof.lower_bound
    umax = max(ic.ul, ic.ur) + prof.upper_bound
    tail = math.sqrt(4.0 * eps * t * 40.0) + p
    ylo = x - t * umax - tail
    yhi = x - t * umin + tail
    cuts = prof.breakpoints_in(ylo, yhi)
    bounds = np.unique(np.concatenate([[ylo, yhi, 0.0] if ylo < 0.0 < yhi else [ylo, yhi], cuts]))
    bounds = bounds[(bounds >= ylo) & (bounds <= yhi)]

    has_ramp = any(not pc.is_constant for pc in prof.pieces)
    num = 0.0
    den = 0.0
    if not has_ramp:
        sig = math.sqrt(4.0 * eps * t)
        root_mass = math.sqrt(math.pi * eps * t)
        for a, b in zip(bounds[:-1], bounds[1:]):
            if b - a <= 0.0:
                continue
            v = float(ic.eval(0.5 * (a + b)))
            pa = float(ic.initial_integral(a))
            mu = x - v * t
            q = pa + v * (x - a) - 0.5 * v * v * t  # vertex value of F on the segment
            w_log = -(q - m) / (2.0 * eps)
            za = (a - mu) / sig
            zb = (b - mu) / sig
            # F(endpoint) >= m, so these stay in [0, 1]
            ea = math.exp(w_log - za * za)
            eb = math.exp(w_log - zb * zb)
            wmass = root_mass * _weighted_gauss_mass(w_log, za, zb, ea, eb)
            den += wmass
            num += v * wmass + 2.0 * eps * (eb - ea)
    else:
        hp = HopfPotential.from_ic(ic, "joined")
        for a, b in zip(bounds[:-1], bounds[1:]):
            if b - a <= 0.0:
                continue
            f_exp = lambda y: math.exp(-(hp.value(t, x, y) - m) / (2.0 * eps))
            d_seg, _ = quad(f_exp, a, b, epsabs=1e-14, epsrel=1e-10, limit=100)
            n_seg, _ = quad(lambda y: (x - y) / t * f_exp(y), a, b, epsabs=1e-14, epsrel=1e-10, limit=100)
            den += d_seg
            num += n_seg
    if den <= 0.0:
        raise OracleError("u_viscous: vanishing denominator (window too narrow)")
    return num / den
