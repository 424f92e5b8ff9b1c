"""Generalized characteristics for convex scalar conservation laws.

Backward extremal characteristics are straight lines whose slope is f' of a
one-sided solution value at the anchor; along them the solution is constant
at earlier times.  Forward characteristics follow the usual differential
inclusion: classical speed where the solution is continuous, chord speed
across a jump.  The module also houses the triangle integral identity
relating two backward characteristics of different solutions from a common
anchor, a gluing checker, and the conservation-based predictor for the
perturbed shock offset.
"""
from __future__ import annotations

from dataclasses import dataclass
from typing import Callable, Sequence

import numpy as np

from .fluxes import ConvexFlux, burgers, rh_speed
from .profiles import PeriodicProfile, RiemannPerturbedIC, argmin_primitive
from . import hopf


class CharacteristicError(ValueError):
    pass


Evaluator = Callable[..., float]  # ev(x, t, side="left"|"right")


@dataclass(frozen=True)
class SolutionHandle:
    """An entropy solution accessed through one-sided point evaluation.

    initial_integral(y) is the cumulative integral of the data from 0 to y;
    it is exact piecewise arithmetic, used by the triangle identity.
    """

    ev: Evaluator
    flux: ConvexFlux
    initial_integral: Callable[[float], float]

    def __call__(self, x: float, t: float, side: str = "right") -> float:
        return self.ev(x, t, side)


def handle_from_ic(ic: RiemannPerturbedIC) -> SolutionHandle:
    return SolutionHandle(hopf.oracle_evaluator(ic), ic.flux, ic.initial_integral)


def handle_periodic(
    profile: PeriodicProfile, ubar: float, flux: ConvexFlux | None = None
) -> SolutionHandle:
    fx = flux if flux is not None else burgers()
    ev = hopf.periodic_evaluator(profile, ubar)

    def prim(y: float) -> float:
        return float(profile.primitive(y)) + ubar * float(y)

    return SolutionHandle(ev, fx, prim)


@dataclass(frozen=True)
class CharLine:
    """Backward extremal characteristic through (anchor_x, anchor_t)."""

    anchor_x: float
    anchor_t: float
    slope: float
    kind: str  # "minimal" | "maximal"
    value: float  # the one-sided solution value carried by the line

    def at(self, t: float) -> float:
        return self.anchor_x + self.slope * (t - self.anchor_t)

    @property
    def foot(self) -> float:
        return self.at(0.0)


def backward_extremal(sol: SolutionHandle, x: float, t: float, kind: str) -> CharLine:
    """Extremal backward characteristic of sol from (x, t)."""
    if t <= 0.0:
        raise CharacteristicError("backward characteristic needs t > 0")
    if kind not in ("minimal", "maximal"):
        raise CharacteristicError(f"unknown kind {kind!r}")
    side = "left" if kind == "minimal" else "right"
    b = sol.ev(x, t, side)
    return CharLine(float(x), float(t), float(sol.flux.deriv(b)), kind, float(b))


def char_deviation(line: CharLine, sol: SolutionHandle, n: int = 33) -> float:
    """Max deviation of the solution along the line from the carried value.

    Samples strictly interior times; the line is classical there, so the
    one-sided value matching the line's kind must reproduce line.value.
    """
    side = "left" if line.kind == "minimal" else "right"
    ts = np.linspace(0.0, line.anchor_t, n + 2)[1:-1]
    worst = 0.0
    for t in ts:
        worst = max(worst, abs(sol.ev(line.at(t), float(t), side) - line.value))
    return worst


def forward_characteristic(
    sol: SolutionHandle,
    x0: float,
    t_end: float,
    dt: float = 0.01,
    jump_tol: float = 1e-9,
) -> tuple[np.ndarray, np.ndarray]:
    """Euler time stepping of the forward characteristic from (x0, 0).

    Velocity is f'(u(x+, t)) at continuity points and the Rankine-Hugoniot
    chord speed across jumps (detected by |u(x-) - u(x+)| > jump_tol).
    """
    if t_end <= 0.0 or dt <= 0.0:
        raise CharacteristicError("t_end and dt must be positive")
    n = int(np.ceil(t_end / dt))
    ts = np.minimum(np.arange(n + 1) * dt, t_end)
    xs = np.empty(n + 1)
    xs[0] = x0
    for k in range(n):
        t = ts[k] if k > 0 else min(0.5 * dt, 1e-6)
        ul = sol.ev(xs[k], t, "left")
        ur = sol.ev(xs[k], t, "right")
        if abs(ul - ur) > jump_tol:
            v = rh_speed(sol.flux, ul, ur)
        else:
            v = sol.flux.deriv(ur)
        xs[k + 1] = xs[k] + (ts[k + 1] - ts[k]) * v
    return ts, xs


# -- triangle identity -----------------------------------------------------


@dataclass(frozen=True)
class TriangleReport:
    lhs_left_term: float
    lhs_right_term: float
    rhs: float
    residual: float
    b: float
    b_tilde: float
    foot: float
    foot_tilde: float


_GAUSS_X, _GAUSS_W = np.polynomial.legendre.leggauss(7)
# barycentric weights of the Gauss nodes, for extrapolating to the endpoints
_BARY_W = np.array(
    [1.0 / np.prod([xi - xj for xj in _GAUSS_X if xj != xi]) for xi in _GAUSS_X]
)


def _panel_gauss(g, a: float, b: float):
    """Panel Gauss-7 integral together with the sampled node values."""
    h = 0.5 * (b - a)
    mid = 0.5 * (a + b)
    vals = np.array([g(mid + h * x) for x in _GAUSS_X])
    return h * float(np.dot(_GAUSS_W, vals)), vals


def _extrap(vals: np.ndarray, x: float) -> float:
    """Barycentric evaluation at reference coordinate x of the node polynomial."""
    c = _BARY_W / (x - _GAUSS_X)
    return float(np.dot(c, vals) / np.sum(c))


def _locate_jump(g, a: float, b: float, va: float, vb: float, bail: float):
    """Bisect for a discontinuity of g inside (a, b).

    Each midpoint is assigned to the branch whose endpoint value it is
    closer to; robust whenever the jump dominates the smooth variation.
    Returns the location and the values across the final bracket, whose
    difference is the actual jump size.  A kink trips the caller's detector
    too but leaves g continuous, so once the bracket is narrow enough that
    the difference has fallen under `bail` the hunt stops early."""
    width_tol = 1e-13 * max(1.0, abs(a), abs(b))
    it = 0
    while b - a > width_tol:
        m = 0.5 * (a + b)
        vm = g(m)
        if abs(vm - va) <= abs(vm - vb):
            a, va = m, vm
        else:
            b, vb = m, vm
        it += 1
        if it >= 20 and abs(vb - va) <= bail:
            break
    return 0.5 * (a + b), va, vb


def _adaptive(g, a: float, b: float, tol: float, depth: int) -> float:
    """Refine until whole-vs-halves agree, splitting panels at jumps.

    Gauss nodes are interior, so a jump can hide in the sliver between the
    outermost node and the panel edge with every node on one branch and the
    two estimates in perfect agreement.  Probing the panel edges against the
    node-polynomial extrapolation exposes such a jump; the panel is then cut
    at the located discontinuity so each side is smooth."""
    mid = 0.5 * (a + b)
    whole, vals0 = _panel_gauss(g, a, b)
    i1, _ = _panel_gauss(g, a, mid)
    i2, _ = _panel_gauss(g, mid, b)
    halves = i1 + i2
    if depth >= 32 or (b - a) < 1e-13 * max(1.0, abs(a), abs(b)):
        return halves
    # edge probes sit just inside: the exact endpoints may be outside the
    # integrand's domain (s = 0) and the inset sliver is below tolerance
    eps = 1e-9
    ga = g(a + eps * (b - a))
    gb = g(b - eps * (b - a))
    jump_est = max(
        abs(ga - _extrap(vals0, -1.0 + 2.0 * eps)),
        abs(gb - _extrap(vals0, 1.0 - 2.0 * eps)),
    )
    gate = 1e-7 * (1.0 + float(np.max(np.abs(vals0))))
    if jump_est > gate:
        s, va, vb = _locate_jump(
            g, a + eps * (b - a), b - eps * (b - a), ga, gb, 0.5 * gate
        )
        if abs(vb - va) > 0.5 * gate:
            gap = 1e-12 * max(1.0, abs(s))
            lo, hi = max(s - gap, a), min(s + gap, b)
            left = _adaptive(g, a, lo, 0.5 * tol, depth + 1) if lo > a else 0.0
            right = _adaptive(g, hi, b, 0.5 * tol, depth + 1) if hi < b else 0.0
            return left + right + 0.5 * (hi - lo) * (va + vb)
        # continuous across the collapsed bracket: a kink tripped the
        # detector, and for kinks the whole-vs-halves test is trustworthy
    if abs(whole - halves) <= tol:
        return halves
    return _adaptive(g, a, mid, 0.5 * tol, depth + 1) + _adaptive(
        g, mid, b, 0.5 * tol, depth + 1
    )


def _time_integral(g, t_end: float, panels: int, tol: float) -> float:
    """Composite Gauss with per-panel refinement.

    The integrand jumps where the characteristic crosses a shock of the
    other solution, so panels straddling a jump are refined by bisection
    until the jump's contribution is below the panel tolerance budget.

    The first and last uniform panels are graded geometrically toward the
    endpoints: when a foot sits within eps of a data corner, a fan of the
    other solution sweeps the line over a window of width O(eps) hugging
    s = 0 (resp. s = t_end), far below any fixed refinement level.
    """
    edges = np.linspace(0.0, t_end, panels + 1)
    # the evaluators lose the minimizer below ~1e-10 * t, so the ladder
    # stops there; the surrendered mass is bounded by |g| * floor
    floor = 1e-10 * t_end
    graded = [floor]
    graded.extend(s for k in range(30, 0, -1) if (s := edges[1] * 2.0 ** -k) > floor)
    graded.extend(edges[1:-1])
    step = edges[-1] - edges[-2]
    graded.extend(edges[-1] - step * 2.0 ** -k for k in range(1, 31))
    graded.append(t_end)
    return sum(
        _adaptive(g, a, b, tol / panels, 0)
        for a, b in zip(graded[:-1], graded[1:])
        if b > a
    )


def triangle_residual(
    sol: SolutionHandle,
    sol_tilde: SolutionHandle,
    x: float,
    t: float,
    kind: str = "minimal",
    kind_tilde: str = "minimal",
    panels: int = 256,
    tol: float = 1e-8,
) -> TriangleReport:
    """Green's-formula identity for two backward characteristics.

    With xi from sol (value b) and xi_tilde from sol_tilde (value b_tilde),
    both anchored at (x, t) and xi_tilde(0) < xi(0):

        int_0^t [f(b) - f(ut(xi-)) - f'(b)(b - ut(xi-))]
      + int_0^t [f(bt) - f(u(xit+)) - f'(bt)(bt - u(xit+))]
      = int_{xit(0)}^{xi(0)} [u0 - ut0].
    """
    if t <= 0.0:
        raise CharacteristicError("triangle identity needs t > 0")
    line = backward_extremal(sol, x, t, kind)
    line_t = backward_extremal(sol_tilde, x, t, kind_tilde)
    # equality is allowed: coinciding feet give a zero-width data integral
    if line_t.foot > line.foot:
        raise CharacteristicError(
            f"foot ordering violated: {line_t.foot} !<= {line.foot}"
        )
    f = sol.flux
    b, bt = line.value, line_t.value
    fb, dfb = f.eval(b), f.deriv(b)
    fbt, dfbt = f.eval(bt), f.deriv(bt)

    def g_left(s: float) -> float:
        v = sol_tilde.ev(line.at(s), s, "left")
        return fb - f.eval(v) - dfb * (b - v)

    def g_right(s: float) -> float:
        v = sol.ev(line_t.at(s), s, "right")
        return fbt - f.eval(v) - dfbt * (bt - v)

    lhs1 = _time_integral(g_left, t, panels, tol)
    lhs2 = _time_integral(g_right, t, panels, tol)
    rhs = (
        sol.initial_integral(line.foot)
        - sol.initial_integral(line_t.foot)
        - sol_tilde.initial_integral(line.foot)
        + sol_tilde.initial_integral(line_t.foot)
    )
    return TriangleReport(
        lhs_left_term=lhs1,
        lhs_right_term=lhs2,
        rhs=rhs,
        residual=lhs1 + lhs2 - rhs,
        b=b,
        b_tilde=bt,
        foot=line.foot,
        foot_tilde=line_t.foot,
    )


# -- gluing and shock offset -----------------------------------------------


def interp_path(path, t: float) -> float:
    """Linear interpolation of a (times, positions) record or ShockPath."""
    if isinstance(path, tuple):
        times, positions = path
    else:
        times, positions = path.times, path.positions
    return float(np.interp(t, times, positions))


def glue_check(
    sol: SolutionHandle,
    sol_left: SolutionHandle,
    sol_right: SolutionHandle,
    x_shock: float,
    t: float,
    n_samples: int = 256,
    band: float = 1e-6,
    span: float | None = None,
) -> float:
    """Max mismatch |u - u_l| left of the shock and |u - u_r| right of it.

    Samples a symmetric window around x_shock, excluding a band around the
    shock itself where one-sided evaluation conventions differ.
    """
    if span is None:
        span = 4.0 + 0.5 * t
    xs = np.linspace(x_shock - span, x_shock + span, n_samples)
    worst = 0.0
    for xq in xs:
        if abs(xq - x_shock) <= band:
            continue
        ref = sol_left if xq < x_shock else sol_right
        worst = max(worst, abs(sol.ev(xq, t, "right") - ref.ev(xq, t, "right")))
    return worst


def shock_offset(ic: RiemannPerturbedIC, x_shock: float, t: float, n_periods: int) -> float:
    """Conservation-based prediction of X(t) - st from the periodic solutions.

    Integrates (u_l - ul) left of the shock and (u_r - ur) right of it out
    to the divides n_periods away; the integrals are exact value-function
    differences of the pure periodic potentials.  Burgers only: the value
    functions come from the quadratic-kernel construction.
    """
    if ic.flux.name != "burgers":
        raise CharacteristicError("shock offset predictor is Burgers-only")
    if ic.ul <= ic.ur:
        raise CharacteristicError("needs ul > ur")
    if t <= 0.0 or n_periods < 1:
        raise CharacteristicError("needs t > 0 and n_periods >= 1")
    prof = ic.perturbation
    p = prof.period
    a = argmin_primitive(prof)
    # Burgers: f'(v) = v, so the divides move at the mean states
    gamma_l = a - n_periods * p + ic.ul * t
    gamma_r = a + n_periods * p + ic.ur * t
    if not gamma_l < x_shock < gamma_r:
        raise CharacteristicError(
            f"divide ordering violated: need {gamma_l} < {x_shock} < {gamma_r}"
        )
    hp_l = hopf.HopfPotential.pure(prof, ic.ul)
    hp_r = hopf.HopfPotential.pure(prof, ic.ur)
    int_l = (
        hopf.potential_min(hp_l, t, x_shock)
        - hopf.potential_min(hp_l, t, gamma_l)
        - ic.ul * (x_shock - gamma_l)
    )
    int_r = (
        hopf.potential_min(hp_r, t, gamma_r)
        - hopf.potential_min(hp_r, t, x_shock)
        - ic.ur * (gamma_r - x_shock)
    )
    return -(int_l + int_r) / (ic.ul - ic.ur)
