"""Experiment harness: shock stability, rarefaction decay, periodic decay.

Each runner consumes an ExperimentConfig, sweeps a geometric time grid with
the configured solver, and assembles a DecayReport holding metric series,
a log-log rate fit over the last decade, and named structural checks.  The
report is plain data; emission lives in reports.py.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from . import fronttrack as ft
from . import hopf
from .characteristics import (
    SolutionHandle,
    backward_extremal,
    glue_check,
    handle_from_ic,
    handle_periodic,
    shock_offset,
)
from .fluxes import ConvexFlux, burgers, exp_flux, g_potential, normalize, z_of
from .profiles import PeriodicProfile, RiemannPerturbedIC, argmin_primitive, primitive


class ExperimentError(Exception):
    pass


_FLUXES = {"burgers": burgers, "exp": exp_flux}
_SOLVERS = ("oracle", "fronttrack", "both")

# per-period interior sample count for sup norms, on top of the solution's
# own breakpoints
SUP_SAMPLES = 4096


@dataclass(frozen=True)
class ExperimentConfig:
    """Declarative description of one experiment run."""

    flux_name: str = "burgers"
    pieces: tuple = ((0.5, 0.3), (0.5, -0.3))
    period: float = 1.0
    ul: float = 1.0
    ur: float = -1.0
    delta: float = 1e-3
    solver: str = "oracle"
    t_min: float = 0.25
    t_max: float = 256.0
    t_count: int = 48
    out_dir: str | None = None

    def __post_init__(self) -> None:
        object.__setattr__(
            self, "pieces", tuple(tuple(float(v) for v in piece) for piece in self.pieces)
        )
        if self.flux_name not in _FLUXES:
            raise ExperimentError(f"unknown flux {self.flux_name!r}")
        if self.solver not in _SOLVERS:
            raise ExperimentError(f"solver must be one of {_SOLVERS}")
        if self.delta <= 0.0:
            raise ExperimentError("delta must be positive")
        if self.period <= 0.0:
            raise ExperimentError("period must be positive")
        if not (0.0 < self.t_min < self.t_max):
            raise ExperimentError("need 0 < t_min < t_max")
        if self.t_count < 2:
            raise ExperimentError("need at least two time samples")
        if not self.pieces:
            raise ExperimentError("profile needs at least one piece")

    def flux(self) -> ConvexFlux:
        return _FLUXES[self.flux_name]()

    def profile(self) -> PeriodicProfile:
        return PeriodicProfile.from_spec(self.period, self.pieces)

    def ic(self) -> RiemannPerturbedIC:
        return RiemannPerturbedIC(self.ul, self.ur, self.profile(), flux=self.flux())

    def times(self) -> list[float]:
        return geometric_times(self.t_min, self.t_max, self.t_count)

    def echo(self) -> dict[str, str]:
        """Canonical key=value form, the one reproduced in every report."""
        pieces = ", ".join(":".join(repr(v) for v in piece) for piece in self.pieces)
        out = {
            "flux": self.flux_name,
            "profile": pieces,
            "period": repr(self.period),
            "ul": repr(self.ul),
            "ur": repr(self.ur),
            "delta": repr(self.delta),
            "solver": self.solver,
            "t_min": repr(self.t_min),
            "t_max": repr(self.t_max),
            "t_count": repr(self.t_count),
        }
        if self.out_dir is not None:
            out["out"] = self.out_dir
        return out


def geometric_times(t_min: float, t_max: float, count: int) -> list[float]:
    if not (0.0 < t_min < t_max) or count < 2:
        raise ExperimentError("need 0 < t_min < t_max and count >= 2")
    ratio = (t_max / t_min) ** (1.0 / (count - 1))
    out = [t_min * ratio**k for k in range(count)]
    out[-1] = t_max
    return out


def _avoid_resonances(ts: list[float], gap: float) -> list[float]:
    # the position error has exact zeros at the coincidence times n*gap;
    # samples landing nearby would put unbounded-log outliers into the
    # rate fit, so they are moved to a fixed phase off the zero
    out = []
    for t in ts:
        n = round(t / gap)
        if n > 0 and abs(t - n * gap) < 0.1 * gap:
            t = (n + 0.1) * gap
        out.append(t)
    for i in range(1, len(out)):
        if out[i] <= out[i - 1]:
            out[i] = out[i - 1] * (1.0 + 1e-9)
    return out


@dataclass(frozen=True)
class ReferenceWave:
    """The pure Riemann wave the perturbed solution relaxes to."""

    kind: str  # "shock" | "rarefaction"
    ul: float
    ur: float
    flux: ConvexFlux
    speed: float = 0.0

    def eval(self, x: float, t: float) -> float:
        if t <= 0.0:
            raise ExperimentError("reference wave needs t > 0")
        if self.kind == "shock":
            return self.ul if x < self.speed * t else self.ur
        lo = float(self.flux.deriv(self.ul)) * t
        hi = float(self.flux.deriv(self.ur)) * t
        if x <= lo:
            return self.ul
        if x >= hi:
            return self.ur
        return float(self.flux.inv_deriv(x / t))


def reference_shock(ic: RiemannPerturbedIC) -> ReferenceWave:
    return ReferenceWave("shock", ic.ul, ic.ur, ic.flux, speed=ic.shock_speed)


def reference_rarefaction(ic: RiemannPerturbedIC) -> ReferenceWave:
    return ReferenceWave("rarefaction", ic.ul, ic.ur, ic.flux)


@dataclass(frozen=True)
class RateFit:
    exponent: float
    constant: float
    max_residual: float
    floored: bool


def fit_rate(times, values, floor: float = 1e-14) -> RateFit:
    """Least-squares power-law fit on (log t, log v).

    Values at or below ``floor`` are clamped before taking logs and the
    fit is flagged; callers decide whether a floored fit is meaningful.
    """
    ts = [float(t) for t in times]
    vs = [float(v) for v in values]
    if len(ts) < 8:
        raise ExperimentError("rate fit needs at least 8 samples")
    if ts[0] <= 0.0 or any(b <= a for a, b in zip(ts, ts[1:])):
        raise ExperimentError("rate fit needs strictly increasing positive times")
    if ts[-1] / ts[0] < 10.0 * (1.0 - 1e-12):
        raise ExperimentError("rate fit needs a decade of time span")
    floored = any(v <= floor for v in vs)
    vs = [max(v, floor) for v in vs]
    lt = np.log(ts)
    lv = np.log(vs)
    slope, intercept = np.polyfit(lt, lv, 1)
    resid = lv - (slope * lt + intercept)
    return RateFit(
        float(slope), float(math.exp(intercept)), float(np.max(np.abs(resid))), floored
    )


@dataclass
class DecayReport:
    """Everything one experiment produced, ready for emission."""

    kind: str
    times: list[float]
    series: dict[str, list[float]]
    fitted_exponent: float
    fitted_constant: float
    fit_max_residual: float
    fit_floored: bool
    detected_T: float
    structural_checks: list[list]
    config: dict[str, str]
    extras: dict[str, list[float]] = field(default_factory=dict)

    def passed(self) -> bool:
        return all(bool(c[1]) for c in self.structural_checks)

    def to_dict(self) -> dict:
        return {
            "kind": self.kind,
            "times": list(self.times),
            "series": {k: list(v) for k, v in self.series.items()},
            "fitted_exponent": self.fitted_exponent,
            "fitted_constant": self.fitted_constant,
            "fit_max_residual": self.fit_max_residual,
            "fit_floored": self.fit_floored,
            "detected_T": self.detected_T,
            "structural_checks": [list(c) for c in self.structural_checks],
            "config": dict(self.config),
            "extras": {k: list(v) for k, v in self.extras.items()},
        }

    @classmethod
    def from_dict(cls, d: dict) -> "DecayReport":
        return cls(
            kind=d["kind"],
            times=list(d["times"]),
            series={k: list(v) for k, v in d["series"].items()},
            fitted_exponent=d["fitted_exponent"],
            fitted_constant=d["fitted_constant"],
            fit_max_residual=d["fit_max_residual"],
            fit_floored=d["fit_floored"],
            detected_T=d["detected_T"],
            structural_checks=[list(c) for c in d["structural_checks"]],
            config=dict(d["config"]),
            extras={k: list(v) for k, v in d.get("extras", {}).items()},
        )


def _last_decade(ts: list[float], vs: list[float]) -> tuple[list[float], list[float]]:
    # keep the final decade plus the last sample at or below t_max / 10, so
    # the window always spans the full decade fit_rate requires
    cutoff = ts[-1] / 10.0 * (1.0 + 1e-12)
    idx = 0
    for i, t in enumerate(ts):
        if t <= cutoff:
            idx = i
    if len(ts) >= 8:
        idx = min(idx, len(ts) - 8)
    return list(ts[idx:]), list(vs[idx:])


def _trend_check(checks: list, name: str, ts: list[float], vs: list[float]) -> None:
    # t * metric should stay bounded: compare mean levels of the two
    # halves of the final decade, allowing 5 percent drift
    dts, dvs = _last_decade(ts, vs)
    w = [t * v for t, v in zip(dts, dvs)]
    half = len(w) // 2
    lead, tail = w[:half], w[half:]
    ratio = (sum(tail) / len(tail)) / max(sum(lead) / len(lead), 1e-300)
    checks.append([name, bool(ratio <= 1.05), float(ratio)])


def _fit_and_check(
    checks: list, name: str, ts, vs, bound: float, floor: float = 1e-14
) -> RateFit:
    dts, dvs = _last_decade(list(ts), list(vs))
    fit = fit_rate(dts, dvs, floor=floor)
    # a series entirely at the floor decays faster than any power; the
    # clamped fit is flat, so the bound is granted on the floored flag
    ok = fit.exponent <= bound or (fit.floored and max(dvs) <= floor)
    checks.append([name, bool(ok), float(fit.exponent)])
    return fit


# -- solver backends ---------------------------------------------------------


class _OracleShock:
    """Hopf-formula evaluations of the glued solution (quadratic flux)."""

    def __init__(self, ic: RiemannPerturbedIC):
        self.ic = ic
        self.p = ic.perturbation.period
        self.ev = hopf.oracle_evaluator(ic)
        self.hp = hopf.HopfPotential.from_ic(ic, "joined")
        prof = ic.perturbation
        self.sol = handle_from_ic(ic)
        self.sol_l = handle_periodic(prof, ic.ul)
        self.sol_r = handle_periodic(prof, ic.ur)

    def advance(self, t: float) -> None:
        pass

    def position(self, t: float) -> float:
        return hopf.shock_position(self.ic, t)

    def sup_dev(self, t: float, lo: float, hi: float, target: float) -> float:
        worst = 0.0
        xs = lo + (hi - lo) * (np.arange(SUP_SAMPLES) + 0.5) / SUP_SAMPLES
        for x in xs:
            worst = max(worst, abs(self.ev(float(x), t, "right") - target))
        # a jump at the window edge is the main shock itself: only the
        # one-sided value facing into the window belongs to the sup
        h = 1e-8 * max(1.0, abs(lo), abs(hi))
        for j in hopf.scan_jumps(self.hp, t, lo, hi):
            if j.x > lo + h:
                worst = max(worst, abs(j.u_before - target))
            if j.x < hi - h:
                worst = max(worst, abs(j.u_after - target))
        return worst

    def glue(self, t: float, x_shock: float) -> float:
        return glue_check(self.sol, self.sol_l, self.sol_r, x_shock, t, span=2.0 * self.p)


class _FrontTrackShock:
    """Front-tracking evolution plus the matching pure periodic runs."""

    def __init__(self, ic: RiemannPerturbedIC, delta: float, t_grid: list[float]):
        self.ic = ic
        self.delta = delta
        self.p = ic.perturbation.period
        self.poly = ft.polygon_for(ic, ic.flux, delta)
        self.path = ft.shock_path(ic, self.poly, t_grid)
        self._pos = dict(zip(self.path.times, self.path.positions))
        p = self.p
        t_end = max(t_grid)
        span = abs(ic.shock_speed) * t_end + 2.0 * p + 1.0
        prof = ic.perturbation
        self.state = ft.initial_state(ic, self.poly, t_end, span=span)
        self.state_l = ft.periodic_state(prof, ic.ul, ic.flux, self.poly, t_end, span=span)
        self.state_r = ft.periodic_state(prof, ic.ur, ic.flux, self.poly, t_end, span=span)

    def advance(self, t: float) -> None:
        self.state = ft.evolve(self.state, self.poly, t)
        self.state_l = ft.evolve(self.state_l, self.poly, t)
        self.state_r = ft.evolve(self.state_r, self.poly, t)

    def position(self, t: float) -> float:
        return self._pos[t]

    def sup_dev(self, t: float, lo: float, hi: float, target: float) -> float:
        return _state_sup(self.state, lo, hi, target)

    def glue(self, t: float, x_shock: float) -> float:
        flux = self.ic.flux
        zero = lambda y: 0.0
        sol = SolutionHandle(_state_ev(self.state), flux, zero)
        sol_l = SolutionHandle(_state_ev(self.state_l), flux, zero)
        sol_r = SolutionHandle(_state_ev(self.state_r), flux, zero)
        return glue_check(
            sol, sol_l, sol_r, x_shock, t, band=2.0 * self.delta, span=2.0 * self.p
        )


def _state_ev(state: ft.PiecewiseConstantState):
    def ev(x: float, t: float, side: str = "right") -> float:
        if side == "left":
            x = x - 1e-9 * max(1.0, abs(x))
        return ft.sample(state, x)

    return ev


def _state_pieces(state: ft.PiecewiseConstantState, lo: float, hi: float):
    # inset the window edges so a breakpoint that coincides with an edge
    # up to rounding does not leak the value from the far side
    h = 1e-9 * max(1.0, abs(lo), abs(hi))
    lo, hi = lo + h, hi - h
    bps = state.breakpoints
    for i, v in enumerate(state.values):
        a = bps[i - 1] if i > 0 else -math.inf
        b = bps[i] if i < len(bps) else math.inf
        if b <= lo or a >= hi:
            continue
        yield v


def _state_sup(state: ft.PiecewiseConstantState, lo: float, hi: float, target: float) -> float:
    return max((abs(v - target) for v in _state_pieces(state, lo, hi)), default=0.0)


def _state_extrema(state: ft.PiecewiseConstantState, lo: float, hi: float) -> tuple[float, float]:
    vals = list(_state_pieces(state, lo, hi))
    return min(vals), max(vals)


# -- shock stability ---------------------------------------------------------


def run_shock_stability(cfg: ExperimentConfig) -> DecayReport:
    if cfg.ul <= cfg.ur:
        raise ExperimentError("shock mode needs ul > ur")
    if cfg.solver in ("oracle", "both") and cfg.flux_name != "burgers":
        raise ExperimentError("the oracle solver supports only the quadratic flux")
    ic = cfg.ic()
    p = cfg.period
    s = ic.shock_speed
    is_burgers = cfg.flux_name == "burgers"
    gap = p / (cfg.ul - cfg.ur)
    ts = cfg.times()
    res_times: list[float] = []
    if is_burgers:
        ts = _avoid_resonances(ts, gap)
        t_merge = hopf.merge_time(ic, ts).t_merge
        n = 1
        while n * gap <= ts[-1] and len(res_times) < 24:
            if n * gap > t_merge:
                res_times.append(n * gap)
            n += 1
    else:
        t_merge = math.nan

    backends = []
    if cfg.solver in ("oracle", "both"):
        backends.append(_OracleShock(ic))
    if cfg.solver in ("fronttrack", "both"):
        backends.append(_FrontTrackShock(ic, cfg.delta, sorted(set(ts) | set(res_times))))

    names = ("X_err", "sup_left", "sup_right", "glue_mismatch", "offset_pred")
    results = [{n: [] for n in names} for _ in backends]
    positions = [[] for _ in backends]
    for t in ts:
        for backend, dest, pos in zip(backends, results, positions):
            backend.advance(t)
            x_t = backend.position(t)
            pos.append(x_t)
            dest["X_err"].append(abs(x_t - s * t))
            dest["sup_left"].append(backend.sup_dev(t, x_t - p, x_t, cfg.ul))
            dest["sup_right"].append(backend.sup_dev(t, x_t, x_t + p, cfg.ur))
            dest["glue_mismatch"].append(backend.glue(t, x_t))
            if is_burgers:
                n_min = int(math.ceil(t * (cfg.ul - cfg.ur) / (2.0 * p))) + 1
                dest["offset_pred"].append(shock_offset(ic, x_t, t, n_min))
            else:
                dest["offset_pred"].append(math.nan)
    series = results[0]
    oracle_primary = cfg.solver in ("oracle", "both")

    extras: dict[str, list[float]] = {}
    if is_burgers and oracle_primary:
        # |X - st| has exact zeros on the coincidence lattice and its level
        # alternates with lattice parity, so the pointwise series is a poor
        # boundedness witness; the max over a cell pair tracks the envelope
        env = []
        for t, v in zip(ts, series["X_err"]):
            for j in range(1, 8):
                t2 = t + j * gap / 4.0
                v = max(v, abs(backends[0].position(t2) - s * t2))
            env.append(v)
        extras["X_err_env"] = env

    checks: list[list] = []
    fit_series = extras.get("X_err_env", series["X_err"])
    fit = _fit_and_check(checks, "X_err_rate_fit", ts, fit_series, -0.9)
    _trend_check(checks, "bounded_t_X_err", ts, fit_series)
    for name in ("sup_left", "sup_right"):
        _trend_check(checks, f"bounded_t_{name}", ts, series[name])
    glue_tol = 1e-8 if oracle_primary else 5.0 * cfg.delta
    post = [
        g
        for t, g in zip(ts, series["glue_mismatch"])
        if math.isnan(t_merge) or t > t_merge
    ]
    worst_glue = max(post) if post else 0.0
    checks.append(["glue_after_merge", bool(worst_glue <= glue_tol), float(worst_glue)])

    if is_burgers:
        off_tol = 1e-8 if oracle_primary else max(1e-8, 5.0 * cfg.delta)
        diffs = [
            abs(o - (x_t - s * t))
            for t, o, x_t in zip(ts, series["offset_pred"], positions[0])
            if t > t_merge
        ]
        worst_off = max(diffs) if diffs else 0.0
        checks.append(["offset_agreement", bool(worst_off <= off_tol), float(worst_off)])

    if is_burgers and res_times:
        res_err = [abs(backends[0].position(t_n) - s * t_n) for t_n in res_times]
        extras["resonant_times"] = list(res_times)
        extras["resonant_X_err"] = res_err
        if oracle_primary:
            worst_res = max(res_err)
            checks.append(["resonant_coincidence", bool(worst_res <= 1e-8), float(worst_res)])

    if len(backends) == 2:
        agree_tol = max(1e-8, 5.0 * cfg.delta)
        worst_agree = 0.0
        for name in names:
            for a, b in zip(results[0][name], results[1][name]):
                if not math.isnan(a) and not math.isnan(b):
                    worst_agree = max(worst_agree, abs(a - b))
        checks.append(["solver_agreement", bool(worst_agree <= agree_tol), float(worst_agree)])

    for name in ("X_err", "sup_left", "sup_right"):
        extras[f"empirical_C_{name}"] = [max(t * v for t, v in zip(ts, series[name]))]

    return DecayReport(
        kind="shock",
        times=list(ts),
        series=series,
        fitted_exponent=fit.exponent,
        fitted_constant=fit.constant,
        fit_max_residual=fit.max_residual,
        fit_floored=fit.floored,
        detected_T=float(t_merge),
        structural_checks=checks,
        config=cfg.echo(),
        extras=extras,
    )


# -- rarefaction decay -------------------------------------------------------


def _rarefaction_samples(el: float, er: float, t: float, p: float) -> np.ndarray:
    """Interior grid, geometric clusters at both fan edges, one flank period."""
    lo, hi = el * t, er * t
    xs = [lo + (hi - lo) * (np.arange(2048) + 0.5) / 2048.0]
    steps = p * 2.0 ** -np.arange(1, 25, dtype=float)
    for edge in (lo, hi):
        xs.append(edge + steps)
        xs.append(edge - steps)
    xs.append(np.linspace(lo - p, lo, 257))
    xs.append(np.linspace(hi, hi + p, 257))
    return np.unique(np.concatenate(xs))


def run_rarefaction(cfg: ExperimentConfig) -> DecayReport:
    if cfg.ul >= cfg.ur:
        raise ExperimentError("rarefaction mode needs ul < ur")
    if cfg.solver in ("oracle", "both") and cfg.flux_name != "burgers":
        raise ExperimentError("the oracle solver supports only the quadratic flux")
    ic = cfg.ic()
    flux = ic.flux
    p = cfg.period
    ref = reference_rarefaction(ic)
    el = float(flux.deriv(cfg.ul))
    er = float(flux.deriv(cfg.ur))
    ts = cfg.times()

    use_oracle = cfg.solver in ("oracle", "both")
    use_ft = cfg.solver in ("fronttrack", "both")
    ev = hopf.oracle_evaluator(ic) if use_oracle else None
    poly = state = None
    if use_ft:
        poly = ft.polygon_for(ic, flux, cfg.delta)
        span = max(abs(el), abs(er)) * ts[-1] + 2.0 * p + 1.0
        state = ft.initial_state(ic, poly, ts[-1], span=span)

    # nonnegative primitive activates the exact three-piece structure check
    prof = ic.perturbation
    prim_vals = primitive(prof, np.linspace(0.0, p, 257))
    check_fan = float(np.min(prim_vals)) >= -1e-12
    fan_ts = {ts[len(ts) // 2], ts[-1]}
    worst_fan = 0.0
    worst_flank = 0.0
    if check_fan and use_oracle:
        pev_l = hopf.periodic_evaluator(prof, cfg.ul)
        pev_r = hopf.periodic_evaluator(prof, cfg.ur)

    sup_err: list[float] = []
    sup_err_ft: list[float] = []
    for t in ts:
        xs = _rarefaction_samples(el, er, t, p)
        if use_ft:
            state = ft.evolve(state, poly, t)
            sup_err_ft.append(
                max(abs(ft.sample(state, float(x)) - ref.eval(float(x), t)) for x in xs)
            )
        if use_oracle:
            sup_err.append(
                max(abs(ev(float(x), t, "right") - ref.eval(float(x), t)) for x in xs)
            )
        if check_fan and t in fan_ts:
            lo, hi = el * t, er * t
            for frac in np.linspace(0.05, 0.95, 33):
                x = lo + (hi - lo) * float(frac)
                u_ref = float(flux.inv_deriv(x / t))
                u = ev(float(x), t, "right") if use_oracle else ft.sample(state, float(x))
                worst_fan = max(worst_fan, abs(u - u_ref))
            if use_oracle:
                # outside the fan the solution matches the one-sided pure
                # periodic runs; sample one period off each edge
                for k in range(65):
                    xl = lo - p + (p - 1e-6) * k / 64.0
                    xr = hi + 1e-6 + (p - 1e-6) * k / 64.0
                    worst_flank = max(
                        worst_flank,
                        abs(ev(xl, t, "right") - pev_l(xl, t, "right")),
                        abs(ev(xr, t, "right") - pev_r(xr, t, "right")),
                    )
    primary = sup_err if use_oracle else sup_err_ft

    checks: list[list] = []
    fit = _fit_and_check(checks, "sup_err_rate_fit", ts, primary, -0.85)
    _trend_check(checks, "bounded_t_sup_err", ts, primary)

    # backward feet from inside the fan must stay between the sandwich
    # divides, whose feet sit one period apart around the primitive argmin
    if use_oracle:
        a0 = argmin_primitive(prof)
        sol = handle_from_ic(ic)
        worst_foot = -math.inf
        ok = True
        for t in (ts[len(ts) // 3], ts[2 * len(ts) // 3], ts[-1]):
            for frac in np.linspace(0.1, 0.9, 9):
                x = (el + (er - el) * float(frac)) * t
                for kind in ("minimal", "maximal"):
                    foot = backward_extremal(sol, x, t, kind).foot
                    worst_foot = max(worst_foot, a0 - p - foot, foot - a0)
                    ok = ok and a0 - p - 1e-6 <= foot <= a0 + 1e-6
        checks.append(["divide_sandwich", bool(ok), float(worst_foot)])

    if check_fan:
        fan_tol = 1e-8 if use_oracle else max(1e-8, 5.0 * cfg.delta)
        checks.append(["fan_interior_identity", bool(worst_fan <= fan_tol), float(worst_fan)])
        if use_oracle:
            checks.append(["fan_flank_match", bool(worst_flank <= 1e-8), float(worst_flank)])

    if use_oracle and use_ft:
        agree = max(abs(a - b) for a, b in zip(sup_err, sup_err_ft))
        checks.append(
            ["solver_agreement", bool(agree <= max(1e-8, 5.0 * cfg.delta)), float(agree)]
        )

    series = {"sup_err": list(primary)}
    extras = {"empirical_C_sup_err": [max(t * v for t, v in zip(ts, primary))]}
    return DecayReport(
        kind="rarefaction",
        times=list(ts),
        series=series,
        fitted_exponent=fit.exponent,
        fitted_constant=fit.constant,
        fit_max_residual=fit.max_residual,
        fit_floored=fit.floored,
        detected_T=math.nan,
        structural_checks=checks,
        config=cfg.echo(),
        extras=extras,
    )


# -- periodic decay ----------------------------------------------------------


def _two_constant_levels(prof: PeriodicProfile) -> tuple[float, float] | None:
    """(m1, m2) when the perturbation is two-constant, else None."""
    if len(prof.pieces) != 2:
        return None
    a, b = prof.pieces
    if not (a.is_constant and b.is_constant):
        return None
    hi = max(a.left, b.left)
    lo = min(a.left, b.left)
    if hi <= 0.0 or lo >= 0.0:
        return None
    return hi, -lo


def run_periodic_decay(cfg: ExperimentConfig) -> DecayReport:
    if cfg.ul != cfg.ur:
        raise ExperimentError("periodic mode needs a single mean state (ul == ur)")
    if cfg.solver == "both":
        raise ExperimentError("periodic mode runs one solver at a time")
    if cfg.solver == "oracle" and cfg.flux_name != "burgers":
        raise ExperimentError("the oracle solver supports only the quadratic flux")
    ubar = cfg.ul
    prof = cfg.profile()
    flux = cfg.flux()
    p = cfg.period
    ts = cfg.times()
    gp = g_potential(flux, ubar)
    norm = normalize(flux, ubar)
    # z_of brackets its root with g(+-p/t); both slopes must be invertible
    if not norm.slope_range().contains(-p / ts[0], slack=1e-9):
        raise ExperimentError(
            f"t_min={ts[0]:g} too small: the decay-bound root needs "
            "p/t inside the slope range of the normalized flux"
        )

    two = _two_constant_levels(prof)
    if two is not None:
        m1, m2 = two
        t_p = max(p / float(norm.deriv(ubar + m1)), p / float(-norm.deriv(ubar - m2)))
    else:
        t_p = math.nan

    use_oracle = cfg.solver == "oracle"
    if not use_oracle:
        ic_p = RiemannPerturbedIC(ubar, ubar, prof, flux=flux)
        poly = ft.polygon_for(ic_p, flux, cfg.delta)
        speeds = (
            abs(float(flux.deriv(ubar + prof.upper_bound))),
            abs(float(flux.deriv(ubar + prof.lower_bound))),
        )
        span = max(speeds) * ts[-1] + 2.0 * p
        state = ft.periodic_state(prof, ubar, flux, poly, ts[-1], span=span)

    names = ("sup_minus_ubar", "ubar_minus_inf", "bound_upper", "bound_lower", "z")
    series: dict[str, list[float]] = {n: [] for n in names}
    z_resid: list[float] = []
    z_rel: list[float] = []
    for t in ts:
        z = z_of(gp, p, t)
        resid = abs(gp.eval(z / t) - gp.eval((z - p) / t))
        z_resid.append(resid)
        z_rel.append(resid / max(1.0, abs(gp.eval(p / t))))
        series["z"].append(z)
        series["bound_upper"].append(float(norm.inv_deriv(z / t)) - ubar)
        series["bound_lower"].append(ubar - float(norm.inv_deriv((z - p) / t)))
        if use_oracle:
            sup, inf = hopf.periodic_extrema(prof, ubar, t, grid=SUP_SAMPLES)
        else:
            # window one period wide riding along at the mean-state speed,
            # where the finite state window stays exact
            drift = float(flux.deriv(ubar)) * t
            state = ft.evolve(state, poly, t)
            inf, sup = _state_extrema(state, drift, drift + p)
        series["sup_minus_ubar"].append(sup - ubar)
        series["ubar_minus_inf"].append(ubar - inf)

    checks: list[list] = []
    fit = _fit_and_check(checks, "sup_rate_fit", ts, series["sup_minus_ubar"], -0.85)
    _trend_check(checks, "bounded_t_sup", ts, series["sup_minus_ubar"])

    # relative to the z_of termination scale 1e-12 * max(1, g(p/t))
    worst_z = max(z_rel)
    checks.append(["z_residual", bool(worst_z <= 1e-12), float(worst_z)])
    z_first, z_last = series["z"][0], series["z"][-1]
    checks.append(
        [
            "z_converges_to_half_period",
            bool(abs(z_last - 0.5 * p) <= abs(z_first - 0.5 * p)),
            float(abs(z_last - 0.5 * p)),
        ]
    )

    # one-sided envelope: extrema never rise above the decay bounds, and
    # for two-constant data past the attainment time they touch them
    over_tol = 1e-8 if use_oracle else 5.0 * cfg.delta + 1e-8
    worst_over = -math.inf
    for i in range(len(ts)):
        worst_over = max(
            worst_over,
            series["sup_minus_ubar"][i] - series["bound_upper"][i],
            series["ubar_minus_inf"][i] - series["bound_lower"][i],
        )
    checks.append(["bounds_respected", bool(worst_over <= over_tol), float(worst_over)])

    if two is not None:
        worst_gap = -math.inf
        for i, t in enumerate(ts):
            if t <= t_p:
                continue
            worst_gap = max(
                worst_gap,
                series["bound_upper"][i] - series["sup_minus_ubar"][i],
                series["bound_lower"][i] - series["ubar_minus_inf"][i],
            )
        if worst_gap > -math.inf:
            gap_tol = 1e-8 if use_oracle else 5.0 * cfg.delta + 1e-8
            checks.append(["attainment", bool(worst_gap <= gap_tol), float(worst_gap)])

    extras = {
        "z_residual": z_resid,
        "empirical_C_sup": [max(t * v for t, v in zip(ts, series["sup_minus_ubar"]))],
    }
    # the asymptote constant carries an o(1) with no quantitative rate, so
    # it is only asserted on sweeps reaching far past the merge scale
    horizon = ts[-1] * series["sup_minus_ubar"][-1]
    target = p / (2.0 * float(flux.second_deriv(ubar)))
    rel = abs(horizon - target) / target
    extras["asymptote_rel_gap"] = [rel]
    if ts[-1] >= 128.0 * p:
        checks.append(["asymptote_5pct", bool(rel <= 0.05), float(rel)])

    return DecayReport(
        kind="periodic",
        times=list(ts),
        series=series,
        fitted_exponent=fit.exponent,
        fitted_constant=fit.constant,
        fit_max_residual=fit.max_residual,
        fit_floored=fit.floored,
        detected_T=float(t_p),
        structural_checks=checks,
        config=cfg.echo(),
        extras=extras,
    )


# -- oracle vs front tracking L1 table ---------------------------------------


def l1_per_period(
    ic: RiemannPerturbedIC,
    state: ft.PiecewiseConstantState,
    t: float,
    window: tuple[float, float] | None = None,
) -> float:
    """Jump-aware L1 distance between a tracked state and the oracle.

    Integrates |tracked - oracle| over one period (default: centered on the
    unperturbed shock) on segments cut at both solutions' jumps, insetting
    each segment edge by 1e-8 so the oracle minimizer resolves sides.
    """
    p = ic.perturbation.period
    if window is None:
        c = ic.shock_speed * t
        window = (c - 0.5 * p, c + 0.5 * p)
    lo, hi = window
    ev = hopf.oracle_evaluator(ic)
    hp = hopf.HopfPotential.from_ic(ic, "joined")
    cuts = set(float(b) for b in state.breakpoints if lo < b < hi)
    for j in hopf.scan_jumps(hp, t, lo, hi):
        if lo < j.x < hi:
            cuts.add(float(j.x))
    edges = sorted([lo, hi] + list(cuts))
    err = 0.0
    for a, b in zip(edges[:-1], edges[1:]):
        w = b - a
        if w < 1e-9:
            continue
        sh = min(1e-8, 0.25 * w)
        xs = np.linspace(a + sh, b - sh, 9)
        vals = [abs(ft.sample(state, float(x)) - ev(float(x), t, "right")) for x in xs]
        err += float(np.trapezoid(vals, xs))
    return err


def oracle_diff_table(cfg: ExperimentConfig, times: list[float] | None = None) -> list[dict]:
    """Rows of (t, l1, bound, ok) comparing front tracking to the oracle."""
    if cfg.flux_name != "burgers":
        raise ExperimentError("the oracle comparison needs the quadratic flux")
    if cfg.ul <= cfg.ur:
        raise ExperimentError("oracle-diff runs on shock data (ul > ur)")
    ic = cfg.ic()
    poly = ft.polygon_for(ic, ic.flux, cfg.delta)
    ts = sorted(float(t) for t in times) if times else cfg.times()
    p = cfg.period
    span = abs(ic.shock_speed) * ts[-1] + 2.0 * p + 1.0
    state = ft.initial_state(ic, poly, ts[-1], span=span)
    rows = []
    for t in ts:
        state = ft.evolve(state, poly, t)
        dist = l1_per_period(ic, state, t)
        bound = 5.0 * cfg.delta
        rows.append({"t": t, "l1": dist, "bound": bound, "ok": bool(dist <= bound)})
    return rows
