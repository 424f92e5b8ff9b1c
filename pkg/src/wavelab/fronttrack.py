"""Event-driven wave-front tracking for convex fluxes.

The flux is replaced by its chord polygon on a node grid of spacing delta;
piecewise constant data with node values then evolves exactly: fronts are
straight lines, collisions are the only events, and every collision of
admissible fronts resolves into at most one outgoing shock (rarefaction
fans appear only in the initial Riemann resolutions at t=0, because a
colliding group has strictly decreasing chord speeds and node arithmetic
forces its end states to satisfy left >= right).

A forward generalized characteristic can be tracked through the evolution:
it rides fronts, and when its front cancels it glides at the right chord
slope of the local value (the maximal-characteristic convention) until it
hits a neighbour front.
"""
from __future__ import annotations

import heapq
import math
from dataclasses import dataclass, field
from typing import IO, Optional, Sequence

import numpy as np

from .fluxes import ConvexFlux
from .profiles import PeriodicProfile, RiemannPerturbedIC


class FrontTrackError(ValueError):
    pass


COLLISION_TOL = 1e-13
COLOC_TOL = 1e-10
SNAP_TOL = 1e-9


@dataclass(frozen=True)
class FluxPolygon:
    """Chord polygon of a convex flux on an even node grid."""

    us: np.ndarray
    fs: np.ndarray
    delta: float
    flux: ConvexFlux = field(repr=False)

    def __post_init__(self):
        du = np.diff(self.us)
        if not np.all(du > 0):
            raise FrontTrackError("polygon nodes must be strictly increasing")
        slopes = np.diff(self.fs) / du
        if not np.all(np.diff(slopes) > 0):
            raise FrontTrackError("polygon chords must be strictly increasing")
        object.__setattr__(self, "_succ", slopes)

    @property
    def n(self) -> int:
        return len(self.us)

    def chord(self, i: int, j: int) -> float:
        return float((self.fs[j] - self.fs[i]) / (self.us[j] - self.us[i]))

    def succ_chord(self, i: int) -> float:
        """Chord slope between node i and i+1."""
        return float(self._succ[i])

    def snap(self, v: float) -> int:
        """Index of the nearest node; values may be off-grid by up to delta/2."""
        spacing = self.us[1] - self.us[0] if self.n > 1 else 1.0
        i = int(round((v - self.us[0]) / spacing))
        if i < 0 or i >= self.n:
            raise FrontTrackError(f"value {v} outside polygon range")
        return i

    def index_of(self, v: float) -> int:
        """Index of v, which must be a node value up to rounding."""
        i = self.snap(v)
        if abs(self.us[i] - v) > SNAP_TOL * max(1.0, abs(v)):
            raise FrontTrackError(f"{v} is not a polygon node value")
        return i


def approximate_flux(flux: ConvexFlux, delta: float, u_range: tuple) -> FluxPolygon:
    """Node grid of spacing <= delta covering u_range (endpoints included)."""
    if delta <= 0:
        raise FrontTrackError("delta must be positive")
    lo, hi = float(u_range[0]), float(u_range[1])
    if hi <= lo:
        raise FrontTrackError("empty u_range")
    q = (hi - lo) / delta
    # relative slack: range endpoints often carry rounding-level padding
    n = max(1, math.ceil(q * (1.0 - 1e-9) - 1e-12))
    us = np.linspace(lo, hi, n + 1)
    fs = flux.eval(us)
    return FluxPolygon(us, np.asarray(fs, dtype=float), delta, flux)


@dataclass(frozen=True)
class Front:
    position: float
    left_value: float
    right_value: float
    speed: float


@dataclass(frozen=True)
class PiecewiseConstantState:
    time: float
    breakpoints: np.ndarray
    values: np.ndarray
    period_hint: Optional[float] = None

    def __post_init__(self):
        if len(self.values) != len(self.breakpoints) + 1:
            raise FrontTrackError("values must have one more entry than breakpoints")
        if len(self.breakpoints) and not np.all(np.diff(self.breakpoints) > 0):
            raise FrontTrackError("breakpoints must be strictly increasing")


@dataclass(frozen=True)
class ShockPath:
    times: tuple
    positions: tuple
    source: str = "fronttrack"


def riemann_fan(poly: FluxPolygon, ul: float, ur: float) -> list[Front]:
    """Resolution of the (ul, ur) jump at the origin for the polygonal flux."""
    il = poly.index_of(ul)
    ir = poly.index_of(ur)
    if il == ir:
        return []
    if il > ir:
        return [Front(0.0, float(poly.us[il]), float(poly.us[ir]), poly.chord(il, ir))]
    return [
        Front(0.0, float(poly.us[k]), float(poly.us[k + 1]), poly.succ_chord(k))
        for k in range(il, ir)
    ]


def sample(state: PiecewiseConstantState, x: float) -> float:
    """Right-continuous evaluation of the state."""
    i = int(np.searchsorted(state.breakpoints, x, side="right"))
    return float(state.values[i])


def dump_snapshot(state: PiecewiseConstantState, out: IO[str], delta: float | None = None) -> None:
    """Text snapshot, one line per piece: left endpoint and value."""
    p = state.period_hint if state.period_hint is not None else float("nan")
    d = delta if delta is not None else float("nan")
    out.write(f"# t={float(state.time)!r} delta={float(d)!r} period={float(p)!r}\n")
    out.write(f"-inf {float(state.values[0])!r}\n")
    for b, v in zip(state.breakpoints, state.values[1:]):
        out.write(f"{float(b)!r} {float(v)!r}\n")


# -- event-driven engine ---------------------------------------------------


class _F:
    __slots__ = ("x0", "t0", "speed", "il", "ir", "prev", "next", "alive", "seq")

    def __init__(self, x0, t0, speed, il, ir, seq):
        self.x0 = x0
        self.t0 = t0
        self.speed = speed
        self.il = il
        self.ir = ir
        self.prev = None
        self.next = None
        self.alive = True
        self.seq = seq

    def pos(self, t: float) -> float:
        return self.x0 + self.speed * (t - self.t0)


_RIDE = "ride"
_GLIDE = "glide"


class _Engine:
    """Linked front list plus a lazy-validated collision heap."""

    def __init__(self, poly: FluxPolygon, t0: float):
        self.poly = poly
        self.t = t0
        self.heap: list = []
        self.seq = 0
        self.head: Optional[_F] = None
        # tracked characteristic state
        self.mode: Optional[str] = None
        self.ride_front: Optional[_F] = None
        self.glide_x0 = 0.0
        self.glide_t0 = 0.0
        self.glide_idx = 0
        self.glide_rule = "max"  # "max": right chord; "mid": chord average
        self.glide_left: Optional[_F] = None
        self.glide_right: Optional[_F] = None
        self.path_version = 0

    # construction

    def load(self, fronts: list[tuple[float, int, int]]):
        prev = None
        for x, il, ir in fronts:
            f = self._new(x, self.t, il, ir)
            f.prev = prev
            if prev is None:
                self.head = f
            else:
                prev.next = f
            prev = f
        node = self.head
        while node is not None and node.next is not None:
            self._schedule(node, node.next)
            node = node.next

    def _new(self, x, t, il, ir) -> _F:
        self.seq += 1
        if il > ir:
            speed = self.poly.chord(il, ir)
        elif il + 1 == ir:
            speed = self.poly.succ_chord(il)
        else:
            raise FrontTrackError("front must be a shock or single fan step")
        return _F(x, t, speed, il, ir, self.seq)

    def _schedule(self, f: _F, g: _F):
        if f.speed <= g.speed:
            return
        gap = g.pos(self.t) - f.pos(self.t)
        tc = self.t + max(gap, 0.0) / (f.speed - g.speed)
        xc = f.pos(tc)
        self.seq += 1
        heapq.heappush(self.heap, (tc, xc, self.seq, "col", f, g, 0))

    def _schedule_path_cross(self):
        """Crossing events of the gliding path against both neighbours."""
        self.path_version += 1
        v = self.path_version
        sp = self._glide_speed()
        for other, catching in ((self.glide_right, True), (self.glide_left, False)):
            if other is None:
                continue
            rel = sp - other.speed if catching else other.speed - sp
            if rel <= 0:
                continue
            gap = other.pos(self.t) - self._path_pos(self.t)
            tc = self.t + max(gap if catching else -gap, 0.0) / rel
            self.seq += 1
            heapq.heappush(self.heap, (tc, other.pos(tc), self.seq, "path", other, None, v))

    def _glide_speed(self) -> float:
        j = self.glide_idx
        lo = self.poly.succ_chord(j - 1) if j > 0 else self.poly.succ_chord(j)
        hi = self.poly.succ_chord(j) if j + 1 < self.poly.n else self.poly.succ_chord(j - 1)
        if self.glide_rule == "mid":
            # subdifferential midpoint: the classical speed of the polygon
            return 0.5 * (lo + hi)
        return hi

    def _path_pos(self, t: float) -> float:
        if self.mode == _RIDE:
            return self.ride_front.pos(t)
        return self.glide_x0 + self._glide_speed() * (t - self.glide_t0)

    # event loop

    def run(self, t_end: float, sample_times: Sequence[float] = (), record=None):
        """Advance to t_end; record(t, x_path) at each sample time if given."""
        samples = sorted(float(ts) for ts in sample_times)
        si = 0
        while self.heap:
            tc, xc, _, kind, a, b, ver = self.heap[0]
            if tc > t_end:
                break
            heapq.heappop(self.heap)
            if kind == "col":
                if not (a.alive and b.alive and a.next is b):
                    continue
            else:
                if ver != self.path_version or self.mode != _GLIDE or not a.alive:
                    continue
                if a is not self.glide_left and a is not self.glide_right:
                    continue
            while si < len(samples) and samples[si] <= tc:
                if record is not None:
                    record(samples[si], self._path_pos(samples[si]))
                si += 1
            self.t = tc
            if kind == "col":
                self._resolve(a, b, tc, xc)
            else:
                # path reaches a neighbour front and rides it
                self.mode = _RIDE
                self.ride_front = a
                self.glide_left = self.glide_right = None
                self.path_version += 1
        self.t = t_end
        while si < len(samples) and samples[si] <= t_end:
            if record is not None:
                record(samples[si], self._path_pos(samples[si]))
            si += 1

    def _gather(self, f: _F, g: _F, tc: float, xc: float) -> list[_F]:
        group = [f, g]
        tol_x = COLOC_TOL * max(1.0, abs(xc), abs(tc))
        left = f.prev
        while left is not None and left.speed > group[0].speed and abs(left.pos(tc) - xc) <= tol_x:
            group.insert(0, left)
            left = left.prev
        right = g.next
        while right is not None and group[-1].speed > right.speed and abs(right.pos(tc) - xc) <= tol_x:
            group.append(right)
            right = right.next
        return group

    def _resolve(self, f: _F, g: _F, tc: float, xc: float):
        group = self._gather(f, g, tc, xc)
        vl, vr = group[0].il, group[-1].ir
        prev_f = group[0].prev
        next_f = group[-1].next
        path_involved = self.mode == _RIDE and any(m is self.ride_front for m in group)
        glide_touched = self.mode == _GLIDE and (
            any(m is self.glide_left for m in group) or any(m is self.glide_right for m in group)
        )
        for m in group:
            m.alive = False
        if vl == vr:
            # cancellation: the fronts annihilate
            if prev_f is not None:
                prev_f.next = next_f
            else:
                self.head = next_f
            if next_f is not None:
                next_f.prev = prev_f
            if prev_f is not None and next_f is not None:
                self._schedule(prev_f, next_f)
            if path_involved:
                self.mode = _GLIDE
                self.glide_x0 = xc
                self.glide_t0 = tc
                self.glide_idx = vl
                self.glide_left = prev_f
                self.glide_right = next_f
                self._schedule_path_cross()
            elif glide_touched:
                self._reattach_glide(prev_f, next_f, tc, vl, None)
            return
        if vl < vr:
            raise FrontTrackError("collision produced an inadmissible up-jump")
        n = self._new(xc, tc, vl, vr)
        n.prev = prev_f
        n.next = next_f
        if prev_f is not None:
            prev_f.next = n
        else:
            self.head = n
        if next_f is not None:
            next_f.prev = n
        if prev_f is not None:
            self._schedule(prev_f, n)
        if next_f is not None:
            self._schedule(n, next_f)
        if path_involved:
            self.ride_front = n
        elif glide_touched:
            self._reattach_glide(prev_f, next_f, tc, vl, n)

    def _reattach_glide(self, prev_f, next_f, tc, vl, new_front):
        """The gliding path's interval lost a boundary front to a collision.

        The interval is one constant piece, so its boundaries are adjacent
        fronts; a collision can consume one of them (the group extends away
        from the interval) or both (the interval collapsed onto the path).
        """
        left_died = self.glide_left is not None and not self.glide_left.alive
        right_died = self.glide_right is not None and not self.glide_right.alive
        if left_died and right_died:
            if new_front is not None:
                # the interval collapsed into a shock through the path
                self.mode = _RIDE
                self.ride_front = new_front
                self.glide_left = self.glide_right = None
                self.path_version += 1
                return
            # boundaries cancelled; keep gliding in the merged region
            self.glide_x0 = self._path_pos(tc)
            self.glide_t0 = tc
            self.glide_idx = vl
            self.glide_left = prev_f
            self.glide_right = next_f
        elif right_died:
            self.glide_right = new_front if new_front is not None else next_f
        elif left_died:
            self.glide_left = new_front if new_front is not None else prev_f
        self._schedule_path_cross()

    # extraction

    def snapshot(self, period_hint=None) -> PiecewiseConstantState:
        xs, vs = [], []
        node = self.head
        first_val = None
        while node is not None:
            if first_val is None:
                first_val = node.il
            xs.append(node.pos(self.t))
            vs.append(node.ir)
            node = node.next
        if first_val is None:
            raise FrontTrackError("empty state")
        order = np.argsort(xs, kind="stable")
        xs = [xs[i] for i in order]
        vs = [vs[i] for i in order]
        bks, vals = [], [first_val]
        for x, v in zip(xs, vs):
            if v == vals[-1]:
                continue
            if bks and x <= bks[-1]:
                x = np.nextafter(bks[-1], np.inf)
            bks.append(x)
            vals.append(v)
        return PiecewiseConstantState(
            self.t,
            np.array(bks),
            self.poly.us[np.array(vals, dtype=int)],
            period_hint,
        )


# -- building initial states ----------------------------------------------


def _profile_jumps(profile: PeriodicProfile, poly: FluxPolygon, base: float, xlo: float, xhi: float):
    """Node-index transitions of base + profile on [xlo, xhi], ramps discretized."""
    out = []
    p = profile.period
    k0 = math.floor(xlo / p)
    k1 = math.ceil(xhi / p)
    spacing = poly.us[1] - poly.us[0]
    for k in range(k0, k1 + 1):
        for pc in profile.pieces:
            a = k * p + pc.start
            b = a + pc.width
            if b < xlo or a > xhi:
                continue
            ia = poly.snap(base + pc.left)
            if pc.is_constant or poly.snap(base + pc.right) == ia:
                continue
            ib = poly.snap(base + pc.right)
            step = 1 if ib > ia else -1
            # threshold where the ramp crosses the midpoint between nodes
            for j in range(ia, ib, step):
                level = poly.us[j] + step * 0.5 * spacing - base
                xcross = a + pc.width * (level - pc.left) / (pc.right - pc.left)
                out.append((min(max(xcross, a), b), j, j + step))
    return out


def _initial_fronts(ic: RiemannPerturbedIC, poly: FluxPolygon, xlo: float, xhi: float):
    """Resolved t=0 fronts for the perturbed Riemann data on [xlo, xhi]."""
    prof = ic.perturbation
    p = prof.period
    jump_sites: list[tuple[float, float]] = []  # (x, value just right of x)

    def eval_idx(x: float) -> int:
        base = ic.ul if x < 0 else ic.ur
        return poly.snap(base + prof.eval(x))

    cuts = set()
    for b in prof.breakpoints_in(xlo, xhi):
        cuts.add(float(b))
    if xlo < 0.0 < xhi:
        cuts.add(0.0)
    ramp_jumps = _profile_jumps(prof, poly, ic.ul, xlo, min(0.0, xhi)) + _profile_jumps(
        prof, poly, ic.ur, max(0.0, xlo), xhi
    )
    events: dict[float, tuple[int, int]] = {}
    eps = 1e-12 * max(1.0, abs(xlo), abs(xhi))
    cuts_arr = np.array(sorted(cuts))
    for x in cuts_arr:
        il = eval_idx(x - eps)
        ir = eval_idx(x + eps)
        if il != ir:
            events[float(x)] = (il, ir)
    if ramp_jumps and len(cuts_arr):
        rx = np.array([r[0] for r in ramp_jumps])
        j = np.searchsorted(cuts_arr, rx)
        near = np.zeros(len(rx), dtype=bool)
        for off in (-1, 0):
            k = np.clip(j + off, 0, len(cuts_arr) - 1)
            near |= np.abs(cuts_arr[k] - rx) <= eps
    else:
        near = np.zeros(len(ramp_jumps), dtype=bool)
    for (x, ja, jb), skip in zip(ramp_jumps, near):
        if not skip:
            events[x] = (ja, jb)
    fronts: list[tuple[float, int, int]] = []
    for x in sorted(events):
        il, ir = events[x]
        if il > ir:
            fronts.append((x, il, ir))
        else:
            for k in range(il, ir):
                fronts.append((x, k, k + 1))
    return fronts


def data_speed_bound(ic: RiemannPerturbedIC, flux: ConvexFlux) -> float:
    umin = min(ic.ul, ic.ur) + ic.alpha
    umax = max(ic.ul, ic.ur) + ic.beta
    return max(abs(flux.deriv(umin)), abs(flux.deriv(umax)))


def polygon_for(ic: RiemannPerturbedIC, flux: ConvexFlux, delta: float, pad: float = 0.25) -> FluxPolygon:
    umin = min(ic.ul, ic.ur) + ic.alpha - pad
    umax = max(ic.ul, ic.ur) + ic.beta + pad
    # align the grid to multiples of delta, so data values that are exact
    # multiples (mean states, usually) sit on nodes instead of between them
    lo = delta * math.floor(umin / delta)
    hi = delta * math.ceil(umax / delta)
    return approximate_flux(flux, delta, (lo, hi))


def initial_state(
    ic: RiemannPerturbedIC,
    poly: FluxPolygon,
    t_end: float,
    span: float | None = None,
) -> PiecewiseConstantState:
    """Windowed t=0 state wide enough that [-span, span] is exact to t_end."""
    p = ic.perturbation.period
    m = data_speed_bound(ic, poly.flux)
    if span is None:
        span = m * t_end + 3.0 * p
    w = span + m * t_end + 2.0 * p
    fronts = _initial_fronts(ic, poly, -w, w)
    if not fronts:
        v = poly.us[poly.snap(ic.ul + ic.perturbation.eval(0.5 * p))]
        return PiecewiseConstantState(0.0, np.array([]), np.array([v]), p)
    eng = _Engine(poly, 0.0)
    eng.load(fronts)
    return eng.snapshot(period_hint=p)


def evolve(state: PiecewiseConstantState, poly: FluxPolygon, t_end: float) -> PiecewiseConstantState:
    if t_end < state.time:
        raise FrontTrackError("t_end before state time")
    if t_end == state.time:
        return state
    fronts = []
    for i, b in enumerate(state.breakpoints):
        il = poly.index_of(float(state.values[i]))
        ir = poly.index_of(float(state.values[i + 1]))
        if il == ir:
            continue
        if il > ir:
            fronts.append((float(b), il, ir))
        else:
            for k in range(il, ir):
                fronts.append((float(b), k, k + 1))
    if not fronts:
        return PiecewiseConstantState(t_end, state.breakpoints, state.values, state.period_hint)
    eng = _Engine(poly, state.time)
    eng.load(fronts)
    eng.run(t_end)
    return eng.snapshot(period_hint=state.period_hint)


def shock_path(
    ic: RiemannPerturbedIC,
    poly: FluxPolygon,
    t_samples: Sequence[float],
) -> ShockPath:
    """Forward maximal generalized characteristic from the origin."""
    if ic.ul <= ic.ur:
        raise FrontTrackError("shock_path needs ul > ur")
    ts = sorted(float(t) for t in t_samples)
    if not ts or ts[0] <= 0:
        raise FrontTrackError("sample times must be positive")
    t_end = ts[-1]
    p = ic.perturbation.period
    m = data_speed_bound(ic, poly.flux)
    w = 2.0 * m * t_end + 4.0 * p
    fronts = _initial_fronts(ic, poly, -w, w)
    eng = _Engine(poly, 0.0)
    eng.load(fronts)
    # attach the tracked path to the origin's resolution
    at_origin = [f for f in _iter_fronts(eng) if abs(f.x0) <= 1e-12]
    if at_origin:
        eng.mode = _RIDE
        eng.ride_front = at_origin[-1]  # rightmost fan front: maximal path
    else:
        eng.mode = _GLIDE
        eng.glide_x0 = 0.0
        eng.glide_t0 = 0.0
        eng.glide_idx = poly.snap(ic.ur + ic.perturbation.eval(1e-12))
        left = None
        right = None
        for f in _iter_fronts(eng):
            if f.x0 < 0:
                left = f
            elif f.x0 > 0 and right is None:
                right = f
        eng.glide_left = left
        eng.glide_right = right
        eng._schedule_path_cross()
    rec: list[tuple[float, float]] = []
    eng.run(t_end, sample_times=ts, record=lambda t, x: rec.append((t, x)))
    return ShockPath(tuple(r[0] for r in rec), tuple(r[1] for r in rec), "fronttrack")


def _iter_fronts(eng: _Engine):
    node = eng.head
    while node is not None:
        yield node
        node = node.next


def track_path(
    ic: RiemannPerturbedIC,
    poly: FluxPolygon,
    x0: float,
    t_samples: Sequence[float],
    attach_value: float | None = None,
    glide_rule: str = "mid",
) -> ShockPath:
    """Forward generalized characteristic from (x0, 0) on the tracked solution.

    Inside a constant piece the path glides at the classical speed of the
    polygon (the subdifferential midpoint by default); when it is absorbed
    into a front it rides it.  attach_value selects the carried node value
    when x0 sits at a t=0 fan origin, where the forward path is a family.
    """
    ts = sorted(float(t) for t in t_samples)
    if not ts or ts[0] < 0 or ts[-1] == 0:
        raise FrontTrackError("sample times must be nonnegative with t_end > 0")
    t_end = ts[-1]
    p = ic.perturbation.period
    m = data_speed_bound(ic, poly.flux)
    w = 2.0 * m * t_end + 4.0 * p
    fronts = _initial_fronts(ic, poly, x0 - w, x0 + w)
    eng = _Engine(poly, 0.0)
    eng.glide_rule = glide_rule
    eng.load(fronts)
    tol_x = 1e-12 * max(1.0, abs(x0))
    co = [f for f in _iter_fronts(eng) if abs(f.x0 - x0) <= tol_x]
    if attach_value is None and co:
        eng.mode = _RIDE
        eng.ride_front = co[-1] if glide_rule == "max" else co[0]
    else:
        left = None
        right = None
        for f in _iter_fronts(eng):
            if f.x0 < x0 - tol_x:
                left = f
            elif f.x0 > x0 + tol_x and right is None:
                right = f
        if attach_value is None:
            j = right.il if right is not None else (left.ir if left is not None else poly.snap(ic.eval(x0)))
        else:
            j = poly.index_of(attach_value)
            if co:
                for f in co:
                    if f.ir == j:
                        left = f
                    elif f.il == j and (right is None or f.x0 <= right.x0):
                        right = f
            else:
                here = right.il if right is not None else (left.ir if left is not None else j)
                if here != j:
                    raise FrontTrackError("attach_value does not match the state at x0")
        eng.mode = _GLIDE
        eng.glide_x0 = x0
        eng.glide_t0 = 0.0
        eng.glide_idx = j
        eng.glide_left = left
        eng.glide_right = right
        eng._schedule_path_cross()
    rec: list[tuple[float, float]] = []
    eng.run(t_end, sample_times=ts, record=lambda t, x: rec.append((t, x)))
    return ShockPath(tuple(r[0] for r in rec), tuple(r[1] for r in rec), "fronttrack")


def periodic_state(
    profile: PeriodicProfile,
    ubar: float,
    flux: ConvexFlux,
    poly: FluxPolygon,
    t_end: float,
    span: float | None = None,
) -> PiecewiseConstantState:
    """Windowed t=0 state for purely periodic data ubar + profile."""
    ic = RiemannPerturbedIC(ubar, ubar, profile, flux=flux)
    return initial_state(ic, poly, t_end, span)


# -- Godunov cross-check ---------------------------------------------------


def _godunov_flux(flux: ConvexFlux, ua: np.ndarray, ub: np.ndarray) -> np.ndarray:
    fa = flux.eval(ua)
    fb = flux.eval(ub)
    da = flux.deriv(ua)
    db = flux.deriv(ub)
    # rarefaction case minimizes f over [ua, ub]: endpoint or sonic point
    raref = np.where(da >= 0.0, fa, np.where(db <= 0.0, fb, np.inf))
    if np.any(np.isinf(raref)):
        raref = np.where(np.isinf(raref), flux.eval(flux.inv_deriv(0.0)), raref)
    return np.where(ua >= ub, np.maximum(fa, fb), raref)


def godunov_reference(
    ic: RiemannPerturbedIC,
    flux: ConvexFlux,
    dx: float,
    cfl: float,
    t_end: float,
    window: tuple,
) -> list[tuple[float, float]]:
    """First-order Godunov solution sampled at cell centres at t_end."""
    if not (0.0 < cfl <= 0.5):
        raise FrontTrackError("cfl must be in (0, 0.5]")
    if dx <= 0.0:
        raise FrontTrackError("dx must be positive")
    m = data_speed_bound(ic, flux)
    # boundary influence travels one cell per step, i.e. at speed m / cfl
    pad = 1.05 * m * t_end / cfl + dx
    lo = window[0] - pad
    hi = window[1] + pad
    n = int(math.ceil((hi - lo) / dx))
    xs = lo + (np.arange(n) + 0.5) * dx
    u = np.asarray(ic.eval(xs), dtype=float)
    t = 0.0
    dt0 = cfl * dx / max(m, 1e-12)
    fl = np.empty(n + 1)
    while t < t_end - 1e-14:
        dt = min(dt0, t_end - t)
        fl[1:-1] = _godunov_flux(flux, u[:-1], u[1:])
        fl[0] = flux.eval(u[0])
        fl[-1] = flux.eval(u[-1])
        u = u - (dt / dx) * (fl[1:] - fl[:-1])
        t += dt
    keep = (xs >= window[0]) & (xs <= window[1])
    return list(zip(xs[keep].tolist(), u[keep].tolist()))


# -- audits ----------------------------------------------------------------


def window_mean(state: PiecewiseConstantState, lo: float, hi: float) -> float:
    """Average of the state over [lo, hi]."""
    bks = state.breakpoints
    vals = state.values
    edges = np.concatenate([[lo], bks[(bks > lo) & (bks < hi)], [hi]])
    idx = np.searchsorted(bks, edges[:-1], side="right")
    widths = np.diff(edges)
    return float(np.sum(vals[idx] * widths) / (hi - lo))


def window_tv(state: PiecewiseConstantState, lo: float, hi: float) -> float:
    """Total variation of the state over (lo, hi)."""
    bks = state.breakpoints
    vals = state.values
    mask = (bks > lo) & (bks < hi)
    idx = np.where(mask)[0]
    return float(np.sum(np.abs(vals[idx + 1] - vals[idx])))
