"""Tail integrals, growth functions, weight recovery, and regularity.

For a nonincreasing integrable density ``w`` on the half line, this module
computes

* the tail function ``h(t) = integral of w over [t, infinity)``,
* the growth function ``g(s)``, the unique fixed point of ``t = s h(t)``,
* the recovered weight ``w = 1 / g^{-1}`` (clamped to 1 near the origin),
* sharp power-envelope regularity diagnostics for increasing tables.

The central object is :class:`TailIntegral`, which stores ``h`` *exactly*:
on each segment of ``w`` the tail integral is ``const + coef (t/anchor)^q``
(or ``const + coef ln(t/anchor)`` when the segment exponent is -1), so
evaluation and the composed integrals used by the invariant formulas carry
no quadrature error.  :func:`tail_fn` exposes a sampled piecewise-power
view of the same function for callers that need a :class:`MonotoneFn`.
"""

from __future__ import annotations

import math
from bisect import bisect_right
from dataclasses import dataclass
from functools import cached_property
from typing import Sequence

import numpy as np

from .errors import (
    BracketFailure,
    DirectionError,
    DivergentTail,
    DomainError,
    NotRegular,
    Unbounded,
)
from .monotone_fn import (
    MonotoneFn,
    _local_power,
    _merge_close,
    _segment_integral,
    evaluate,
    generalized_inverse,
    inverse_fn,
)
from .util import log_grid

__all__ = [
    "TailIntegral",
    "GrowthProfile",
    "RegularityReport",
    "tail_fn",
    "growth_fn",
    "growth_profile",
    "recover_weight",
    "regularity_report",
    "clamped_reciprocal_inverse",
]

#: Window of [1, HI] abscissas over which regularity exponents are read.
_REG_LO = 1.0
_REG_HI = 1.0e6

#: Default power-exponent window (alpha >= 0.02, beta <= 0.98).
DEFAULT_REG_WINDOW = (0.02, 0.98)

_BISECT_REL_TOL = 1e-13
_MAX_DOUBLINGS = 200


@dataclass(frozen=True)
class TailIntegral:
    """Exact ``H(t) = integral of w over [t, infinity)`` for nonincreasing `w`.

    Attributes
    ----------
    density:
        The underlying density `w` (tail exponent < -1).
    pieces:
        Tuples ``(lo, const, coef, q, anchor)``, ascending in `lo`; on the
        span from `lo` to the next piece's `lo`,
        ``H(t) = const + coef (t/anchor)^q``, with ``q = None`` meaning
        ``H(t) = const + coef ln(t/anchor)``.
    """

    density: MonotoneFn
    pieces: tuple[tuple[float, float, float, float | None, float], ...]

    @classmethod
    def from_density(cls, w: MonotoneFn) -> "TailIntegral":
        """Build the exact tail integral of `w`.

        Raises
        ------
        DirectionError
            `w` is nondecreasing.
        DivergentTail
            Tail exponent >= -1 (the integral diverges).
        """
        if w.direction != "nonincreasing":
            raise DirectionError("tail integral needs a nonincreasing density")
        if w.right_exponent >= -1.0:
            raise DivergentTail(
                f"tail exponent {w.right_exponent} >= -1: tail integral diverges"
            )
        knots, vals = w.knots, w.values
        m = len(knots)
        pieces: list[tuple[float, float, float, float | None, float]] = []
        # Beyond the last knot: H(t) = coef (t/t_m)^q with q = e_inf + 1 < 0.
        q_inf = w.right_exponent + 1.0
        h_right = -vals[-1] * knots[-1] / q_inf
        pieces.append((knots[-1], 0.0, h_right, q_inf, knots[-1]))
        h_next = h_right  # H at the left edge of the piece just added
        for i in range(m - 2, -1, -1):
            t0, t1 = knots[i], knots[i + 1]
            v0 = vals[i]
            e = w.segment_exponents[i]
            if abs(e + 1.0) < 1e-9:
                # Chord exponents within float noise of -1 are stored as
                # log pieces; the swap error is O(|e+1| ln^2) and for chord
                # tables that is far below every tolerance used here.
                const = h_next + v0 * t0 * math.log(t1 / t0)
                pieces.append((t0, const, -v0 * t0, None, t0))
                h_next = const
            else:
                q = e + 1.0
                const = h_next + (v0 * t0 / q) * (t1 / t0) ** q
                pieces.append((t0, const, -v0 * t0 / q, q, t0))
                h_next = const - v0 * t0 / q
        # Constant head: H(t) = H(t_1) + v_1 (t_1 - t) on (0, t_1].
        pieces.append((0.0, h_next + vals[0] * knots[0], -vals[0] * knots[0],
                       1.0, knots[0]))
        pieces.reverse()
        return cls(density=w, pieces=tuple(pieces))

    @cached_property
    def _los(self) -> list[float]:
        return [p[0] for p in self.pieces]

    @property
    def mass(self) -> float:
        """Total mass ``H(0+) = integral of w over (0, infinity)``."""
        return self.pieces[0][1]

    @property
    def boundaries(self) -> tuple[float, ...]:
        """Interior piece edges (the knots of the density)."""
        return self.density.knots

    def _piece_at(self, t: float) -> tuple[float, float, float, float | None, float]:
        return self.pieces[bisect_right(self._los, t) - 1]

    def eval(self, t: float) -> float:
        """Exact value of the tail integral at ``t > 0``."""
        t = float(t)
        if not (math.isfinite(t) and t > 0.0):
            raise DomainError(f"abscissa must be a positive real, got {t}")
        _, const, coef, q, anchor = self._piece_at(t)
        if q is None:
            return const + coef * math.log(t / anchor)
        return const + coef * (t / anchor) ** q

    def eval_many(self, ts: Sequence[float]) -> np.ndarray:
        """Vectorized :meth:`eval`."""
        arr = np.asarray(ts, dtype=float)
        if arr.size and (not np.all(np.isfinite(arr)) or np.any(arr <= 0.0)):
            raise DomainError("abscissas must be positive finite reals")
        out = np.empty_like(arr)
        los = np.asarray(self._los)
        idx = np.searchsorted(los, arr, side="right") - 1
        for k, (_, const, coef, q, anchor) in enumerate(self.pieces):
            mask = idx == k
            if not np.any(mask):
                continue
            if q is None:
                out[mask] = const + coef * np.log(arr[mask] / anchor)
            else:
                out[mask] = const + coef * (arr[mask] / anchor) ** q
        return out

    def integral_of_composed(self, tau: MonotoneFn, lo: float, hi: float) -> float:
        """Exact ``integral of H(tau(s))`` over ``[lo, hi]``.

        `tau` must be nondecreasing.  The range is split at `tau`'s knots
        and at the preimages under `tau` of this integral's piece edges, so
        each sub-segment composes one power piece of `tau` with one piece
        of ``H`` and integrates in closed form.
        """
        if tau.direction != "nondecreasing":
            raise DirectionError("composed integral needs nondecreasing inner fn")
        lo = float(lo)
        hi = float(hi)
        if not (0.0 <= lo < hi) or not math.isfinite(hi):
            raise DomainError(f"need 0 <= lo < hi (finite), got {lo}, {hi}")
        cuts = {lo, hi}
        for t in tau.knots:
            if lo < t < hi:
                cuts.add(t)
        for edge in self.boundaries:
            try:
                pre = generalized_inverse(tau, edge)
            except Unbounded:
                continue
            if lo < pre < hi:
                cuts.add(pre)
        pts = _merge_close(sorted(cuts))
        total = 0.0
        for x, y in zip(pts, pts[1:]):
            mid = math.sqrt(x) * math.sqrt(y) if x > 0.0 else y / 2.0
            v0, t0, m_exp = _local_power(tau, mid)
            tau_mid = v0 * (mid / t0) ** m_exp
            _, const, coef, q, anchor = self._piece_at(tau_mid)
            if q is None:
                # H(tau(s)) = const + coef ln(v0/anchor) + coef m ln(s/t0)
                base = const + coef * math.log(v0 / anchor)
                total += base * (y - x) + coef * m_exp * (
                    (y * math.log(y / t0) - y) - (x * math.log(x / t0) - x)
                )
            else:
                total += const * (y - x) + _segment_integral(
                    coef * (v0 / anchor) ** q, t0, m_exp * q, x, y
                )
        return total


def tail_fn(
    w: MonotoneFn,
    per_decade: int | None = None,
    extra_knots: Sequence[float] = (),
) -> MonotoneFn:
    """Tail function ``h(t) = integral of w over [t, infinity)`` as a table.

    Exact at every knot (values come from :class:`TailIntegral`); between
    knots the piecewise-power interpolation is exact wherever `w` is a pure
    power below its first knot's reach, and second-order accurate in the
    log spacing otherwise.  Beyond the last knot of `w` the table's tail
    exponent ``e_inf + 1`` is exact.  `extra_knots` forces additional exact
    sample abscissas (used to align the table with a growth table).

    Raises
    ------
    DirectionError
        `w` is nondecreasing.
    DivergentTail
        Tail exponent of `w` is >= -1.
    """
    hh = TailIntegral.from_density(w)
    t_lo = w.knots[0] * 1e-9
    grid = {float(t) for t in log_grid(t_lo, w.knots[-1], per_decade)}
    grid.update(w.knots)
    grid.update(float(t) for t in extra_knots if t > 0.0)
    knots = _merge_close(sorted(grid))
    values = [float(hh.eval(t)) for t in knots]
    return MonotoneFn(
        knots=tuple(knots),
        values=tuple(values),
        right_exponent=w.right_exponent + 1.0,
        direction="nonincreasing",
    )


def _solve_growth(hh: TailIntegral, s: float) -> float:
    """Unique root of ``t = s H(t)`` (the map ``t - s H(t)`` is increasing)."""

    def f(t: float) -> float:
        return t - s * hh.eval(t)

    lo = hi = 1.0
    if f(1.0) < 0.0:
        for _ in range(_MAX_DOUBLINGS):
            hi *= 2.0
            if f(hi) >= 0.0:
                break
        else:
            raise BracketFailure(
                f"no sign change of t - s*h(t) after {_MAX_DOUBLINGS} doublings"
            )
    else:
        for _ in range(_MAX_DOUBLINGS):
            lo /= 2.0
            if f(lo) <= 0.0:
                break
        else:
            raise BracketFailure(
                f"no sign change of t - s*h(t) after {_MAX_DOUBLINGS} halvings"
            )
    for _ in range(_MAX_DOUBLINGS):
        mid = math.sqrt(lo) * math.sqrt(hi)
        if f(mid) < 0.0:
            lo = mid
        else:
            hi = mid
        if hi - lo <= _BISECT_REL_TOL * hi:
            break
    return math.sqrt(lo) * math.sqrt(hi)


def growth_fn(w: MonotoneFn, s_grid: Sequence[float] | None = None) -> MonotoneFn:
    """Growth function ``g``: for each grid point `s`, the root of ``t = s h(t)``.

    Parameters
    ----------
    w:
        Nonincreasing density with integrable tail.
    s_grid:
        Positive sample abscissas (default: 64 points per decade on
        ``[1, 1e8]``).  The returned table interpolates between them and
        continues beyond the last with the locally fitted tail exponent.

    Raises
    ------
    BracketFailure
        The solver found no sign change after 200 doublings.
    DomainError
        Grid contains nonpositive entries.
    """
    hh = TailIntegral.from_density(w)
    if s_grid is None:
        grid = [float(s) for s in log_grid(1.0, 1e8)]
    else:
        grid = sorted(float(s) for s in s_grid)
        if not grid:
            raise DomainError("s_grid must be nonempty")
        if grid[0] <= 0.0 or not math.isfinite(grid[-1]):
            raise DomainError("s_grid entries must be positive finite reals")
        grid = _merge_close(grid)
    roots = [_solve_growth(hh, s) for s in grid]
    # Tail exponent from an auxiliary solve past the grid's end.
    s_aux = grid[-1] * 4.0
    t_aux = _solve_growth(hh, s_aux)
    e_inf = math.log(t_aux / roots[-1]) / math.log(s_aux / grid[-1])
    return MonotoneFn(
        knots=tuple(grid),
        values=tuple(roots),
        right_exponent=max(e_inf, 0.0),
        direction="nondecreasing",
    )


@dataclass(frozen=True)
class GrowthProfile:
    """A density together with its tail, growth, and inverse-growth tables."""

    w: MonotoneFn
    h: MonotoneFn
    g: MonotoneFn
    g_inv: MonotoneFn


def growth_profile(
    w: MonotoneFn, s_grid: Sequence[float] | None = None
) -> GrowthProfile:
    """Bundle ``(w, h, g, g^{-1})`` for one density (see :class:`GrowthProfile`).

    The tail table is sampled at the growth table's values as well, so the
    inverse identity ``h(t) g^{-1}(t) = t`` holds to solver accuracy at
    every profile sample point ``t = g(s)``.
    """
    g = growth_fn(w, s_grid)
    return GrowthProfile(
        w=w, h=tail_fn(w, extra_knots=g.values), g=g, g_inv=inverse_fn(g)
    )


@dataclass(frozen=True)
class RegularityReport:
    """Sharp power envelope of an increasing table over ``[1, 1e6]``.

    ``c (t/s)^alpha <= f(t)/f(s) <= d (t/s)^beta`` for all ``1 <= s <= t <=
    1e6``; for piecewise-power tables the extreme segment slopes give the
    sharp exponents with ``c = d = 1``.  `passed` states whether
    ``0 < alpha <= beta < 1`` holds within the requested window.
    """

    alpha: float
    beta: float
    c: float
    d: float
    passed: bool
    window: tuple[float, float]


def regularity_report(
    f: MonotoneFn,
    alpha_beta_window: tuple[float, float] = DEFAULT_REG_WINDOW,
) -> RegularityReport:
    """Power-envelope exponents of `f` on ``[1, 1e6]`` and a pass verdict.

    Raises
    ------
    DirectionError
        `f` is nonincreasing (report is defined for increasing tables).
    """
    if f.direction != "nondecreasing":
        raise DirectionError("regularity report needs a nondecreasing function")
    slopes: list[float] = []
    if f.knots[0] > _REG_LO:
        slopes.append(0.0)  # constant head intersects the window
    for i, e in enumerate(f.segment_exponents):
        if f.knots[i + 1] > _REG_LO and f.knots[i] < _REG_HI:
            slopes.append(e)
    if f.knots[-1] < _REG_HI:
        slopes.append(f.right_exponent)
    alpha = min(slopes)
    beta = max(slopes)
    lo, hi = alpha_beta_window
    passed = lo <= alpha <= beta <= hi
    return RegularityReport(
        alpha=alpha, beta=beta, c=1.0, d=1.0, passed=passed,
        window=(lo, hi),
    )


def clamped_reciprocal_inverse(f: MonotoneFn) -> MonotoneFn:
    """The weight ``t -> min(1, 1 / f^{-1}(t))`` for strictly increasing `f`.

    Equals 1 on ``(0, f(1)]`` and ``1/f^{-1}`` beyond — the construction
    that turns a growth/fundamental function back into a normalized-form
    density on the half line.
    """
    t0 = evaluate(f, 1.0)
    inv = inverse_fn(f)
    knots = [t0]
    values = [1.0]
    for t, v in zip(inv.knots, inv.values):
        if t > t0 * (1.0 + 1e-12) and v >= 1.0:
            knots.append(t)
            values.append(1.0 / v)
    return MonotoneFn(
        knots=tuple(knots),
        values=tuple(values),
        right_exponent=-inv.right_exponent,
        direction="nonincreasing",
    )


def recover_weight(g: MonotoneFn) -> MonotoneFn:
    """Recover the density whose growth function is (equivalent to) `g`.

    Returns ``w = 1/g^{-1}`` clamped to 1 on ``(0, g(1)]``.  Running
    :func:`growth_fn` on the result reproduces `g` up to a bounded ratio at
    infinity.

    Raises
    ------
    NotRegular
        `g` fails the power-window regularity check (exponents outside
        the default window), so recovery is not guaranteed.
    """
    report = regularity_report(g)
    if not report.passed:
        raise NotRegular(
            f"growth exponents [{report.alpha}, {report.beta}] outside "
            f"window {report.window}; weight recovery not guaranteed"
        )
    return clamped_reciprocal_inverse(g)
