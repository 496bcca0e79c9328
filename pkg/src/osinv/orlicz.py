"""Orlicz functions, modular sequence norms, and fundamental sequences.

The central object is :class:`OrliczFn`: a nondecreasing piecewise-power
function ``phi`` with ``phi(0) = 0`` and ``phi(t)/t`` nondecreasing (a
quasi-convexity surrogate; true convexity is restored by
:func:`smooth_from_raw`).  On top of it sit the Luxemburg sequence norm,
the fundamental sequence ``phi_n = 1/phi^{-1}(1/n)`` and its inverse
construction, the function induced by a weight density via
``phi(t) = t^2 h(t^{-2})``, and the reference function
``psi(t) = t^2 log(t + 1/t)``.

Everything here matters only in a neighbourhood of zero (sequence norms
never evaluate ``phi`` beyond ``phi^{-1}(1)``); tabulated functions span
``t`` in ``[1e-12, 1e3]`` and extend by pure powers outside.
"""

from __future__ import annotations

import logging
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Iterable, Mapping

import numpy as np

from .errors import (
    BadParameter,
    DomainError,
    Inconsistent,
    NonPositive,
    NotAdmissible,
    TooFewPoints,
)
from .growth import TailIntegral
from .monotone_fn import (
    MonotoneFn,
    _merge_close,
    evaluate,
    evaluate_many,
    generalized_inverse,
    integral,
    make_piecewise,
)
from .util import log_grid

__all__ = [
    "OrliczFn",
    "make_orlicz",
    "power_orlicz",
    "from_weight",
    "sequence_norm",
    "fundamental_sequence",
    "from_fundamental_sequence",
    "smooth_from_raw",
    "psi",
]

logger = logging.getLogger(__name__)

#: Tabulated Orlicz functions span this abscissa range.
GRID_SPAN = (1e-12, 1e3)

#: Slack allowed on the "every local exponent >= 1" admissibility check.
_EXPONENT_TOL = 1e-9

#: Relative half-width of the norm bisection bracket at termination.
_BISECT_RTOL = 1e-12


@dataclass(frozen=True)
class OrliczFn:
    """A nondecreasing function ``phi`` with ``phi(0)=0``, power tails.

    Attributes
    ----------
    body:
        Piecewise-power table of ``phi``.  Below the first knot the
        *first segment's* exponent extends the function (so
        ``phi(0+) = 0``), unlike a bare :class:`MonotoneFn` whose left
        extension is constant; above the last knot `body`'s own right
        exponent rules.
    delta2_constant:
        Least ``lam`` with ``phi(2t) <= lam * phi(t)`` for all ``t``
        (finite for every piecewise-power table).

    Every local exponent — segments, right tail, and hence the left
    extension — must be at least 1, which makes ``phi`` strictly
    increasing with ``phi(t)/t`` nondecreasing.  Build instances with
    :func:`make_orlicz` (or the dedicated constructors), which computes
    the doubling constant.
    """

    body: MonotoneFn
    delta2_constant: float

    def __post_init__(self) -> None:
        if self.body.direction != "nondecreasing":
            raise NotAdmissible("an Orlicz function must be nondecreasing")
        exps = self.body.segment_exponents + (self.body.right_exponent,)
        worst = min(exps)
        if worst < 1.0 - _EXPONENT_TOL:
            raise NotAdmissible(
                f"local exponent {worst} < 1: phi(t)/t would decrease"
            )
        if not (math.isfinite(self.delta2_constant) and self.delta2_constant >= 1.0):
            raise NotAdmissible(
                f"doubling constant must be finite and >= 1, got "
                f"{self.delta2_constant}"
            )

    @property
    def left_exponent(self) -> float:
        """Exponent of the power piece extending below the first knot."""
        if len(self.body.knots) >= 2:
            return self.body.segment_exponents[0]
        return self.body.right_exponent

    def eval(self, t: float) -> float:
        """``phi(t)`` for ``t >= 0`` (``phi(0) = 0``)."""
        t = float(t)
        if not (math.isfinite(t) and t >= 0.0):
            raise DomainError(f"argument must be a finite real >= 0, got {t}")
        if t == 0.0:
            return 0.0
        t1 = self.body.knots[0]
        if t >= t1:
            return evaluate(self.body, t)
        return self.body.values[0] * (t / t1) ** self.left_exponent

    def eval_many(self, ts: Iterable[float]) -> np.ndarray:
        """Vectorized :meth:`eval`."""
        arr = np.asarray(ts, dtype=float)
        if arr.size and (np.any(~np.isfinite(arr)) or np.any(arr < 0.0)):
            raise DomainError("arguments must be finite reals >= 0")
        out = np.zeros_like(arr)
        t1, v1 = self.body.knots[0], self.body.values[0]
        small = (arr > 0.0) & (arr < t1)
        if np.any(small):
            out[small] = v1 * (arr[small] / t1) ** self.left_exponent
        big = arr >= t1
        if np.any(big):
            out[big] = evaluate_many(self.body, arr[big])
        return out

    def inverse(self, y: float) -> float:
        """``phi^{-1}(y) = sup {t : phi(t) <= y}`` (0 at ``y = 0``)."""
        y = float(y)
        if not (math.isfinite(y) and y >= 0.0):
            raise DomainError(f"argument must be a finite real >= 0, got {y}")
        if y == 0.0:
            return 0.0
        v1 = self.body.values[0]
        if y >= v1:
            return generalized_inverse(self.body, y)
        return self.body.knots[0] * (y / v1) ** (1.0 / self.left_exponent)

    def __call__(self, t: float) -> float:
        return self.eval(t)


def _sup_doubling_ratio(phi_eval, knots: tuple[float, ...]) -> float:
    """Exact ``sup_t phi(2t)/phi(t)`` for a piecewise-power ``phi``.

    The ratio is itself piecewise power with breakpoints at the knots and
    half-knots, monotone between them and constant outside, so the sup is
    attained on the breakpoint set (padded by one point on each flank).
    """
    pts = sorted({k for k in knots} | {k / 2.0 for k in knots})
    pts = [pts[0] / 4.0] + pts + [pts[-1] * 4.0]
    return max(phi_eval(2.0 * t) / phi_eval(t) for t in pts)


def make_orlicz(body: MonotoneFn) -> OrliczFn:
    """Wrap a piecewise-power table as an :class:`OrliczFn`.

    Computes the least doubling constant exactly.

    Raises
    ------
    NotAdmissible
        `body` is nonincreasing, or some local exponent is below 1 (so
        ``phi(t)/t`` would decrease somewhere).
    """
    if body.direction != "nondecreasing":
        raise NotAdmissible("an Orlicz function must be nondecreasing")
    exps = body.segment_exponents + (body.right_exponent,)
    worst = min(exps)
    if worst < 1.0 - _EXPONENT_TOL:
        raise NotAdmissible(
            f"local exponent {worst} < 1: phi(t)/t would decrease"
        )
    left_e = exps[0]

    def full_eval(t: float) -> float:
        t1 = body.knots[0]
        if t >= t1:
            return evaluate(body, t)
        return body.values[0] * (t / t1) ** left_e

    d2 = _sup_doubling_ratio(full_eval, body.knots)
    return OrliczFn(body=body, delta2_constant=d2)


def power_orlicz(p: float) -> OrliczFn:
    """The pure power ``phi(t) = t^p`` for ``p >= 1``.

    Raises
    ------
    NotAdmissible
        ``p < 1``.
    """
    p = float(p)
    if not (math.isfinite(p) and p >= 1.0):
        raise NotAdmissible(f"power must be >= 1, got {p}")
    body = make_piecewise(
        [1.0], [1.0], right_exponent=p, direction="nondecreasing"
    )
    return make_orlicz(body)


def from_weight(w: MonotoneFn, per_decade: int | None = None) -> OrliczFn:
    """The Orlicz function ``phi(t) = t^2 h(t^{-2})`` induced by a weight.

    ``h`` is the exact tail integral of `w`; the table samples it on a
    log grid of ``u = t^{-2}`` spanning the standard abscissa range, with
    `w`'s knots added so every kink lands on a knot.  Wherever ``h`` is a
    pure power (beyond `w`'s knots, notably) the table is exact; elsewhere
    it is second-order accurate in the grid spacing.  The large-``t``
    extension is exactly ``t^2`` (times the sampled tail mass) and the
    small-``t`` exponent is pinned exactly by a flanking knot.

    Raises
    ------
    DirectionError
        `w` is nondecreasing.
    DivergentTail
        `w` is not integrable at infinity.
    """
    hh = TailIntegral.from_density(w)
    u_lo, u_hi = GRID_SPAN[1] ** -2.0, GRID_SPAN[0] ** -2.0
    grid = {float(u) for u in log_grid(u_lo, u_hi, per_decade)}
    grid.update(k for k in w.knots if u_lo <= k <= u_hi)
    # One flanking sample beyond the grid pins the exact small-t exponent.
    grid.add(u_hi * 1e4)
    us = _merge_close(sorted(grid))
    knots = [u ** -0.5 for u in reversed(us)]
    values = [float(hh.eval(u)) / u for u in reversed(us)]
    body = make_piecewise(
        knots, values, right_exponent=2.0, direction="nondecreasing"
    )
    return make_orlicz(body)


def sequence_norm(phi: OrliczFn, x: Iterable[float]) -> float:
    """Luxemburg norm ``inf {lam : sum phi(|x_k|/lam) <= 1}``.

    For a nonzero sequence this is the unique ``lam`` solving the modular
    equation ``sum phi(|x_k|/lam) = 1`` (the modular is strictly
    decreasing in ``lam``), found by geometric bisection inside the
    bracket ``[max|x_k|/phi^{-1}(1), sum|x_k|/phi^{-1}(1/n)]``.  The zero
    or empty sequence has norm 0.
    """
    arr = np.abs(np.asarray(list(x), dtype=float))
    if arr.size and np.any(~np.isfinite(arr)):
        raise DomainError("sequence entries must be finite reals")
    arr = arr[arr > 0.0]
    if arr.size == 0:
        return 0.0
    n = arr.size
    lo = float(arr.max()) / phi.inverse(1.0)
    hi = float(arr.sum()) / phi.inverse(1.0 / n)
    if hi <= lo * (1.0 + _BISECT_RTOL):
        return lo

    def modular(lam: float) -> float:
        return float(np.sum(phi.eval_many(arr / lam)))

    for _ in range(200):
        mid = math.sqrt(lo) * math.sqrt(hi)
        if modular(mid) > 1.0:
            lo = mid
        else:
            hi = mid
        if hi <= lo * (1.0 + _BISECT_RTOL):
            break
    return math.sqrt(lo) * math.sqrt(hi)


def fundamental_sequence(phi: OrliczFn, n: float) -> float:
    """``phi_n = 1/phi^{-1}(1/n)`` — the norm of ``n`` ones.

    Raises
    ------
    BadParameter
        ``n < 1`` or nonfinite.
    """
    n = float(n)
    if not (math.isfinite(n) and n >= 1.0):
        raise BadParameter(f"need n >= 1, got {n}")
    return 1.0 / phi.inverse(1.0 / n)


def from_fundamental_sequence(
    phis: Mapping[float, float] | Iterable[tuple[float, float]],
    repair_tol: float = 1e-3,
) -> OrliczFn:
    """Reconstruct ``phi`` from values of its fundamental sequence.

    Plots ``phi^{-1}(1/n) = 1/phi_n`` at the grid points and interpolates
    the inverse geometrically, which pins ``phi`` itself as a piecewise
    power through ``(1/phi_n, 1/n)``.  The data must have ``phi_n``
    nondecreasing and ``phi_n/n`` nonincreasing; violations up to
    `repair_tol` (relative) are projected back onto the admissible band
    and logged, larger ones are rejected.

    Raises
    ------
    TooFewPoints
        Fewer than two grid points.
    NonPositive
        Some ``phi_n <= 0``.
    BadParameter
        Some grid ``n < 1``.
    Inconsistent
        Monotonicity of ``phi_n`` or ``phi_n/n`` fails beyond
        `repair_tol`, or the data collapse to a constant.
    """
    data = dict(phis)
    if len(data) < 2:
        raise TooFewPoints("need at least two fundamental-sequence points")
    items = sorted((float(n), float(v)) for n, v in data.items())
    for n, v in items:
        if not (math.isfinite(n) and n >= 1.0):
            raise BadParameter(f"grid points must be reals >= 1, got {n}")
        if not (math.isfinite(v) and v > 0.0):
            raise NonPositive(f"phi_n must be positive, got {v} at n={n}")

    ln_n = [math.log(n) for n, _ in items]
    g = [math.log(v) for _, v in items]
    # Project onto the band "nondecreasing with slope <= 1 in log n":
    # phi_n up, phi_n/n down.
    h = [g[0]]
    for j in range(1, len(g)):
        cap = h[-1] + (ln_n[j] - ln_n[j - 1])
        h.append(min(max(g[j], h[-1]), cap))
    worst = max(abs(a - b) for a, b in zip(h, g))
    if worst > math.log1p(repair_tol):
        raise Inconsistent(
            "fundamental sequence is not monotone within tolerance "
            f"(relative deviation {math.expm1(worst):.3e})"
        )
    if worst > 0.0:
        logger.info(
            "fundamental-sequence data repaired onto the monotone band "
            "(max relative correction %.3e)",
            math.expm1(worst),
        )

    # phi passes through (1/phi_n, 1/n); ascending knots mean descending n.
    pts: list[tuple[float, float]] = []
    for (n, _), lv in zip(reversed(items), reversed(h)):
        s = math.exp(-lv)
        if pts and s <= pts[-1][0] * (1.0 + 1e-13):
            # Equal phi_n: keep the smaller n (larger 1/n) so the sup
            # inverse reproduces the repaired value there exactly.
            pts[-1] = (pts[-1][0], max(pts[-1][1], 1.0 / n))
            continue
        pts.append((s, 1.0 / n))
    if len(pts) < 2:
        raise Inconsistent("fundamental sequence is constant on the grid")
    knots = [s for s, _ in pts]
    values = [y for _, y in pts]
    body = make_piecewise(
        knots,
        values,
        right_exponent=math.log(values[-1] / values[-2])
        / math.log(knots[-1] / knots[-2]),
        direction="nondecreasing",
    )
    return make_orlicz(body)


def smooth_from_raw(phi_tilde: OrliczFn | MonotoneFn) -> OrliczFn:
    """Convexify a raw quasi-convex function by ``phi(t) = int_0^t raw(s)/s ds``.

    The output is genuinely convex (its derivative ``raw(t)/t`` is
    nondecreasing) and sandwiched: ``phi <= raw <= E * phi`` pointwise,
    where ``E`` is the largest local exponent of the raw function (at
    most 4 throughout this library's pipeline).  The integral is computed
    in closed form piece by piece and tabulated on the raw knots plus a
    log refinement; below the first knot it is exactly
    ``raw(t)/left_exponent``.

    Raises
    ------
    NotAdmissible
        The raw function is nonincreasing or has a local exponent below 1
        (``raw(t)/t`` must be nondecreasing).
    """
    raw = phi_tilde if isinstance(phi_tilde, OrliczFn) else make_orlicz(phi_tilde)
    body = raw.body
    e_left = raw.left_exponent
    t1, v1 = body.knots[0], body.values[0]

    if len(body.knots) == 1:
        # Pure power: the integral is raw/exponent, again a pure power.
        scaled = make_piecewise(
            [t1],
            [v1 / e_left],
            right_exponent=body.right_exponent,
            direction="nondecreasing",
        )
        return make_orlicz(scaled)

    # Integrand raw(s)/s on [t1, inf): piecewise power, exponents >= 0.
    ratio_vals = [v / k for v, k in zip(body.values, body.knots)]
    for j in range(1, len(ratio_vals)):  # clamp float noise on exponent-1 pieces
        ratio_vals[j] = max(ratio_vals[j], ratio_vals[j - 1])
    integrand = make_piecewise(
        list(body.knots),
        ratio_vals,
        right_exponent=body.right_exponent - 1.0,
        direction="nondecreasing",
    )

    # Tabulate out to the standard span: beyond the last raw knot the
    # integrand is a pure power, so the closed-form accumulation stays
    # exact, while a bare power extension from the last knot would be off
    # by a bounded factor.
    t_hi = max(body.knots[-1], GRID_SPAN[1], t1 * 10.0)
    grid = {float(t) for t in log_grid(t1, t_hi)}
    grid.update(body.knots)
    grid.add(t1 / 100.0)  # flanking knot pins the exact left exponent
    pts = _merge_close(sorted(grid))

    values: list[float] = []
    acc = 0.0
    prev: float | None = None
    for t in pts:
        if t <= t1:
            values.append(v1 * (t / t1) ** e_left / e_left)
        else:
            start = prev if prev is not None and prev > t1 else t1
            if not values or prev is None or prev <= t1:
                acc = v1 / e_left
            acc += integral(integrand, start, t)
            values.append(acc)
        prev = t
    out_body = make_piecewise(
        pts, values, right_exponent=body.right_exponent,
        direction="nondecreasing",
    )
    out = make_orlicz(out_body)

    # Sandwich self-check: phi <= raw <= E*phi on the tabulation grid.
    e_max = max(body.segment_exponents + (body.right_exponent, e_left))
    bound = max(4.0, e_max)
    raw_vals = raw.eval_many(pts)
    smooth_vals = out.eval_many(pts)
    if np.any(smooth_vals > raw_vals * (1.0 + 1e-9)) or np.any(
        raw_vals > bound * smooth_vals * (1.0 + 1e-9)
    ):
        raise Inconsistent(
            "smoothing sandwich failed; raw function was not admissible"
        )
    return out


@lru_cache(maxsize=1)
def psi() -> OrliczFn:
    """The reference function ``psi(t) = t^2 log(t + 1/t)``.

    Tabulated on the standard grid.  Its fundamental sequence grows like
    ``sqrt(n log(n+1))`` and its inverse obeys
    ``psi^{-1}(t) ~ sqrt(2t) (log 1/t)^{-1/2}`` as ``t -> 0``.
    """
    ts = log_grid(*GRID_SPAN)
    vals = ts**2 * np.log(ts + 1.0 / ts)
    body = make_piecewise(
        ts.tolist(), vals.tolist(), right_exponent=2.0,
        direction="nondecreasing",
    )
    return make_orlicz(body)
