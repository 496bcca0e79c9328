"""Weight pairs: the summability condition, norm factor, and conversions.

A weight pair ``(u_c, u_r)`` lives on one of three domains:

* ``discrete`` — positive sequences on ``j >= 1``: finite heads plus
  optional exact power tails ``coef * j**exponent`` (both sides or
  neither);
* ``half_line`` — two :class:`~osinv.monotone_fn.MonotoneFn` densities
  sharing ``(0, infinity)``;
* ``steps`` — two :class:`StepDensity` step functions (piecewise constant,
  compactly supported), the natural codomain of :func:`normalize`.

A pair flagged ``normalized`` is stored in reflected two-sided form: the
column density is ``w_c(-s)`` for ``s > 0`` (its true home is the negative
half line, where the row density is implicitly 1), and the row density
lives on the positive half line (where the column density is implicitly
1).  Both stored densities then integrate to exactly 1.

All integrals and sums here are closed form per power piece; slowly
decaying tails use Euler-Maclaurin corrections, and the harmonic-mean
integrand ``u_c u_r / (u_c + u_r)`` is handled by alternating power series
away from the ratio-1 band plus a high-order quadrature across it.
"""

from __future__ import annotations

import logging
import math
from bisect import bisect_right
from dataclasses import dataclass
from typing import Callable, Iterator, Literal, Sequence

import numpy as np

from .errors import (
    BadParameter,
    Divergent,
    DivergentTail,
    DomainError,
    NonPositive,
)
from .monotone_fn import (
    MonotoneFn,
    _local_power,
    _merge_close,
    _segment_integral,
    integral_min,
    make_piecewise,
)

__all__ = [
    "StepDensity",
    "WeightPair",
    "discrete_pair",
    "half_line_pair",
    "step_pair",
    "check_weight_condition",
    "k_norm_factor",
    "discretize",
    "continuize",
    "normalize",
]

logger = logging.getLogger(__name__)

#: Largest |ratio class index| enumerated before giving up (amplitudes
#: 2^(-j) underflow long before this).
_CLASS_CAP = 900

#: Relative threshold below which trailing ratio-class masses are dropped.
_CLASS_TRUNC = 1e-14

_ONE_FALLING = make_piecewise([1.0], [1.0], right_exponent=0.0,
                              direction="nonincreasing")

# Type of the sum/integral primitive used by the harmonic-mean machinery:
# (v0, x0, e, lo, hi) -> measure of v0 (x/x0)^e over [lo, hi).
_Measure = Callable[[float, float, float, float, float], float]


# ---------------------------------------------------------------------------
# Step densities
# ---------------------------------------------------------------------------


@dataclass(frozen=True)
class StepDensity:
    """Piecewise-constant density: amplitude ``a_i`` on ``(e_i, e_{i+1}]``.

    ``edges`` starts at 0 and increases; the density is 0 beyond the last
    edge (compact support).
    """

    edges: tuple[float, ...]
    amplitudes: tuple[float, ...]

    def __post_init__(self) -> None:
        if len(self.edges) != len(self.amplitudes) + 1:
            raise BadParameter(
                f"{len(self.edges)} edges need {len(self.edges) - 1} amplitudes"
            )
        if self.edges[0] != 0.0:
            raise BadParameter("edges must start at 0")
        prev = -1.0
        for e in self.edges:
            if not (math.isfinite(e) and e > prev):
                raise BadParameter(f"edges must increase, got {self.edges}")
            prev = e
        for a in self.amplitudes:
            if not (math.isfinite(a) and a > 0.0):
                raise NonPositive(f"amplitudes must be positive, got {a}")

    @property
    def mass(self) -> float:
        """Total integral of the density."""
        return float(
            sum(a * (hi - lo) for a, lo, hi in
                zip(self.amplitudes, self.edges, self.edges[1:]))
        )

    def eval(self, s: float) -> float:
        """Density at ``s > 0`` (0 beyond the support)."""
        if not (math.isfinite(s) and s > 0.0):
            raise DomainError(f"abscissa must be positive, got {s}")
        if s > self.edges[-1]:
            return 0.0
        i = bisect_right(self.edges, s) - 1
        if i == len(self.amplitudes):  # s equals the last edge
            i -= 1
        elif s == self.edges[i]:  # cells are left-open: fall to the one below
            i -= 1
        return self.amplitudes[i]

    def tail_mass(self, s: float) -> float:
        """Integral of the density over ``[s, infinity)``."""
        if s >= self.edges[-1]:
            return 0.0
        total = 0.0
        for a, lo, hi in zip(self.amplitudes, self.edges, self.edges[1:]):
            if hi > s:
                total += a * (hi - max(lo, s))
        return total


# ---------------------------------------------------------------------------
# Weight pairs
# ---------------------------------------------------------------------------

Domain = Literal["discrete", "half_line", "steps"]


@dataclass(frozen=True)
class WeightPair:
    """A pair of weights over a shared measure domain (see module docstring)."""

    domain: Domain
    normalized: bool = False
    uc_head: tuple[float, ...] | None = None
    ur_head: tuple[float, ...] | None = None
    uc_tail: tuple[float, float] | None = None
    ur_tail: tuple[float, float] | None = None
    uc_fn: MonotoneFn | None = None
    ur_fn: MonotoneFn | None = None
    uc_steps: StepDensity | None = None
    ur_steps: StepDensity | None = None

    def __post_init__(self) -> None:
        if self.domain == "discrete":
            if self.uc_head is None or self.ur_head is None:
                raise BadParameter("discrete pair needs both heads")
            if len(self.uc_head) != len(self.ur_head):
                raise BadParameter("heads must have equal length")
            if not self.uc_head:
                raise BadParameter("heads must be nonempty")
            for v in self.uc_head + self.ur_head:
                if not (math.isfinite(v) and v > 0.0):
                    raise NonPositive(f"weight values must be positive, got {v}")
            if (self.uc_tail is None) != (self.ur_tail is None):
                raise BadParameter("power tails come in pairs (both or neither)")
            for tail in (self.uc_tail, self.ur_tail):
                if tail is not None:
                    coef, expo = tail
                    if not (math.isfinite(coef) and coef > 0.0):
                        raise NonPositive(f"tail coefficient must be > 0: {coef}")
                    if not math.isfinite(expo):
                        raise BadParameter(f"tail exponent must be finite: {expo}")
            if self.normalized:
                raise BadParameter("normalized pairs are continuous")
        elif self.domain == "half_line":
            if self.uc_fn is None or self.ur_fn is None:
                raise BadParameter("half-line pair needs both densities")
        elif self.domain == "steps":
            if self.uc_steps is None or self.ur_steps is None:
                raise BadParameter("step pair needs both densities")
        else:
            raise BadParameter(f"unknown domain {self.domain!r}")

    @property
    def head_length(self) -> int:
        return len(self.uc_head) if self.uc_head is not None else 0


def discrete_pair(
    uc_head: Sequence[float],
    ur_head: Sequence[float],
    uc_tail: tuple[float, float] | None = None,
    ur_tail: tuple[float, float] | None = None,
) -> WeightPair:
    """Discrete pair on ``j >= 1``: heads, then optional exact power tails."""
    return WeightPair(
        domain="discrete",
        uc_head=tuple(float(v) for v in uc_head),
        ur_head=tuple(float(v) for v in ur_head),
        uc_tail=None if uc_tail is None else (float(uc_tail[0]), float(uc_tail[1])),
        ur_tail=None if ur_tail is None else (float(ur_tail[0]), float(ur_tail[1])),
    )


def half_line_pair(
    uc_fn: MonotoneFn, ur_fn: MonotoneFn, normalized: bool = False
) -> WeightPair:
    """Two monotone densities on the (shared or reflected) half line."""
    return WeightPair(
        domain="half_line", uc_fn=uc_fn, ur_fn=ur_fn, normalized=normalized
    )


def step_pair(
    uc_steps: StepDensity, ur_steps: StepDensity, normalized: bool = False
) -> WeightPair:
    """Two step densities on the (shared or reflected) half line."""
    return WeightPair(
        domain="steps", uc_steps=uc_steps, ur_steps=ur_steps,
        normalized=normalized,
    )


# ---------------------------------------------------------------------------
# Power-sum primitives (Euler-Maclaurin)
# ---------------------------------------------------------------------------


def _em_power_tail(v0: float, x0: float, e: float, a: int) -> float:
    """``sum over j >= a`` of ``v0 (j/x0)^e`` for ``e < -1``, ``a >= 32``."""
    f = v0 * (a / x0) ** e
    return (
        -f * a / (e + 1.0)  # integral from a to infinity
        + f / 2.0
        - f * e / (12.0 * a)
        + f * e * (e - 1.0) * (e - 2.0) / (720.0 * a**3)
        - f * e * (e - 1.0) * (e - 2.0) * (e - 3.0) * (e - 4.0)
        / (30240.0 * a**5)
    )


def _em_power_range(v0: float, x0: float, e: float, a: int, b: int) -> float:
    """``sum for j = a..b`` of ``v0 (j/x0)^e`` via Euler-Maclaurin, ``a >= 32``."""
    fa = v0 * (a / x0) ** e
    fb = v0 * (b / x0) ** e
    total = _segment_integral(v0, x0, e, float(a), float(b))
    total += (fa + fb) / 2.0
    total += e * (fb / b - fa / a) / 12.0
    total -= e * (e - 1.0) * (e - 2.0) * (fb / b**3 - fa / a**3) / 720.0
    total += (
        e * (e - 1.0) * (e - 2.0) * (e - 3.0) * (e - 4.0)
        * (fb / b**5 - fa / a**5)
        / 30240.0
    )
    return total


def _power_sum(v0: float, x0: float, e: float, a: int, b: float) -> float:
    """``sum for j = a..b`` of ``v0 (j/x0)^e``; `b` may be ``math.inf``.

    Exact (vectorized) for short ranges; Euler-Maclaurin beyond, with
    relative error far below 1e-12.

    Raises
    ------
    Divergent
        ``b == inf`` with ``e >= -1``.
    """
    if a > b:
        return 0.0
    switch = 32
    total = 0.0
    explicit_hi = min(b, float(max(a, switch) - 1))
    if a <= explicit_hi:
        js = np.arange(a, int(explicit_hi) + 1, dtype=float)
        total += float(np.sum(v0 * (js / x0) ** e))
    nxt = max(a, switch)
    if b == math.inf:
        if e >= -1.0:
            raise Divergent(f"sum of j^{e} diverges")
        total += _em_power_tail(v0, x0, e, nxt)
    elif nxt <= b:
        bi = int(b)
        if bi - nxt <= 20000:
            js = np.arange(nxt, bi + 1, dtype=float)
            total += float(np.sum(v0 * (js / x0) ** e))
        else:
            total += _em_power_range(v0, x0, e, nxt, bi)
    return total


# ---------------------------------------------------------------------------
# Harmonic-mean machinery: measure of u_c u_r / (u_c + u_r) on power pieces
# ---------------------------------------------------------------------------


def _int_measure(v0: float, x0: float, e: float, lo: float, hi: float) -> float:
    if lo >= hi:
        return 0.0
    return _segment_integral(v0, x0, e, lo, hi)


def _sum_measure(v0: float, x0: float, e: float, lo: float, hi: float) -> float:
    a = max(1, int(math.ceil(lo - 1e-9)))
    if hi == math.inf:
        return _power_sum(v0, x0, e, a, math.inf)
    b = float(int(math.ceil(hi - 1e-9)) - 1)
    if a > b:
        return 0.0
    return _power_sum(v0, x0, e, a, b)


def _min_series(
    small0: float,
    e_small: float,
    big0: float,
    e_big: float,
    x0: float,
    lo: float,
    hi: float,
    measure: _Measure,
) -> float:
    """Measure of ``small / (1 + small/big)`` on [lo, hi).

    Requires ``small/big <= 1/2`` throughout, with the anchor ``x0``
    placed at the max-ratio edge of the region so the alternating terms
    decay at least geometrically (factor 1/2) without overflow.
    """
    total = 0.0
    ratio0 = small0 / big0
    d_e = e_small - e_big
    for k in range(120):
        coef = small0 * (-ratio0) ** k
        term = measure(coef, x0, e_small + k * d_e, lo, hi)
        total += term
        if abs(term) <= 1e-15 * max(abs(total), 1e-300):
            break
    return total


def _q_quad(
    v0: float, x0: float, e: float, rho0: float, d_e: float,
    lo: float, hi: float,
) -> float:
    """Simpson quadrature of ``v0 (x/x0)^e rho/(1+rho)`` over [lo, hi].

    ``rho(x) = rho0 (x/x0)^{d_e}``.  Used across the band where the
    weight ratio lies in [1/2, 2]; the integrand is smooth there and the
    log-axis step keeps the composite-Simpson error near 1e-13 relative.
    """
    u_lo = math.log(lo / x0)
    u_hi = math.log(hi / x0)
    span = u_hi - u_lo
    if span <= 0.0:
        return 0.0
    n = int(min(2_000_000, max(64, math.ceil(span / 1e-3))))
    if n % 2:
        n += 1
    u = np.linspace(u_lo, u_hi, n + 1)
    x_ratio = np.exp(u)
    rho = rho0 * x_ratio**d_e
    f = v0 * x_ratio ** (e + 1.0) * (rho / (1.0 + rho)) * x0
    weights = np.ones(n + 1)
    weights[1:-1:2] = 4.0
    weights[2:-1:2] = 2.0
    return float(np.dot(weights, f) * (span / n) / 3.0)


def _q_sum_range(
    v0: float, x0: float, e: float, rho0: float, d_e: float,
    a: int, b: int,
) -> float:
    """``sum j=a..b`` of ``v0 (j/x0)^e rho(j)/(1+rho(j))``."""
    if a > b:
        return 0.0
    if b - a <= 20000:
        js = np.arange(a, b + 1, dtype=float)
        ratio = js / x0
        rho = rho0 * ratio**d_e
        return float(np.sum(v0 * ratio**e * rho / (1.0 + rho)))

    def f_dlog(j: float) -> tuple[float, float]:
        ratio = j / x0
        rho = rho0 * ratio**d_e
        f = v0 * ratio**e * rho / (1.0 + rho)
        return f, e + d_e / (1.0 + rho)  # (f, d ln f / d ln j)

    fa, da = f_dlog(float(a))
    fb, db = f_dlog(float(b))
    total = _q_quad(v0, x0, e, rho0, d_e, float(a), float(b))
    total += (fa + fb) / 2.0
    total += (fb * db / b - fa * da / a) / 12.0
    return total


def _harmonic_piece(
    uc0: float,
    ec: float,
    ur0: float,
    er: float,
    x0: float,
    lo: float,
    hi: float,
    discrete: bool,
) -> float:
    """Measure of ``u_c u_r/(u_c+u_r)`` on one joint power piece [lo, hi).

    ``u_c(x) = uc0 (x/x0)^{ec}`` and likewise for the row side.  Splits
    the piece at the ratio-1/2 and ratio-2 crossings: outside that band
    an alternating series in the smaller/larger ratio, inside it a direct
    quadrature (or explicit sum).
    """
    measure: _Measure = _sum_measure if discrete else _int_measure
    d_e = er - ec
    rho0 = ur0 / uc0  # row/column ratio at the anchor

    def at(x: float, v0: float, e: float) -> float:
        return v0 * (x / x0) ** e

    if abs(d_e) < 1e-12:
        # Constant ratio: the harmonic mean is an exact multiple of u_c.
        return measure(uc0 * rho0 / (1.0 + rho0), x0, ec, lo, hi)

    def x_at(target: float) -> float:
        ln_x = math.log(target / rho0) / d_e
        if ln_x > 690.0:
            return math.inf
        if ln_x < -690.0:
            return 0.0
        return x0 * math.exp(ln_x)

    band = sorted((x_at(0.5), x_at(2.0)))

    def series_region(
        r_lo: float, r_hi: float,
        c_small: float, e_s: float, c_big: float, e_b: float,
    ) -> float:
        # Anchor at the max-ratio edge; an infinite edge always has
        # ratio -> 0 there, so the anchor stays finite.
        if r_hi == math.inf:
            xa = r_lo
        else:
            rho_lo = at(r_lo, c_small, e_s) / at(r_lo, c_big, e_b)
            rho_hi = at(r_hi, c_small, e_s) / at(r_hi, c_big, e_b)
            xa = r_lo if rho_lo >= rho_hi else r_hi
        return _min_series(
            at(xa, c_small, e_s), e_s, at(xa, c_big, e_b), e_b,
            xa, r_lo, r_hi, measure,
        )

    total = 0.0
    # Region with ratio >= 2 (column side is the small one).
    r_lo, r_hi = (
        (max(lo, band[1]), hi) if d_e > 0 else (lo, min(hi, band[0]))
    )
    if r_lo < r_hi:
        total += series_region(r_lo, r_hi, uc0, ec, ur0, er)
    # Region with ratio <= 1/2 (row side is the small one).
    r_lo, r_hi = (
        (lo, min(hi, band[0])) if d_e > 0 else (max(lo, band[1]), hi)
    )
    if r_lo < r_hi:
        total += series_region(r_lo, r_hi, ur0, er, uc0, ec)
    # Band with ratio in (1/2, 2).
    b_lo = max(lo, band[0])
    b_hi = min(hi, band[1])
    if b_lo < b_hi:
        v_b = at(b_lo, uc0, ec)
        rho_b = at(b_lo, ur0, er) / v_b
        if b_hi == math.inf:
            # Ratio pinned near 1 out to infinity (tiny exponent gap):
            # cut where the remaining column mass is below 1e-15 relative.
            if ec >= -1.0:
                raise Divergent(
                    "weight ratio stays near 1 on a non-integrable tail"
                )
            b_hi = min(b_lo * 10.0 ** min(280.0, 15.0 / -(ec + 1.0)), 1e300)
        if discrete:
            a = max(1, int(math.ceil(b_lo - 1e-9)))
            b = int(math.ceil(b_hi - 1e-9)) - 1
            total += _q_sum_range(v_b, b_lo, ec, rho_b, d_e, a, b)
        else:
            total += _q_quad(v_b, b_lo, ec, rho_b, d_e, b_lo, b_hi)
    return total


# ---------------------------------------------------------------------------
# Joint power pieces of a half-line pair
# ---------------------------------------------------------------------------


def _anchored(fn: MonotoneFn, mid: float) -> tuple[float, float]:
    """(value at mid, exponent) of the power piece of `fn` containing mid."""
    v0, t0, e = _local_power(fn, mid)
    return v0 * (mid / t0) ** e, e


def _joint_pieces(
    uc: MonotoneFn, ur: MonotoneFn, lo: float, hi: float
) -> Iterator[tuple[float, float, float, float, float, float, float]]:
    """Yield ``(a, b, x0, uc0, ec, ur0, er)`` covering [lo, hi).

    On each span both densities are single powers anchored at ``x0``
    (``u(x) = u0 (x/x0)^e``).
    """
    cuts = {lo}
    for t in uc.knots + ur.knots:
        if lo < t < hi:
            cuts.add(t)
    if hi != math.inf:
        cuts.add(hi)
    pts = _merge_close(sorted(cuts))
    spans = list(zip(pts, pts[1:]))
    if hi == math.inf:
        spans.append((pts[-1], math.inf))
    for a, b in spans:
        if b == math.inf:
            mid = 2.0 * a
        elif a == 0.0:
            mid = b / 2.0
        else:
            mid = math.sqrt(a) * math.sqrt(b)
        uc0, ec = _anchored(uc, mid)
        ur0, er = _anchored(ur, mid)
        yield a, b, mid, uc0, ec, ur0, er


# ---------------------------------------------------------------------------
# Ratio classes (shared by discretize and normalize)
# ---------------------------------------------------------------------------


def _class_index(rho: float, log_base: float) -> int:
    """Index j with ``base^{-j} <= rho < base^{-j+1}`` (ties to the lower j)."""
    x = -math.log(rho) / log_base
    xr = round(x)
    if abs(x - xr) < 1e-12:
        return int(xr)
    return int(math.ceil(x))


def _ratio_class_cells(
    uc: MonotoneFn,
    ur: MonotoneFn,
    base: float,
    support: tuple[float, float],
) -> Iterator[tuple[int, float, float, float, float]]:
    """Yield ``(j, s_lo, s_hi, m_c, m_r)`` over ratio classes.

    Class ``j`` holds the abscissas where ``u_r/u_c`` lies in
    ``[base^{-j}, base^{-j+1})``; ``m_c`` and ``m_r`` are the exact
    integrals of the two densities over the cell.  An unbounded trailing
    piece is truncated once three consecutive cells fall below a relative
    min-mass threshold (or at a hard class-index cap, with a warning).
    """
    log_base = math.log(base)
    lo, hi = support
    running_min = 0.0
    for a, b, x0, uc0, ec, ur0, er in _joint_pieces(uc, ur, lo, hi):
        d_e = er - ec
        rho0 = ur0 / uc0

        def mass_over(s1: float, s2: float) -> tuple[float, float]:
            return (
                _segment_integral(uc0, x0, ec, s1, s2),
                _segment_integral(ur0, x0, er, s1, s2),
            )

        if abs(d_e) < 1e-12:
            if b == math.inf and max(ec, er) >= -1.0:
                raise Divergent(
                    "constant weight ratio with a non-integrable tail"
                )
            m_c, m_r = mass_over(a, b)
            running_min += min(m_c, m_r)
            yield _class_index(rho0, log_base), a, b, m_c, m_r
            continue

        def s_at(target_rho: float) -> float:
            ln_s = math.log(target_rho / rho0) / d_e
            if ln_s > 690.0:
                return 1e300
            if ln_s < -690.0:
                return 0.0
            return x0 * math.exp(ln_s)

        j = _class_index(rho0 * (a / x0) ** d_e, log_base)
        step = 1 if d_e < 0 else -1
        lull = 0
        while abs(j) <= _CLASS_CAP:
            hi_rho = base ** float(-j + 1)
            lo_rho = base ** float(-j)
            if d_e < 0:
                s1, s2 = s_at(hi_rho), s_at(lo_rho)
            else:
                s1, s2 = s_at(lo_rho), s_at(hi_rho)
            s1c, s2c = max(s1, a), min(s2, b)
            if s2c > s1c:
                m_c, m_r = mass_over(s1c, s2c)
                cell_min = min(m_c, m_r)
                running_min += cell_min
                yield j, s1c, s2c, m_c, m_r
                if b == math.inf:
                    if cell_min <= _CLASS_TRUNC * max(running_min, 1e-300):
                        lull += 1
                        if lull >= 3:
                            break
                    else:
                        lull = 0
            if s2 >= b:
                break
            j += step
        else:
            logger.warning(
                "ratio-class enumeration capped at |index| = %d", _CLASS_CAP
            )


# ---------------------------------------------------------------------------
# Public operations
# ---------------------------------------------------------------------------


def _discrete_tail_min(p: WeightPair) -> float:
    """Sum of ``min(u_c, u_r)`` over the power tails of a discrete pair."""
    if p.uc_tail is None:
        return 0.0
    (cc, ec), (cr, er) = p.uc_tail, p.ur_tail
    j0 = p.head_length + 1

    def min_sum(lo: int, hi: float) -> float:
        if lo > hi:
            return 0.0
        if hi == math.inf:
            # Asymptotically the smaller exponent wins (coefficient
            # breaks exponent ties); a point probe could land exactly
            # on the crossing.
            col_smaller = ec < er or (ec == er and cc <= cr)
        else:
            probe = math.sqrt(lo) * math.sqrt(hi)
            col_smaller = cc * probe**ec <= cr * probe**er
        v0, e = (cc, ec) if col_smaller else (cr, er)
        try:
            return _power_sum(v0, 1.0, e, lo, hi)
        except Divergent:
            raise Divergent(
                f"tail exponent {e} >= -1 makes the smaller weight "
                "non-summable"
            ) from None

    if abs(ec - er) < 1e-12:
        return min_sum(j0, math.inf)
    ln_cross = math.log(cr / cc) / (ec - er)
    if ln_cross > 690.0:
        return min_sum(j0, math.inf)
    j_cross = int(math.ceil(math.exp(ln_cross) - 1e-12))
    if j_cross <= j0:
        return min_sum(j0, math.inf)
    return min_sum(j0, float(j_cross - 1)) + min_sum(j_cross, math.inf)


def check_weight_condition(
    p: WeightPair, support: tuple[float, float] | None = None
) -> float:
    """Total mass of ``min(u_c, u_r)`` — the summability gate for a pair.

    For a normalized pair this is the mass of ``min(w_c, 1)`` on the
    negative half line plus ``min(1, w_r)`` on the positive one (at most
    2 when both sides have unit mass, as :func:`normalize` guarantees).
    `support` restricts a plain continuous domain to a window.

    Raises
    ------
    Divergent
        The minimum is not integrable/summable.
    BadParameter
        `support` passed for a domain it does not apply to.
    """
    if support is not None and (p.domain == "discrete" or p.normalized):
        raise BadParameter(
            "support windows apply to plain continuous domains only"
        )
    if p.domain == "discrete":
        head = sum(min(c, r) for c, r in zip(p.uc_head, p.ur_head))
        return float(head + _discrete_tail_min(p))
    if p.domain == "half_line":
        try:
            if p.normalized:
                return integral_min(
                    p.uc_fn, _ONE_FALLING, 0.0, math.inf
                ) + integral_min(_ONE_FALLING, p.ur_fn, 0.0, math.inf)
            lo, hi = support if support is not None else (0.0, math.inf)
            return integral_min(p.uc_fn, p.ur_fn, lo, hi)
        except DivergentTail as exc:
            raise Divergent(str(exc)) from None
    # steps
    uc, ur = p.uc_steps, p.ur_steps
    if p.normalized:
        total = sum(
            min(a, 1.0) * (hi - lo)
            for a, lo, hi in zip(uc.amplitudes, uc.edges, uc.edges[1:])
        )
        total += sum(
            min(1.0, a) * (hi - lo)
            for a, lo, hi in zip(ur.amplitudes, ur.edges, ur.edges[1:])
        )
        return float(total)
    lo_w, hi_w = support if support is not None else (0.0, math.inf)
    edges = sorted(set(uc.edges) | set(ur.edges))
    total = 0.0
    for a, b in zip(edges, edges[1:]):
        x, y = max(a, lo_w), min(b, hi_w)
        if x >= y:
            continue
        mid = (x + y) / 2.0
        if mid > uc.edges[-1] or mid > ur.edges[-1]:
            continue
        total += min(uc.eval(mid), ur.eval(mid)) * (y - x)
    return float(total)


def k_norm_factor(
    p: WeightPair, support: tuple[float, float] | None = None
) -> float:
    """The norm factor ``mu``: total mass of ``u_c u_r / (u_c + u_r)``.

    The Banach-level norm of a vector in the two-weight space is
    ``sqrt(mu)`` times its Euclidean norm.  Always at most
    :func:`check_weight_condition` (the harmonic mean sits below the
    minimum), with ratio exactly 1/2 when the two weights coincide.

    Raises
    ------
    Divergent
        The pair fails the weight condition.
    """
    check_weight_condition(p, support)  # divergence gate

    if p.domain == "discrete":
        head = sum(c * r / (c + r) for c, r in zip(p.uc_head, p.ur_head))
        tail = 0.0
        if p.uc_tail is not None:
            (cc, ec), (cr, er) = p.uc_tail, p.ur_tail
            tail = _harmonic_piece(
                cc, ec, cr, er, 1.0,
                float(p.head_length + 1), math.inf, discrete=True,
            )
        return float(head + tail)

    if p.domain == "half_line":
        total = 0.0
        if p.normalized:
            for side in (p.uc_fn, p.ur_fn):
                for a, b, x0, u0, e, _, _ in _joint_pieces(
                    side, _ONE_FALLING, 0.0, math.inf
                ):
                    total += _harmonic_piece(
                        u0, e, 1.0, 0.0, x0, a, b, discrete=False
                    )
            return float(total)
        lo, hi = support if support is not None else (0.0, math.inf)
        for a, b, x0, uc0, ec, ur0, er in _joint_pieces(
            p.uc_fn, p.ur_fn, lo, hi
        ):
            total += _harmonic_piece(uc0, ec, ur0, er, x0, a, b, discrete=False)
        return float(total)

    # steps
    uc, ur = p.uc_steps, p.ur_steps
    if p.normalized:
        total = sum(
            (a / (a + 1.0)) * (hi - lo)
            for a, lo, hi in zip(uc.amplitudes, uc.edges, uc.edges[1:])
        )
        total += sum(
            (a / (a + 1.0)) * (hi - lo)
            for a, lo, hi in zip(ur.amplitudes, ur.edges, ur.edges[1:])
        )
        return float(total)
    lo_w, hi_w = support if support is not None else (0.0, math.inf)
    edges = sorted(set(uc.edges) | set(ur.edges))
    total = 0.0
    for a, b in zip(edges, edges[1:]):
        x, y = max(a, lo_w), min(b, hi_w)
        if x >= y:
            continue
        mid = (x + y) / 2.0
        if mid > uc.edges[-1] or mid > ur.edges[-1]:
            continue
        c, r = uc.eval(mid), ur.eval(mid)
        total += c * r / (c + r) * (y - x)
    return float(total)


def discretize(
    p: WeightPair,
    ratio_base: float,
    support: tuple[float, float] | None = None,
) -> WeightPair:
    """Bin a continuous pair by the ratio ``u_r/u_c`` into a discrete pair.

    Bin ``j`` collects the abscissas where ``u_r/u_c`` lies in
    ``[base^{-j}, base^{-j+1})``; the output sequence is the column mass
    of each bin together with ``base^{-j}`` times that mass on the row
    side, reindexed consecutively from 1 in ascending class order (empty
    bins are skipped).  The output's weight-condition value never exceeds
    the input's.

    Raises
    ------
    BadParameter
        ``ratio_base <= 1``, or a discrete/normalized input.
    Divergent
        The input fails the weight condition.
    """
    if not (math.isfinite(ratio_base) and ratio_base > 1.0):
        raise BadParameter(f"ratio_base must exceed 1, got {ratio_base}")
    if p.domain == "discrete":
        raise BadParameter("discretize expects a continuous pair")
    if p.normalized:
        raise BadParameter("discretize expects a plain (unreflected) pair")
    check_weight_condition(p, support)  # divergence gate

    masses: dict[int, float] = {}
    if p.domain == "half_line":
        span = support if support is not None else (0.0, math.inf)
        for j, _, _, m_c, _ in _ratio_class_cells(
            p.uc_fn, p.ur_fn, ratio_base, span
        ):
            if m_c > 0.0:
                masses[j] = masses.get(j, 0.0) + m_c
    else:
        uc, ur = p.uc_steps, p.ur_steps
        log_base = math.log(ratio_base)
        lo_w, hi_w = support if support is not None else (0.0, math.inf)
        edges = sorted(set(uc.edges) | set(ur.edges))
        for a, b in zip(edges, edges[1:]):
            x, y = max(a, lo_w), min(b, hi_w)
            if x >= y:
                continue
            mid = (x + y) / 2.0
            if mid > uc.edges[-1] or mid > ur.edges[-1]:
                continue
            c, r = uc.eval(mid), ur.eval(mid)
            j = _class_index(r / c, log_base)
            masses[j] = masses.get(j, 0.0) + c * (y - x)

    if not masses:
        raise BadParameter("no ratio-class mass found on the support")
    items = sorted(masses.items())
    uc_head = tuple(m for _, m in items)
    ur_head = tuple(ratio_base ** float(-j) * m for j, m in items)
    return discrete_pair(uc_head, ur_head)


def continuize(p: WeightPair) -> WeightPair:
    """Spread a discrete pair over unit cells: value ``u(j)`` on ``(j-1, j]``.

    Exact for finite pairs.  Power tails are materialized cell by cell
    until the remaining ``min(u_c, u_r)`` mass drops below 1e-9 of the
    total (capped at 100000 extra cells, with a logged warning).

    Raises
    ------
    BadParameter
        Not a discrete pair.
    Divergent
        Power tails whose minimum is not summable.
    """
    if p.domain != "discrete":
        raise BadParameter("continuize expects a discrete pair")
    uc_vals = list(p.uc_head)
    ur_vals = list(p.ur_head)
    if p.uc_tail is not None:
        (cc, ec), (cr, er) = p.uc_tail, p.ur_tail
        total_min = check_weight_condition(p)
        acc = sum(min(c, r) for c, r in zip(uc_vals, ur_vals))
        j = p.head_length + 1
        while j <= p.head_length + 100_000:
            c = cc * float(j) ** ec
            r = cr * float(j) ** er
            uc_vals.append(c)
            ur_vals.append(r)
            acc += min(c, r)
            if total_min - acc <= 1e-9 * total_min:
                break
            j += 1
        else:
            logger.warning(
                "continuize truncated power tails at 100000 cells; dropped "
                "min-mass %.3e", total_min - acc,
            )
    edges = tuple(float(i) for i in range(len(uc_vals) + 1))
    return step_pair(
        StepDensity(edges, tuple(uc_vals)),
        StepDensity(edges, tuple(ur_vals)),
    )


def _dyadic_class_masses(p: WeightPair) -> dict[int, tuple[float, float]]:
    """Masses ``(m_c, m_r)`` of the dyadic ratio classes of a plain pair.

    Class ``k`` holds ``2^{-k-1} <= u_r/u_c < 2^{-k}`` — the binning of
    :func:`_ratio_class_cells` with base 2, shifted down by one.
    """
    out: dict[int, tuple[float, float]] = {}
    log2 = math.log(2.0)

    def add(k: int, m_c: float, m_r: float) -> None:
        if m_c <= 0.0 and m_r <= 0.0:
            return
        c0, r0 = out.get(k, (0.0, 0.0))
        out[k] = (c0 + m_c, r0 + m_r)

    if p.domain == "half_line":
        for j, _, _, m_c, m_r in _ratio_class_cells(
            p.uc_fn, p.ur_fn, 2.0, (0.0, math.inf)
        ):
            add(j - 1, m_c, m_r)
        return out
    if p.domain == "steps":
        uc, ur = p.uc_steps, p.ur_steps
        edges = sorted(set(uc.edges) | set(ur.edges))
        for a, b in zip(edges, edges[1:]):
            mid = (a + b) / 2.0
            if mid > uc.edges[-1] or mid > ur.edges[-1]:
                continue
            c, r = uc.eval(mid), ur.eval(mid)
            add(_class_index(r / c, log2) - 1, c * (b - a), r * (b - a))
        return out

    # discrete: heads term by term, tails walked class by class
    for c, r in zip(p.uc_head, p.ur_head):
        add(_class_index(r / c, log2) - 1, c, r)
    if p.uc_tail is None:
        return out
    (cc, ec), (cr, er) = p.uc_tail, p.ur_tail
    j0 = p.head_length + 1
    d_e = er - ec
    rho_tail = cr / cc
    if abs(d_e) < 1e-12:
        k = _class_index(rho_tail, log2) - 1
        if k in (-1, 0):
            # The dropped middle classes absorb these; their own masses
            # are never needed (and may diverge), so record nothing.
            return out
        add(
            k,
            _power_sum(cc, 1.0, ec, j0, math.inf),
            _power_sum(cr, 1.0, er, j0, math.inf),
        )
        return out

    def j_at(target_rho: float) -> float:
        ln_j = math.log(target_rho / rho_tail) / d_e
        return math.inf if ln_j > 690.0 else math.exp(min(ln_j, 690.0))

    k = _class_index(rho_tail * float(j0) ** d_e, log2) - 1
    step = 1 if d_e < 0 else -1
    j_lo = j0
    total_min = 0.0
    lull = 0
    while abs(k) <= _CLASS_CAP:
        if d_e < 0:
            edge = j_at(2.0 ** float(-k - 1))  # ratio >= boundary: closed end
            j_hi = math.inf if edge == math.inf else float(
                math.floor(edge + 1e-9)
            )
        else:
            edge = j_at(2.0 ** float(-k))  # ratio < boundary: open end
            j_hi = math.inf if edge == math.inf else float(
                math.ceil(edge - 1e-9) - 1
            )
        if j_hi != math.inf and j_hi < j_lo:
            k += step
            continue
        m_c = _power_sum(cc, 1.0, ec, j_lo, j_hi)
        m_r = _power_sum(cr, 1.0, er, j_lo, j_hi)
        add(k, m_c, m_r)
        if j_hi == math.inf:
            break
        cell_min = min(m_c, m_r)
        total_min += cell_min
        if cell_min <= _CLASS_TRUNC * max(total_min, 1e-300):
            lull += 1
            if lull >= 3:
                break
        else:
            lull = 0
        j_lo = int(j_hi) + 1
        k += step
    else:
        logger.warning(
            "ratio-class enumeration capped at |index| = %d", _CLASS_CAP
        )
    return out


def normalize(p: WeightPair) -> WeightPair:
    """Rebuild a pair in the reflected two-sided form with unit masses.

    Splits the domain into dyadic ratio classes ``2^{-k-1} <= u_r/u_c <
    2^{-k}``, lays the class-``k >= 1`` column masses out as steps of the
    row density (amplitude ``2^{-k-1} / (2 lambda)``) after a unit buffer
    cell on ``(0, 1]``, mirrors the classes ``k <= -2`` into the reflected
    column density (amplitude ``2^k / (2 lambda)``, widths given by the
    row masses), and drops the two middle classes — the buffer cells carry
    their mass.  Here ``lambda`` is ``max(1, weight condition value)``,
    which keeps every step below its buffer, so both step densities are
    monotone in the required direction with total mass exactly 1.

    An already-normalized pair is returned unchanged.

    Raises
    ------
    Divergent
        The pair fails the weight condition.
    """
    if p.normalized:
        return p
    lam = max(1.0, check_weight_condition(p))
    classes = _dyadic_class_masses(p)

    def build_side(
        ks: list[int],
        width_of: Callable[[int], float],
        amp_of: Callable[[int], float],
    ) -> StepDensity:
        edges = [0.0, 1.0]
        amps: list[float] = [1.0]  # buffer placeholder, fixed below
        shaved = 0.0
        for k in ks:
            width, amp = width_of(k), amp_of(k)
            new_edge = edges[-1] + width
            if width <= 0.0 or amp <= 0.0 or new_edge <= edges[-1]:
                continue
            shaved += width * amp
            edges.append(new_edge)
            amps.append(amp)
        amps[0] = 1.0 - shaved
        return StepDensity(tuple(edges), tuple(amps))

    row = build_side(
        sorted(k for k in classes if k >= 1),
        width_of=lambda k: classes[k][0],
        amp_of=lambda k: 2.0 ** float(-k - 1) / (2.0 * lam),
    )
    col = build_side(
        sorted((k for k in classes if k <= -2), reverse=True),
        width_of=lambda k: classes[k][1],
        amp_of=lambda k: 2.0 ** float(k) / (2.0 * lam),
    )
    return step_pair(col, row, normalized=True)
