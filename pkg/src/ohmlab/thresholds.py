"""Threshold-cut diagnostics over electrical voltage profiles.

For a voltage vector v the threshold cut at t is S_t = {a : v(a) >= t}. The
fractional volume vol_geq(t) counts, per edge aligned so v(a) <= v(b), the
full 2w while t <= v(a), the interpolated share 2w (v(b) - t) / (v(b) - v(a))
while v(a) < t <= v(b), and zero afterwards; edges with v(a) = v(b) count
fully until t passes their value and never cross a cut. Voltages are centered
by a shift chosen so vol_geq(0) = vol(V)/2, which makes the two half-axes
comparable and is the convention the derivative inequalities assume.

Everything here is exact piecewise arithmetic on the breakpoint grid; the
only approximation in the pipeline is the Laplacian solve that produced v.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import List, Optional, Tuple

import numpy as np

from .graphs import Multigraph
from .linalg import solve_laplacian
from .routing import validate_demand

__all__ = [
    "ThresholdProfile",
    "threshold_profile",
    "profile_from_voltages",
    "mirrored_profile",
    "threshold_cut",
    "threshold_cut_weight",
    "fractional_volume",
    "padded_volume",
    "volume_decay_rate",
    "crossing_flow",
    "IntegralIdentityReport",
    "check_integral_identity",
    "check_unit_flow",
    "DerivativeCheckReport",
    "check_derivative_bounds",
    "diagnostic_rows",
    "DIAGNOSTIC_COLUMNS",
]

DIAGNOSTIC_COLUMNS = ("t", "delta", "vol_geq", "volplus", "dvolplus_dt", "crossing_flow")


@dataclass(frozen=True)
class ThresholdProfile:
    """Centered voltages with per-edge data aligned so va <= vb.

    voltages are per vertex after subtracting center_shift from the raw
    sum-zero solution. center_residual records how far vol_geq(0) landed
    from vol(V)/2 (bisection is argument-limited, so this is the honest
    achieved miss). solver_residual carries the Laplacian residual of the
    voltage solve, 0.0 for profiles built from explicit voltages.
    """

    n: int
    tails: np.ndarray
    heads: np.ndarray
    weights: np.ndarray
    voltages: np.ndarray
    va: np.ndarray
    vb: np.ndarray
    center_shift: float
    center_residual: float
    breakpoints: np.ndarray
    total_volume: float
    solver_residual: float = 0.0

    @property
    def t_min(self) -> float:
        return float(self.breakpoints[0])

    @property
    def t_max(self) -> float:
        return float(self.breakpoints[-1])


def _vol_geq_arrays(va, vb, w, t: float) -> float:
    full = t <= va
    cross = (va < t) & (t <= vb)
    out = 2.0 * float(w[full].sum())
    if cross.any():
        out += 2.0 * float(
            (w[cross] * (vb[cross] - t) / (vb[cross] - va[cross])).sum()
        )
    return out


def _center_shift(va, vb, w, total: float) -> Tuple[float, float]:
    """Leftmost shift s with vol_geq(s) = total/2, by bisection.

    Bisection runs to 1e-12 of the voltage range in the argument and keeps
    halving while the volume miss exceeds 1e-10 * total; the achieved miss is
    returned so callers can record it.
    """
    target = total / 2.0
    lo = float(min(va.min(), vb.min()))
    hi = float(vb.max())
    if hi <= lo:
        # all voltages equal; any shift to that value empties or fills, the
        # profile is degenerate (no demand), center on the common value
        return lo, abs(_vol_geq_arrays(va, vb, w, lo) - target)
    rng = hi - lo
    f_hi = _vol_geq_arrays(va, vb, w, hi) - target
    if f_hi > 0:
        hi = np.nextafter(hi, np.inf)
        f_hi = _vol_geq_arrays(va, vb, w, hi) - target
    for _ in range(200):
        if hi - lo <= 1e-12 * rng and abs(f_hi) <= 1e-10 * total:
            break
        mid = 0.5 * (lo + hi)
        if not (lo < mid < hi):
            break
        f_mid = _vol_geq_arrays(va, vb, w, mid) - target
        if f_mid > 0:
            lo = mid
        else:
            hi = mid
            f_hi = f_mid
    return hi, abs(f_hi)


def profile_from_voltages(
    g: Multigraph, voltages: np.ndarray, solver_residual: float = 0.0
) -> ThresholdProfile:
    """Build a centered profile from an explicit voltage vector."""
    v = np.asarray(voltages, dtype=np.float64)
    if v.shape != (g.n,):
        raise ValueError(f"voltages must have length n={g.n}")
    raw_va = v[g.tails]
    raw_vb = v[g.heads]
    flip = raw_va > raw_vb
    tails = np.where(flip, g.heads, g.tails)
    heads = np.where(flip, g.tails, g.heads)
    total = float(g.weighted_degrees.sum())
    va = v[tails]
    vb = v[heads]
    shift, residual = _center_shift(va, vb, g.weights, total)
    centered = v - shift
    return ThresholdProfile(
        n=g.n,
        tails=tails,
        heads=heads,
        weights=g.weights.copy(),
        voltages=centered,
        va=centered[tails],
        vb=centered[heads],
        center_shift=float(shift),
        center_residual=float(residual),
        breakpoints=np.unique(centered),
        total_volume=total,
        solver_residual=float(solver_residual),
    )


def threshold_profile(g: Multigraph, chi: np.ndarray, tol: float = 1e-10) -> ThresholdProfile:
    """Solve for the demand's voltages and build the centered profile."""
    chi = validate_demand(g, chi)
    rep = solve_laplacian(g, chi, tol)
    return profile_from_voltages(g, rep.solution, solver_residual=rep.residual_norm)


def mirrored_profile(profile: ThresholdProfile) -> ThresholdProfile:
    """The profile of the negated voltages (swaps source and sink sides).

    Per-edge volumes satisfy vol'_geq(t) = vol(V) - vol_geq(-t), so the
    mirror of a centered profile is centered; the bound checks run the mirror
    to cover thresholds t <= 0 of the original.
    """
    neg = -profile.voltages
    return ThresholdProfile(
        n=profile.n,
        tails=profile.heads,
        heads=profile.tails,
        weights=profile.weights,
        voltages=neg,
        va=-profile.vb,
        vb=-profile.va,
        center_shift=-profile.center_shift,
        center_residual=profile.center_residual,
        breakpoints=np.sort(-profile.breakpoints),
        total_volume=profile.total_volume,
        solver_residual=profile.solver_residual,
    )


def threshold_cut(profile: ThresholdProfile, t: float) -> np.ndarray:
    """Vertex mask of S_t = {a : v(a) >= t} on the centered voltages."""
    return profile.voltages >= t


def threshold_cut_weight(profile: ThresholdProfile, t: float) -> float:
    """Weight of edges crossing S_t (exactly one endpoint at voltage >= t)."""
    cross = (profile.va < t) & (t <= profile.vb)
    return float(profile.weights[cross].sum())


def fractional_volume(profile: ThresholdProfile, t: float) -> float:
    """vol_geq(t) under the per-edge full / interpolated / zero case rule."""
    return _vol_geq_arrays(profile.va, profile.vb, profile.weights, t)


def padded_volume(profile: ThresholdProfile, t: float) -> float:
    """vol_geq(t) + 1, the padded volume the derivative bound divides by."""
    return fractional_volume(profile, t) + 1.0


def volume_decay_rate(profile: ThresholdProfile, t: float) -> float:
    """-d/dt vol_geq at a non-breakpoint t: sum of 2w / (v(b) - v(a)) over
    crossing edges."""
    va, vb, w = profile.va, profile.vb, profile.weights
    cross = (va < t) & (t <= vb)
    if not cross.any():
        return 0.0
    return 2.0 * float((w[cross] / (vb[cross] - va[cross])).sum())


def crossing_flow(profile: ThresholdProfile, t: float) -> float:
    """Flow across S_t: sum of w (v(b) - v(a)) over crossing edges.

    Equals 1 for every t strictly between t_min and t_max when the voltages
    come from a unit demand, up to solver residual.
    """
    va, vb, w = profile.va, profile.vb, profile.weights
    cross = (va < t) & (t <= vb)
    if not cross.any():
        return 0.0
    return float((w[cross] * (vb[cross] - va[cross])).sum())


@dataclass(frozen=True)
class IntegralIdentityReport:
    """Both sides of sum_e w |v(b) - v(a)| = integral of delta(t) dt."""

    lhs: float
    rhs: float

    @property
    def gap(self) -> float:
        return abs(self.lhs - self.rhs)

    @property
    def relative_gap(self) -> float:
        return self.gap / max(abs(self.lhs), abs(self.rhs), 1e-300)


def _intervals(profile: ThresholdProfile) -> np.ndarray:
    bp = profile.breakpoints
    return np.column_stack([bp[:-1], bp[1:]]) if bp.size >= 2 else np.empty((0, 2))


def check_integral_identity(profile: ThresholdProfile) -> IntegralIdentityReport:
    """Compare the stretch sum against the piecewise-constant cut integral.

    delta is constant between consecutive breakpoints, so the integral is a
    finite sum of midpoint values times interval lengths; the identity holds
    for any voltage vector, so the gap measures arithmetic noise only.
    """
    lhs = float((profile.weights * (profile.vb - profile.va)).sum())
    rhs = 0.0
    for lo, hi in _intervals(profile):
        rhs += threshold_cut_weight(profile, 0.5 * (lo + hi)) * (hi - lo)
    return IntegralIdentityReport(lhs=lhs, rhs=rhs)


def _interior_points(profile: ThresholdProfile, samples: int) -> np.ndarray:
    """`samples` thresholds strictly inside breakpoint intervals, spread
    round-robin across the intervals in order."""
    iv = _intervals(profile)
    if iv.shape[0] == 0 or samples <= 0:
        return np.empty(0)
    counts = np.zeros(iv.shape[0], dtype=np.int64)
    for i in range(samples):
        counts[i % iv.shape[0]] += 1
    pts: List[float] = []
    for (lo, hi), c in zip(iv, counts):
        for j in range(1, int(c) + 1):
            pts.append(lo + (hi - lo) * j / (c + 1))
    return np.array(pts)


def check_unit_flow(profile: ThresholdProfile, samples: int = 50) -> float:
    """Max |crossing flow - 1| over sampled non-breakpoint thresholds."""
    pts = _interior_points(profile, samples)
    if pts.size == 0:
        return 0.0
    return max(abs(crossing_flow(profile, float(t)) - 1.0) for t in pts)


@dataclass(frozen=True)
class DerivativeCheckReport:
    """Worst-case slack of the two derivative inequalities at the samples.

    quad: -d/dt volplus >= 2 delta(t)^2 (crossing flow squared against the
    decay rate). ratio: delta(t) <= (3 / (2 phi)) * decay / volplus. Positive
    violation values mean the inequality failed by that relative amount;
    violations counts samples beyond the tolerance.
    """

    evaluated: int
    tolerance: float
    quad_max_violation: float
    quad_worst_t: float
    ratio_max_violation: float
    ratio_worst_t: float
    violations: int

    @property
    def ok(self) -> bool:
        return self.violations == 0


def _bound_samples(profile: ThresholdProfile, samples: int) -> np.ndarray:
    """Midpoints of breakpoint intervals at t >= 0, thinned evenly to at most
    `samples` points."""
    iv = _intervals(profile)
    if iv.shape[0] == 0:
        return np.empty(0)
    mids = 0.5 * (iv[:, 0] + iv[:, 1])
    mids = mids[mids >= 0.0]
    if mids.size > samples > 0:
        idx = np.linspace(0, mids.size - 1, num=samples).round().astype(np.int64)
        mids = mids[np.unique(idx)]
    return mids


def check_derivative_bounds(
    profile: ThresholdProfile, phi: float, samples: int = 50, tolerance: float = 1e-8
) -> DerivativeCheckReport:
    """Check both derivative inequalities at interval midpoints.

    Samples cover t >= 0 on the profile and, through the mirrored profile,
    t <= 0 of the original; phi must be a valid conductance (lower bound) for
    the graph, and a smaller phi only weakens the ratio inequality.
    """
    if phi <= 0.0:
        raise ValueError("phi must be positive")
    evaluated = 0
    quad_max, quad_t = -np.inf, np.nan
    ratio_max, ratio_t = -np.inf, np.nan
    violations = 0
    for side, prof in (("+", profile), ("-", mirrored_profile(profile))):
        for t in _bound_samples(prof, samples):
            t = float(t)
            report_t = t if side == "+" else -t
            decay = volume_decay_rate(prof, t)
            delta = threshold_cut_weight(prof, t)
            vplus = padded_volume(prof, t)
            evaluated += 1

            lhs, rhs = 2.0 * delta * delta, decay
            quad_viol = (lhs - rhs) / max(abs(lhs), abs(rhs), 1.0)
            if quad_viol > quad_max:
                quad_max, quad_t = quad_viol, report_t
            if quad_viol > tolerance:
                violations += 1

            allowed = (3.0 / (2.0 * phi)) * decay / vplus
            ratio_viol = (delta - allowed) / max(abs(delta), abs(allowed), 1.0)
            if ratio_viol > ratio_max:
                ratio_max, ratio_t = ratio_viol, report_t
            if ratio_viol > tolerance:
                violations += 1
    return DerivativeCheckReport(
        evaluated=evaluated,
        tolerance=tolerance,
        quad_max_violation=float(quad_max),
        quad_worst_t=float(quad_t),
        ratio_max_violation=float(ratio_max),
        ratio_worst_t=float(ratio_t),
        violations=violations,
    )


def diagnostic_rows(
    profile: ThresholdProfile, samples: Optional[int] = None
) -> List[tuple]:
    """One row per breakpoint-interval midpoint, thinned to `samples` rows.

    Columns follow DIAGNOSTIC_COLUMNS: threshold, cut weight, fractional
    volume, padded volume, signed derivative of the padded volume, and the
    crossing flow.
    """
    iv = _intervals(profile)
    mids = 0.5 * (iv[:, 0] + iv[:, 1]) if iv.shape[0] else np.empty(0)
    if samples is not None and mids.size > samples > 0:
        idx = np.linspace(0, mids.size - 1, num=samples).round().astype(np.int64)
        mids = mids[np.unique(idx)]
    rows = []
    for t in mids:
        t = float(t)
        rows.append(
            (
                t,
                threshold_cut_weight(profile, t),
                fractional_volume(profile, t),
                padded_volume(profile, t),
                -volume_decay_rate(profile, t),
                crossing_flow(profile, t),
            )
        )
    return rows
