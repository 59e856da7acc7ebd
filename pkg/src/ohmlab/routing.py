"""Electrical-flow routing and its competitive ratios.

The routing operator sends a demand chi to the electrical flow W B^T L^+ chi.
Its l_p -> l_p competitive ratio against the optimal congestion is the induced
norm of the entrywise absolute value of W^-1 A B W applied to edge demands;
on unit-weight graphs this is the flow projection matrix Pi = B^T L^+ B.
For p = inf the ratio is the largest l1 flow norm over single-edge demands,
computed one solve per endpoint pair without materializing Pi.
"""

from __future__ import annotations

import math
from concurrent.futures import ThreadPoolExecutor
from dataclasses import dataclass, field
from typing import Callable, Dict, Optional, Sequence, Tuple

import numpy as np

from .errors import SizeLimitError
from .graphs import (
    ConductanceCertificate,
    Multigraph,
    conductance_bounds,
    conductance_exact,
)
from .linalg import (
    incidence,
    induced_norm_1,
    induced_norm_inf,
    induced_pnorm_nonneg,
    laplacian,
    solve_laplacian,
)

__all__ = [
    "validate_demand",
    "edge_demand",
    "route_electrical",
    "effective_resistance",
    "congestion",
    "flow_energy",
    "voltage_energy",
    "flow_projection",
    "competitive_ratio_inf",
    "competitive_ratio",
    "competitive_ratio_operator",
    "localization",
    "CompetitiveReport",
    "competitive_report",
]

PROJECTION_EDGE_CAP = 4000


def validate_demand(g: Multigraph, chi: np.ndarray) -> np.ndarray:
    """Check a demand vector: length n, entries summing to zero within
    1e-12 * ||chi||_1."""
    chi = np.asarray(chi, dtype=np.float64)
    if chi.shape != (g.n,):
        raise ValueError(f"demand must have length n={g.n}")
    l1 = float(np.abs(chi).sum())
    if abs(float(chi.sum())) > 1e-12 * max(l1, 1.0):
        raise ValueError("demand entries must sum to zero")
    return chi


def edge_demand(g: Multigraph, eid: int) -> np.ndarray:
    """Unit demand 1_tail - 1_head for edge eid."""
    if not 0 <= eid < g.m:
        raise ValueError(f"edge index {eid} out of range for m={g.m}")
    chi = np.zeros(g.n)
    chi[g.tails[eid]] += 1.0
    chi[g.heads[eid]] -= 1.0
    return chi


def route_electrical(g: Multigraph, chi: np.ndarray, tol: float = 1e-10) -> np.ndarray:
    """Electrical flow for the demand: f(e) = w(e) (v(head) - v(tail)) with
    v the Laplacian voltages. Satisfies B f = chi up to solver residual."""
    chi = validate_demand(g, chi)
    rep = solve_laplacian(g, chi, tol)
    v = rep.solution
    return g.weights * (v[g.heads] - v[g.tails])


def effective_resistance(g: Multigraph, s: int, t: int, tol: float = 1e-10) -> float:
    """chi^T L^+ chi for the unit s-t demand; 0 when s == t."""
    if not (0 <= s < g.n and 0 <= t < g.n):
        raise ValueError("endpoint out of range")
    if s == t:
        return 0.0
    chi = np.zeros(g.n)
    chi[s] = 1.0
    chi[t] = -1.0
    rep = solve_laplacian(g, chi, tol)
    return float(rep.solution[s] - rep.solution[t])


def congestion(g: Multigraph, flows: Sequence[np.ndarray], p: float) -> float:
    """l_p norm of per-edge total |flow| over capacity."""
    if p < 1.0:
        raise ValueError("p must be in [1, inf]")
    total = np.zeros(g.m)
    for f in flows:
        f = np.asarray(f, dtype=np.float64)
        if f.shape != (g.m,):
            raise ValueError(f"flow must have length m={g.m}")
        total += np.abs(f)
    loads = total / g.weights
    if math.isinf(p):
        return float(loads.max()) if loads.size else 0.0
    return float(np.power(loads, p).sum() ** (1.0 / p))


def flow_energy(g: Multigraph, f: np.ndarray) -> float:
    """sum_e f(e)^2 / w(e)."""
    f = np.asarray(f, dtype=np.float64)
    return float((f * f / g.weights).sum())


def demand_fraction(g: Multigraph, f: np.ndarray, chi: np.ndarray, edges) -> float:
    """Fraction of the demand's supply current that the given edges carry.

    Sums the signed outflow of f through the edge subset at every supply
    vertex (chi > 0) and divides by the total supply. Over a partition of
    the edge set the fractions add to 1, which makes this the right meter
    for how a flow splits across edge classes that meet only at vertices.
    """
    f = np.asarray(f, dtype=np.float64)
    chi = validate_demand(g, chi)
    mask = np.zeros(g.m, dtype=bool)
    mask[np.asarray(edges, dtype=np.int64)] = True
    supply = chi > 0
    total = float(chi[supply].sum())
    if total == 0.0:
        raise ValueError("demand has no supply vertices")
    # (B f)(a) restricted to the masked columns: tail carries -f, head +f
    out = 0.0
    out -= f[mask & supply[g.tails]].sum()
    out += f[mask & supply[g.heads]].sum()
    return float(out / total)


def voltage_energy(g: Multigraph, v: np.ndarray) -> float:
    """v^T L v, the energy dissipated by the voltage vector."""
    v = np.asarray(v, dtype=np.float64)
    return float(v @ (laplacian(g) @ v))


def _endpoint_pairs(g: Multigraph) -> list:
    """Distinct endpoint pairs in first-occurrence edge order."""
    seen = set()
    pairs = []
    for t, h in zip(g.tails, g.heads):
        key = (int(min(t, h)), int(max(t, h)))
        if key not in seen:
            seen.add(key)
            pairs.append(key)
    return pairs


def _pair_voltages(
    g: Multigraph, pairs, tol: float, threads: int
) -> Tuple[Dict[tuple, np.ndarray], float]:
    """Voltage vector per endpoint pair, plus the worst solver residual."""

    def solve_one(pair):
        a, b = pair
        chi = np.zeros(g.n)
        chi[a] = 1.0
        chi[b] = -1.0
        rep = solve_laplacian(g, chi, tol)
        return rep.solution, rep.residual_norm

    if threads > 1 and len(pairs) > 1:
        with ThreadPoolExecutor(max_workers=threads) as pool:
            results = list(pool.map(solve_one, pairs))
    else:
        results = [solve_one(p) for p in pairs]
    voltages = {pair: res[0] for pair, res in zip(pairs, results)}
    max_residual = max((res[1] for res in results), default=0.0)
    return voltages, max_residual


def _flow_l1_per_pair(
    g: Multigraph, tol: float, threads: int
) -> Tuple[Dict[tuple, float], float]:
    pairs = _endpoint_pairs(g)
    voltages, max_residual = _pair_voltages(g, pairs, tol, threads)
    values = {}
    for pair in pairs:
        v = voltages[pair]
        values[pair] = float((g.weights * np.abs(v[g.heads] - v[g.tails])).sum())
    return values, max_residual


def competitive_ratio_inf(g: Multigraph, tol: float = 1e-10, threads: int = 1) -> float:
    """Worst l1 flow norm over unit edge demands, one solve per endpoint pair.

    This equals the inf -> inf competitive ratio of electrical routing; the
    projection matrix is never materialized, so it scales to large m.
    """
    if g.m == 0:
        raise ValueError("graph has no edges")
    values, _ = _flow_l1_per_pair(g, tol, threads)
    return max(values.values())


def localization(g: Multigraph, tol: float = 1e-10, threads: int = 1) -> float:
    """Average l1 flow norm over unit edge demands, (1/m) sum_e ||W B^T L^+ chi_e||_1.

    Defined for unit-weight graphs; parallel edges each count toward the
    average (their shared endpoint pair is solved once).
    """
    if not g.is_unit_weight:
        raise ValueError("localization is defined for unit-weight graphs")
    if g.m == 0:
        raise ValueError("graph has no edges")
    values, _ = _flow_l1_per_pair(g, tol, threads)
    total = 0.0
    for t, h in zip(g.tails, g.heads):
        total += values[(int(min(t, h)), int(max(t, h)))]
    return total / g.m


def flow_projection(
    g: Multigraph, tol: float = 1e-10, edge_cap: int = PROJECTION_EDGE_CAP
) -> np.ndarray:
    """Dense flow projection Pi = B^T L^+ B, m x m, one solve per endpoint pair.

    Symmetric and idempotent up to solver tolerance. Refused above edge_cap
    edges; the per-edge l_inf path never needs it.
    """
    if g.m > edge_cap:
        raise SizeLimitError(
            f"dense projection needs m <= {edge_cap}, got m={g.m}"
        )
    pairs = _endpoint_pairs(g)
    voltages, _ = _pair_voltages(g, pairs, tol, threads=1)
    pi = np.empty((g.m, g.m))
    for e in range(g.m):
        pair = (int(min(g.tails[e], g.heads[e])), int(max(g.tails[e], g.heads[e])))
        v = voltages[pair]
        col = v[g.heads] - v[g.tails]
        # solves run min -> max of the pair; column e of B is -chi_e for the
        # stored orientation, so flip once more when tail is the pair minimum
        pi[:, e] = -col if int(g.tails[e]) == pair[0] else col
    return pi


def competitive_ratio(
    g: Multigraph,
    p: float,
    tol: float = 1e-10,
    norm_tol: float = 1e-8,
    edge_cap: int = PROJECTION_EDGE_CAP,
) -> float:
    """l_p -> l_p competitive ratio of electrical routing on a unit graph.

    Materializes |Pi| (dense, capped at edge_cap edges). p = 1 and p = inf
    use the exact column/row-sum formulas; other p run the nonnegative power
    iteration. Non-unit weights are refused: use competitive_ratio_operator,
    which applies the weighted scaling.
    """
    if not g.is_unit_weight:
        raise ValueError(
            "competitive_ratio needs unit weights; use competitive_ratio_operator"
        )
    if p < 1.0:
        raise ValueError("p must be in [1, inf]")
    pi_abs = np.abs(flow_projection(g, tol, edge_cap))
    if p == 1.0:
        return induced_norm_1(pi_abs)
    if math.isinf(p):
        return induced_norm_inf(pi_abs)
    return induced_pnorm_nonneg(pi_abs, p, norm_tol)


def competitive_ratio_operator(
    g: Multigraph,
    routing: Callable[[np.ndarray], np.ndarray],
    p: float,
    tol: float = 1e-10,
    norm_tol: float = 1e-8,
    edge_cap: int = PROJECTION_EDGE_CAP,
    check_edges: int = 8,
) -> float:
    """l_p -> l_p competitive ratio of an arbitrary demand -> flow operator.

    The operator must be linear and actually route: B (routing(chi_e)) = chi_e
    is verified on a sample of edges within tolerance. The ratio is the
    induced norm of the entrywise absolute value of W^-1 A B W, assembled one
    column per edge as w(e) |W^-1 routing(chi_e)|.
    """
    if p < 1.0:
        raise ValueError("p must be in [1, inf]")
    if g.m > edge_cap:
        raise SizeLimitError(f"operator ratio needs m <= {edge_cap}, got m={g.m}")
    sample = np.linspace(0, g.m - 1, num=min(check_edges, g.m), dtype=np.int64)
    inc = incidence(g)
    cols = np.empty((g.m, g.m))
    cache: Dict[tuple, np.ndarray] = {}
    for e in range(g.m):
        pair = (int(g.tails[e]), int(g.heads[e]))
        if pair not in cache:
            cache[pair] = np.asarray(routing(edge_demand(g, e)), dtype=np.float64)
            if cache[pair].shape != (g.m,):
                raise ValueError("routing operator must return one flow value per edge")
        f = cache[pair]
        if e in sample:
            chi = edge_demand(g, e)
            err = float(np.abs(inc @ f - chi).max())
            if err > max(100.0 * tol, 1e-8):
                raise ValueError(
                    f"operator does not route edge demand {e}: |B f - chi| = {err:.3e}"
                )
        cols[:, e] = g.weights[e] * np.abs(f) / g.weights
    if p == 1.0:
        return induced_norm_1(cols)
    if math.isinf(p):
        return induced_norm_inf(cols)
    return induced_pnorm_nonneg(cols, p, norm_tol)


@dataclass(frozen=True)
class CompetitiveReport:
    """Summary of a graph's routing quality against the expander bound."""

    graph_id: str
    n: int
    m: int
    vol: float
    phi_lower: float
    phi_upper: float
    phi_kind: str
    rho: Dict[float, float]
    bound: float
    localization: Optional[float]
    solver_tol: float
    max_residual: float
    rho_error_bound: float


def competitive_report(
    g: Multigraph,
    p_list: Sequence[float] = (np.inf,),
    tol: float = 1e-10,
    graph_id: Optional[str] = None,
    exact_n_cap: int = 24,
    threads: int = 1,
) -> CompetitiveReport:
    """Assemble conductance, competitive ratios, and the routing bound.

    Conductance is exact (cut enumeration) up to exact_n_cap vertices, else
    the eigenvalue/sweep bracket. The reported bound is 3 ln(vol(V)) / phi
    using the exact value when available and the certified lower bound
    otherwise (a smaller phi only loosens the bound, so it stays valid). On
    unit graphs vol(V) = 2m, so ln(vol(V)) matches the 2m reading of the
    bound. Worst-case ratio error from solver residuals is propagated as
    m * tol * ||chi|| rather than silently absorbed.
    """
    if g.m == 0:
        raise ValueError("graph has no edges")
    if g.n <= exact_n_cap:
        cert = conductance_exact(g, max_n=exact_n_cap)
        phi_lower = phi_upper = cert.phi
        phi_kind = cert.kind
    else:
        lower, upper = conductance_bounds(g)
        phi_lower, phi_upper = lower.phi, upper.phi
        phi_kind = "bracket"

    values, max_residual = _flow_l1_per_pair(g, tol, threads)
    rho: Dict[float, float] = {float(np.inf): max(values.values())}
    for p in p_list:
        p = float(p)
        if p in rho:
            continue
        if g.is_unit_weight:
            rho[p] = competitive_ratio(g, p, tol)
        else:
            rho[p] = competitive_ratio_operator(
                g, lambda chi: route_electrical(g, chi, tol), p, tol
            )
    floor = 1.0 - 1e-6
    for p, value in rho.items():
        if value < floor:
            raise AssertionError(
                f"competitive ratio {value} at p={p} below the sanity floor 1"
            )

    vol = float(g.weighted_degrees.sum())
    phi_for_bound = phi_lower
    bound = 3.0 * math.log(vol) / phi_for_bound if phi_for_bound > 0 else np.inf
    loc = localization(g, tol, threads) if g.is_unit_weight else None
    return CompetitiveReport(
        graph_id=graph_id or f"n{g.n}-m{g.m}",
        n=g.n,
        m=g.m,
        vol=vol,
        phi_lower=phi_lower,
        phi_upper=phi_upper,
        phi_kind=phi_kind,
        rho=rho,
        bound=bound,
        localization=loc,
        solver_tol=tol,
        max_residual=max_residual,
        rho_error_bound=g.m * tol * math.sqrt(2.0),
    )
