"""Offline random-order greedy MIS with the fractional-matching side assignment.

One iteration settles the earliest unsettled vertex u of the permutation into
the independent set and all of u's unsettled neighbors into the vertex cover.
Each cover vertex v writes x_e = beta / deg(v) onto every incident edge (v, w)
whose other endpoint is still unsettled and has residual degree <= deg(v),
degrees taken in the residual graph at the start of the iteration (u counts).
Trimming then caps per-vertex mass at one, which turns x into a fractional
matching y.

This is the reference oracle the streaming matcher is checked against, and the
test bed for the expectation bounds on |x|, |y| and the cover size.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field

import numpy as np

from .graph import Edge, FractionalAssignment, Graph, normalize_edge

__all__ = [
    "ROLE_MIS",
    "ROLE_COVER",
    "ROLE_NONE",
    "SettlementTable",
    "GreedyRun",
    "InternalConsistencyError",
    "run_greedy",
    "trim",
    "theorem2_montecarlo",
    "MonteCarloReport",
]

ROLE_MIS = 0
ROLE_COVER = 1
ROLE_NONE = 2


class InternalConsistencyError(AssertionError):
    """An invariant the algorithm relies on was violated at runtime."""


@dataclass
class SettlementTable:
    """Per-vertex outcome of the greedy process.

    time[v] is the iteration at which v settled (1-based); residual_degree[v]
    is v's degree among vertices still unsettled at the start of that
    iteration.  sigma_pos[v] is v's position in the processing order.
    """

    n: int
    role: np.ndarray
    time: np.ndarray
    residual_degree: np.ndarray
    sigma_pos: np.ndarray

    @staticmethod
    def empty(n: int, sigma) -> "SettlementTable":
        pos = np.empty(n, dtype=np.int64)
        pos[np.asarray(sigma, dtype=np.int64)] = np.arange(n)
        return SettlementTable(
            n=n,
            role=np.full(n, ROLE_NONE, dtype=np.int8),
            time=np.zeros(n, dtype=np.int64),
            residual_degree=np.full(n, -1, dtype=np.int64),
            sigma_pos=pos,
        )

    def equals(self, other: "SettlementTable") -> bool:
        return (
            self.n == other.n
            and np.array_equal(self.role, other.role)
            and np.array_equal(self.time, other.time)
            and np.array_equal(self.residual_degree, other.residual_degree)
        )


@dataclass
class GreedyRun:
    """Complete record of one greedy execution."""

    graph: Graph
    beta: float
    sigma: tuple[int, ...]
    settlement: SettlementTable
    x: FractionalAssignment
    y: FractionalAssignment
    mis: list[int]
    cover_by_iter: list[list[int]] = field(default_factory=list)
    # only populated with record_flows=True
    in_flow_by_iter: list[dict[int, float]] = field(default_factory=list)
    out_flow_by_iter: list[dict[int, float]] = field(default_factory=list)

    @property
    def v_mis(self) -> set[int]:
        return set(self.mis)

    @property
    def v_cover(self) -> set[int]:
        return {v for vs in self.cover_by_iter for v in vs}


def _check_beta(beta: float) -> None:
    if not (0.0 < beta < 0.125):
        raise ValueError(f"beta must lie in (0, 1/8), got {beta}")


def run_greedy(g: Graph, beta: float, sigma, record_flows: bool = False) -> GreedyRun:
    """Simulate the greedy process consuming the permutation sigma.

    Drawing a uniform vertex from the residual graph is realized by taking the
    earliest unsettled vertex of sigma, which induces the same distribution
    when sigma is a uniform permutation.
    """
    _check_beta(beta)
    n = g.n
    sigma = tuple(int(v) for v in sigma)
    if sorted(sigma) != list(range(n)):
        raise ValueError("sigma is not a permutation of the vertices")
    adj = g.adjacency()
    table = SettlementTable.empty(n, sigma)
    role, tstamp, resid = table.role, table.time, table.residual_degree
    unsettled = bytearray([1]) * n
    deg_live = [len(a) for a in adj]
    x: dict[Edge, float] = {}
    written_iter: dict[Edge, int] = {}
    mis: list[int] = []
    cover_by_iter: list[list[int]] = []
    in_flows: list[dict[int, float]] = []
    out_flows: list[dict[int, float]] = []
    t = 0
    for u in sigma:
        if not unsettled[u]:
            continue
        t += 1
        mis.append(u)
        role[u] = ROLE_MIS
        tstamp[u] = t
        resid[u] = deg_live[u]
        cover_new = [v for v in adj[u] if unsettled[v]]
        for v in cover_new:
            role[v] = ROLE_COVER
            tstamp[v] = t
            resid[v] = deg_live[v]
        in_f: dict[int, float] = {}
        out_f: dict[int, float] = {}
        for v in cover_new:
            dv = deg_live[v]
            val = beta / dv
            for w in adj[v]:
                if unsettled[w] and deg_live[w] <= dv:
                    e = normalize_edge(v, w)
                    prev = written_iter.get(e)
                    if prev is not None and prev != t:
                        raise InternalConsistencyError(
                            f"edge {e} written in iterations {prev} and {t}"
                        )
                    written_iter[e] = t
                    x[e] = val
                    if record_flows:
                        out_f[v] = out_f.get(v, 0.0) + val
                        if deg_live[w] < dv or not (
                            role[w] == ROLE_COVER and tstamp[w] == t
                        ):
                            in_f[w] = in_f.get(w, 0.0) + val
        if record_flows:
            in_flows.append(in_f)
            out_flows.append(out_f)
        cover_by_iter.append(cover_new)
        for s in [u] + cover_new:
            unsettled[s] = 0
        for s in [u] + cover_new:
            for w in adj[s]:
                deg_live[w] -= 1
    fx = FractionalAssignment(x)
    return GreedyRun(
        graph=g,
        beta=beta,
        sigma=sigma,
        settlement=table,
        x=fx,
        y=trim(fx),
        mis=mis,
        cover_by_iter=cover_by_iter,
        in_flow_by_iter=in_flows,
        out_flow_by_iter=out_flows,
    )


def trim(x: FractionalAssignment) -> FractionalAssignment:
    """Cap every vertex's incident mass at one.

    Deterministic rule: scan vertices in id order; an overloaded vertex keeps
    mass on its incident edges in ascending edge-id order and the excess comes
    off the highest edge ids first.
    """
    y = dict(x.values)
    incident: dict[int, list[Edge]] = {}
    for e in y:
        incident.setdefault(e[0], []).append(e)
        incident.setdefault(e[1], []).append(e)
    for v in sorted(incident):
        edges = sorted(incident[v])
        excess = sum(y[e] for e in edges) - 1.0
        for e in reversed(edges):
            if excess <= 1e-15:
                break
            cut = min(excess, y[e])
            y[e] -= cut
            excess -= cut
    return FractionalAssignment(y)


@dataclass
class MonteCarloRow:
    quantity: str
    mean: float
    stderr: float
    bound: float
    verdict: str


@dataclass
class MonteCarloReport:
    """Sample means over uniform permutations with 3-standard-error verdicts."""

    graph_n: int
    graph_m: int
    beta: float
    trials: int
    seed: int
    rows: list[MonteCarloRow]

    def passed(self) -> bool:
        return all(r.verdict == "pass" for r in self.rows if r.verdict != "n/a")

    def to_csv_rows(self) -> list[list[str]]:
        out = [["schema", "montecarlo-v1", "", "", ""]]
        out.append(["quantity", "mean", "stderr", "bound", "verdict"])
        for r in self.rows:
            out.append([r.quantity, f"{r.mean:.9g}", f"{r.stderr:.4g}", f"{r.bound:.9g}", r.verdict])
        return out


def _stderr(samples: np.ndarray) -> float:
    if len(samples) < 2:
        return 0.0
    return float(np.std(samples, ddof=1) / math.sqrt(len(samples)))


def theorem2_montecarlo(
    g: Graph, beta: float, trials: int, seed: int, mu: int | None = None
) -> MonteCarloReport:
    """Monte Carlo check of the cover/x/y expectation bounds.

    Verifies, at 3-standard-error slack over `trials` uniform permutations:
      mean(sum x) >= (beta/2) * mean(|V_COVER|)          (cover bound)
      mean(sum y) >= (1-8 beta)/(1-2 beta) * mean(sum x) (trim bound)
      mean(sum y) >= factor * (beta/2) * mu(G)           (corollary; needs mu)
    """
    _check_beta(beta)
    if trials < 1:
        raise ValueError("trials must be >= 1")
    sum_x = np.empty(trials)
    sum_y = np.empty(trials)
    cover = np.empty(trials)
    seeds = np.random.SeedSequence(seed).spawn(trials)
    for i in range(trials):
        rng = np.random.default_rng(seeds[i])
        sigma = rng.permutation(g.n)
        run = run_greedy(g, beta, sigma)
        sum_x[i] = sum(run.x.values.values())
        sum_y[i] = sum(run.y.values.values())
        cover[i] = sum(len(c) for c in run.cover_by_iter)
    factor = (1 - 8 * beta) / (1 - 2 * beta)
    rows = []
    d1 = sum_x - (beta / 2) * cover
    rows.append(
        MonteCarloRow(
            "sum_x_vs_cover",
            float(d1.mean()),
            _stderr(d1),
            0.0,
            "pass" if d1.mean() >= -3 * _stderr(d1) else "fail",
        )
    )
    d2 = sum_y - factor * sum_x
    rows.append(
        MonteCarloRow(
            "sum_y_vs_sum_x",
            float(d2.mean()),
            _stderr(d2),
            0.0,
            "pass" if d2.mean() >= -3 * _stderr(d2) else "fail",
        )
    )
    for name, arr in (("sum_x", sum_x), ("sum_y", sum_y), ("cover_size", cover)):
        rows.append(MonteCarloRow(name, float(arr.mean()), _stderr(arr), float("nan"), "n/a"))
    if mu is not None:
        bound = factor * (beta / 2) * mu
        se = _stderr(sum_y)
        rows.append(
            MonteCarloRow(
                "sum_y_vs_mu",
                float(sum_y.mean()),
                se,
                bound,
                "pass" if sum_y.mean() >= bound - 3 * se else "fail",
            )
        )
    return MonteCarloReport(g.n, g.m, beta, trials, seed, rows)
