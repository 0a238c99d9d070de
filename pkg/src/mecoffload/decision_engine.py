"""End-to-end orchestration: size loads, guess who benefits from offloading,
then greedily grow the offload set while the full pipeline keeps paying off.

The initial guess prices each candidate with an interference-free
orthogonal split of the band and an even server split; the real evaluation
runs demand normalization, graph coloring, realized rates, and the convex
server split, and prices the system by the weighted time/energy overhead
summed over all UEs. Candidates that break feasibility price at +inf and
are never kept.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .cpu_allocation import (
    CpuAllocation,
    CpuRequest,
    allocate_equal,
    allocate_minmax,
    allocate_minsum,
)
from .errors import EmptyOffloadSet, InfeasibleAllocation
from .load_estimation import LoadEstimate, estimate_loads
from .prb_coloring import (
    build_interference_graph,
    color,
    normalize_prbs,
    realized_rates,
)
from .radio import InterferenceTable, OffloadDecision, PrbAssociation, interference_table
from .scenario import ChannelGains, Scenario, tx_powers

_CPU_SOLVERS = {
    "minmax": allocate_minmax,
    "minsum": allocate_minsum,
    "equal": allocate_equal,
}

SCHEME_NAMES = (
    "proposed_minmax",
    "proposed_minsum",
    "all_local",
    "all_offload_orth",
    "equal_cpu",
)


@dataclass(frozen=True)
class OrthogonalEstimate:
    """Interference-free offload cost of one UE under a hypothesized set."""

    ue: int
    m_tilde: float  # real-valued PRB share
    rate_bps: float
    t_off_s: float
    e_off_j: float
    t_exe_s: float
    t_total_s: float
    overhead: float


@dataclass(frozen=True)
class EstimationReport:
    estimates: tuple[LoadEstimate, ...]
    members: tuple[int, ...]  # the hypothesized offload set
    orthogonal: dict[int, OrthogonalEstimate]

    def system_overhead(self) -> float:
        """Estimated total: local cost outside the set, offload cost inside."""
        total = 0.0
        for est in self.estimates:
            hypo = self.orthogonal.get(est.ue)
            total += est.local.overhead if hypo is None else hypo.overhead
        return total


def orthogonal_estimate(
    estimates: list[LoadEstimate],
    offload_set,
    s: Scenario,
    gains: ChannelGains,
) -> EstimationReport:
    """Price every member of the set as if the band were split orthogonally.

    Real-valued PRB shares proportional to demand, no co-channel
    interference, and an even server split. Deliberately optimistic; used
    only to rank candidates, never as the acceptance metric.
    """
    members = tuple(sorted(offload_set))
    if not members:
        raise EmptyOffloadSet("cannot estimate over an empty offload set")
    by_ue = {est.ue: est for est in estimates}
    total_w = sum(by_ue[i].w for i in members)
    k = s.radio.num_prbs
    bpp = s.radio.prb_bandwidth_hz
    noise = s.radio.noise_per_prb_w
    orth: dict[int, OrthogonalEstimate] = {}
    for i in members:
        ue = s.ues[i]
        m_tilde = k * by_ue[i].w / total_w
        snr = ue.tx_power_w * float(gains.h[i, i]) / (m_tilde * noise)
        rate = m_tilde * bpp * math.log2(1.0 + snr)
        t_off = ue.task.input_bits / rate
        e_off = ue.tx_power_w * ue.task.input_bits / rate
        t_exe = by_ue[i].t_exe_est_s
        t_total = t_off + t_exe
        orth[i] = OrthogonalEstimate(
            ue=i, m_tilde=m_tilde, rate_bps=rate, t_off_s=t_off,
            e_off_j=e_off, t_exe_s=t_exe, t_total_s=t_total,
            overhead=ue.weight_time * t_total + ue.weight_energy * e_off,
        )
    return EstimationReport(
        estimates=tuple(estimates), members=members, orthogonal=orth
    )


def initial_decision(
    estimates: list[LoadEstimate], report: EstimationReport
) -> OffloadDecision:
    """Offload exactly the UEs whose estimated offload cost beats local.

    Ties stay local. UEs outside the report's set (forced local or
    infeasible) stay local regardless.
    """
    a = [0] * len(estimates)
    for est in estimates:
        hypo = report.orthogonal.get(est.ue)
        if hypo is not None and est.local.overhead > hypo.overhead:
            a[est.ue] = 1
    return OffloadDecision(a=tuple(a))


@dataclass(frozen=True)
class AllocationOutcome:
    """Everything the pipeline produced for one offloading decision.

    system_overhead is +inf for rejected candidates (an offloader with no
    usable rate, or deadlines the server budget cannot cover).
    """

    decision: OffloadDecision
    assoc: PrbAssociation
    table: InterferenceTable
    rates_bps: np.ndarray
    t_off_s: np.ndarray  # 0 for local UEs, +inf for a dead uplink
    e_off_j: np.ndarray
    cpu: CpuAllocation | None
    per_ue_overhead: np.ndarray
    system_overhead: float
    objective_kind: str  # server-split rule: minmax | minsum | equal | none

    @property
    def feasible(self) -> bool:
        return math.isfinite(self.system_overhead)


def _all_local_outcome(
    decision: OffloadDecision, s: Scenario, estimates: list[LoadEstimate]
) -> AllocationOutcome:
    n, k = len(s.ues), s.radio.num_prbs
    per_ue = np.array([est.local.overhead for est in estimates])
    return AllocationOutcome(
        decision=decision,
        assoc=PrbAssociation.empty(n, k),
        table=InterferenceTable(o=np.zeros((n, k))),
        rates_bps=np.zeros(n),
        t_off_s=np.zeros(n),
        e_off_j=np.zeros(n),
        cpu=None,
        per_ue_overhead=per_ue,
        system_overhead=float(per_ue.sum()),
        objective_kind="none",
    )


def _finish(
    decision: OffloadDecision,
    s: Scenario,
    estimates: list[LoadEstimate],
    assoc: PrbAssociation,
    table: InterferenceTable,
    rates: np.ndarray,
    cpu_mode: str,
) -> AllocationOutcome:
    """Turn an uplink allocation into the final costed outcome: transfer
    time/energy, the server split, and per-UE overheads."""
    n = len(s.ues)
    offs = decision.offload_set
    t_off = np.zeros(n)
    e_off = np.zeros(n)
    dead_uplink = False
    for i in offs:
        ue = s.ues[i]
        r = float(rates[i])
        if r > 0 and math.isfinite(r):
            t_off[i] = ue.task.input_bits / r
            e_off[i] = ue.tx_power_w * ue.task.input_bits / r
        else:
            t_off[i] = math.inf
            e_off[i] = math.inf
            dead_uplink = True

    cpu = None
    if not dead_uplink:
        requests = [
            CpuRequest(
                ue=i,
                cycles=s.ues[i].task.cycles,
                t_cap_s=estimates[i].local.time_s - t_off[i],
            )
            for i in offs
        ]
        try:
            cpu = _CPU_SOLVERS[cpu_mode](requests, s.mec_capacity_hz)
        except InfeasibleAllocation:
            cpu = None

    per_ue = np.empty(n)
    for i in range(n):
        if decision.a[i] == 0:
            per_ue[i] = estimates[i].local.overhead
        elif cpu is None:
            per_ue[i] = math.inf
        else:
            ue = s.ues[i]
            t_total = t_off[i] + ue.task.cycles / cpu.f[i]
            per_ue[i] = ue.weight_time * t_total + ue.weight_energy * e_off[i]
    return AllocationOutcome(
        decision=decision,
        assoc=assoc,
        table=table,
        rates_bps=rates,
        t_off_s=t_off,
        e_off_j=e_off,
        cpu=cpu,
        per_ue_overhead=per_ue,
        system_overhead=float(per_ue.sum()),
        objective_kind=cpu_mode,
    )


def evaluate(
    decision: OffloadDecision,
    s: Scenario,
    gains: ChannelGains,
    cpu_mode: str = "minsum",
    estimates: list[LoadEstimate] | None = None,
) -> AllocationOutcome:
    """Full pipeline for one decision: quotas, coloring, rates, server
    split, system overhead. Decisions with no offloaders cost the plain
    sum of local overheads."""
    if estimates is None:
        estimates = estimate_loads(s, gains)
    offs = decision.offload_set
    if not offs:
        return _all_local_outcome(decision, s, estimates)
    n, k = len(s.ues), s.radio.num_prbs
    if any(not estimates[i].offloadable for i in offs):
        # a decision no sane caller builds; price it out instead of crashing
        per_ue = np.array(
            [
                estimates[i].local.overhead if decision.a[i] == 0 else math.inf
                for i in range(n)
            ]
        )
        return AllocationOutcome(
            decision=decision,
            assoc=PrbAssociation.empty(n, k),
            table=InterferenceTable(o=np.zeros((n, k))),
            rates_bps=np.zeros(n),
            t_off_s=np.zeros(n),
            e_off_j=np.zeros(n),
            cpu=None,
            per_ue_overhead=per_ue,
            system_overhead=math.inf,
            objective_kind=cpu_mode,
        )
    demands = [0] * n
    for i in offs:
        demands[i] = estimates[i].w
    powers = tx_powers(s)
    m = normalize_prbs(demands, offs, k, s.reuse_lambda)
    graph = build_interference_graph(gains, m, powers, offs, s.edge_threshold)
    state = color(graph, m, gains, powers, s.radio)
    rates = realized_rates(state, m, gains, powers, s.radio)
    return _finish(decision, s, estimates, state.assoc, state.table, rates, cpu_mode)


def greedy_reallocate(
    a_init: OffloadDecision,
    s: Scenario,
    gains: ChannelGains,
    cpu_mode: str = "minsum",
    estimates: list[LoadEstimate] | None = None,
    report: EstimationReport | None = None,
) -> AllocationOutcome:
    """Grow the offload set one UE at a time, cheapest estimate first,
    keeping a flip only when the fully re-evaluated system overhead
    strictly improves.

    An infeasible starting decision is first repaired by reverting the
    offloaders with the largest minimum server demand until the pipeline
    prices finite. The outcome never costs more than the starting point.
    """
    if estimates is None:
        estimates = estimate_loads(s, gains)
    candidates = [est.ue for est in estimates if est.offloadable]
    if report is None and candidates:
        report = orthogonal_estimate(estimates, candidates, s, gains)

    decision = a_init
    best = evaluate(decision, s, gains, cpu_mode, estimates)

    while not best.feasible and decision.offload_set:
        ranked = []
        for i in decision.offload_set:
            t_cap = estimates[i].local.time_s - best.t_off_s[i]
            bound = math.inf if t_cap <= 0 else s.ues[i].task.cycles / t_cap
            ranked.append((-bound, i))
        drop = min(ranked)[1]
        decision = decision.flip_off(drop)
        best = evaluate(decision, s, gains, cpu_mode, estimates)

    unchecked = [i for i in candidates if decision.a[i] == 0]
    unchecked.sort(key=lambda i: report.orthogonal[i].overhead)
    for i in unchecked:
        trial = decision.flip_on(i)
        candidate = evaluate(trial, s, gains, cpu_mode, estimates)
        if candidate.system_overhead < best.system_overhead:
            best = candidate
            decision = trial
    return best


def run_proposed(s: Scenario, gains: ChannelGains, cpu_mode: str) -> AllocationOutcome:
    """Estimate, make the initial offload guess, then greedily refine it."""
    estimates = estimate_loads(s, gains)
    candidates = [est.ue for est in estimates if est.offloadable]
    if not candidates:
        return _all_local_outcome(OffloadDecision.all_local(len(s.ues)), s, estimates)
    report = orthogonal_estimate(estimates, candidates, s, gains)
    a0 = initial_decision(estimates, report)
    return greedy_reallocate(a0, s, gains, cpu_mode, estimates=estimates, report=report)


def run_baseline(kind: str, s: Scenario, gains: ChannelGains) -> AllocationOutcome:
    """Reference schemes: everyone local, everyone offloading over an
    orthogonal band split with an even server split, or the full pipeline
    with the server split forced even."""
    estimates = estimate_loads(s, gains)
    n, k = len(s.ues), s.radio.num_prbs
    if kind == "all_local":
        return _all_local_outcome(OffloadDecision.all_local(n), s, estimates)
    if kind == "equal_cpu":
        return run_proposed(s, gains, "equal")
    if kind != "all_offload_orth":
        raise ValueError(f"unknown baseline {kind!r}")

    candidates = [est.ue for est in estimates if est.offloadable]
    if not candidates:
        return _all_local_outcome(OffloadDecision.all_local(n), s, estimates)
    decision = OffloadDecision.from_set(candidates, n)
    total_w = sum(estimates[i].w for i in candidates)
    quota = {
        i: max(math.floor(k * estimates[i].w / total_w), 1) for i in candidates
    }
    if sum(quota.values()) > k:
        # band too small to stay orthogonal: price the scheme out
        per_ue = np.array(
            [
                estimates[i].local.overhead if decision.a[i] == 0 else math.inf
                for i in range(n)
            ]
        )
        return AllocationOutcome(
            decision=decision,
            assoc=PrbAssociation.empty(n, k),
            table=InterferenceTable(o=np.zeros((n, k))),
            rates_bps=np.zeros(n),
            t_off_s=np.where(np.array(decision.a) == 1, math.inf, 0.0),
            e_off_j=np.where(np.array(decision.a) == 1, math.inf, 0.0),
            cpu=None,
            per_ue_overhead=per_ue,
            system_overhead=math.inf,
            objective_kind="equal",
        )
    c = np.zeros((n, k), dtype=np.int64)
    next_free = 0
    for i in candidates:
        c[i, next_free : next_free + quota[i]] = 1
        next_free += quota[i]
    assoc = PrbAssociation.from_matrix(c)
    powers = tx_powers(s)
    table = interference_table(assoc, gains, powers)
    bpp = s.radio.prb_bandwidth_hz
    noise = s.radio.noise_per_prb_w
    rates = np.zeros(n)
    for i in candidates:
        snr = (powers[i] / quota[i]) * gains.h[i, i] / (noise + table.o[i])
        rates[i] = float((c[i] * bpp * np.log2(1.0 + snr)).sum())
    return _finish(decision, s, estimates, assoc, table, rates, "equal")


def run_scheme(name: str, s: Scenario, gains: ChannelGains) -> AllocationOutcome:
    if name == "proposed_minmax":
        return run_proposed(s, gains, "minmax")
    if name == "proposed_minsum":
        return run_proposed(s, gains, "minsum")
    if name in ("all_local", "all_offload_orth", "equal_cpu"):
        return run_baseline(name, s, gains)
    raise ValueError(f"unknown scheme {name!r}")
