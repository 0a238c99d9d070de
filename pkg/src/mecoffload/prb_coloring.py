"""PRB allocation for offloading UEs via weighted greedy graph coloring.

Colors are PRBs, vertices are the offloading UEs' serving cells. Demands
are scaled into quotas that may oversubscribe the band (reuse), a directed
interference graph decides the coloring order, and each node grabs the
quota-many colors that maximize the hypothetical system sum rate given
everything assigned so far. The interference table is maintained
incrementally and must stay consistent with the association matrix.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import EmptyOffloadSet
from .radio import InterferenceTable, PrbAssociation
from .scenario import ChannelGains, RadioParams


def normalize_prbs(demands, offload_ids, num_prbs: int, reuse_lambda: float) -> np.ndarray:
    """Scale raw PRB demands into per-UE quotas, full length N.

    Quota = round-half-even(lambda * K * w_n / sum w) capped at K and
    floored at 1; entries outside the offload set stay 0. lambda > 1
    oversubscribes the band on purpose so that colors get reused.
    """
    ids = sorted(offload_ids)
    if not ids:
        raise EmptyOffloadSet("no offloading UEs, nothing to allocate")
    total = sum(int(demands[i]) for i in ids)
    m = np.zeros(len(demands), dtype=np.int64)
    for i in ids:
        share = num_prbs * int(demands[i]) / total
        m[i] = min(max(round(reuse_lambda * share), 1), num_prbs)
    return m


@dataclass(frozen=True)
class InterferenceGraph:
    """Directed graph over offloading UEs: edge a->b when a's uplink leaks
    noticeably into b's serving cell (gain ratio above the threshold)."""

    nodes: tuple[int, ...]
    adj: np.ndarray  # bool N x N, adj[a, b] marks edge a -> b
    weight: np.ndarray  # per-PRB received interference power on edges, else 0
    in_weight: np.ndarray  # column sums of weight, the coloring-order key


def build_interference_graph(
    gains: ChannelGains,
    m: np.ndarray,
    powers: np.ndarray,
    offload_ids,
    theta: float,
) -> InterferenceGraph:
    ids = sorted(offload_ids)
    if not ids:
        raise EmptyOffloadSet("no offloading UEs, nothing to allocate")
    n = gains.h.shape[0]
    adj = np.zeros((n, n), dtype=bool)
    weight = np.zeros((n, n))
    h = gains.h
    for a in ids:
        for b in ids:
            if a == b:
                continue
            if h[a, b] / h[b, b] > theta:
                adj[a, b] = True
                weight[a, b] = (powers[a] / m[a]) * h[a, b]
    return InterferenceGraph(
        nodes=tuple(ids), adj=adj, weight=weight, in_weight=weight.sum(axis=0)
    )


@dataclass(frozen=True)
class ColorStep:
    """Snapshot of one coloring iteration, for replay-style verification."""

    node: int
    colors: tuple[int, ...]
    scores: tuple[float, ...]  # hypothetical sum rate per candidate color
    table_after: np.ndarray  # interference table right after the assignment


@dataclass(frozen=True)
class ColoringState:
    assoc: PrbAssociation
    table: InterferenceTable
    order: tuple[int, ...]  # nodes in the sequence they were colored
    color_sets: dict[int, tuple[int, ...]]
    steps: tuple[ColorStep, ...] | None = None


def color(
    graph: InterferenceGraph,
    m: np.ndarray,
    gains: ChannelGains,
    powers: np.ndarray,
    radio: RadioParams,
    *,
    record_steps: bool = False,
) -> ColoringState:
    """Greedy coloring: most-interfered node first, batch-assign the quota
    of colors with the best hypothetical system sum rate.

    Scoring a color j for node nb: nb's single-PRB rate on j under the
    current interference, plus every already-colored node's rate with nb's
    leakage added on j only. Colors held by others are fair game (reuse);
    ties go to the lowest color index. After the batch the table rows of
    all other nodes gain nb's per-PRB leakage on the taken colors.
    """
    h = gains.h
    n_ues = h.shape[0]
    k = radio.num_prbs
    bpp = radio.prb_bandwidth_hz
    noise = radio.noise_per_prb_w

    # order key is static: in-edge weights over the whole offload set
    order = sorted(graph.nodes, key=lambda i: (-graph.in_weight[i], m[i], i))

    p = np.zeros(n_ues)
    for i in graph.nodes:
        p[i] = powers[i] / m[i]

    c = np.zeros((n_ues, k), dtype=np.int64)
    o = np.zeros((n_ues, k))
    colored: list[int] = []
    color_sets: dict[int, tuple[int, ...]] = {}
    steps: list[ColorStep] = []

    for node in order:
        own = bpp * np.log2(1.0 + p[node] * h[node, node] / (noise + o[node]))
        if colored:
            rows = np.asarray(colored)
            snr_num = (p[rows] * h[rows, rows])[:, None]
            base = bpp * np.log2(1.0 + snr_num / (noise + o[rows]))
            bump = (p[node] * h[node, rows])[:, None]
            pert = bpp * np.log2(1.0 + snr_num / (noise + o[rows] + bump))
            held = c[rows].astype(np.float64)
            scores = own + (held * base).sum() + (held * (pert - base)).sum(axis=0)
        else:
            scores = own
        take = np.argsort(-scores, kind="stable")[: int(m[node])]
        c[node, take] = 1
        others = np.arange(n_ues) != node
        o[np.ix_(others, take)] += p[node] * h[node, others][:, None]
        colored.append(int(node))
        color_sets[int(node)] = tuple(int(j) for j in np.sort(take))
        if record_steps:
            steps.append(
                ColorStep(
                    node=int(node),
                    colors=color_sets[int(node)],
                    scores=tuple(float(x) for x in scores),
                    table_after=o.copy(),
                )
            )

    return ColoringState(
        assoc=PrbAssociation.from_matrix(c),
        table=InterferenceTable(o),
        order=tuple(int(x) for x in order),
        color_sets=color_sets,
        steps=tuple(steps) if record_steps else None,
    )


def realized_rates(
    state: ColoringState,
    m: np.ndarray,
    gains: ChannelGains,
    powers: np.ndarray,
    radio: RadioParams,
) -> np.ndarray:
    """Per-UE uplink rate from the final association and interference table.

    Full-length N vector; UEs without PRBs get 0. Uses the maintained
    table, so agreement with a from-scratch rate computation doubles as a
    consistency check on the incremental updates.
    """
    h = gains.h
    c = state.assoc.c
    o = state.table.o
    bpp = radio.prb_bandwidth_hz
    noise = radio.noise_per_prb_w
    rates = np.zeros(h.shape[0])
    for n in state.order:
        snr = (powers[n] / m[n]) * h[n, n] / (noise + o[n])
        rates[n] = float((c[n] * bpp * np.log2(1.0 + snr)).sum())
    return rates
