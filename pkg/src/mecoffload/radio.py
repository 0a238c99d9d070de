"""Uplink rate and interference bookkeeping for a given PRB table."""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import InconsistentTables
from .scenario import ChannelGains, RadioParams


@dataclass(frozen=True)
class OffloadDecision:
    """Binary per-UE offload flags; index n offloads iff a[n] == 1."""

    a: tuple[int, ...]

    def __post_init__(self):
        if any(v not in (0, 1) for v in self.a):
            raise ValueError("decision entries must be 0 or 1")

    @classmethod
    def all_local(cls, n: int) -> "OffloadDecision":
        return cls(a=(0,) * n)

    @classmethod
    def from_set(cls, offload, n: int) -> "OffloadDecision":
        members = set(offload)
        return cls(a=tuple(1 if i in members else 0 for i in range(n)))

    def flip_on(self, n: int) -> "OffloadDecision":
        a = list(self.a)
        a[n] = 1
        return OffloadDecision(a=tuple(a))

    def flip_off(self, n: int) -> "OffloadDecision":
        a = list(self.a)
        a[n] = 0
        return OffloadDecision(a=tuple(a))

    @property
    def offload_set(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.a) if v == 1)

    @property
    def local_set(self) -> tuple[int, ...]:
        return tuple(i for i, v in enumerate(self.a) if v == 0)

    @property
    def n_offload(self) -> int:
        return sum(self.a)


@dataclass(frozen=True)
class PrbAssociation:
    """Binary table c[n, k] = 1 iff SeNB n holds PRB k; m = row sums."""

    c: np.ndarray
    m: np.ndarray

    @classmethod
    def from_matrix(cls, c) -> "PrbAssociation":
        c = np.asarray(c, dtype=np.int64)
        return cls(c=c, m=c.sum(axis=1))

    @classmethod
    def empty(cls, n: int, k: int) -> "PrbAssociation":
        return cls.from_matrix(np.zeros((n, k), dtype=np.int64))


@dataclass(frozen=True)
class InterferenceTable:
    """o[n, k]: aggregate interference power (W) at SeNB n on PRB k."""

    o: np.ndarray


def per_prb_power(c: PrbAssociation, powers) -> np.ndarray:
    """P_n / M_n for cells holding PRBs, 0 for idle rows."""
    m = c.m
    out = np.zeros(len(m))
    held = m > 0
    out[held] = np.asarray(powers, dtype=float)[held] / m[held]
    return out


def interference_table(c: PrbAssociation, g: ChannelGains, powers) -> InterferenceTable:
    """Received co-channel power at every SeNB on every PRB.

    Each transmitting UE m spreads P_m evenly over its M_m PRBs; a SeNB's
    own UE never counts toward its row. The self term is excluded before
    the product: summing it in and subtracting it back would absorb cross
    terms many orders of magnitude below the serving gain.
    """
    w = c.c * per_prb_power(c, powers)[:, None]  # W per (UE, PRB)
    h_cross = g.h.copy()
    np.fill_diagonal(h_cross, 0.0)
    return InterferenceTable(o=h_cross.T @ w)


def _check_consistent(a: OffloadDecision, c: PrbAssociation) -> None:
    for n, flag in enumerate(a.a):
        if flag == 0 and c.m[n] != 0:
            raise InconsistentTables(f"local UE {n} holds PRBs")
        if flag == 1 and c.m[n] == 0:
            raise InconsistentTables(f"offloading UE {n} holds no PRB")


def uplink_rate(
    n: int,
    a: OffloadDecision,
    c: PrbAssociation,
    g: ChannelGains,
    powers,
    r: RadioParams,
) -> float:
    """Shannon uplink rate (bit/s) of UE n under decision a and table c.

    Transmit power splits evenly over the held PRBs; every other offloading
    UE sharing a PRB raises the noise floor by its per-PRB power times the
    cross gain. Local UEs upload nothing and rate 0.
    """
    _check_consistent(a, c)
    if a.a[n] == 0:
        return 0.0
    powers = np.asarray(powers, dtype=float)
    p_prb = per_prb_power(c, powers)
    active = np.array(a.a, dtype=bool)
    bpp = r.prb_bandwidth_hz
    sig = p_prb[n] * g.h[n, n]

    held = np.flatnonzero(c.c[n])
    # co-channel power on each held PRB from every other active transmitter
    contrib = (c.c[:, held] * (active * p_prb)[:, None]) * g.h[:, n][:, None]
    contrib[n, :] = 0.0
    interf = contrib.sum(axis=0)
    snr = sig / (r.noise_per_prb_w + interf)
    return float(bpp * np.log2(1.0 + snr).sum())
