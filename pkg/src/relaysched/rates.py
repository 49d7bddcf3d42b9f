"""Achievable downlink/uplink rate pairs of the three-slot TDD protocol.

All rate functions broadcast over numpy arrays, so the same code serves
scalar lookups and whole-graph vertex weighting.  Every rate carries the
1/3 pre-log of the three-slot frame.
"""
from __future__ import annotations

import enum
from dataclasses import dataclass
from typing import NamedTuple

import numpy as np

from .channel import ChannelRealization, RelayStrategy

PRE_LOG = 1.0 / 3.0


def capacity(snr):
    """Shannon capacity log2(1 + snr) in bits/s/Hz."""
    return np.log2(1.0 + np.asarray(snr, dtype=float))


class RatePair(NamedTuple):
    r_down: float
    r_up: float

    @property
    def total(self):
        return self.r_down + self.r_up


class ModeTag(str, enum.Enum):
    A = "a"  # direct downlink, direct uplink
    B = "b"  # direct downlink, one-way relayed uplink
    C = "c"  # one-way relayed downlink, direct uplink
    D = "d"  # one-way relaying both ways through two distinct relays
    E = "e"  # two-way relaying through one relay

    @property
    def order(self) -> int:
        return "abcde".index(self.value)

    @property
    def num_relays(self) -> int:
        return {"a": 0, "d": 2}.get(self.value, 1)


# Feasible (downlink, uplink) pairings.  Two-way relaying needs both directions.
_PAIRING = {
    ("direct", "direct"): ModeTag.A,
    ("direct", "one-way"): ModeTag.B,
    ("one-way", "direct"): ModeTag.C,
    ("one-way", "one-way"): ModeTag.D,
    ("two-way", "two-way"): ModeTag.E,
}


def mode_for_pairing(downlink: str, uplink: str) -> ModeTag:
    try:
        return _PAIRING[(downlink, uplink)]
    except KeyError:
        raise ValueError(f"infeasible pairing: downlink {downlink!r}, uplink {uplink!r}") from None


@dataclass(frozen=True, order=True)
class TransmissionMode:
    """A mode tag plus the relays it uses.

    Mode D lists the downlink relay first and the uplink relay second.
    """

    tag: ModeTag
    relays: tuple[int, ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "tag", ModeTag(self.tag))
        object.__setattr__(self, "relays", tuple(int(r) for r in self.relays))
        if len(self.relays) != self.tag.num_relays:
            raise ValueError(
                f"mode {self.tag.value} needs {self.tag.num_relays} relay(s), got {self.relays}"
            )
        if self.tag is ModeTag.D and self.relays[0] == self.relays[1]:
            raise ValueError("mode d needs two distinct relays")

    @property
    def sort_key(self):
        return (self.tag.order, self.relays)

    def __str__(self):
        if not self.relays:
            return self.tag.value
        return f"{self.tag.value}[{','.join(str(r) for r in self.relays)}]"


@dataclass(frozen=True)
class SessionSubcarriers:
    n1: int
    n2: int
    n3: int | None = None

    def check(self, mode: TransmissionMode, num_subcarriers: int | None = None):
        if (self.n3 is None) != (mode.tag is ModeTag.A):
            raise ValueError(f"mode {mode.tag.value} inconsistent with subcarriers {self}")
        if num_subcarriers is not None:
            for n in (self.n1, self.n2, self.n3):
                if n is not None and not 0 <= n < num_subcarriers:
                    raise ValueError(f"subcarrier {n} out of range [0, {num_subcarriers})")


def af_cascade(snr1, snr2):
    """End-to-end SNR of a two-hop amplify-and-forward link."""
    snr1 = np.asarray(snr1, dtype=float)
    snr2 = np.asarray(snr2, dtype=float)
    return snr1 * snr2 / (1.0 + snr1 + snr2)


def one_way_rate(snr1, snr2, strategy: RelayStrategy):
    """Pre-log-free two-hop rate (AF cascade or DF bottleneck)."""
    if RelayStrategy(strategy) is RelayStrategy.AF:
        return capacity(af_cascade(snr1, snr2))
    return np.minimum(capacity(snr1), capacity(snr2))


def rate_mode_a(snr_bm_n1, snr_mb_n2) -> RatePair:
    return RatePair(PRE_LOG * capacity(snr_bm_n1), PRE_LOG * capacity(snr_mb_n2))


def rate_mode_b(snr_bm_n1, snr_mr_n2, snr_rb_n3, strategy) -> RatePair:
    return RatePair(
        PRE_LOG * capacity(snr_bm_n1),
        PRE_LOG * one_way_rate(snr_mr_n2, snr_rb_n3, strategy),
    )


def rate_mode_c(snr_br_n1, snr_rm_n3, snr_mb_n2, strategy) -> RatePair:
    return RatePair(
        PRE_LOG * one_way_rate(snr_br_n1, snr_rm_n3, strategy),
        PRE_LOG * capacity(snr_mb_n2),
    )


def rate_mode_d(br1, r1m, mr2, r2b, r2m, r1b, strategy) -> RatePair:
    """Two one-way relays sharing the slot-3 subcarrier.

    ``br1``/``r1m`` carry the downlink through relay 1, ``mr2``/``r2b`` the
    uplink through relay 2.  Under AF each destination also hears the other
    relay's amplified noise (``r2m`` at the MS, ``r1b`` at the BS).
    """
    if RelayStrategy(strategy) is not RelayStrategy.AF:
        return RatePair(
            PRE_LOG * np.minimum(capacity(br1), capacity(r1m)),
            PRE_LOG * np.minimum(capacity(mr2), capacity(r2b)),
        )
    br1, r1m, mr2, r2b, r2m, r1b = (np.asarray(x, dtype=float) for x in (br1, r1m, mr2, r2b, r2m, r1b))
    one_br1 = 1.0 + br1
    one_mr2 = 1.0 + mr2
    common = one_mr2 * one_br1
    snr_down = br1 * r1m * one_mr2 / (r1m * one_mr2 + r2m * one_br1 + common)
    snr_up = mr2 * r2b * one_br1 / (r1b * one_mr2 + r2b * one_br1 + common)
    return RatePair(PRE_LOG * capacity(snr_down), PRE_LOG * capacity(snr_up))


def rate_mode_e(
    br, mr, rb, rm, gain_rm, gain_rb, p_rs, strategy, xi: float = 0.5, theta: float = 0.5
) -> RatePair:
    """Three-step two-way relaying through a single relay.

    ``gain_rm`` and ``gain_rb`` are the raw power gains on the broadcast
    subcarrier, needed by the AF scaling factors.
    """
    strategy = RelayStrategy(strategy)
    if strategy is RelayStrategy.DF_XOR:
        broadcast = np.minimum(capacity(rb), capacity(rm))
        return RatePair(
            PRE_LOG * np.minimum(capacity(br), broadcast),
            PRE_LOG * np.minimum(capacity(mr), broadcast),
        )
    if strategy is RelayStrategy.DF_SUP:
        rm = np.asarray(rm, dtype=float)
        rb = np.asarray(rb, dtype=float)
        return RatePair(
            PRE_LOG * np.minimum(capacity(br), capacity(theta * rm)),
            PRE_LOG * np.minimum(capacity(mr), capacity((1.0 - theta) * rb)),
        )
    br, mr, gain_rm, gain_rb = (np.asarray(x, dtype=float) for x in (br, mr, gain_rm, gain_rb))
    alpha2 = xi * p_rs / (1.0 + br)
    beta2 = (1.0 - xi) * p_rs / (1.0 + mr)
    snr_down = alpha2 * br * gain_rm / (1.0 + (alpha2 + beta2) * gain_rm)
    snr_up = beta2 * mr * gain_rb / (1.0 + (alpha2 + beta2) * gain_rb)
    return RatePair(PRE_LOG * capacity(snr_down), PRE_LOG * capacity(snr_up))


def session_rate(
    real: ChannelRealization,
    k: int,
    mode: TransmissionMode,
    sc: SessionSubcarriers,
    strategy: RelayStrategy = RelayStrategy.DF_XOR,
    xi: float = 0.5,
    theta: float = 0.5,
) -> RatePair:
    """Rate pair of MS ``k`` served in ``mode`` on the given slot subcarriers."""
    sc.check(mode, real.num_subcarriers)
    n1, n2, n3 = sc.n1, sc.n2, sc.n3
    tag = mode.tag
    if tag is ModeTag.A:
        pair = rate_mode_a(real.snr_bm[k, n1], real.snr_mb[k, n2])
    elif tag is ModeTag.B:
        (r,) = mode.relays
        pair = rate_mode_b(real.snr_bm[k, n1], real.snr_mr[k, r, n2], real.snr_rb[r, n3], strategy)
    elif tag is ModeTag.C:
        (r,) = mode.relays
        pair = rate_mode_c(real.snr_br[r, n1], real.snr_rm[k, r, n3], real.snr_mb[k, n2], strategy)
    elif tag is ModeTag.D:
        r, rp = mode.relays
        pair = rate_mode_d(
            real.snr_br[r, n1],
            real.snr_rm[k, r, n3],
            real.snr_mr[k, rp, n2],
            real.snr_rb[rp, n3],
            real.snr_rm[k, rp, n3],
            real.snr_rb[r, n3],
            strategy,
        )
    else:
        (r,) = mode.relays
        pair = rate_mode_e(
            real.snr_br[r, n1],
            real.snr_mr[k, r, n2],
            real.snr_rb[r, n3],
            real.snr_rm[k, r, n3],
            real.gain_mr[k, r, n3],
            real.gain_br[r, n3],
            real.p_rs,
            strategy,
            xi,
            theta,
        )
    return RatePair(float(pair.r_down), float(pair.r_up))
