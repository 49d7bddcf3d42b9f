"""Schedules and the per-slot exclusivity checker."""
from __future__ import annotations

from dataclasses import dataclass, field

from .rates import ModeTag, RatePair, TransmissionMode


# grid abbreviations for the benchmark frame tags
_SHORT_TAGS = {
    "bm1-dl": "d",
    "bm1-ul": "u",
    "dl-direct": "d",
    "ul-direct": "u",
    "dl-relay": "dr",
    "ul-relay": "ur",
}


@dataclass(frozen=True)
class Session:
    """One downlink/uplink traffic session.

    ``subcarriers[t]`` is the subcarrier used in slot ``t`` or ``None``.
    ``mode`` is a :class:`TransmissionMode` for the three-slot protocol and a
    free-form tag (e.g. ``"dl-relay"``) for the benchmark frame structures.
    """

    ms: int
    mode: TransmissionMode | str
    subcarriers: tuple[int | None, ...]
    rates: RatePair = RatePair(0.0, 0.0)
    relays: tuple[int, ...] = ()

    def __post_init__(self):
        if not self.relays and isinstance(self.mode, TransmissionMode):
            object.__setattr__(self, "relays", self.mode.relays)

    @property
    def mode_letter(self) -> str:
        if isinstance(self.mode, TransmissionMode):
            return self.mode.tag.value
        return _SHORT_TAGS.get(self.mode, str(self.mode))


@dataclass
class Allocation:
    num_slots: int = 3
    sessions: list[Session] = field(default_factory=list)

    @property
    def throughput(self) -> float:
        return float(sum(s.rates.total for s in self.sessions))

    def occupancy(self, slot: int) -> dict[int, int]:
        """Subcarrier -> session index for one slot (last writer wins)."""
        occ = {}
        for i, s in enumerate(self.sessions):
            n = s.subcarriers[slot]
            if n is not None:
                occ[n] = i
        return occ

    def __len__(self):
        return len(self.sessions)


@dataclass(frozen=True)
class Violation:
    slot: int | None
    subcarrier: int | None
    sessions: tuple[int, ...]
    message: str

    def __str__(self):
        return self.message


def check_allocation(alloc: Allocation, num_subcarriers: int | None = None) -> Violation | None:
    """Return the first violated constraint, or ``None`` when the schedule is valid.

    Every subcarrier may carry at most one session per slot, and a
    three-slot session uses slot 3 exactly when its mode is relay-assisted.
    """
    for i, s in enumerate(alloc.sessions):
        if len(s.subcarriers) != alloc.num_slots:
            return Violation(None, None, (i,), f"session {i} spans {len(s.subcarriers)} slots, frame has {alloc.num_slots}")
        if isinstance(s.mode, TransmissionMode) and alloc.num_slots == 3:
            uses_relay_slot = s.subcarriers[2] is not None
            if uses_relay_slot == (s.mode.tag is ModeTag.A):
                return Violation(2, s.subcarriers[2], (i,), f"session {i}: mode {s.mode.tag.value} inconsistent with slot-3 use")
            if s.subcarriers[0] is None or s.subcarriers[1] is None:
                return Violation(None, None, (i,), f"session {i} lacks a slot-1 or slot-2 subcarrier")
        if num_subcarriers is not None:
            for t, n in enumerate(s.subcarriers):
                if n is not None and not 0 <= n < num_subcarriers:
                    return Violation(t, n, (i,), f"session {i}: subcarrier {n} out of range in slot {t}")
    for t in range(alloc.num_slots):
        owner: dict[int, int] = {}
        for i, s in enumerate(alloc.sessions):
            n = s.subcarriers[t]
            if n is None:
                continue
            if n in owner:
                return Violation(t, n, (owner[n], i), f"slot {t}, subcarrier {n} assigned to sessions {owner[n]} and {i}")
            owner[n] = i
    return None
