"""Network geometry and per-subcarrier channel gains.

Gains combine power-law path loss, one log-normal shadowing draw per link
and frequency-selective Rayleigh fading obtained from an exponentially
decaying tapped delay line.  Noise is normalised to unit power, so an SNR is
simply ``transmit_power * gain``.
"""
from __future__ import annotations

import dataclasses
import enum
from dataclasses import dataclass, field
from functools import cached_property
from typing import NamedTuple

import numpy as np


class RelayStrategy(str, enum.Enum):
    AF = "af"
    DF_XOR = "df-xor"
    DF_SUP = "df-sup"

    @property
    def is_df(self) -> bool:
        return self is not RelayStrategy.AF


class GeometryMode(str, enum.Enum):
    CELL = "cell"
    NORMALIZED_PLANE = "normalized-plane"


# P_B = P_R + 3 dB = P_M + 5 dB
RS_POWER_OFFSET_DB = 3.0
MS_POWER_OFFSET_DB = 5.0


def db_to_linear(x_db):
    return 10.0 ** (np.asarray(x_db, dtype=float) / 10.0)


@dataclass(frozen=True)
class ScenarioConfig:
    """Static description of one simulated cell.

    Powers are per-subcarrier values in dB relative to the unit noise power.
    Path loss is ``ref_gain * (distance / ref_distance) ** -exponent`` with the
    reference distance defaulting to the cell radius.
    """

    num_ms: int = 4
    num_rs: int = 10
    num_subcarriers: int = 16
    cell_radius: float = 2000.0
    rs_radius_ratio: float = 0.5
    path_loss_exponent: float = 4.0
    pathloss_ref_gain_db: float = -20.0
    pathloss_ref_distance: float | None = None
    # below this fraction of the cell radius the path loss stops growing
    min_distance_ratio: float = 0.05
    shadowing_sigma_db: float = 5.8
    small_scale_fading: bool = True
    max_delay_spread: float = 5e-6
    num_taps: int = 8
    subcarrier_spacing_hz: float | None = None
    power_bs_db: float = 10.0
    power_rs_db: float = 10.0 - RS_POWER_OFFSET_DB
    power_ms_db: float = 10.0 - MS_POWER_OFFSET_DB
    relay_strategy: RelayStrategy = RelayStrategy.DF_XOR
    xi: float = 0.5
    theta: float = 0.5
    rng_seed: int = 0
    geometry_mode: GeometryMode = GeometryMode.CELL
    # only read in NORMALIZED_PLANE mode
    bs_position: tuple[float, float] = (0.0, 0.0)
    rs_positions: tuple[tuple[float, float], ...] = ()
    ms_positions: tuple[tuple[float, float], ...] = ()

    def __post_init__(self):
        object.__setattr__(self, "relay_strategy", RelayStrategy(self.relay_strategy))
        object.__setattr__(self, "geometry_mode", GeometryMode(self.geometry_mode))
        object.__setattr__(self, "bs_position", tuple(float(c) for c in self.bs_position))
        object.__setattr__(
            self, "rs_positions", tuple(tuple(float(c) for c in p) for p in self.rs_positions)
        )
        object.__setattr__(
            self, "ms_positions", tuple(tuple(float(c) for c in p) for p in self.ms_positions)
        )
        if self.num_ms < 1:
            raise ValueError(f"num_ms must be >= 1, got {self.num_ms}")
        if self.num_rs < 0:
            raise ValueError(f"num_rs must be >= 0, got {self.num_rs}")
        if self.num_subcarriers < 1:
            raise ValueError(f"num_subcarriers must be >= 1, got {self.num_subcarriers}")
        if not 0.0 <= self.rs_radius_ratio <= 1.0:
            raise ValueError(f"rs_radius_ratio must lie in [0, 1], got {self.rs_radius_ratio}")
        for name in ("xi", "theta"):
            value = getattr(self, name)
            if not 0.0 <= value <= 1.0:
                raise ValueError(f"{name} must lie in [0, 1], got {value}")
        if not 0.0 <= self.min_distance_ratio < 1.0:
            raise ValueError("min_distance_ratio must lie in [0, 1)")
        if self.cell_radius <= 0:
            raise ValueError("cell_radius must be positive")
        if self.num_taps < 1:
            raise ValueError("num_taps must be >= 1")
        if self.shadowing_sigma_db < 0 or self.max_delay_spread < 0:
            raise ValueError("shadowing_sigma_db and max_delay_spread must be non-negative")
        if self.geometry_mode is GeometryMode.NORMALIZED_PLANE:
            if len(self.rs_positions) != self.num_rs or len(self.ms_positions) != self.num_ms:
                raise ValueError(
                    "normalized-plane geometry needs exactly num_rs RS positions "
                    "and num_ms MS positions"
                )

    @property
    def rs_circle_radius(self) -> float:
        return self.rs_radius_ratio * self.cell_radius

    @property
    def reference_distance(self) -> float:
        if self.pathloss_ref_distance is None:
            return self.cell_radius
        return self.pathloss_ref_distance

    @property
    def spacing_hz(self) -> float:
        # default: delay spread x total bandwidth == 1
        if self.subcarrier_spacing_hz is not None:
            return self.subcarrier_spacing_hz
        if self.max_delay_spread == 0:
            return 1.0
        return 1.0 / (self.num_subcarriers * self.max_delay_spread)

    def with_bs_power(self, power_bs_db: float) -> ScenarioConfig:
        """Copy with the BS power set and RS/MS powers following the fixed offsets."""
        return dataclasses.replace(
            self,
            power_bs_db=power_bs_db,
            power_rs_db=power_bs_db - RS_POWER_OFFSET_DB,
            power_ms_db=power_bs_db - MS_POWER_OFFSET_DB,
        )

    def replace(self, **changes) -> ScenarioConfig:
        return dataclasses.replace(self, **changes)


class Node(NamedTuple):
    kind: str  # "BS", "RS" or "MS"
    index: int = 0

    def __str__(self):
        return self.kind if self.kind == "BS" else f"{self.kind}{self.index}"


BS = Node("BS")


def ms(k: int) -> Node:
    return Node("MS", k)


def rs(r: int) -> Node:
    return Node("RS", r)


@dataclass(frozen=True)
class NodeLayout:
    bs_position: np.ndarray
    rs_positions: np.ndarray  # (M, 2)
    ms_positions: np.ndarray  # (K, 2)

    def position(self, node: Node) -> np.ndarray:
        if node.kind == "BS":
            return self.bs_position
        if node.kind == "RS":
            return self.rs_positions[node.index]
        if node.kind == "MS":
            return self.ms_positions[node.index]
        raise KeyError(f"unknown node {node!r}")

    @property
    def bs_ms_distance(self) -> np.ndarray:
        return np.linalg.norm(self.ms_positions - self.bs_position, axis=-1)

    @property
    def bs_rs_distance(self) -> np.ndarray:
        return np.linalg.norm(self.rs_positions - self.bs_position, axis=-1)

    @property
    def ms_rs_distance(self) -> np.ndarray:
        """(K, M) matrix of MS-RS distances."""
        diff = self.ms_positions[:, None, :] - self.rs_positions[None, :, :]
        return np.linalg.norm(diff, axis=-1)


def generate_layout(cfg: ScenarioConfig, rng: np.random.Generator | None = None) -> NodeLayout:
    """Place the BS at the origin, RSs on the inner circle and MSs uniformly in the cell."""
    if cfg.geometry_mode is GeometryMode.NORMALIZED_PLANE:
        return NodeLayout(
            bs_position=np.array(cfg.bs_position, dtype=float),
            rs_positions=np.array(cfg.rs_positions, dtype=float).reshape(cfg.num_rs, 2),
            ms_positions=np.array(cfg.ms_positions, dtype=float).reshape(cfg.num_ms, 2),
        )
    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)
    # uniform by area: radius ~ R * sqrt(U)
    radius = cfg.cell_radius * np.sqrt(rng.random(cfg.num_ms))
    phi = 2.0 * np.pi * rng.random(cfg.num_ms)
    ms_pos = np.column_stack([radius * np.cos(phi), radius * np.sin(phi)])
    angles = 2.0 * np.pi * np.arange(cfg.num_rs) / max(cfg.num_rs, 1)
    rs_pos = cfg.rs_circle_radius * np.column_stack([np.cos(angles), np.sin(angles)])
    return NodeLayout(
        bs_position=np.zeros(2),
        rs_positions=rs_pos.reshape(cfg.num_rs, 2),
        ms_positions=ms_pos,
    )


def path_loss_gain(cfg: ScenarioConfig, distance) -> np.ndarray:
    distance = np.asarray(distance, dtype=float)
    if np.any(distance <= 0):
        raise ValueError("degenerate geometry: two nodes share a position (zero distance)")
    ref = db_to_linear(cfg.pathloss_ref_gain_db)
    distance = np.maximum(distance, cfg.min_distance_ratio * cfg.cell_radius)
    return ref * (distance / cfg.reference_distance) ** (-cfg.path_loss_exponent)


def power_delay_profile(cfg: ScenarioConfig) -> tuple[np.ndarray, np.ndarray]:
    """Tap delays and normalised tap powers of the exponential profile."""
    if cfg.num_taps == 1 or cfg.max_delay_spread == 0:
        return np.zeros(1), np.ones(1)
    delays = np.linspace(0.0, cfg.max_delay_spread, cfg.num_taps)
    # last tap sits 3 decay constants (~13 dB) below the first
    powers = np.exp(-3.0 * delays / cfg.max_delay_spread)
    return delays, powers / powers.sum()


def rayleigh_fading(
    cfg: ScenarioConfig, rng: np.random.Generator, shape: tuple[int, ...]
) -> np.ndarray:
    """|H(n)|^2 for independent links of the given leading ``shape``, unit mean."""
    n_sc = cfg.num_subcarriers
    if not cfg.small_scale_fading:
        return np.ones(shape + (n_sc,))
    delays, powers = power_delay_profile(cfg)
    taps = (
        rng.standard_normal(shape + (len(powers),))
        + 1j * rng.standard_normal(shape + (len(powers),))
    ) * np.sqrt(powers / 2.0)
    freqs = cfg.spacing_hz * np.arange(n_sc)
    steering = np.exp(-2j * np.pi * np.outer(delays, freqs))  # (L, N)
    response = taps @ steering
    return np.abs(response) ** 2


def _large_scale(cfg, rng, distance):
    shadow_db = cfg.shadowing_sigma_db * rng.standard_normal(np.shape(distance))
    return path_loss_gain(cfg, distance) * db_to_linear(shadow_db)


@dataclass(frozen=True)
class ChannelRealization:
    """One block-fading channel draw.

    Gains are stored per undirected link so reciprocity holds by
    construction; directional SNRs differ only through transmit power.
    """

    gain_bm: np.ndarray  # (K, N)  BS-MS
    gain_br: np.ndarray  # (M, N)  BS-RS
    gain_mr: np.ndarray  # (K, M, N)  MS-RS
    power_bs_db: float
    power_rs_db: float
    power_ms_db: float
    large_scale_bm: np.ndarray = field(default=None, repr=False)  # (K,)
    large_scale_br: np.ndarray = field(default=None, repr=False)  # (M,)
    large_scale_mr: np.ndarray = field(default=None, repr=False)  # (K, M)

    def __post_init__(self):
        for name in ("gain_bm", "gain_br", "gain_mr"):
            arr = np.asarray(getattr(self, name), dtype=float)
            arr.setflags(write=False)
            object.__setattr__(self, name, arr)

    @property
    def num_ms(self) -> int:
        return self.gain_bm.shape[0]

    @property
    def num_rs(self) -> int:
        return self.gain_br.shape[0]

    @property
    def num_subcarriers(self) -> int:
        return self.gain_bm.shape[1]

    @property
    def p_bs(self) -> float:
        return float(db_to_linear(self.power_bs_db))

    @property
    def p_rs(self) -> float:
        return float(db_to_linear(self.power_rs_db))

    @property
    def p_ms(self) -> float:
        return float(db_to_linear(self.power_ms_db))

    # directional SNR tables, named source-destination
    @cached_property
    def snr_bm(self) -> np.ndarray:
        return self.p_bs * self.gain_bm

    @cached_property
    def snr_mb(self) -> np.ndarray:
        return self.p_ms * self.gain_bm

    @cached_property
    def snr_br(self) -> np.ndarray:
        return self.p_bs * self.gain_br

    @cached_property
    def snr_rb(self) -> np.ndarray:
        return self.p_rs * self.gain_br

    @cached_property
    def snr_mr(self) -> np.ndarray:
        return self.p_ms * self.gain_mr

    @cached_property
    def snr_rm(self) -> np.ndarray:
        return self.p_rs * self.gain_mr

    def transmit_power(self, node: Node) -> float:
        return {"BS": self.p_bs, "RS": self.p_rs, "MS": self.p_ms}[node.kind]

    def gain(self, a: Node, b: Node, n: int) -> float:
        kinds = {a.kind, b.kind}
        try:
            if kinds == {"BS", "MS"}:
                k = a.index if a.kind == "MS" else b.index
                return float(self.gain_bm[k, n])
            if kinds == {"BS", "RS"}:
                r = a.index if a.kind == "RS" else b.index
                return float(self.gain_br[r, n])
            if kinds == {"MS", "RS"}:
                k = a.index if a.kind == "MS" else b.index
                r = a.index if a.kind == "RS" else b.index
                return float(self.gain_mr[k, r, n])
        except IndexError:
            raise KeyError(f"no link {a}-{b} on subcarrier {n}") from None
        raise KeyError(f"unknown link {a}-{b}")

    def snr(self, link: tuple[Node, Node], n: int) -> float:
        """Linear SNR from ``link[0]`` to ``link[1]`` on subcarrier ``n``."""
        src, dst = link
        return self.transmit_power(src) * self.gain(src, dst, n)

    def with_powers(self, power_bs_db: float, power_rs_db: float, power_ms_db: float):
        return dataclasses.replace(
            self, power_bs_db=power_bs_db, power_rs_db=power_rs_db, power_ms_db=power_ms_db
        )

    def with_bs_power(self, power_bs_db: float):
        return self.with_powers(
            power_bs_db, power_bs_db - RS_POWER_OFFSET_DB, power_bs_db - MS_POWER_OFFSET_DB
        )


def generate_channel(
    cfg: ScenarioConfig, layout: NodeLayout, rng: np.random.Generator | None = None
) -> ChannelRealization:
    if rng is None:
        rng = np.random.default_rng(cfg.rng_seed)
    K, M = len(layout.ms_positions), len(layout.rs_positions)
    ls_bm = _large_scale(cfg, rng, layout.bs_ms_distance)
    ls_br = _large_scale(cfg, rng, layout.bs_rs_distance) if M else np.zeros(0)
    ls_mr = _large_scale(cfg, rng, layout.ms_rs_distance) if M else np.zeros((K, 0))
    fading_bm = rayleigh_fading(cfg, rng, (K,))
    fading_br = rayleigh_fading(cfg, rng, (M,))
    fading_mr = rayleigh_fading(cfg, rng, (K, M))
    return ChannelRealization(
        gain_bm=ls_bm[:, None] * fading_bm,
        gain_br=ls_br[:, None] * fading_br,
        gain_mr=ls_mr[:, :, None] * fading_mr,
        power_bs_db=cfg.power_bs_db,
        power_rs_db=cfg.power_rs_db,
        power_ms_db=cfg.power_ms_db,
        large_scale_bm=ls_bm,
        large_scale_br=ls_br,
        large_scale_mr=ls_mr,
    )


def draw_scenario(cfg: ScenarioConfig, seed: int | np.random.SeedSequence | None = None):
    """Layout and channel from one seeded stream (MS positions drawn first)."""
    rng = np.random.default_rng(cfg.rng_seed if seed is None else seed)
    layout = generate_layout(cfg, rng)
    return layout, generate_channel(cfg, layout, rng)
