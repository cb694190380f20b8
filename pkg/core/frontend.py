#!/usr/bin/env python
# -*- coding: utf-8 -*-
"""
Behavioural model of the analog signal path.

Covers the voltage-controlled current source, device voltage synthesis, the
programmable hysteresis comparator (with a dead time standing in for the
amplifier response) and the set-reset latch that captures the first rising
edge.
"""

import math
from dataclasses import dataclass
from typing import List, Tuple

from pydantic import BaseModel, ConfigDict, Field, model_validator

from core.device import MagState, TelegraphTrace
from core.temporal import NEVER, EdgeEvent
from utils.errors import DomainError, NoSignalError


class TransconductanceConfig(BaseModel):
    """Op-amp current source: I = (v_power - v_in) / r_tc."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    v_power: float = Field(10.0, description="Supply voltage (V)")
    r_tc: float = Field(4900.0, gt=0, description="Sense resistor (ohm)")
    v_in: float = Field(5.5018, description="Programmed input voltage (V)")
    current_resolution_uA: float = Field(0.2, ge=0, description="Programming step of the current (uA)")

    @model_validator(mode="after")
    def _forward_only(self) -> "TransconductanceConfig":
        if self.v_in > self.v_power:
            raise ValueError(f"v_in ({self.v_in} V) above v_power ({self.v_power} V) drives reverse current")
        return self


class HysteresisConfig(BaseModel):
    """Resistor network and supply of one hysteresis comparator stage."""
    model_config = ConfigDict(extra="forbid", frozen=True)

    r_f: float = Field(50_000.0, gt=0, description="Feedback resistor (ohm)")
    r_hth: float = Field(1_000.0, gt=0, description="Threshold resistor (ohm)")
    v_ref: float = Field(0.54, description="Reference voltage (V)")
    v_dd: float = Field(5.0, gt=0, description="Comparator supply (V)")
    response_time: float = Field(100e-9, ge=0, description="Amplifier response time (s)")

    @property
    def window(self) -> float:
        return self.r_hth / (self.r_hth + self.r_f) * self.v_dd


# Reference-path comparator (R_F2, R_HTh2, V_REF2)
REFERENCE_HYSTERESIS = HysteresisConfig(r_f=24_900.0, r_hth=100.0, v_ref=5.5)


@dataclass(frozen=True)
class DigitalEdgeTrace:
    """
    Comparator output transitions.

    The output starts low at t = 0; ``transitions`` holds (time, level)
    pairs with strictly increasing times and alternating levels.
    ``total`` is the end of the observation window.
    """
    transitions: Tuple[Tuple[float, int], ...]
    total: float

    def __post_init__(self):
        level = 0
        last = -math.inf
        for time, new_level in self.transitions:
            if not time > last:
                raise ValueError("edge times must be strictly increasing")
            if new_level != 1 - level:
                raise ValueError("edge levels must alternate starting with a rising edge")
            last, level = time, new_level

    @property
    def rising(self) -> List[float]:
        return [t for t, level in self.transitions if level == 1]

    def __len__(self) -> int:
        return len(self.transitions)


def transconductance_current(cfg: TransconductanceConfig) -> float:
    """
    Current forced through the device, in microamps.

    Raises:
        DomainError: If the configuration would source a negative current.
    """
    current = (cfg.v_power - cfg.v_in) / cfg.r_tc * 1e6
    if current < 0:
        raise DomainError(f"negative device current {current} uA")
    return current


def program_current(target_uA: float, cfg: TransconductanceConfig) -> Tuple[float, float]:
    """
    Input voltage that realises ``target_uA``.

    The target is first rounded to the programming resolution.

    Returns:
        (v_in, achieved current in uA)
    """
    if target_uA < 0:
        raise DomainError(f"cannot program a negative current ({target_uA} uA)")
    achieved = target_uA
    if cfg.current_resolution_uA > 0:
        achieved = round(target_uA / cfg.current_resolution_uA) * cfg.current_resolution_uA
    v_in = cfg.v_power - achieved * 1e-6 * cfg.r_tc
    return v_in, achieved


def device_resistances(tmr: float, ra_product: float, diameter: float) -> Tuple[float, float]:
    """
    Resistances of a circular junction.

    Args:
        tmr: Tunnelling magnetoresistance as a fraction (1.2 for 120 %).
        ra_product: Resistance-area product (ohm um^2).
        diameter: Junction diameter (nm).

    Returns:
        (r_p, r_ap) in ohms.
    """
    if tmr < 0 or ra_product <= 0 or diameter <= 0:
        raise DomainError(f"invalid junction: tmr={tmr}, ra={ra_product}, d={diameter}")
    radius_um = diameter * 1e-3 / 2.0
    r_p = ra_product / (math.pi * radius_um**2)
    return r_p, r_p * (1.0 + tmr)


def hysteresis_thresholds(cfg: HysteresisConfig) -> Tuple[float, float]:
    """Return (v_th, v_tl), the rising and falling thresholds."""
    total = cfg.r_hth + cfg.r_f
    v_tl = cfg.r_f / total * cfg.v_ref
    v_th = cfg.r_hth / total * cfg.v_dd + v_tl
    return v_th, v_tl


def device_levels(i: float, r_p: float, r_ap: float) -> Tuple[float, float]:
    """Device voltages (V) in P and AP at current ``i`` (uA)."""
    amps = i * 1e-6
    return amps * r_p, amps * r_ap


def check_signal(i: float, r_p: float, r_ap: float, cfg: HysteresisConfig) -> None:
    """
    Raise NoSignalError unless the P level sits below V_TL and the AP level above V_TH.
    """
    v_th, v_tl = hysteresis_thresholds(cfg)
    low, high = device_levels(i, r_p, r_ap)
    if not (low < v_tl and high > v_th):
        raise NoSignalError(
            f"device levels {low:.4f} V / {high:.4f} V at I={i} uA do not straddle "
            f"the window [{v_tl:.4f}, {v_th:.4f}] V"
        )


def centered_hysteresis(i: float, r_p: float, r_ap: float, cfg: HysteresisConfig) -> HysteresisConfig:
    """
    Copy of ``cfg`` with v_ref moved so the window is centred between the device levels.

    Raises:
        NoSignalError: If the window is wider than the level separation.
    """
    low, high = device_levels(i, r_p, r_ap)
    if cfg.window >= high - low:
        raise NoSignalError(f"hysteresis window {cfg.window:.4f} V wider than the signal {high - low:.4f} V")
    k_ref = cfg.r_f / (cfg.r_hth + cfg.r_f)
    # v_tl + window / 2 lands on the midpoint of the two levels
    v_ref = ((low + high) / 2.0 - cfg.window / 2.0) / k_ref
    return cfg.model_copy(update={"v_ref": v_ref})


def suppress_short_pulses(edges: DigitalEdgeTrace, min_width: float) -> DigitalEdgeTrace:
    """
    Remove high pulses narrower than ``min_width``.

    A pulse still high at the end of the window counts as narrow when less
    than ``min_width`` of it has been observed.
    """
    if min_width <= 0 or not edges.transitions:
        return edges
    kept = []
    pending = None
    for time, level in edges.transitions:
        if level == 1:
            pending = time
            continue
        if time - pending >= min_width:
            kept.append((pending, 1))
            kept.append((time, 0))
        pending = None
    if pending is not None and edges.total - pending >= min_width:
        kept.append((pending, 1))
    return DigitalEdgeTrace(transitions=tuple(kept), total=edges.total)


def digitize(trace: TelegraphTrace, i: float, r_p: float, r_ap: float, cfg: HysteresisConfig) -> DigitalEdgeTrace:
    """
    Comparator output for a telegraph trace.

    The device voltage I*R(state) is compared with the hysteresis window: a
    P->AP transition raises the output, an AP->P transition lowers it. AP
    dwells shorter than the response time never show up at the output;
    both of their edges are dropped.

    Raises:
        NoSignalError: If the two device levels do not straddle the window.
    """
    check_signal(i, r_p, r_ap, cfg)

    raw = []
    for start, dwell, state in trace.segments():
        if state is MagState.AP:
            raw.append((start, 1))
        elif start > 0.0:
            raw.append((start, 0))
    edges = DigitalEdgeTrace(transitions=tuple(raw), total=trace.total)
    return suppress_short_pulses(edges, cfg.response_time)


def sr_latch(edges: DigitalEdgeTrace) -> EdgeEvent:
    """Time of the first rising edge, or NEVER."""
    for time, level in edges.transitions:
        if level == 1:
            return EdgeEvent(time)
    return NEVER


def reference_edge(step_time: float, cfg: HysteresisConfig = REFERENCE_HYSTERESIS) -> EdgeEvent:
    """
    Edge produced by the reference comparator for a function-generator step.

    The step swings across the reference window, so the edge arrives at the
    step time; any residual delay is carried by the timing path offset.
    """
    v_th, v_tl = hysteresis_thresholds(cfg)
    if not v_th > v_tl:
        raise NoSignalError("reference comparator window collapsed")
    return EdgeEvent(step_time)
