"""
Pydantic schema models for experiment configuration files.

An experiment file is one JSON document. Device, frontend and clock sections
reuse the models of the core package; the remaining sections hold the
settings of each experiment. The frontend stages (transconductance,
hysteresis, reference) sit at the top level or grouped under "frontend".
Unknown keys are rejected.
"""

from typing import Any, List, Literal, Optional

from pydantic import BaseModel, ConfigDict, Field, field_validator, model_validator

from config import settings
from core.device import DeviceParams, DriftModel
from core.frontend import REFERENCE_HYSTERESIS, HysteresisConfig, TransconductanceConfig
from core.timing import ClockConfig

# Sections that may also be grouped under a "frontend" key
FRONTEND_KEYS = ("transconductance", "hysteresis", "reference")


class PdcSection(BaseModel):
    """Single-current delay measurements (histogram and CDF runs)."""
    model_config = ConfigDict(extra="forbid")

    current_uA: Optional[float] = Field(
        918.0, description="Step current for the histogram run; null uses the transconductance stage"
    )
    cdf_currents_uA: List[float] = Field(default_factory=lambda: [918.0, 924.0, 930.0])
    n_trials: int = Field(10_000, ge=1)
    n_bins: int = Field(50, ge=3)


class SweepSection(BaseModel):
    """Mean switching time versus current."""
    model_config = ConfigDict(extra="forbid")

    currents_uA: List[float] = Field(
        default_factory=lambda: [650.0, 750.0, 850.0, 950.0, 1050.0, 1150.0, 1250.0, 1350.0]
    )
    n_trials: int = Field(10_000, ge=1, description="Trials per current")
    center_window: bool = Field(True, description="Retune v_ref so each current stays detectable")

    @field_validator("currents_uA")
    @classmethod
    def _enough_currents(cls, currents: List[float]) -> List[float]:
        if len(currents) < 4:
            raise ValueError(f"a sweep needs at least 4 currents, got {len(currents)}")
        return currents


class SamplingSection(BaseModel):
    """Exponential-clock die rolls."""
    model_config = ConfigDict(extra="forbid")

    rates: Optional[List[float]] = Field(default_factory=lambda: [1.0, 2.0, 3.0])
    currents_uA: Optional[List[float]] = Field(None, description="Address the die with currents instead of rates")
    n_samples: int = Field(100_000, ge=1)
    scale_factor: float = Field(1000.0, gt=0, description="Rate multiplier for the scale-invariance check")

    @model_validator(mode="after")
    def _one_source(self) -> "SamplingSection":
        if self.currents_uA is None and not self.rates:
            raise ValueError("either rates or currents_uA is required")
        return self


class IsingSection(BaseModel):
    """Metropolis-Hastings chain on an Ising model."""
    model_config = ConfigDict(extra="forbid")

    generator: Literal["grid", "random"] = Field("grid", description="Built-in problem when no explicit J is given")
    rows: int = Field(2, ge=1)
    cols: int = Field(2, ge=1)
    coupling: float = 1.0
    field: float = 0.0
    n_spins: int = Field(4, ge=1, le=20, description="Spins of a random-couplings problem")
    coupling_seed: Optional[int] = Field(None, ge=0, lt=2**64, description="Seed for random couplings; null uses the run seed")
    scale: float = Field(1.0, gt=0, description="Standard deviation of random couplings")
    field_scale: float = Field(0.0, ge=0, description="Standard deviation of random fields")
    couplings: Optional[List[List[float]]] = Field(None, description="Explicit J; overrides the generator")
    fields: Optional[List[float]] = None
    beta: float = Field(0.5, gt=0)
    w: float = Field(1.0, gt=0)
    n_steps: int = Field(1_000_000, ge=1)
    burn_in: int = Field(100_000, ge=0)


class DriftRunSection(BaseModel):
    """Long telegraph run binned into successive windows."""
    model_config = ConfigDict(extra="forbid")

    current_uA: float = 0.0
    n_bins: int = Field(30, ge=2)
    events_per_bin: int = Field(2000, ge=30, description="Target AP dwells per window")


class ExperimentConfig(BaseModel):
    """Complete configuration of one run."""
    model_config = ConfigDict(extra="forbid")

    name: str = Field("experiment", description="Run label echoed in the manifest")
    seed: int = Field(default_factory=lambda: settings.DEFAULT_SEED, ge=0, lt=2**64)
    workers: int = Field(1, ge=1)
    trial_spacing_s: float = Field(10e-3, gt=0, description="Lab time between consecutive trials")

    device: DeviceParams = Field(default_factory=DeviceParams)
    drift: DriftModel = Field(default_factory=DriftModel)
    transconductance: TransconductanceConfig = Field(default_factory=TransconductanceConfig)
    hysteresis: HysteresisConfig = Field(default_factory=HysteresisConfig)
    reference: HysteresisConfig = Field(default_factory=lambda: REFERENCE_HYSTERESIS)
    timing: ClockConfig = Field(default_factory=ClockConfig)

    pdc: PdcSection = Field(default_factory=PdcSection)
    sweep: SweepSection = Field(default_factory=SweepSection)
    sampling: SamplingSection = Field(default_factory=SamplingSection)
    ising: IsingSection = Field(default_factory=IsingSection)
    drift_run: DriftRunSection = Field(default_factory=DriftRunSection)

    @model_validator(mode="before")
    @classmethod
    def _unpack_frontend(cls, data: Any) -> Any:
        """Accept the frontend stages grouped under one ``frontend`` section."""
        if not isinstance(data, dict) or "frontend" not in data:
            return data
        data = dict(data)
        frontend = data.pop("frontend")
        if not isinstance(frontend, dict):
            raise ValueError("frontend must be an object")
        unknown = set(frontend) - set(FRONTEND_KEYS)
        if unknown:
            raise ValueError(f"unknown frontend keys: {sorted(unknown)}")
        for key, value in frontend.items():
            if key in data:
                raise ValueError(f"{key} given both at top level and under frontend")
            data[key] = value
        return data
