"""
Pydantic report models for fits and drift analysis.

Reports are plain data: they serialise to JSON with ``model_dump_json``.
"""

from typing import Dict, List, Optional

from pydantic import BaseModel, ConfigDict, Field, model_validator

# Reduced chi-squared above this is flagged as excess scatter
EXCESS_SCATTER_LIMIT = 2.0


class FitReport(BaseModel):
    """Estimated parameters with one-standard-deviation uncertainties."""
    model_config = ConfigDict(extra="forbid")

    method: str = Field(..., description="Estimator that produced the report")
    parameters: Dict[str, float] = Field(default_factory=dict)
    uncertainties: Dict[str, float] = Field(default_factory=dict)
    fixed: Dict[str, float] = Field(default_factory=dict, description="Parameters held constant")
    reduced_chi_squared: Optional[float] = None
    n_points: int = Field(..., ge=1)
    n_parameters: int = Field(..., ge=1)
    n_dof: int
    n_samples: Optional[int] = None
    p_value: Optional[float] = None
    flags: List[str] = Field(default_factory=list)

    @model_validator(mode="after")
    def _check_dof(self) -> "FitReport":
        if self.n_dof != self.n_points - self.n_parameters:
            raise ValueError("n_dof must equal n_points - n_parameters")
        if self.n_dof <= 0:
            raise ValueError(f"fit has no degrees of freedom (n_dof={self.n_dof})")
        for name, value in self.uncertainties.items():
            if value < 0:
                raise ValueError(f"negative uncertainty for {name}")
        return self

    @property
    def excess_scatter(self) -> bool:
        return self.reduced_chi_squared is not None and self.reduced_chi_squared > EXCESS_SCATTER_LIMIT


class DriftReport(BaseModel):
    """Stability of the mean AP dwell across successive windows."""
    model_config = ConfigDict(extra="forbid")

    bin_means: List[float]
    bin_stderrs: List[float]
    events_per_bin: List[int]
    ap_fraction: Optional[List[float]] = None
    mean_of_standard_errors: float
    spread_of_means: float
    ratio: float

    @model_validator(mode="after")
    def _check_bins(self) -> "DriftReport":
        if len(self.bin_means) < 2:
            raise ValueError("a drift report needs at least two bins")
        if not len(self.bin_means) == len(self.bin_stderrs) == len(self.events_per_bin):
            raise ValueError("per-bin lists must have equal length")
        return self

    @property
    def n_bins(self) -> int:
        return len(self.bin_means)
