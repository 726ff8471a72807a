"""Analysis settings shared by the pipeline, the reports and the CLI."""

from __future__ import annotations

from dataclasses import asdict, dataclass
from typing import Union

from .errors import DematelError
from .fuzzy import CFCS_BOUND_MODES
from .graph import DEFAULT_MAX_CYCLES

Threshold = Union[float, str]


@dataclass(frozen=True)
class AnalysisConfig:
    """Every free parameter of a run.

    threshold:
        IRM cut-off ``p``, or ``"auto"`` for the mean off-diagonal entry of T.
    epsilon:
        Half-width of the neutral band around zero relation.
    cfcs_bounds:
        ``"global"`` or ``"per-column"`` min/max bounds for CFCS.
    scale_max:
        Largest integer rating accepted in crisp surveys (ratings are 0..scale_max).
    allow_self_loops:
        Keep diagonal entries of T above the threshold as self-loops.
    max_cycle_len, max_cycles:
        Caps on loop enumeration; ``max_cycle_len=None`` means ``n``.
    digits:
        Display rounding for reports and tables.
    """

    threshold: Threshold = "auto"
    epsilon: float = 1e-9
    cfcs_bounds: str = "global"
    scale_max: int = 4
    allow_self_loops: bool = False
    max_cycle_len: int | None = None
    max_cycles: int | None = DEFAULT_MAX_CYCLES
    digits: int = 2

    def __post_init__(self):
        if isinstance(self.threshold, str):
            if self.threshold != "auto":
                raise DematelError(f"threshold must be a number or 'auto', got {self.threshold!r}")
        else:
            object.__setattr__(self, "threshold", float(self.threshold))
            if not self.threshold >= 0:
                raise DematelError(f"threshold must be >= 0, got {self.threshold}")
        if not self.epsilon >= 0:
            raise DematelError(f"epsilon must be >= 0, got {self.epsilon}")
        if self.cfcs_bounds not in CFCS_BOUND_MODES:
            raise DematelError(
                f"cfcs_bounds must be one of {', '.join(CFCS_BOUND_MODES)}, got {self.cfcs_bounds!r}"
            )
        if int(self.scale_max) != self.scale_max or self.scale_max < 1:
            raise DematelError(f"scale_max must be an integer >= 1, got {self.scale_max}")
        if self.max_cycle_len is not None and self.max_cycle_len < 1:
            raise DematelError("max_cycle_len must be >= 1")
        if self.max_cycles is not None and self.max_cycles < 0:
            raise DematelError("max_cycles must be >= 0")
        if not 0 <= self.digits <= 12:
            raise DematelError(f"digits must be in [0, 12], got {self.digits}")

    @property
    def auto_threshold(self) -> bool:
        return self.threshold == "auto"

    def to_dict(self) -> dict:
        return asdict(self)
