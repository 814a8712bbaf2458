"""Security analysis of the qudit two-way deterministic QKD protocol (LM05)."""

from .channels import CorrelationMode, NoiseKind, make_channel, two_way_action
from .collective import (
    collective_key_rate,
    error_rates,
    protocol_comparison,
    purified_statistics,
)
from .individual import (
    CloningParams,
    detection_probability,
    detection_threshold,
    individual_key_rate,
    min_detection_probability,
    mutual_informations,
)
from .montecarlo import NoiseSpec, SimConfig, run_lm05_cloning, run_lm05_noise, simulate

__all__ = [
    "CloningParams",
    "CorrelationMode",
    "NoiseKind",
    "NoiseSpec",
    "SimConfig",
    "collective_key_rate",
    "detection_probability",
    "detection_threshold",
    "error_rates",
    "individual_key_rate",
    "make_channel",
    "min_detection_probability",
    "mutual_informations",
    "protocol_comparison",
    "purified_statistics",
    "run_lm05_cloning",
    "run_lm05_noise",
    "simulate",
    "two_way_action",
]
