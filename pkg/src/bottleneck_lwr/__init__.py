"""Day-to-day departure-time dynamics at a single bottleneck on an imaginary payoff road."""

__version__ = "0.1.0"

from .config import SimConfig, ValidatedConfig, demo_config, validate  # noqa: E402
from .grids import build_grids  # noqa: E402

__all__ = ["SimConfig", "ValidatedConfig", "demo_config", "validate", "build_grids", "__version__"]
