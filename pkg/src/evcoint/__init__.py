"""FBST e-values for unit-root and cointegration-rank hypotheses."""

__version__ = "0.1.0"

from .fbst import (  # noqa: F401
    BridgeSpec,
    EvidenceResult,
    estimate_evidence,
    ev_from_pvalue,
    pvalue_from_ev,
    vecm_bridge_spec,
)
from .rng import RngState  # noqa: F401
from .unitroot import UnitRootSpec, test_unit_root  # noqa: F401
from .cointegration import VecmSpec, test_rank  # noqa: F401
