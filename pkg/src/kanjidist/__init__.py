"""kanjidist: kanji dissimilarity by hierarchical component matching.

Distances combine the relative unbalanced ink transport between
normalized component drawings with registration penalties, matched
across all decomposition levels under per-vein constraints.
"""

from .config import EngineConfig, load_config, save_config
from .engine import Engine, ingest_directory
from .kanjivg import (
    KanjiDecomposition,
    build_decomposition,
    index_and_veins,
    parse_kanjivg,
)
from .matching import MatchParams, kanji_distance
from .metric import PsiParams, RhoParams, psi, registration_penalties
from .ubw import TransportPlan, UbwParams, relative_ubw, ubw_distance

__version__ = "0.1.0"

__all__ = [
    "EngineConfig",
    "Engine",
    "ingest_directory",
    "KanjiDecomposition",
    "build_decomposition",
    "index_and_veins",
    "parse_kanjivg",
    "MatchParams",
    "kanji_distance",
    "PsiParams",
    "RhoParams",
    "psi",
    "registration_penalties",
    "TransportPlan",
    "UbwParams",
    "relative_ubw",
    "ubw_distance",
    "load_config",
    "save_config",
    "__version__",
]
