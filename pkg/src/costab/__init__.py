"""Co-slicings and co-stability conditions on homotopy categories of projectives over quiver algebras."""

from .algebra import QuiverAlgebra, preset
from .conditions import (CentralCharge, CoStabilityCondition, CoStabilityFunction, GElement, act, deform,
                         pack, unpack)
from .coslice import CoSlicing, check_axioms, check_condition_S, epsilon0, metric
from .cotstruct import CoTStructure, check_cotstructure, enumerate_cohearts, from_coheart
from .snapshot import FormalObject, IndecId, Snapshot, build_snapshot

__version__ = "0.1.0"

__all__ = [
    "QuiverAlgebra", "preset", "Snapshot", "build_snapshot", "IndecId", "FormalObject",
    "CoTStructure", "check_cotstructure", "enumerate_cohearts", "from_coheart",
    "CoSlicing", "check_axioms", "check_condition_S", "epsilon0", "metric",
    "CentralCharge", "CoStabilityFunction", "CoStabilityCondition", "GElement",
    "pack", "unpack", "deform", "act",
]
