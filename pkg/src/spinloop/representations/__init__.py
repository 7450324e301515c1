from .fk import FkState, SwendsenWangChain, edwards_sokal_sample
from .flows import (
    PlanarGraph,
    flow_from_height,
    flow_partition,
    fourier_weight,
    height_from_flow,
    cycle_graph,
    grid_graph,
)
from .perron import (
    SpinRepresentation,
    perron_representation,
    single_loop_identity_defect,
    spins_to_loops,
    star_graph,
    tree_representation,
)
from .dgff import dgff_covariance, dgff_sample, dgff_variance_profile
from .hardhex import HardHexagonChain, TriangularTorusPatch

__all__ = [
    "FkState",
    "SwendsenWangChain",
    "edwards_sokal_sample",
    "PlanarGraph",
    "flow_from_height",
    "flow_partition",
    "fourier_weight",
    "height_from_flow",
    "cycle_graph",
    "grid_graph",
    "SpinRepresentation",
    "perron_representation",
    "single_loop_identity_defect",
    "spins_to_loops",
    "star_graph",
    "tree_representation",
    "dgff_covariance",
    "dgff_sample",
    "dgff_variance_profile",
    "HardHexagonChain",
    "TriangularTorusPatch",
]
