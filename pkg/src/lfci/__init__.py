"""Causal structure discovery with local conditional-independence tests.

Mixed ancestral graphs, m-separation, local-graph separators, latent
projection, linear Gaussian structural equation models, CI testers, and the
constraint-based learners built on them (local FCI and baselines).
"""

from ._kernels import backend_name
from .citest import GaussOracle, GraphOracle, SampleTest, sample_covariance
from .discovery import fci, lfci, lfci_mb, pc
from .mixed_graph import (
    CIRCLE,
    HEAD,
    TAIL,
    Edge,
    GraphClass,
    Mark,
    MixedGraph,
    parse_graph,
    serialize_graph,
)
from .projection import Partition, latent_project, true_pag

__version__ = "0.1.0"

__all__ = [
    "CIRCLE",
    "HEAD",
    "TAIL",
    "Edge",
    "GaussOracle",
    "GraphClass",
    "GraphOracle",
    "Mark",
    "MixedGraph",
    "Partition",
    "SampleTest",
    "backend_name",
    "fci",
    "latent_project",
    "lfci",
    "lfci_mb",
    "parse_graph",
    "pc",
    "sample_covariance",
    "serialize_graph",
    "true_pag",
    "__version__",
]
