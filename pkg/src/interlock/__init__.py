"""Partitioned network centrality: how a subset's ranking sits inside the whole."""

from .centrality import (
    MEASURES,
    CentralityVector,
    Measure,
    betweenness_centrality,
    centrality_at_scope,
    closeness_centrality,
    degree_centrality,
    eigenvector_centrality,
)
from .graph import (
    DisconnectedGraphError,
    Graph,
    GraphError,
    build_graph,
    connected_components,
    extract_giant,
    induced_subgraph,
)
from .ingest import IngestError, load_dataset
from .rankcompare import (
    EmbeddednessRecord,
    embeddedness_report,
    kendall_tau,
    persistence,
    rank_with_ties,
    ranking_dominance,
    spearman,
    top_k_overlap,
)
from .synth import SyntheticSpec, generate
from .topology import distance_distribution, eccentricity_all, partition_table, topology_report

__version__ = "0.1.0"
