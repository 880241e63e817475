"""Ego multi-token transfer networks: construction, centrality, backbone and time series."""
from .backbone import BackboneResult, backbone_stats, edge_significance, extract_backbone
from .centrality import (ScoreVector, aggregate, cheirank, pagerank, pctb, pctb_ut, rbo,
                         top_k)
from .community import Partition, louvain, modularity, project_undirected
from .ingest import (AddressLabel, EntityMap, TransferRecord, build_entity_map,
                     filter_transfers, load_labels, load_lines, load_transfers, parse_labels,
                     parse_transfers)
from .mtn import (MultiTokenNetwork, NodeId, build_mtn, degree_ccdf, density, network_stats,
                  transpose)
from .structure import (SccSummary, annotate_diameters, diameter_distribution,
                        scc_decomposition, scc_diameter)
from .temporal import (SnapshotSeries, ego_activity, group_centrality_series, monthly_average,
                       novelty_ratios, size_series, snapshot_series, token_pctb_series)

__version__ = "0.1.0"
