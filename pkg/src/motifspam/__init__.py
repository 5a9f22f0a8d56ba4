"""Egocentric network motif profiling of user/video comment networks."""

from .canon import Color, MotifId
from .ingest import CleanComment, IngestConfig, RawComment, normalize, parse_comments, select_window
from .motif import (
    ColoredGraph,
    EgoNetwork,
    MotifFilter,
    MotifProfile,
    canonical_id,
    enumerate_motifs,
    extract_ego_network,
    motif_universe,
    network_census,
    oracle_census,
)
from .netgen import (
    CommentNetwork,
    NetgenConfig,
    build_network,
    jaccard_distance,
    label_spam_users,
    prune_single_video_users,
    shingle,
)
from .profile import ProfileMatrix, normalize_profile, pca_2d, ratio_profile, two_motif_plot

__version__ = "0.1.0"
