"""Dynamic-graph link prediction: snapshot GCN + walk-GRU global encoder,
cross-attention fusion, and state-space gradient updates."""

from ._core import (
    ConfigError,
    DataError,
    Graph,
    MetricsReport,
    ModelConfig,
    ModelParams,
    NumericError,
    TrainConfig,
    Trainer,
    TrainResult,
    WalkCache,
    build_walk_cache,
    dynamic_weight,
    generate_synthetic,
    hippo_matrix,
    load_checkpoint,
    load_graph,
    save_checkpoint,
)

__all__ = [
    "ConfigError",
    "DataError",
    "Graph",
    "MetricsReport",
    "ModelConfig",
    "ModelParams",
    "NumericError",
    "TrainConfig",
    "Trainer",
    "TrainResult",
    "WalkCache",
    "build_walk_cache",
    "dynamic_weight",
    "generate_synthetic",
    "hippo_matrix",
    "load_checkpoint",
    "load_graph",
    "save_checkpoint",
]
