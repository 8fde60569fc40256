"""Temporal clustering and cluster-transition analysis of country
disaster-risk indicators.

The library covers the whole workflow: panel CSV ingestion with
validation, z-score outlier detection, KMeans clustering of the numeric
indicators, graph-based semi-supervised label spreading, four classifier
families evaluated on 1/3/5-year temporal splits, and cluster
stay/shift probabilities.  ``riskdynamics.pipeline.run_pipeline`` (or
the ``riskdynamics`` CLI) wires the stages together.
"""

from .data import (
    CountryYearRecord,
    Dataset,
    Horizon,
    LoadResult,
    SchemaConfig,
    SplitSpec,
    load_dataset,
    record_features,
    temporal_split,
    write_csv,
)
from .horizons import ClassifierConfigs, HorizonResult, run_horizon_experiment
from .kmeans import ClusterModel, KMeansConfig, assign, kmeans_fit, select_k
from .metrics import (
    ClusterValidityReport,
    ConfusionMatrix2,
    accuracy,
    auc,
    calinski_harabasz,
    cluster_validity,
    confusion,
    davies_bouldin,
    silhouette,
)
from .pca import PcaModel, pca_fit, pca_inverse_transform, pca_transform
from .pipeline import PipelineConfig, RunManifest, derive_seed, run_pipeline
from .preprocess import (
    EncodingConfig,
    FeatureEncoder,
    FeatureMatrix,
    OutlierConfig,
    OutlierReport,
    StandardizationParams,
    detect_outliers,
    encode_features,
    fit_encoder,
    indicator_matrix,
    standardize,
    zscore,
)
from .spreading import (
    AffinityGraph,
    SpreadConfig,
    TransductionResult,
    build_knn_graph,
    hide_labels,
    spread,
    transduce_full,
)
from .synthetic import make_synthetic_panel
from .transitions import (
    CountryTrajectory,
    TransitionReport,
    build_transition_report,
    country_trajectories,
    terminal_transitions,
    transition_matrix,
    transition_probability,
)

__version__ = "0.1.0"
