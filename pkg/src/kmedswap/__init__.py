"""K-medoids clustering by swap search, with K-means seeding and benchmarks."""

from .baselines import MedlloydConfig, run_medlloyd, run_pam
from .bench import BenchReport, BenchSpec, emit_report, run_benchmark
from .clarans import (
    ClaransEngine,
    EngineConfig,
    RunReport,
    StopCriterion,
    SwapProposal,
    run_clarans,
)
from .data import Dataset
from .datagen import GridGaussianSpec, SyntheticSpec, gen_grid_gaussian, gen_synthetic
from .estimators import PAM, Clarans, MedLloyd, SeededKMeans
from .io import DatasetFormatError, load_dataset, write_dataset
from .lloyd import LloydResult, run_lloyd
from .metrics import MetricSpace, distance, distance_thresholded
from .potentials import Potential, apply_potential
from .seeding import seed_bf, seed_kmpp, seed_pipeline, seed_uni
from .state import ClusterState, EmptyClusterError, cluster_medoid, rebuild_state, total_energy

__version__ = "0.1.0"

__all__ = [
    "BenchReport",
    "BenchSpec",
    "Clarans",
    "ClaransEngine",
    "ClusterState",
    "Dataset",
    "DatasetFormatError",
    "EmptyClusterError",
    "EngineConfig",
    "GridGaussianSpec",
    "LloydResult",
    "MedLloyd",
    "MedlloydConfig",
    "MetricSpace",
    "PAM",
    "Potential",
    "RunReport",
    "SeededKMeans",
    "StopCriterion",
    "SwapProposal",
    "SyntheticSpec",
    "apply_potential",
    "cluster_medoid",
    "distance",
    "distance_thresholded",
    "emit_report",
    "gen_grid_gaussian",
    "gen_synthetic",
    "load_dataset",
    "rebuild_state",
    "run_benchmark",
    "run_clarans",
    "run_lloyd",
    "run_medlloyd",
    "run_pam",
    "seed_bf",
    "seed_kmpp",
    "seed_pipeline",
    "seed_uni",
    "total_energy",
    "write_dataset",
]
