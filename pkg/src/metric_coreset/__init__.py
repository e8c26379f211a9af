"""Composable coresets for k-median and k-means in general metric spaces."""
from .coreset import (CoresetParams, PipelineConfig, PipelineReport, build_coreset_one_round,
                      build_coreset_two_round, continuous_mode_coreset, solve_distributed)
from .cover import (AssignmentMap, CoverParams, CoverResult, SelectionPolicy, cover_with_balls,
                    selection_policy)
from .errors import DatasetError, InvalidArgument, ResourceLimit, RoundFailure
from .metric import MetricSpace, Objective, ProblemInstance, WeightedPointSet, cost, distance, nearest
from .mr_sim import MemoryStats, Partitioning, RoundPlan, make_partitioning, run_round
from .solvers import (Solution, SolverConfig, bicriteria_seed, brute_force_opt, local_search)

__version__ = "0.1.0"
