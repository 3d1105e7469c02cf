"""Partitioning-function, growth-function and VC-dimension bounds for decision trees,
with greedy tree growth and bound-driven pruning."""

from .bounds import (
    BoundCache,
    PriorConfig,
    complexity_prior,
    error_prior,
    log_growth_func_ub,
    log_parti_func_ub,
    parti_func_ub,
    shawe_taylor_epsilon,
    stump_pf2_nominal,
    stump_pf2_ordinal,
    stump_pf2_real,
    stump_vcdim_real,
    tree_pf_nominal,
    tree_pf_ordinal,
    tree_pf_real,
    vcdim_ub,
)
from .data import Dataset, Example, FeatureLandscape, load_dataset, split_dataset
from .tree import Leaf, Node, TreeShape, parse_shape, predict, shape_of

__version__ = "0.1.0"
