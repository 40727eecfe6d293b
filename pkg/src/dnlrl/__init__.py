"""Interpretable reinforcement learning with differentiable neural logic.

Policies are disjunctions of conjunctions over trainable boundary
predicates; training uses discrete soft actor-critic (or the bundled
baselines) and the learned policy prints as first-order-logic rules.
"""

__version__ = "0.1.0"

from .autograd import Tensor
from .errors import (ConfigurationError, DimensionMismatchError, DnlrlError,
                     NumericError, SchemaMismatchError)
from .kernels import backend_name
from .logic import DnlNetwork, neural_conjunction, neural_disjunction
from .policy import DnlPolicy, sample_action
from .predicates import (FeatureSchema, PredicateBank, TransformKB,
                         build_input_matrix, eval_gt, eval_lt, init_equal_width)
from .rules import ExtractedRule, crisp_evaluate, extract_policy, format_policy

__all__ = [
    "Tensor", "DnlNetwork", "DnlPolicy", "FeatureSchema", "PredicateBank",
    "TransformKB", "ExtractedRule", "ConfigurationError",
    "DimensionMismatchError", "DnlrlError", "NumericError",
    "SchemaMismatchError", "backend_name", "build_input_matrix",
    "crisp_evaluate", "eval_gt", "eval_lt", "extract_policy", "format_policy",
    "init_equal_width", "neural_conjunction", "neural_disjunction",
    "sample_action", "__version__",
]
