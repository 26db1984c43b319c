"""Fault diagnosis of discrete-event systems under dynamic observers."""
from .automata import EPS, FAULT, U, Alphabet, Lasso, Plant, Run, epsilon_complete, masked_product
from .cost import (bounded_cost_observer, karp_max_mean, observer_cost, optimal_cost_observer,
                   run_cost, word_cost)
from .diagnosis import check_dynamic, check_static, min_k_dynamic, min_k_static
from .errors import InputError, PreconditionError, ResourceError
from .meanpayoff import WeightedGraphGame, zp_optimal_strategies, zp_value
from .observer import Observer, static_observer, validate_observer
from .synthesis import extract_observer, most_permissive_observer, mpo_membership

__version__ = "0.1.0"
