"""Willingness-maximizing social group selection."""

from .errors import (EmptyCandidateError, GroupwillError, InfeasibleError,
                     InfeasibleStartError, InvalidMemberError, ScaleGuardError)
from .graph import (NodeRecord, SocialGraph, Solution, WeightMode, build_graph,
                    frontier, is_connected, load_graph, solution_for,
                    willingness)
from .oracle import brute_force, brute_force_dis, connected_subsets
from .sampling import SampleVector, expand_uniform, expand_weighted, sample_batch
from .scenarios import (add_virtual_node, apply_lambda_profile, mark_foe,
                        merge_couple, solve_waso_dis)
from .solvers import (SolverConfig, StartNodeStats, allocate_budget, cbas,
                      cbas_nd, dgreedy, gaussian_exceed_probability,
                      init_selection_probability, online_replan, rgreedy,
                      select_start_nodes, smooth, solve, stage_count,
                      update_selection_probability)

__version__ = "0.1.0"
