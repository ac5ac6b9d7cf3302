"""Optimal equal-weight N-point approximation of one-dimensional laws in W_rho."""

from .distributions import (Distribution, FamilySpec, atoms, beta_one, exp_power, gaussian,
                            invert_cdf, load_tabulated, make_distribution, mixture, pareto,
                            parse_spec, tabulated, uniform)
from .quantizer import (MomentError, QuantGrid, cell_derivative, cell_edges, log_tail_grid,
                        make_grid, midpoint_grid, optimal_grid, tail_modified_grid)
from .rates import (MCResult, SweepReport, TailProfile, Verdict, classify_order,
                    explicit_bound_constant, extremal_growth, fit_order, limit_constant,
                    mc_baseline, sweep, tail_profile)
from .wasserstein import (ErrorResult, cell_lower_bound, cell_lower_bounds, error_cdf_form,
                          error_quantile_form, error_w1_closed, pair_lower_bound,
                          w_rho_discrete)

__version__ = "0.1.0"
