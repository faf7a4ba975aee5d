"""FA counterparts of piecewise linear fractional objectives and Algorithm FA."""
from .adversarial import ZadCurve, default_grid, zad, zad_sweep
from .algorithm import (MAX_ITER, STALLED, STEP_TOLERANCE, FaParams, FaSolveReport,
                        algorithm_fa, linearize, solve_master, solve_original)
from .counterpart import (FaValue, PieceEvaluation, PieceLp, ThetaZero, box_knapsack, fa_box_batch,
                          fa_counterpart_closed_form, fa_eigen_l1, fa_eval, fa_eval_pieces,
                          fa_piece_eval, piece_dual_value)
from .instances import (Box, DenominatorNonPositive, InstanceError, OutsideFeasibleSet,
                        PLFInstance, Polyhedron, SpecialPLFInstance, WeightedL1Norm, as_plf,
                        eval_f, expand_special, load_instance, piece_values, random_instance,
                        save_instance)
