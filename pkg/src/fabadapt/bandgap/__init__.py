"""Toy bandgap design: eigenproblem families, reductions, linear relaxations, optimizers."""
from .family import (EigenFamily, FamilyError, gap_midgap, load_family, random_toy_family,
                     save_family)
from .optimize import (BandgapParams, BandgapTrace, GapClosed, LfpResult, bandgap_optimize,
                       bandgap_zad, bandgap_zad_sweep, fa_bandgap_optimize, lfp_solve, DcgOutcome,
                       solve_with_dcg, surrogate_instance)
from .reduction import BandWindow, ReducedOperators, reduce_operators
from .relaxation import (ApproxVectors, CombinatorialLimit, DegenerateVector, LfpData, Violation,
                         build_linear_inequalities, check_sdp_inclusions, cross_polytope_count,
                         cross_polytope_vectors, max_violation)
