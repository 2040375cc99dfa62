"""Computational checks of the Landau-Ginzburg picture for Fano complete intersections.

For X of degrees (d_1, ..., d_k) in P^N the package builds the Givental-type
Laurent polynomial f_X, locates its torus critical points, certifies the
non-central ones as ordinary double points, compares the critical values with
the spectrum of quantum multiplication by c_1, and matches the constant-term
period sequence against the closed-form quantum period.
"""
from .critical import SolverConfig, locate_critical_points, newton_refine, probe_random, symmetric_critical_points
from .hessian import build_chart_polynomial, certify_odp, closed_form_matrix, easy_lemma_det, extract_quadratic_matrix
from .laurent import LaurentPoly, parse_poly, format_poly
from .model import CIModel, build_givental, invariants, make_model, parse_descriptor
from .periods import compare_periods, givental_coefficients, period_sequence
from .report import RunConfig, run_corpus, run_report
from .spectrum import c1_spectrum, companion_matrix, match_spectrum

__version__ = "0.1.0"
