"""Algebraic entropy of systems of quad equations.

Pipeline: parse a system (``expr``), decide admissible evolution directions
(``solve``), evolve staircase initial data (``lattice``, ``poly``), fit
generating functions and classify growth (``growth``).
"""
from .expr import DSLError, QuadSystemSpec, parse_system
from .growth import (classify_isotropy, closed_form, entropy_from_fit,
                     fit_generating_function)
from .lattice import StaircaseSpec, build_range, build_staircase
from .poly import DegenerateRun, evolve_degrees, extract_sequences
from .report import Report, analyze
from .solve import Direction, NotAdmissible, admissibility_report, solve_direction

__version__ = "0.1.0"
