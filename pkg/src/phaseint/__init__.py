"""Phase-integral (WKBJ) analysis of y'' + Q(z) y = 0 around a regular singular point."""

from .budden import (ScatteringResult, comparison_sweep, exact_scattering,
                     isolated_singularity_scattering, numerical_scattering, scattering)
from .contour import ContourPath, PhaseIntegrand, bracket, integrate_ode, phase_integral
from .errors import *  # noqa: F401,F403
from .frobenius import (FrobeniusSolution, build_series, evaluate_frobenius, indicial_roots,
                        monodromy_eigenvalues)
from .monodromy import RotationMatrix, eigenstructure, numerical_monodromy, trace_relation_check
from .polynomial import StokesPolynomial
from .potential import LaurentPotential, evaluate, turning_points, wkb_validity
from .stokes import ConnectionMatrix, compose, run_script, trace_equation, trace_stokes_lines

__version__ = "0.1.0"
