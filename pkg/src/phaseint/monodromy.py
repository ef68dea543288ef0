"""Numerical 2*pi-rotation (monodromy) matrices and the trace relation."""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass

import numpy as np
import scipy.linalg

from .contour import DEFAULT_TOL_ODE, ContourPath, integrate_ode
from .errors import ContourError, SingularPointError
from .frobenius import FrobeniusSolution, evaluate_frobenius, indicial_roots
from .potential import LaurentPotential, wkb_validity

DEFAULT_MONODROMY_TOL = 1e-12
COINCIDENCE_TOL = 1e-8
DEFECT_TOL = 1e-6


@dataclass(frozen=True)
class RotationMatrix:
    """Maps (y, y') data at ``base_point`` to the data after one loop."""

    entries: np.ndarray
    basis: str = "canonical"
    contour: ContourPath | None = None
    base_point: complex | None = None

    @property
    def trace(self) -> complex:
        return complex(np.trace(self.entries))

    @property
    def det(self) -> complex:
        return complex(np.linalg.det(self.entries))


def numerical_monodromy(p: LaurentPotential, contour: ContourPath, base_point: complex | None = None,
                        tol: float = DEFAULT_MONODROMY_TOL) -> RotationMatrix:
    """Continue the canonical (y, y') basis around ``contour``."""
    if not contour.is_closed:
        raise ContourError("monodromy contour must be closed")
    base = contour.start if base_point is None else complex(base_point)
    if abs(contour.start - base) > 1e-12 * max(1.0, abs(base)):
        raise ContourError(f"contour starts at {contour.start}, not at base point {base}")
    cols = [integrate_ode(p, contour, init, tol=tol) for init in ((1, 0), (0, 1))]
    m = np.array(cols, dtype=complex).T
    return RotationMatrix(m, "(y, y') at base point", contour, base)


def circle_monodromy(p: LaurentPotential, radius: float, base_point: complex | None = None,
                     tol: float = DEFAULT_MONODROMY_TOL) -> RotationMatrix:
    """Counterclockwise loop about the origin through ``base_point`` (default z = radius)."""
    if base_point is None:
        base_point = complex(radius)
    base_point = complex(base_point)
    contour = ContourPath.circle(0, abs(base_point), cmath.phase(base_point))
    return numerical_monodromy(p, contour, contour.start, tol)


def trace_relation_check(m: RotationMatrix, f1: complex) -> complex:
    """Tr(m) - 2 cos(2 pi f1)."""
    return m.trace - 2 * cmath.cos(2 * math.pi * complex(f1))


def eigenstructure(m: RotationMatrix, f1: complex | None = None):
    """(lambda1, lambda2, diagonalizable).

    With ``f1`` the eigenvalues are assigned to exp(+-2 pi i f1) by nearest
    distance.  Near-coincident eigenvalues are detected through the
    discriminant tr^2 - 4 det, which for a defective matrix is perturbed
    linearly (the eigenvalues themselves only as its square root).
    """
    a = m.entries
    lam = np.linalg.eigvals(a)
    if f1 is not None:
        target = cmath.exp(2j * math.pi * complex(f1))
        d0, d1 = abs(lam[0] - target), abs(lam[1] - target)
        if d1 < d0:
            lam = lam[::-1]
    l1, l2 = complex(lam[0]), complex(lam[1])
    disc = np.trace(a) ** 2 - 4 * np.linalg.det(a)
    if abs(disc) > COINCIDENCE_TOL:
        return l1, l2, True
    t, _ = scipy.linalg.schur(a.astype(complex), output="complex")
    return l1, l2, bool(abs(t[0, 1]) <= DEFECT_TOL)


def frobenius_frame(s: FrobeniusSolution, z: complex, sheet: int | None = None) -> np.ndarray:
    """Columns are (y, y') of y1 and y2 at z."""
    c1 = evaluate_frobenius(s, (1, 0), z, sheet)
    c2 = evaluate_frobenius(s, (0, 1), z, sheet)
    return np.array([c1, c2], dtype=complex).T


def in_frobenius_basis(m: RotationMatrix, s: FrobeniusSolution) -> np.ndarray:
    """Monodromy expressed on (y1, y2); expected [[l, 2 pi i K l], [0, l]] when f1-f2 is an integer."""
    phi = frobenius_frame(s, m.base_point)
    return np.linalg.solve(phi, m.entries @ phi)


def expected_frobenius_monodromy(s: FrobeniusSolution) -> np.ndarray:
    l1 = cmath.exp(2j * math.pi * s.f1)
    if s.resonance is None:
        return np.diag([l1, cmath.exp(2j * math.pi * s.f2)])
    return np.array([[l1, 2j * math.pi * s.K * l1], [0, l1]])


@dataclass(frozen=True)
class ClusterReport:
    matrix: RotationMatrix
    f1: complex
    residual: complex
    max_validity: float


def cluster_report(p: LaurentPotential, contour: ContourPath, q_minus_2: complex | None = None,
                   n_samples: int = 256, tol: float = DEFAULT_MONODROMY_TOL) -> ClusterReport:
    """Trace-relation residual around a cluster, plus the largest |eps| seen on the contour.

    Whether the contour lies far enough from the cluster for the asymptotic
    Stokes constants to be meaningful is left to the caller; ``max_validity``
    is the evidence.
    """
    m = numerical_monodromy(p, contour, tol=tol)
    q2 = p.laurent_coefficient(-2) if q_minus_2 is None else q_minus_2
    f1, _ = indicial_roots(q2)
    worst = 0.0
    for z in contour.points(n_samples):
        try:
            worst = max(worst, wkb_validity(p, z))
        except SingularPointError:
            worst = math.inf
    return ClusterReport(m, f1, trace_relation_check(m, f1), worst)
