"""Penetration and resonant absorption for y'' + (1 + c/z) y = 0.

Boundary condition: only the outgoing wave y ~ (0, z) survives as z -> +inf;
the solution is continued to z -> -inf through the lower half plane, where it
splits into incident and reflected waves.
"""

from __future__ import annotations

import math
import warnings
from dataclasses import dataclass

import numpy as np

from .contour import DEFAULT_TOL_ODE, ContourPath, integrate_ode, wkb_basis_at
from .errors import ProjectionError, ValidityWarning
from .frobenius import indicial_roots
from .potential import LaurentPotential, wkb_validity
from .stokes import budden_rotation_matrix, solve_budden_modulus, trace_equation

METHODS = ("exact_trace", "isolated_singularities", "numerical_oracle")
DEFAULT_RADIUS = 200.0
DEFAULT_VALIDITY_TOL = 1e-3


@dataclass(frozen=True)
class ScatteringResult:
    c: float
    R: complex
    T: complex
    A: float
    method: str
    phase_known: bool

    @classmethod
    def from_amplitudes(cls, c, R, T, method, phase_known) -> "ScatteringResult":
        if method not in METHODS:
            raise ValueError(f"unknown method {method!r}")
        R, T = complex(R), complex(T)
        A = 1.0 - abs(R) ** 2 - abs(T) ** 2
        return cls(float(c), R, T, A, method, phase_known)

    def to_json(self) -> dict:
        out = {"c": self.c, "A": self.A, "method": self.method, "phase_known": self.phase_known}
        if self.phase_known:
            out["R"] = [self.R.real, self.R.imag]
            out["T"] = [self.T.real, self.T.imag]
        else:
            out["abs_R"] = abs(self.R)
            out["abs_T"] = abs(self.T)
        return out


def _check_c(c: float) -> float:
    c = float(c)
    if not c > 0:
        raise ValueError(f"Budden parameter must be positive, got c={c}")
    return c


def exact_absorption(c: float) -> float:
    """Closed form e^{-pi c}(1 - e^{-pi c})."""
    x = math.exp(-math.pi * _check_c(c))
    return x * (1.0 - x)


def isolated_absorption(c: float) -> float:
    """Closed form 4 e^{pi c} / (1 + 2 e^{pi c})^2."""
    e = math.exp(math.pi * _check_c(c))
    return 4 * e / (1 + 2 * e) ** 2


def exact_scattering(c: float, phase_factor: complex | None = None) -> ScatteringResult:
    """|R|, T and A from the trace relation of the symbolic loop plus s+ = -conj(s-).

    ``phase_factor`` is the bracket [0, -c] below the cut; it defaults to its
    closed form e^{pi c/2}.  The phase of R stays undetermined.
    """
    c = _check_c(c)
    E = math.exp(math.pi * c / 2) if phase_factor is None else phase_factor
    f1, _ = indicial_roots(0)
    eq = trace_equation(budden_rotation_matrix(), f1)
    s_abs = math.sqrt(solve_budden_modulus(eq, {"E": E}))
    R = s_abs                   # R = -s-, modulus only
    T = 1.0 / E                 # T = e^{-pi c/2}
    return ScatteringResult.from_amplitudes(c, R, T, "exact_trace", False)


def isolated_singularity_scattering(c: float) -> ScatteringResult:
    """Approximation of isolated singularities (full complex R and T)."""
    c = _check_c(c)
    up, down = math.exp(math.pi * c / 2), math.exp(-math.pi * c / 2)
    denom = 2 * up + down
    R = -1j * (2 * up - down) / denom
    T = -1j * 2 / denom
    return ScatteringResult.from_amplitudes(c, R, T, "isolated_singularities", True)


def numerical_scattering(c: float, radius: float = DEFAULT_RADIUS,
                         tol: float = DEFAULT_VALIDITY_TOL, tol_ode: float = DEFAULT_TOL_ODE,
                         standoff: float | None = None, max_cond: float = 1e8) -> ScatteringResult:
    """Scattering from direct integration of the ODE below the real axis.

    Seeds the outgoing wave (0, z) at z = +radius, integrates along
    +r -> +r - id -> -r - id -> -r and projects onto ((-c, z), (z, -c)) at
    z = -radius.  With these anchors R equals -s- including its phase.
    """
    c = _check_c(c)
    p = LaurentPotential.budden(c)
    d = max(1.0, c) if standoff is None else standoff
    if radius <= 2 * c:
        raise ValueError(f"radius {radius} too small for c={c}")
    for z in (radius, -radius):
        eps = wkb_validity(p, z)
        if eps > tol:
            warnings.warn(f"wkb validity {eps:.2e} exceeds {tol:g} at z={z}", ValidityWarning,
                          stacklevel=2)

    yp, _, dyp, _ = wkb_basis_at(p, 0.0, radius, ContourPath.line(0.0, radius))
    path = ContourPath.polyline([radius, radius - 1j * d, -radius - 1j * d, -radius])
    y, dy = integrate_ode(p, path, (yp, dyp), tol=tol_ode)

    up, um, dup, dum = wkb_basis_at(p, -c, -radius, ContourPath.line(-c, -radius))
    basis = np.array([[up, um], [dup, dum]])
    cond = np.linalg.cond(basis)
    if not np.isfinite(cond) or cond > max_cond:
        raise ProjectionError(f"WKB basis at z={-radius} has condition number {cond:.3g}")
    incident, reflected = np.linalg.solve(basis, np.array([y, dy]))
    return ScatteringResult.from_amplitudes(c, reflected / incident, 1.0 / incident,
                                            "numerical_oracle", True)


def scattering(c: float, method: str, **kwargs) -> ScatteringResult:
    if method in ("exact", "exact_trace"):
        return exact_scattering(c)
    if method in ("isolated", "isolated_singularities"):
        return isolated_singularity_scattering(c)
    if method in ("numerical", "numerical_oracle"):
        return numerical_scattering(c, **kwargs)
    raise ValueError(f"unknown method {method!r}")


def comparison_sweep(c_min: float, c_max: float, n: int, numerical: bool = False,
                     **numerical_kwargs) -> list[dict]:
    """Rows (c, A_exact, A_isolated, A_numerical) on a linear grid."""
    if not (0 < c_min < c_max):
        raise ValueError(f"need 0 < c_min < c_max, got {c_min}, {c_max}")
    if n < 2:
        raise ValueError("need n >= 2")
    rows = []
    for c in np.linspace(c_min, c_max, n):
        c = float(c)
        rows.append({
            "c": c,
            "A_exact": exact_scattering(c).A,
            "A_isolated": isolated_singularity_scattering(c).A,
            "A_numerical": numerical_scattering(c, **numerical_kwargs).A if numerical else None,
        })
    return rows
