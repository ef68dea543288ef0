"""Frobenius-form solutions of y'' + Q(z) y = 0 about z = 0.

With P(z) = z**2 Q(z) = sum_j p_j z**j and I(s) = s(s-1) + p_0,

    y1 = z**f1 sum a_n z**n,     a_n I(n+f1) = -sum_{j=1..n} p_j a_{n-j}
    y2 = z**f2 sum b_n z**n + K log(z) y1,

where the log term contributes K (2(n-m+f1) - 1) a_{n-m} at order z**(f2+n),
m = f1 - f2.  When m is a nonnegative integer, K is fixed at the resonant
order n = m (or set to 1 when m = 0); b_m itself is a free gauge and is set to 0.
"""

from __future__ import annotations

import cmath
import math
import warnings
from dataclasses import dataclass

import numpy as np

from .errors import BranchCutError, ConvergenceRadiusError, NotRegularSingularError
from .potential import LaurentPotential

DEFAULT_ORDER = 64
SAFETY = 0.8
INTEGER_TOL = 1e-10


@dataclass(frozen=True)
class FrobeniusSolution:
    f1: complex
    f2: complex
    a: tuple
    b: tuple
    K: complex
    N: int
    convergence_radius: float
    resonance: int | None = None  # f1 - f2 when it is a nonnegative integer

    def y1_coefficients(self) -> np.ndarray:
        return np.asarray(self.a, dtype=complex)

    def y2_coefficients(self) -> np.ndarray:
        return np.asarray(self.b, dtype=complex)


def _order_roots(r1: complex, r2: complex) -> tuple[complex, complex]:
    if (r1.real, r1.imag) >= (r2.real, r2.imag):
        return r1, r2
    return r2, r1


def indicial_roots(q_minus_2: complex) -> tuple[complex, complex]:
    """Roots of f(f-1) + Q_{-2} = 0, larger real part first."""
    d = cmath.sqrt(1 - 4 * complex(q_minus_2))
    return _order_roots((1 + d) / 2, (1 - d) / 2)


def monodromy_eigenvalues(q_minus_2: complex) -> tuple[complex, complex]:
    """(exp(2 pi i f1), exp(-2 pi i f1)) for the index f1 with larger real part."""
    f1, _ = indicial_roots(q_minus_2)
    return cmath.exp(2j * math.pi * f1), cmath.exp(-2j * math.pi * f1)


def _near_int(x: complex) -> int | None:
    n = round(x.real)
    if abs(x - n) <= INTEGER_TOL * max(1.0, abs(x)):
        return int(n)
    return None


def build_series(p: LaurentPotential, N: int = DEFAULT_ORDER) -> FrobeniusSolution:
    """Coefficients of the Frobenius pair about the origin, up to order N."""
    if N < 1:
        raise ValueError("truncation order N must be >= 1")
    if p.pole_order_at_origin() > 2:
        raise NotRegularSingularError(
            f"pole of order {p.pole_order_at_origin()} at 0 is irregular"
        )
    # p_j = coefficient of z**j in z**2 Q
    pj = np.zeros(N + 1, dtype=complex)
    for c, k in p.terms:
        if 0 <= k + 2 <= N:
            pj[k + 2] = c
    p0 = pj[0]
    f1, f2 = indicial_roots(p0)

    def I(s):
        return s * (s - 1) + p0

    a = np.zeros(N + 1, dtype=complex)
    a[0] = 1.0
    for n in range(1, N + 1):
        a[n] = -np.dot(pj[1:n + 1], a[n - 1::-1][:n]) / I(n + f1)

    m = _near_int(f1 - f2)
    resonance = m if (m is not None and m >= 0) else None
    b = np.zeros(N + 1, dtype=complex)
    b[0] = 1.0
    K = 0j
    if resonance is None:
        for n in range(1, N + 1):
            b[n] = -np.dot(pj[1:n + 1], b[n - 1::-1][:n]) / I(n + f2)
    else:
        f2 = f1 - resonance  # snap to the exact resonant pair
        if resonance == 0:
            K = 1.0 + 0j
        for n in range(1, N + 1):
            acc = np.dot(pj[1:n + 1], b[n - 1::-1][:n])
            if n == resonance:
                K = -acc / resonance
                b[n] = 0.0
                continue
            if n > resonance or resonance == 0:
                acc += K * a[n - resonance] * (2 * (n - resonance + f1) - 1)
            b[n] = -acc / I(n + f2)

    return FrobeniusSolution(
        f1=complex(f1),
        f2=complex(f2),
        a=tuple(complex(x) for x in a),
        b=tuple(complex(x) for x in b),
        K=complex(K),
        N=N,
        convergence_radius=_convergence_radius(p),
        resonance=resonance,
    )


def _convergence_radius(p: LaurentPotential) -> float:
    others = [abs(loc) for loc, _ in p.poles if loc != 0]
    return min(others) if others else math.inf


def _log(z: complex, sheet: int | None) -> complex:
    on_cut = z.real < 0 and abs(z.imag) <= 1e-14 * abs(z)
    if sheet is None:
        if on_cut:
            raise BranchCutError(f"z={z} lies on the cut (negative real axis); pass a sheet")
        sheet = 0
    arg = cmath.phase(z)
    if on_cut:
        arg = math.pi  # sheet k covers arguments in (-pi, pi] + 2 pi k
    return complex(math.log(abs(z)), arg + 2 * math.pi * sheet)


def _series(coef: np.ndarray, f: complex, z: complex, logz: complex):
    n = np.arange(coef.size)
    zn = z ** n
    s = np.dot(coef, zn)
    ds = np.dot(coef * (n + f), zn) / z
    zf = cmath.exp(f * logz)
    return zf * s, zf * ds, abs(coef[-1] * zn[-1]) / max(np.abs(coef * zn).max(), 1e-300)


def evaluate_frobenius(
    s: FrobeniusSolution,
    weights: tuple[complex, complex],
    z: complex,
    sheet: int | None = None,
    safety: float = SAFETY,
) -> tuple[complex, complex]:
    """Value and derivative of A y1 + B y2 at z.

    ``sheet`` selects arg(z) in (-pi, pi] + 2 pi sheet; it is required on
    the negative real axis.
    """
    A, B = (complex(w) for w in weights)
    z = complex(z)
    if A == 0 and B == 0:
        return 0j, 0j
    if z == 0:
        raise ConvergenceRadiusError("z = 0 is the singular point itself")
    if abs(z) > safety * s.convergence_radius:
        raise ConvergenceRadiusError(
            f"|z|={abs(z):g} exceeds {safety} x radius {s.convergence_radius:g}"
        )
    logz = _log(z, sheet)
    y1, dy1, tail1 = _series(s.y1_coefficients(), s.f1, z, logz)
    y, dy, tail = A * y1, A * dy1, tail1
    if B != 0:
        u, du, tail2 = _series(s.y2_coefficients(), s.f2, z, logz)
        y2 = u + s.K * logz * y1
        dy2 = du + s.K * (y1 / z + logz * dy1)
        y, dy, tail = y + B * y2, dy + B * dy2, max(tail1, tail2)
    if tail > 1e-10:
        warnings.warn(
            f"Frobenius series truncated at N={s.N} is not converged at z={z} "
            f"(last-term ratio {tail:.2e})",
            RuntimeWarning,
            stacklevel=2,
        )
    return complex(y), complex(dy)


def series_residual(p: LaurentPotential, s: FrobeniusSolution, z: complex) -> complex:
    """y1'' + Q y1 for the truncated y1 at z (principal branch)."""
    a = s.y1_coefficients()
    n = np.arange(a.size)
    f = s.f1
    z = complex(z)
    zf = cmath.exp(f * cmath.log(z))
    y = zf * np.dot(a, z ** n)
    d2 = zf * np.dot(a * (n + f) * (n + f - 1), z ** (n - 2.0))
    return complex(d2 + p.evaluate(z) * y)
