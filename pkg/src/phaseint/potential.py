"""Finite Laurent potentials Q(z) = sum_k c_k z**k.

All poles sit at the origin; the zeros of Q are the turning points.
"""

from __future__ import annotations

import json
import re
from dataclasses import dataclass, field
from functools import cached_property
from typing import Iterable, Mapping

import numpy as np

from .errors import PoleError, RootFindingError, SingularPointError

DEFAULT_POLE_EPS = 1e-9
DEFAULT_TOL_ROOT = 1e-9


def _scaled(tol, z):
    return tol * max(1.0, abs(z))


@dataclass(frozen=True)
class LaurentPotential:
    """Q(z) as a finite sum of integer powers of z.

    Parameters
    ----------
    terms : mapping or iterable of (coefficient, exponent)
        Duplicate exponents are summed; zero coefficients are dropped.
    description : str
        Free-form label used in reports.
    """

    terms: tuple = ()
    description: str = ""
    pole_eps: float = field(default=DEFAULT_POLE_EPS, compare=False)
    tol_root: float = field(default=DEFAULT_TOL_ROOT, compare=False)

    def __post_init__(self):
        raw = self.terms
        if isinstance(raw, Mapping):
            raw = [(c, k) for k, c in raw.items()]
        merged: dict[int, complex] = {}
        for c, k in raw:
            if int(k) != k:
                raise ValueError(f"non-integer exponent {k!r}")
            k = int(k)
            merged[k] = merged.get(k, 0) + c
        clean = tuple(
            (complex(c), k) for k, c in sorted(merged.items()) if c != 0
        )
        object.__setattr__(self, "terms", clean)

    # -- constructors -----------------------------------------------------

    @classmethod
    def budden(cls, c: complex) -> "LaurentPotential":
        """Q(z) = 1 + c/z."""
        return cls(((1.0, 0), (c, -1)), description=f"budden(c={c})")

    @classmethod
    def parse(cls, text: str, **kwargs) -> "LaurentPotential":
        """Parse ``"1 + 2.5*z^-1"`` style text or the JSON term form."""
        stripped = text.strip()
        if stripped.startswith("{"):
            return cls.from_json(json.loads(stripped), **kwargs)
        return cls(_parse_terms(stripped), description=stripped, **kwargs)

    @classmethod
    def from_json(cls, obj: dict, **kwargs) -> "LaurentPotential":
        terms = []
        for t in obj["terms"]:
            c = t["c"]
            coef = complex(c[0], c[1]) if isinstance(c, (list, tuple)) else complex(c)
            terms.append((coef, int(t["k"])))
        return cls(tuple(terms), description=obj.get("description", ""), **kwargs)

    def to_json(self) -> dict:
        return {
            "terms": [{"c": [c.real, c.imag], "k": k} for c, k in self.terms],
            "description": self.description,
        }

    # -- structure --------------------------------------------------------

    @property
    def coefficients(self) -> dict[int, complex]:
        return {k: c for c, k in self.terms}

    @property
    def min_exponent(self) -> int:
        return self.terms[0][1] if self.terms else 0

    @property
    def max_exponent(self) -> int:
        return self.terms[-1][1] if self.terms else 0

    @property
    def poles(self) -> list[tuple[complex, int]]:
        """[(location, order)]; at most one pole, at the origin."""
        if self.terms and self.min_exponent < 0:
            return [(0j, -self.min_exponent)]
        return []

    def pole_order_at_origin(self) -> int:
        return max(0, -self.min_exponent) if self.terms else 0

    def is_constant(self) -> bool:
        return all(k == 0 for _, k in self.terms)

    def derivative(self, n: int = 1) -> "LaurentPotential":
        terms = []
        for c, k in self.terms:
            factor = 1
            for j in range(n):
                factor *= k - j
            if factor:
                terms.append((c * factor, k - n))
        return LaurentPotential(tuple(terms), f"d^{n}/dz^{n} {self.description}")

    # -- evaluation -------------------------------------------------------

    def __call__(self, z):
        return self.evaluate(z)

    def evaluate(self, z: complex) -> complex:
        """Q(z); raises PoleError within ``pole_eps`` of a pole."""
        z = complex(z)
        for loc, _ in self.poles:
            if abs(z - loc) <= _scaled(self.pole_eps, z):
                raise PoleError(f"z={z} coincides with pole at {loc}")
        return complex(self.evaluate_array(np.asarray(z)))

    def evaluate_array(self, z):
        """Vectorised Q(z) without pole checks (Horner in z and 1/z)."""
        z = np.asarray(z, dtype=complex)
        coeffs = self.coefficients
        if not coeffs:
            return np.zeros_like(z)
        lo, hi = self.min_exponent, self.max_exponent
        pos = np.zeros_like(z)
        for k in range(hi, max(lo, 0) - 1, -1):
            pos = pos * z + coeffs.get(k, 0)
        if lo >= 0:
            return pos * z ** lo if lo > 0 else pos
        # negative powers: Horner in w = 1/z over exponents -1 .. lo
        w = 1.0 / z
        neg = np.zeros_like(z)
        for k in range(lo, 0):
            neg = neg * w + coeffs.get(k, 0)
        neg = neg * w
        if hi < 0:
            return neg
        return pos + neg

    def laurent_coefficient(self, k: int) -> complex:
        return self.coefficients.get(k, 0j)

    # -- turning points ---------------------------------------------------

    def _polynomial(self) -> np.ndarray:
        """Coefficients (highest first) of z**(-min_k) Q(z)."""
        lo, hi = self.min_exponent, self.max_exponent
        coeffs = self.coefficients
        return np.array([coeffs.get(k, 0j) for k in range(hi, lo - 1, -1)])

    @cached_property
    def zeros(self) -> tuple[complex, ...]:
        if not self.terms:
            raise RootFindingError("Q is identically zero")
        lo = self.min_exponent
        roots = []
        if self.max_exponent > lo:
            roots = [self._polish(r) for r in np.roots(self._polynomial())]
        for r in roots:
            resid = abs(self.evaluate_array(np.asarray(r)))
            if resid > self.tol_root * max(self.local_scale(r), 1.0):
                raise RootFindingError(
                    f"root near {r} not resolved to tol_root={self.tol_root} (|Q|={resid:.3g})"
                )
        roots += [0j] * max(lo, 0)
        roots.sort(key=lambda r: (round(r.real, 12), round(r.imag, 12)))
        return tuple(complex(r) for r in roots)

    def local_scale(self, z: complex) -> float:
        """sum_k |c_k| |z|^k, the natural magnitude for residuals of Q at z."""
        return float(sum(abs(c) * abs(z) ** k for c, k in self.terms))

    def _polish(self, r: complex, iters: int = 8) -> complex:
        poly = self._polynomial()
        dpoly = np.polyder(poly)
        for _ in range(iters):
            d = np.polyval(dpoly, r)
            if abs(d) < 1e-8 * max(1.0, np.abs(poly).max()):
                break  # multiple root; Newton converges poorly, keep np.roots value
            step = np.polyval(poly, r) / d
            r = r - step
            if abs(step) <= 1e-16 * max(1.0, abs(r)):
                break
        return complex(r)

    def singular_points(self) -> list[complex]:
        """Distinct zeros and poles of Q."""
        pts: list[complex] = [loc for loc, _ in self.poles]
        for r in self.zeros:
            if all(abs(r - p) > 1e-9 * max(1.0, abs(r)) for p in pts):
                pts.append(r)
        return pts

    def zero_order(self, z0: complex, rel: float = 1e-7) -> int:
        """Multiplicity of z0 as a zero of Q (0 if z0 is not a zero)."""
        d = self
        for order in range(16):
            val = abs(d.evaluate_array(np.asarray(complex(z0))))
            if val > rel * max(d.local_scale(z0), 1e-300):
                return order
            d = d.derivative()
        return 16

    def __str__(self):
        if not self.terms:
            return "0"
        return " + ".join(f"({c.real:g}{c.imag:+g}j)*z^{k}" for c, k in self.terms)


def evaluate(p: LaurentPotential, z: complex) -> complex:
    return p.evaluate(z)


def laurent_coefficient(p: LaurentPotential, k: int) -> complex:
    return p.laurent_coefficient(k)


def turning_points(p: LaurentPotential) -> list[complex]:
    """All zeros of Q, repeated according to multiplicity."""
    return list(p.zeros)


def wkb_validity(p: LaurentPotential, z: complex) -> float:
    """|eps| for the lowest-order phase integrand q = sqrt(Q).

    With q = sqrt(Q) the (Q - q^2)/q term vanishes and
    eps = Q^(-3/4) (Q^(-1/4))'' = 5/16 Q'^2/Q^3 - 1/4 Q''/Q^2.
    """
    z = complex(z)
    q = p.evaluate(z)
    if p.is_constant():
        return 0.0
    scale = sum(abs(c) * abs(z) ** k for c, k in p.terms)
    if abs(q) <= DEFAULT_TOL_ROOT * max(scale, 1e-300):
        raise SingularPointError(f"z={z} is a turning point of Q")
    d1 = p.derivative(1).evaluate(z)
    d2 = p.derivative(2).evaluate(z)
    return float(abs(5.0 / 16.0 * d1 * d1 / q ** 3 - 0.25 * d2 / q ** 2))


# -- text grammar -----------------------------------------------------------

_NUM = r"(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?[jJ]?"
_TERM = re.compile(
    rf"""\s*(?P<sign>[+-])?\s*
        (?:(?P<coef>{_NUM}|\([^()]*\))\s*(?P<star>\*)?\s*)?
        (?P<z>z(?:\s*(?:\^|\*\*)\s*(?P<exp>\(?\s*[+-]?\s*\d+\s*\)?))?)?
        \s*""",
    re.VERBOSE,
)


def _parse_terms(text: str) -> list[tuple[complex, int]]:
    if not text:
        raise ValueError("empty potential specification")
    terms = []
    pos = 0
    first = True
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ValueError(f"cannot parse potential near {text[pos:]!r}")
        if not first and m.group("sign") is None:
            raise ValueError(f"missing operator near {text[pos:]!r}")
        coef_txt, ztxt = m.group("coef"), m.group("z")
        if coef_txt is None and ztxt is None:
            raise ValueError(f"empty term near {text[pos:]!r}")
        if m.group("star") and ztxt is None:
            raise ValueError(f"dangling '*' near {text[pos:]!r}")
        coef = complex(coef_txt.replace(" ", "")) if coef_txt else 1.0
        if m.group("sign") == "-":
            coef = -coef
        k = 0
        if ztxt is not None:
            exp = m.group("exp")
            k = int(exp.replace(" ", "").strip("()")) if exp else 1
        terms.append((coef, k))
        pos = m.end()
        first = False
    return terms


def parse_potential(text: str, **kwargs) -> LaurentPotential:
    return LaurentPotential.parse(text, **kwargs)


def as_potential(obj: "LaurentPotential | str | Iterable") -> LaurentPotential:
    if isinstance(obj, LaurentPotential):
        return obj
    if isinstance(obj, str):
        return LaurentPotential.parse(obj)
    return LaurentPotential(tuple(obj))
