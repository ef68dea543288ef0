"""Stokes diagrams and connection matrices built from Heading-style steps.

Naming convention: a *Stokes line* is a curve from a turning point t0 on
which Re of the integral of sqrt(Q) from t0 vanishes, so exp(+-i omega) are
real exponentials and one solution is maximally dominant.  An *anti-Stokes
line* has Im of that integral equal to zero (equal magnitudes, dominancy
labels swap).  ``swap_naming=True`` in the tracer only exchanges the labels.

Coefficient vectors psi = [a+, a-] multiply the basis ((t, z), (z, t)) with
(t, z) = Q^(-1/4) exp(i int_t^z sqrt(Q)); a step acts as psi -> M psi.
"""

from __future__ import annotations

import cmath
import json
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np

from .contour import _NODES, _WK15
from .errors import InconsistentRegionError, TracingError
from .polynomial import StokesPolynomial
from .potential import LaurentPotential

P = StokesPolynomial
SLOTS = ("plus", "minus")


# ---------------------------------------------------------------------------
# Stokes-line tracing


@dataclass(frozen=True, eq=False)
class StokesLine:
    origin: complex
    points: np.ndarray
    kind: str  # "stokes" | "anti_stokes"
    terminus: str  # "infinity" | "singularity" | "truncated"
    initial_angle: float = 0.0

    @property
    def end(self) -> complex:
        return complex(self.points[-1])


def _segment_integral(p: LaurentPotential, a: complex, b: complex, w_a: complex):
    """GK15 of sqrt(Q) on the short segment a->b, branch continued from w_a."""
    half = 0.5 * (b - a)
    z = 0.5 * (a + b) + half * _NODES
    roots = np.sqrt(p.evaluate_array(z))
    prev = w_a
    for i in range(roots.size):
        if abs(roots[i] + prev) < abs(roots[i] - prev):
            roots[i] = -roots[i]
        prev = roots[i]
    w_b = cmath.sqrt(p.evaluate_array(np.asarray(b)))
    if abs(w_b + prev) < abs(w_b - prev):
        w_b = -w_b
    return complex(half * np.dot(_WK15, roots)), complex(w_b)


def _initial_directions(p: LaurentPotential, t0: complex, order: int, kind: str):
    """Angles at which level curves leave a zero of the given order."""
    d = p
    for _ in range(order):
        d = d.derivative()
    lead = d.evaluate(t0) / math.factorial(order)
    # integral ~ (2/(m+2)) sqrt(lead) (z - t0)^((m+2)/2)
    base = cmath.phase(cmath.sqrt(lead))
    target = math.pi / 2 if kind == "stokes" else 0.0
    nu = (order + 2) / 2
    return [((target + k * math.pi - base) / nu) % (2 * math.pi) for k in range(order + 2)]


def trace_stokes_lines(p: LaurentPotential, origin: complex, max_len: float = 20.0,
                       kinds: Sequence[str] = ("stokes",), step: float = 1e-2,
                       corrector_tol: float = 1e-8, escape_radius: float | None = None,
                       swap_naming: bool = False) -> list[StokesLine]:
    """Trace the Stokes (and/or anti-Stokes) lines leaving the turning point ``origin``.

    Arclength continuation: predictor along the level-curve tangent, Newton
    corrector on Re F = 0 (Im F = 0 for anti-Stokes), where F is the phase
    integral from ``origin``.  The step is ``step`` times the distance to
    the nearest singular point, the turning point itself included.
    ``kinds`` always names the geometry in the convention above;
    ``swap_naming`` only exchanges the labels on the returned lines.
    """
    origin = complex(origin)
    order = p.zero_order(origin)
    if order == 0:
        raise ValueError(f"{origin} is not a turning point of Q")
    others = [s for s in p.singular_points() if abs(s - origin) > 1e-9 * max(1.0, abs(origin))]
    scale = min([abs(s - origin) for s in others] + [1.0])
    if escape_radius is None:
        escape_radius = abs(origin) + max_len
    lines = []
    for kind in kinds:
        label = kind
        if swap_naming:
            label = "anti_stokes" if kind == "stokes" else "stokes"
        for theta in _initial_directions(p, origin, order, kind):
            pts, term = _trace_one(p, origin, theta, kind, max_len, step, corrector_tol,
                                   escape_radius, others, scale)
            lines.append(StokesLine(origin, pts, label, term, theta))
    return lines


def _trace_one(p, origin, theta, kind, max_len, step, ctol, escape, others, scale):
    if max_len <= 0:
        return np.array([origin]), "truncated"
    part = (lambda F: F.real) if kind == "stokes" else (lambda F: F.imag)

    def tangent(w):
        # direction e along which F' e is imaginary (stokes) or real (anti-Stokes)
        u = w.conjugate() / abs(w)
        return 1j * u if kind == "stokes" else u

    def grad(w):
        # Newton direction on the selected part of F
        return w.conjugate() / abs(w) ** 2 if kind == "stokes" else 1j * w.conjugate() / abs(w) ** 2

    h0 = min(1e-3 * scale, max_len)
    z = origin + h0 * cmath.exp(1j * theta)
    # integrate from the turning point with a square-root-friendly substitution
    w_mid = cmath.sqrt(p.evaluate(origin + 0.5 * h0 * cmath.exp(1j * theta)))
    s = 0.5 * (_NODES + 1)
    zz = origin + (z - origin) * s * s
    roots = np.sqrt(p.evaluate_array(zz))
    prev = w_mid
    for i in range(7, -1, -1):
        if abs(roots[i] + prev) < abs(roots[i] - prev):
            roots[i] = -roots[i]
        prev = roots[i]
    prev = roots[7]
    for i in range(8, 15):
        if abs(roots[i] + prev) < abs(roots[i] - prev):
            roots[i] = -roots[i]
        prev = roots[i]
    F = complex(0.5 * np.dot(_WK15, roots * (z - origin) * 2 * s))
    w = cmath.sqrt(p.evaluate(z))
    if abs(w + prev) < abs(w - prev):
        w = -w
    pts = [origin, z]
    travelled = h0
    direction = cmath.exp(1j * theta)
    stall = 0
    while True:
        dist = min([abs(z - o) for o in others] + [math.inf])
        if dist < 1e-3 * scale:
            return np.array(pts), "singularity"
        if abs(z) > escape:
            return np.array(pts), "infinity"
        if travelled >= max_len:
            return np.array(pts), "truncated"
        h = min(step * min(dist, abs(z - origin)), max_len - travelled)
        h = max(h, 1e-14 * max(1.0, abs(z)))
        t = tangent(w)
        if (t * direction.conjugate()).real < 0:
            t = -t
        zn = z + h * t
        dF, wn = _segment_integral(p, z, zn, w)
        Fn = F + dF
        for _ in range(20):
            r = part(Fn)
            if abs(r) <= ctol * max(1.0, abs(Fn)):
                break
            dz = -r * grad(wn)
            if abs(dz) > 0.5 * h:
                dz *= 0.5 * h / abs(dz)
            dF2, wn = _segment_integral(p, zn, zn + dz, wn)
            zn, Fn = zn + dz, Fn + dF2
        else:
            stall += 1
            if stall > 5:
                raise TracingError(f"corrector stalled near {zn} (residual {part(Fn):.3g})")
        direction = (zn - z) / abs(zn - z)
        travelled += abs(zn - z)
        z, F, w = zn, Fn, wn
        pts.append(z)


# ---------------------------------------------------------------------------
# connection matrices


def _entry(x) -> StokesPolynomial:
    return P.coerce(x)


@dataclass(frozen=True)
class ConnectionMatrix:
    entries: tuple  # ((m00, m01), (m10, m11)) of StokesPolynomial
    domain_from: str | None = None
    domain_to: str | None = None
    dominant_from: str | None = None
    dominant_to: str | None = None
    notes: tuple = field(default=(), compare=False)

    def __post_init__(self):
        e = tuple(tuple(_entry(x) for x in row) for row in self.entries)
        object.__setattr__(self, "entries", e)

    @classmethod
    def identity(cls, domain=None, dominant=None) -> "ConnectionMatrix":
        return cls(((1, 0), (0, 1)), domain, domain, dominant, dominant)

    def __getitem__(self, ij):
        i, j = ij
        return self.entries[i][j]

    def __matmul__(self, other: "ConnectionMatrix") -> "ConnectionMatrix":
        """Plain matrix product self * other (no label checks)."""
        a, b = self.entries, other.entries
        prod = tuple(
            tuple(a[i][0] * b[0][j] + a[i][1] * b[1][j] for j in range(2)) for i in range(2)
        )
        return ConnectionMatrix(prod, other.domain_from, self.domain_to,
                                other.dominant_from, self.dominant_to,
                                other.notes + self.notes)

    def determinant(self) -> StokesPolynomial:
        e = self.entries
        return e[0][0] * e[1][1] - e[0][1] * e[1][0]

    def trace(self) -> StokesPolynomial:
        return self.entries[0][0] + self.entries[1][1]

    def substitute(self, values) -> "ConnectionMatrix":
        e = tuple(tuple(x.substitute(values) for x in row) for row in self.entries)
        return ConnectionMatrix(e, self.domain_from, self.domain_to,
                                self.dominant_from, self.dominant_to, self.notes)

    def to_array(self, values=None) -> np.ndarray:
        values = values or {}
        return np.array([[x.evaluate(values) for x in row] for row in self.entries])

    def apply(self, psi):
        """M psi for a coefficient pair of polynomials or numbers."""
        a, b = (_entry(x) for x in psi)
        e = self.entries
        return e[0][0] * a + e[0][1] * b, e[1][0] * a + e[1][1] * b

    def to_json(self) -> dict:
        return {
            "entries": [[str(x) for x in row] for row in self.entries],
            "terms": [[x.to_json() for x in row] for row in self.entries],
            "domain_from": self.domain_from,
            "domain_to": self.domain_to,
            "determinant": str(self.determinant()),
            "trace": str(self.trace()),
        }


def _stokes_symbol(constant) -> StokesPolynomial:
    if isinstance(constant, StokesPolynomial):
        return constant
    if isinstance(constant, int):
        return P.symbol(f"s{constant}")
    return P.symbol(str(constant))


def elementary_stokes_crossing(constant, direction: int = 1, dominant_slot: str = "plus",
                               domain_from: str | None = None,
                               domain_to: str | None = None) -> ConnectionMatrix:
    """Crossing a Stokes line: the subdominant coefficient gains direction*s times the dominant one."""
    if direction not in (1, -1):
        raise ValueError("direction must be +1 or -1")
    if dominant_slot not in SLOTS:
        raise ValueError(f"dominant_slot must be one of {SLOTS}")
    s = _stokes_symbol(constant) * direction
    if dominant_slot == "plus":
        entries = ((1, 0), (s, 1))
    else:
        entries = ((1, s), (0, 1))
    return ConnectionMatrix(entries, domain_from, domain_to, dominant_slot, dominant_slot,
                            (f"stokes {s}",))


def _phase(factor) -> StokesPolynomial:
    if isinstance(factor, StokesPolynomial):
        return factor
    if isinstance(factor, str):
        return P.symbol(factor)
    return P.constant(complex(factor))


def branch_cut_crossing(phase_factor, domain_from: str | None = None,
                        domain_to: str | None = None, dominant_from: str | None = None,
                        dominant_to: str | None = None) -> ConnectionMatrix:
    """Re-anchoring diag(F, 1/F) with F = exp(i int_new^old ...) as seen by the coefficients.

    Moving the anchor from a to b rewrites (a, z) = [a, b] (b, z) and
    (z, a) = [a, b]^-1 (z, b); the coefficients pick up diag([a, b], [a, b]^-1).
    ``phase_factor`` may be a number or a symbol name.
    """
    f = _phase(phase_factor)
    return ConnectionMatrix(((f, 0), (0, f.inverse())), domain_from, domain_to or domain_from,
                            dominant_from, dominant_to, (f"reanchor {f}",))


def anti_stokes_crossing(domain_from: str | None = None, domain_to: str | None = None,
                         dominant_from: str | None = None) -> ConnectionMatrix:
    """Identity on coefficients; dominancy labels swap."""
    dom_to = None
    if dominant_from is not None:
        dom_to = "minus" if dominant_from == "plus" else "plus"
    return ConnectionMatrix(((1, 0), (0, 1)), domain_from, domain_to, dominant_from, dom_to,
                            ("anti-stokes",))


def compose(steps: Sequence[ConnectionMatrix]) -> ConnectionMatrix:
    """Product of steps in path order (first step acts first)."""
    if not steps:
        return ConnectionMatrix.identity()
    total = steps[0]
    for i, nxt in enumerate(steps[1:], start=1):
        prev = steps[i - 1]
        if prev.domain_to is not None and nxt.domain_from is not None \
                and prev.domain_to != nxt.domain_from:
            raise InconsistentRegionError(
                f"step {i} starts in region {nxt.domain_from!r} but step {i - 1} "
                f"ends in {prev.domain_to!r}"
            )
        if prev.dominant_to is not None and nxt.dominant_from is not None \
                and prev.dominant_to != nxt.dominant_from:
            raise InconsistentRegionError(
                f"step {i} assumes {nxt.dominant_from!r} dominant but the previous "
                f"step leaves {prev.dominant_to!r} dominant"
            )
        total = nxt @ total
    return total


def trace_equation(m: ConnectionMatrix, f1: complex) -> StokesPolynomial:
    """Tr(m) - 2 cos(2 pi f1); its vanishing constrains the Stokes constants."""
    target = 2 * cmath.cos(2 * math.pi * complex(f1))
    if abs(target.imag) < 1e-15 and abs(target.real - round(target.real)) < 1e-12:
        target = int(round(target.real))
    return m.trace() - target


# ---------------------------------------------------------------------------
# step scripts


def build_step(step: dict, dominant: str | None) -> ConnectionMatrix:
    """One script entry -> ConnectionMatrix; ``dominant`` is the current label."""
    op = step["op"]
    src, dst = step.get("from"), step.get("to")
    if op == "reanchor":
        factor = step["factor"]
        if isinstance(factor, list):
            factor = complex(factor[0], factor[1])
        return branch_cut_crossing(factor, src, dst or src, dominant,
                                   step.get("dominant_after", dominant))
    if op == "anti_stokes":
        return anti_stokes_crossing(src, dst, dominant)
    if op == "stokes":
        m = elementary_stokes_crossing(step["constant"], int(step.get("direction", 1)),
                                       step["dominant"], src, dst)
        if dominant is not None and dominant != step["dominant"]:
            raise InconsistentRegionError(
                f"stokes step {step['constant']} declares {step['dominant']!r} dominant "
                f"but region {src!r} has {dominant!r} dominant"
            )
        return m
    raise ValueError(f"unknown step op {op!r}")


def script_to_matrices(script: Sequence[dict], dominant: str | None = None) -> list:
    out = []
    for step in script:
        if "initial_dominant" in step:
            dominant = step["initial_dominant"]
            continue
        m = build_step(step, dominant)
        out.append(m)
        dominant = m.dominant_to
    return out


def run_script(script: Sequence[dict]) -> ConnectionMatrix:
    return compose(script_to_matrices(script))


def load_script(path: str) -> list:
    with open(path) as fh:
        return json.load(fh)


def budden_loop_script(phase_below="E", phase_above="E") -> list:
    """Clockwise loop about the Budden pole and turning point, starting at large z > 0.

    ``phase_below`` is [0, -c] taken below the cut, ``phase_above`` is
    [-c, 0] taken above it; both equal exp(pi c / 2).
    """
    return [
        {"initial_dominant": "plus"},
        {"op": "reanchor", "factor": phase_below, "from": "1", "dominant_after": "minus",
         "note": "(0,z)_d = [0,-c](-c,z)_s"},
        {"op": "anti_stokes", "from": "1", "to": "2"},
        {"op": "stokes", "constant": "s-", "direction": -1, "dominant": "plus",
         "from": "2", "to": "3"},
        {"op": "anti_stokes", "from": "3", "to": "4"},
        {"op": "stokes", "constant": "s+", "direction": -1, "dominant": "minus",
         "from": "4", "to": "5"},
        {"op": "anti_stokes", "from": "5", "to": "6"},
        {"op": "reanchor", "factor": phase_above, "from": "6", "dominant_after": "plus",
         "note": "reconnect -c -> 0 above the cut"},
    ]


def budden_rotation_matrix(phase_below="E", phase_above="E") -> ConnectionMatrix:
    return run_script(budden_loop_script(phase_below, phase_above))


def solve_budden_modulus(trace_eq: StokesPolynomial, phase_values: dict) -> float:
    """|s-|^2 from the trace equation under the reality symmetry s+ = -conj(s-)."""
    sym = trace_eq.substitute(phase_values).substitute(
        {("s+", False): -P.symbol("s-", conj=True), ("s+", True): -P.symbol("s-")}
    )
    pair = sym.coefficient("s-", ("s-", True))
    const = sym.constant_term()
    leftover = sym - P.constant(const) - pair * P.symbol("s-") * P.symbol("s-", conj=True)
    if not leftover.close_to(0, 1e-14 * max(1.0, abs(const))) or pair == 0:
        raise ValueError(f"trace equation is not of the form k0 + k1 |s-|^2: {sym}")
    val = -complex(const) / complex(pair)
    if abs(val.imag) > 1e-12 * max(1.0, abs(val)) or val.real < -1e-15:
        raise ValueError(f"trace equation gives non-physical |s-|^2 = {val}")
    return max(val.real, 0.0)
