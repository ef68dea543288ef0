"""Complex paths, branch-tracked phase integrals and the ODE oracle.

The phase integrand sqrt(Q) is continued along a path by choosing, at every
sample, the sign closest to the previous sample.  Quadrature is adaptive
Gauss-Kronrod (7/15) processed strictly in path order so that the branch
carried out of one subinterval seeds the next.
"""

from __future__ import annotations

import cmath
import math
from dataclasses import dataclass, field
from typing import Sequence

import numpy as np
from scipy.integrate import solve_ivp

from .errors import BranchPointError, ContourError, IntegrationError, QuadratureError
from .potential import LaurentPotential

DEFAULT_TOL_QUAD = 1e-11
DEFAULT_TOL_ODE = 1e-10
DEFAULT_CLEARANCE = 1e-3

# Gauss-Kronrod 7/15 on [-1, 1]
_XK = np.array([
    0.991455371120812639206854697526329,
    0.949107912342758524526189684047851,
    0.864864423359769072789712788640926,
    0.741531185599394439863864773280788,
    0.586087235467691130294144845693013,
    0.405845151377397166906606412076961,
    0.207784955007898467600689403773245,
    0.000000000000000000000000000000000,
])
_WK = np.array([
    0.022935322010529224963732008058970,
    0.063092092629978553290700663189204,
    0.104790010322250183839876322541518,
    0.140653259715525918745189590510238,
    0.169004726639267902826583426598550,
    0.190350578064785409913256402421014,
    0.204432940075298892414161999234649,
    0.209482141084727828012999174891714,
])
_WG = np.array([
    0.129484966168869693270611432679082,
    0.279705391489276667901467771423780,
    0.381830050505118944950369775488975,
    0.417959183673469387755102040816327,
])
_NODES = np.concatenate([-_XK[:-1], _XK[::-1]])            # ascending, 15 nodes
_WK15 = np.concatenate([_WK[:-1], _WK[::-1]])
_WG7 = np.zeros(15)
_WG7[1::2] = np.concatenate([_WG[:-1], _WG[::-1]])


# ---------------------------------------------------------------------------
# paths


@dataclass(frozen=True)
class Line:
    a: complex
    b: complex

    def __post_init__(self):
        object.__setattr__(self, "a", complex(self.a))
        object.__setattr__(self, "b", complex(self.b))

    @property
    def start(self) -> complex:
        return self.a

    @property
    def end(self) -> complex:
        return self.b

    def z(self, t):
        return self.a + (self.b - self.a) * np.asarray(t)

    def dz(self, t):
        return np.full(np.shape(t), self.b - self.a, dtype=complex)

    def reversed(self) -> "Line":
        return Line(self.b, self.a)

    def distance_to(self, p: complex) -> float:
        d = self.b - self.a
        if d == 0:
            return abs(p - self.a)
        t = min(1.0, max(0.0, ((p - self.a) * d.conjugate()).real / abs(d) ** 2))
        return abs(p - (self.a + t * d))

    def length(self) -> float:
        return abs(self.b - self.a)

    def to_json(self) -> dict:
        return {"line": [[self.a.real, self.a.imag], [self.b.real, self.b.imag]]}


@dataclass(frozen=True)
class Arc:
    center: complex
    r: float
    theta1: float
    theta2: float

    def __post_init__(self):
        object.__setattr__(self, "center", complex(self.center))
        if self.r <= 0:
            raise ContourError("arc radius must be positive")

    @property
    def start(self) -> complex:
        return self.center + self.r * cmath.exp(1j * self.theta1)

    @property
    def end(self) -> complex:
        return self.center + self.r * cmath.exp(1j * self.theta2)

    def z(self, t):
        th = self.theta1 + (self.theta2 - self.theta1) * np.asarray(t)
        return self.center + self.r * np.exp(1j * th)

    def dz(self, t):
        return 1j * (self.theta2 - self.theta1) * (self.z(t) - self.center)

    def reversed(self) -> "Arc":
        return Arc(self.center, self.r, self.theta2, self.theta1)

    def distance_to(self, p: complex) -> float:
        rel = p - self.center
        phi = cmath.phase(rel) if rel != 0 else self.theta1
        lo, hi = sorted((self.theta1, self.theta2))
        # bring phi into [lo, lo + 2 pi)
        phi = lo + (phi - lo) % (2 * math.pi)
        if phi <= hi:
            return abs(abs(rel) - self.r)
        return min(abs(p - self.start), abs(p - self.end))

    def length(self) -> float:
        return self.r * abs(self.theta2 - self.theta1)

    def to_json(self) -> dict:
        c = self.center
        return {"arc": {"center": [c.real, c.imag], "r": self.r,
                        "from": self.theta1, "to": self.theta2}}


Segment = Line | Arc


@dataclass(frozen=True)
class ContourPath:
    """Piecewise path; ``orientation=-1`` traverses the segments backwards.

    ``side`` ('below' / 'above') marks a path hugging a branch cut of sqrt(Q);
    the reference branch is then taken as the limit from that side.
    """

    segments: tuple
    orientation: int = 1
    side: str | None = None
    samples: int = 64
    join_tol: float = field(default=1e-12, compare=False)

    def __post_init__(self):
        segs = tuple(self.segments)
        if not segs:
            raise ContourError("path has no segments")
        object.__setattr__(self, "segments", segs)
        if self.orientation not in (1, -1):
            raise ContourError("orientation must be +1 or -1")
        if self.side not in (None, "below", "above"):
            raise ContourError(f"side must be 'below' or 'above', got {self.side!r}")
        for s0, s1 in zip(segs, segs[1:]):
            gap = abs(s0.end - s1.start)
            if gap > self.join_tol * max(1.0, abs(s0.end)):
                raise ContourError(f"segments do not join: {s0.end} -> {s1.start}")

    # constructors

    @classmethod
    def line(cls, a: complex, b: complex, **kw) -> "ContourPath":
        return cls((Line(a, b),), **kw)

    @classmethod
    def polyline(cls, points: Sequence[complex], **kw) -> "ContourPath":
        pts = [complex(p) for p in points]
        return cls(tuple(Line(p, q) for p, q in zip(pts, pts[1:])), **kw)

    @classmethod
    def circle(cls, center: complex = 0, r: float = 1.0, start_angle: float = 0.0,
               turns: int = 1, **kw) -> "ContourPath":
        """Closed circle, counterclockwise for turns > 0."""
        return cls((Arc(center, r, start_angle, start_angle + 2 * math.pi * turns),), **kw)

    @classmethod
    def from_json(cls, obj, **kw) -> "ContourPath":
        segs = []
        for item in obj:
            if "line" in item:
                (ar, ai), (br, bi) = item["line"]
                segs.append(Line(complex(ar, ai), complex(br, bi)))
            elif "arc" in item:
                arc = item["arc"]
                cr, ci = arc["center"]
                segs.append(Arc(complex(cr, ci), float(arc["r"]), float(arc["from"]),
                                float(arc["to"])))
            else:
                raise ContourError(f"unknown segment {item!r}")
        return cls(tuple(segs), **kw)

    def to_json(self) -> list:
        return [s.to_json() for s in self.oriented_segments()]

    # geometry

    def oriented_segments(self) -> tuple:
        if self.orientation == 1:
            return self.segments
        return tuple(s.reversed() for s in reversed(self.segments))

    @property
    def start(self) -> complex:
        return self.oriented_segments()[0].start

    @property
    def end(self) -> complex:
        return self.oriented_segments()[-1].end

    @property
    def is_closed(self) -> bool:
        return abs(self.start - self.end) <= self.join_tol * max(1.0, abs(self.start))

    def reversed(self) -> "ContourPath":
        return ContourPath(self.segments, -self.orientation, self.side, self.samples)

    def then(self, other: "ContourPath") -> "ContourPath":
        return ContourPath(self.oriented_segments() + other.oriented_segments(),
                           side=self.side or other.side, samples=self.samples)

    def length(self) -> float:
        return sum(s.length() for s in self.segments)

    def points(self, n: int | None = None) -> np.ndarray:
        n = n or self.samples
        t = np.linspace(0.0, 1.0, n)
        return np.concatenate([s.z(t) for s in self.oriented_segments()])

    def check_clearance(self, points: Sequence[complex], clearance: float,
                        allow_endpoints: bool = False) -> None:
        """Raise BranchPointError if the path passes within ``clearance`` of a point.

        With ``allow_endpoints`` a point sitting exactly on the start or end
        of the path is tolerated on the segment that ends there.
        """
        ends = (self.start, self.end) if allow_endpoints else ()
        for p in points:
            tol = 1e-12 * max(1.0, abs(p))
            terminal = any(abs(p - e) <= tol for e in ends)
            for seg in self.segments:
                if terminal and (abs(p - seg.start) <= tol or abs(p - seg.end) <= tol):
                    continue
                if seg.distance_to(p) < clearance:
                    raise BranchPointError(
                        f"path passes within {seg.distance_to(p):.3g} of singular point {p}"
                    )


def _path_clearance(p: LaurentPotential, path: ContourPath, clearance: float | None) -> float:
    if clearance is not None:
        return clearance
    scale = max([abs(s) for s in p.singular_points()] + [1.0])
    return DEFAULT_CLEARANCE * scale


# ---------------------------------------------------------------------------
# phase integrand


@dataclass(frozen=True)
class PhaseIntegrand:
    """sqrt(Q) with a branch fixed by a seed value at one point."""

    potential: LaurentPotential
    seed_z: complex | None = None
    seed_value: complex | None = None

    def __post_init__(self):
        if (self.seed_z is None) != (self.seed_value is None):
            raise ValueError("seed_z and seed_value must be given together")
        if self.seed_z is not None:
            q = self.potential.evaluate(self.seed_z)
            w = complex(self.seed_value)
            if abs(w * w - q) > 1e-10 * max(1.0, abs(q)):
                raise ValueError(f"seed value {w} is not a square root of Q={q}")

    @classmethod
    def seeded(cls, p: LaurentPotential, z0: complex, sign: int = 1) -> "PhaseIntegrand":
        """Seed with sign * principal sqrt(Q(z0))."""
        return cls(p, complex(z0), sign * cmath.sqrt(p.evaluate(z0)))


def _choose(samples: np.ndarray, prev: complex):
    """Fix signs of principal roots sequentially for continuity; return max jump angle."""
    out = np.empty_like(samples)
    worst = 0.0
    for i, w in enumerate(samples):
        if abs(w + prev) < abs(w - prev):
            w = -w
        if prev != 0 and w != 0:
            worst = max(worst, abs(cmath.phase(w / prev)))
        out[i] = w
        prev = w
    return out, worst


class _Tracked:
    """sqrt(Q(z(phi(s)))) * z'(phi(s)) * phi'(s) on one segment, s in [0, 1]."""

    def __init__(self, p: LaurentPotential, seg, sing_start: bool, sing_end: bool):
        self.p = p
        self.seg = seg
        self.mode = (sing_start, sing_end)

    def phi(self, s):
        s = np.asarray(s, dtype=float)
        a, b = self.mode
        if a and b:
            return s * s * (3 - 2 * s), 6 * s * (1 - s)
        if a:
            return s * s, 2 * s
        if b:
            return 1 - (1 - s) ** 2, 2 * (1 - s)
        return s, np.ones_like(s)

    def root_and_jac(self, s):
        t, dt = self.phi(s)
        z = self.seg.z(t)
        q = self.p.evaluate_array(z)
        return np.sqrt(q), self.seg.dz(t) * dt, z


def _adaptive(tr: _Tracked, s0: float, s1: float, w0: complex, tol: float,
              max_depth: int = 60, max_angle: float = math.pi / 4):
    """Branch-tracked adaptive GK15 of tr over [s0, s1] (either direction)."""
    total = 0j
    err_total = 0.0
    stack = [(s0, s1, 0)]
    w = w0
    span = abs(s1 - s0)
    while stack:
        a, b, depth = stack.pop()
        half = 0.5 * (b - a)
        mid = 0.5 * (a + b)
        # with signed half-width, ascending nodes always run from a toward b
        s = mid + half * _NODES
        roots, jac, _ = tr.root_and_jac(s)
        # endpoint b, for carrying the branch onward (skip if singular)
        end_root = None
        b_singular = (b == 1.0 and tr.mode[1]) or (b == 0.0 and tr.mode[0])
        if not b_singular:
            end_root, _, _ = tr.root_and_jac(np.array([b]))
            end_root = end_root[0]
        seq = roots if end_root is None else np.append(roots, end_root)
        fixed, worst = _choose(seq, w)
        f = fixed[:15] * jac
        k15 = half * np.dot(_WK15, f)
        g7 = half * np.dot(_WG7, f)
        err = abs(k15 - g7)
        local_tol = tol * max(abs(total + k15), 1.0) * max(abs(b - a) / span, 1e-3)
        if (err > local_tol or worst > max_angle) and depth < max_depth:
            stack.append((mid, b, depth + 1))
            stack.append((a, mid, depth + 1))
            continue
        if depth >= max_depth and (err > 100 * local_tol or worst > max_angle):
            raise QuadratureError(
                f"no convergence on s in [{min(a, b):.3g}, {max(a, b):.3g}] of {tr.seg}: "
                f"error estimate {err:.3g}, branch jump {worst:.3g}"
            )
        total += k15
        err_total += err
        w = fixed[-1] if end_root is not None else fixed[14]
    return total, w, err_total


def _reference(q: PhaseIntegrand, path: ContourPath):
    """Reference point (segment index, s) on the path with its sqrt(Q) value."""
    p = q.potential
    segs = path.segments
    if q.seed_z is not None:
        for i, seg in enumerate(segs):
            for s_val, zz in ((0.0, seg.start), (1.0, seg.end)):
                if abs(zz - q.seed_z) <= 1e-12 * max(1.0, abs(zz)):
                    return i, s_val, complex(q.seed_value)
        # continue the seed along a straight line to the first segment's midpoint
        mid = complex(segs[0].z(0.5))
        bridge = _Tracked(p, Line(q.seed_z, mid), False, False)
        _, w, _ = _adaptive(bridge, 0.0, 1.0, complex(q.seed_value), DEFAULT_TOL_QUAD)
        return 0, 0.5, w
    mid = complex(segs[0].z(0.5))
    w = cmath.sqrt(p.evaluate(mid))
    if path.side is not None:
        eta = 1e-7 * max(1.0, abs(mid))
        shifted = mid + (-1j if path.side == "below" else 1j) * eta
        w_side = cmath.sqrt(p.evaluate(shifted))
        if abs(w + w_side) < abs(w - w_side):
            w = -w
    return 0, 0.5, w


def _phase_integral_tracked(q: PhaseIntegrand, path: ContourPath, tol: float,
                            clearance: float | None = None):
    """(integral over forward segments, sqrt(Q) at start, sqrt(Q) at end)."""
    p = q.potential
    singular = p.singular_points()
    path.check_clearance(singular, _path_clearance(p, path, clearance), allow_endpoints=True)
    segs = path.segments
    first, last = segs[0].start, segs[-1].end

    def is_sing(z):
        return any(abs(z - s) <= 1e-12 * max(1.0, abs(s)) for s in singular)

    for loc, order in p.poles:
        if order >= 2 and min(abs(first - loc), abs(last - loc)) <= 1e-12:
            raise BranchPointError(f"sqrt(Q) is not integrable at the order-{order} pole {loc}")

    tracked = [
        _Tracked(p, seg, i == 0 and is_sing(first), i == len(segs) - 1 and is_sing(last))
        for i, seg in enumerate(segs)
    ]
    i0, s_ref, w_ref = _reference(q, path)
    total = 0j
    # forward from the reference
    w = w_ref
    for i in range(i0, len(segs)):
        s_from = s_ref if i == i0 else 0.0
        if s_from < 1.0:
            part, w, _ = _adaptive(tracked[i], s_from, 1.0, w, tol)
            total += part
    w_end = w
    # backward from the reference
    w = w_ref
    for i in range(i0, -1, -1):
        s_from = s_ref if i == i0 else 1.0
        if s_from > 0.0:
            part, w, _ = _adaptive(tracked[i], s_from, 0.0, w, tol)
            total -= part  # part runs against the path direction
    w_start = w
    return total, w_start, w_end


def phase_integral(q: PhaseIntegrand | LaurentPotential, path: ContourPath,
                   tol: float = DEFAULT_TOL_QUAD, clearance: float | None = None) -> complex:
    """Integral of sqrt(Q) dz along ``path`` with the branch tracked continuously."""
    if isinstance(q, LaurentPotential):
        q = PhaseIntegrand(q)
    total, _, _ = _phase_integral_tracked(q, path, tol, clearance)
    return path.orientation * total


def bracket(q: PhaseIntegrand | LaurentPotential, path: ContourPath,
            tol: float = DEFAULT_TOL_QUAD) -> complex:
    """[a, b] = exp(i * integral of sqrt(Q) from a to b along path)."""
    return cmath.exp(1j * phase_integral(q, path, tol))


def wkb_basis_at(q: PhaseIntegrand | LaurentPotential, anchor: complex, z: complex,
                 path: ContourPath | None = None, tol: float = DEFAULT_TOL_QUAD):
    """(y+, y-, y+', y-') with y+- = Q^(-1/4) exp(+-i omega), omega from anchor to z."""
    if isinstance(q, LaurentPotential):
        q = PhaseIntegrand(q)
    anchor, z = complex(anchor), complex(z)
    if path is None:
        path = ContourPath.line(anchor, z)
    if abs(path.start - anchor) > 1e-12 * max(1.0, abs(anchor)) or \
            abs(path.end - z) > 1e-12 * max(1.0, abs(z)):
        raise ContourError("path must run from anchor to z")
    if anchor == z:
        w = q.seed_value if (q.seed_z is not None and q.seed_z == z) else \
            cmath.sqrt(q.potential.evaluate(z))
        omega = 0j
    else:
        total, w_start, w_end = _phase_integral_tracked(q, path, tol)
        omega = path.orientation * total
        w = w_end if path.orientation == 1 else w_start
    Q = q.potential.evaluate(z)
    dQ = q.potential.derivative().evaluate(z)
    pre = 1.0 / cmath.sqrt(w)
    yp = pre * cmath.exp(1j * omega)
    ym = pre * cmath.exp(-1j * omega)
    shift = dQ / (4 * Q)
    return yp, ym, yp * (1j * w - shift), ym * (-1j * w - shift)


# ---------------------------------------------------------------------------
# ODE oracle


def integrate_ode(p: LaurentPotential, path: ContourPath, initial: tuple[complex, complex],
                  tol: float = DEFAULT_TOL_ODE, clearance: float | None = None,
                  method: str = "DOP853", max_steps: int = 2_000_000) -> tuple[complex, complex]:
    """Integrate y'' = -Q y along the path; returns (y, y') at its end."""
    if clearance is None:
        clearance = DEFAULT_CLEARANCE * max([abs(loc) for loc, _ in p.poles] + [1.0])
    path.check_clearance([loc for loc, _ in p.poles], clearance)
    state = np.array([complex(initial[0]), complex(initial[1])], dtype=complex)
    coeffs = p.coefficients
    if len(coeffs) <= 3 and all(-2 <= k <= 2 for k in coeffs):
        # fast path for the short Laurent potentials used throughout
        items = list(coeffs.items())

        def Q(z):
            return sum(c * z ** k for k, c in items)
    else:
        def Q(z):
            return complex(p.evaluate_array(np.asarray(z)))

    for seg in path.oriented_segments():
        def rhs(t, u, seg=seg):
            z = seg.z(t)
            dz = seg.dz(t)
            return np.array([u[1] * dz, -Q(complex(z)) * u[0] * dz])

        sol = solve_ivp(rhs, (0.0, 1.0), state, method=method, rtol=tol,
                        atol=tol * 1e-3 * max(1.0, float(np.abs(state).max())))
        if sol.status != 0:
            raise IntegrationError(f"integration failed on {seg}: {sol.message}")
        state = sol.y[:, -1]
    return complex(state[0]), complex(state[1])
