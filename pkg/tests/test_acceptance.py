"""Acceptance criteria; each test prints one PASS/FAIL line (collected in the terminal summary)."""

import cmath
import io
import json
import math
import time

import numpy as np
import pytest
from scipy.optimize import minimize_scalar

from phaseint.budden import comparison_sweep, exact_scattering, numerical_scattering
from phaseint.cli import main
from phaseint.contour import ContourPath, bracket
from phaseint.frobenius import build_series, indicial_roots, series_residual
from phaseint.monodromy import circle_monodromy, eigenstructure, trace_relation_check
from phaseint.polynomial import StokesPolynomial as P
from phaseint.potential import LaurentPotential, parse_potential
from phaseint.stokes import budden_rotation_matrix, trace_equation, trace_stokes_lines

RESULTS: list[str] = []


def report(n: int, title: str, ok: bool, detail: str) -> None:
    line = f"[{'PASS' if ok else 'FAIL'}] criterion {n}: {title} ({detail})"
    RESULTS.append(line)
    print(line)
    assert ok, line


def absorption_formula(c):
    # independent oracle: direct evaluation of e^{-pi c}(1 - e^{-pi c})
    return math.exp(-math.pi * c) * (1 - math.exp(-math.pi * c))


def test_criterion_1_exact_absorption():
    t0 = time.perf_counter()
    worst = 0.0
    for c in (0.05, 0.2206, 0.5, 1.0, 2.0, 3.0):
        out = io.StringIO()
        assert main(["budden", "--c", repr(c), "--method", "exact", "--format", "json"],
                    out=out) == 0
        rec = json.loads(out.getvalue())
        worst = max(worst, abs(rec["A"] - absorption_formula(c)))
    opt = minimize_scalar(lambda c: -exact_scattering(c).A, bounds=(0.05, 1.0),
                          method="bounded", options={"xatol": 1e-10})
    c_star, a_max = opt.x, -opt.fun
    dt = time.perf_counter() - t0
    ok = worst < 1e-14 and abs(c_star - math.log(2) / math.pi) < 1e-6 \
        and abs(a_max - 0.25) < 1e-12 and dt < 1.0
    report(1, "exact absorption closed form and maximum", ok,
           f"max|dA|={worst:.1e}, argmax={c_star:.9f} vs ln2/pi={math.log(2) / math.pi:.9f}, "
           f"Amax={a_max:.12f}, {dt:.2f}s")


def test_criterion_2_oracle_closure():
    t0 = time.perf_counter()
    errs = []
    for c in (0.2206, 0.5, 1.0, 2.0, 3.0):
        errs.append(abs(numerical_scattering(c, radius=200).A - absorption_formula(c)))
    dt = time.perf_counter() - t0
    report(2, "numerical oracle vs exact absorption", max(errs) < 1e-3 and dt < 60,
           f"max|dA|={max(errs):.1e} (tol 1e-3), {dt:.1f}s")


def test_criterion_3_trace_relation():
    t0 = time.perf_counter()
    tr_err, det_err = 0.0, 0.0
    for c in (0.5, 1.0, 2.0):
        m = circle_monodromy(LaurentPotential.budden(c), 0.5)
        tr_err = max(tr_err, abs(m.trace - 2))
        det_err = max(det_err, abs(m.det - 1))
    rng = np.random.default_rng(7)
    rel_err = 0.0
    for q in rng.uniform(-2, 0.24, 20):
        f1, _ = indicial_roots(q)
        m = circle_monodromy(LaurentPotential([(1, 0), (q, -2)]),
                             0.5 * min(1.0, math.sqrt(abs(q))))
        rel_err = max(rel_err, abs(trace_relation_check(m, f1)))
    dt = time.perf_counter() - t0
    ok = tr_err < 1e-6 and det_err < 1e-8 and rel_err < 1e-6 and dt < 60
    report(3, "numerical monodromy obeys the trace relation", ok,
           f"|Tr-2|={tr_err:.1e}, |det-1|={det_err:.1e}, "
           f"max|Tr-2cos(2 pi f1)| over 20 random={rel_err:.1e}, {dt:.1f}s")


def test_criterion_4_phase_integral_anchor():
    worst = 0.0
    for c in (0.5, 1.0, 2.0):
        val = bracket(LaurentPotential.budden(c), ContourPath.line(0, -c, side="below"))
        target = math.exp(math.pi * c / 2)
        worst = max(worst, abs(val - target) / target)
    report(4, "bracket [0,-c] below the cut equals e^(pi c/2)", worst < 1e-8,
           f"max rel err={worst:.1e}")


def test_criterion_5_symbolic_loop():
    E, sp, sm = P.symbol("E"), P.symbol("s+"), P.symbol("s-")
    m = budden_rotation_matrix()
    target = ((E ** 2 + E ** 2 * sp * sm, -sp), (-sm, E ** -2))
    identical = m.entries == target
    unimodular = m.determinant() == 1
    worst = 0.0
    for c in (0.5, 1.0, 2.0):
        # phase factors from quadrature, not from the closed form
        below = bracket(LaurentPotential.budden(c), ContourPath.line(0, -c, side="below"))
        above = bracket(LaurentPotential.budden(c), ContourPath.line(-c, 0, side="above"))
        eq = trace_equation(budden_rotation_matrix("Eb", "Ea"), indicial_roots(0)[0])
        eq = eq.substitute({("Eb", False): below, ("Ea", False): above})
        # expected: E^2 (s+ s- + (1 - e^{-pi c})^2) with E^2 = [0,-c][-c,0]
        e2 = below * above
        expected = e2 * (sp * sm + (1 - math.exp(-math.pi * c)) ** 2)
        diff = eq - expected
        worst = max(worst, max([abs(v) for v in diff.terms.values()] + [0.0]) / abs(e2))
    ok = identical and unimodular and worst < 1e-12
    report(5, "symbolic loop matrix, det 1, trace equation for s+ s-", ok,
           f"term-map equal={identical}, det={m.determinant()}, residual={worst:.1e}")


def test_criterion_5_alternative_sign_is_not_unimodular():
    # the variant with +s- in the lower-left entry cannot be a monodromy matrix
    E, sp, sm = P.symbol("E"), P.symbol("s+"), P.symbol("s-")
    det = (E ** 2 + E ** 2 * sp * sm) * E ** -2 - (-sp) * sm
    assert det == 1 + 2 * sp * sm


def test_criterion_6_sweep():
    rows = comparison_sweep(0.01, 3.0, 300)
    big = [r for r in rows if r["c"] >= 1.0]
    gap = max(abs(r["A_exact"] - r["A_isolated"]) for r in big)
    tiny = comparison_sweep(1e-9, 1e-8, 2)[0]
    first = rows[0]
    ok = gap < 0.01 and abs(tiny["A_isolated"] - 4 / 9) < 1e-7 and tiny["A_exact"] < 1e-7 \
        and abs(first["A_isolated"] - 4 / 9) < 0.01 and first["A_exact"] < 0.04
    report(6, "exact vs isolated-singularity absorption", ok,
           f"max gap c>=1: {gap:.1e}; c->0+: A_iso={tiny['A_isolated']:.8f}, "
           f"A_exact={tiny['A_exact']:.1e}")


def test_criterion_7_frobenius_properties():
    slopes_ok = True
    worst_slope = 0.0
    for text, radii in (("1 + 1*z^-1", (0.04, 0.02, 0.01)),
                        ("1 + 2*z^-1 - 0.1*z^-2", (0.1, 0.05, 0.025))):
        p = parse_potential(text)
        for N in (2, 3, 4):
            s = build_series(p, N)
            r = np.array(radii)
            res = np.array([abs(series_residual(p, s, x)) for x in r])
            slope = np.diff(np.log(res)) / np.diff(np.log(r))
            dev = float(np.max(np.abs(slope - (N + s.f1.real - 1))))
            worst_slope = max(worst_slope, dev)
            slopes_ok &= dev < 0.1
    rng = np.random.default_rng(11)
    ind = 0.0
    for q in rng.uniform(-3, 3, 50) + 1j * rng.uniform(-3, 3, 50):
        for f in indicial_roots(q):
            ind = max(ind, abs(f * (f - 1) + q))
    budden_flag = eigenstructure(circle_monodromy(LaurentPotential.budden(1.0), 0.5), 1)[2]
    euler_flag = eigenstructure(circle_monodromy(parse_potential("-2*z^-2"), 1.0), 2)[2]
    ok = slopes_ok and ind < 1e-12 and budden_flag is False and euler_flag is True
    report(7, "Frobenius residual order, indicial roots, diagonalizability", ok,
           f"max slope dev={worst_slope:.3f}, indicial residual={ind:.1e}, "
           f"Budden diag={budden_flag}, Euler diag={euler_flag}")


def test_criterion_8_stokes_diagram():
    airy = trace_stokes_lines(parse_potential("z"), 0, max_len=6)
    ang = sorted(cmath.phase(l.end) % (2 * math.pi) for l in airy)
    airy_err = max(abs(a - b) for a, b in zip(ang, (math.pi / 3, math.pi, 5 * math.pi / 3)))
    c = 1.0
    p = LaurentPotential.budden(c)

    def topology(lines):
        on_axis = [l for l in lines if np.all(np.abs(l.points.imag) < 1e-8)]
        off = [l for l in lines if l not in on_axis]
        sym = len(off) == 2 and abs(off[0].end - off[1].end.conjugate()) < 1e-6 * abs(off[0].end)
        return on_axis, sym

    # maximal-dominance family: on-axis member runs along the cut into the pole
    st = trace_stokes_lines(p, -c, max_len=20)
    st_axis, st_sym = topology(st)
    # equal-magnitude family: on-axis member runs to -infinity (the usual Budden diagram
    # under the other naming convention, reachable through swap_naming)
    an = trace_stokes_lines(p, -c, max_len=20, kinds=("anti_stokes",), swap_naming=True)
    an_axis, an_sym = topology(an)
    ok = (airy_err < 1e-3 and len(st) == 3 and len(st_axis) == 1 and st_sym
          and abs(st_axis[0].end) < 1e-2 and len(an) == 3 and len(an_axis) == 1 and an_sym
          and an_axis[0].end.real < -15 and all(l.kind == "stokes" for l in an))
    report(8, "Stokes diagrams for Airy and Budden", ok,
           f"Airy angle err={airy_err:.1e}; Budden: 3 lines from -c, on-axis line to "
           f"{st_axis[0].end:.3g} (Re family) / {an_axis[0].end:.3g} (Im family), "
           f"off-axis pairs symmetric={st_sym and an_sym}")
