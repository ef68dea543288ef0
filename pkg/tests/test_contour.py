import cmath
import math

import numpy as np
import pytest
from scipy.integrate import quad

from phaseint.contour import (Arc, ContourPath, Line, PhaseIntegrand, _phase_integral_tracked,
                              bracket, integrate_ode, phase_integral, wkb_basis_at)
from phaseint.errors import BranchPointError, ContourError
from phaseint.potential import LaurentPotential, parse_potential


@pytest.mark.parametrize("c", [0.5, 1.0, 2.0, 3.3])
def test_budden_bracket_below_cut(c):
    p = LaurentPotential.budden(c)
    val = bracket(p, ContourPath.line(0, -c, side="below"))
    assert abs(val - math.exp(math.pi * c / 2)) < 1e-12 * math.exp(math.pi * c / 2)


def test_budden_bracket_above_cut_is_conjugate():
    p = LaurentPotential.budden(1.0)
    below = phase_integral(p, ContourPath.line(0, -1, side="below"))
    above = phase_integral(p, ContourPath.line(0, -1, side="above"))
    assert above == pytest.approx(below.conjugate(), abs=1e-13)


def test_integral_against_real_quadrature():
    # 0 -> -c below the cut: sqrt(Q) = -i sqrt(c/|x| - 1), dz = -dx
    c = 1.7
    ref, _ = quad(lambda x: math.sqrt(c / x - 1), 0, c, epsabs=1e-13)
    got = phase_integral(LaurentPotential.budden(c), ContourPath.line(0, -c, side="below"))
    assert got == pytest.approx(-1j * ref, abs=1e-10)


def test_reversal_negates():
    p = parse_potential("1 + 0.5*z^-1")
    path = ContourPath.polyline([2, 1 + 1j, -1 + 0.5j])
    q = PhaseIntegrand.seeded(p, 2)
    a = phase_integral(q, path)
    b = phase_integral(q, path.reversed())
    assert a + b == pytest.approx(0, abs=1e-13)


def test_additivity():
    p = parse_potential("1 + 0.5*z^-1")
    q = PhaseIntegrand.seeded(p, 2)
    whole = phase_integral(q, ContourPath.polyline([2, 1 + 1j, -1 + 0.5j]))
    first = ContourPath.line(2, 1 + 1j)
    a, _, w_mid = _phase_integral_tracked(q, first, 1e-12)
    # continue with the branch reached at the joint
    b = phase_integral(PhaseIntegrand(p, 1 + 1j, w_mid), ContourPath.line(1 + 1j, -1 + 0.5j))
    assert a + b == pytest.approx(whole, abs=1e-12)


def test_polynomial_antiderivative():
    # Q = z^2: integral of z from a to b is (b^2 - a^2)/2 on the branch sqrt = z
    p = parse_potential("z^2")
    a, b = 1 + 0.5j, 2 - 1j
    q = PhaseIntegrand(p, a, a)
    got = phase_integral(q, ContourPath.polyline([a, 3j, b]))
    assert got == pytest.approx((b ** 2 - a ** 2) / 2, abs=1e-12)


def test_closed_loop_around_budden_pole():
    # residue of sqrt(1 + c/z) at infinity: loop integral equals 2 pi i (c/2) in magnitude
    c = 0.8
    p = LaurentPotential.budden(c)
    q = PhaseIntegrand.seeded(p, 3)
    got = phase_integral(q, ContourPath.circle(0, 3))
    assert abs(got) == pytest.approx(math.pi * c, rel=1e-11)


def test_clearance_rejects_pole():
    p = LaurentPotential.budden(1.0)
    with pytest.raises(BranchPointError):
        integrate_ode(p, ContourPath.line(-1 + 0j, 1 + 1e-6j), (1, 0))


def test_path_json_roundtrip():
    path = ContourPath((Line(1, 2j), Arc(0, 2, math.pi / 2, math.pi)))
    back = ContourPath.from_json(path.to_json())
    assert back.segments == path.segments
    assert back.start == pytest.approx(1) and back.end == pytest.approx(-2)


def test_disjoint_segments_rejected():
    with pytest.raises(ContourError):
        ContourPath((Line(0, 1), Line(2, 3)))


def test_circle_is_closed():
    assert ContourPath.circle(0, 0.5).is_closed
    assert not ContourPath.line(0, 1).is_closed


def test_ode_sine():
    y, dy = integrate_ode(parse_potential("1"), ContourPath.polyline([0, 1j, 2]), (0, 1))
    assert y == pytest.approx(math.sin(2), abs=1e-9)
    assert dy == pytest.approx(math.cos(2), abs=1e-9)


def test_ode_complex_exponential():
    # Q = 4: y = exp(2iz)
    z1 = 1.5 - 0.5j
    y, dy = integrate_ode(parse_potential("4"), ContourPath.line(0, z1), (1, 2j), tol=1e-12)
    assert y == pytest.approx(cmath.exp(2j * z1), rel=1e-10)
    assert dy == pytest.approx(2j * cmath.exp(2j * z1), rel=1e-10)


def test_wkb_basis_solves_ode_asymptotically():
    # at large |z| the basis error is O(1/z); compare transported data
    p = LaurentPotential.budden(1.0)
    yp, _, dyp, _ = wkb_basis_at(p, 0.0, 200.0, ContourPath.line(0.0, 200.0))
    y, dy = integrate_ode(p, ContourPath.line(200, 300), (yp, dyp))
    yp2, _, dyp2, _ = wkb_basis_at(p, 0.0, 300.0, ContourPath.line(0.0, 300.0))
    assert abs(y - yp2) < 1e-4
    assert abs(dy - dyp2) < 1e-4


def test_wkb_basis_wronskian():
    p = LaurentPotential.budden(1.0)
    yp, ym, dyp, dym = wkb_basis_at(p, -1.0, -200.0, ContourPath.line(-1.0, -200.0))
    assert yp * dym - ym * dyp == pytest.approx(-2j, abs=1e-12)


def test_points_sampling():
    pts = ContourPath.polyline([0, 1, 1j]).points(5)
    assert pts.shape == (10,)
    assert np.allclose(pts[[0, 4, 5, 9]], [0, 1, 1, 1j])
