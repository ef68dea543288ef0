import cmath
import math

import numpy as np
import pytest

from phaseint.contour import ContourPath
from phaseint.errors import ContourError
from phaseint.frobenius import build_series, indicial_roots
from phaseint.monodromy import (RotationMatrix, circle_monodromy, cluster_report, eigenstructure,
                                expected_frobenius_monodromy, in_frobenius_basis,
                                numerical_monodromy, trace_relation_check)
from phaseint.potential import LaurentPotential, parse_potential


@pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
def test_budden_trace_and_det(c):
    m = circle_monodromy(LaurentPotential.budden(c), 0.5)
    assert abs(m.trace - 2) < 1e-10
    assert abs(m.det - 1) < 1e-11


@pytest.mark.parametrize("c", [0.5, 1.0, 2.0])
def test_budden_is_jordan_block_in_frobenius_basis(c):
    p = LaurentPotential.budden(c)
    m = circle_monodromy(p, 0.5)
    s = build_series(p)
    got = in_frobenius_basis(m, s)
    assert np.allclose(got, expected_frobenius_monodromy(s), atol=1e-9)
    assert got[0, 1] == pytest.approx(-2j * math.pi * c, abs=1e-9)
    _, _, diag = eigenstructure(m, 1)
    assert diag is False


def test_euler_monodromy_is_identity():
    m = circle_monodromy(parse_potential("-2*z^-2"), 1.0)
    assert np.allclose(m.entries, np.eye(2), atol=1e-10)
    l1, l2, diag = eigenstructure(m, 2)
    assert diag is True
    assert l1 == pytest.approx(1) and l2 == pytest.approx(1)


def test_non_resonant_eigenvalues():
    q = -0.3 + 0.1j
    p = LaurentPotential([(1, 0), (q, -2)])
    m = circle_monodromy(p, 0.6)
    f1, f2 = indicial_roots(q)
    l1, l2, diag = eigenstructure(m, f1)
    assert diag
    assert l1 == pytest.approx(cmath.exp(2j * math.pi * f1), abs=1e-9)
    assert l2 == pytest.approx(cmath.exp(2j * math.pi * f2), abs=1e-9)


def test_random_second_order_poles(rng):
    for q in rng.uniform(-2, 0.24, 10):
        p = LaurentPotential([(1, 0), (q, -2)])
        f1, _ = indicial_roots(q)
        m = circle_monodromy(p, 0.5 * min(1.0, math.sqrt(abs(q))))
        assert abs(trace_relation_check(m, f1)) < 1e-9
        assert abs(m.det - 1) < 1e-9


def test_double_loop_squares():
    p = LaurentPotential.budden(1.0)
    one = circle_monodromy(p, 0.5)
    two = numerical_monodromy(p, ContourPath.circle(0, 0.5, turns=2), 0.5)
    assert np.allclose(two.entries, one.entries @ one.entries, atol=1e-9)


def test_reversed_loop_inverts():
    p = LaurentPotential.budden(1.0)
    fwd = circle_monodromy(p, 0.5)
    back = numerical_monodromy(p, ContourPath.circle(0, 0.5).reversed(), 0.5)
    assert np.allclose(back.entries @ fwd.entries, np.eye(2), atol=1e-9)


def test_contour_enclosing_turning_point_keeps_trace():
    # the turning point is not singular for the ODE; only the pole matters
    p = LaurentPotential.budden(1.0)
    m = circle_monodromy(p, 3.0)
    assert abs(m.trace - 2) < 1e-9


def test_open_contour_rejected():
    with pytest.raises(ContourError):
        numerical_monodromy(LaurentPotential.budden(1.0), ContourPath.line(1, 2))


def test_cluster_report():
    p = LaurentPotential.budden(1.0)
    rep = cluster_report(p, ContourPath.circle(0, 4))
    assert abs(rep.residual) < 1e-9
    assert 0 < rep.max_validity < 0.02
    # larger loops see smaller eps but exponentially larger solutions
    assert cluster_report(p, ContourPath.circle(0, 6)).max_validity < rep.max_validity


def test_eigenstructure_of_explicit_matrices():
    jordan = RotationMatrix(np.array([[1, 1], [0, 1]], dtype=complex))
    assert eigenstructure(jordan)[2] is False
    assert eigenstructure(RotationMatrix(np.eye(2, dtype=complex)))[2] is True
    split = RotationMatrix(np.diag([1j, -1j]))
    assert eigenstructure(split, 0.25)[:2] == (1j, -1j)
