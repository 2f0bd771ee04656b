"""The brute-force oracles validate themselves on closed-form targets and
cross-check the production routines on tiny instances."""

import math

import numpy as np
import pytest

import lielength as ll
from lielength import oracles


def u1(z):
    alg = ll.scalar_complex()
    return ll.GroupElement(ll.MatrixOverAlgebra(alg, np.array([[z]])), "U")


def test_bruteforce_identity():
    value = oracles.oracle_el_bruteforce(u1(1.0 + 0j), grid_points=101,
                                         max_factors=2)
    assert value == pytest.approx(0.0, abs=1e-12)


def test_bruteforce_minus_one_hits_pi():
    value = oracles.oracle_el_bruteforce(u1(-1.0 + 0j), grid_points=101,
                                         max_factors=2)
    resolution = 2 * math.pi / 100
    assert abs(value - math.pi) <= resolution


def test_bruteforce_quarter_turn():
    value = oracles.oracle_el_bruteforce(u1(np.exp(1j * math.pi / 2)),
                                         grid_points=101, max_factors=2)
    resolution = 2 * math.pi / 100
    assert abs(value - math.pi / 2) <= resolution


def test_bruteforce_budget_enforced():
    with pytest.raises(oracles.OracleBudgetError):
        oracles.oracle_el_bruteforce(u1(1j), grid_points=1001, max_factors=3)


def test_bruteforce_validates_estimator_on_u1():
    rng = np.random.default_rng(0)
    for _ in range(5):
        theta = rng.uniform(-math.pi, math.pi)
        g = u1(np.exp(1j * theta))
        bracket = ll.el_estimate(g, seed=0)
        reference = oracles.oracle_el_bruteforce(g, grid_points=201,
                                                 max_factors=2)
        # the oracle admits products within the grid tolerance of the
        # target, so it can land one cell on either side of the true value
        resolution = 2 * math.pi / 200
        assert abs(bracket.upper - reference) <= resolution


def test_quotient_oracle_zero_and_half():
    f0 = ll.CircleFunction(ll.DiscretizedSpace(3, [(0, 1)]), np.zeros(3))
    assert oracles.oracle_quotient_norm(f0) == 0.0
    f = ll.CircleFunction(ll.DiscretizedSpace(1, ()), [0.5])
    assert oracles.oracle_quotient_norm(f) == 0.5


def test_quotient_oracle_matches_closed_form():
    rng = np.random.default_rng(1)
    for _ in range(200):
        v = int(rng.integers(1, 7))
        edges = [(k, k + 1) for k in range(v - 1) if rng.random() < 0.5]
        lift = rng.uniform(-3, 3) + rng.uniform(-0.2, 0.2, size=v)
        f = ll.CircleFunction(ll.DiscretizedSpace(v, edges), lift % 1.0)
        assert oracles.oracle_quotient_norm(f, 5) == ll.quotient_norm(f)


def test_quotient_oracle_component_cap():
    f = ll.CircleFunction(ll.DiscretizedSpace(7, ()), np.zeros(7))
    with pytest.raises(oracles.OracleBudgetError):
        oracles.oracle_quotient_norm(f)
