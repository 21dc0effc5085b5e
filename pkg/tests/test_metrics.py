import math

import numpy as np
import pytest

from qgh.dirac import Element, lip_seminorm, random_element
from qgh.fusion import build_group_dual
from qgh.length import word_length
from qgh.metrics import (ContractionFailure, convergence_study, convex_state, counit_state,
                         cs_certificate, mk_lower_bound, multiplier_state, rieffel_delta,
                         self_adjoint_basis, vector_state)
from qgh.multipliers import MultiplierState, counit, folner_multiplier, state_eval


def zdual_certificate_sq(lam):
    """Window part plus the exact tail, summed directly."""
    m = 2 * lam + 1
    window = 2 * sum((k / m) ** 2 / k ** 2 for k in range(1, 2 * lam + 1))
    tail = 2 * (math.pi ** 2 / 6 - sum(1 / k ** 2 for k in range(1, 2 * lam + 1)))
    return window + tail


def test_certificate_zdual_value(zdual):
    Z, ell = zdual
    c = cs_certificate(folner_multiplier(Z, ell, 10), ell, 1)
    assert c.B == pytest.approx(0.434, abs=1e-3)
    assert c.B ** 2 >= zdual_certificate_sq(10)
    assert c.B ** 2 == pytest.approx(zdual_certificate_sq(10), rel=1e-3)
    assert c.window_part + c.tail_part == pytest.approx(c.B ** 2)


def test_certificate_scaling(zdual):
    Z, ell = zdual
    for lam in (10, 40, 100):
        B = cs_certificate(folner_multiplier(Z, ell, lam), ell, 1).B
        assert abs(B * math.sqrt(lam) - math.sqrt(2)) <= 0.06


def test_certificate_vanishes_for_trivial_multiplier():
    m = 5
    A = build_group_dual([[(i + j) % m for j in range(m)] for i in range(m)], 3)
    ell = word_length(A, [i for i in range(A.n) if A.level[i] == 1])
    one = MultiplierState.from_values(A, np.ones(A.n))
    assert cs_certificate(one, ell, 1).B == 0


def test_certificate_is_sound(zdual, rng):
    Z, ell = zdual
    phi = folner_multiplier(Z, ell, 5)
    B = cs_certificate(phi, ell, 1).B
    for _ in range(100):
        a = random_element(Z, ell, rng, 15, self_adjoint=True)
        L = lip_seminorm(Z, ell, a, 1, 15, check=False).value
        assert abs(counit(a) - state_eval(phi, a)) <= B * L + 1e-9


def test_mk_identical_states(zdual):
    Z, ell = zdual
    s = multiplier_state(folner_multiplier(Z, ell, 2))
    assert mk_lower_bound(Z, ell, s, s, 1, radius=3).lower == 0


def test_mk_witness_example(zdual):
    Z, ell = zdual
    phi = folner_multiplier(Z, ell, 1)
    a = Element.from_keys(Z, {1: 1, -1: 1})
    La = lip_seminorm(Z, ell, a, 1, 3, check=False).value
    explicit = abs(counit(a) - state_eval(phi, a)) / La
    assert explicit == pytest.approx((1 - 2 / 3) * 2 / La)
    b = mk_lower_bound(Z, ell, counit_state(), multiplier_state(phi), 1, radius=3, seed=4)
    assert b.lower >= explicit - 1e-12
    assert b.lower <= cs_certificate(phi, ell, 1).B
    assert b.witness.is_self_adjoint(1e-12)


def test_mk_symmetry_and_scaling(zdual):
    Z, ell = zdual
    phi = folner_multiplier(Z, ell, 2)
    e, x = counit_state(), multiplier_state(phi)
    a = mk_lower_bound(Z, ell, e, x, 1, radius=3, seed=4)
    b = mk_lower_bound(Z, ell, x, e, 1, radius=3, seed=4)
    c = mk_lower_bound(Z, ell, e, x, 1, radius=3, seed=4, scale=2.0)
    assert a.lower == pytest.approx(b.lower, rel=1e-12)
    assert c.lower == pytest.approx(a.lower / 2)


def test_states_are_unital_and_hermitian(su2, rng):
    A, ell = su2
    e = Element.delta(A, A.unit)
    xi = {0: 1.0, 1: 0.5j, 3: -0.25}
    states = [counit_state(), multiplier_state(folner_multiplier(A, ell, 3)),
              vector_state(A, ell, xi)]
    states.append(convex_state([(0.5, states[0]), (0.25, states[1]), (0.25, states[2])]))
    f = random_element(A, ell, rng, 4, self_adjoint=True)
    for s in states:
        assert s(e) == pytest.approx(1)
        assert abs(s(f).imag) < 1e-12
    with pytest.raises(ValueError):
        convex_state([(0.7, states[0]), (0.7, states[1])])


def test_self_adjoint_basis(su2):
    A, ell = su2
    basis = self_adjoint_basis(A, ell, 4)
    assert len(basis) == 4
    assert all(b.is_self_adjoint() for b in basis)


def test_rieffel_bracket(zdual):
    Z, ell = zdual
    phi = folner_multiplier(Z, ell, 5)
    r = rieffel_delta(Z, ell, phi, 1, 20, seed=3)
    assert 0 < r.delta_lower <= r.delta_upper


def test_rieffel_aborts_on_contraction_failure(zdual):
    Z, ell = zdual
    bad = MultiplierState.from_values(Z, lambda k: 3.0 if abs(k) == 1 else 1.0, level=4)
    with pytest.raises(ContractionFailure) as exc:
        rieffel_delta(Z, ell, bad, 1, 20, seed=3, radius=3)
    assert exc.value.sample is not None


def test_convergence_study(zdual, su2):
    Z, lz = zdual
    rep = convergence_study(Z, lz, 1, [5, 10, 20], samples=5, seed=1)
    up = rep.column("delta_upper")
    assert np.all(np.diff(up) < 0)
    assert np.all(rep.column("delta_lower") <= up)
    assert np.all(rep.column("mk_lower") <= rep.column("mk_upper"))
    assert np.all(np.isnan(rep.column("runtime")))
    assert convergence_study(Z, lz, 1, [], samples=5).rows == []
    A, ell = su2
    rep = convergence_study(A, ell, 3, [4, 8, 16, 32], samples=5, seed=1)
    assert np.all(np.isfinite(rep.column("delta_upper")))
    assert np.all(np.diff(rep.column("delta_upper")) < 0)
