from fractions import Fraction

import numpy as np
import pytest

from qgh.dirac import Element
from qgh.fusion import WindowError, build_group_dual, build_su2_like
from qgh.length import word_length
from qgh.multipliers import (MultiplierState, apply_multiplier, contraction_check,
                             folner_multiplier, gram_min_eigenvalue, positive_definite_check,
                             state_eval)


def su2_phi_oracle(lam, p):
    """Direct Clebsch-Gordan enumeration with exact arithmetic."""
    num = sum((a + 1) * (b + 1) for a in range(lam + 1) for b in range(lam + 1)
              if abs(a - b) <= p <= a + b and (a + b + p) % 2 == 0)
    norm = sum((x + 1) ** 2 for x in range(lam + 1))
    return Fraction(num, (p + 1) * norm)


def test_zdual_small_level(zdual):
    Z, ell = zdual
    phi = folner_multiplier(Z, ell, 1)
    assert [phi(k) for k in (0, 1, 2, 3)] == pytest.approx([1, 2 / 3, 1 / 3, 0])
    assert state_eval(phi, Element.delta(Z, Z.index(1))) == pytest.approx(2 / 3)


def test_su2_level_two(su2):
    A, ell = su2
    phi = folner_multiplier(A, ell, 2)
    assert su2_phi_oracle(2, 1) == Fraction(4, 7)
    assert phi(1) == pytest.approx(4 / 7, abs=1e-15)
    assert phi.normalization == 14
    assert state_eval(phi, Element.delta(A, 1)) == pytest.approx(8 / 7)


@pytest.mark.parametrize("lam", [1, 3, 6, 10])
def test_su2_matches_oracle(su2, lam):
    A, ell = su2
    phi = folner_multiplier(A, ell, lam)
    for p in range(2 * lam + 3):
        assert phi(p) == pytest.approx(float(su2_phi_oracle(lam, p)), abs=1e-14)


@pytest.mark.parametrize("A", [build_group_dual(2, 6), build_su2_like("SO3", 8),
                               build_su2_like("ON_plus", 8, N=3)], ids=["Z2", "SO3", "O3+"])
def test_unit_bounds_and_conjugation(A):
    ell = word_length(A, [i for i in range(A.n) if A.level[i] == 1])
    phi = folner_multiplier(A, ell, 3)
    assert phi.phi[A.unit] == pytest.approx(1, abs=1e-15)
    assert phi.bound_violations() == []
    assert phi.conjugation_defect() == 0


def test_fejer_identity(zdual):
    Z, ell = zdual
    k = np.array(Z.keys)
    for lam in (0, 4, 17):
        expect = np.maximum(2 * lam + 1 - np.abs(k), 0) / (2 * lam + 1)
        assert np.abs(folner_multiplier(Z, ell, lam).phi - expect).max() < 1e-15


def test_pointwise_convergence(zdual):
    Z, ell = zdual
    phi = folner_multiplier(Z, ell, 200)
    assert 1 - phi(1) == pytest.approx(1 / 401)
    assert 1 - phi(1) < 3e-3


def test_apply_multiplier(zdual):
    Z, ell = zdual
    phi = folner_multiplier(Z, ell, 1)
    f = Element.from_keys(Z, {1: 1, 3: 1})
    Tf = apply_multiplier(phi, f)
    assert set(Tf.coeffs) == {Z.index(1)}
    assert Tf(Z.index(1)) == pytest.approx(2 / 3)
    e = apply_multiplier(phi, Element.delta(Z, Z.unit))
    assert e(Z.unit) == 1
    g = Element.from_keys(Z, {1: 1.0, -2: 2.0})
    twice = apply_multiplier(phi, apply_multiplier(phi, g))
    assert twice(Z.index(-2)) == pytest.approx(2 * phi(-2) ** 2)


def test_support_confinement(zdual):
    Z, ell = zdual
    phi = folner_multiplier(Z, ell, 3)
    f = Element.from_keys(Z, {7: 1.0, -9: 2.5j})
    assert state_eval(phi, f) == 0


def test_window_required():
    A = build_su2_like("SU2", 5)
    ell = word_length(A, [1])
    with pytest.raises(WindowError):
        folner_multiplier(A, ell, 3)


def test_positive_definite(zdual):
    Z, ell = zdual
    assert positive_definite_check(folner_multiplier(Z, ell, 5), ell, 15)
    box = MultiplierState.from_values(Z, lambda k: 1.0 if abs(k) <= 5 else 0.0)
    assert not positive_definite_check(box, ell, 40)
    delta = MultiplierState.from_values(Z, {0: 1.0})
    assert positive_definite_check(delta, ell, 10)
    assert gram_min_eigenvalue(delta, ell, 10) == pytest.approx(1)


def test_positivity_refused_off_group_duals(su2):
    A, ell = su2
    with pytest.raises(ValueError, match="group duals"):
        positive_definite_check(folner_multiplier(A, ell, 2), ell, 4)


def test_contraction_small(zdual, su2):
    Z, lz = zdual
    r = contraction_check(Z, lz, folner_multiplier(Z, lz, 4), 1, 30, seed=1)
    assert r.violations == 0 and r.truncated_violations == 0 and r.offending is None
    A, ell = su2
    r = contraction_check(A, ell, folner_multiplier(A, ell, 4), 1, 30, seed=1)
    assert r.violations == 0


def test_contraction_flags_expanding_multiplier(zdual):
    Z, ell = zdual
    bad = MultiplierState.from_values(Z, lambda k: 3.0 if abs(k) == 1 else 1.0, level=4)
    r = contraction_check(Z, ell, bad, 1, 20, seed=2)
    assert r.violations > 0 and r.offending is not None
