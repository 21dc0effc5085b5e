"""Acceptance criteria, one test (and one PASS/FAIL line) each.

Run standalone with ``python3 tests/test_acceptance.py`` or through pytest;
the lines are repeated in the pytest terminal summary.
"""

import math
import time

import numpy as np

from qgh.dirac import (lip_seminorm, random_element, rd_scan, tail_bound_check,
                       truncated_commutator, truncated_kernel_dimension)
from qgh.fusion import build_group_dual, build_product, build_su2_like, validate_axioms
from qgh.length import fit_growth_order, folner_boundary, shell_profile, word_length
from qgh.metrics import convergence_study, cs_certificate
from qgh.multipliers import (contraction_check, counit, folner_multiplier, state_eval)

from _acceptance_log import record

S3 = [[0, 1, 2, 3, 4, 5], [1, 2, 0, 4, 5, 3], [2, 0, 1, 5, 3, 4],
      [3, 5, 4, 0, 2, 1], [4, 3, 5, 1, 0, 2], [5, 4, 3, 2, 1, 0]]


def _level_one(A):
    return word_length(A, [i for i in range(A.n) if A.level[i] == 1])


def _pair(A):
    return A, _level_one(A)


def _zdual(cap):
    return _pair(build_group_dual(1, cap))


def _su2(cap):
    return _pair(build_su2_like("SU2", cap))


def test_criterion_1_fusion_axioms():
    t0 = time.perf_counter()
    algebras = [build_group_dual(d, 10) for d in (1, 2, 3)]
    algebras += [build_su2_like("SU2", 40), build_su2_like("SO3", 40)]
    algebras += [build_su2_like("ON_plus", 20, N=N) for N in (2, 3, 4)]
    bad, worst = [], 0.0
    for A in algebras:
        rep = validate_axioms(A)
        if A.group and rep.max_dim_defect != 0:
            bad.append(f"{A.name}: inexact dimension identity")
        worst = max(worst, rep.max_dim_defect)
        if not rep.ok:
            bad.append(f"{A.name}: {rep.violations[0]}")
    elapsed = time.perf_counter() - t0
    ok = not bad and worst <= 1e-9 and elapsed < 10
    record(1, ok, f"{len(algebras)} algebras, violations={bad or 0}, max dim defect={worst:.1e}, "
                  f"{elapsed:.1f}s (< 10s)")
    assert ok


def test_criterion_2_growth():
    A, ell = _su2(60)
    T = shell_profile(A, ell, 60)
    exact = bool(np.array_equal(T.shell_sum, (T.n + 1.0) ** 2))
    fit = fit_growth_order(T, 10, 60)
    Z, lz = _zdual(60)
    zfit = fit_growth_order(shell_profile(Z, lz, 60), 10, 60)
    ok = (exact and 1.9 <= fit.s <= 2.1 and fit.strong
          and -0.05 <= zfit.s <= 0.05 and zfit.strong)
    record(2, ok, f"SU2 shells=(n+1)^2: {exact}, s_hat={fit.s:.4f} strong={fit.strong}; "
                  f"Z dual s_hat={zfit.s:.2e} strong={zfit.strong}")
    assert ok


def test_criterion_3_folner():
    Z, lz = _zdual(102)
    gens = [Z.index(1), Z.index(-1)]
    z_bad = []
    for lam in range(1, 101):
        r = folner_boundary(Z, lz, lam, gens)
        if not (r.boundary_weight == 4 and r.bulk_weight == 2 * lam + 1):
            z_bad.append(lam)
    A, ell = _su2(102)
    dev = max(abs(lam * folner_boundary(A, ell, lam, [A.index(1)]).ratio - 6)
              for lam in range(50, 101))
    ok = not z_bad and dev <= 0.5
    record(3, ok, f"Z dual ratio == 4/(2L+1) for L=1..100 (mismatches: {z_bad or 'none'}); "
                  f"SU2 max |L*ratio - 6| on 50..100 = {dev:.4f} (<= 0.5)")
    assert ok


def test_criterion_4_rapid_decay():
    A, ell = _su2(140)
    r = rd_scan(A, ell, 2, 1000, 30, seed=2024)
    target = math.pi / math.sqrt(6)
    ok = r.violations == 0 and r.worst_ratio <= r.C_theory and abs(r.C_theory - target) <= 1e-3
    record(4, ok, f"SU2 s=2: 1000 samples, violations={r.violations}, worst ratio="
                  f"{r.worst_ratio:.4f}, C_theory={r.C_theory:.5f} (pi/sqrt6={target:.5f})")
    assert ok


def test_criterion_5_commutator_structure():
    cases = [_zdual(20), _pair(build_group_dual(2, 12)),
             _pair(build_group_dual(3, 8)), _su2(20),
             _pair(build_su2_like("SO3", 20)),
             _pair(build_su2_like("ON_plus", 20, N=3)),
             _pair(build_product(build_group_dual(1, 12),
                                                            build_su2_like("SU2", 12)))]
    rng = np.random.default_rng(5)
    worst, count = 0.0, 0
    for j in range(500):
        A, ell = cases[j % len(cases)]
        f = random_element(A, ell, rng, 3)
        lev = 4
        D = truncated_commutator(A, ell, f, 1, lev).matrix
        Ds = truncated_commutator(A, ell, f.adjoint(), 1, lev).matrix
        worst = max(worst, float(np.abs(D.conj().T + Ds).max()))
        count += 1
    kern = {}
    for name, (A, ell) in (("Z dual", _zdual(30)), ("SU2", _su2(30))):
        kern[name] = [truncated_kernel_dimension(A, ell, 1, lam) for lam in range(0, 13)]
    kern_ok = all(v == 1 for ks in kern.values() for v in ks)
    ok = worst <= 1e-12 and kern_ok
    record(5, ok, f"antisymmetry max defect {worst:.1e} over {count} elements "
                  f"({len(cases)} algebras); kernel dims for L<=12: "
                  + ", ".join(f"{k}={sorted(set(v))}" for k, v in kern.items()))
    assert ok


def test_criterion_6_fejer():
    Z, lz = _zdual(110)
    k = np.array(Z.keys)
    bad = []
    for lam in range(0, 51):
        phi = folner_multiplier(Z, lz, lam)
        expect = np.maximum(2 * lam + 1 - np.abs(k), 0) / (2 * lam + 1)
        if np.abs(phi.phi - expect).max() > 1e-14:
            bad.append(lam)
    units = []
    for A in (build_group_dual(2, 6), build_group_dual(3, 4), build_su2_like("SU2", 10),
              build_su2_like("SO3", 10), build_su2_like("ON_plus", 10, N=4),
              build_group_dual(S3, 3), build_product(build_group_dual(1, 6),
                                                     build_su2_like("SU2", 6))):
        ell = _level_one(A)
        lam = 2 if A.cap >= 4 else 1
        units.append(folner_multiplier(A, ell, lam).phi[A.unit])
    unit_ok = all(abs(u - 1) <= 1e-14 for u in units)
    ok = not bad and unit_ok
    record(6, ok, f"Z dual Fejér identity for L=0..50 (mismatches: {bad or 'none'}); "
                  f"phi(e)=1 on {len(units)} further algebras: {unit_ok}")
    assert ok


def test_criterion_7_contraction():
    Z, lz = _zdual(80)
    rz = contraction_check(Z, lz, folner_multiplier(Z, lz, 10), 1, 500, seed=7)
    A, ell = _su2(80)
    rs = contraction_check(A, ell, folner_multiplier(A, ell, 8), 3, 500, seed=7)
    ok = (rz.violations == 0 and rs.violations == 0 and rz.truncated_violations == 0
          and rs.truncated_violations == 0)
    record(7, ok, f"Z dual k=1 L=10: {rz.violations}+{rz.truncated_violations} violations "
                  f"(worst slack {rz.worst_slack:.3g}); SU2 k=3 L=8: "
                  f"{rs.violations}+{rs.truncated_violations} violations "
                  f"(worst slack {rs.worst_slack:.3g})")
    assert ok


def test_criterion_8_certificate_and_convergence():
    t0 = time.perf_counter()
    Z, lz = _zdual(400)
    lam = 10
    phi = folner_multiplier(Z, lz, lam)
    B = cs_certificate(phi, lz, 1).B
    rng = np.random.default_rng(8)
    worst = -math.inf
    for _ in range(1000):
        a = random_element(Z, lz, rng, 3 * lam, self_adjoint=True)
        L = lip_seminorm(Z, lz, a, 1, 3 * lam, check=False).value
        gap = abs(counit(a) - state_eval(phi, a))
        worst = max(worst, gap - B * L)
    levels = [10, 20, 40, 80, 100]
    dev = {L: abs(cs_certificate(folner_multiplier(Z, lz, L), lz, 1).B * math.sqrt(L)
                  - math.sqrt(2)) for L in levels}
    rep = convergence_study(Z, lz, 1, levels, samples=10, seed=8,
                            sample_radius=lambda L: 2 * L)
    up = rep.column("delta_upper")
    low = rep.column("delta_lower")
    decreasing = bool(np.all(np.diff(up) < 0))
    halved = up[levels.index(80)] < up[levels.index(10)] / 2
    elapsed = time.perf_counter() - t0
    ok = (worst <= 1e-9 and max(dev.values()) <= 0.06 and decreasing and halved
          and bool(np.all(low <= up)) and elapsed < 300)
    record(8, ok, f"soundness worst excess {worst:.3g} on 1000 samples; max |B sqrt(L) - sqrt2| = "
                  f"{max(dev.values()):.4f}; delta_upper decreasing={decreasing}, "
                  f"d(80) < d(10)/2: {halved}; {elapsed:.0f}s")
    assert ok


def test_criterion_9_tail_estimate():
    A, ell = _su2(80)
    r = tail_bound_check(A, ell, 3, 2, 20, 200, seed=9)
    ok = r.all_pass and r.worst_slack >= 0
    record(9, ok, f"SU2 s=2 k=3 n=20: 200 samples, worst slack {r.worst_slack:.4g} (>= 0)")
    assert ok


if __name__ == "__main__":
    import sys

    failed = 0
    for name, fn in sorted(globals().items()):
        if name.startswith("test_criterion_"):
            try:
                fn()
            except AssertionError:
                failed += 1
    sys.exit(1 if failed else 0)
