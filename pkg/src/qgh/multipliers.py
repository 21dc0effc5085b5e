"""Følner multipliers, the states they induce and their smoothing action."""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping, NamedTuple

import numpy as np

from ._parallel import pmap
from .dirac import Element, lip_seminorm, random_element, truncated_seminorm
from .fusion import FusionAlgebra, WindowError
from .length import LengthFunction

__all__ = [
    "MultiplierState", "folner_multiplier", "apply_multiplier", "state_eval", "counit",
    "contraction_check", "ContractionReport", "gram_min_eigenvalue", "positive_definite_check",
]


@dataclass(frozen=True, eq=False)
class MultiplierState:
    """Multiplier ``phi`` on labels (zero outside the computed window).

    ``window_complete`` is False when ``phi`` was only known on part of
    the algebra; values outside are then treated as 0.
    """

    algebra: FusionAlgebra
    phi: np.ndarray
    level: float | None = None
    normalization: float | None = None
    window_complete: bool = True

    @classmethod
    def from_values(cls, A: FusionAlgebra, values, level=None) -> "MultiplierState":
        """Build from an array, a ``{key: value}`` mapping or a callable on keys."""
        if callable(values):
            phi = np.array([float(values(k)) for k in A.keys])
        elif isinstance(values, Mapping):
            phi = np.zeros(A.n)
            for k, v in values.items():
                phi[A.index(k)] = float(v)
        else:
            phi = np.asarray(values, dtype=float).copy()
            if phi.shape != (A.n,):
                raise ValueError(f"phi must have {A.n} entries, got {phi.shape}")
        return cls(A, phi, level)

    def __call__(self, key) -> float:
        return float(self.phi[self.algebra.index(key)])

    @property
    def support(self) -> np.ndarray:
        return np.flatnonzero(self.phi != 0)

    def bound_violations(self, tol: float = 1e-12) -> list[tuple[object, float]]:
        """Labels with ``phi`` outside ``[0, 1]``."""
        bad = np.flatnonzero((self.phi < -tol) | (self.phi > 1 + tol))
        return [(self.algebra.keys[i], float(self.phi[i])) for i in bad]

    def conjugation_defect(self) -> float:
        return float(np.abs(self.phi - self.phi[self.algebra.conj]).max(initial=0.0))

    def rows(self):
        return [(self.algebra.keys[i], float(self.phi[i])) for i in self.support]


def folner_multiplier(A: FusionAlgebra, ell: LengthFunction, level: float) -> MultiplierState:
    """``phi(p) = sum_{a,b in A_L} N_{conj a, b}^p d(a) d(b) / (d(p) sum_{x in A_L} d(x)^2)``."""
    ball = ell.sublevel(level)
    d = A.dim
    a = np.repeat(ball, len(ball))
    b = np.tile(ball, len(ball))
    pos, c, m, comp = A.pair_products(A.conj[a], b)
    if not comp.all():
        j = np.flatnonzero(~comp)[0]
        raise WindowError(f"fusion of {A.keys[A.conj[a[j]]]!r} x {A.keys[b[j]]!r} is outside "
                          f"the enumerated window of {A.name}; need conj(A_L) x A_L at L={level:g}")
    num = np.zeros(A.n)
    np.add.at(num, c, m * d[a[pos]] * d[b[pos]])
    norm = float((d[ball] ** 2).sum())
    return MultiplierState(A, num / (d * norm), level, norm, True)


def apply_multiplier(phi: MultiplierState, f: Element) -> Element:
    out = {i: v * phi.phi[i] for i, v in f.coeffs.items() if phi.phi[i] != 0}
    return Element(f.algebra, out)


def state_eval(phi: MultiplierState, f: Element) -> complex:
    """``chi(f) = sum f(a) phi(a) d(a)``."""
    supp, vals = f.arrays()
    if not len(supp):
        return 0j
    return complex((vals * phi.phi[supp] * phi.algebra.dim[supp]).sum())


def counit(f: Element) -> complex:
    supp, vals = f.arrays()
    return complex((vals * f.algebra.dim[supp]).sum()) if len(supp) else 0j


class ContractionReport(NamedTuple):
    samples: int
    violations: int
    worst_slack: float
    truncated_violations: int
    worst_truncated_slack: float
    offending: Element | None


def contraction_check(A: FusionAlgebra, ell: LengthFunction, phi: MultiplierState, k: int,
                      samples: int, window: float | None = None, seed: int = 0,
                      radius: float | None = None, tol: float = 1e-9) -> ContractionReport:
    """Compare ``L^k(T_phi f)`` with ``L^k(f)`` for random self-adjoint ``f``.

    Both seminorms use the same domain window ``{l <= window}`` (default
    three times the multiplier level).  The truncated seminorm of ``T_phi f``
    at the multiplier level is compared against the same window value of
    ``f``.  Slack is ``rhs + tol - lhs``; negative slack is a violation.
    """
    level = phi.level if phi.level is not None else 0
    window = 3 * level if window is None else window
    radius = window if radius is None else radius
    rng = np.random.default_rng(seed)
    fs = [random_element(A, ell, rng, radius, self_adjoint=True) for _ in range(samples)]

    def one(f):
        Tf = apply_multiplier(phi, f)
        rhs = lip_seminorm(A, ell, f, k, window, check=False).value
        lhs = lip_seminorm(A, ell, Tf, k, window, check=False).value
        lt = truncated_seminorm(A, ell, Tf, k, level).value if phi.level is not None else 0.0
        return rhs + tol - lhs, rhs + tol - lt

    out = np.array(pmap(one, fs)).reshape(-1, 2)
    if not len(out):
        return ContractionReport(0, 0, np.inf, 0, np.inf, None)
    bad = np.flatnonzero((out < 0).any(axis=1))
    return ContractionReport(samples, int((out[:, 0] < 0).sum()), float(out[:, 0].min()),
                             int((out[:, 1] < 0).sum()), float(out[:, 1].min()),
                             fs[bad[0]] if len(bad) else None)


def gram_min_eigenvalue(phi: MultiplierState, ell: LengthFunction, window: float) -> float:
    """Smallest eigenvalue of ``[phi(g^-1 h)]`` over ``{l <= window}`` (group duals only)."""
    A = phi.algebra
    if not A.group or np.any(A.dim != 1):
        raise ValueError(f"positivity is only certified for group duals; {A.name} is not one")
    idx = ell.sublevel(window)
    g = np.repeat(idx, len(idx))
    h = np.tile(idx, len(idx))
    pos, c, _, comp = A.pair_products(A.conj[g], h)
    if not comp.all():
        raise WindowError(f"g^-1 h products leave the enumerated window of {A.name}")
    G = np.zeros(len(g))
    G[pos] = phi.phi[c]
    return float(np.linalg.eigvalsh(G.reshape(len(idx), len(idx)))[0])


def positive_definite_check(phi: MultiplierState, ell: LengthFunction, window: float,
                            tol: float = 1e-10) -> bool:
    return gram_min_eigenvalue(phi, ell, window) >= -tol
