"""Monge-Kantorovich brackets, the Rieffel constant and per-level convergence reports."""

from __future__ import annotations

import math
import time
from dataclasses import dataclass, field
from typing import Callable, NamedTuple, Sequence

import numpy as np

from ._parallel import pmap
from .dirac import Element, _commute, _fill, OperatorWindow, \
    left_regular_matrix, lip_seminorm, operator_norm, random_element
from .fusion import FusionAlgebra, WindowError
from .length import LengthFunction, folner_boundary, growth_envelope, envelope_tail, \
    shell_profile
from .multipliers import MultiplierState, apply_multiplier, counit, folner_multiplier, \
    state_eval

__all__ = [
    "StateSpec", "counit_state", "multiplier_state", "vector_state", "convex_state",
    "DistanceBound", "mk_lower_bound", "Certificate", "cs_certificate", "RieffelReport",
    "ContractionFailure", "rieffel_delta", "ConvergenceReport", "REPORT_COLUMNS",
    "convergence_study", "self_adjoint_basis",
]


@dataclass(frozen=True)
class StateSpec:
    kind: str
    evaluate: Callable[[Element], complex]
    label: str = ""

    def __call__(self, f: Element) -> complex:
        return self.evaluate(f)


def counit_state() -> StateSpec:
    return StateSpec("counit", counit, "counit")


def multiplier_state(phi: MultiplierState) -> StateSpec:
    return StateSpec("multiplier", lambda f: state_eval(phi, f), f"multiplier({phi.level:g})")


def vector_state(A: FusionAlgebra, ell: LengthFunction, xi: dict) -> StateSpec:
    """``f -> <xi, pi(f) xi>`` for a finitely supported unit vector ``xi`` (label index -> coeff)."""
    idx = np.array(sorted(xi), dtype=np.int64)
    v = np.array([xi[i] for i in idx], dtype=complex)
    nrm = np.linalg.norm(v)
    if nrm == 0:
        raise ValueError("vector state needs a nonzero vector")
    v = v / nrm

    def ev(f: Element) -> complex:
        M = _fill(A, ell, f, idx, idx, False)
        return complex(v.conj() @ M @ v)

    return StateSpec("vector", ev, "vector")


def convex_state(parts: Sequence[tuple[float, StateSpec]]) -> StateSpec:
    w = np.array([p[0] for p in parts], dtype=float)
    if np.any(w < 0) or not math.isclose(w.sum(), 1.0, rel_tol=1e-12):
        raise ValueError("convex weights must be nonnegative and sum to 1")
    states = [p[1] for p in parts]
    return StateSpec("convex", lambda f: sum(c * s(f) for c, s in zip(w, states)), "convex")


def self_adjoint_basis(A: FusionAlgebra, ell: LengthFunction, radius: float,
                       include_unit: bool = False) -> list[Element]:
    """Real basis of self-adjoint elements supported on ``{l <= radius}``."""
    out = []
    for i in ell.sublevel(radius):
        i = int(i)
        j = int(A.conj[i])
        if i == A.unit and not include_unit:
            continue
        if i == j:
            out.append(Element(A, {i: 1.0}))
        elif i < j:
            out.append(Element(A, {i: 1.0, j: 1.0}))
            out.append(Element(A, {i: 1j, j: -1j}))
    return out


@dataclass
class DistanceBound:
    lower: float
    upper: float = math.nan
    witness: Element | None = None
    witness_seminorm: float = math.nan
    methods: tuple = ()


def mk_lower_bound(A: FusionAlgebra, ell: LengthFunction, phi: StateSpec, psi: StateSpec,
                   k: int = 1, radius: float = 3, N: float | None = None,
                   iterations: int = 40, restarts: int = 8, seed: int = 0,
                   scale: float = 1.0) -> DistanceBound:
    """Ascent lower bound for ``sup |phi(a) - psi(a)|`` over self-adjoint ``a`` with ``L(a) <= 1``.

    ``L`` is ``scale`` times the window seminorm of order ``k`` on
    ``{l <= N}``.  Each trial is normalised by its own seminorm; restarts
    are seeded Gaussian directions, then coordinate steps with shrinking size.
    """
    N = radius if N is None else N
    basis = self_adjoint_basis(A, ell, radius)
    if not basis:
        return DistanceBound(0.0, methods=("ascent",))
    ell.require(N + radius, "seminorm window")
    rows = np.flatnonzero(ell.values <= N + radius)
    cols = np.flatnonzero(ell.values <= N)
    mats = np.stack([_commute(ell, OperatorWindow(rows, cols, _fill(A, ell, b, rows, cols, False)),
                              k).matrix for b in basis])
    g = np.array([phi(b) - psi(b) for b in basis])
    if np.abs(g).max() <= 1e-15:
        return DistanceBound(0.0, witness=None, methods=("ascent",))

    def value(c):
        L = scale * operator_norm(np.tensordot(c, mats, axes=1))
        diff = abs(c @ g)
        if L <= 1e-13 * max(np.abs(c).max(), 1e-300):
            if diff > 1e-12:
                raise ArithmeticError("metric degeneracy: seminorm vanishes on a separating element")
            return 0.0
        return diff / L

    rng = np.random.default_rng(seed)
    starts = [g.real.copy(), g.imag.copy()] + [rng.standard_normal(len(basis))
                                               for _ in range(restarts)]
    best_v, best_c = -1.0, None
    for c in starts:
        if not np.any(c):
            continue
        v = value(c)
        step = 0.5 * np.abs(c).max()
        for _ in range(iterations):
            improved = False
            for j in range(len(c)):
                for sgn in (1.0, -1.0):
                    t = c.copy()
                    t[j] += sgn * step
                    tv = value(t)
                    if tv > v + 1e-15:
                        c, v, improved = t, tv, True
                        break
            if not improved:
                step *= 0.5
                if step < 1e-9 * np.abs(c).max():
                    break
        if v > best_v:
            best_v, best_c = v, c
    w = Element(A, {})
    for cj, b in zip(best_c, basis):
        w = w + b * cj
    Lw = scale * operator_norm(np.tensordot(best_c, mats, axes=1))
    return DistanceBound(float(best_v), witness=w, witness_seminorm=Lw, methods=("ascent", "coordinate"))


class Certificate(NamedTuple):
    B: float
    window_part: float
    tail_part: float
    window: float


def cs_certificate(phi: MultiplierState, ell: LengthFunction, k: int = 1,
                   window: float | None = None, envelope=None) -> Certificate:
    """Upper bound ``B`` with ``|counit(a) - chi(a)| <= B L^k(a)``.

    ``B^2 = sum_{a != e} (1 - phi(a))^2 d(a)^2 / l(a)^{2k}``; the window part
    is summed exactly and labels beyond the window (where ``phi = 0``) are
    bounded with the growth envelope.  Parts are reported squared.
    """
    A = phi.algebra
    W = ell.complete_to if window is None else window
    if math.isfinite(W):
        W = math.floor(W)
        ell.require(W, "certificate window")
    if phi.support.size and ell.values[phi.support].max() > W:
        raise WindowError(f"certificate window {W} does not cover the multiplier support")
    sel = (ell.values <= W) & (np.arange(A.n) != A.unit)
    if np.any(ell.values[sel] <= 0):
        raise ValueError("certificate needs a proper length (l > 0 off the unit)")
    head = float(((1 - phi.phi[sel]) ** 2 * A.dim[sel] ** 2 / ell.values[sel] ** (2 * k)).sum())
    if not math.isfinite(W):
        return Certificate(math.sqrt(head), head, 0.0, W)
    if envelope is None:
        envelope = growth_envelope(shell_profile(A, ell, W))
    tail = envelope_tail(envelope, W, 2 * k, shift=0, integer=ell.integer_valued)
    return Certificate(math.sqrt(head + tail), head, tail, W)


class ContractionFailure(ArithmeticError):
    def __init__(self, msg: str, sample: Element):
        super().__init__(msg)
        self.sample = sample


class RieffelReport(NamedTuple):
    delta_lower: float
    delta_upper: float
    samples: int
    worst_contraction_slack: float


def rieffel_delta(A: FusionAlgebra, ell: LengthFunction, phi: MultiplierState, k: int,
                  samples: int, radius: float | None = None, seed: int = 0,
                  N: float | None = None, certificate: Certificate | None = None,
                  tol: float = 1e-9) -> RieffelReport:
    """Sampled ``max ||f - T f|| / L^k(f)`` against the certificate.

    Every sample is first checked for contraction on the matched window;
    a failure raises :class:`ContractionFailure` carrying the sample.
    """
    level = phi.level or 0
    radius = 2 * level + 1 if radius is None else radius
    N = radius if N is None else N
    cert = cs_certificate(phi, ell, k) if certificate is None else certificate
    rng = np.random.default_rng(seed)
    fs = [random_element(A, ell, rng, radius, self_adjoint=True) for _ in range(samples)]

    def one(f):
        Tf = apply_multiplier(phi, f)
        L = lip_seminorm(A, ell, f, k, N, check=False).value
        LT = lip_seminorm(A, ell, Tf, k, N, check=False).value
        if L <= 1e-13:
            return 0.0, L + tol - LT
        gap = operator_norm(left_regular_matrix(A, ell, f - Tf, N))
        return gap / L, L + tol - LT

    out = pmap(one, fs)
    for f, (_, sl) in zip(fs, out):
        if sl < 0:
            raise ContractionFailure(f"contraction fails by {-sl:.3g} on a sample", f)
    lows = [o[0] for o in out]
    return RieffelReport(max(lows, default=0.0), cert.B, samples,
                         min((o[1] for o in out), default=math.inf))


REPORT_COLUMNS = ("Lambda", "folner_ratio", "phi_min_gap", "delta_lower", "delta_upper",
                  "mk_lower", "mk_upper", "runtime")


@dataclass
class ConvergenceReport:
    rows: list = field(default_factory=list)
    config: dict = field(default_factory=dict)

    def column(self, name: str) -> np.ndarray:
        i = REPORT_COLUMNS.index(name)
        return np.array([r[i] for r in self.rows], dtype=float)


def convergence_study(A: FusionAlgebra, ell: LengthFunction, k: int, levels: Sequence[float],
                      samples: int = 20, seed: int = 0, gap_radius: float = 1,
                      mk_radius: float = 2, timing: bool = False, envelope=None,
                      sample_radius: Callable[[float], float] | None = None) -> ConvergenceReport:
    """Per-level table of Følner ratio, multiplier gap, Rieffel bracket and MK bracket.

    ``phi_min_gap`` is ``max (1 - phi)`` over the fixed ball ``{l <= gap_radius}``.
    ``mk_upper`` equals the certificate; ``mk_lower`` is the ascent bound
    between the counit and the multiplier state on ``{l <= mk_radius}``.
    """
    rep = ConvergenceReport(config={"k": k, "levels": list(levels), "samples": samples,
                                    "seed": seed})
    if envelope is None and math.isfinite(ell.complete_to):
        envelope = growth_envelope(shell_profile(A, ell, math.floor(ell.complete_to)))
    gens = ell.generators if ell.generators else [int(i) for i in ell.sublevel(1)
                                                  if i != A.unit]
    gap_ball = ell.sublevel(gap_radius)
    for lam in levels:
        t0 = time.perf_counter()
        ratio = folner_boundary(A, ell, lam, gens).ratio
        phi = folner_multiplier(A, ell, lam)
        gap = float((1 - phi.phi[gap_ball]).max())
        cert = cs_certificate(phi, ell, k, envelope=envelope)
        rad = sample_radius(lam) if sample_radius else None
        rd = rieffel_delta(A, ell, phi, k, samples, radius=rad, seed=seed, certificate=cert)
        mk = mk_lower_bound(A, ell, counit_state(), multiplier_state(phi), k, radius=mk_radius,
                            seed=seed)
        rt = time.perf_counter() - t0 if timing else math.nan
        rep.rows.append((lam, ratio, gap, rd.delta_lower, rd.delta_upper, mk.lower, cert.B, rt))
    return rep
