"""Length functions, growth profiles and Følner boundaries."""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Iterable, Mapping, NamedTuple

import numpy as np

from .fusion import FusionAlgebra, FusionError, WindowError

__all__ = [
    "LengthFunction", "LengthViolation", "LengthReport", "GrowthTable", "GrowthFit",
    "GrowthEnvelope", "FolnerReport", "FolnerCurve", "word_length", "validate_length",
    "shell_profile", "fit_growth_order", "growth_envelope", "envelope_tail",
    "folner_boundary", "folner_ratio_curve",
]


@dataclass(frozen=True, eq=False)
class LengthFunction:
    """Length values on the labels of ``algebra``.

    ``complete_to`` is the largest level ``N`` for which the sublevel set
    ``{l <= N}`` is fully enumerated and every pair with ``l(a) + l(b) <= N``
    has a known product.  Labels that were never reached carry ``inf``.
    """

    algebra: FusionAlgebra
    values: np.ndarray
    complete_to: float
    proper: bool
    integer_valued: bool
    generators: tuple = field(default=())

    def __post_init__(self):
        self.values.setflags(write=False)

    def __call__(self, i: int) -> float:
        return float(self.values[i])

    def sublevel(self, n: float) -> np.ndarray:
        """Indices with ``l <= n``; raises if that set is not fully enumerated."""
        if n > self.complete_to:
            raise WindowError(f"sublevel l <= {n:g} exceeds the enumerated window "
                              f"(complete up to {self.complete_to:g})")
        return np.flatnonzero(self.values <= n)

    def require(self, n: float, what: str = "computation") -> None:
        if n > self.complete_to:
            raise WindowError(f"{what} needs fusion data up to length {n:g}; window is "
                              f"complete only up to {self.complete_to:g}")

    @classmethod
    def from_values(cls, A: FusionAlgebra, values, complete_to: float | None = None
                    ) -> "LengthFunction":
        """Wrap user values, given as an array over indices or a ``{key: value}`` mapping."""
        if isinstance(values, Mapping):
            arr = np.full(A.n, np.inf)
            for k, v in values.items():
                arr[A.index(k)] = v
        elif callable(values):
            arr = np.array([float(values(k)) for k in A.keys])
        else:
            arr = np.asarray(values, dtype=float).copy()
            if arr.shape != (A.n,):
                raise FusionError(f"length values need shape ({A.n},), got {arr.shape}")
        if (arr < 0).any():
            raise FusionError("length values must be non-negative")
        if complete_to is None:
            complete_to = _pair_complete_to(A, arr)
        finite = np.isfinite(arr)
        proper = bool(finite.all() or not math.isinf(A.cap)) and \
            bool(np.all((arr == 0) == (np.arange(A.n) == A.unit)))
        integer = bool(np.all(arr[finite] == np.round(arr[finite])))
        return cls(A, arr, float(complete_to), proper, integer)


def _pair_complete_to(A: FusionAlgebra, vals: np.ndarray) -> float:
    if math.isinf(A.cap):
        return math.inf
    comp = A.complete_mask()
    s = vals[:, None] + vals[None, :]
    bad = s[~comp]
    bad = bad[np.isfinite(bad)]
    if not len(bad):
        return math.inf
    limit = bad.min()
    below = vals[vals < limit]
    return float(below.max()) if len(below) else 0.0


def word_length(A: FusionAlgebra, generators: Iterable[int]) -> LengthFunction:
    """Breadth-first word length with respect to a conjugation-closed generator set."""
    gens = sorted({int(g) for g in generators})
    if not gens:
        raise FusionError("generator set is empty")
    missing = [A.keys[g] for g in gens if int(A.conj[g]) not in gens]
    if missing:
        raise FusionError(f"generator set is not conjugation-closed: conjugate of "
                          f"{missing[0]!r} missing")
    gmax = max(int(A.level[g]) for g in gens)
    complete_to = math.inf if math.isinf(A.cap) else (
        math.floor(A.cap / gmax) if gmax > 0 else 0)
    vals = np.full(A.n, np.inf)
    vals[A.unit] = 0
    frontier = np.array([A.unit])
    g = np.array(gens)
    k = 0
    while len(frontier):
        k += 1
        a = np.repeat(frontier, len(g))
        b = np.tile(g, len(frontier))
        _, c, _, _ = A.pair_products(a, b)
        c = np.unique(c)
        new = c[np.isinf(vals[c])]
        vals[new] = k
        frontier = new
    reached = np.isfinite(vals)
    if math.isinf(complete_to):
        covered = bool(reached.all())
    else:
        covered = bool(reached[A.level <= complete_to].all())
    nonzero = bool(np.all((vals == 0) == (np.arange(A.n) == A.unit)))
    return LengthFunction(A, vals, float(complete_to), covered and nonzero, True,
                          tuple(gens))


class LengthViolation(NamedTuple):
    axiom: str
    labels: tuple
    lhs: float
    rhs: float


@dataclass
class LengthReport:
    checked_pairs: int
    violations: list[LengthViolation]

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_length(A: FusionAlgebra, ell: LengthFunction, window=None,
                    max_report: int = 50) -> LengthReport:
    """Check identity, symmetry, subadditivity and properness on a label window."""
    v = ell.values
    K = A.keys
    inw = np.zeros(A.n, dtype=bool)
    if window is None:
        inw[:] = np.isfinite(v) & (v <= ell.complete_to)
        if math.isinf(ell.complete_to):
            inw[:] = True
    else:
        inw[np.fromiter(window, dtype=np.int64)] = True
    viol: list[LengthViolation] = []

    def add(*args):
        if len(viol) < max_report:
            viol.append(LengthViolation(*args))

    tol = 0.0 if ell.integer_valued else 1e-12
    if v[A.unit] != 0:
        add("identity", (K[A.unit],), float(v[A.unit]), 0.0)
    w = np.flatnonzero(inw)
    for i in w[np.abs(v[A.conj[w]] - v[w]) > tol][:10]:
        add("symmetry", (K[i], K[A.conj[i]]), float(v[i]), float(v[A.conj[i]]))
    for i in w[(v[w] == 0) & (w != A.unit)][:10]:
        add("properness", (K[i],), 0.0, float("nan"))
    for i in w[np.isinf(v[w])][:10]:
        add("properness", (K[i],), math.inf, float("nan"))

    comp = A.complete_mask() & inw[:, None] & inw[None, :]
    pa, pb = np.nonzero(comp)
    pos, c, _, _ = A.pair_products(pa, pb)
    lhs = v[c]
    rhs = v[pa[pos]] + v[pb[pos]]
    bad = np.flatnonzero(inw[c] & (lhs > rhs + tol))
    for j in bad[:20]:
        add("subadditivity", (K[pa[pos[j]]], K[pb[pos[j]]], K[c[j]]), float(lhs[j]),
            float(rhs[j]))
    return LengthReport(int(len(pa)), viol)


@dataclass
class GrowthTable:
    """Shell sums ``sigma(n)`` over ``l in (n-1, n]`` for ``n = 1..n_max``."""

    n: np.ndarray
    shell_sum: np.ndarray
    cumulative: np.ndarray
    sigma0: float

    def rows(self):
        return list(zip(self.n.tolist(), self.shell_sum.tolist(), self.cumulative.tolist()))


def shell_profile(A: FusionAlgebra, ell: LengthFunction, n_max: int) -> GrowthTable:
    if n_max < 1:
        raise FusionError("n_max must be >= 1")
    if n_max > ell.complete_to:
        raise WindowError(f"shell profile up to n = {n_max} needs the window complete to "
                          f"length {n_max}; it is complete only up to {ell.complete_to:g}")
    v = ell.values
    d2 = A.dim ** 2
    fin = np.isfinite(v) & (v <= n_max)
    shell = np.ceil(v[fin]).astype(np.int64)
    sums = np.bincount(shell, weights=d2[fin], minlength=n_max + 1)
    n = np.arange(1, n_max + 1)
    return GrowthTable(n, sums[1:], sums[0] + np.cumsum(sums[1:]), float(sums[0]))


class GrowthFit(NamedTuple):
    s: float
    c1: float
    c2: float
    strong: bool


def fit_growth_order(T: GrowthTable, n_min: int, n_max: int) -> GrowthFit:
    """Log-log least-squares growth order with envelope constants over ``[n_min, n_max]``."""
    if n_min < 2:
        raise FusionError("n_min must be >= 2")
    if n_max > T.n[-1] or n_max < n_min:
        raise FusionError(f"fit range [{n_min}, {n_max}] outside the table (n <= {T.n[-1]})")
    sel = (T.n >= n_min) & (T.n <= n_max)
    n, sig = T.n[sel].astype(float), T.shell_sum[sel]
    nz = sig > 0
    if nz.sum() < 3:
        raise FusionError("fewer than 3 non-empty shells in the fit range")
    s, _ = np.polyfit(np.log(n[nz]), np.log(sig[nz]), 1)
    ratio = sig / n ** s
    c1 = float(ratio.max())
    c2 = float(ratio.min()) if nz.all() else 0.0
    return GrowthFit(float(s), c1, c2, bool(nz.all() and c2 > 0))


class GrowthEnvelope(NamedTuple):
    """Upper envelope ``sigma(n) <= c1 * n**s`` assumed beyond the enumerated window."""

    c1: float
    s: float


def growth_envelope(T: GrowthTable, n_min: int | None = None, n_max: int | None = None
                    ) -> GrowthEnvelope:
    """Envelope for tail sums, fitted on the upper half of the table by default.

    The fitted order is snapped to the nearest integer when within 0.1 of it,
    so that ``sigma(n) / n**s`` stays bounded for polynomial profiles such as
    ``(n+1)**2``; ``c1`` is the maximum ratio over the fit range.
    """
    n_max = int(T.n[-1]) if n_max is None else n_max
    n_min = max(2, n_max // 2) if n_min is None else n_min
    fit = fit_growth_order(T, n_min, n_max)
    s = round(fit.s) if abs(fit.s - round(fit.s)) <= 0.1 else fit.s
    sel = (T.n >= n_min) & (T.n <= n_max)
    c1 = float((T.shell_sum[sel] / T.n[sel].astype(float) ** s).max())
    return GrowthEnvelope(c1, float(s))


def envelope_tail(env: GrowthEnvelope, W: float, power: float, shift: float = 0.0,
                  integer: bool = True) -> float:
    """Upper bound for ``sum_{l(a) > W} d(a)^2 / (shift + l(a))**power``.

    ``shift`` is 0 or 1; ``integer`` states that lengths are integers so that
    shell ``n`` sits exactly at ``l = n``.  Uses ``sigma(n) <= c1 n^s`` on shells ``n > W`` and
    an integral comparison; raises :class:`ArithmeticError` if the series
    diverges at this growth order.
    """
    W = math.floor(W)
    if W < 1:
        raise WindowError("tail bound needs a window of at least one shell")
    p = power
    if p - env.s <= 1:
        raise ArithmeticError(f"tail series diverges: growth order {env.s:g} with decay "
                              f"power {p:g} (need power > order + 1)")
    if shift >= 1 or integer:
        # shell n: l = n (integer) or 1 + l > n (shifted)
        return env.c1 * W ** (env.s - p + 1) / (p - env.s - 1)
    # l > n - 1 and n <= 2(n-1) for n >= 2
    m = W
    return env.c1 * 2 ** max(env.s, 0) * (m ** (env.s - p) + m ** (env.s - p + 1) / (p - env.s - 1))


@dataclass
class FolnerReport:
    level: float
    boundary_weight: float
    bulk_weight: float
    ratio: float
    boundary: tuple = ()


def _as_list(pi) -> list[int]:
    if isinstance(pi, (int, np.integer)):
        return [int(pi)]
    return [int(x) for x in pi]


def folner_boundary(A: FusionAlgebra, ell: LengthFunction, level: float, pi) -> FolnerReport:
    """Weighted boundary of ``A_level = {l <= level}`` relative to one label or a set.

    For a set the per-label boundaries are united.
    """
    pis = _as_list(pi)
    v = ell.values
    ell.require(level + max(v[p] for p in pis), "Følner boundary")
    inside = v <= level
    bulk_idx = np.flatnonzero(inside)
    if not len(bulk_idx):
        raise WindowError(f"A_{level:g} is empty")
    bnd = np.zeros(A.n, dtype=bool)
    for p in pis:
        for q, outgoing in ((p, True), (int(A.conj[p]), False)):
            pos, c, _, comp = A.pair_products(bulk_idx, np.full(len(bulk_idx), q))
            if not comp.all():
                bad = bulk_idx[~comp][0]
                raise WindowError(f"product {A.keys[bad]!r} x {A.keys[q]!r} unknown")
            out = ~inside[c]
            if outgoing:
                bnd[bulk_idx[pos[out]]] = True
            else:
                # beta outside with alpha in beta x pi  <=>  beta in alpha x conj(pi)
                bnd[c[out]] = True
    d2 = A.dim ** 2
    bw = float(d2[bnd].sum())
    bulk = float(d2[inside].sum())
    return FolnerReport(level, bw, bulk, bw / bulk,
                        tuple(A.keys[i] for i in np.flatnonzero(bnd)))


@dataclass
class FolnerCurve:
    reports: list[FolnerReport]

    @property
    def monotone(self) -> bool:
        r = [x.ratio for x in self.reports]
        return all(b <= a for a, b in zip(r, r[1:]))

    def rows(self):
        return [(r.level, r.boundary_weight, r.bulk_weight, r.ratio) for r in self.reports]


def folner_ratio_curve(A: FusionAlgebra, ell: LengthFunction, pi, levels) -> FolnerCurve:
    return FolnerCurve([folner_boundary(A, ell, lam, pi) for lam in levels])
