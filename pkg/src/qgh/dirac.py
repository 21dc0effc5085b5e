"""Left-regular action on l2(Irred), the diagonal Dirac operator and Lip-seminorms.

Operators act on the Hilbert space with orthonormal basis ``{delta_a}``
indexed by labels.  Left multiplication by a basis label ``b`` sends
``delta_a`` to ``sum_c N_{b,a}^c delta_c``; this is a *-representation
(``pi(f*) = pi(f)^*``) by Frobenius reciprocity.  The weighted basis
``a / d(a)`` with ``<a, a> = d(a)^2`` is available via ``weighted=True``;
it is not a *-representation once dimensions differ from 1.

Infinite operators are approximated by windows: the domain is
``{l <= N}`` and the codomain everything the element can reach from there,
so window norms increase with ``N`` towards the true norm.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Mapping, NamedTuple

import numpy as np

from ._parallel import pmap
from .fusion import FusionAlgebra, WindowError
from .length import LengthFunction, envelope_tail, growth_envelope, shell_profile

__all__ = [
    "Element", "OperatorWindow", "SeminormValue", "random_element", "left_regular_matrix",
    "compressed_matrix", "operator_norm", "weighted_norm", "rd_constant", "rd_scan",
    "dirac_commutator", "truncated_commutator", "lip_seminorm", "truncated_seminorm",
    "band_decomposition", "banded_upper_bound", "truncated_kernel_dimension",
    "tail_bound_check", "RDScan", "TailReport",
]


@dataclass(frozen=True, eq=False)
class Element:
    """Finitely supported function on the labels of ``algebra``."""

    algebra: FusionAlgebra
    coeffs: Mapping[int, complex] = field(default_factory=dict)

    @classmethod
    def delta(cls, A: FusionAlgebra, i: int, c: complex = 1.0) -> "Element":
        return cls(A, {int(i): complex(c)})

    @classmethod
    def from_keys(cls, A: FusionAlgebra, coeffs: Mapping) -> "Element":
        return cls(A, {A.index(k): complex(v) for k, v in coeffs.items()})

    @property
    def support(self) -> np.ndarray:
        return np.array(sorted(i for i, v in self.coeffs.items() if v != 0), dtype=np.int64)

    def support_radius(self, ell: LengthFunction) -> float:
        s = self.support
        return float(ell.values[s].max()) if len(s) else 0.0

    def adjoint(self) -> "Element":
        cj = self.algebra.conj
        return Element(self.algebra, {int(cj[i]): np.conj(v) for i, v in self.coeffs.items()})

    def is_self_adjoint(self, tol: float = 0.0) -> bool:
        other = self.adjoint().coeffs
        keys = set(self.coeffs) | set(other)
        return all(abs(self.coeffs.get(i, 0) - other.get(i, 0)) <= tol for i in keys)

    def __add__(self, other: "Element") -> "Element":
        out = dict(self.coeffs)
        for i, v in other.coeffs.items():
            out[i] = out.get(i, 0) + v
        return Element(self.algebra, out)

    def __sub__(self, other: "Element") -> "Element":
        return self + other * -1

    def __mul__(self, c: complex) -> "Element":
        return Element(self.algebra, {i: v * c for i, v in self.coeffs.items()})

    __rmul__ = __mul__

    def __call__(self, i: int) -> complex:
        return self.coeffs.get(i, 0)

    def arrays(self):
        s = self.support
        return s, np.array([self.coeffs[i] for i in s], dtype=complex)


def random_element(A: FusionAlgebra, ell: LengthFunction, rng: np.random.Generator,
                   radius: float, *, lo: float = 0.0, size: int | None = None,
                   self_adjoint: bool = False, real: bool = False) -> Element:
    """Random element supported on ``lo <= l <= radius``.

    The support is a random subset (of ``size`` labels, random by default);
    coefficients are standard (complex) Gaussians.  ``self_adjoint``
    symmetrises with the adjoint.
    """
    pool = np.flatnonzero((ell.values >= lo) & (ell.values <= radius))
    if not len(pool):
        raise WindowError(f"no labels with {lo:g} <= l <= {radius:g}")
    k = int(rng.integers(1, len(pool) + 1)) if size is None else min(size, len(pool))
    supp = rng.choice(pool, size=k, replace=False)
    vals = rng.standard_normal(k)
    if not real:
        vals = vals + 1j * rng.standard_normal(k)
    f = Element(A, dict(zip(supp.tolist(), vals.tolist())))
    if self_adjoint:
        f = (f + f.adjoint()) * 0.5
    return f


@dataclass
class OperatorWindow:
    rows: np.ndarray
    cols: np.ndarray
    matrix: np.ndarray
    meta: dict = field(default_factory=dict)

    @property
    def H(self) -> np.ndarray:
        return self.matrix.conj().T


class SeminormValue(NamedTuple):
    value: float
    window_N: float
    converged: bool


def _fill(A: FusionAlgebra, ell: LengthFunction, f: Element, rows: np.ndarray,
          cols: np.ndarray, weighted: bool) -> np.ndarray:
    supp, vals = f.arrays()
    M = np.zeros((len(rows), len(cols)), dtype=complex)
    if not len(supp) or not len(cols):
        return M
    lv = ell.values
    # N_{a,b}^c > 0 forces l(a) <= l(c) + l(b), so farther labels cannot reach a row
    reach = lv[rows].max() + lv[cols].max()
    keep = lv[supp] <= reach
    supp, vals = supp[keep], vals[keep]
    if not len(supp):
        return M
    rpos = np.full(A.n, -1, dtype=np.int64)
    rpos[rows] = np.arange(len(rows))
    pa = np.repeat(supp, len(cols))
    pv = np.repeat(vals, len(cols))
    pc = np.tile(np.arange(len(cols)), len(supp))
    pos, c, m, comp = A.pair_products(pa, cols[pc])
    if not comp.all():
        j = np.flatnonzero(~comp)[0]
        raise WindowError(f"product {A.keys[pa[j]]!r} x {A.keys[cols[pc[j]]]!r} is outside "
                          f"the enumerated window of {A.name}")
    r = rpos[c]
    ok = r >= 0
    w = pv[pos] * m
    if weighted:
        w = w * A.dim[c] / A.dim[cols[pc[pos]]]
    np.add.at(M, (r[ok], pc[pos][ok]), w[ok])
    return M


def left_regular_matrix(A: FusionAlgebra, ell: LengthFunction, f: Element, N: float,
                        weighted: bool = False) -> OperatorWindow:
    """Matrix of ``pi(f)`` from ``{l <= N}`` into ``{l <= N + radius(f)}``."""
    r = f.support_radius(ell)
    ell.require(N + r, "left-regular window")
    cols = np.flatnonzero(ell.values <= N)
    rows = np.flatnonzero(ell.values <= N + r)
    M = _fill(A, ell, f, rows, cols, weighted)
    return OperatorWindow(rows, cols, M, {"N": N, "k": 0, "weighted": weighted})


def compressed_matrix(A: FusionAlgebra, ell: LengthFunction, f: Element, level: float,
                      weighted: bool = False) -> OperatorWindow:
    """``P pi(f) P`` with ``P`` the projection onto ``{l <= level}``."""
    ell.require(level, "truncation")
    idx = np.flatnonzero(ell.values <= level)
    return OperatorWindow(idx, idx, _fill(A, ell, f, idx, idx, weighted),
                          {"Lambda": level, "k": 0, "weighted": weighted})


def _commute(ell: LengthFunction, W: OperatorWindow, k: int) -> OperatorWindow:
    if k < 1:
        raise ValueError("k must be a positive integer")
    gap = ell.values[W.rows][:, None] - ell.values[W.cols][None, :]
    return OperatorWindow(W.rows, W.cols, W.matrix * gap ** k, {**W.meta, "k": k})


def dirac_commutator(A: FusionAlgebra, ell: LengthFunction, f: Element, k: int, N: float,
                     weighted: bool = False) -> OperatorWindow:
    """Window of the k-fold commutator ``[D, [D, ... pi(f)]]``: entries times ``(l(row) - l(col))^k``."""
    return _commute(ell, left_regular_matrix(A, ell, f, N, weighted), k)


def truncated_commutator(A: FusionAlgebra, ell: LengthFunction, f: Element, k: int,
                         level: float, weighted: bool = False) -> OperatorWindow:
    return _commute(ell, compressed_matrix(A, ell, f, level, weighted), k)


def operator_norm(W, method: str = "auto", tol: float = 1e-10, max_iter: int = 20000) -> float:
    """Largest singular value of a window (or plain matrix).

    ``method="power"`` runs power iteration on ``M^* M`` from a fixed
    pseudo-random start vector until the relative change drops below ``tol``;
    ``"svd"`` uses LAPACK; ``"auto"`` picks SVD up to 1500 columns.
    """
    M = W.matrix if isinstance(W, OperatorWindow) else np.asarray(W)
    if M.size == 0 or not np.any(M):
        return 0.0
    if method == "auto":
        method = "svd" if min(M.shape) <= 1500 else "power"
    if method == "svd":
        return float(np.linalg.norm(M, 2))
    if method != "power":
        raise ValueError(f"unknown method {method!r}")
    x = np.random.default_rng(0).standard_normal(M.shape[1]).astype(M.dtype)
    x /= np.linalg.norm(x)
    est = 0.0
    for _ in range(max_iter):
        y = M @ x
        new = float(np.linalg.norm(y))
        if new == 0.0:
            return 0.0
        x = M.conj().T @ y
        x /= np.linalg.norm(x)
        if abs(new - est) <= tol * new:
            return new
        est = new
    return est


def _converged(fn, N: float, ell: LengthFunction, radius: float, value: float, tol: float):
    N2 = 2 * N if N > 0 else 1
    if N2 + radius > ell.complete_to:
        return False
    v2 = fn(N2)
    return abs(v2 - value) <= tol * max(abs(v2), 1e-300) or (v2 == 0 and value == 0)


def lip_seminorm(A: FusionAlgebra, ell: LengthFunction, f: Element, k: int, N: float,
                 check: bool = True, weighted: bool = False) -> SeminormValue:
    """Window value of ``||delta^k(f)||``; ``converged`` if doubling ``N`` moves it < 1e-8."""
    def at(n):
        return operator_norm(dirac_commutator(A, ell, f, k, n, weighted))

    value = at(N)
    conv = check and _converged(at, N, ell, f.support_radius(ell), value, 1e-8)
    return SeminormValue(value, N, bool(conv))


def truncated_seminorm(A: FusionAlgebra, ell: LengthFunction, f: Element, k: int,
                       level: float, weighted: bool = False) -> SeminormValue:
    """Exact ``||[D_L, [D_L, ... P pi(f) P]]||`` on ``{l <= level}``."""
    return SeminormValue(operator_norm(truncated_commutator(A, ell, f, k, level, weighted)),
                         level, True)


def band_decomposition(ell: LengthFunction, W: OperatorWindow) -> dict[int, np.ndarray]:
    """Split a window into shell-diagonals ``T_j = sum_m Q_m X Q_{m-j}`` (integer lengths)."""
    if not ell.integer_valued:
        raise ValueError("band decomposition needs an integer-valued length")
    gap = (ell.values[W.rows][:, None] - ell.values[W.cols][None, :]).astype(np.int64)
    return {int(j): np.where(gap == j, W.matrix, 0) for j in np.unique(gap[W.matrix != 0])}


def banded_upper_bound(A: FusionAlgebra, ell: LengthFunction, f: Element, k: int,
                       N: float) -> float:
    """``sum_j |j|^k ||T_j||`` with ``||T_j|| = max_m ||Q_m pi(f) Q_{m-j}||`` on the window."""
    W = left_regular_matrix(A, ell, f, N)
    lr, lc = ell.values[W.rows], ell.values[W.cols]
    total = 0.0
    for j, T in band_decomposition(ell, W).items():
        if j == 0:
            continue
        blocks = [operator_norm(W.matrix[np.ix_(lr == m, lc == m - j)])
                  for m in np.unique(lr) if (lc == m - j).any()]
        total += abs(j) ** k * max(blocks, default=0.0)
    return total


def truncated_kernel_dimension(A: FusionAlgebra, ell: LengthFunction, k: int, level: float,
                               tol: float = 1e-10) -> int:
    """Null-space dimension of ``f -> delta_level^k(f)`` on coefficients over ``{l <= level}``."""
    idx = ell.sublevel(level)
    cols = [truncated_commutator(A, ell, Element.delta(A, i), k, level).matrix.ravel()
            for i in idx]
    S = np.linalg.svd(np.column_stack(cols), compute_uv=False)
    return int(len(idx) - np.sum(S > tol * max(S[0], 1.0)))


def weighted_norm(A: FusionAlgebra, ell: LengthFunction, f: Element, s: float) -> float:
    """``(sum |f(a)|^2 d(a)^2 (1 + l(a))^{2s})^{1/2}``."""
    if s <= 0:
        raise ValueError("s must be positive")
    supp, vals = f.arrays()
    w = np.abs(vals) ** 2 * A.dim[supp] ** 2 * (1 + ell.values[supp]) ** (2 * s)
    return float(math.sqrt(w.sum()))


def rd_constant(A: FusionAlgebra, ell: LengthFunction, s: float, envelope=None,
                window: float | None = None) -> tuple[float, float]:
    """``(C_window, C_theory)`` for ``C^2 = sum d(a)^2 / (1 + l(a))^{2s}``.

    ``C_window`` sums the enumerated window; ``C_theory`` adds an upper bound
    for the tail from the growth envelope.  Raises :class:`ArithmeticError`
    if the tail diverges.
    """
    W = ell.complete_to if window is None else window
    if math.isfinite(W):
        W = math.floor(W)
    else:
        fin = np.isfinite(ell.values)
        c = float(np.sqrt((A.dim[fin] ** 2 / (1 + ell.values[fin]) ** (2 * s)).sum()))
        return c, c
    sel = ell.values <= W
    head = float((A.dim[sel] ** 2 / (1 + ell.values[sel]) ** (2 * s)).sum())
    if envelope is None:
        envelope = growth_envelope(shell_profile(A, ell, W))
    tail = envelope_tail(envelope, W, 2 * s, shift=1)
    return math.sqrt(head), math.sqrt(head + tail)


class RDScan(NamedTuple):
    worst_ratio: float
    C_window: float
    C_theory: float
    violations: int
    samples: int


def rd_scan(A: FusionAlgebra, ell: LengthFunction, s: float, sample_count: int,
            support_cap: float, seed: int, N: float | None = None,
            envelope=None) -> RDScan:
    """Worst ``||pi(f)|| / ||f||_{2,s}`` over seeded random complex elements."""
    cw, ct = rd_constant(A, ell, s, envelope)
    N = support_cap if N is None else N
    rng = np.random.default_rng(seed)
    fs = [random_element(A, ell, rng, support_cap) for _ in range(sample_count)]

    def ratio(f):
        return operator_norm(left_regular_matrix(A, ell, f, N)) / weighted_norm(A, ell, f, s)

    ratios = np.array(pmap(ratio, fs))
    return RDScan(float(ratios.max()), cw, ct, int((ratios > ct).sum()), sample_count)


class TailReport(NamedTuple):
    worst_slack: float
    all_pass: bool
    samples: int
    C: float


def tail_bound_check(A: FusionAlgebra, ell: LengthFunction, k: int, s: float, n: int,
                     samples: int, seed: int, width: int = 10, envelope=None) -> TailReport:
    """Replay ``||pi(f)|| <= C 2^s n^{s-k} (sum |f|^2 d^2 l^{2k})^{1/2}`` for ``f`` on shells ``>= n``."""
    if k <= s:
        raise ValueError(f"tail estimate needs k > s (got k={k}, s={s})")
    _, C = rd_constant(A, ell, s, envelope)
    rng = np.random.default_rng(seed)
    fs = [random_element(A, ell, rng, n + width, lo=n) for _ in range(samples)]

    def slack(f):
        supp, vals = f.arrays()
        lhs = operator_norm(left_regular_matrix(A, ell, f, n + width))
        weight = np.sqrt((np.abs(vals) ** 2 * A.dim[supp] ** 2
                          * ell.values[supp] ** (2 * k)).sum())
        return C * 2 ** s * n ** (s - k) * weight - lhs

    sl = np.array(pmap(slack, fs))
    return TailReport(float(sl.min()), bool((sl >= 0).all()), samples, C)
