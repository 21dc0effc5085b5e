"""Fusion algebras enumerated up to a cap, example families and axiom checks.

A :class:`FusionAlgebra` stores its structure constants sparsely in CSR form
over ordered label pairs.  Pairs whose product is not fully known inside the
enumerated window carry no entries and are reported as incomplete; they are
never silently treated as zero.

Labels are integer indices into ``algebra.keys``; the keys are the decoded
forms (integers for ``Z`` and the SU(2)-like rings, coordinate tuples for
``Z^d``, pairs for products, file labels for user data).
"""

from __future__ import annotations

import itertools
import json
import math
from collections import defaultdict, deque
from dataclasses import dataclass, field
from importlib import resources
from typing import Any, Callable, Hashable, Iterable, NamedTuple, Sequence

import numpy as np

__all__ = [
    "FusionError", "WindowError", "FusionAlgebra", "Violation", "AxiomReport",
    "GroupOracle", "build_group_dual", "build_su2_like", "build_product",
    "validate_axioms", "check_associativity", "load_fusion_file", "dump_fusion_file",
]


class FusionError(ValueError):
    """Invalid fusion data: rejected tables, unknown labels, bad parameters."""


class WindowError(RuntimeError):
    """A computation needs fusion data outside the enumerated window."""


@dataclass(frozen=True, eq=False)
class FusionAlgebra:
    """Finitely enumerated fusion algebra.

    Attributes
    ----------
    name : str
        Human readable family name, echoed in reports.
    keys : tuple
        Decoded label for every index.
    unit : int
        Index of the identity label ``e``.
    conj : ndarray of int
        Conjugation involution on indices.
    dim : ndarray of float
        Dimension function, ``dim[i] >= 1``.
    level : ndarray of int
        Native enumeration level of each label (word length for the builtin
        families).
    cap : float
        Every pair ``(a, b)`` with ``level[a] + level[b] <= cap`` is complete.
        ``inf`` for algebras given by a complete finite table.
    ptr, out, mult : ndarray
        CSR storage: products of the pair ``p = a * n + b`` are
        ``out[ptr[p]:ptr[p+1]]`` with multiplicities ``mult[...]``.
    group : bool
        True for group duals (every product is a single label, ``d == 1``).
    """

    name: str
    keys: tuple
    unit: int
    conj: np.ndarray
    dim: np.ndarray
    level: np.ndarray
    cap: float
    ptr: np.ndarray
    out: np.ndarray
    mult: np.ndarray
    group: bool = False
    _index: dict = field(default_factory=dict, repr=False)

    def __post_init__(self):
        if not self._index:
            self._index.update({k: i for i, k in enumerate(self.keys)})
        for arr in (self.conj, self.dim, self.level, self.ptr, self.out, self.mult):
            arr.setflags(write=False)

    # construction -------------------------------------------------------

    @classmethod
    def from_triples(cls, name, keys, unit, conj, dim, triples, *, level=None,
                     cap=math.inf, complete=None, group=False) -> "FusionAlgebra":
        """Build from ``(a, b, c, n)`` index quadruples.

        ``complete`` is an optional boolean ``(n, n)`` mask of pairs whose
        product is fully known; by default a pair is complete iff it has at
        least one triple (every genuine product is non-empty).
        """
        n = len(keys)
        t = np.asarray(triples, dtype=np.int64).reshape(-1, 4)
        if t.size and (t[:, 3] < 0).any():
            bad = t[t[:, 3] < 0][0]
            raise FusionError(f"negative multiplicity N[{keys[bad[0]]!r},{keys[bad[1]]!r}]"
                              f"^{keys[bad[2]]!r} = {bad[3]}")
        t = t[t[:, 3] != 0]
        pair = t[:, 0] * n + t[:, 1]
        order = np.lexsort((t[:, 2], pair))
        t, pair = t[order], pair[order]
        counts = np.bincount(pair, minlength=n * n)
        if complete is not None:
            complete = np.asarray(complete, dtype=bool).reshape(n * n)
            drop = ~complete[pair]
            if drop.any():
                t, pair = t[~drop], pair[~drop]
                counts = np.bincount(pair, minlength=n * n)
            empty = complete & (counts == 0)
            if empty.any():
                p = int(np.flatnonzero(empty)[0])
                raise FusionError(f"pair ({keys[p // n]!r}, {keys[p % n]!r}) marked complete "
                                  "but has an empty product")
        ptr = np.zeros(n * n + 1, dtype=np.int64)
        np.cumsum(counts, out=ptr[1:])
        if level is None:
            level = np.zeros(n, dtype=np.int64)
        return cls(name=name, keys=tuple(keys), unit=int(unit),
                   conj=np.asarray(conj, dtype=np.int64), dim=np.asarray(dim, dtype=float),
                   level=np.asarray(level, dtype=np.int64), cap=float(cap),
                   ptr=ptr, out=t[:, 2].copy(), mult=t[:, 3].copy(), group=group)

    def with_triples(self, extra: Iterable[tuple], name: str | None = None) -> "FusionAlgebra":
        """Copy with additional ``(a, b, c, n)`` entries added to the table (for tests)."""
        a, b, c, m = self.triples()
        base = np.column_stack([a, b, c, m])
        extra = np.asarray(list(extra), dtype=np.int64).reshape(-1, 4)
        allt = np.vstack([base, extra])
        merged: dict[tuple, int] = defaultdict(int)
        for row in allt:
            merged[tuple(int(x) for x in row[:3])] += int(row[3])
        rows = [(*k, v) for k, v in merged.items()]
        n = self.n
        complete = (np.diff(self.ptr) > 0).reshape(n, n)
        return FusionAlgebra.from_triples(name or self.name, self.keys, self.unit, self.conj,
                                          self.dim, rows, level=self.level, cap=self.cap,
                                          complete=complete, group=self.group)

    # queries ------------------------------------------------------------

    @property
    def n(self) -> int:
        return len(self.keys)

    def __len__(self) -> int:
        return len(self.keys)

    def __repr__(self) -> str:
        return f"FusionAlgebra({self.name!r}, labels={self.n}, cap={self.cap:g})"

    def index(self, key: Hashable) -> int:
        try:
            return self._index[key]
        except (KeyError, TypeError):
            raise FusionError(f"unknown label {key!r} in {self.name}") from None

    def key(self, i: int):
        return self.keys[i]

    def is_complete(self, a: int, b: int) -> bool:
        p = a * self.n + b
        return bool(self.ptr[p + 1] > self.ptr[p])

    def complete_mask(self) -> np.ndarray:
        """Boolean ``(n, n)`` matrix of complete pairs."""
        return (np.diff(self.ptr) > 0).reshape(self.n, self.n)

    def fuse(self, a: int, b: int) -> dict[int, int]:
        """Product ``a * b`` as ``{label: multiplicity}``; raises if incomplete."""
        p = a * self.n + b
        lo, hi = self.ptr[p], self.ptr[p + 1]
        if lo == hi:
            raise WindowError(f"product {self.keys[a]!r} x {self.keys[b]!r} leaves the "
                              f"enumerated window of {self.name}")
        return {int(c): int(m) for c, m in zip(self.out[lo:hi], self.mult[lo:hi])}

    def fuse_keys(self, ka, kb) -> dict:
        return {self.keys[c]: m for c, m in self.fuse(self.index(ka), self.index(kb)).items()}

    def N(self, a: int, b: int, c: int) -> int:
        return self.fuse(a, b).get(c, 0)

    def pair_products(self, a: np.ndarray, b: np.ndarray):
        """Vectorised products of the pairs ``(a[i], b[i])``.

        Returns ``(pos, c, m, complete)``: ``pos`` indexes the input pair for
        every emitted product label ``c`` with multiplicity ``m``;
        ``complete`` flags the input pairs with known products.
        """
        a = np.asarray(a, dtype=np.int64)
        b = np.asarray(b, dtype=np.int64)
        p = a * self.n + b
        lo, hi = self.ptr[p], self.ptr[p + 1]
        cnt = hi - lo
        pos = np.repeat(np.arange(len(p)), cnt)
        offs = np.arange(cnt.sum()) - np.repeat(np.cumsum(cnt) - cnt, cnt)
        idx = np.repeat(lo, cnt) + offs
        return pos, self.out[idx], self.mult[idx], cnt > 0

    def triples(self):
        """All stored structure constants as arrays ``(a, b, c, n)``."""
        counts = np.diff(self.ptr)
        pair = np.repeat(np.arange(self.n * self.n), counts)
        return pair // self.n, pair % self.n, self.out.copy(), self.mult.copy()


class Violation(NamedTuple):
    axiom: str
    labels: tuple
    lhs: Any
    rhs: Any


@dataclass
class AxiomReport:
    checked_pairs: int
    violations: list[Violation]
    max_dim_defect: float

    @property
    def ok(self) -> bool:
        return not self.violations


# builders ----------------------------------------------------------------


@dataclass(frozen=True)
class GroupOracle:
    """User-supplied group: identity, multiplication, inversion and generators."""

    identity: Hashable
    multiply: Callable[[Any, Any], Any]
    inverse: Callable[[Any], Any]
    generators: Sequence[Hashable]


def _zd_points(d: int, radius: int) -> np.ndarray:
    rng = range(-radius, radius + 1)
    pts = np.array(list(itertools.product(rng, repeat=d)), dtype=np.int64)
    return pts[np.abs(pts).sum(axis=1) <= radius]


def _zd_dual(d: int, radius: int) -> FusionAlgebra:
    pts = _zd_points(d, radius)
    lev = np.abs(pts).sum(axis=1)
    keys = [int(p[0]) if d == 1 else tuple(int(x) for x in p) for p in pts]
    order = sorted(range(len(keys)), key=lambda i: (lev[i], keys[i]))
    pts, lev = pts[order], lev[order]
    keys = [keys[i] for i in order]
    n = len(keys)
    base = 4 * radius + 1
    weights = base ** np.arange(d)

    def code(x):
        return ((x + 2 * radius) * weights).sum(axis=-1)

    lookup = np.full(base ** d, -1, dtype=np.int64)
    lookup[code(pts)] = np.arange(n)
    s = pts[:, None, :] + pts[None, :, :]
    c = lookup[code(s)].reshape(-1)
    c[np.abs(s).sum(axis=-1).reshape(-1) > radius] = -1
    a, b = np.divmod(np.arange(n * n), n)
    ok = c >= 0
    triples = np.column_stack([a[ok], b[ok], c[ok], np.ones(ok.sum(), dtype=np.int64)])
    conj = lookup[code(-pts)]
    name = "Z" if d == 1 else f"Z^{d}"
    return FusionAlgebra.from_triples(f"{name} dual", keys, 0, conj, np.ones(n), triples,
                                      level=lev, cap=radius, group=True)


def _oracle_dual(g: GroupOracle, radius: int, name: str) -> FusionAlgebra:
    gens = list(dict.fromkeys(list(g.generators) + [g.inverse(x) for x in g.generators]))
    dist = {g.identity: 0}
    queue = deque([g.identity])
    while queue:
        x = queue.popleft()
        if dist[x] == radius:
            continue
        for s in gens:
            y = g.multiply(x, s)
            if y not in dist:
                dist[y] = dist[x] + 1
                queue.append(y)
    keys = list(dist)
    idx = {k: i for i, k in enumerate(keys)}
    n = len(keys)
    for x in keys:
        xi = g.inverse(x)
        if g.multiply(x, xi) != g.identity or g.multiply(xi, x) != g.identity:
            raise FusionError(f"non-invertible element {x!r}: x * x^-1 != e")
    prod = {}
    for x in keys:
        for y in keys:
            z = g.multiply(x, y)
            if z in idx:
                prod[x, y] = z
    for x, y, z in itertools.product(keys, repeat=3):
        xy, yz = prod.get((x, y)), prod.get((y, z))
        if xy is None or yz is None:
            continue
        left, right = prod.get((xy, z)), prod.get((x, yz))
        if left is not None and right is not None and left != right:
            raise FusionError(f"non-associative multiplication at ({x!r}, {y!r}, {z!r}): "
                              f"(xy)z = {left!r}, x(yz) = {right!r}")
    triples = [(idx[x], idx[y], idx[z], 1) for (x, y), z in prod.items()]
    conj = [idx.get(g.inverse(x), -1) for x in keys]
    if min(conj) < 0:
        raise FusionError("enumerated ball is not closed under inversion")
    cap = math.inf if len(prod) == n * n else radius
    return FusionAlgebra.from_triples(name, keys, idx[g.identity], conj, np.ones(n), triples,
                                      level=[dist[k] for k in keys], cap=cap, group=True)


def _table_oracle(table) -> GroupOracle:
    t = np.asarray(table, dtype=np.int64)
    m = t.shape[0]
    if t.shape != (m, m) or t.min() < 0 or t.max() >= m:
        raise FusionError("multiplication table must be a square array of element indices")
    ids = [e for e in range(m) if (t[e] == np.arange(m)).all() and (t[:, e] == np.arange(m)).all()]
    if not ids:
        raise FusionError("multiplication table has no identity element")
    e = ids[0]
    inv = {}
    for x in range(m):
        ys = np.flatnonzero(t[x] == e)
        if len(ys) == 0:
            raise FusionError(f"non-invertible element {x}: no y with x*y = e")
        inv[x] = int(ys[0])
    for x, y, z in itertools.product(range(m), repeat=3):
        if t[t[x, y], z] != t[x, t[y, z]]:
            raise FusionError(f"non-associative multiplication at ({x}, {y}, {z}): "
                              f"(xy)z = {t[t[x, y], z]}, x(yz) = {t[x, t[y, z]]}")
    return GroupOracle(e, lambda x, y: int(t[x, y]), lambda x: inv[x], list(range(m)))


def build_group_dual(group_spec, radius_cap: int) -> FusionAlgebra:
    """Dual of a discrete group on the word-length ball of radius ``radius_cap``.

    ``group_spec`` is an integer ``d`` for ``Z^d`` (standard generators), a
    square multiplication table of element indices for a finite group, or a
    :class:`GroupOracle`.
    """
    if radius_cap < 1:
        raise FusionError("radius_cap must be >= 1")
    if isinstance(group_spec, (int, np.integer)):
        if group_spec < 1:
            raise FusionError("Z^d needs d >= 1")
        return _zd_dual(int(group_spec), int(radius_cap))
    if isinstance(group_spec, GroupOracle):
        return _oracle_dual(group_spec, int(radius_cap), "group dual")
    return _oracle_dual(_table_oracle(group_spec), int(radius_cap), "finite group dual")


_SU2_KINDS = {"SU2", "SO3", "ON_PLUS"}


def build_su2_like(kind: str, level_cap: int, N: int | None = None) -> FusionAlgebra:
    """Representation rings with SU(2)-type fusion up to ``level_cap``.

    ``kind`` is ``"SU2"``, ``"SO3"`` (integer spins) or ``"ON_plus"`` (free
    orthogonal quantum group, classical fusion rules with Chebyshev dims).
    """
    k = kind.upper().replace("+", "_PLUS")
    if k not in _SU2_KINDS:
        raise FusionError(f"unknown SU(2)-like kind {kind!r}")
    if level_cap < 1:
        raise FusionError("level_cap must be >= 1")
    if k == "ON_PLUS" and (N is None or N < 2):
        raise FusionError("ON_plus needs N >= 2")
    levels = np.arange(level_cap + 1)
    if k == "SU2":
        dim = levels + 1.0
    elif k == "SO3":
        dim = 2.0 * levels + 1.0
    else:
        dim = np.empty(level_cap + 1)
        dim[0], dim[1] = 1.0, float(N)
        for m in range(1, level_cap):
            dim[m + 1] = N * dim[m] - dim[m - 1]
    step = 1 if k == "SO3" else 2
    triples = [(m, n, c, 1)
               for m in levels for n in levels if m + n <= level_cap
               for c in range(abs(m - n), m + n + 1, step)]
    name = {"SU2": "SU2", "SO3": "SO3", "ON_PLUS": f"O{N}+"}[k]
    return FusionAlgebra.from_triples(name, [int(x) for x in levels], 0, levels, dim, triples,
                                      level=levels, cap=level_cap)


def build_product(A: FusionAlgebra, B: FusionAlgebra) -> FusionAlgebra:
    """Tensor product of fusion algebras on pairs with summed level within the joint cap."""
    cap = min(A.cap, B.cap)
    pairs = [(i, j) for i in range(A.n) for j in range(B.n)
             if A.level[i] + B.level[j] <= cap]
    pairs.sort(key=lambda p: (A.level[p[0]] + B.level[p[1]], (A.keys[p[0]], B.keys[p[1]])))
    idx = {p: t for t, p in enumerate(pairs)}
    triples = []
    for (a1, b1), (a2, b2) in itertools.product(pairs, repeat=2):
        if not (A.is_complete(a1, a2) and B.is_complete(b1, b2)):
            continue
        fa, fb = A.fuse(a1, a2), B.fuse(b1, b2)
        rows = [(idx.get((x, y)), ma * mb) for x, ma in fa.items() for y, mb in fb.items()]
        if any(t is None for t, _ in rows):
            continue
        triples.extend((idx[a1, b1], idx[a2, b2], t, m) for t, m in rows)
    keys = [(A.keys[i], B.keys[j]) for i, j in pairs]
    conj = [idx[A.conj[i], B.conj[j]] for i, j in pairs]
    dim = [A.dim[i] * B.dim[j] for i, j in pairs]
    level = [A.level[i] + B.level[j] for i, j in pairs]
    return FusionAlgebra.from_triples(f"{A.name} x {B.name}", keys, idx[A.unit, B.unit], conj,
                                      dim, triples, level=level, cap=cap,
                                      group=A.group and B.group)


# validation ----------------------------------------------------------------


def _lookup(codes_sorted: np.ndarray, values: np.ndarray, query: np.ndarray) -> np.ndarray:
    pos = np.searchsorted(codes_sorted, query)
    pos = np.minimum(pos, len(codes_sorted) - 1)
    found = codes_sorted[pos] == query if len(codes_sorted) else np.zeros(len(query), bool)
    return np.where(found, values[pos] if len(values) else 0, 0)


def validate_axioms(A: FusionAlgebra, window: Iterable[int] | None = None,
                    max_report: int = 50) -> AxiomReport:
    """Check the fusion axioms on every triple with all labels in ``window``.

    Integer identities are compared exactly; the dimension identity uses a
    relative tolerance of 1e-9 unless all dimensions are small integers, in
    which case it is exact.
    """
    n = A.n
    inw = np.zeros(n, dtype=bool)
    inw[np.arange(n) if window is None else np.fromiter(window, dtype=np.int64)] = True
    viol: list[Violation] = []
    K = A.keys

    def add(axiom, labels, lhs, rhs):
        if len(viol) < max_report:
            viol.append(Violation(axiom, tuple(K[i] for i in labels), lhs, rhs))

    w = np.flatnonzero(inw)
    cj = A.conj
    if (cj[cj[w]] != w).any():
        i = w[np.flatnonzero(cj[cj[w]] != w)[0]]
        add("conjugation_involution", (i,), int(cj[cj[i]]), int(i))
    if cj[A.unit] != A.unit:
        add("conjugate_unit", (A.unit,), int(cj[A.unit]), A.unit)
    bad = w[A.dim[cj[w]] != A.dim[w]]
    for i in bad[:5]:
        add("conjugate_dimension", (i,), float(A.dim[cj[i]]), float(A.dim[i]))
    bad = w[A.dim[w] < 1]
    for i in bad[:5]:
        add("dimension_lower_bound", (i,), float(A.dim[i]), 1.0)

    a, b, c, m = A.triples()
    keep = inw[a] & inw[b]
    a, b, c, m = a[keep], b[keep], c[keep], m[keep]
    if (m < 0).any():
        j = np.flatnonzero(m < 0)[0]
        add("integrality", (a[j], b[j], c[j]), int(m[j]), 0)

    complete = A.complete_mask()
    pw = complete & inw[:, None] & inw[None, :]
    checked = int(pw.sum())

    # dimension identity on complete in-window pairs
    pair = a * n + b
    dsum = np.bincount(pair, weights=m * A.dim[c], minlength=n * n)
    pa, pb = np.nonzero(pw)
    lhs = A.dim[pa] * A.dim[pb]
    rhs = dsum[pa * n + pb]
    dmax = float(A.dim[w].max()) if len(w) else 1.0
    exact = bool(np.all(A.dim == np.round(A.dim))) and dmax ** 2 * 4 < 2.0 ** 52
    defect = np.abs(lhs - rhs) / np.maximum(1.0, np.abs(lhs))
    max_defect = float(defect.max()) if len(defect) else 0.0
    bad = np.flatnonzero(lhs != rhs) if exact else np.flatnonzero(defect > 1e-9)
    for j in bad[:10]:
        add("dimension", (pa[j], pb[j]), float(lhs[j]), float(rhs[j]))

    # unit: e * x = x * e = x
    for x in w:
        for pair_ in ((A.unit, x), (x, A.unit)):
            if complete[pair_]:
                got = A.fuse(*pair_)
                if got != {int(x): 1}:
                    add("unit", pair_, {K[k]: v for k, v in got.items()}, {K[x]: 1})

    # Frobenius-type symmetries via sparse lookup of full in-window triples
    full = inw[c]
    ta, tb, tc, tm = a[full], b[full], c[full], m[full]
    codes = (ta * n + tb) * n + tc
    order = np.argsort(codes)
    codes_s, vals_s = codes[order], tm[order]

    def symmetry(axiom, ia, ib, ic):
        img_ok = complete[ia, ib] & inw[ia] & inw[ib] & inw[ic]
        got = _lookup(codes_s, vals_s, (ia * n + ib) * n + ic)
        bad = np.flatnonzero(img_ok & (got != tm))
        for j in bad[:10]:
            add(axiom, (ta[j], tb[j], tc[j]), int(tm[j]), int(got[j]))

    # N_{a,b}^c = N_{conj a, c}^b = N_{c, conj b}^a = N_{conj b, conj a}^{conj c}
    symmetry("frobenius_left", cj[ta], tc, tb)
    symmetry("frobenius_right", tc, cj[tb], ta)
    symmetry("conjugation_antihomomorphism", cj[tb], cj[ta], cj[tc])

    # N_{conj a, b}^e = delta_{a, b}
    e = A.unit
    sel = tc == e
    for x, y, mm in zip(ta[sel], tb[sel], tm[sel]):
        if y != cj[x] or mm != 1:
            add("unit_pairing", (cj[x], y), int(mm), int(y == cj[x]))
    has_e = np.zeros(n, dtype=bool)
    has_e[ta[sel][tb[sel] == cj[ta[sel]]]] = True
    for x in w:
        if complete[x, cj[x]] and inw[cj[x]] and not has_e[x]:
            add("unit_pairing", (cj[x], cj[x]), 0, 1)

    return AxiomReport(checked_pairs=checked, violations=viol, max_dim_defect=max_defect)


def check_associativity(A: FusionAlgebra, window: Iterable[int] | None = None,
                        max_report: int = 10) -> list[Violation]:
    """Compare ``(ab)c`` with ``a(bc)`` wherever both sides are fully known."""
    labels = range(A.n) if window is None else list(window)
    comp = A.complete_mask()
    viol = []
    for x, y, z in itertools.product(labels, repeat=3):
        if not (comp[x, y] and comp[y, z]):
            continue
        xy, yz = A.fuse(x, y), A.fuse(y, z)
        if not all(comp[u, z] for u in xy) or not all(comp[x, v] for v in yz):
            continue
        left: dict[int, int] = defaultdict(int)
        right: dict[int, int] = defaultdict(int)
        for u, mu in xy.items():
            for w, mw in A.fuse(u, z).items():
                left[w] += mu * mw
        for v, mv in yz.items():
            for w, mw in A.fuse(x, v).items():
                right[w] += mv * mw
        if left != right:
            viol.append(Violation("associativity", (A.keys[x], A.keys[y], A.keys[z]),
                                  {A.keys[k]: v for k, v in sorted(left.items())},
                                  {A.keys[k]: v for k, v in sorted(right.items())}))
            if len(viol) >= max_report:
                break
    return viol


# user fusion data files -------------------------------------------------------


def _schema() -> dict:
    text = resources.files("qgh").joinpath("data/fusion.schema.json").read_text()
    return json.loads(text)


def load_fusion_file(path, *, check: bool = True) -> FusionAlgebra:
    """Read a fusion data file (JSON, see ``data/fusion.schema.json``).

    With ``check`` the table must be associative and pass
    :func:`validate_axioms`; otherwise :class:`FusionError` names the
    offending labels.
    """
    import jsonschema

    with open(path) as fh:
        try:
            doc = json.load(fh)
        except json.JSONDecodeError as exc:
            raise FusionError(f"{path}: not valid JSON ({exc})") from None
    try:
        jsonschema.validate(doc, _schema())
    except jsonschema.ValidationError as exc:
        where = "/".join(str(p) for p in exc.absolute_path) or "<root>"
        raise FusionError(f"{path}: field {where}: {exc.message}") from None
    labels = [_freeze(x) for x in doc["labels"]]
    idx = {k: i for i, k in enumerate(labels)}
    if len(idx) != len(labels):
        raise FusionError(f"{path}: field labels: duplicate labels")
    n = len(labels)
    for fld in ("conj", "dim"):
        if len(doc[fld]) != n:
            raise FusionError(f"{path}: field {fld}: expected {n} entries, got {len(doc[fld])}")

    def ix(v, fld):
        try:
            return idx[_freeze(v)]
        except KeyError:
            raise FusionError(f"{path}: field {fld}: unknown label {v!r}") from None

    unit = ix(doc["unit"], "unit")
    conj = [ix(v, "conj") for v in doc["conj"]]
    triples = [(ix(r["a"], "fusion.a"), ix(r["b"], "fusion.b"), ix(r["c"], "fusion.c"), r["n"])
               for r in doc["fusion"]]
    dup = [t for t, k in _count(t[:3] for t in triples).items() if k > 1]
    if dup:
        raise FusionError(f"{path}: field fusion: duplicate record for "
                          f"{tuple(labels[i] for i in dup[0])}")
    group = all(float(d) == 1.0 for d in doc["dim"])
    A = FusionAlgebra.from_triples(doc.get("name", str(path)), labels, unit, conj, doc["dim"],
                                   triples, cap=math.inf, complete=np.ones((n, n), bool),
                                   group=group)
    if check:
        assoc = check_associativity(A, max_report=1)
        if assoc:
            v = assoc[0]
            raise FusionError(f"{path}: non-associative fusion at triple {v.labels}: "
                              f"(ab)c = {v.lhs}, a(bc) = {v.rhs}")
        rep = validate_axioms(A)
        if rep.violations:
            v = rep.violations[0]
            raise FusionError(f"{path}: axiom {v.axiom} fails at {v.labels}: {v.lhs} != {v.rhs}")
    return A


def dump_fusion_file(A: FusionAlgebra, path) -> None:
    """Write a complete algebra in the fusion data file format."""
    if not np.isinf(A.cap):
        raise FusionError("only complete (finite-table) algebras can be written; "
                          f"{A.name} is truncated at cap {A.cap:g}")
    a, b, c, m = A.triples()
    doc = {
        "name": A.name,
        "labels": [_thaw(k) for k in A.keys],
        "unit": _thaw(A.keys[A.unit]),
        "conj": [_thaw(A.keys[j]) for j in A.conj],
        "dim": [float(x) for x in A.dim],
        "fusion": [{"a": _thaw(A.keys[x]), "b": _thaw(A.keys[y]), "c": _thaw(A.keys[z]),
                    "n": int(k)} for x, y, z, k in zip(a, b, c, m)],
    }
    with open(path, "w") as fh:
        json.dump(doc, fh, indent=1)


def _freeze(v):
    return tuple(_freeze(x) for x in v) if isinstance(v, list) else v


def _thaw(v):
    return [_thaw(x) for x in v] if isinstance(v, tuple) else v


def _count(items):
    out: dict = defaultdict(int)
    for it in items:
        out[it] += 1
    return out
