"""Norms and membership in the free coarse group over a windowed coarse space.

For the abelian variety of exponent ``p`` the group ideal has base sets
``Y_{n,r} + {0, z, ..., (p-1) z}`` where ``Y_{n,r}`` is the ``n``-fold sum of
the differences ``x - y`` over pairs of level ``r``.  The norm of ``a`` at
radius ``r`` is the least ``n`` with ``a`` in that base set.  Three routes
compute it:

* a breadth-first oracle over the whole of ``A(X)`` (ground truth, any ``p``);
* for ``p = 2``, a minimum ``T``-join: a minimum-weight perfect matching of the
  support under graph distance in the level-``r`` graph;
* for free-group words, certified lower/upper bounds from abelianization and
  a bounded search over products of conjugates.
"""

from __future__ import annotations

import functools
import itertools
import random
from dataclasses import dataclass, field
from typing import Any, Callable, Iterable, Mapping, Optional, Sequence

import networkx as nx
import numpy as np

from .coarse import Filtration, Report, Window, power, symmetrize
from .groups import (
    AbelianExpP,
    ApElement,
    ReducedWord,
    VarietyTag,
    abelianize,
    all_ap_elements,
    ap_ops,
    augmentation,
    extend_to_hom,
    word_ops,
)
from .ideals import GradedIdealBase, difference_set

EXACT = "exact"
INTERVAL = "interval"
NOT_WITHIN_LIMITS = "not-within-limits"

ORACLE_BUDGET = 1 << 20


class BudgetExceeded(RuntimeError):
    pass


@dataclass(frozen=True)
class FreeCoarseConfig:
    space: Filtration
    z: Any
    variety: VarietyTag = AbelianExpP(2)
    max_grade: int = 6
    max_conj_len: int = 3
    shadow_p: int = 2
    search_budget: int = 80_000
    beam: int = 6

    def __post_init__(self):
        if self.z not in self.space.window:
            raise ValueError(f"distinguished point {self.z!r} not in window")
        if self.max_grade < 1 or self.max_conj_len < 0:
            raise ValueError("search limits must be positive")

    @property
    def p(self) -> int:
        """Prime of the abelian shadow; the variety's own prime when abelian."""
        if isinstance(self.variety, AbelianExpP):
            return self.variety.p
        return self.shadow_p


@dataclass(frozen=True)
class NormResult:
    status: str
    lo: Optional[int]
    hi: Optional[int]
    radius: int
    method: str
    certificate: Any = None
    factors: Optional[tuple] = field(default=None, compare=False, repr=False)

    @classmethod
    def exact(cls, n: int, radius: int, method: str, certificate=None) -> "NormResult":
        return cls(EXACT, n, n, radius, method, certificate)

    @property
    def value(self) -> Optional[int]:
        return self.lo if self.status == EXACT else None

    def to_dict(self) -> dict:
        out = {"status": self.status, "lo": self.lo, "hi": self.hi, "radius": self.radius, "method": self.method}
        if self.certificate is not None:
            out["certificate"] = self.certificate
        return out


# --- oracle -----------------------------------------------------------------------------


@functools.lru_cache(maxsize=128)
def _norm_table(F: Filtration, p: int, r: int) -> np.ndarray:
    """BFS distance from 0 to every element of ``A(window)`` under ``Y_r`` steps (-1: never)."""
    k = len(F.window)
    size = p**k
    if size > ORACLE_BUDGET:
        raise BudgetExceeded(f"p^|X| = {p}^{k} exceeds oracle budget {ORACLE_BUDGET}")
    pw = p ** np.arange(k, dtype=np.int64)
    steps = []
    for g in difference_set(F, r, "abelian", p):
        if g:
            steps.append([(F.window.index(x), m) for x, m in g.terms])
    dist = np.full(size, -1, dtype=np.int32)
    dist[0] = 0
    frontier = np.array([0], dtype=np.int64)
    level = 0
    while frontier.size:
        level += 1
        found = []
        for step in steps:
            c = frontier.copy()
            for i, m in step:
                d = (frontier // pw[i]) % p
                c += (((d + m) % p) - d) * pw[i]
            found.append(c)
        if not found:
            break
        cand = np.unique(np.concatenate(found))
        cand = cand[dist[cand] < 0]
        dist[cand] = level
        frontier = cand
    dist.setflags(write=False)
    return dist


def ap_norm_oracle(a: ApElement, r: int, cfg: FreeCoarseConfig) -> NormResult:
    """Least ``n`` with ``a - i z`` in ``Y_{n,r}`` for some shift ``i``, by exhaustive BFS."""
    F, p = cfg.space, cfg.p
    table = _norm_table(F, p, r)
    best, shift = None, None
    for i in range(p):
        d = int(table[(a - i * ApElement.gen(cfg.z, p)).encode(F.window)])
        if d >= 0 and (best is None or d < best):
            best, shift = d, i
    if best is None:
        return NormResult(NOT_WITHIN_LIMITS, None, None, r, "oracle")
    return NormResult.exact(best, r, "oracle", {"shift": shift})


def forced_shift(a: ApElement, z) -> ApElement:
    """``a - sigma(a) z``: the only shift that can land in the augmentation kernel."""
    return a - augmentation(a) * ApElement.gen(z, a.p)


# --- T-join ---------------------------------------------------------------------------


@functools.lru_cache(maxsize=128)
def _graph_distances(F: Filtration, r: int) -> np.ndarray:
    """Hop distances in the graph of the symmetrised level ``r`` (-1: disconnected)."""
    adj = symmetrize(F.levels(r)).matrix.copy()
    np.fill_diagonal(adj, False)
    n = len(F.window)
    dist = np.full((n, n), -1, dtype=np.int64)
    nbrs = [np.nonzero(adj[i])[0] for i in range(n)]
    for s in range(n):
        dist[s, s] = 0
        frontier = [s]
        while frontier:
            nxt = []
            for u in frontier:
                for v in nbrs[u]:
                    if dist[s, v] < 0:
                        dist[s, v] = dist[s, u] + 1
                        nxt.append(v)
            frontier = nxt
    dist.setflags(write=False)
    return dist


def min_weight_perfect_matching(nodes: Sequence, weight: Callable[[Any, Any], Optional[int]]):
    """Minimum-weight perfect matching on ``nodes``; ``None`` if none exists.

    Pairs with ``weight`` ``None`` are not allowed.
    """
    if not nodes:
        return 0, []
    G = nx.Graph()
    G.add_nodes_from(range(len(nodes)))
    for i, j in itertools.combinations(range(len(nodes)), 2):
        w = weight(nodes[i], nodes[j])
        if w is not None:
            G.add_edge(i, j, weight=w)
    matching = nx.min_weight_matching(G)
    if 2 * len(matching) != len(nodes):
        return None
    pairs = sorted(tuple(sorted(e)) for e in matching)
    total = sum(G[i][j]["weight"] for i, j in pairs)
    return total, [(nodes[i], nodes[j]) for i, j in pairs]


def ap_norm_tjoin(a: ApElement, r: int, cfg: FreeCoarseConfig) -> NormResult:
    """Norm over ``Z_2`` as a minimum T-join with ``T`` the shifted support."""
    if cfg.p != 2:
        return ap_norm_oracle(a, r, cfg)
    F = cfg.space
    b = forced_shift(a, cfg.z)
    T = b.support
    if len(T) % 2:
        raise AssertionError(f"odd support {T!r} after z-adjustment")
    dist = _graph_distances(F, r)
    idx = F.window.index

    def weight(x, y):
        d = int(dist[idx(x), idx(y)])
        return d if d >= 0 else None

    res = min_weight_perfect_matching(T, weight)
    if res is None:
        return NormResult(NOT_WITHIN_LIMITS, None, None, r, "tjoin")
    total, pairs = res
    return NormResult.exact(total, r, "tjoin", {"shift": augmentation(a), "pairs": [list(pq) for pq in pairs]})


def ap_norm(a: ApElement, r: int, cfg: FreeCoarseConfig) -> NormResult:
    """Exact norm via the T-join for ``p = 2`` and the shifted BFS table otherwise."""
    if cfg.p == 2:
        return ap_norm_tjoin(a, r, cfg)
    table = _norm_table(cfg.space, cfg.p, r)
    d = int(table[forced_shift(a, cfg.z).encode(cfg.space.window)])
    if d < 0:
        return NormResult(NOT_WITHIN_LIMITS, None, None, r, "oracle")
    return NormResult.exact(d, r, "oracle", {"shift": augmentation(a)})


def ap_ideal_member(a: ApElement, n: int, r: int, F: Filtration, z) -> bool:
    """Is ``a`` in ``Y_{n,r} + {0, z, ..., (p-1) z}``?"""
    res = ap_norm(a, r, _config_for(F, z, a.p))
    return res.status == EXACT and res.lo <= n


@functools.lru_cache(maxsize=64)
def _config_for(F: Filtration, z, p: int) -> FreeCoarseConfig:
    return FreeCoarseConfig(F, z, AbelianExpP(p))


def y_base(cfg: FreeCoarseConfig, radii: Optional[Iterable[int]] = None, max_grade: Optional[int] = None) -> GradedIdealBase:
    """Graded base of the ideal on ``A(X)`` with grades ``(n, r)``."""
    F, p = cfg.space, cfg.p
    radii = tuple(range(1, F.max_radius + 1) if radii is None else radii)
    max_grade = cfg.max_grade if max_grade is None else max_grade
    acfg = cfg if isinstance(cfg.variety, AbelianExpP) else FreeCoarseConfig(F, cfg.z, AbelianExpP(p))

    @functools.lru_cache(maxsize=None)
    def norm(a: ApElement, r: int) -> Optional[int]:
        res = ap_norm(a, r, acfg)
        return res.lo if res.status == EXACT else None

    def member(a: ApElement, grade) -> bool:
        n, r = grade
        d = norm(a, r)
        return d is not None and d <= n

    grades = tuple((n, r) for n in range(max_grade + 1) for r in radii)
    return GradedIdealBase(
        "free-abelian",
        grades,
        member,
        ap_ops(p),
        lambda g, h: (g[0] + h[0], F.comp_bound(g[1], h[1])),
        params={"p": p, "z": cfg.z, "radii": list(radii), "max_grade": max_grade},
    )


def pullback_base(cfg: FreeCoarseConfig, radii=None, max_grade=None) -> GradedIdealBase:
    """Preimage of the abelian base under ``F(X) -> A(X)``; conjugation-invariant."""
    inner = y_base(cfg, radii, max_grade)
    p = cfg.p
    return GradedIdealBase(
        "pullback",
        inner.grades,
        lambda w, g: inner.member(abelianize(w, p), g),
        word_ops(),
        inner.combine,
        params=dict(inner.params),
    )


# --- exhaustive checks ------------------------------------------------------------------


def restriction_check(F: Filtration, cfg: FreeCoarseConfig, range_: int, radii: Iterable[int]) -> Report:
    """``norm(x - y) <= n`` iff ``(x, y)`` in ``levels(r)^n``, over all window pairs.

    The left side uses the BFS oracle in ``A(X)``; the right side composes the
    level relation ``n`` times.  ``details['table']`` lists every computed norm.
    """
    if cfg.space is not F:
        cfg = FreeCoarseConfig(F, cfg.z, cfg.variety, cfg.max_grade, cfg.max_conj_len, cfg.shadow_p)
    p = cfg.p
    radii = list(radii)
    table = []
    checked = 0
    for r in radii:
        lev = symmetrize(F.levels(r))
        powers = [power(lev, n).matrix for n in range(range_ + 1)]
        for i, x in enumerate(F.window):
            for j, y in enumerate(F.window):
                a = ApElement(p, ((x, 1), (y, -1)))
                res = ap_norm_oracle(a, r, cfg)
                table.append((a, r, res))
                for n in range(range_ + 1):
                    lhs = res.status == EXACT and res.lo <= n
                    checked += 1
                    if lhs != bool(powers[n][i, j]):
                        return Report(
                            "restriction",
                            False,
                            {"n_max": range_, "radii": radii, "p": p},
                            witness={"pair": [x, y], "r": r, "n": n, "norm": res.lo, "in_power": bool(powers[n][i, j])},
                        )
    return Report(
        "restriction",
        True,
        {"n_max": range_, "radii": radii, "p": p, "pairs": len(F.window) ** 2},
        details={"comparisons": checked, "table": table},
    )


def augmentation_obstruction_check(F: Filtration, p: int, z, radii: Iterable[int]) -> Report:
    """No element outside the augmentation kernel is reachable without the forced shift."""
    radii = list(radii)
    k = len(F.window)
    codes = np.arange(p**k, dtype=np.int64)
    digits = (codes[:, None] // (p ** np.arange(k, dtype=np.int64))[None, :]) % p
    aug = digits.sum(axis=1) % p
    zcode = p ** F.window.index(z)
    zdigit = digits[:, F.window.index(z)]
    for r in radii:
        table = _norm_table(F, p, r)
        bad = np.nonzero((aug != 0) & (table >= 0))[0]
        if bad.size:
            return Report(
                "augmentation-obstruction",
                False,
                {"radii": radii, "p": p},
                witness={"element": str(ApElement.decode(int(bad[0]), F.window, p)), "r": r},
            )
        for i in range(p):
            shifted = codes + (((zdigit - i) % p) - zdigit) * zcode
            wrong = (aug != i) & (table[shifted] >= 0)
            if wrong.any():
                c = int(np.nonzero(wrong)[0][0])
                return Report(
                    "augmentation-obstruction",
                    False,
                    {"radii": radii, "p": p},
                    witness={"element": str(ApElement.decode(c, F.window, p)), "shift": i, "r": r},
                )
    return Report("augmentation-obstruction", True, {"radii": radii, "p": p, "elements": p**k})


# --- free-group words ---------------------------------------------------------------------


def _wreduce(letters: Iterable[int]) -> tuple:
    out: list = []
    for a in letters:
        if out and out[-1] == -a:
            out.pop()
        else:
            out.append(a)
    return tuple(out)


def _winv(w: tuple) -> tuple:
    return tuple(-a for a in reversed(w))


def _left_divide(c: tuple, u: tuple) -> tuple:
    """Reduced ``c^-1 u`` for reduced ``c`` and ``u``."""
    k = 0
    n = min(len(c), len(u))
    while k < n and c[k] == u[k]:
        k += 1
    return _winv(c[k:]) + u[k:]


def _words_upto(alphabet: Sequence[int], L: int):
    """Reduced words of length <= L in length-lex order."""
    yield ()
    layer = [()]
    for _ in range(L):
        nxt = []
        for w in layer:
            for a in alphabet:
                if w and w[-1] == -a:
                    continue
                nxt.append(w + (a,))
        yield from nxt
        layer = nxt


class _ConjugateSearch:
    """Conjugates ``g^-1 s g`` of the generators ``s`` in ``D u D z u (D z)^-1``, ``|g| <= L``."""

    def __init__(self, cfg: FreeCoarseConfig, r: int):
        F = cfg.space
        self.window = F.window
        self.p = cfg.p
        k = len(F.window)
        zl = F.window.index(cfg.z) + 1
        gens: dict = {}
        for d in difference_set(F, r, "word"):
            dw = tuple((F.window.index(x) + 1) * s for x, s in d.letters)
            dz = _wreduce(dw + (zl,))
            for s, tag in ((dw, "d"), (dz, "dz"), (_winv(dz), "(dz)^-1")):
                gens.setdefault(s, (dw, tag))
        alphabet = [s * i for i in range(1, k + 1) for s in (1, -1)]
        conj: dict = {}
        for g in _words_upto(alphabet, cfg.max_conj_len):
            gi = _winv(g)
            for s, (d, tag) in gens.items():
                c = _wreduce(gi + s + g)
                conj.setdefault(c, (g, s, d, tag))
        self.conj = conj
        self.words = list(conj)
        pw = self.p ** np.arange(k, dtype=np.int64)
        self.pw = pw
        self.digits = np.array([self._digits(w) for w in self.words], dtype=np.int64).reshape(len(self.words), k)
        self.table = _norm_table(F, self.p, r)
        self.zi = zl - 1

    def _digits(self, w: tuple) -> np.ndarray:
        d = np.zeros(len(self.window), dtype=np.int64)
        for a in w:
            d[abs(a) - 1] += 1 if a > 0 else -1
        return d % self.p

    def ab_norm_digits(self, digits: np.ndarray) -> np.ndarray:
        """Vectorised abelian norm of rows of digits (-1 when unreachable)."""
        p = self.p
        aug = digits.sum(axis=-1) % p
        shifted = digits.copy()
        shifted[..., self.zi] = (shifted[..., self.zi] - aug) % p
        return self.table[shifted @ self.pw]

    def ab_norm(self, w: tuple) -> int:
        return int(self.ab_norm_digits(self._digits(w)[None, :])[0])


@functools.lru_cache(maxsize=32)
def _search_for(cfg: FreeCoarseConfig, r: int) -> _ConjugateSearch:
    return _ConjugateSearch(cfg, r)


def _level_path(F: Filtration, r: int, src: int, dst: int) -> Optional[list]:
    """Shortest path of window indices in the level-``r`` graph, first-neighbour tie-break."""
    dist = _graph_distances(F, r)
    if dist[src, dst] < 0:
        return None
    adj = symmetrize(F.levels(r)).matrix
    path = [src]
    while path[-1] != dst:
        cur = path[-1]
        path.append(next(v for v in range(len(F.window)) if adj[cur, v] and dist[v, dst] == dist[cur, dst] - 1))
    return path


def _path_factors(path: list) -> list:
    """``y0 yk^-1 = (y0 y1^-1)(y1 y2^-1) ... (y_{k-1} yk^-1)`` as letter tuples."""
    return [_wreduce((path[i] + 1, -(path[i + 1] + 1))) for i in range(len(path) - 1)]


def _greedy_certificate(u: tuple, F: Filtration, r: int, zi: int) -> Optional[list]:
    """Cheapest factorisation built from single letters and adjacent letter pairs.

    A letter ``x`` costs one factor per step of a shortest path to ``z`` (the
    last step absorbs ``z``); a pair ``x y^-1`` or ``x^-1 y`` costs one factor
    per step from ``x`` to ``y``, conjugated by ``x`` in the second case.
    Returns ``(g, s)`` pairs or ``None`` when some letter is cut off from ``z``.
    """

    def single(a: int) -> Optional[list]:
        path = _level_path(F, r, abs(a) - 1, zi)
        if path is None:
            return None
        pieces = _path_factors(path)
        if pieces:
            pieces[-1] = _wreduce(pieces[-1] + (zi + 1,))
        else:
            pieces = [(zi + 1,)]
        if a < 0:
            pieces = [_winv(c) for c in reversed(pieces)]
        return [((), c) for c in pieces]

    def pair(a: int, b: int) -> Optional[list]:
        if (a > 0) == (b > 0):
            return None
        if a > 0:
            path = _level_path(F, r, a - 1, abs(b) - 1)
            return None if path is None else [((), c) for c in _path_factors(path)]
        path = _level_path(F, r, abs(b) - 1, abs(a) - 1)
        return None if path is None else [((abs(a),), c) for c in _path_factors(path)]

    best: list = [[]] + [None] * len(u)
    for i in range(1, len(u) + 1):
        options = []
        if best[i - 1] is not None:
            one = single(u[i - 1])
            if one is not None:
                options.append(best[i - 1] + one)
        if i >= 2 and best[i - 2] is not None:
            two = pair(u[i - 2], u[i - 1])
            if two is not None:
                options.append(best[i - 2] + two)
        best[i] = min(options, key=len) if options else None
    return best[-1]


def word_norm_bounds(w: ReducedWord, r: int, cfg: FreeCoarseConfig) -> NormResult:
    """Certified bounds on the least ``n`` with ``w`` a product of ``n`` conjugates.

    Lower bound: the abelian norm of the abelianization.  Upper bound: the
    smallest factor count ``<= cfg.max_grade`` found by iterative deepening
    over conjugates, pruned by the abelian bound.  The certificate lists
    ``(g, s)`` with ``w = prod g^-1 s g``.
    """
    F = cfg.space
    S = _search_for(cfg, r)
    u = tuple((F.window.index(x) + 1) * s for x, s in w.letters)
    lo = S.ab_norm(u)
    limits = {"max_grade": cfg.max_grade, "max_conj_len": cfg.max_conj_len, "budget": cfg.search_budget}
    if not u:
        return NormResult(EXACT, 0, 0, r, "search", {"factors": []}, ())
    if lo < 0:
        return NormResult(NOT_WITHIN_LIMITS, None, None, r, "search", {"limits": limits, "reason": "abelian image unreachable"})
    if lo > cfg.max_grade:
        return NormResult(NOT_WITHIN_LIMITS, lo, None, r, "search", {"limits": limits})

    best = None
    greedy = _greedy_certificate(u, F, r, S.zi)
    if greedy is not None and len(greedy) <= cfg.max_grade:
        best = greedy

    budget = [cfg.search_budget]

    def search(v: tuple, k: int) -> Optional[list]:
        if not v:
            return []
        if k == 0 or budget[0] <= 0:
            return None
        if v in S.conj and k >= 1:
            g, s, _, _ = S.conj[v]
            return [(g, s)]
        if k == 1:
            return None
        vd = S._digits(v)
        rest = S.ab_norm_digits((vd[None, :] - S.digits) % S.p)
        cand = np.nonzero((rest >= 0) & (rest <= k - 1))[0]
        nexts = []
        for ci in cand:
            budget[0] -= 1
            if budget[0] <= 0:
                break
            c = S.words[ci]
            nv = _left_divide(c, v)
            if k == 2:
                if nv in S.conj:
                    g, s, _, _ = S.conj[nv]
                    cg, cs, _, _ = S.conj[c]
                    return [(cg, cs), (g, s)]
            else:
                nexts.append((len(nv), int(ci), nv))
        if k == 2:
            return None
        nexts.sort()
        for _, ci, nv in nexts[: cfg.beam]:
            sub = search(nv, k - 1)
            if sub is not None:
                cg, cs, _, _ = S.conj[S.words[ci]]
                return [(cg, cs)] + sub
        return None

    top = cfg.max_grade if best is None else len(best) - 1
    for k in range(max(lo, 1), top + 1):
        found = search(u, k)
        if found is not None:
            best = found
            break
    if best is None:
        return NormResult(NOT_WITHIN_LIMITS, lo, None, r, "search", {"limits": limits})
    cert = {
        "factors": [
            {"g": _to_word(g, F.window).to_json(F.window), "s": _to_word(s, F.window).to_json(F.window)} for g, s in best
        ]
    }
    hi = len(best)
    status = EXACT if hi == lo else INTERVAL
    return NormResult(status, lo, hi, r, "search", cert, tuple(best))


def _to_word(w: tuple, window: Window) -> ReducedWord:
    return ReducedWord(tuple((window.points[abs(a) - 1], 1 if a > 0 else -1) for a in w))


def certificate_product(res: NormResult, window: Window) -> ReducedWord:
    """Multiply out a search certificate: ``prod g^-1 s g``."""
    out = ReducedWord()
    for g, s in res.factors:
        gw, sw = _to_word(g, window), _to_word(s, window)
        out = out * gw.inverse() * sw * gw
    return out


# --- universal property -------------------------------------------------------------------


def _minimal_grade(B: GradedIdealBase, elements: list, prefer):
    holding = [g for g in B.grades if all(B.member(a, g) for a in elements)]
    minimal = [g for g in holding if not any(h != g and B.precedes(h, g) for h in holding)]
    if not minimal:
        return None
    return prefer if prefer in minimal else minimal[0]


def universal_extension_check(
    f: Mapping,
    cfg: FreeCoarseConfig,
    target: GradedIdealBase,
    range_: int,
    radii: Iterable[int],
) -> Report:
    """Extend ``f: X -> G`` to ``A(X) -> G`` and tabulate a modulus on source grades.

    The target coarse group is ``G`` with the structure of ``target``.  For each
    source grade ``(n, r)`` the first target grade containing the images of
    all its members is reported; a grade with no such target is a
    counterexample.  ``f`` itself must first be coarse into ``G``.  The
    reported grade is minimal in the target's order, the same grade winning ties.
    """
    F, p = cfg.space, cfg.p
    radii = list(radii)
    ops = target.ops
    rng = {"n_max": range_, "radii": radii, "target_grades": len(target.grades)}
    map_modulus = {}
    for r in radii:
        shifts = [ops.mul(f[y], ops.inv(f[x])) for x, y in F.levels(r).pairs()]
        g = target.first_grade_containing(list(dict.fromkeys(shifts)))
        if g is None:
            return Report("universal-extension", False, rng, witness={"map-not-coarse-at-radius": r})
        map_modulus[r] = g
    hom = extend_to_hom(f, AbelianExpP(p), ops)
    for x in F.window:
        if hom(ApElement.gen(x, p)) != f[x]:
            return Report("universal-extension", False, rng, witness={"extension-disagrees-at": x})
    elements = all_ap_elements(F.window, p)
    source = y_base(cfg, radii, range_)
    images = {a: hom(a) for a in elements}
    modulus = {}
    for n in range(range_ + 1):
        for r in radii:
            members = [a for a in elements if source.member(a, (n, r))]
            imgs = list(dict.fromkeys(images[a] for a in members))
            g = _minimal_grade(target, imgs, (n, r))
            if g is None:
                bad = next(a for a in members if not any(target.member(images[a], h) for h in target.grades))
                return Report(
                    "universal-extension",
                    False,
                    rng,
                    witness={"grade": [n, r], "element": str(bad), "image": str(images[bad])},
                )
            modulus[f"{n},{r}"] = list(g) if isinstance(g, tuple) else g
    return Report(
        "universal-extension",
        True,
        rng,
        details={"map_modulus": {str(k): list(v) if isinstance(v, tuple) else v for k, v in map_modulus.items()}, "modulus": modulus},
    )


# --- bounded versus unbounded ---------------------------------------------------------------


def boundedness_growth(ms: Iterable[int], p: int = 2) -> list[dict]:
    """Norms in ``A_p(X)`` for ``X`` with ``2m`` points under the bounded structure.

    Each row records the norm of the full-support element (``T``-join), the
    maximum norm over all of ``A_p(X)`` (oracle), and ``m``.
    """
    from .coarse import bounded_filtration

    rows = []
    for m in ms:
        F = bounded_filtration(2 * m)
        cfg = FreeCoarseConfig(F, 0, AbelianExpP(p))
        full = ApElement(p, tuple((x, 1) for x in F.window))
        full_norm = ap_norm(full, 1, cfg)
        table = _norm_table(F, p, 1)
        maxnorm = max(ap_norm_oracle(a, 1, cfg).lo for a in all_ap_elements(F.window, p))
        rows.append({"m": m, "points": 2 * m, "full_support_norm": full_norm.lo, "max_norm": maxnorm, "reachable": int((table >= 0).sum())})
    return rows


def one_point_norms(p: int = 2) -> list[int]:
    """Norms of every element of the cyclic group ``A_p({z})``."""
    from .coarse import bounded_filtration

    F = bounded_filtration(1)
    cfg = FreeCoarseConfig(F, 0, AbelianExpP(p))
    return [ap_norm_oracle(a, 1, cfg).lo for a in all_ap_elements(F.window, p)]


def ball_growth(cfg: FreeCoarseConfig, radii: Iterable[int], max_n: int) -> list[dict]:
    """Sizes of the grades ``Y_{n,r}`` (unshifted) and ``Y_{n,r} + <z>`` in ``A(X)``."""
    F, p = cfg.space, cfg.p
    k = len(F.window)
    codes = np.arange(p**k, dtype=np.int64)
    digits = (codes[:, None] // (p ** np.arange(k, dtype=np.int64))[None, :]) % p
    zi = F.window.index(cfg.z)
    rows = []
    for r in radii:
        table = _norm_table(F, p, r)
        best = np.full(codes.shape, -1, dtype=np.int64)
        for i in range(p):
            shifted = codes + (((digits[:, zi] - i) % p) - digits[:, zi]) * p**zi
            d = table[shifted].astype(np.int64)
            best = np.where((d >= 0) & ((best < 0) | (d < best)), d, best)
        for n in range(max_n + 1):
            rows.append(
                {
                    "n": n,
                    "r": r,
                    "count": int(((table >= 0) & (table <= n)).sum()),
                    "with_shifts": int(((best >= 0) & (best <= n)).sum()),
                }
            )
    return rows


def random_words(window: Window, count: int, max_len: int, seed: int) -> list[ReducedWord]:
    rng = random.Random(seed)
    out = []
    pts = list(window.points)
    while len(out) < count:
        n = rng.randint(0, max_len)
        w = ReducedWord(tuple((rng.choice(pts), rng.choice((1, -1))) for _ in range(n)))
        out.append(w)
    return out
