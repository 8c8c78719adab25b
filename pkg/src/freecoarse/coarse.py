"""Entourages and filtrations on finite windows of coarse spaces.

A coarse structure is presented by a monotone sequence of entourages
``levels(0) <= levels(1) <= ...`` together with a declared composition bound
``levels(r) o levels(s) <= levels(comp_bound(r, s))``.  Everything is computed
relative to a finite :class:`Window` of points, with entourages stored as
dense boolean matrices in window order.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Mapping, Optional, Sequence

import numpy as np

Point = Hashable


class WindowMismatch(ValueError):
    pass


class MetricError(ValueError):
    """A metric table violates an axiom; ``witness`` names the offending points."""

    def __init__(self, message: str, witness: tuple):
        super().__init__(f"{message}: {witness!r}")
        self.witness = witness


@dataclass(frozen=True)
class Report:
    """Outcome of a check, with the range it covered and a witness on failure."""

    name: str
    passed: bool
    tested_range: Any = None
    exhaustive: bool = True
    witness: Any = None
    details: dict = field(default_factory=dict)

    def __bool__(self) -> bool:
        return self.passed

    def to_dict(self) -> dict:
        out = {
            "name": self.name,
            "status": "pass" if self.passed else "fail",
            "range": self.tested_range,
            "exhaustive": self.exhaustive,
        }
        if self.witness is not None:
            out["witness"] = self.witness
        if self.details:
            out["details"] = self.details
        return out


class Window:
    """Finite, ordered sample of points of a coarse space."""

    __slots__ = ("points", "labels", "_index")

    def __init__(self, points: Iterable[Point], labels: Optional[Sequence[str]] = None):
        pts = tuple(points)
        if not pts:
            raise ValueError("window must be nonempty")
        index = {x: i for i, x in enumerate(pts)}
        if len(index) != len(pts):
            raise ValueError("window points must be distinct")
        if labels is not None:
            labels = tuple(labels)
            if len(labels) != len(pts):
                raise ValueError("one label per point required")
        self.points = pts
        self.labels = labels
        self._index = index

    def __len__(self) -> int:
        return len(self.points)

    def __iter__(self):
        return iter(self.points)

    def __contains__(self, x) -> bool:
        return x in self._index

    def __eq__(self, other) -> bool:
        return isinstance(other, Window) and self.points == other.points

    def __hash__(self) -> int:
        return hash(self.points)

    def __repr__(self) -> str:
        return f"Window({list(self.points)!r})"

    def index(self, x: Point) -> int:
        try:
            return self._index[x]
        except KeyError:
            raise KeyError(f"point {x!r} not in window") from None

    def label(self, x: Point) -> str:
        if self.labels is None:
            return str(x)
        return self.labels[self.index(x)]

    def subwindow(self, ys: Iterable[Point]) -> "Window":
        keep = set(ys)
        for y in keep:
            self.index(y)
        pts = [x for x in self.points if x in keep]
        labels = None
        if self.labels is not None:
            labels = [self.labels[self._index[x]] for x in pts]
        return Window(pts, labels)


class Entourage:
    """Reflexive relation on a window, stored as a read-only boolean matrix."""

    __slots__ = ("window", "matrix")

    def __init__(self, window: Window, matrix: np.ndarray):
        m = np.array(matrix, dtype=bool)
        n = len(window)
        if m.shape != (n, n):
            raise ValueError(f"matrix shape {m.shape} does not match window size {n}")
        np.fill_diagonal(m, True)
        m.setflags(write=False)
        self.window = window
        self.matrix = m

    @classmethod
    def from_pairs(cls, window: Window, pairs: Iterable[tuple]) -> "Entourage":
        m = np.zeros((len(window), len(window)), dtype=bool)
        for x, y in pairs:
            m[window.index(x), window.index(y)] = True
        return cls(window, m)

    @classmethod
    def diagonal(cls, window: Window) -> "Entourage":
        return cls(window, np.eye(len(window), dtype=bool))

    @classmethod
    def full(cls, window: Window) -> "Entourage":
        return cls(window, np.ones((len(window), len(window)), dtype=bool))

    def pairs(self) -> list[tuple]:
        pts = self.window.points
        return [(pts[i], pts[j]) for i, j in zip(*np.nonzero(self.matrix))]

    def __contains__(self, pair) -> bool:
        x, y = pair
        return bool(self.matrix[self.window.index(x), self.window.index(y)])

    def __len__(self) -> int:
        return int(self.matrix.sum())

    def __eq__(self, other) -> bool:
        return (
            isinstance(other, Entourage)
            and self.window == other.window
            and np.array_equal(self.matrix, other.matrix)
        )

    def __hash__(self) -> int:
        return hash((self.window, self.matrix.tobytes()))

    def __le__(self, other: "Entourage") -> bool:
        _same_window(self, other)
        return not np.any(self.matrix & ~other.matrix)

    def __repr__(self) -> str:
        return f"Entourage({len(self)} pairs on {len(self.window)} points)"

    def is_symmetric(self) -> bool:
        return bool(np.array_equal(self.matrix, self.matrix.T))

    def to_json(self) -> list:
        return [[x, y] for x, y in self.pairs()]


def _same_window(e: Entourage, d: Entourage) -> None:
    if e.window != d.window:
        raise WindowMismatch("entourages live on different windows")


def compose(e: Entourage, d: Entourage) -> Entourage:
    """``{(x, y): exists z with (x, z) in e and (z, y) in d}``."""
    _same_window(e, d)
    prod = e.matrix.astype(np.int32) @ d.matrix.astype(np.int32)
    return Entourage(e.window, prod > 0)


def inverse(e: Entourage) -> Entourage:
    return Entourage(e.window, e.matrix.T)


def symmetrize(e: Entourage) -> Entourage:
    return Entourage(e.window, e.matrix | e.matrix.T)


def power(e: Entourage, n: int) -> Entourage:
    """n-fold composition; ``power(e, 0)`` is the diagonal."""
    out = Entourage.diagonal(e.window)
    for _ in range(n):
        out = compose(out, e)
    return out


def ball(x: Point, e: Entourage) -> set:
    i = e.window.index(x)
    pts = e.window.points
    return {pts[j] for j in np.nonzero(e.matrix[i])[0]}


class Filtration:
    """Countable monotone base of a coarse structure on a window.

    ``levels(r)`` must grow with ``r`` and be reflexive; ``comp_bound`` is
    declared data which :meth:`validate` checks on the window rather than
    trusting.  ``max_radius`` is the last level consulted by searches over
    radii (on a finite window the levels stabilise).
    """

    def __init__(
        self,
        window: Window,
        levels: Callable[[int], Entourage],
        comp_bound: Callable[[int, int], int],
        sym: bool,
        max_radius: int,
        distance: Optional[np.ndarray] = None,
    ):
        self.window = window
        self._levels = levels
        self.comp_bound = comp_bound
        self.sym = sym
        self.max_radius = max_radius
        self.distance = distance
        self._cache: dict[int, Entourage] = {}

    def __repr__(self) -> str:
        return f"Filtration({len(self.window)} points, max_radius={self.max_radius})"

    def levels(self, r: int) -> Entourage:
        if r < 0:
            raise ValueError("radius index must be non-negative")
        if r not in self._cache:
            lev = self._levels(r)
            if lev.window != self.window:
                raise WindowMismatch("level lives on a different window")
            self._cache[r] = lev
        return self._cache[r]

    def radii(self) -> range:
        return range(self.max_radius + 1)

    def validate(self, upto: Optional[int] = None) -> Report:
        """Exhaustively check reflexivity, monotonicity, symmetry and comp_bound."""
        upto = self.max_radius if upto is None else upto
        for r in range(upto + 1):
            lev = self.levels(r)
            if r and not self.levels(r - 1) <= lev:
                return Report("filtration", False, upto, witness={"non-monotone-at": r})
            if self.sym and not lev.is_symmetric():
                return Report("filtration", False, upto, witness={"asymmetric-at": r})
        for r, s in itertools.product(range(upto + 1), repeat=2):
            c = self.comp_bound(r, s)
            prod = compose(self.levels(r), self.levels(s))
            bad = prod.matrix & ~self.levels(c).matrix
            if bad.any():
                i, j = (int(v) for v in np.argwhere(bad)[0])
                pts = self.window.points
                return Report(
                    "filtration",
                    False,
                    upto,
                    witness={"r": r, "s": s, "pair": [pts[i], pts[j]]},
                )
        return Report("filtration", True, upto)


@dataclass(frozen=True)
class Modulus:
    """Radius map ``r -> r'`` tabulated on ``0..len(values)-1``."""

    values: tuple

    def __call__(self, r: int) -> int:
        return self.values[r]

    @property
    def range(self) -> int:
        return len(self.values) - 1

    def is_monotone(self) -> bool:
        return all(a <= b for a, b in zip(self.values, self.values[1:]))


@dataclass(frozen=True)
class ModulusResult:
    ok: bool
    modulus: Optional[Modulus] = None
    witness: Optional[dict] = None

    def __bool__(self) -> bool:
        return self.ok


def _as_map(f) -> Callable[[Point], Point]:
    if isinstance(f, Mapping):
        return f.__getitem__
    return f


def is_connected(F: Filtration) -> tuple[bool, Optional[int]]:
    for r in F.radii():
        if F.levels(r).matrix.all():
            return True, r
    return False, None


def is_bounded(F: Filtration, Y: Iterable[Point]) -> bool:
    idx = [F.window.index(y) for y in Y]
    if not idx:
        return True
    for r in F.radii():
        m = F.levels(r).matrix
        if m[:, idx].all(axis=1).any():
            return True
    return False


def restrict(F: Filtration, Y: Iterable[Point]) -> Filtration:
    sub = F.window.subwindow(Y)
    if len(sub) == 0:
        raise ValueError("cannot restrict to an empty set")
    idx = np.array([F.window.index(y) for y in sub.points])

    def levels(r: int) -> Entourage:
        return Entourage(sub, F.levels(r).matrix[np.ix_(idx, idx)])

    dist = None if F.distance is None else F.distance[np.ix_(idx, idx)]
    return Filtration(sub, levels, F.comp_bound, F.sym, F.max_radius, dist)


def product(F1: Filtration, F2: Filtration) -> Filtration:
    pts = [(a, b) for a in F1.window for b in F2.window]
    labels = None
    if F1.window.labels is not None or F2.window.labels is not None:
        labels = [f"({F1.window.label(a)},{F2.window.label(b)})" for a, b in pts]
    win = Window(pts, labels)

    def levels(r: int) -> Entourage:
        # kron matches the row-major (a, b) point order
        m = np.kron(F1.levels(r).matrix.astype(np.int8), F2.levels(r).matrix.astype(np.int8))
        return Entourage(win, m > 0)

    def comp_bound(r: int, s: int) -> int:
        return max(F1.comp_bound(r, s), F2.comp_bound(r, s))

    return Filtration(win, levels, comp_bound, F1.sym and F2.sym, max(F1.max_radius, F2.max_radius))


def _image_pairs(f, e: Entourage, target: Window) -> tuple[np.ndarray, np.ndarray]:
    fmap = _as_map(f)
    img = np.array([target.index(fmap(x)) for x in e.window.points])
    rows, cols = np.nonzero(e.matrix)
    return img[rows], img[cols]


def coarse_modulus(f, F: Filtration, F2: Filtration, range_: int) -> ModulusResult:
    """Least target radius per source radius, or the pair that escapes every level."""
    values = []
    for r in range(range_ + 1):
        a, b = _image_pairs(f, F.levels(r), F2.window)
        for r2 in F2.radii():
            if F2.levels(r2).matrix[a, b].all():
                values.append(r2)
                break
        else:
            top = F2.levels(F2.max_radius).matrix
            k = int(np.argmin(top[a, b]))
            src = F.levels(r).pairs()[k]
            return ModulusResult(
                False,
                witness={"radius": r, "pair": list(src), "image": [F2.window.points[a[k]], F2.window.points[b[k]]]},
            )
    return ModulusResult(True, Modulus(tuple(values)))


def is_large(F: Filtration, Y: Iterable[Point]) -> tuple[bool, Optional[int]]:
    idx = [F.window.index(y) for y in Y]
    if not idx:
        return False, None
    for r in F.radii():
        if F.levels(r).matrix[idx, :].any(axis=0).all():
            return True, r
    return False, None


def _uncovered(F: Filtration, Y: Iterable[Point]) -> Optional[Point]:
    idx = [F.window.index(y) for y in Y]
    covered = F.levels(F.max_radius).matrix[idx, :].any(axis=0) if idx else np.zeros(len(F.window), bool)
    missing = np.nonzero(~covered)[0]
    return F.window.points[missing[0]] if len(missing) else None


def check_asymorphism(f, F: Filtration, F2: Filtration, range_: int) -> Report:
    fmap = _as_map(f)
    images: dict = {}
    for x in F.window:
        y = fmap(x)
        if y in images:
            return Report("asymorphism", False, range_, witness={"collision": [images[y], x], "image": y})
        images[y] = x
    missing = [y for y in F2.window if y not in images]
    if missing or len(images) != len(F2.window):
        return Report("asymorphism", False, range_, witness={"not-onto": missing[:1]})
    fwd = coarse_modulus(fmap, F, F2, range_)
    if not fwd:
        return Report("asymorphism", False, range_, witness={"forward": fwd.witness})
    bwd = coarse_modulus(images.__getitem__, F2, F, range_)
    if not bwd:
        return Report("asymorphism", False, range_, witness={"backward": bwd.witness})
    return Report(
        "asymorphism",
        True,
        range_,
        details={"forward": list(fwd.modulus.values), "backward": list(bwd.modulus.values)},
    )


def check_coarse_equivalence_witness(Y, Y2, f, F: Filtration, F2: Filtration, range_: int) -> Report:
    """Check that ``f: Y -> Y2`` witnesses a coarse equivalence; not a decision procedure."""
    Y, Y2 = list(Y), list(Y2)
    for name, space, sub in (("source", F, Y), ("target", F2, Y2)):
        ok, _ = is_large(space, sub)
        if not ok:
            return Report(
                "coarse-equivalence",
                False,
                range_,
                witness={"not-large": name, "uncovered": _uncovered(space, sub)},
            )
    asym = check_asymorphism(f, restrict(F, Y), restrict(F2, Y2), range_)
    return Report("coarse-equivalence", asym.passed, range_, witness=asym.witness, details=asym.details)


def metric_filtration(
    points: Sequence[Point],
    metric: Callable[[Point, Point], int],
    labels: Optional[Sequence[str]] = None,
) -> Filtration:
    """Filtration ``levels(r) = {d <= r}`` of an integer-valued metric."""
    win = Window(points, labels)
    n = len(win)
    dist = np.empty((n, n), dtype=np.int64)
    for i, x in enumerate(win.points):
        for j, y in enumerate(win.points):
            d = metric(x, y)
            if int(d) != d or d < 0:
                raise MetricError("metric must take non-negative integer values", (x, y))
            dist[i, j] = d
    return _filtration_from_distances(win, dist)


def _filtration_from_distances(win: Window, dist: np.ndarray) -> Filtration:
    pts = win.points
    n = len(win)
    if not np.array_equal(dist, dist.T):
        i, j = (int(v) for v in np.argwhere(dist != dist.T)[0])
        raise MetricError("metric is not symmetric", (pts[i], pts[j]))
    zero = dist == 0
    if not np.array_equal(zero, np.eye(n, dtype=bool)):
        i, j = (int(v) for v in np.argwhere(zero != np.eye(n, dtype=bool))[0])
        raise MetricError("metric must vanish exactly on the diagonal", (pts[i], pts[j]))
    for k in range(n):
        bad = dist > dist[:, k][:, None] + dist[k, :][None, :]
        if bad.any():
            i, j = (int(v) for v in np.argwhere(bad)[0])
            raise MetricError("triangle inequality fails", (pts[i], pts[k], pts[j]))
    dist.setflags(write=False)

    def levels(r: int) -> Entourage:
        return Entourage(win, dist <= r)

    return Filtration(win, levels, lambda r, s: r + s, True, int(dist.max()), dist)


def path_filtration(n: int) -> Filtration:
    """Integer points ``0..n-1`` with ``|i - j|``."""
    pts = list(range(n))
    return metric_filtration(pts, lambda a, b: abs(a - b), [f"x{i}" for i in pts])


def grid_filtration(rows: int, cols: int) -> Filtration:
    """Points of ``[0,rows) x [0,cols)`` with the L1 metric, row-major."""
    pts = [(i, j) for i in range(rows) for j in range(cols)]
    return l1_filtration(pts)


def l1_filtration(points: Sequence[tuple]) -> Filtration:
    pts = [tuple(int(c) for c in p) for p in points]
    return metric_filtration(
        pts,
        lambda a, b: sum(abs(u - v) for u, v in zip(a, b)),
        [f"x{i}" for i in range(len(pts))],
    )


def bounded_filtration(n: int) -> Filtration:
    """``n`` points under the discrete metric: one step reaches everything."""
    pts = list(range(n))
    return metric_filtration(pts, lambda a, b: int(a != b), [f"x{i}" for i in pts])


def table_filtration(points: Sequence[Point], table: Sequence[Sequence[int]], labels=None) -> Filtration:
    win = Window(points, labels)
    dist = np.array(table, dtype=np.int64)
    if dist.shape != (len(win), len(win)):
        raise MetricError("metric table shape does not match point count", (dist.shape, len(win)))
    if (dist < 0).any():
        i, j = (int(v) for v in np.argwhere(dist < 0)[0])
        raise MetricError("metric must be non-negative", (win.points[i], win.points[j]))
    return _filtration_from_distances(win, dist.copy())


def diagonal_filtration(points: Sequence[Point]) -> Filtration:
    """Every level is the diagonal: the disconnected structure."""
    win = Window(points)
    return Filtration(win, lambda r: Entourage.diagonal(win), max, True, 0)
