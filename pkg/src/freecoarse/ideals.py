"""Group ideals presented by graded bases, and the ideal/entourage dictionary.

A :class:`GradedIdealBase` is intensional: ``member(g, grade)`` decides whether
``g`` lies in the base set of that grade.  Downward closure of the ideal is
implicit in per-element membership.  The checkers below are exhaustive when
handed a whole (finite) group window and sampled otherwise; each report says
which.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from typing import Any, Callable, Hashable, Iterable, Optional, Sequence

import numpy as np

from .coarse import Entourage, Filtration, Report, Window, symmetrize
from .groups import ApElement, FlipElement, GroupOps, ReducedWord, all_flip_vectors, flip_ops

Grade = Hashable


def product_order(g1, g2) -> bool:
    """Componentwise order on tuple grades."""
    if isinstance(g1, tuple):
        return all(a <= b for a, b in zip(g1, g2))
    return g1 <= g2


@dataclass(frozen=True, eq=False)
class GradedIdealBase:
    """Base ``{B_g : g in grades}`` of a group ideal, monotone along ``precedes``.

    ``combine(g, h)`` predicts a grade containing ``B_g B_h^-1``; it may return
    ``None`` when no prediction is available.
    """

    kind: str
    grades: tuple
    member: Callable[[Any, Grade], bool]
    ops: GroupOps
    combine: Optional[Callable[[Grade, Grade], Optional[Grade]]] = None
    precedes: Callable[[Grade, Grade], bool] = product_order
    params: dict = field(default_factory=dict)

    def members(self, elements: Iterable, grade: Grade) -> list:
        return [g for g in elements if self.member(g, grade)]

    def first_grade_containing(self, elements: Iterable, prefer: Optional[Grade] = None) -> Optional[Grade]:
        elements = list(elements)
        order = list(self.grades)
        if prefer is not None:
            order = [prefer] + [g for g in order if g != prefer]
        for g in order:
            if all(self.member(a, g) for a in elements):
                return g
        return None


@dataclass(frozen=True)
class ActionStructure:
    """A group window acting on a window of points."""

    group_elements: tuple
    acted: Window
    action: Callable[[Any, Any], Any]
    ops: GroupOps

    def check_laws(self, samples: Optional[Sequence] = None) -> Report:
        gs = list(samples) if samples is not None else list(self.group_elements)
        e = self.ops.identity
        for x in self.acted:
            if self.action(e, x) != x:
                return Report("action-laws", False, len(gs), witness={"identity-moves": x})
        for g, h in itertools.product(gs, repeat=2):
            for x in self.acted:
                hx = self.action(h, x)
                if hx not in self.acted:
                    continue
                if self.action(self.ops.mul(g, h), x) != self.action(g, hx):
                    return Report("action-laws", False, len(gs), witness={"g": str(g), "h": str(h), "x": str(x)})
        return Report("action-laws", True, len(gs), exhaustive=samples is None)


def left_shift_action(group_elements: Sequence, ops: GroupOps) -> ActionStructure:
    elements = tuple(group_elements)
    return ActionStructure(elements, Window(elements, [str(g) for g in elements]), ops.mul, ops)


# --- difference sets ---------------------------------------------------------------


def difference_set(F: Filtration, r: int, kind: str = "abelian", p: int = 2) -> list:
    """Generators ``x - y`` (or ``x y^-1``) over the pairs of the symmetrised level ``r``.

    The result is deduplicated in window order and contains the identity.
    """
    seen: dict = {}
    for x, y in symmetrize(F.levels(r)).pairs():
        if kind == "abelian":
            d = ApElement(p, ((x, 1), (y, -1)))
        elif kind == "word":
            d = ReducedWord(((x, 1), (y, -1)))
        else:
            raise ValueError(f"unknown difference-set kind {kind!r}")
        seen.setdefault(d, None)
    return list(seen)


# --- generic checkers ----------------------------------------------------------------


def _gkey(g) -> str:
    return str(g)


class _MemberCache:
    def __init__(self, B: GradedIdealBase):
        self.B = B
        self.cache: dict = {}

    def __call__(self, a, g) -> bool:
        key = (a, g)
        if key not in self.cache:
            self.cache[key] = bool(self.B.member(a, g))
        return self.cache[key]


def check_ideal_axioms(
    B: GradedIdealBase,
    samples: Sequence,
    grades: Optional[Sequence] = None,
    exhaustive: bool = False,
    coverage: bool = True,
) -> Report:
    """Identity, difference closure at the predicted grade, and singleton coverage.

    For every pair of grades and every pair of sampled members ``a``, ``b``,
    ``a b^-1`` must lie in ``combine(g, h)``.  ``exhaustive`` is recorded in
    the report; pass the whole group window to make the check exhaustive.
    """
    grades = list(B.grades if grades is None else grades)
    elems = list(dict.fromkeys(samples))
    member = _MemberCache(B)
    ops = B.ops
    rng = {"grades": [_gkey(g) for g in grades], "samples": len(elems)}

    for g in grades:
        if not member(ops.identity, g):
            return Report("ideal-axioms", False, rng, exhaustive, witness={"identity-missing-at": _gkey(g)})

    if B.combine is not None:
        index = {a: i for i, a in enumerate(elems)}
        extended = list(elems)
        D = np.empty((len(elems), len(elems)), dtype=np.int64)
        inv = [ops.inv(b) for b in elems]
        for i, a in enumerate(elems):
            for j in range(len(elems)):
                d = ops.mul(a, inv[j])
                k = index.get(d)
                if k is None:
                    k = index[d] = len(extended)
                    extended.append(d)
                D[i, j] = k
        masks: dict = {}

        def mask(g):
            if g not in masks:
                masks[g] = np.array([member(a, g) for a in extended], dtype=bool)
            return masks[g]

        checked = 0
        for g1, g2 in itertools.product(grades, repeat=2):
            pred = B.combine(g1, g2)
            m1, m2 = mask(g1)[: len(elems)], mask(g2)[: len(elems)]
            if pred is None:
                return Report("ideal-axioms", False, rng, exhaustive, witness={"no-predicted-grade": [_gkey(g1), _gkey(g2)]})
            bad = np.outer(m1, m2) & ~mask(pred)[D]
            checked += int(np.outer(m1, m2).sum())
            if bad.any():
                i, j = (int(v) for v in np.argwhere(bad)[0])
                return Report(
                    "ideal-axioms",
                    False,
                    rng,
                    exhaustive,
                    witness={
                        "a": str(elems[i]),
                        "b": str(elems[j]),
                        "grades": [_gkey(g1), _gkey(g2)],
                        "predicted": _gkey(pred),
                    },
                )
        rng["difference_pairs"] = checked

    for a in elems if coverage else ():
        if not any(member(a, g) for g in grades):
            return Report("ideal-axioms", False, rng, exhaustive, witness={"uncovered-singleton": str(a)})
    return Report("ideal-axioms", True, rng, exhaustive)


def check_monotone(B: GradedIdealBase, samples: Sequence, grades: Optional[Sequence] = None) -> Report:
    grades = list(B.grades if grades is None else grades)
    for g1, g2 in itertools.product(grades, repeat=2):
        if g1 == g2 or not B.precedes(g1, g2):
            continue
        for a in samples:
            if B.member(a, g1) and not B.member(a, g2):
                return Report("monotone", False, len(grades), witness={"element": str(a), "grades": [_gkey(g1), _gkey(g2)]})
    return Report("monotone", True, {"grades": len(grades), "samples": len(samples)})


def check_invariance(
    B: GradedIdealBase,
    samples: Sequence,
    conjugators: Sequence,
    grades: Optional[Sequence] = None,
) -> Report:
    """Conjugates ``c^-1 a c`` of members of each grade must fit in a tested grade.

    The same grade is preferred; ``details['modulus']`` maps each grade to the
    grade that absorbed its conjugates.
    """
    grades = list(B.grades if grades is None else grades)
    ops = B.ops
    modulus = {}
    rng = {"grades": [_gkey(g) for g in grades], "samples": len(samples), "conjugators": len(conjugators)}
    for g in grades:
        conj = []
        origin = []
        for a in B.members(samples, g):
            for c in conjugators:
                conj.append(ops.mul(ops.mul(ops.inv(c), a), c))
                origin.append((a, c))
        target = B.first_grade_containing(conj, prefer=g)
        if target is None:
            for (a, c), y in zip(origin, conj):
                if not any(B.member(y, h) for h in grades):
                    break
            else:
                a, c = origin[0]
                y = conj[0]
            return Report(
                "invariance",
                False,
                rng,
                exhaustive=False,
                witness={"grade": _gkey(g), "element": str(a), "conjugator": str(c), "conjugate": str(y)},
            )
        modulus[_gkey(g)] = _gkey(target)
    same = all(k == v for k, v in modulus.items())
    return Report("invariance", True, rng, exhaustive=False, details={"modulus": modulus, "same_grade": same})


# --- ideals to entourages -------------------------------------------------------------


def entourage_from_ideal(B: GradedIdealBase, grade: Grade, action: ActionStructure) -> Entourage:
    """``eps_A = {(x, g x) : g in A}`` for ``A`` the grade's members in the group window."""
    A = B.members(action.group_elements, grade)
    if action.ops.identity not in A:
        A.append(action.ops.identity)
    win = action.acted
    m = np.zeros((len(win), len(win)), dtype=bool)
    for x in win:
        i = win.index(x)
        for g in A:
            y = action.action(g, x)
            if y in win:
                m[i, win.index(y)] = True
    return Entourage(win, m)


def ideal_ball(B: GradedIdealBase, grade: Grade, x, action: ActionStructure, members: Optional[list] = None) -> set:
    """Row of :func:`entourage_from_ideal` at ``x``, without building the matrix."""
    A = B.members(action.group_elements, grade) if members is None else members
    out = {x}
    for g in A:
        y = action.action(g, x)
        if y in action.acted:
            out.add(y)
    return out


def ideal_filtration(B: GradedIdealBase, chain: Sequence, action: ActionStructure) -> Filtration:
    """Filtration whose level ``k`` is the entourage of ``chain[k]`` (clamped)."""
    chain = list(chain)

    def levels(k: int) -> Entourage:
        return entourage_from_ideal(B, chain[min(k, len(chain) - 1)], action)

    def comp_bound(r: int, s: int) -> int:
        g = B.combine(chain[min(r, len(chain) - 1)], chain[min(s, len(chain) - 1)]) if B.combine else None
        if g is not None:
            for k, h in enumerate(chain):
                if B.precedes(g, h):
                    return k
        return len(chain) - 1

    return Filtration(action.acted, levels, comp_bound, True, len(chain) - 1)


def _coarse_side_check(side: str, B, grades, action: ActionStructure, xs, gs) -> Report:
    ops = B.ops
    modulus = {}
    rng = {"grades": [_gkey(g) for g in grades], "x": len(xs), "g": len(gs)}
    exhaustive = len(xs) == len(gs) == len(action.group_elements)
    for grade in grades:
        A = B.members(action.group_elements, grade)
        needed = []
        origin = []
        for x in xs:
            bx = ideal_ball(B, grade, x, action, A)
            for g in gs:
                if side == "left":
                    moved = [ops.mul(g, y) for y in bx]
                    centre = ops.mul(g, x)
                else:
                    moved = [ops.mul(y, g) for y in bx]
                    centre = ops.mul(x, g)
                cinv = ops.inv(centre)
                for y in moved:
                    # (centre, y) lies in eps_A' iff y centre^-1 lies in A'
                    needed.append(ops.mul(y, cinv))
                    origin.append((x, g, y))
        needed_unique = list(dict.fromkeys(needed))
        target = B.first_grade_containing(needed_unique, prefer=grade)
        if target is None:
            for (x, g, y), d in zip(origin, needed):
                if not any(B.member(d, h) for h in grades):
                    break
            return Report(
                f"{side}-coarse",
                False,
                rng,
                exhaustive,
                witness={"grade": _gkey(grade), "x": str(x), "g": str(g), "escaping": str(y), "shift": str(d)},
            )
        modulus[_gkey(grade)] = _gkey(target)
    same = all(k == v for k, v in modulus.items())
    return Report(f"{side}-coarse", True, rng, exhaustive, details={"modulus": modulus, "same_grade": same})


def check_right_coarse(B: GradedIdealBase, action: ActionStructure, grades=None, xs=None, gs=None) -> Report:
    """``B(x, eps) g`` inside ``B(x g, eps')`` for sampled ``x, g``."""
    grades = list(B.grades if grades is None else grades)
    xs = list(action.group_elements if xs is None else xs)
    gs = list(action.group_elements if gs is None else gs)
    return _coarse_side_check("right", B, grades, action, xs, gs)


def check_left_coarse(B: GradedIdealBase, action: ActionStructure, grades=None, xs=None, gs=None) -> Report:
    """``g B(x, eps)`` inside ``B(g x, eps')`` for sampled ``x, g``."""
    grades = list(B.grades if grades is None else grades)
    xs = list(action.group_elements if xs is None else xs)
    gs = list(action.group_elements if gs is None else gs)
    return _coarse_side_check("left", B, grades, action, xs, gs)


# --- particular ideals ------------------------------------------------------------------


def all_subsets_base(ops: GroupOps) -> GradedIdealBase:
    return GradedIdealBase("all-subsets", (0,), lambda a, g: True, ops, lambda g, h: 0)


def finite_sets_base(window: Window, p: int) -> GradedIdealBase:
    """Finite subsets of ``A(X)`` graded by the window prefix carrying the support.

    Grade ``n`` is the finite subgroup ``A(x_0, ..., x_{n-1})``; these exhaust
    the finite subsets when the window enumerates ``X``.
    """
    from .groups import ap_ops

    def member(a: ApElement, n: int) -> bool:
        return all(window.index(x) < n for x in a.support)

    return GradedIdealBase(
        "finite-sets",
        tuple(range(len(window) + 1)),
        member,
        ap_ops(p),
        lambda n, m: max(n, m),
        params={"window": len(window), "p": p},
    )


def _is_abelian(elements: Sequence, ops: GroupOps) -> bool:
    return all(ops.mul(a, b) == ops.mul(b, a) for a, b in itertools.combinations(elements, 2))


def extend_ideal_abelian(
    B: GradedIdealBase,
    group_elements: Sequence,
    in_subgroup: Callable[[Any], bool],
    max_m: Optional[int] = None,
) -> GradedIdealBase:
    """Extend an ideal base on a subgroup ``H`` to the abelian group ``G``.

    Grade ``(m, g)`` is the set ``G_m + B_g`` where ``G_0 = {0}`` and ``G_m``
    adds the first ``m`` nonzero window elements; the ``G_m`` exhaust the
    finite subsets of the window.
    """
    ops = B.ops
    elements = list(group_elements)
    if not _is_abelian(elements, ops):
        raise ValueError("extension of ideals requires an abelian group")
    order = [ops.identity] + [g for g in elements if g != ops.identity]
    max_m = len(order) - 1 if max_m is None else max_m
    prefix = [frozenset(order[: m + 1]) for m in range(len(order))]

    def member(x, grade) -> bool:
        m, g = grade
        for a in order[: m + 1]:
            h = ops.mul(x, ops.inv(a))
            if in_subgroup(h) and B.member(h, g):
                return True
        return False

    def combine(g1, g2):
        (m1, b1), (m2, b2) = g1, g2
        diffs = {ops.mul(a, ops.inv(b)) for a in prefix[m1] for b in prefix[m2]}
        inner = B.combine(b1, b2) if B.combine else None
        if inner is None:
            return None
        for k, pre in enumerate(prefix):
            if diffs <= pre:
                return (k, inner)
        return None

    def precedes(g1, g2) -> bool:
        return g1[0] <= g2[0] and B.precedes(g1[1], g2[1])

    grades = tuple((m, g) for m in range(max_m + 1) for g in B.grades)
    return GradedIdealBase("extension", grades, member, ops, combine, precedes, params={"inner": B.kind, "max_m": max_m})


def flip_example_base(N: int) -> GradedIdealBase:
    """Base ``H_m`` (vectors supported in ``[m, N]``) on ``H x| <phi>``.

    Grades run ``N, N-1, ..., -N+1``.  ``H_{-N}`` is omitted because on the
    truncated window it is all of ``H`` and would hide unboundedness.
    """

    def member(g: FlipElement, m: int) -> bool:
        return not g.flip and all(i >= m for i in g.vector)

    return GradedIdealBase(
        "flip-example",
        tuple(range(N, -N, -1)),
        member,
        flip_ops(N),
        lambda m1, m2: min(m1, m2),
        lambda m1, m2: m1 >= m2,
        params={"N": N},
    )


def flip_obstruction_check(N: int) -> Report:
    """Every truncated vector is a sum of an ``H_0`` element and a ``phi H_0 phi`` element.

    Hence an invariant ideal containing ``H_0`` contains all of ``H``: the
    restriction to ``H`` becomes bounded.
    """
    B = flip_example_base(N)
    ops = B.ops
    phi = FlipElement.phi(N)
    vectors = all_flip_vectors(N)
    h0 = [v for v in vectors if B.member(v, 0)]
    h0_conj = [ops.mul(ops.mul(ops.inv(phi), h), phi) for h in h0]
    sums = {}
    for a in h0:
        for b in h0_conj:
            sums.setdefault(ops.mul(a, b), (a, b))
    missing = [v for v in vectors if v not in sums]
    rng = {"N": N, "vectors": len(vectors)}
    if missing:
        return Report("flip-obstruction", False, rng, witness={"unsplit": str(missing[0])})
    sample = FlipElement(frozenset((-1, 2)), False, N) if N >= 2 else vectors[-1]
    a, b = sums[sample]
    return Report(
        "flip-obstruction",
        True,
        rng,
        details={"split_count": len(vectors), "example": {"vector": str(sample), "H0": str(a), "phi H0 phi": str(b)}},
    )
