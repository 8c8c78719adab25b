"""Element arithmetic: free abelian groups of prime exponent, free groups,
homomorphism extension, and the reflection semidirect product ``H x| <phi>``.
"""

from __future__ import annotations

import re
from dataclasses import dataclass
from typing import Any, Callable, Hashable, Iterable, Mapping, NamedTuple, Optional, Union

from .coarse import Window

Point = Hashable


def _is_prime(p: int) -> bool:
    return p >= 2 and all(p % q for q in range(2, int(p**0.5) + 1))


class ModulusMismatch(ValueError):
    pass


class ParseError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} at position {position}")
        self.position = position


@dataclass(frozen=True)
class AbelianExpP:
    """Variety of abelian groups of exponent ``p``."""

    p: int

    def __post_init__(self):
        if not _is_prime(self.p):
            raise ValueError(f"p={self.p} is not prime")


@dataclass(frozen=True)
class AllGroups:
    pass


VarietyTag = Union[AbelianExpP, AllGroups]


class GroupOps(NamedTuple):
    mul: Callable[[Any, Any], Any]
    inv: Callable[[Any], Any]
    identity: Any

    def power(self, g, m: int):
        if m < 0:
            g, m = self.inv(g), -m
        out = self.identity
        for _ in range(m):
            out = self.mul(out, g)
        return out


# --- A(X): free abelian group of exponent p ------------------------------------


@dataclass(frozen=True)
class ApElement:
    """Finite sum ``m_1 x_1 + ... + m_k x_k`` with nonzero ``m_i`` in ``Z_p``.

    ``terms`` is kept sorted by point with zero coefficients dropped, so equal
    elements compare equal.  Point ids must be mutually orderable.
    """

    p: int
    terms: tuple = ()

    def __post_init__(self):
        merged: dict = {}
        for x, m in self.terms:
            merged[x] = (merged.get(x, 0) + int(m)) % self.p
        object.__setattr__(self, "terms", tuple(sorted((x, m) for x, m in merged.items() if m)))

    @classmethod
    def zero(cls, p: int) -> "ApElement":
        return cls(p)

    @classmethod
    def gen(cls, x: Point, p: int, m: int = 1) -> "ApElement":
        return cls(p, ((x, m),))

    @classmethod
    def from_dict(cls, coeffs: Mapping, p: int) -> "ApElement":
        return cls(p, tuple(coeffs.items()))

    @property
    def support(self) -> tuple:
        return tuple(x for x, _ in self.terms)

    def coeff(self, x: Point) -> int:
        return dict(self.terms).get(x, 0)

    def _check(self, other: "ApElement") -> None:
        if not isinstance(other, ApElement):
            raise TypeError(f"cannot combine ApElement with {type(other).__name__}")
        if other.p != self.p:
            raise ModulusMismatch(f"p={self.p} vs p={other.p}")

    def __add__(self, other: "ApElement") -> "ApElement":
        self._check(other)
        return ApElement(self.p, self.terms + other.terms)

    def __neg__(self) -> "ApElement":
        return ApElement(self.p, tuple((x, -m) for x, m in self.terms))

    def __sub__(self, other: "ApElement") -> "ApElement":
        return self + (-other)

    def __rmul__(self, k: int) -> "ApElement":
        return ApElement(self.p, tuple((x, k * m) for x, m in self.terms))

    def __bool__(self) -> bool:
        return bool(self.terms)

    def __len__(self) -> int:
        return len(self.terms)

    def __str__(self) -> str:
        if not self.terms:
            return "0"
        return "+".join(f"x{x}" if m == 1 else f"{m}x{x}" for x, m in self.terms)

    def to_json(self, window: Optional[Window] = None) -> dict:
        key = (lambda x: window.label(x)) if window is not None else str
        return {key(x): m for x, m in self.terms}

    def encode(self, window: Window) -> int:
        """Base-``p`` integer code with digit ``i`` the coefficient of point ``i``."""
        return sum(m * self.p ** window.index(x) for x, m in self.terms)

    @classmethod
    def decode(cls, code: int, window: Window, p: int) -> "ApElement":
        terms = []
        for x in window.points:
            code, m = divmod(code, p)
            if m:
                terms.append((x, m))
        return cls(p, tuple(terms))


def augmentation(a: ApElement) -> int:
    """Sum of coefficients mod p; its kernel is the subgroup of degree-zero elements."""
    return sum(m for _, m in a.terms) % a.p


def ap_add(a: ApElement, b: ApElement) -> ApElement:
    return a + b


def ap_ops(p: int) -> GroupOps:
    return GroupOps(lambda a, b: a + b, lambda a: -a, ApElement.zero(p))


def format_ap(a: ApElement, window: Window) -> str:
    """Render with window labels, e.g. ``x0+2x3``; ``0`` for the identity."""
    if not a.terms:
        return "0"
    parts = []
    for x, m in sorted(a.terms, key=lambda t: window.index(t[0])):
        lab = window.label(x)
        parts.append(lab if m == 1 else f"{m}{lab}")
    return "+".join(parts)


def format_word(w: "ReducedWord", window: Window) -> str:
    if not w.letters:
        return "e"
    return " ".join(window.label(x) if s == 1 else f"{window.label(x)}^-1" for x, s in w.letters)


def all_ap_elements(window: Window, p: int) -> list[ApElement]:
    return [ApElement.decode(c, window, p) for c in range(p ** len(window))]


# --- F(X): free group on reduced words -------------------------------------------


@dataclass(frozen=True)
class ReducedWord:
    """Freely reduced word over ``X u X^-1``; the empty word is the identity."""

    letters: tuple = ()

    def __post_init__(self):
        stack: list = []
        for x, s in self.letters:
            if s not in (1, -1):
                raise ValueError(f"exponent must be +1 or -1, got {s!r}")
            if stack and stack[-1] == (x, -s):
                stack.pop()
            else:
                stack.append((x, s))
        object.__setattr__(self, "letters", tuple(stack))

    @classmethod
    def identity(cls) -> "ReducedWord":
        return cls()

    @classmethod
    def gen(cls, x: Point, s: int = 1) -> "ReducedWord":
        return cls(((x, s),))

    def __mul__(self, other: "ReducedWord") -> "ReducedWord":
        return ReducedWord(self.letters + other.letters)

    def inverse(self) -> "ReducedWord":
        return ReducedWord(tuple((x, -s) for x, s in reversed(self.letters)))

    def __len__(self) -> int:
        return len(self.letters)

    def __bool__(self) -> bool:
        return bool(self.letters)

    def __str__(self) -> str:
        if not self.letters:
            return "e"
        return " ".join(f"x{x}" if s == 1 else f"x{x}^-1" for x, s in self.letters)

    def to_json(self, window: Optional[Window] = None) -> list:
        key = (lambda x: window.label(x)) if window is not None else (lambda x: x)
        return [[key(x), s] for x, s in self.letters]


def word_multiply(u: ReducedWord, v: ReducedWord) -> ReducedWord:
    return u * v


def word_invert(u: ReducedWord) -> ReducedWord:
    return u.inverse()


def word_ops() -> GroupOps:
    return GroupOps(lambda u, v: u * v, lambda u: u.inverse(), ReducedWord())


def abelianize(w: ReducedWord, p: int) -> ApElement:
    return ApElement(p, w.letters)


# --- homomorphisms ---------------------------------------------------------------


def extend_to_hom(f: Mapping, variety: VarietyTag, target: GroupOps) -> Callable:
    """Extend an alphabet map to the free group of ``variety``.

    For ``AbelianExpP(p)`` the images must commute pairwise and have exponent
    dividing ``p``; this is checked on every alphabet point.
    """
    images = dict(f)
    if isinstance(variety, AbelianExpP):
        p = variety.p
        pts = list(images)
        for x in pts:
            if target.power(images[x], p) != target.identity:
                raise ValueError(f"image of {x!r} does not have exponent {p}")
        for i, x in enumerate(pts):
            for y in pts[i + 1 :]:
                gx, gy = images[x], images[y]
                if target.mul(gx, gy) != target.mul(gy, gx):
                    raise ValueError(f"images of {x!r} and {y!r} do not commute")

        def hom(a: ApElement):
            if a.p != p:
                raise ModulusMismatch(f"p={a.p} vs variety p={p}")
            out = target.identity
            for x, m in a.terms:
                out = target.mul(out, target.power(images[x], m))
            return out

        return hom

    def hom_word(w: ReducedWord):
        out = target.identity
        for x, s in w.letters:
            out = target.mul(out, images[x] if s == 1 else target.inv(images[x]))
        return out

    return hom_word


# --- H x| <phi>, H = direct sum of Z_2 over Z -----------------------------------


@dataclass(frozen=True)
class FlipElement:
    """``(v, flip)`` with ``v`` a finite set of indices in ``-N..N`` (a Z_2-vector).

    Multiplication is ``(v, a)(w, b) = (v + phi^a(w), a xor b)`` where ``phi``
    negates indices.
    """

    vector: frozenset
    flip: bool
    N: int

    def __post_init__(self):
        v = frozenset(int(i) for i in self.vector)
        bad = [i for i in v if abs(i) > self.N]
        if bad:
            raise ValueError(f"index {bad[0]} outside window -{self.N}..{self.N}")
        object.__setattr__(self, "vector", v)
        object.__setattr__(self, "flip", bool(self.flip))

    @classmethod
    def identity(cls, N: int) -> "FlipElement":
        return cls(frozenset(), False, N)

    @classmethod
    def basis(cls, n: int, N: int) -> "FlipElement":
        return cls(frozenset((n,)), False, N)

    @classmethod
    def phi(cls, N: int) -> "FlipElement":
        return cls(frozenset(), True, N)

    def _checkN(self, other: "FlipElement") -> None:
        if other.N != self.N:
            raise ValueError(f"window N={self.N} vs N={other.N}")

    def __mul__(self, other: "FlipElement") -> "FlipElement":
        self._checkN(other)
        w = other.vector
        if self.flip:
            w = frozenset(-i for i in w)
        return FlipElement(self.vector ^ w, self.flip != other.flip, self.N)

    def inverse(self) -> "FlipElement":
        if not self.flip:
            return self
        return FlipElement(frozenset(-i for i in self.vector), True, self.N)

    def __str__(self) -> str:
        v = "+".join(f"e{i}" for i in sorted(self.vector)) or "0"
        return f"({v}, {'phi' if self.flip else 'id'})"

    def to_json(self) -> dict:
        return {"vector": sorted(self.vector), "flip": self.flip}


def flip_multiply(g1: FlipElement, g2: FlipElement) -> FlipElement:
    return g1 * g2


def flip_ops(N: int) -> GroupOps:
    return GroupOps(lambda a, b: a * b, lambda a: a.inverse(), FlipElement.identity(N))


def all_flip_vectors(N: int) -> list[FlipElement]:
    idx = list(range(-N, N + 1))
    out = []
    for mask in range(1 << len(idx)):
        out.append(FlipElement(frozenset(i for k, i in enumerate(idx) if mask >> k & 1), False, N))
    return out


def all_flip_elements(N: int) -> list[FlipElement]:
    vecs = all_flip_vectors(N)
    return vecs + [FlipElement(v.vector, True, N) for v in vecs]


# --- parsing ---------------------------------------------------------------------

_TERM = re.compile(r"\s*([+-]?)\s*(\d*)\s*([A-Za-z_][\w]*)\s*")
_LETTER = re.compile(r"\s*([A-Za-z_][\w]*)(\^(-?1))?\s*")


def _lookup(window: Window, label: str, pos: int) -> Point:
    labels = window.labels or [str(x) for x in window.points]
    try:
        return window.points[list(labels).index(label)]
    except ValueError:
        raise ParseError(f"unknown point {label!r}", pos) from None


def parse_ap_element(text: str, window: Window, p: int) -> ApElement:
    """Parse ``"x0+x2"``, ``"2x0-x3"`` or ``"0"`` over the window's labels."""
    s = text.strip()
    if s in ("", "0"):
        return ApElement.zero(p)
    pos = 0
    terms = []
    while pos < len(text):
        m = _TERM.match(text, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot parse term {text[pos:]!r}", pos)
        if pos > 0 and not m.group(1):
            raise ParseError("expected '+' or '-'", pos)
        sign = -1 if m.group(1) == "-" else 1
        coeff = int(m.group(2)) if m.group(2) else 1
        terms.append((_lookup(window, m.group(3), m.start(3)), sign * coeff))
        pos = m.end()
    return ApElement(p, tuple(terms))


def parse_word(text: str, window: Window) -> ReducedWord:
    """Parse ``"x0 x1^-1"`` (whitespace or ``*`` separated); ``"e"`` is the identity."""
    s = text.replace("*", " ")
    if s.strip() in ("", "e"):
        return ReducedWord()
    pos = 0
    letters = []
    while pos < len(s):
        m = _LETTER.match(s, pos)
        if not m or m.end() == pos:
            raise ParseError(f"cannot parse letter {s[pos:]!r}", pos)
        exp = int(m.group(3)) if m.group(3) else 1
        letters.append((_lookup(window, m.group(1), m.start(1)), exp))
        pos = m.end()
    return ReducedWord(tuple(letters))


def parse_elements(items: Iterable[str], window: Window, p: int) -> list[ApElement]:
    return [parse_ap_element(t, window, p) for t in items]
