"""Algebraic model of the groups Gamma_{n,s} and their stabilization maps.

For s >= 1 an element is a pair (phi, w) with phi in Aut(F_n) and
w = (w_1, ..., w_{s-1}) the words traced by the thorns; the product is

    (phi_a, w) * (phi_b, u) = (phi_a phi_b, phi_a(u_i) w_i).

For s = 0 elements are outer classes of automorphisms.
"""
from __future__ import annotations

import random
from dataclasses import dataclass

from .freegroup import (
    EMPTY,
    FreeAutomorphism,
    Word,
    inv,
    is_inner,
    mul,
    random_automorphism,
    random_word,
    word_from_str,
    word_to_str,
)


class GammaError(ValueError):
    pass


@dataclass(frozen=True)
class GammaElement:
    n: int
    s: int
    phi: FreeAutomorphism
    thorns: tuple[Word, ...]

    def __post_init__(self) -> None:
        if self.s < 1:
            raise GammaError("use OuterClass for s = 0")
        if self.phi.n != self.n:
            raise GammaError("automorphism rank does not match n")
        if len(self.thorns) != self.s - 1:
            raise GammaError(f"expected {self.s - 1} thorn words, got {len(self.thorns)}")
        for w in self.thorns:
            if any(abs(x) > self.n for x in w) or mul(w) != tuple(w):
                raise GammaError(f"thorn word {w} is not reduced over F_{self.n}")

    def __mul__(self, other: "GammaElement") -> "GammaElement":
        return compose(self, other)

    def inverse(self) -> "GammaElement":
        phi_inv = self.phi.inverse()
        return GammaElement(self.n, self.s, phi_inv, tuple(phi_inv(inv(w)) for w in self.thorns))

    def is_identity(self) -> bool:
        return self.phi.is_identity() and all(w == EMPTY for w in self.thorns)

    @classmethod
    def identity(cls, n: int, s: int) -> "GammaElement":
        return cls(n, s, FreeAutomorphism.identity(n), (EMPTY,) * (s - 1))

    def to_json(self) -> dict:
        return {"n": self.n, "s": self.s, **self.phi.to_json(),
                "thorns": [word_to_str(w) for w in self.thorns]}

    @classmethod
    def from_json(cls, obj: dict) -> "GammaElement":
        phi = FreeAutomorphism(tuple(word_from_str(w) for w in obj["phi"]),
                               tuple(word_from_str(w) for w in obj["phi_inv"]))
        return cls(obj["n"], obj["s"], phi, tuple(word_from_str(w) for w in obj["thorns"]))


class OuterClass:
    """Element of Out(F_n); equality is equality modulo inner automorphisms."""

    __hash__ = None  # type: ignore[assignment]

    def __init__(self, representative: FreeAutomorphism):
        self.representative = representative

    @property
    def n(self) -> int:
        return self.representative.n

    def __eq__(self, other: object) -> bool:
        if not isinstance(other, OuterClass):
            return NotImplemented
        if other.n != self.n:
            return False
        return is_inner(self.representative.inverse() @ other.representative)[0]

    def __mul__(self, other: "OuterClass") -> "OuterClass":
        return OuterClass(self.representative @ other.representative)

    def __repr__(self) -> str:
        return f"OuterClass({self.representative.to_json()['phi']})"


def compose(a: GammaElement, b: GammaElement) -> GammaElement:
    if (a.n, a.s) != (b.n, b.s):
        raise GammaError(f"cannot compose elements of Gamma_{a.n},{a.s} and Gamma_{b.n},{b.s}")
    thorns = tuple(mul(a.phi(u), w) for u, w in zip(b.thorns, a.thorns))
    return GammaElement(a.n, a.s, a.phi @ b.phi, thorns)


def alpha(g: GammaElement) -> GammaElement:
    """Add a punctured handle: Gamma_{n,s} -> Gamma_{n+1,s}."""
    return GammaElement(g.n + 1, g.s, g.phi.extend(g.n + 1), g.thorns)


def mu(g: GammaElement) -> GammaElement:
    """Add pants: Gamma_{n,s} -> Gamma_{n,s+1}, new trivial last thorn."""
    return GammaElement(g.n, g.s + 1, g.phi, g.thorns + (EMPTY,))


def beta(g: GammaElement) -> GammaElement | OuterClass:
    """Add a tube joining the last two boundary spheres.

    Sends x_{n+1} to w_{s-2} x_{n+1} w_{s-1}^-1 (w_0 is the trivial word of
    the base sphere) and keeps w_1, ..., w_{s-3}. Lands in Out(F_{n+1}) when
    s = 2.
    """
    if g.s < 2:
        raise GammaError("beta needs s >= 2")
    words = (EMPTY,) + g.thorns
    left, right = words[g.s - 2], words[g.s - 1]
    m = g.n + 1
    x = (m,)
    images = g.phi.images + (mul(left, x, inv(right)),)
    phi_inv = g.phi.inverse()
    inverse_images = g.phi.inverse_images + (mul(phi_inv(inv(left)), x, phi_inv(right)),)
    phi = FreeAutomorphism(images, inverse_images)
    if g.s == 2:
        return OuterClass(phi)
    return GammaElement(m, g.s - 2, phi, g.thorns[:g.s - 3])


def gamma_fill(g: GammaElement) -> GammaElement | OuterClass:
    """Fill the most recently added boundary sphere with a ball."""
    if g.s == 1:
        return OuterClass(g.phi)
    return GammaElement(g.n, g.s - 1, g.phi, g.thorns[:-1])


def forget_last(g: GammaElement) -> GammaElement:
    """The quotient map G_{n,s} -> G_{n,s-1} of the exact sequence."""
    if g.s < 2:
        raise GammaError("forget_last needs s >= 2")
    return GammaElement(g.n, g.s - 1, g.phi, g.thorns[:-1])


def kernel_project(g: GammaElement) -> Word | None:
    """The F_n coordinate of ``g`` if it lies in the kernel of forget_last."""
    if forget_last(g).is_identity():
        return g.thorns[-1]
    return None


def kernel_element(n: int, s: int, w: Word) -> GammaElement:
    return GammaElement(n, s, FreeAutomorphism.identity(n), (EMPTY,) * (s - 2) + (tuple(w),))


def random_element(n: int, s: int, max_len: int, seed: int | random.Random) -> GammaElement:
    """Random product of up to ``max_len`` Nielsen generators plus thorn words."""
    if max_len < 1:
        raise ValueError("max_len must be >= 1")
    rng = seed if isinstance(seed, random.Random) else random.Random(seed)
    phi = random_automorphism(n, rng.randint(1, max_len), rng)
    thorns = tuple(random_word(n, rng.randint(0, max_len), rng) for _ in range(s - 1))
    return GammaElement(n, s, phi, thorns)
