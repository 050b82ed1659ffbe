"""Reduced words in F_n and automorphisms given by generator images.

A word is a tuple of nonzero ints: ``j`` stands for x_j and ``-j`` for its
inverse (1-based). In string form x_1, x_2, ... are ``a``, ``b``, ... and
capitals are inverses.
"""
from __future__ import annotations

import random
import string
from dataclasses import dataclass
from typing import Iterable, Sequence

Word = tuple[int, ...]

EMPTY: Word = ()


def reduce_word(letters: Iterable[int]) -> Word:
    out: list[int] = []
    for x in letters:
        if x == 0:
            raise ValueError("0 is not a letter")
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def mul(*words: Sequence[int]) -> Word:
    out: list[int] = []
    for w in words:
        for x in w:
            if out and out[-1] == -x:
                out.pop()
            else:
                out.append(x)
    return tuple(out)


def inv(w: Sequence[int]) -> Word:
    return tuple(-x for x in reversed(w))


def is_reduced(w: Sequence[int]) -> bool:
    return all(a != -b for a, b in zip(w, w[1:]))


def word_from_str(text: str) -> Word:
    letters = []
    for ch in text:
        if ch.islower():
            letters.append(ord(ch) - ord("a") + 1)
        elif ch.isupper():
            letters.append(-(ord(ch) - ord("A") + 1))
        else:
            raise ValueError(f"bad letter {ch!r}")
    return reduce_word(letters)


def word_to_str(w: Sequence[int]) -> str:
    return "".join(string.ascii_lowercase[x - 1] if x > 0 else string.ascii_uppercase[-x - 1] for x in w)


def random_word(n: int, length: int, rng: random.Random) -> Word:
    """Uniform-ish reduced word of exactly ``length`` letters."""
    out: list[int] = []
    while len(out) < length:
        x = rng.choice([j for j in range(-n, n + 1) if j])
        if out and out[-1] == -x:
            continue
        out.append(x)
    return tuple(out)


class AutomorphismError(ValueError):
    pass


@dataclass(frozen=True)
class FreeAutomorphism:
    """An automorphism of F_n stored with the images of its inverse."""

    images: tuple[Word, ...]
    inverse_images: tuple[Word, ...]

    def __post_init__(self) -> None:
        n = len(self.images)
        if len(self.inverse_images) != n:
            raise AutomorphismError("images and inverse images differ in rank")
        for w in self.images + self.inverse_images:
            if not is_reduced(w) or any(abs(x) > n for x in w):
                raise AutomorphismError(f"{w} is not a reduced word in F_{n}")
        for j in range(1, n + 1):
            if _apply(self.images, self.inverse_images[j - 1]) != (j,):
                raise AutomorphismError("inverse images do not invert images")
            if _apply(self.inverse_images, self.images[j - 1]) != (j,):
                raise AutomorphismError("images do not invert inverse images")

    @property
    def n(self) -> int:
        return len(self.images)

    def __call__(self, w: Sequence[int]) -> Word:
        return _apply(self.images, w)

    def __matmul__(self, other: "FreeAutomorphism") -> "FreeAutomorphism":
        """Composition: (self @ other)(w) = self(other(w))."""
        return _trusted(
            tuple(_apply(self.images, w) for w in other.images),
            tuple(_apply(other.inverse_images, w) for w in self.inverse_images),
        )

    def inverse(self) -> "FreeAutomorphism":
        return _trusted(self.inverse_images, self.images)

    def extend(self, m: int) -> "FreeAutomorphism":
        """Extend to F_m by fixing x_{n+1}, ..., x_m."""
        extra = tuple((j,) for j in range(self.n + 1, m + 1))
        return _trusted(self.images + extra, self.inverse_images + extra)

    def is_identity(self) -> bool:
        return all(w == (j,) for j, w in enumerate(self.images, 1))

    @classmethod
    def identity(cls, n: int) -> "FreeAutomorphism":
        ident = tuple((j,) for j in range(1, n + 1))
        return _trusted(ident, ident)

    @classmethod
    def conjugation(cls, n: int, g: Sequence[int]) -> "FreeAutomorphism":
        """x_j -> g x_j g^-1."""
        g = reduce_word(g)
        gi = inv(g)
        return _trusted(
            tuple(mul(g, (j,), gi) for j in range(1, n + 1)),
            tuple(mul(gi, (j,), g) for j in range(1, n + 1)),
        )

    def to_json(self) -> dict:
        return {
            "phi": [word_to_str(w) for w in self.images],
            "phi_inv": [word_to_str(w) for w in self.inverse_images],
        }


def _apply(images: Sequence[Word], w: Sequence[int]) -> Word:
    out: list[int] = []
    for x in w:
        piece = images[x - 1] if x > 0 else inv(images[-x - 1])
        for y in piece:
            if out and out[-1] == -y:
                out.pop()
            else:
                out.append(y)
    return tuple(out)


def _trusted(images: tuple[Word, ...], inverse_images: tuple[Word, ...]) -> FreeAutomorphism:
    # skips the inverse check for values built from verified pieces
    obj = object.__new__(FreeAutomorphism)
    object.__setattr__(obj, "images", images)
    object.__setattr__(obj, "inverse_images", inverse_images)
    return obj


# -- Nielsen generators ---------------------------------------------------------

def transvection(n: int, i: int, j: int, right: bool = True, power: int = 1) -> FreeAutomorphism:
    """x_i -> x_i x_j^power (right) or x_j^power x_i (left)."""
    if i == j:
        raise ValueError("transvection needs i != j")
    e = (j,) * power if power > 0 else (-j,) * (-power)
    ident = [(k,) for k in range(1, n + 1)]
    img, inv_img = list(ident), list(ident)
    if right:
        img[i - 1] = mul((i,), e)
        inv_img[i - 1] = mul((i,), inv(e))
    else:
        img[i - 1] = mul(e, (i,))
        inv_img[i - 1] = mul(inv(e), (i,))
    return _trusted(tuple(img), tuple(inv_img))


def inversion(n: int, i: int) -> FreeAutomorphism:
    img = [(k,) for k in range(1, n + 1)]
    img[i - 1] = (-i,)
    return _trusted(tuple(img), tuple(img))


def swap(n: int, i: int, j: int) -> FreeAutomorphism:
    img = [(k,) for k in range(1, n + 1)]
    img[i - 1], img[j - 1] = (j,), (i,)
    return _trusted(tuple(img), tuple(img))


def nielsen_generators(n: int) -> list[FreeAutomorphism]:
    gens = [inversion(n, i) for i in range(1, n + 1)]
    for i in range(1, n + 1):
        for j in range(1, n + 1):
            if i != j:
                gens.append(transvection(n, i, j, True))
                gens.append(transvection(n, i, j, True, -1))
                gens.append(transvection(n, i, j, False))
                gens.append(transvection(n, i, j, False, -1))
                if i < j:
                    gens.append(swap(n, i, j))
    return gens


def random_automorphism(n: int, length: int, rng: random.Random) -> FreeAutomorphism:
    gens = nielsen_generators(n)
    phi = FreeAutomorphism.identity(n)
    for _ in range(length):
        phi = phi @ rng.choice(gens)
    return phi


# -- innerness ------------------------------------------------------------------

def conjugator_prefix(w: Word) -> tuple[Word, Word]:
    """Split ``w = u c u^-1`` with ``c`` cyclically reduced."""
    k = 0
    while 2 * k + 1 < len(w) and w[k] == -w[len(w) - 1 - k]:
        k += 1
    return w[:k], w[k:len(w) - k]


def is_inner(phi: FreeAutomorphism) -> tuple[bool, Word | None]:
    """Decide whether ``phi`` is conjugation by some g; return (flag, g).

    For n >= 2 a witness g is unique and |g| <= max_j |phi(x_j)|: g cannot
    end in both an x_1 and an x_2 letter, and phi(x_j) = g x_j g^-1 has
    length 2|g| + 1 whenever g does not end in x_j^{+-1}. The witness is of
    the form u x_1^a where phi(x_1) = u x_1 u^-1, so trying every a within
    the bound is exhaustive.
    """
    n = phi.n
    if n == 1:
        return (phi.images[0] == (1,), EMPTY if phi.images[0] == (1,) else None)
    bound = max(len(w) for w in phi.images)
    u, core = conjugator_prefix(phi.images[0])
    if core != (1,):
        return False, None
    for a in range(-bound - 1, bound + 2):
        g = mul(u, (1,) * a if a >= 0 else (-1,) * (-a))
        if len(g) > bound:
            continue
        gi = inv(g)
        if all(phi.images[j - 1] == mul(g, (j,), gi) for j in range(1, n + 1)):
            return True, g
    return False, None


def is_inner_bruteforce(phi: FreeAutomorphism, max_len: int) -> tuple[bool, Word | None]:
    """Search every reduced word of length <= max_len as a conjugator."""
    n = phi.n
    letters = [x for x in range(-n, n + 1) if x]
    frontier: list[Word] = [EMPTY]
    for length in range(max_len + 1):
        for g in frontier:
            gi = inv(g)
            if all(phi.images[j - 1] == mul(g, (j,), gi) for j in range(1, n + 1)):
                return True, g
        if length == max_len:
            break
        frontier = [g + (x,) for g in frontier for x in letters if not g or g[-1] != -x]
    return False, None
