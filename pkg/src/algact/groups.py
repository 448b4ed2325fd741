"""Group arithmetic, word metrics and ball enumeration.

Three families are supported: lattices Z^d, free groups F_k and finite
abelian groups Z/N1 x ... x Z/Nd.  Finite groups exist only as brute-force
oracles (the constructions elsewhere in the package assume an infinite
group) and are flagged as such through :attr:`GroupDescriptor.oracle_only`.

Group elements are plain tuples so they hash and compare cheaply:

* lattice: integer vector of length d
* free: reduced word of nonzero ints, ``+i`` is the i-th generator and
  ``-i`` its inverse (generators numbered from 1)
* finite: residue vector with entries in ``[0, N_i)``
"""

from __future__ import annotations

import functools
import re
from dataclasses import dataclass, field
from typing import Iterable, Sequence

import numpy as np

DEFAULT_BALL_CAP = 10**6

_LATTICE_LABELS = "ghkuvwxyz"
_FREE_LABELS = "abcdfhijklmnopqrstuvwxyz"  # no "e": reserved for the identity


class GroupError(ValueError):
    pass


class BallTooLarge(GroupError):
    pass


Element = tuple


@dataclass(frozen=True)
class GroupDescriptor:
    kind: str  # "lattice" | "free" | "finite"
    rank: int
    moduli: tuple = ()
    labels: tuple = field(default=())

    def __post_init__(self):
        if self.kind not in ("lattice", "free", "finite"):
            raise GroupError(f"unknown group kind {self.kind!r}")
        if self.kind == "finite":
            if len(self.moduli) != self.rank:
                raise GroupError("finite group needs one modulus per factor")
            if any(int(n) < 2 for n in self.moduli):
                raise GroupError("every cyclic factor needs order >= 2")
        elif self.rank < 1:
            raise GroupError("rank must be >= 1")
        if not self.labels:
            pool = _FREE_LABELS if self.kind == "free" else _LATTICE_LABELS
            labels = tuple(pool[: self.rank]) if self.rank <= len(pool) else tuple(
                f"x{i + 1}" for i in range(self.rank)
            )
            object.__setattr__(self, "labels", labels)
        if len(self.labels) != self.rank or "e" in self.labels:
            raise GroupError("need one label per generator, and 'e' is reserved")

    # -- construction -----------------------------------------------------

    @classmethod
    def lattice(cls, d: int) -> "GroupDescriptor":
        return cls("lattice", d)

    @classmethod
    def free(cls, k: int) -> "GroupDescriptor":
        return cls("free", k)

    @classmethod
    def finite(cls, *moduli: int) -> "GroupDescriptor":
        return cls("finite", len(moduli), tuple(int(n) for n in moduli))

    @classmethod
    def parse(cls, text: str) -> "GroupDescriptor":
        """Parse ``"Z"``, ``"Z^2"``, ``"F2"``, ``"Z/5 x Z/5"`` or ``"1"`` (trivial)."""
        s = text.replace(" ", "")
        if s in ("1", "trivial", "{e}"):
            return cls.finite()
        m = re.fullmatch(r"Z(?:\^(\d+))?", s)
        if m:
            return cls.lattice(int(m.group(1) or 1))
        m = re.fullmatch(r"F_?(\d+)", s)
        if m:
            return cls.free(int(m.group(1)))
        parts = re.split(r"[x×*]", s)
        if parts and all(re.fullmatch(r"Z/\d+", p) for p in parts):
            return cls.finite(*(int(p[2:]) for p in parts))
        raise GroupError(f"cannot parse group descriptor {text!r}")

    def __str__(self) -> str:
        if self.kind == "lattice":
            return "Z" if self.rank == 1 else f"Z^{self.rank}"
        if self.kind == "free":
            return f"F{self.rank}"
        if not self.moduli:
            return "1"
        return " x ".join(f"Z/{n}" for n in self.moduli)

    @property
    def oracle_only(self) -> bool:
        return self.kind == "finite"

    @property
    def is_abelian(self) -> bool:
        return self.kind != "free" or self.rank == 1

    @property
    def order(self):
        """Number of elements, or ``None`` for infinite groups."""
        if self.kind != "finite":
            return None
        return int(np.prod(self.moduli, dtype=np.int64)) if self.moduli else 1

    # -- group law --------------------------------------------------------

    def identity(self) -> Element:
        if self.kind == "free":
            return ()
        return (0,) * self.rank

    def generators(self) -> list:
        """Symmetric generating set S = S^-1 in canonical order."""
        out = []
        for i in range(self.rank):
            if self.kind == "free":
                out += [(i + 1,), (-(i + 1),)]
            else:
                e = [0] * self.rank
                e[i] = 1
                out.append(self._reduce_residues(e))
                e[i] = -1
                g = self._reduce_residues(e)
                if g not in out:
                    out.append(g)
        return out

    def _reduce_residues(self, v) -> Element:
        if self.kind == "finite":
            return tuple(int(x) % n for x, n in zip(v, self.moduli))
        return tuple(int(x) for x in v)

    def validate(self, a) -> Element:
        if not isinstance(a, tuple):
            raise GroupError(f"group elements are tuples, got {type(a).__name__}")
        if self.kind == "free":
            if any((not isinstance(x, (int, np.integer))) or x == 0 or abs(x) > self.rank for x in a):
                raise GroupError(f"{a!r} is not a word over F{self.rank}")
            if any(a[i] == -a[i + 1] for i in range(len(a) - 1)):
                raise GroupError(f"{a!r} is not reduced")
            return a
        if len(a) != self.rank:
            raise GroupError(f"{a!r} does not belong to {self}")
        if self.kind == "finite" and any(not (0 <= x < n) for x, n in zip(a, self.moduli)):
            raise GroupError(f"{a!r} has residues outside [0, N)")
        return a

    def mul(self, a: Element, b: Element) -> Element:
        if self.kind == "free":
            return free_reduce(a + b)
        if len(a) != self.rank or len(b) != self.rank:
            raise GroupError(f"elements {a!r}, {b!r} do not belong to {self}")
        if self.kind == "lattice":
            return tuple(x + y for x, y in zip(a, b))
        return tuple((x + y) % n for x, y, n in zip(a, b, self.moduli))

    def inverse(self, a: Element) -> Element:
        if self.kind == "free":
            return tuple(-x for x in reversed(a))
        if self.kind == "lattice":
            return tuple(-x for x in a)
        return tuple((-x) % n for x, n in zip(a, self.moduli))

    def power(self, a: Element, k: int) -> Element:
        if k < 0:
            a, k = self.inverse(a), -k
        out = self.identity()
        for _ in range(k):
            out = self.mul(out, a)
        return out

    def word_length(self, a: Element) -> int:
        if self.kind == "free":
            return len(a)
        if self.kind == "lattice":
            return sum(abs(x) for x in a)
        return sum(min(x, n - x) for x, n in zip(a, self.moduli))

    def sort_key(self, a: Element):
        """Canonical order: word length, then lexicographic on generator labels."""
        if self.kind == "free":
            return (len(a), tuple(2 * (abs(x) - 1) + (x < 0) for x in a))
        return (self.word_length(a), a)

    # -- balls ------------------------------------------------------------

    def enumerate_ball(self, radius: int, cap: int = DEFAULT_BALL_CAP) -> list:
        if radius < 0:
            raise GroupError("radius must be >= 0")
        size = self.ball_size(radius)
        if size > cap:
            raise BallTooLarge(f"ball of radius {radius} in {self} has {size} elements (cap {cap})")
        if self.kind == "finite":
            grid = np.indices(self.moduli).reshape(self.rank, -1).T if self.rank else np.zeros((1, 0), int)
            return sorted((tuple(int(x) for x in row) for row in grid), key=self.sort_key)
        if self.kind == "free":
            letters = sorted(
                [s for i in range(self.rank) for s in (i + 1, -(i + 1))],
                key=lambda x: 2 * (abs(x) - 1) + (x < 0),
            )
            out, sphere = [()], [()]
            for _ in range(radius):
                sphere = [w + (x,) for w in sphere for x in letters if not (w and w[-1] == -x)]
                out += sphere
            return out
        out = []
        for r in range(radius + 1):
            out += sorted(_lattice_sphere(self.rank, r))
        return out

    def ball_size(self, radius: int) -> int:
        if self.kind == "finite":
            return self.order
        if self.kind == "free":
            k = self.rank
            if k == 1:
                return 2 * radius + 1
            # 1 + 2k * sum_{r<R} (2k-1)^r
            return 1 + 2 * k * ((2 * k - 1) ** radius - 1) // (2 * k - 2)
        return _lattice_ball_size(self.rank, radius)

    def ball(self, radius: int, cap: int = DEFAULT_BALL_CAP) -> "Ball":
        if self.kind == "finite":
            radius = 0  # every radius gives the whole group
        return _cached_ball(self, radius, cap)

    # -- text -------------------------------------------------------------

    def format_element(self, a: Element) -> str:
        """Word in the generator labels (``e`` for the identity), e.g. ``ab^-1`` or ``gh^-2``."""
        if a == self.identity():
            return "e"
        if self.kind == "free":
            out, i = [], 0
            while i < len(a):
                j = i
                while j < len(a) and a[j] == a[i]:
                    j += 1
                run = j - i
                lab = self.labels[abs(a[i]) - 1]
                exp = run if a[i] > 0 else -run
                out.append(lab if exp == 1 else f"{lab}^{exp}")
                i = j
            return "".join(out)
        if any(len(lab) != 1 for lab in self.labels):
            return "(" + ",".join(str(x) for x in a) + ")"
        return "".join(lab if x == 1 else f"{lab}^{x}" for lab, x in zip(self.labels, a) if x)

    def parse_element(self, text: str) -> Element:
        s = text.replace(" ", "")
        if s in ("e", ""):
            return self.identity()
        if s.startswith("("):
            if not s.endswith(")"):
                raise GroupError(f"bad element {text!r}")
            body = s[1:-1]
            vals = tuple(int(x) for x in body.split(",")) if body else ()
            if self.kind == "free":
                raise GroupError("free-group elements are words, not vectors")
            if len(vals) != self.rank:
                raise GroupError(f"{text!r} has the wrong length for {self}")
            return self._reduce_residues(vals)
        out = self.identity()
        for lab, exp in re.findall(r"([A-Za-z])(?:\^\(?(-?\d+)\)?)?", s):
            if lab not in self.labels:
                raise GroupError(f"unknown generator {lab!r} in {text!r}")
            gen = self._generator(self.labels.index(lab))
            out = self.mul(out, self.power(gen, int(exp) if exp else 1))
        if re.sub(r"[A-Za-z](?:\^\(?-?\d+\)?)?", "", s):
            raise GroupError(f"cannot parse element {text!r}")
        return out

    def _generator(self, i: int) -> Element:
        if self.kind == "free":
            return (i + 1,)
        e = [0] * self.rank
        e[i] = 1
        return self._reduce_residues(e)


def free_reduce(word: Sequence[int]) -> Element:
    out: list = []
    for x in word:
        if out and out[-1] == -x:
            out.pop()
        else:
            out.append(x)
    return tuple(out)


def _lattice_sphere(d: int, r: int) -> Iterable[Element]:
    if d == 1:
        return [(0,)] if r == 0 else [(-r,), (r,)]
    out = []
    for x in range(-r, r + 1):
        for rest in _lattice_sphere(d - 1, r - abs(x)):
            out.append((x,) + rest)
    return out


def _lattice_ball_size(d: int, r: int) -> int:
    # Delannoy-type count: sum_k 2^k C(d,k) C(r,k)
    from math import comb

    return sum(2**k * comb(d, k) * comb(r, k) for k in range(min(d, r) + 1))


class Ball:
    """An enumerated ball with index lookups and cached product tables.

    Because balls are enumerated by length first, ``B_r`` is always the
    prefix ``elements[:sizes[r]]`` of any larger ball.
    """

    def __init__(self, group: GroupDescriptor, radius: int, cap: int = DEFAULT_BALL_CAP):
        self.group = group
        self.radius = radius
        self.elements = tuple(group.enumerate_ball(radius, cap))
        self.index = {g: i for i, g in enumerate(self.elements)}
        self.lengths = np.array([group.word_length(g) for g in self.elements], dtype=np.int64)
        self._tables: dict = {}

    def __len__(self) -> int:
        return len(self.elements)

    def __repr__(self) -> str:
        return f"Ball({self.group}, R={self.radius}, size={len(self)})"

    def prefix(self, radius: int) -> int:
        """Number of elements of word length <= radius."""
        if self.group.kind == "finite":
            return len(self)
        if radius < 0:
            return 0
        return int(np.searchsorted(self.lengths, radius, side="right"))

    @functools.cached_property
    def inverse_perm(self) -> np.ndarray:
        """``inverse_perm[i]`` is the index of ``elements[i]^-1``."""
        inv = self.group.inverse
        return np.array([self.index[inv(g)] for g in self.elements], dtype=np.int64)

    def table(self, support: tuple, target: "Ball", side: str = "left") -> np.ndarray:
        """Index table ``T[s, j]`` of ``support[s]*elements[j]`` (or ``elements[j]*support[s]``)
        inside ``target``; -1 where the product leaves the target ball."""
        key = (support, target.radius, side)
        tab = self._tables.get(key)
        if tab is None:
            mul, idx = self.group.mul, target.index
            tab = np.full((len(support), len(self)), -1, dtype=np.int64)
            for s, h in enumerate(support):
                row = tab[s]
                if side == "left":
                    for j, g in enumerate(self.elements):
                        row[j] = idx.get(mul(h, g), -1)
                else:
                    for j, g in enumerate(self.elements):
                        row[j] = idx.get(mul(g, h), -1)
            tab.setflags(write=False)
            self._tables[key] = tab
        return tab

    def spheres(self):
        """Yield ``(r, start, stop)`` slices of each sphere."""
        if self.group.kind == "finite":
            # finite groups: spheres by word length within the full group
            for r in range(int(self.lengths.max()) + 1 if len(self) else 0):
                lo = int(np.searchsorted(self.lengths, r, side="left"))
                hi = int(np.searchsorted(self.lengths, r, side="right"))
                yield r, lo, hi
            return
        for r in range(self.radius + 1):
            yield r, self.prefix(r - 1), self.prefix(r)


@functools.lru_cache(maxsize=64)
def _cached_ball(group: GroupDescriptor, radius: int, cap: int) -> Ball:
    return Ball(group, radius, cap)
