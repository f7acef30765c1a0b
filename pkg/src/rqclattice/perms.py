"""Symmetric-group machinery: permutations, cycle types, distances, enumeration.

Permutations act on {1..k} and are stored as image tuples.  The composition
convention is fixed here once and for all: ``(a * b)(i) = a(b(i))``.  Every
other module goes through this module for group operations, so the convention
cannot drift.

Hot loops elsewhere use :func:`group_table`, which precomputes dense integer
index tables (multiplication, inverses, cycle counts) for all of S_k in
lexicographic order.
"""

from __future__ import annotations

import itertools
import math
import os
from functools import lru_cache

from .errors import BudgetExceededError

DEFAULT_ENUM_CAP = 8
ENUM_CAP_ENV = "RQCLATTICE_ENUM_CAP"

# Multiplication tables are only tabulated up to this degree; plaquette and
# Weingarten tables never need more.
TABLE_CAP = 6


def enumeration_cap() -> int:
    """Current enumeration cap (env var RQCLATTICE_ENUM_CAP overrides the default 8)."""
    raw = os.environ.get(ENUM_CAP_ENV)
    if raw is None:
        return DEFAULT_ENUM_CAP
    return int(raw)


class Perm:
    """A permutation of {1..k}, stored as the tuple of images (images[i-1] = sigma(i))."""

    __slots__ = ("images",)

    def __init__(self, images):
        images = tuple(images)
        k = len(images)
        if k < 1:
            raise ValueError("permutation degree must be >= 1")
        if sorted(images) != list(range(1, k + 1)):
            raise ValueError(f"not a bijection of 1..{k}: {images}")
        object.__setattr__(self, "images", images)

    def __setattr__(self, name, value):
        raise AttributeError("Perm is immutable")

    @property
    def degree(self) -> int:
        return len(self.images)

    @classmethod
    def identity(cls, k: int) -> "Perm":
        return cls(range(1, k + 1))

    @classmethod
    def from_cycles(cls, k: int, *cycles) -> "Perm":
        """Build a permutation of S_k from disjoint cycles, e.g. from_cycles(4, (1, 2), (3, 4))."""
        images = list(range(1, k + 1))
        seen = set()
        for cyc in cycles:
            for x in cyc:
                if x in seen:
                    raise ValueError(f"cycles are not disjoint at {x}")
                seen.add(x)
            for i, x in enumerate(cyc):
                images[x - 1] = cyc[(i + 1) % len(cyc)]
        return cls(images)

    def __call__(self, i: int) -> int:
        return self.images[i - 1]

    def __mul__(self, other: "Perm") -> "Perm":
        """Composition (a * b)(i) = a(b(i))."""
        if self.degree != other.degree:
            raise ValueError("degree mismatch in composition")
        return Perm(tuple(self.images[j - 1] for j in other.images))

    def inverse(self) -> "Perm":
        inv = [0] * self.degree
        for i, j in enumerate(self.images, start=1):
            inv[j - 1] = i
        return Perm(inv)

    def cycles(self) -> list[tuple[int, ...]]:
        """Disjoint cycles (including fixed points), each starting at its smallest element."""
        seen = [False] * self.degree
        out = []
        for start in range(1, self.degree + 1):
            if seen[start - 1]:
                continue
            cyc = [start]
            seen[start - 1] = True
            j = self.images[start - 1]
            while j != start:
                cyc.append(j)
                seen[j - 1] = True
                j = self.images[j - 1]
            out.append(tuple(cyc))
        return out

    def is_identity(self) -> bool:
        return all(j == i for i, j in enumerate(self.images, start=1))

    def __eq__(self, other) -> bool:
        return isinstance(other, Perm) and self.images == other.images

    def __hash__(self) -> int:
        return hash(self.images)

    def __repr__(self) -> str:
        return f"Perm({list(self.images)})"

    def __str__(self) -> str:
        return cycle_string(self)


def cycle_string(a: Perm) -> str:
    """Compact cycle notation, fixed points omitted; identity prints as 'id'."""
    nontrivial = [c for c in a.cycles() if len(c) > 1]
    if not nontrivial:
        return "id"
    return "".join("(" + " ".join(str(x) for x in c) + ")" for c in nontrivial)


def compose(a: Perm, b: Perm) -> Perm:
    """Composite under the module convention (a o b)(i) = a(b(i))."""
    return a * b


def cycle_type(a: Perm) -> tuple[int, ...]:
    """Cycle type as a weakly decreasing tuple of cycle lengths summing to the degree."""
    return tuple(sorted((len(c) for c in a.cycles()), reverse=True))


def num_cycles(a: Perm) -> int:
    """Number of cycles ell(a), counting fixed points."""
    return len(a.cycles())


def transposition_distance(a: Perm, b: Perm) -> int:
    """Minimal number of transpositions taking a to b: k - ell(a^-1 b)."""
    if a.degree != b.degree:
        raise ValueError("degree mismatch")
    return a.degree - num_cycles(a.inverse() * b)


def sign(a: Perm) -> int:
    """Signature (-1)^(k - ell(a))."""
    return -1 if (a.degree - num_cycles(a)) % 2 else 1


def enumerate_sk(k: int, cap: int | None = None) -> list[Perm]:
    """All k! permutations of S_k in lexicographic order of image tuples.

    Guarded by the enumeration cap (default 8, overridable via the
    RQCLATTICE_ENUM_CAP environment variable or the `cap` argument).
    """
    if k < 1:
        raise ValueError("k must be >= 1")
    limit = enumeration_cap() if cap is None else cap
    if k > limit:
        raise BudgetExceededError(f"k={k} exceeds enumeration cap {limit}")
    return [Perm(p) for p in itertools.permutations(range(1, k + 1))]


def conjugacy_class_size(ct: tuple[int, ...]) -> int:
    """Size of the conjugacy class with the given cycle type: k! / prod(m^a_m a_m!)."""
    k = sum(ct)
    z = 1
    for length in set(ct):
        m = ct.count(length)
        z *= length**m * math.factorial(m)
    return math.factorial(k) // z


def _longest_increasing_subsequence(seq) -> int:
    """Length of the longest increasing subsequence (patience sorting, O(k log k))."""
    import bisect

    tails: list[int] = []
    for x in seq:
        pos = bisect.bisect_left(tails, x)
        if pos == len(tails):
            tails.append(x)
        else:
            tails[pos] = x
    return len(tails)


def haar_frame_potential(k: int, d: int) -> int:
    """Haar frame potential of U(d) at moment k, exact.

    Equals k! for k <= d; for k > d it is the number of permutations in S_k
    whose longest increasing subsequence has length <= d, computed by
    enumeration.
    """
    if k < 1 or d < 1:
        raise ValueError("k and d must be >= 1")
    if k <= d:
        return math.factorial(k)
    if k > enumeration_cap():
        raise BudgetExceededError(f"k={k} exceeds enumeration cap")
    count = 0
    for images in itertools.permutations(range(1, k + 1)):
        if _longest_increasing_subsequence(images) <= d:
            count += 1
    return count


class SymmetricGroupTable:
    """Dense index tables for S_k, elements in lexicographic order.

    Attributes:
        perms: list of Perm, perms[0] is the identity.
        index: dict image-tuple -> element index.
        mul: mul[i][j] = index of perms[i] * perms[j].
        inv: inv[i] = index of perms[i]^-1.
        n_cycles: ell(perms[i]).
        cycle_types: list of distinct cycle types (sorted), and
        ct_index: ct_index[i] = position of perms[i]'s cycle type in cycle_types.
    """

    def __init__(self, k: int):
        if k > TABLE_CAP:
            raise BudgetExceededError(f"group tables capped at k={TABLE_CAP}")
        self.k = k
        self.perms = enumerate_sk(k)
        self.order = len(self.perms)
        self.index = {p.images: i for i, p in enumerate(self.perms)}
        self.inv = [self.index[p.inverse().images] for p in self.perms]
        self.mul = [
            [self.index[(a * b).images] for b in self.perms] for a in self.perms
        ]
        self.n_cycles = [num_cycles(p) for p in self.perms]
        cts = [cycle_type(p) for p in self.perms]
        self.cycle_types = sorted(set(cts), reverse=True)
        ct_pos = {ct: i for i, ct in enumerate(self.cycle_types)}
        self.ct_index = [ct_pos[ct] for ct in cts]

    def idx(self, p: Perm) -> int:
        return self.index[p.images]


@lru_cache(maxsize=None)
def group_table(k: int) -> SymmetricGroupTable:
    """Cached SymmetricGroupTable for S_k (k <= 6)."""
    return SymmetricGroupTable(k)
