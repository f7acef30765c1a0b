"""Triangular-lattice plaquette weights J^{s1}_{s2 s3} as exact rational functions of q.

A plaquette weight is the tau-sum

    J^{s1}_{s2 s3} = sum_{tau in S_k} Wg(s1^-1 tau, q^2) q^ell(tau^-1 s2) q^ell(tau^-1 s3)

with d = q^2 substituted symbolically before reduction, so pole cancellation
can be certified on the reduced form in q.  J depends on (s1, s2, s3) only
through the canonical key (s1^-1 s2, s1^-1 s3); keys related by simultaneous
conjugation share a weight, which cuts the k=5 table from 14400 keys to 161
distinct computations.  Rule checks recompute a sample of weights from the raw
tau-sum so the canonicalization itself stays under test.
"""

from __future__ import annotations

import random
from dataclasses import dataclass, field
from fractions import Fraction
from functools import lru_cache

from .errors import BudgetExceededError
from .exact import Polynomial, RationalFunction, poly_gcd
from .perms import Perm, group_table
from .weingarten import wg_in_q

FULL_TABLE_CAP = 5
PLAQUETTE_CAP = 6

_SINGLE_WALL = RationalFunction(Polynomial([0, 1]), Polynomial([1, 0, 1]))  # q/(q^2+1)


@dataclass(frozen=True)
class WallSignature:
    """Pairwise transposition distances of a plaquette triple.

    in_left = |s1^-1 s2|, in_right = |s1^-1 s3| count ingoing domain walls
    through the two lower edges; across = |s2^-1 s3| counts walls through the
    outgoing edge.  The three always satisfy the triangle inequality.
    """

    in_left: int
    in_right: int
    across: int

    def __post_init__(self):
        trio = (self.in_left, self.in_right, self.across)
        if any(x < 0 for x in trio):
            raise ValueError(f"negative wall count in {trio}")
        if (
            self.across > self.in_left + self.in_right
            or self.in_left > self.in_right + self.across
            or self.in_right > self.in_left + self.across
        ):
            raise ValueError(f"triangle inequality violated: {trio}")

    @property
    def total_in(self) -> int:
        return self.in_left + self.in_right

    @property
    def annihilating(self) -> bool:
        """True when fewer walls leave than entered."""
        return self.across < self.total_in


@dataclass
class RuleReport:
    """Outcome of a structural check; `ok` only if no violation was recorded."""

    name: str
    checked: int = 0
    violations: list[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations

    def note(self, message: str):
        self.violations.append(message)

    def summary(self) -> str:
        status = "pass" if self.ok else f"FAIL ({len(self.violations)} violations)"
        return f"{self.name}: {self.checked} checks, {status}"


def _check_k(k: int):
    if not 1 <= k <= PLAQUETTE_CAP:
        raise BudgetExceededError(f"plaquette weights capped at k={PLAQUETTE_CAP}")


@lru_cache(maxsize=None)
def _wg_numerators(k: int):
    """Weingarten numerators in q over one common denominator D(q)."""
    wgq = wg_in_q(k)
    gt = group_table(k)
    common = Polynomial([1])
    for ct in gt.cycle_types:
        den = wgq[ct].den
        g = poly_gcd(common, den)
        common = common * (den // g)
    nums = []
    for ct in gt.cycle_types:
        rf = wgq[ct]
        scale, rem = divmod(common, rf.den)
        assert rem.is_zero()
        nums.append(rf.num * scale)
    return nums, common


class PlaquetteTable:
    """Memoized map from canonical keys (s1^-1 s2, s1^-1 s3) to weights in q.

    After populate() the table is read-only and safe to share across threads;
    lazy lookups mutate only the internal cache with idempotent values.
    """

    def __init__(self, k: int):
        _check_k(k)
        self.k = k
        self._gt = group_table(k)
        self._weights: dict[tuple[int, int], RationalFunction] = {}

    # -- raw computation ---------------------------------------------------

    def _weight_raw(self, ia: int, ib: int) -> RationalFunction:
        """J^{id}_{a b} from the defining tau-sum, bypassing canonicalization."""
        gt = self._gt
        nums, common = _wg_numerators(self.k)
        # counts[ct][m]: how many tau of each cycle type give q-exponent m
        counts = [[0] * (2 * self.k + 1) for _ in gt.cycle_types]
        for t in range(gt.order):
            row = gt.mul[gt.inv[t]]
            m = gt.n_cycles[row[ia]] + gt.n_cycles[row[ib]]
            counts[gt.ct_index[t]][m] += 1
        total = Polynomial()
        for ct_i, row_counts in enumerate(counts):
            if any(row_counts):
                total = total + nums[ct_i] * Polynomial(row_counts)
        return RationalFunction(total, common)

    def _canonical(self, ia: int, ib: int) -> tuple[int, int]:
        """Least key in the simultaneous-conjugation orbit of (a, b)."""
        gt = self._gt
        best = (ia, ib)
        for p in range(gt.order):
            row = gt.mul[gt.inv[p]]
            cand = (gt.mul[row[ia]][p], gt.mul[row[ib]][p])
            if cand < best:
                best = cand
        return best

    # -- public surface ----------------------------------------------------

    def weight_by_key(self, a: Perm, b: Perm) -> RationalFunction:
        """J^{id}_{a b} for the canonical key pair."""
        return self._weight_by_index(self._gt.idx(a), self._gt.idx(b))

    def _weight_by_index(self, ia: int, ib: int) -> RationalFunction:
        rep = self._canonical(ia, ib)
        w = self._weights.get(rep)
        if w is None:
            w = self._weight_raw(*rep)
            self._weights[rep] = w
        return w

    def weight(self, s1: Perm, s2: Perm, s3: Perm) -> RationalFunction:
        inv1 = s1.inverse()
        return self.weight_by_key(inv1 * s2, inv1 * s3)

    def populate(self):
        """Force computation of every canonical key (k <= 5 only)."""
        if self.k > FULL_TABLE_CAP:
            raise BudgetExceededError(
                f"full tables capped at k={FULL_TABLE_CAP}; k=6 is computed per key"
            )
        gt = self._gt
        for ia in range(gt.order):
            for ib in range(gt.order):
                self._weight_by_index(ia, ib)
        return self

    def entries(self):
        """Yield (a, b, signature, weight) for every raw key pair, in index order."""
        gt = self._gt
        for ia in range(gt.order):
            for ib in range(gt.order):
                sig = self._signature_by_index(ia, ib)
                yield gt.perms[ia], gt.perms[ib], sig, self._weight_by_index(ia, ib)

    def _signature_by_index(self, ia: int, ib: int) -> WallSignature:
        gt = self._gt
        k = self.k
        return WallSignature(
            in_left=k - gt.n_cycles[ia],
            in_right=k - gt.n_cycles[ib],
            across=k - gt.n_cycles[gt.mul[gt.inv[ia]][ib]],
        )


@lru_cache(maxsize=None)
def build_table(k: int) -> PlaquetteTable:
    """Fully populated plaquette table for k <= 5; use PlaquetteTable(6) for lazy k=6."""
    return PlaquetteTable(k).populate()


def plaquette_weight(s1: Perm, s2: Perm, s3: Perm) -> RationalFunction:
    """J^{s1}_{s2 s3} as a reduced rational function of q."""
    k = s1.degree
    if not (k == s2.degree == s3.degree):
        raise ValueError("plaquette permutations must share a degree")
    _check_k(k)
    table = build_table(k) if k <= FULL_TABLE_CAP else PlaquetteTable(k)
    return table.weight(s1, s2, s3)


def classify(s1: Perm, s2: Perm, s3: Perm) -> WallSignature:
    """Wall signature (|s1^-1 s2|, |s1^-1 s3|, |s2^-1 s3|) of a triple."""
    from .perms import transposition_distance

    return WallSignature(
        in_left=transposition_distance(s1, s2),
        in_right=transposition_distance(s1, s3),
        across=transposition_distance(s2, s3),
    )


def verify_rules(
    k: int, samples: int = 10_000, raw_spot_checks: int = 50, seed: int = 20240613
) -> RuleReport:
    """Check the structural plaquette rules.

    Exhaustive over all (k!)^2 canonical keys for k <= 4, with right-invariance
    additionally checked against every group translation; for k = 5 the rules
    are checked on `samples` pseudo-random triples.  A deterministic subsample
    of weights is recomputed from the raw tau-sum so that the canonical-key
    cache is itself exercised.

    Rules: (i) J^s_{ss} = 1; (ii) J^s_{s's'} = 0 for s != s'; (iii) a single
    outgoing wall forces a single ingoing wall, with the k=2 weight q/(q^2+1);
    (iv) symmetry under s2 <-> s3; (v) invariance under simultaneous right
    translation.
    """
    _check_k(k)
    report = RuleReport(name=f"plaquette rules k={k}")
    gt = group_table(k)
    table = build_table(k) if k <= FULL_TABLE_CAP else PlaquetteTable(k)
    rng = random.Random(seed)

    one = RationalFunction.constant(1)
    zero = RationalFunction.constant(0)

    if k <= 4:
        keys = [(ia, ib) for ia in range(gt.order) for ib in range(gt.order)]
    else:
        keys = [
            (rng.randrange(gt.order), rng.randrange(gt.order)) for _ in range(samples)
        ]

    for ia, ib in keys:
        w = table._weight_by_index(ia, ib)
        sig = table._signature_by_index(ia, ib)
        report.checked += 1
        if ia == 0 and ib == 0:
            if w != one:
                report.note(f"rule i: J[id,id] = {w}, expected 1")
        elif ia == ib:
            if w != zero:
                report.note(f"rule ii: J[a,a] != 0 at key {(ia, ib)}")
        if sig.across == 1:
            # single outgoing wall: nonzero only if s1 matches s2 or s3
            if ia == 0 or ib == 0:
                if w != _SINGLE_WALL:
                    report.note(
                        f"rule iii: single-wall weight at key {(ia, ib)} is {w}"
                    )
            elif w != zero:
                report.note(f"rule iii: key {(ia, ib)} should vanish, got {w}")
        if table._weight_by_index(ib, ia) != w:
            report.note(f"rule iv: J[a,b] != J[b,a] at key {(ia, ib)}")
        report.checked += 1

    # rule v: simultaneous right translation conjugates the canonical key
    if k <= 4:
        translations = [
            (ia, ib, p)
            for ia in range(gt.order)
            for ib in range(gt.order)
            for p in range(gt.order)
        ]
    else:
        translations = [
            (rng.randrange(gt.order), rng.randrange(gt.order), rng.randrange(gt.order))
            for _ in range(samples)
        ]
    for ia, ib, p in translations:
        row = gt.mul[gt.inv[p]]
        ja, jb = gt.mul[row[ia]][p], gt.mul[row[ib]][p]
        report.checked += 1
        if table._weight_by_index(ja, jb) != table._weight_by_index(ia, ib):
            report.note(f"rule v: key {(ia, ib)} changed under translation {p}")

    # spot-check the canonical cache against raw tau-sums
    for _ in range(raw_spot_checks):
        ia, ib = rng.randrange(gt.order), rng.randrange(gt.order)
        report.checked += 1
        if table._weight_raw(ia, ib) != table._weight_by_index(ia, ib):
            report.note(f"raw recomputation mismatch at key {(ia, ib)}")

    return report


def asymptotic_check(k: int) -> RuleReport:
    """Check 1/q decay orders of all nonzero weights.

    Every nonzero weight must decay at least as fast as q^-(ingoing walls),
    with exact equality whenever no walls annihilate (across == total_in).
    """
    _check_k(k)
    if k > FULL_TABLE_CAP:
        raise BudgetExceededError("asymptotic check runs on full tables (k <= 5)")
    report = RuleReport(name=f"asymptotic orders k={k}")
    table = build_table(k)
    for a, b, sig, w in table.entries():
        if w.is_zero():
            continue
        order, _ = w.asymptotic_order()
        report.checked += 1
        if order > -sig.total_in:
            report.note(
                f"key ({a}, {b}): order {order} slower than -{sig.total_in}"
            )
        if not sig.annihilating and order != -sig.total_in:
            report.note(
                f"key ({a}, {b}): no annihilation but order {order} != -{sig.total_in}"
            )
    return report


def pole_free_report(k: int, lo: int = 2, hi: int = 1000) -> RuleReport:
    """Certify that no reduced weight denominator has an integer root q in [lo, hi]."""
    _check_k(k)
    if k > FULL_TABLE_CAP:
        raise BudgetExceededError("pole scan runs on full tables (k <= 5)")
    report = RuleReport(name=f"pole freeness k={k} on [{lo}, {hi}]")
    table = build_table(k)
    seen: set = set()
    for _, _, _, w in table.entries():
        den = w.den
        if den in seen:
            continue
        seen.add(den)
        report.checked += 1
        roots = den.integer_roots(lo, hi)
        if roots:
            report.note(f"denominator {den} has integer roots {sorted(roots)}")
    return report
