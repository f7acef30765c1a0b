"""Brickwork circuit geometry and exact frame-potential evaluation.

A time-t brickwork circuit on n qudits maps to a lattice of depth 2(t-1)
layers with periodic boundary conditions in time.  The k-th frame potential is
the contraction

    F = sum over (sigma_g, tau_g) per gate of
        prod_g Wg(sigma_g^-1 tau_g, q^2) * prod_{legs g->h} q^ell(tau_g^-1 sigma_h)

which this module evaluates along two deliberately independent routes:

* :func:`frame_potential_direct` works on the hexagonal (sigma, tau)-per-gate
  model with numeric Weingarten weights from exact Gram inversion, contracted
  by a generic factor-sweep over the leg graph.
* :func:`frame_potential_transfer` works on the reduced triangular model,
  looking up symbolic plaquette weights (character-expansion route) and
  contracting layer by layer with pending-gate state, in exact rationals or
  floats.

Their exact equality on every in-budget geometry is the package's central
oracle; :func:`_frame_potential_bruteforce` additionally checks both against
raw enumeration on tiny instances.

t = 0 and t = 1 are degenerate (no lattice) and use closed forms.  The t = 1
formula (k!)^floor(n/2) follows the lattice model's gate-product form; for odd
n the physical circuit would carry an extra q^(2k) from the idle qudit.
"""

from __future__ import annotations

import itertools
import math
import os
from dataclasses import dataclass
from fractions import Fraction

from .errors import BudgetExceededError, PoleError, SingularMatrixError
from .perms import group_table
from .plaquette import PLAQUETTE_CAP, FULL_TABLE_CAP, PlaquetteTable, build_table
from .weingarten import wg_gram, wg_symbolic

STATE_BUDGET_ENV = "RQCLATTICE_STATE_BUDGET"
DEFAULT_STATE_BUDGET = 4_000_000
# the float backend holds dense numpy state tensors, so it affords more states
DEFAULT_FLOAT_STATE_BUDGET = 128_000_000


def _state_budget(default: int = DEFAULT_STATE_BUDGET) -> int:
    raw = os.environ.get(STATE_BUDGET_ENV)
    return default if raw is None else int(raw)


@dataclass(frozen=True)
class Gate:
    gid: int
    layer: int
    qudits: tuple[int, int]


@dataclass
class CircuitGeometry:
    """Brickwork layer structure with the full output-leg connectivity.

    Layers alternate even bricks (1,2),(3,4),... and odd bricks (2,3),(4,5),...
    (plus the wrap gate (n,1) on odd layers for periodic chains of even n; an
    odd-n ring admits no conflict-free wrap gate, so its layout coincides with
    open boundaries).  `legs` maps every gate output leg to the gate that
    consumes it, wrapping the final layer back to the first (time periodicity).
    """

    n: int
    q: int
    t: int
    spatial_bc: str
    layers: list[list[Gate]]
    gates: list[Gate]
    legs: list[tuple[int, int, int]]  # (source gid, qudit, consumer gid)
    consumers: list[tuple[int, int]]  # per gid, consumers of its two output legs

    @property
    def n_gates(self) -> int:
        return len(self.gates)

    def to_json_dict(self) -> dict:
        return {
            "n": self.n,
            "q": self.q,
            "t": self.t,
            "spatial_bc": self.spatial_bc,
            "layers": [[list(g.qudits) for g in layer] for layer in self.layers],
            "legs": [list(leg) for leg in self.legs],
        }


def _layer_pairs(n: int, layer_index: int, spatial_bc: str) -> list[tuple[int, int]]:
    start = 1 if layer_index % 2 == 0 else 2
    pairs = [(a, a + 1) for a in range(start, n, 2) if a + 1 <= n]
    if spatial_bc == "periodic" and layer_index % 2 == 1 and n % 2 == 0:
        pairs.append((n, 1))
    return pairs


def build_geometry(n: int, q: int, t: int, spatial_bc: str = "open") -> CircuitGeometry:
    """Brickwork lattice geometry for the time-t frame potential (depth 2(t-1))."""
    if n < 2:
        raise ValueError("need at least 2 qudits")
    if q < 2:
        raise ValueError("local dimension must be >= 2")
    if t < 0:
        raise ValueError("t must be >= 0")
    if spatial_bc not in ("open", "periodic"):
        raise ValueError(f"unknown boundary condition {spatial_bc!r}")

    depth = 2 * (t - 1) if t >= 1 else 0
    layers: list[list[Gate]] = []
    gates: list[Gate] = []
    for ell in range(depth):
        layer = []
        for pair in _layer_pairs(n, ell, spatial_bc):
            gate = Gate(gid=len(gates), layer=ell, qudits=pair)
            gates.append(gate)
            layer.append(gate)
        layers.append(layer)

    touching: dict[int, list[Gate]] = {}
    for g in gates:
        for u in g.qudits:
            touching.setdefault(u, []).append(g)

    legs: list[tuple[int, int, int]] = []
    consumers: list[tuple[int, int]] = []
    for g in gates:
        cons = []
        for u in g.qudits:
            consumer = None
            for step in range(1, depth + 1):
                target_layer = (g.layer + step) % depth
                for h in layers[target_layer]:
                    if u in h.qudits:
                        consumer = h
                        break
                if consumer is not None:
                    break
            assert consumer is not None, f"qudit {u} has no consuming gate"
            legs.append((g.gid, u, consumer.gid))
            cons.append(consumer.gid)
        consumers.append((cons[0], cons[1]))

    return CircuitGeometry(
        n=n,
        q=q,
        t=t,
        spatial_bc=spatial_bc,
        layers=layers,
        gates=gates,
        legs=legs,
        consumers=consumers,
    )


@dataclass
class FramePotentialResult:
    """Exact or floating frame-potential value with its provenance."""

    value: Fraction | float
    k: int
    n: int
    q: int
    t: int
    spatial_bc: str
    method: str  # direct | transfer | special
    backend: str  # exact | float
    gauge_fixed: bool = False

    def as_float(self) -> float:
        return float(self.value)


def frame_potential_special(n: int, q: int, t: int, k: int) -> int:
    """Closed forms for the degenerate depths: t=0 -> q^(2nk); t=1 -> (k!)^floor(n/2).

    The t=1 product-of-gate-moments form requires k <= q^2; beyond that the
    per-gate trace moments are combinatorial counts this package does not model.
    """
    if t == 0:
        return q ** (2 * n * k)
    if t == 1:
        if k > q * q:
            raise ValueError(
                f"t=1 closed form needs k <= q^2 (k={k}, q^2={q * q}); "
                "use the Monte Carlo estimator instead"
            )
        return math.factorial(k) ** (n // 2)
    raise ValueError("special values exist only for t in {0, 1}")


def _check_moment(k: int):
    if not 1 <= k <= PLAQUETTE_CAP:
        raise BudgetExceededError(f"moment order capped at k={PLAQUETTE_CAP}")


def _special_result(geom: CircuitGeometry, k: int, method: str) -> FramePotentialResult:
    value = Fraction(frame_potential_special(geom.n, geom.q, geom.t, k))
    return FramePotentialResult(
        value=value,
        k=k,
        n=geom.n,
        q=geom.q,
        t=geom.t,
        spatial_bc=geom.spatial_bc,
        method="special",
        backend="exact",
    )


# ---------------------------------------------------------------------------
# direct route: hexagonal (sigma, tau) model, Gram-inverse Weingarten weights
# ---------------------------------------------------------------------------


def _wg_values_at(k: int, d: int) -> list[Fraction]:
    """Wg(perms[i], d) for every group element, preferring the Gram-inverse route."""
    gt = group_table(k)
    if d >= k:
        gram = wg_gram(k, d)
        return [gram[p] for p in gt.perms]
    values = {}
    for ct in gt.cycle_types:
        values[ct] = wg_symbolic(ct, k).evaluate(d)  # PoleError surfaces here
    return [values[gt.cycle_types[gt.ct_index[i]]] for i in range(gt.order)]


def frame_potential_direct(
    geom: CircuitGeometry,
    k: int,
    gauge_fix: bool = False,
    state_budget: int | None = None,
) -> FramePotentialResult:
    """Exact frame potential from the hexagonal model.

    Sums over a permutation pair (sigma, tau) per gate with a Weingarten
    factor per gate and a q^ell inner product per leg, contracted by a factor
    sweep over the leg graph in scaled integer arithmetic.  An explicit budget
    guards the peak contraction state; raw enumeration of the same sum is kept
    in `_frame_potential_bruteforce` for tiny cross-checks.

    With `gauge_fix` the first gate's sigma is pinned to the identity and the
    result multiplied by k! (exact spin-relabelling symmetry; verified against
    the unfixed sum in the test suite).
    """
    _check_moment(k)
    if geom.t <= 1:
        return _special_result(geom, k, "direct")

    gt = group_table(k)
    order = gt.order
    q = geom.q
    d = q * q
    try:
        wg_vals = _wg_values_at(k, d)
    except PoleError as exc:
        raise PoleError(
            f"Weingarten function has a pole at d = q^2 = {d} for k={k}: {exc}"
        ) from exc

    denom_lcm = math.lcm(*(v.denominator for v in wg_vals))
    wg_int = [int(v * denom_lcm) for v in wg_vals]

    # shared 2-variable factor tables: T[a][b] = f(a^-1 b)
    mul, inv, ncyc = gt.mul, gt.inv, gt.n_cycles
    wg_tab = [[wg_int[mul[inv[a]][b]] for b in range(order)] for a in range(order)]
    qpow = [q**e for e in range(k + 1)]
    leg_tab = [[qpow[ncyc[mul[inv[a]][b]]] for b in range(order)] for a in range(order)]

    # variables: sigma_g -> 2*gid, tau_g -> 2*gid + 1, introduced layer-major
    intro: list[int] = []
    for layer in geom.layers:
        intro.extend(2 * g.gid for g in layer)
        intro.extend(2 * g.gid + 1 for g in layer)
    pos = {v: i for i, v in enumerate(intro)}

    factors: list[tuple[int, int, list[list[int]]]] = []
    for g in geom.gates:
        factors.append((2 * g.gid, 2 * g.gid + 1, wg_tab))
    for src, _, dst in geom.legs:
        factors.append((2 * src + 1, 2 * dst, leg_tab))

    apply_at = [max(pos[a], pos[b]) for a, b, _ in factors]
    drop_at = {v: pos[v] for v in intro}
    for f_i, (a, b, _) in enumerate(factors):
        drop_at[a] = max(drop_at[a], apply_at[f_i])
        drop_at[b] = max(drop_at[b], apply_at[f_i])

    gauge_var = 2 * geom.gates[0].gid if gauge_fix else None
    budget = _state_budget() if state_budget is None else state_budget
    _enforce_budget(intro, pos, drop_at, order, gauge_var, budget)

    step_factors: list[list[tuple[int, int, list[list[int]]]]] = [[] for _ in intro]
    for f_i, (a, b, tab) in enumerate(factors):
        step_factors[apply_at[f_i]].append((a, b, tab))
    step_drops: list[list[int]] = [[] for _ in intro]
    for v, s in drop_at.items():
        step_drops[s].append(v)

    state: dict[tuple[int, ...], int] = {(): 1}
    alive: list[int] = []
    for s, v in enumerate(intro):
        alive.append(v)
        positions = {var: i for i, var in enumerate(alive)}
        fts = [(positions[a], positions[b], tab) for a, b, tab in step_factors[s]]
        domain = (0,) if v == gauge_var else range(order)
        new_state: dict[tuple[int, ...], int] = {}
        for key, w in state.items():
            for val in domain:
                kk = key + (val,)
                w2 = w
                for pa, pb, tab in fts:
                    w2 *= tab[kk[pa]][kk[pb]]
                    if not w2:
                        break
                if w2:
                    new_state[kk] = w2
        state = new_state
        if step_drops[s]:
            dpos = sorted((positions[x] for x in step_drops[s]), reverse=True)
            merged: dict[tuple[int, ...], int] = {}
            for key, w in state.items():
                lk = list(key)
                for p in dpos:
                    del lk[p]
                tk = tuple(lk)
                if tk in merged:
                    merged[tk] += w
                else:
                    merged[tk] = w
            state = merged
            for x in step_drops[s]:
                alive.remove(x)

    assert not alive and set(state) <= {()}
    total = state.get((), 0)
    value = Fraction(total, denom_lcm ** geom.n_gates)
    if gauge_fix:
        value *= math.factorial(k)
    return FramePotentialResult(
        value=value,
        k=k,
        n=geom.n,
        q=geom.q,
        t=geom.t,
        spatial_bc=geom.spatial_bc,
        method="direct",
        backend="exact",
        gauge_fixed=gauge_fix,
    )


def _enforce_budget(intro, pos, drop_at, order, gauge_var, budget):
    alive_now: set[int] = set()
    peak = 1
    for s, v in enumerate(intro):
        alive_now.add(v)
        count = 1
        for x in alive_now:
            count *= 1 if x == gauge_var else order
            if count > budget:
                raise BudgetExceededError(
                    f"contraction state would reach {count} > budget {budget} "
                    f"at step {s}; raise {STATE_BUDGET_ENV} or use gauge_fix"
                )
        peak = max(peak, count)
        alive_now = {x for x in alive_now if drop_at[x] > s}
    return peak


# ---------------------------------------------------------------------------
# transfer route: triangular plaquette model, layer DP with pending-gate state
# ---------------------------------------------------------------------------


def frame_potential_transfer(
    geom: CircuitGeometry,
    k: int,
    backend: str = "exact",
    gauge_fix: bool = False,
    state_budget: int | None = None,
) -> FramePotentialResult:
    """Frame potential from the triangular plaquette model, layer by layer.

    Each gate carries one S_k spin; eliminating the per-gate tau sums turns
    the weight into a product of plaquette terms J^{spin_g}_{consumer spins},
    looked up from the symbolic table and evaluated at q.  The layer state
    carries spins of gates whose plaquette factor or outgoing legs are still
    pending, which handles open-boundary legs that skip layers without any
    boundary-specific weights.

    `backend="exact"` contracts in scaled integers and returns a Fraction;
    `backend="float"` contracts in doubles.
    """
    _check_moment(k)
    if backend not in ("exact", "float"):
        raise ValueError(f"unknown backend {backend!r}")
    if geom.t <= 1:
        res = _special_result(geom, k, "transfer")
        if backend == "float":
            res.value = float(res.value)
            res.backend = "float"
        res.method = "special"
        return res

    gt = group_table(k)
    order = gt.order
    q = geom.q
    table = build_table(k) if k <= FULL_TABLE_CAP else PlaquetteTable(k)

    n_gates = geom.n_gates
    cons = geom.consumers
    # step at which gate g's plaquette factor can be applied (gids are layer-major)
    apply_at = [max(g, cons[g][0], cons[g][1]) for g in range(n_gates)]
    needed_until = [apply_at[g] for g in range(n_gates)]
    for g in range(n_gates):
        for c in cons[g]:
            needed_until[c] = max(needed_until[c], apply_at[g])
    factors_by_step: list[list[int]] = [[] for _ in range(n_gates)]
    for g in range(n_gates):
        factors_by_step[apply_at[g]].append(g)
    drops_by_step: list[list[int]] = [[] for _ in range(n_gates)]
    for g in range(n_gates):
        drops_by_step[needed_until[g]].append(g)

    gauge_gate = 0 if gauge_fix else None
    default_budget = (
        DEFAULT_STATE_BUDGET if backend == "exact" else DEFAULT_FLOAT_STATE_BUDGET
    )
    budget = _state_budget(default_budget) if state_budget is None else state_budget
    pending_now: set[int] = set()
    for g in range(n_gates):
        pending_now.add(g)
        count = 1
        for x in pending_now:
            count *= 1 if x == gauge_gate else order
            if count > budget:
                raise BudgetExceededError(
                    f"transfer state would reach {count} > budget {budget}; "
                    f"raise {STATE_BUDGET_ENV} or enable gauge_fix"
                )
        pending_now = {x for x in pending_now if needed_until[x] > g}

    if backend == "exact":
        total, denom_lcm = _transfer_exact_sweep(
            geom, gt, table, factors_by_step, drops_by_step, gauge_gate
        )
        value: Fraction | float = Fraction(total, denom_lcm**n_gates)
    else:
        value = _transfer_float_sweep(
            geom, gt, table, factors_by_step, drops_by_step, gauge_gate
        )
    if gauge_fix:
        value *= math.factorial(k)
    return FramePotentialResult(
        value=value,
        k=k,
        n=geom.n,
        q=geom.q,
        t=geom.t,
        spatial_bc=geom.spatial_bc,
        method="transfer",
        backend=backend,
        gauge_fixed=gauge_fix,
    )


def _transfer_exact_sweep(geom, gt, table, factors_by_step, drops_by_step, gauge_gate):
    """Dict-based exact layer sweep in scaled integer arithmetic."""
    order = gt.order
    mul, inv = gt.mul, gt.inv
    q = geom.q
    cons = geom.consumers
    jfrac = [
        [table._weight_by_index(ia, ib).evaluate(q) for ib in range(order)]
        for ia in range(order)
    ]
    denom_lcm = math.lcm(*(v.denominator for row in jfrac for v in row))
    jval = [[int(v * denom_lcm) for v in row] for row in jfrac]

    # state maps tuples of spins (aligned with `pending` gid list) to weights
    state: dict[tuple[int, ...], int] = {(): 1}
    pending: list[int] = []
    for step in range(geom.n_gates):
        pending.append(step)
        slot = {g: i for i, g in enumerate(pending)}
        plaquettes = [
            (slot[g], slot[cons[g][0]], slot[cons[g][1]])
            for g in factors_by_step[step]
        ]
        domain = (0,) if step == gauge_gate else range(order)
        new_state: dict[tuple[int, ...], int] = {}
        for key, w in state.items():
            for val in domain:
                kk = key + (val,)
                w2 = w
                for pg, p1, p2 in plaquettes:
                    row = mul[inv[kk[pg]]]
                    w2 *= jval[row[kk[p1]]][row[kk[p2]]]
                    if not w2:
                        break
                if w2:
                    new_state[kk] = w2
        state = new_state
        if drops_by_step[step]:
            dpos = sorted((slot[g] for g in drops_by_step[step]), reverse=True)
            merged: dict[tuple[int, ...], int] = {}
            for key, w in state.items():
                lk = list(key)
                for p in dpos:
                    del lk[p]
                tk = tuple(lk)
                if tk in merged:
                    merged[tk] += w
                else:
                    merged[tk] = w
            state = merged
            for g in drops_by_step[step]:
                pending.remove(g)
    return state.get((), 0), denom_lcm


def _transfer_float_sweep(geom, gt, table, factors_by_step, drops_by_step, gauge_gate):
    """Dense numpy layer sweep; one state-tensor axis per pending gate."""
    import numpy as np

    order = gt.order
    q = geom.q
    cons = geom.consumers
    jmat = np.array(
        [
            [table._weight_by_index(ia, ib).evaluate_float(float(q)) for ib in range(order)]
            for ia in range(order)
        ]
    )
    # j3[sg, s1, s2] = J^{sg}_{s1 s2}
    inv_rows = np.array([gt.mul[gt.inv[sg]] for sg in range(order)])
    j3 = np.empty((order, order, order))
    for sg in range(order):
        row = inv_rows[sg]
        j3[sg] = jmat[np.ix_(row, row)]

    state = np.ones((), dtype=float)
    pending: list[int] = []
    for step in range(geom.n_gates):
        pending.append(step)
        slot = {g: i for i, g in enumerate(pending)}
        dom = 1 if step == gauge_gate else order
        state = np.multiply.outer(state, np.ones(dom))
        axis_sizes = state.shape
        for g in factors_by_step[step]:
            roles = (slot[g], slot[cons[g][0]], slot[cons[g][1]])
            idx = []
            for pos in roles:
                shape = [1] * state.ndim
                shape[pos] = axis_sizes[pos]
                idx.append(np.arange(axis_sizes[pos]).reshape(shape))
            np.multiply(state, j3[idx[0], idx[1], idx[2]], out=state)
        if drops_by_step[step]:
            dpos = tuple(sorted(slot[g] for g in drops_by_step[step]))
            state = state.sum(axis=dpos)
            for g in drops_by_step[step]:
                pending.remove(g)
    return float(state)


# ---------------------------------------------------------------------------
# raw enumeration (test oracle)
# ---------------------------------------------------------------------------


def _frame_potential_bruteforce(
    geom: CircuitGeometry, k: int, config_budget: int = 20_000_000
) -> Fraction:
    """Raw (k!)^(2 G) enumeration of the hexagonal model.  Tiny instances only."""
    _check_moment(k)
    if geom.t <= 1:
        return Fraction(frame_potential_special(geom.n, geom.q, geom.t, k))
    gt = group_table(k)
    order = gt.order
    n_gates = geom.n_gates
    if order ** (2 * n_gates) > config_budget:
        raise BudgetExceededError(
            f"(k!)^(2G) = {order ** (2 * n_gates)} exceeds brute-force budget"
        )
    q = geom.q
    wg_vals = {
        ct: wg_symbolic(ct, k).evaluate(q * q) for ct in gt.cycle_types
    }
    wg_elem = [wg_vals[gt.cycle_types[gt.ct_index[i]]] for i in range(order)]
    mul, inv, ncyc = gt.mul, gt.inv, gt.n_cycles
    qpow = [Fraction(q**e) for e in range(k + 1)]

    total = Fraction(0)
    for assignment in itertools.product(range(order), repeat=2 * n_gates):
        w = Fraction(1)
        for g in range(n_gates):
            w *= wg_elem[mul[inv[assignment[2 * g]]][assignment[2 * g + 1]]]
        if not w:
            continue
        for src, _, dst in geom.legs:
            w *= qpow[ncyc[mul[inv[assignment[2 * src + 1]]][assignment[2 * dst]]]]
        total += w
    return total
