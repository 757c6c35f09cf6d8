"""Interleaving decision and distance for modules on cell arrangements.

A v-interleaving is a pair of natural maps f from the v-shift of F to G
and g from the v-shift of G to F whose mixed composites realize the 2v
comparison morphisms of F and G.  The decision procedure works on three
nested refinements: the union grid of both modules, the grid extended by
its own v-translate (where f and g live cellwise), and the grid extended
by the 2v-translate (where the composite equations live).  Natural
families are constant on the cells of these grids, so the search over
cellwise matrices is exhaustive.

The distance in a fixed interior antipodal direction changes truth value
only at parameters where a breakpoint difference is bridged by the shift
or the doubled shift, so binary search over that finite candidate set plus
one certification query between consecutive candidates computes the exact
value; a sample beyond the breakpoint diameter certifies infinity.
"""
from __future__ import annotations

import itertools
import random
from dataclasses import dataclass
from fractions import Fraction

from .arrangement import CellComplex, common_refinement
from .exactla import FieldMat, SolutionSpace, affine_solution_space
from .persist import (
    ArrModule,
    ModMorphism,
    restrict_module,
    restrict_morphism,
    shift_module,
    shift_morphism,
    smoothing,
)
from .rational import Vec, as_vec
from .sites import beta_star

__all__ = [
    "BudgetExceededError",
    "InterleavingWitness",
    "DistanceResult",
    "is_interleaved",
    "interleaving_distance",
    "zero_interleaving_criterion",
    "inter_probe",
    "isometry_check",
    "DEFAULT_BUDGET",
]

DEFAULT_BUDGET = 20
_PRESAMPLE = 64
_PRESAMPLE_SEED = 0xC0FFEE


class BudgetExceededError(Exception):
    """Search space dimension exceeded the enumeration budget.

    Distinct from a negative decision: nothing is claimed about existence.
    known_false / known_true bracket the distance when raised during a
    distance computation."""

    def __init__(self, required: int, budget: int, known_false=None, known_true=None):
        self.required = required
        self.budget = budget
        self.known_false = known_false
        self.known_true = known_true
        msg = f"search dimension {required} exceeds budget {budget}"
        if known_false is not None or known_true is not None:
            msg += f" (bracket: >{known_false}, <={known_true})"
        super().__init__(msg)


def _restrict_onto(mod: ArrModule, fine: CellComplex) -> ArrModule:
    refined, (m_self, _) = common_refinement(mod.complex, fine)
    if refined != fine:
        raise ValueError("target complex does not refine the module's complex")
    return restrict_module(mod, refined, m_self)


def _restrict_morphism_onto(f: ModMorphism, fine: CellComplex) -> ModMorphism:
    refined, (m_self, _) = common_refinement(f.src.complex, fine)
    if refined != fine:
        raise ValueError("target complex does not refine the morphism's complex")
    return restrict_morphism(f, refined, m_self)


@dataclass
class InterleavingWitness:
    """Cellwise interleaving data, checkable independently of the search."""

    v: Vec
    f: ModMorphism  # shift of F by v -> G, on the witness grid
    g: ModMorphism  # shift of G by v -> F, on the witness grid
    F: ArrModule
    G: ArrModule

    def verify(self) -> bool:
        try:
            self.f.validate()
            self.g.validate()
        except ValueError:
            return False
        two_v = tuple(2 * x for x in self.v)
        w2 = self.f.src.complex.with_extra_breaks(
            [[b - 2 * vj for b in ax.breaks] for ax, vj in zip(self.F.complex.axes, self.v)]
        )
        lhs_f = _restrict_morphism_onto(self.g, w2).compose(
            _restrict_morphism_onto(shift_morphism(self.f, self.v), w2)
        )
        chi_f = _restrict_morphism_onto(smoothing(self.F, two_v, (Fraction(0),) * len(self.v)), w2)
        if lhs_f != chi_f:
            return False
        lhs_g = _restrict_morphism_onto(self.f, w2).compose(
            _restrict_morphism_onto(shift_morphism(self.g, self.v), w2)
        )
        chi_g = _restrict_morphism_onto(smoothing(self.G, two_v, (Fraction(0),) * len(self.v)), w2)
        return lhs_g == chi_g


@dataclass
class DistanceResult:
    value: Fraction | float
    attained: bool | None
    mode: str
    direction: Vec
    bracket: tuple | None = None
    witness: InterleavingWitness | None = None
    witness_parameter: Fraction | None = None


# -- decision ---------------------------------------------------------------------


class _Side:
    """One direction of the search: unknown maps shift(A, v) -> B."""

    def __init__(self, name, A: ArrModule, B: ArrModule):
        self.name = name
        self.A = A
        self.B = B
        self.unknowns: dict = {}
        self.nat_eqs: list = []
        self.space: SolutionSpace | None = None


def _build_side(side: _Side, w1: CellComplex, t0, tv):
    """Unknown component per witness-grid cell plus naturality equations."""
    A, B = side.A, side.B
    p = A.p
    for c in w1.cells():
        rows = B.dim_at(t0(c))
        cols = A.dim_at(tv(c))
        if rows and cols:
            side.unknowns[(side.name, c)] = (rows, cols)
    for a, b in w1.cover_pairs():
        rows = B.dim_at(t0(a))
        cols = A.dim_at(tv(b))
        if not rows or not cols:
            continue
        terms = []
        if (side.name, b) in side.unknowns:
            terms.append((B.structure_map(t0(a), t0(b)), (side.name, b), None))
        if (side.name, a) in side.unknowns:
            terms.append((None, (side.name, a), -A.structure_map(tv(a), tv(b))))
        if terms:
            side.nat_eqs.append((terms, FieldMat.zero(p, rows, cols)))


def _axis_tables(w: CellComplex, base: CellComplex, shifts):
    """Per shift: per axis: witness-grid axis cell -> base axis cell."""
    out = {}
    for s in shifts:
        tabs = []
        for wax, bax, sj in zip(w.axes, base.axes, s):
            tabs.append([bax.cell_of(wax.representative(i) + sj) for i in range(wax.ncells)])
        out[s] = tabs
    return out


def _decide(F: ArrModule, G: ArrModule, v, budget: int):
    """Find an interleaving witness or certify none exists."""
    if F.p != G.p:
        raise ValueError("field mismatch")
    base, (mf, mg) = common_refinement(F.complex, G.complex)
    F0 = restrict_module(F, base, mf)
    G0 = restrict_module(G, base, mg)
    v = as_vec(v)
    if len(v) != base.dim:
        raise ValueError("shift vector dimension mismatch")
    if not base.in_antipode(v):
        raise ValueError("shift vector must lie in the antipodal cone")
    p = F.p
    zero_v = (Fraction(0),) * base.dim

    if v == zero_v and F0 == G0:
        return _identity_witness(F0, G0, v)

    two_v = tuple(2 * x for x in v)
    w1 = base.with_extra_breaks(
        [[b - vj for b in ax.breaks] for ax, vj in zip(base.axes, v)]
    )
    w2 = w1.with_extra_breaks(
        [[b - tj for b in ax.breaks] for ax, tj in zip(base.axes, two_v)]
    )
    t1 = _axis_tables(w1, base, [zero_v, v])
    t2 = _axis_tables(w2, base, [zero_v, v, two_v])

    def lut(tabs, cell):
        return tuple(tabs[j][i] for j, i in enumerate(cell))

    t0 = lambda c: lut(t1[zero_v], c)
    tv = lambda c: lut(t1[v], c)
    s0 = lambda c: lut(t2[zero_v], c)
    sv = lambda c: lut(t2[v], c)
    s2 = lambda c: lut(t2[two_v], c)
    w1_of = _axis_tables(w2, w1, [zero_v, v])
    a1_of = lambda c: lut(w1_of[zero_v], c)
    b1_of = lambda c: lut(w1_of[v], c)

    w2_cells = list(w2.cells())
    chi_f = {t: F0.structure_map(s0(t), s2(t)) for t in w2_cells}
    chi_g = {t: G0.structure_map(s0(t), s2(t)) for t in w2_cells}

    if all(m.is_zero() for m in chi_f.values()) and all(m.is_zero() for m in chi_g.values()):
        return _zero_witness(F0, G0, v, w1)

    # sound pruning: a witness makes the F comparison factor through G at
    # the v-translate (and symmetrically), bounding its rank
    for t in w2_cells:
        if chi_f[t].rank() > G0.dim_at(sv(t)):
            return None
        if chi_g[t].rank() > F0.dim_at(sv(t)):
            return None

    f_side = _Side("f", F0, G0)
    g_side = _Side("g", G0, F0)
    _build_side(f_side, w1, t0, tv)
    _build_side(g_side, w1, t0, tv)
    f_side.space = affine_solution_space(p, f_side.unknowns, f_side.nat_eqs)
    g_side.space = affine_solution_space(p, g_side.unknowns, g_side.nat_eqs)
    if not f_side.space.feasible or not g_side.space.feasible:
        raise AssertionError("homogeneous naturality system lost the zero solution")

    swap = g_side.space.dim < f_side.space.dim
    enum_side, solve_side = (g_side, f_side) if swap else (f_side, g_side)
    chi_enum, chi_solve = (chi_g, chi_f) if swap else (chi_f, chi_g)

    # cheap sufficient probes: fix a random natural family on one side and
    # solve the whole remaining system, which is linear; any hit is a
    # complete witness, misses fall through to the exhaustive sweep
    probe = _linear_probes(p, enum_side, solve_side, chi_enum, chi_solve, w2_cells, a1_of, b1_of)
    if probe is None:
        if enum_side.space.dim > budget:
            raise BudgetExceededError(enum_side.space.dim, budget)
        probe = _enumerate(
            p, enum_side, solve_side, chi_enum, chi_solve, w2_cells, a1_of, b1_of
        )
    if probe is None:
        return None
    e_comps, s_comps = probe
    f_comps, g_comps = (s_comps, e_comps) if swap else (e_comps, s_comps)
    return _assemble_witness(F0, G0, v, w1, f_comps, g_comps)


def _linear_probes(
    p, enum_side, solve_side, chi_enum, chi_solve, w2_cells, a1_of, b1_of, rounds=6
):
    """Fix one side at a random natural family and solve the other side's
    full system (naturality plus both composite constraints), which is
    linear.  Tries the zero family first, then seeded random families on
    alternating sides."""
    attempts = [(enum_side, solve_side, chi_enum, chi_solve, None)]
    rng = random.Random(_PRESAMPLE_SEED ^ 0x5EED5EED)
    for k in range(rounds):
        if k % 2 == 0:
            attempts.append((solve_side, enum_side, chi_solve, chi_enum, rng))
        else:
            attempts.append((enum_side, solve_side, chi_enum, chi_solve, rng))
    for fixed, other, chi_fixed, chi_other, r in attempts:
        if r is None:
            coeffs = (0,) * fixed.space.dim
        else:
            coeffs = tuple(r.randrange(p) for _ in range(fixed.space.dim))
        fixed_named = fixed.space.element(coeffs)
        fixed_comps = {cell: m for (_, cell), m in fixed_named.items()}
        sol = _solve_other(
            p, fixed, other, chi_fixed, chi_other, w2_cells, a1_of, b1_of, fixed_comps
        )
        if sol is not None:
            if fixed is enum_side:
                return fixed_comps, sol
            return sol, fixed_comps
    return None


def _enumerate(p, enum_side, solve_side, chi_enum, chi_solve, w2_cells, a1_of, b1_of):
    """Sweep the naturality space of one side; solve the other side's
    naturality-plus-composite system for each candidate."""
    space = enum_side.space
    rng = random.Random(_PRESAMPLE_SEED)
    seen = set()
    samples = []
    if space.dim:
        want = min(_PRESAMPLE, p**space.dim)
        while len(samples) < want:
            c = tuple(rng.randrange(p) for _ in range(space.dim))
            if c not in seen:
                seen.add(c)
                samples.append(c)

    def candidates():
        yield from samples
        for c in itertools.product(range(p), repeat=space.dim):
            if c not in seen:
                yield c

    for coeffs in candidates():
        e_comps_named = space.element(coeffs)
        e_comps = {cell: m for (_, cell), m in e_comps_named.items()}
        sol = _solve_other(p, enum_side, solve_side, chi_enum, chi_solve, w2_cells, a1_of, b1_of, e_comps)
        if sol is not None:
            return e_comps, sol
    return None


def _solve_other(p, enum_side, solve_side, chi_enum, chi_solve, w2_cells, a1_of, b1_of, e_comps):
    """Given the enumerated side's components, decide feasibility of the
    other side and return its components."""
    name = solve_side.name
    unknowns = solve_side.unknowns

    def e_at(w1_cell):
        m = e_comps.get(w1_cell)
        if m is not None:
            return m
        r, c = enum_side.unknowns.get((enum_side.name, w1_cell), (0, 0))
        return FieldMat.zero(p, r, c)

    # necessary rank conditions per composite equation, cheap to test
    equations = list(solve_side.nat_eqs)
    for t in w2_cells:
        a1, b1 = a1_of(t), b1_of(t)
        # enumerated side's composite: solve_comp(a1) @ e(b1) = chi_enum[t]
        rhs = chi_enum[t]
        if rhs.nrows and rhs.ncols:
            emat = e_at(b1)
            if (name, a1) in unknowns:
                if emat.ncols:
                    stacked = FieldMat.vstack(emat, rhs)
                    if stacked.rank() != emat.rank():
                        return None
                elif not rhs.is_zero():
                    return None
                equations.append(([(None, (name, a1), emat)], rhs))
            else:
                if not rhs.is_zero():
                    return None
        # other composite: e(a1) @ solve_comp(b1) = chi_solve[t]
        rhs2 = chi_solve[t]
        if rhs2.nrows and rhs2.ncols:
            emat = e_at(a1)
            if (name, b1) in unknowns:
                if emat.nrows:
                    joined = FieldMat.hstack(emat, rhs2)
                    if joined.rank() != emat.rank():
                        return None
                elif not rhs2.is_zero():
                    return None
                equations.append(([(emat, (name, b1), None)], rhs2))
            else:
                if not rhs2.is_zero():
                    return None
    space = affine_solution_space(p, unknowns, equations)
    if not space.feasible:
        return None
    named = space.particular()
    return {cell: m for (_, cell), m in named.items()}


def _witness_modules(F0, G0, v, w1):
    src_f = _restrict_onto(shift_module(F0, v), w1)
    dst_f = _restrict_onto(G0, w1)
    src_g = _restrict_onto(shift_module(G0, v), w1)
    dst_g = _restrict_onto(F0, w1)
    return src_f, dst_f, src_g, dst_g


def _assemble_witness(F0, G0, v, w1, f_comps, g_comps):
    src_f, dst_f, src_g, dst_g = _witness_modules(F0, G0, v, w1)
    f = ModMorphism(src_f, dst_f, f_comps)
    g = ModMorphism(src_g, dst_g, g_comps)
    w = InterleavingWitness(v=v, f=f, g=g, F=F0, G=G0)
    if not w.verify():
        raise AssertionError("search produced a witness that fails verification")
    return w


def _zero_witness(F0, G0, v, w1):
    src_f, dst_f, src_g, dst_g = _witness_modules(F0, G0, v, w1)
    w = InterleavingWitness(
        v=v,
        f=ModMorphism(src_f, dst_f, {}, validate=False),
        g=ModMorphism(src_g, dst_g, {}, validate=False),
        F=F0,
        G=G0,
    )
    if not w.verify():
        raise AssertionError("zero witness fails verification")
    return w


def _identity_witness(F0, G0, v):
    w1 = F0.complex
    comps = {c: FieldMat.identity(F0.p, d) for c, d in F0.dims.items()}
    src_f, dst_f, src_g, dst_g = _witness_modules(F0, G0, v, w1)
    w = InterleavingWitness(
        v=v,
        f=ModMorphism(src_f, dst_f, dict(comps), validate=False),
        g=ModMorphism(src_g, dst_g, dict(comps), validate=False),
        F=F0,
        G=G0,
    )
    if not w.verify():
        raise AssertionError("identity witness fails verification")
    return w


def is_interleaved(F: ArrModule, G: ArrModule, v, budget: int = DEFAULT_BUDGET):
    """Interleaving witness in shift v, or None when provably none exists.

    Raises BudgetExceededError when the search space is too large to sweep;
    that outcome makes no existence claim either way."""
    return _decide(F, G, v, budget)


def zero_interleaving_criterion(F: ArrModule, v) -> bool:
    """Whether the doubled comparison morphism of F vanishes, which decides
    interleaving with the zero module in shift v."""
    v = as_vec(v)
    two_v = tuple(2 * x for x in v)
    zero = (Fraction(0),) * len(v)
    return smoothing(F, two_v, zero).is_zero()


# -- distance ---------------------------------------------------------------------


def _direction_checked(complex_: CellComplex, v0) -> Vec:
    v0 = as_vec(v0)
    if len(v0) != complex_.dim:
        raise ValueError("direction dimension mismatch")
    if not complex_.in_antipode_interior(v0):
        raise ValueError("direction must lie in the interior of the antipodal cone")
    return v0


def _candidate_parameters(F: ArrModule, G: ArrModule, v0: Vec) -> list[Fraction]:
    cands = {Fraction(0)}
    for j, vj in enumerate(v0):
        breaks = sorted(set(F.complex.axes[j].breaks) | set(G.complex.axes[j].breaks))
        for i, b in enumerate(breaks):
            for b2 in breaks[i + 1 :]:
                delta = b2 - b
                cands.add(delta / abs(vj))
                cands.add(delta / (2 * abs(vj)))
    return sorted(cands)


def _diameter_bound(F: ArrModule, G: ArrModule, v0: Vec) -> Fraction:
    worst = Fraction(0)
    for j, vj in enumerate(v0):
        breaks = sorted(set(F.complex.axes[j].breaks) | set(G.complex.axes[j].breaks))
        if len(breaks) >= 2:
            worst = max(worst, (breaks[-1] - breaks[0]) / abs(vj))
    return worst


def interleaving_distance(
    F: ArrModule,
    G: ArrModule,
    v0,
    mode: str = "exact",
    tol: Fraction | None = None,
    budget: int = DEFAULT_BUDGET,
) -> DistanceResult:
    """Interleaving distance in direction v0.

    Exact mode walks the finite set of parameters where the decision can
    change, certifying the value and whether it is attained.  Bracketed
    mode bisects down to tol and reports the enclosing interval."""
    v0 = _direction_checked(F.complex, v0)
    memo: dict[Fraction, InterleavingWitness | None] = {}

    def decide(c: Fraction):
        if c not in memo:
            try:
                memo[c] = _decide(F, G, tuple(c * x for x in v0), budget)
            except BudgetExceededError as e:
                falses = [x for x, w in memo.items() if w is None]
                trues = [x for x, w in memo.items() if w is not None]
                raise BudgetExceededError(
                    e.required,
                    e.budget,
                    known_false=max(falses) if falses else None,
                    known_true=min(trues) if trues else None,
                ) from None
        return memo[c]

    if mode == "bracketed":
        if tol is None or tol <= 0:
            raise ValueError("bracketed mode needs a positive tolerance")
        return _distance_bracketed(F, G, v0, decide, tol)
    if mode != "exact":
        raise ValueError("mode must be 'exact' or 'bracketed'")

    cands = _candidate_parameters(F, G, v0)
    n = len(cands)

    # find the first parameter with a witness, if any, via binary search
    if decide(cands[-1]) is None:
        tail = max(cands[-1], _diameter_bound(F, G, v0)) + 1
        w = decide(tail)
        if w is None:
            return DistanceResult(
                value=float("inf"), attained=None, mode="exact", direction=v0
            )
        return DistanceResult(
            value=cands[-1],
            attained=False,
            mode="exact",
            direction=v0,
            witness=w,
            witness_parameter=tail,
        )
    lo, hi = 0, n - 1  # decision at cands[hi] is a witness
    while lo < hi:
        mid = (lo + hi) // 2
        if decide(cands[mid]) is not None:
            hi = mid
        else:
            lo = mid + 1
    first = hi
    if first == 0:
        w = decide(cands[0])
        return DistanceResult(
            value=cands[0],
            attained=True,
            mode="exact",
            direction=v0,
            witness=w,
            witness_parameter=cands[0],
        )
    # the decision is constant strictly between consecutive candidates, so
    # one interior sample settles whether the threshold is attained
    mid_param = (cands[first - 1] + cands[first]) / 2
    w_mid = decide(mid_param)
    if w_mid is not None:
        return DistanceResult(
            value=cands[first - 1],
            attained=False,
            mode="exact",
            direction=v0,
            witness=w_mid,
            witness_parameter=mid_param,
        )
    w = decide(cands[first])
    return DistanceResult(
        value=cands[first],
        attained=True,
        mode="exact",
        direction=v0,
        witness=w,
        witness_parameter=cands[first],
    )


def _distance_bracketed(F, G, v0, decide, tol):
    if decide(Fraction(0)) is not None:
        return DistanceResult(
            value=Fraction(0),
            attained=True,
            mode="bracketed",
            direction=v0,
            bracket=(Fraction(0), Fraction(0)),
            witness=decide(Fraction(0)),
            witness_parameter=Fraction(0),
        )
    hi = max(_diameter_bound(F, G, v0), Fraction(1)) + 1
    if decide(hi) is None:
        return DistanceResult(
            value=float("inf"), attained=None, mode="bracketed", direction=v0
        )
    lo = Fraction(0)
    while hi - lo > tol:
        mid = (lo + hi) / 2
        if decide(mid) is not None:
            hi = mid
        else:
            lo = mid
    return DistanceResult(
        value=hi,
        attained=None,
        mode="bracketed",
        direction=v0,
        bracket=(lo, hi),
        witness=decide(hi),
        witness_parameter=hi,
    )


# -- derived checks ---------------------------------------------------------------


def inter_probe(F: ArrModule, G: ArrModule, directions, budget: int = DEFAULT_BUDGET):
    """Decision outcome for each shift in directions; 'budget' marks an
    inconclusive search."""
    out = []
    for v in directions:
        try:
            w = is_interleaved(F, G, v, budget)
            out.append({"direction": as_vec(v), "interleaved": w is not None})
        except BudgetExceededError:
            out.append({"direction": as_vec(v), "interleaved": "budget"})
    return out


@dataclass
class IsometryRecord:
    ambient: DistanceResult
    stabilized: DistanceResult
    equal: bool


def isometry_check(
    F: ArrModule, G: ArrModule, v0, budget: int = DEFAULT_BUDGET
) -> IsometryRecord:
    """Distance between the modules versus distance between their corner
    stabilizations, in the same direction."""
    d1 = interleaving_distance(F, G, v0, budget=budget)
    d2 = interleaving_distance(
        beta_star(F).module, beta_star(G).module, v0, budget=budget
    )
    return IsometryRecord(ambient=d1, stabilized=d2, equal=d1.value == d2.value)
