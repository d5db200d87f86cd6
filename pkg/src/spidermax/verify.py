"""End-to-end verification: identities, weak-type bounds, extremal families.

Single-instance checks return an ``InequalityReport``; suite runners sweep
seeded random instances and are shared by the CLI and the test suite.
"""
from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from fractions import Fraction
from typing import Optional, Sequence

import numpy as np

from . import intervals as iv
from .constants import lp_operator_norm_constant, power_law_constant
from .covering import (filter_containments, multiplicity_audit, select,
                       union_traces)
from .filtration import (FiltrationUnion, FiniteProbSpace, PartitionChain,
                         Rv, canonical_partition, doob_maximal_float, doob_ratio)
from .maximal import (compute, compute_radially_decreasing,
                      level_measure_exact, operator_ratio,
                      restricted_integral_exact, superlevel_exact)
from .numeric import Real, number_to_json
from .spider import (Ball, StepFunction, integrate_over, level_measure,
                     lp_norm, restricted_integral)


@dataclass(frozen=True)
class InequalityReport:
    name: str
    instance: str
    lhs: Real
    rhs: Real
    ok: bool
    backend: str
    tolerance: Real = 0
    applicable: bool = True

    @property
    def slack(self) -> Real:
        return self.rhs - self.lhs

    def to_json(self) -> dict:
        return {"name": self.name, "instance": self.instance,
                "lhs": number_to_json(self.lhs), "rhs": number_to_json(self.rhs),
                "slack": number_to_json(self.slack), "ok": self.ok,
                "backend": self.backend,
                "tolerance": number_to_json(self.tolerance),
                "applicable": self.applicable}


# --------------------------------------------------------------------------
# single-instance checks
# --------------------------------------------------------------------------

def check_level_average_identity(f: StepFunction, s: Real) -> InequalityReport:
    """For radially decreasing f and a level below the top plateau:

    s ((k-1) m(|f|>s) + m(Mf>s)) = (k-1) int_{|f|>s} f + int_{Mf>s} f,

    exactly, provided m(Mf>s) < 1.  Outside the hypotheses both sides vanish
    (s above the sup) or the report is marked not applicable.
    """
    g = f.abs()
    if not g.is_radially_decreasing():
        raise ValueError("identity requires radially decreasing input")
    k = g.k
    name, inst = "level_average_identity", f"k={k} s={s}"
    if s >= g.max_value():
        # averages never exceed the sup, so both level sets are empty
        lhs = s * level_measure_exact(g, s, strict=True)
        rhs = restricted_integral_exact(g, s, strict=True)
        return InequalityReport(name, inst, lhs, rhs, lhs == 0 == rhs, "exact")
    mf_level = level_measure_exact(g, s, strict=True)
    if s <= 0 or mf_level >= 1:
        return InequalityReport(name, inst, 0, 0, True, "exact", applicable=False)
    f_level = sum((iv.total_length(r) for r in g.superlevel(s, strict=True)),
                  Fraction(0)) / k
    lhs = s * ((k - 1) * f_level + mf_level)
    rhs = (k - 1) * integrate_over(g, g.superlevel(s, strict=True)) \
        + restricted_integral_exact(g, s, strict=True)
    return InequalityReport(name, inst, lhs, rhs, lhs == rhs, "exact")


def weak_type_coefficient(k: int) -> int:
    """Multiplier of the |f|-level terms: one less than the overlap bound.

    The greedy cover overlaps at most k times for k >= 2; a single segment
    keeps the classical overlap 2, so k = 1 uses coefficient 1 (with
    coefficient 0 the bound is false: a two-sided bump at an interior point
    behaves like a two-ray hub).
    """
    return max(k - 1, 1)


def check_weak_type(f: StepFunction, s: Real, backend: str = "exact",
                    tolerance: float = 1e-9) -> InequalityReport:
    """s m(Mf>s) + s c_k m(|f|>s) <= int_{Mf>s}|f| + c_k int_{|f|>s}|f|.

    c_k = k-1 for k >= 2 and 1 for k = 1 (classical single-segment form).
    """
    if s <= 0:
        raise ValueError("need s > 0")
    g = f.abs()
    k = g.k
    ck = weak_type_coefficient(k)
    name, inst = "weak_type", f"k={k} s={s}"
    if backend == "exact":
        if not g.is_exact():
            raise ValueError("exact backend needs rational data")
        m_mf = level_measure_exact(g, s, strict=True)
        m_f = sum((iv.total_length(r) for r in g.superlevel(s, strict=True)),
                  Fraction(0)) / k
        lhs = s * m_mf + s * ck * m_f
        rhs = restricted_integral_exact(g, s, strict=True) \
            + ck * integrate_over(g, g.superlevel(s, strict=True))
        return InequalityReport(name, inst, lhs, rhs, lhs <= rhs, "exact")
    mf = compute(g)
    sf = float(s)
    lhs = sf * level_measure(mf, sf) + sf * ck * level_measure(g, sf)
    rhs = restricted_integral(mf, g, sf) \
        + ck * integrate_over(g, g.superlevel(sf, strict=True))
    return InequalityReport(name, inst, lhs, rhs, lhs <= rhs + tolerance,
                            "float", tolerance)


def check_lp_polynomial_bound(f: StepFunction, p: float,
                              tolerance: float = 1e-9) -> InequalityReport:
    """(p-1) rho^p - p rho^(p-1) - (k-1) <= 0 for rho = ||Mf||_p / ||f||_p."""
    rho = operator_ratio(f, p)
    value = rho ** (p - 1) * ((p - 1) * rho - p) - (f.k - 1)
    return InequalityReport("lp_polynomial_bound", f"k={f.k} p={p}",
                            value, 0.0, value <= tolerance, "float", tolerance)


# --------------------------------------------------------------------------
# extremal construction
# --------------------------------------------------------------------------

def delta_for_epsilon(r: float, k: int, eps: float) -> float:
    """Smallest scale ratio for which the rescaled-ball average estimate

    average over (x B_j) >= (lam - eps) * |y|^(-r)  for |y| in (delta |x|, |x|]

    holds; the boundary case |y| = delta |x| solves in closed form."""
    lam = power_law_constant(r, k).value
    if not 0 < eps < lam:
        raise ValueError("need 0 < eps < lam")
    delta = ((lam - eps) / lam) ** (1 / r)
    assert lam * delta ** r >= lam - eps - 1e-12
    return delta


def _cell_average_power(lo: float, hi: float, r: float) -> float:
    """Average of pos^(-r) over [lo, hi) via the exact antiderivative."""
    if lo == 0.0:
        return hi ** (-r) / (1 - r)
    return (hi ** (1 - r) - lo ** (1 - r)) / ((1 - r) * (hi - lo))


def _depth(x: float, delta: float, N: int) -> int:
    """Largest m in [-1, N-1] with delta^m >= x (float-snapped)."""
    if x > 1.0:
        return -1
    m = min(N - 1, int(math.floor(math.log(x) / math.log(delta) + 1e-9)))
    while m >= 0 and delta ** m < x * (1 - 1e-12):
        m -= 1
    while m + 1 <= N - 1 and delta ** (m + 1) >= x * (1 - 1e-12):
        m += 1
    return m


class PowerLawInstance:
    """Atomic model of the power-law extremal construction.

    Atoms are the arrangement cells of the nested rescaled balls plus a
    lumped core below ``eta``; xi carries exact cell averages of pos^(-r);
    chain j refines along the nested balls around ray j.
    """

    def __init__(self, r: float, k: int, delta: float, N: int,
                 eta: Optional[float] = None):
        if not 0 < r < 1 or not 0 < delta < 1 or N < 1 or k < 1:
            raise ValueError("need r, delta in (0,1), N >= 1, k >= 1")
        if eta is None:
            eta = delta ** (N + 1)
        if not 0 < eta < delta ** N:
            raise ValueError("need 0 < eta < delta^N")
        self.r, self.k, self.delta, self.N, self.eta = r, k, delta, N, eta
        lam = power_law_constant(r, k).value
        self.lam = lam
        q = lam ** (-1 / r)
        self.q = q

        cuts = {1.0, eta}
        for m in range(N):
            d = delta ** m
            if d > eta:
                cuts.add(d)
            if k > 1 and q * d > eta:
                cuts.add(q * d)
        cut_list = sorted(cuts)
        edges = [0.0] + cut_list  # cells [edges[i], edges[i+1])

        probs, values, rays, clo, chi = [], [], [], [], []
        for ray in range(k):
            for lo, hi in zip(edges, edges[1:]):
                probs.append((hi - lo) / k)
                values.append(_cell_average_power(lo, hi, r))
                rays.append(ray)
                clo.append(lo)
                chi.append(hi)
        self.probs = np.asarray(probs)
        self.values = np.asarray(values)
        self.ray_of = np.asarray(rays)
        self.cell_hi = np.asarray(chi)
        self.n = len(probs)

        # depth of the innermost nested ball containing each atom, per chain
        self.depth = np.empty((k, self.n), dtype=np.int64)
        for j in range(k):
            for a in range(self.n):
                x = self.cell_hi[a] if self.ray_of[a] == j else self.cell_hi[a] / q
                self.depth[j, a] = _depth(x, delta, N)

    def chain_labels(self, j: int) -> list[np.ndarray]:
        """Partition label arrays for chain j, levels n = 1..N (refining)."""
        out = []
        d = self.depth[j]
        for n in range(1, self.N + 1):
            out.append(np.minimum(d, n - 1) + 1)  # -1 (outside) -> 0
        return out

    def all_labels(self) -> list[np.ndarray]:
        return [lab for j in range(self.k) for lab in self.chain_labels(j)]

    def as_filtration(self) -> tuple[FiniteProbSpace, Rv, FiltrationUnion]:
        space = FiniteProbSpace(tuple(float(p) for p in self.probs))
        xi = Rv(tuple(float(v) for v in self.values))
        chains = []
        for j in range(self.k):
            parts = []
            for labels in self.chain_labels(j):
                blocks: dict[int, list[int]] = {}
                for a, lab in enumerate(labels):
                    blocks.setdefault(int(lab), []).append(a)
                parts.append(canonical_partition(blocks.values()))
            chains.append(PartitionChain(tuple(parts)))
        return space, xi, FiltrationUnion(tuple(chains))

    def maximal_vector(self) -> np.ndarray:
        """Atomwise max of the conditional expectations over all chains.

        Uses the nested structure: for an atom at ball depth d of chain j,
        the candidates are the prefix-maximal nested-ball average up to
        depth d, the surrounding annulus average (levels beyond d+1), and
        the exterior average (atoms outside the outermost ball).  Equals
        the generic partition-by-partition maximum.
        """
        weighted = self.probs * self.values
        best = np.zeros(self.n)
        for j in range(self.k):
            d = self.depth[j]
            nlev = self.N
            # masses and integrals of nested balls by depth: histogram over
            # depths, then suffix sums (ball m = all atoms of depth >= m)
            mass_hist = np.bincount(d + 1, weights=self.probs, minlength=nlev + 1)
            int_hist = np.bincount(d + 1, weights=weighted, minlength=nlev + 1)
            ball_mass = np.cumsum(mass_hist[::-1])[::-1][1:nlev + 1]
            ball_int = np.cumsum(int_hist[::-1])[::-1][1:nlev + 1]
            ball_avg = np.abs(ball_int / ball_mass)
            ball_best = np.maximum.accumulate(ball_avg)
            # annulus and exterior block averages
            out_mask = d < 0
            if out_mask.any():
                ext_avg = abs(weighted[out_mask].sum() / self.probs[out_mask].sum())
            else:
                ext_avg = 0.0
            cand = np.zeros(self.n)
            inner = np.minimum(d, nlev - 1)
            inside = d >= 0
            cand[inside] = ball_best[inner[inside]]
            if out_mask.any():
                cand[out_mask] = np.maximum(cand[out_mask], ext_avg)
            ann = d <= nlev - 2
            both = ann & inside
            if both.any():
                ann_mass = ball_mass.copy()
                ann_int = ball_int.copy()
                ann_mass[:-1] -= ball_mass[1:]
                ann_int[:-1] -= ball_int[1:]
                ann_avg = np.abs(np.where(ann_mass > 0, ann_int / np.maximum(ann_mass, 1e-300), 0.0))
                cand[both] = np.maximum(cand[both], ann_avg[d[both]])
            np.maximum(best, cand, out=best)
        return best

    def doob_ratio(self, p: float, method: str = "auto") -> float:
        """Equals the generic route on the same instance."""
        if method == "generic":
            mg = doob_maximal_float(self.probs, self.values, self.all_labels())
        else:
            mg = self.maximal_vector()
        num = float(np.dot(self.probs, np.abs(mg) ** p)) ** (1 / p)
        den = float(np.dot(self.probs, np.abs(self.values) ** p)) ** (1 / p)
        return num / den


def build_power_law_instance(r: float, k: int, delta: float, N: int,
                             eta: Optional[float] = None
                             ) -> tuple[FiniteProbSpace, Rv, FiltrationUnion]:
    """Finite model ready for the generic Doob-ratio machinery."""
    return PowerLawInstance(r, k, delta, N, eta).as_filtration()


# --------------------------------------------------------------------------
# sharpness sweep for the maximal operator
# --------------------------------------------------------------------------

def power_law_step(r: float, k: int, grid_points: int,
                   x_min: float) -> StepFunction:
    """Geometric-grid discretization of pos^(-r), truncated below x_min."""
    if grid_points < 2 or not 0 < x_min < 1:
        raise ValueError("need >= 2 grid points and x_min in (0,1)")
    ratio = (1.0 / x_min) ** (1.0 / (grid_points - 1))
    grid = [x_min * ratio ** i for i in range(grid_points - 1)] + [1.0]
    bps = [0.0] + grid
    vals = [_cell_average_power(lo, hi, r) for lo, hi in zip(bps, bps[1:])]
    return StepFunction.radial(k, tuple(bps), tuple(vals))


@dataclass(frozen=True)
class SharpnessRow:
    r: float
    lam: float
    ratio: float
    c_pk: float

    @property
    def gap(self) -> float:
        return self.c_pk - self.ratio

    def csv(self) -> str:
        return f"{self.r},{self.lam},{self.ratio},{self.c_pk},{self.gap}"


DEFAULT_SWEEP_XMIN = 1e-56


def sharpness_sweep(p: float, k: int, r_list: Sequence[float],
                    grid_points: int = 2000,
                    x_min: float = DEFAULT_SWEEP_XMIN) -> list[SharpnessRow]:
    """Operator ratios of discretized power functions, approaching C(p,k)."""
    if any(r >= 1 / p for r in r_list):
        raise ValueError("need every r < 1/p")
    C = lp_operator_norm_constant(p, k).value
    rows = []
    for r in r_list:
        lam = power_law_constant(r, k).value
        f = power_law_step(r, k, grid_points, x_min)
        rows.append(SharpnessRow(r, lam, operator_ratio(f, p), C))
    return rows


# --------------------------------------------------------------------------
# random instances and suite runners
# --------------------------------------------------------------------------

def random_step_function(rng: random.Random, k: int, max_pieces: int = 5,
                         denominator: int = 24, value_den: int = 4,
                         value_max: int = 12) -> StepFunction:
    rays = []
    for _ in range(k):
        n = rng.randint(1, max_pieces)
        cuts = sorted(rng.sample(range(1, denominator), n - 1)) if n > 1 else []
        bps = [Fraction(0)] + [Fraction(c, denominator) for c in cuts] + [Fraction(1)]
        vals = [Fraction(rng.randint(0, value_max), value_den) for _ in range(n)]
        rays.append((tuple(bps), tuple(vals)))
    return StepFunction(k, tuple(rays))


def random_radially_decreasing(rng: random.Random, k: int,
                               max_pieces: int = 8,
                               denominator: int = 48) -> StepFunction:
    n = rng.randint(2, max_pieces)
    cuts = sorted(rng.sample(range(1, denominator), n - 1))
    bps = [Fraction(0)] + [Fraction(c, denominator) for c in cuts] + [Fraction(1)]
    vals = sorted((Fraction(rng.randint(0, 64), 8) for _ in range(n)), reverse=True)
    return StepFunction.radial(k, tuple(bps), tuple(vals))


def random_ball(rng: random.Random, k: int, denominator: int = 40) -> Ball:
    ray = rng.randint(1, k)
    if rng.random() < 0.5:
        a, b = sorted(rng.sample(range(0, denominator + 1), 2))
        return Ball.interval(ray, Fraction(a, denominator), Fraction(b, denominator))
    b = Fraction(rng.randint(1, denominator), denominator)
    t = Fraction(rng.randint(0, int(b * denominator)), denominator)
    return Ball.star(ray, b, t)


def run_lemma_suite(count: int = 200, levels: int = 10, seed: int = 0,
                    k_choices: Sequence[int] = (1, 2, 3, 4)) -> list[InequalityReport]:
    rng = random.Random(seed)
    reports = []
    for _ in range(count):
        k = rng.choice(list(k_choices))
        f = random_radially_decreasing(rng, k)
        top = f.max_value()
        bottom = compute_radially_decreasing(f).value_at(1, Fraction(1))
        if top == bottom:
            continue
        for _ in range(levels):
            s = bottom + Fraction(rng.randint(1, 255), 256) * (top - bottom)
            reports.append(check_level_average_identity(f, s))
    return reports


def run_weaktype_suite(count: int = 1000, seed: int = 0,
                       k_choices: Sequence[int] = (1, 2, 3, 4, 5),
                       backend: str = "exact") -> list[InequalityReport]:
    rng = random.Random(seed)
    reports = []
    for _ in range(count):
        k = rng.choice(list(k_choices))
        f = random_step_function(rng, k)
        if f.max_value() == 0:
            continue
        s = Fraction(rng.randint(1, 255), 256) * f.max_value() * Fraction(5, 4)
        if s == 0:
            continue
        reports.append(check_weak_type(f, s, backend=backend))
    return reports


def run_doob_suite(count: int = 300, seed: int = 0, p_choices=(1.5, 2.0, 3.0),
                   tolerance: float = 1e-9) -> list[InequalityReport]:
    """Random unions on random small spaces: ratio <= C(p, k)."""
    rng = random.Random(seed)
    reports = []
    for _ in range(count):
        n = rng.randint(2, 5)
        k = rng.randint(1, 3)
        weights = [rng.randint(1, 9) for _ in range(n)]
        total = sum(weights)
        space = FiniteProbSpace(tuple(Fraction(w, total) for w in weights))
        xi = Rv(tuple(rng.randint(-9, 9) for _ in range(n)))
        if all(v == 0 for v in xi.values):
            continue
        chains = []
        for _ in range(k):
            length = rng.randint(1, 3)
            chain = [_random_partition(rng, n)]
            for _ in range(length - 1):
                chain.append(_random_refinement(rng, chain[-1]))
            chains.append(PartitionChain(tuple(chain)))
        union = FiltrationUnion(tuple(chains))
        p = rng.choice(list(p_choices))
        ratio = doob_ratio(space, xi, union, p)
        bound = lp_operator_norm_constant(p, k).value
        reports.append(InequalityReport(
            "doob_ratio", f"n={n} k={k} p={p}", ratio, bound,
            ratio <= bound + tolerance, "float", tolerance))
    return reports


def _random_partition(rng: random.Random, n: int):
    labels = [rng.randrange(n) for _ in range(n)]
    blocks: dict[int, list[int]] = {}
    for a, lab in enumerate(labels):
        blocks.setdefault(lab, []).append(a)
    return canonical_partition(blocks.values())


def _random_refinement(rng: random.Random, part):
    blocks = []
    for block in part:
        if len(block) > 1 and rng.random() < 0.6:
            cut = rng.randint(1, len(block) - 1)
            shuffled = list(block)
            rng.shuffle(shuffled)
            blocks.append(shuffled[:cut])
            blocks.append(shuffled[cut:])
        else:
            blocks.append(list(block))
    return canonical_partition(blocks)


@dataclass
class TailSuiteResult:
    instances: int = 0
    violations: list = field(default_factory=list)
    worst_slack: Optional[Real] = None
    ratio_checks: int = 0
    ratio_violations: list = field(default_factory=list)
    max_ratio_excess: float = -1.0

    @property
    def ok(self) -> bool:
        return not self.violations and not self.ratio_violations

    def to_json(self) -> dict:
        return {"instances": self.instances, "ok": self.ok,
                "violations": len(self.violations),
                "worst_slack": number_to_json(self.worst_slack)
                if self.worst_slack is not None else None,
                "ratio_checks": self.ratio_checks,
                "ratio_violations": len(self.ratio_violations),
                "max_ratio_excess": self.max_ratio_excess}


def tenths_probabilities(n: int) -> tuple[Fraction, ...]:
    """A fixed generic probability vector with all masses in tenths."""
    base = {1: (10,), 2: (3, 7), 3: (2, 3, 5), 4: (1, 2, 3, 4)}[n]
    return tuple(Fraction(w, 10) for w in base)


def run_tail_suite(atoms: int = 4, k: int = 3, max_len: int = 2,
                   xi_count: int = 50, seed: int = 0,
                   p_list: Sequence[float] = (),
                   tolerance: float = 1e-9) -> TailSuiteResult:
    """Exhaustive tail-domination (and optional Doob-ratio) verification.

    Every union of ``k`` refining chains of length <= ``max_len`` on the
    fixed tenths probability space with ``atoms`` atoms is checked, exactly,
    against a shared pool of ``xi_count`` random integer-valued variables.
    """
    from .filtration import (FiniteProbSpace, Rv, TailChecker,
                             atomic_lp_norm, enumerate_unions)

    rng = random.Random(seed)
    space = FiniteProbSpace(tenths_probabilities(atoms))
    xis = []
    for _ in range(xi_count):
        values = tuple(rng.randint(-9, 9) for _ in range(atoms))
        if any(values):
            xis.append(Rv(values))
    checkers = [TailChecker(space, xi, k) for xi in xis]
    bounds = {p: lp_operator_norm_constant(p, k).value for p in p_list}
    norms = [{p: atomic_lp_norm(space, xi, p) for p in p_list} for xi in xis]

    probs_f = [float(q) for q in space.probs]
    result = TailSuiteResult()
    # distinct maximal vectors recur across unions; memoize per variable
    memo: list[dict] = [{} for _ in checkers]
    for union in enumerate_unions(space, k, max_len):
        for ci, checker in enumerate(checkers):
            mg = checker.maximal_values(union)
            cached = memo[ci].get(mg)
            if cached is None:
                rep = checker.check_values(mg)
                mgf = [float(v) for v in mg]
                ratios = tuple(
                    math.fsum(q * v ** p for q, v in zip(probs_f, mgf)) ** (1 / p)
                    / norms[ci][p] for p in p_list)
                cached = (rep, ratios)
                memo[ci][mg] = cached
            rep, ratios = cached
            result.instances += 1
            if result.worst_slack is None or (rep.slack is not None
                                              and rep.slack < result.worst_slack):
                result.worst_slack = rep.slack
            if not rep.ok:
                result.violations.append((xis[ci].values, union, rep))
            for p, ratio in zip(p_list, ratios):
                excess = ratio - bounds[p]
                result.ratio_checks += 1
                if excess > result.max_ratio_excess:
                    result.max_ratio_excess = excess
                if excess > tolerance:
                    result.ratio_violations.append(
                        (xis[ci].values, union, p, ratio))
    return result


def run_covering_suite(count: int = 1000, seed: int = 0,
                       k_choices: Sequence[int] = (2, 3, 4),
                       max_balls: int = 30) -> list[InequalityReport]:
    rng = random.Random(seed)
    reports = []
    for _ in range(count):
        k = rng.choice(list(k_choices))
        fam = filter_containments(
            [random_ball(rng, k) for _ in range(rng.randint(1, max_balls))], k)
        res = select(fam, k)
        union_ok = union_traces(res.selected, k) == union_traces(fam, k)
        mult, _ = multiplicity_audit(res.selected, k)
        parity_ok = _parity_disjoint(res)
        ok = union_ok and mult <= k and parity_ok
        reports.append(InequalityReport(
            "covering", f"k={k} balls={len(fam)}", mult, k, ok, "exact"))
    return reports


def _parity_disjoint(result) -> bool:
    for seq in result.per_ray_sequences:
        for parity in (0, 1):
            traces = [t for _, t in seq[parity::2]]
            for x in range(len(traces)):
                for y in range(x + 1, len(traces)):
                    lo = max(traces[x][0], traces[y][0])
                    hi = min(traces[x][1], traces[y][1])
                    if lo < hi:
                        return False
    return True
