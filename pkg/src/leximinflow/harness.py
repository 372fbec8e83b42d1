"""Cross-instance mechanism checks: monotonicity, substructure, manipulation.

Each check perturbs or restricts an instance, reruns the mechanism, and
compares exact utilities: supply increases must never hurt anyone, endowment
shrinks and departures must never hurt the unchanged agents, restrictions of
an output must stay optimal for the residual instance, and no small coalition
should profit from misreporting demands.  The manipulation search enumerates a
finite misreport grid, so absence of a counterexample is evidence within the
declared coverage, not a proof.
"""

from __future__ import annotations

import itertools
import random
from dataclasses import dataclass, field
from typing import Mapping, Optional, Sequence

from .core import (
    Allocation,
    Instance,
    InternalCheckError,
    sub_instance,
    utility,
    utility_vector,
)
from .leximin import BreakpointProfile, lexicographic_allocation, structure_check
from .oracle import oracle_breakpoints, oracle_mmf_si
from .rational import ONE, Rational, ZERO
from .reporting import PropertyReport, failing, passing

SUPPLY_INCREASE = "supply-increase"
ENDOWMENT_DECREASE = "endowment-decrease"
AGENT_REMOVAL = "agent-removal"

_SUPPLY_STEPS = (Rational(1, 4), Rational(1, 2), ONE, Rational(2))
_ENDOWMENT_FACTORS = (Rational(1, 4), Rational(1, 2), Rational(3, 4))


@dataclass(frozen=True)
class PerturbationSpec:
    """How to perturb an instance: which kind, fixed magnitudes or a seed.

    When ``magnitudes`` is given (per object for supply increases, per agent
    otherwise) the perturbation is applied once, deterministically.  Otherwise
    each trial draws a random nonempty subset and magnitudes from a small
    rational grid, seeded.
    """

    kind: str
    magnitudes: Optional[Mapping[str, Rational]] = None
    seed: int = 0

    def __post_init__(self):
        if self.kind not in (SUPPLY_INCREASE, ENDOWMENT_DECREASE, AGENT_REMOVAL):
            raise ValueError(f"unknown perturbation kind {self.kind!r}")


def _mechanism_utilities(instance: Instance) -> dict[str, Rational]:
    allocation, _ = lexicographic_allocation(instance)
    vector = utility_vector(instance, allocation)
    return {a: u for a, u, _ in vector.entries}


def check_rm(instance: Instance, spec: PerturbationSpec, trials: int) -> PropertyReport:
    """Supply increases must leave every agent at least as well off."""
    if spec.kind != SUPPLY_INCREASE:
        raise ValueError(f"supply-increase spec required, got {spec.kind!r}")
    base = _mechanism_utilities(instance)
    rng = random.Random(spec.seed)
    perturbations = []
    if spec.magnitudes is not None:
        perturbations.append(dict(spec.magnitudes))
    else:
        for _ in range(trials):
            if not instance.objects:
                break
            chosen = rng.sample(
                instance.objects, rng.randint(1, len(instance.objects))
            )
            perturbations.append({b: rng.choice(_SUPPLY_STEPS) for b in chosen})
    for bump in perturbations:
        raised = Instance(
            agents=instance.agents,
            endowment=instance.endowment,
            objects=instance.objects,
            supply={
                b: instance.supply[b] + bump.get(b, ZERO) for b in instance.objects
            },
            demand=instance.demand,
        )
        after = _mechanism_utilities(raised)
        for a in instance.agents:
            if after[a] < base[a]:
                return failing(
                    "resource-monotonic", (a,), after[a], base[a],
                    note=f"utility dropped after supply increase {bump}",
                    seed=spec.seed,
                )
    return passing("resource-monotonic", detail=f"{len(perturbations)} perturbations", seed=spec.seed)


def check_pm(instance: Instance, spec: PerturbationSpec, trials: int) -> PropertyReport:
    """Endowment decreases or departures must never hurt the unchanged agents."""
    if spec.kind not in (ENDOWMENT_DECREASE, AGENT_REMOVAL):
        raise ValueError(f"shrink spec required, got {spec.kind!r}")
    base = _mechanism_utilities(instance)
    rng = random.Random(spec.seed)
    shrinks: list[dict[str, Rational]] = []
    if spec.magnitudes is not None:
        shrinks.append(dict(spec.magnitudes))
    else:
        for _ in range(trials):
            if not instance.agents:
                break
            chosen = rng.sample(instance.agents, rng.randint(1, len(instance.agents)))
            if spec.kind == AGENT_REMOVAL:
                shrinks.append({a: ZERO for a in chosen})
            else:
                shrinks.append({a: rng.choice(_ENDOWMENT_FACTORS) for a in chosen})
    for factors in shrinks:
        removed = {a for a, f in factors.items() if f == ZERO}
        keep = [a for a in instance.agents if a not in removed]
        shrunk = Instance(
            agents=tuple(keep),
            endowment={
                a: instance.endowment[a] * factors.get(a, ONE) for a in keep
            },
            objects=instance.objects,
            supply=instance.supply,
            demand={k: v for k, v in instance.demand.items() if k[0] not in removed},
        )
        after = _mechanism_utilities(shrunk)
        for a in keep:
            if a in factors:
                continue
            if after[a] < base[a]:
                return failing(
                    "population-monotonic", (a,), after[a], base[a],
                    note=f"utility dropped after shrinking {sorted(factors)}",
                    seed=spec.seed,
                )
    return passing("population-monotonic", detail=f"{len(shrinks)} shrinks", seed=spec.seed)


def check_substructure(instance: Instance, trials: int, seed: int = 0) -> PropertyReport:
    """Removing agents with their share leaves an allocation that is still
    optimal for the residual instance.

    For random agent subsets, the mechanism's output restricted to the
    remaining agents must reproduce, agent by agent, the brute-force optimum
    of the residual instance.  Limited to 12 agents by the oracle.
    """
    if len(instance.agents) > 12:
        raise ValueError("substructure check relies on the subset-enumeration oracle (<= 12 agents)")
    allocation, _ = lexicographic_allocation(instance)
    rng = random.Random(seed)
    for _ in range(trials):
        removed = [a for a in instance.agents if rng.random() < 0.5]
        residual = sub_instance(instance, allocation, removed)
        if not residual.agents:
            continue
        expected = oracle_breakpoints(residual)
        for a in residual.agents:
            got = utility(allocation, residual, a)
            want = residual.endowment[a] * expected.per_agent[a]
            if got != want:
                return failing(
                    "substructure", (a,), got, want,
                    note=f"restriction not optimal after removing {sorted(removed)}",
                    seed=seed,
                )
    return passing("substructure", detail=f"{trials} subsets", seed=seed)


@dataclass(frozen=True)
class ManipulationReport:
    """One coalition misreport, classified.

    Utilities are always measured against the coalition's true demands; the
    reported demands enter only through the mechanism run.  A winner gained
    strictly, a loser lost strictly; the report is a counterexample to
    strategyproofness iff there is a winner and no loser.
    """

    coalition: tuple[str, ...]
    true_demands: Mapping[tuple[str, str], Rational]
    reported_demands: Mapping[tuple[str, str], Rational]
    truthful_utilities: Mapping[str, Rational]
    misreport_utilities: Mapping[str, Rational]
    winners: tuple[str, ...] = field(init=False)
    losers: tuple[str, ...] = field(init=False)

    def __post_init__(self):
        winners = []
        losers = []
        for a in self.coalition:
            if self.misreport_utilities[a] > self.truthful_utilities[a]:
                winners.append(a)
            elif self.misreport_utilities[a] < self.truthful_utilities[a]:
                losers.append(a)
        object.__setattr__(self, "winners", tuple(winners))
        object.__setattr__(self, "losers", tuple(losers))

    @property
    def is_counterexample(self) -> bool:
        return bool(self.winners) and not self.losers


@dataclass(frozen=True)
class SearchResult:
    """Outcome and coverage of one manipulation search.

    ``runs`` mechanism invocations actually performed out of ``space`` distinct
    non-identity misreports the grid spans; ``truncated`` marks an exhausted
    budget.
    """

    counterexample: Optional[ManipulationReport]
    runs: int
    space: int
    truncated: bool
    mechanism: str
    coalition_size: int


def _run_mechanism(instance: Instance, mechanism: str):
    if mechanism == "lmmf":
        return lexicographic_allocation(instance)
    if mechanism == "mmf-si":
        allocation, _ = oracle_mmf_si(instance)
        return allocation, None
    raise ValueError(f"unknown mechanism {mechanism!r}")


def _true_utility_floor(
    instance: Instance,
    reported: Instance,
    profile: BreakpointProfile,
    agent: str,
) -> Rational:
    """Lower bound on the agent's true utility over every allocation the
    mechanism could return for the reported instance.

    The tier structure forces full service on objects never exhausted by the
    agent's tier and forbids service from earlier tiers' objects; only the
    split across the agent's own tier objects is free, and its total is fixed
    by the agent's frozen rate.  The worst split fills valueless headroom
    first.
    """
    i = profile.tier_of(agent)
    own_tier_objects = profile.new_objects(i)
    outside = [b for b in reported.objects if b not in profile.object_tiers[i]]
    floor = ZERO
    budget = reported.endowment[agent] * profile.per_agent[agent]
    for b in outside:
        d_rep = reported.demand_between(agent, b)
        floor += min(d_rep, instance.demand_between(agent, b))
        budget -= d_rep
    headroom = ZERO
    for b in own_tier_objects:
        d_rep = reported.demand_between(agent, b)
        headroom += d_rep - min(d_rep, instance.demand_between(agent, b))
    if budget > headroom:
        floor += budget - headroom
    return floor


def _entry_values(instance: Instance, pair: tuple[str, str], grid, absolute: bool):
    a, b = pair
    true_value = instance.demand_between(a, b)
    values = {m * true_value for m in grid}
    if absolute:
        values |= {ZERO, instance.supply[b]}
    return sorted(values)


def search_manipulation(
    instance: Instance,
    coalition_size: int,
    demand_grid: Optional[Sequence[Rational]] = None,
    budget: int = 100_000,
    mechanism: str = "lmmf",
) -> SearchResult:
    """Look for a profitable coalition misreport over a finite demand grid.

    Every coalition of the given size is tried against every combination of
    per-entry reported values: each true demand d(a,b) scaled by each grid
    multiplier, plus (for the default grid) the pure reports 0 and the
    object's full supply.  The mechanism runs on the misreported instance;
    gains and losses are measured with true demands.  For the main mechanism a
    candidate hit is only reported if the gain survives for every allocation
    the reported instance admits (tie-breaking could otherwise fake a gain);
    the search stops, marked truncated, once ``budget`` mechanism runs are
    spent.
    """
    if not 1 <= coalition_size <= len(instance.agents):
        raise ValueError(
            f"coalition size must lie in [1, {len(instance.agents)}], got {coalition_size}"
        )
    if budget < 1:
        raise ValueError("budget must be at least 1 mechanism run")
    absolute = demand_grid is None
    grid = (
        (ZERO, Rational(1, 2), ONE, Rational(2))
        if demand_grid is None
        else tuple(Rational(m) for m in demand_grid)
    )
    for m in grid:
        if m < ZERO:
            raise ValueError(f"grid multipliers must be nonnegative, got {m}")

    truthful_alloc, _ = _run_mechanism(instance, mechanism)
    baseline = {a: utility(truthful_alloc, instance, a) for a in instance.agents}

    runs = 0
    space = 0
    truncated = False
    for coalition in itertools.combinations(instance.agents, coalition_size):
        pairs = [(a, b) for a in coalition for b in instance.objects]
        value_lists = [_entry_values(instance, p, grid, absolute) for p in pairs]
        coalition_space = 1
        for values in value_lists:
            coalition_space *= len(values)
        if all(
            instance.demand_between(*p) in values
            for p, values in zip(pairs, value_lists)
        ):
            coalition_space -= 1
        space += coalition_space
    for coalition in itertools.combinations(instance.agents, coalition_size):
        pairs = [(a, b) for a in coalition for b in instance.objects]
        value_lists = [_entry_values(instance, p, grid, absolute) for p in pairs]
        for combo in itertools.product(*value_lists):
            reported_entries = dict(zip(pairs, combo))
            if all(
                v == instance.demand_between(a, b)
                for (a, b), v in reported_entries.items()
            ):
                continue
            if runs >= budget:
                truncated = True
                break
            runs += 1
            reported = Instance(
                agents=instance.agents,
                endowment=instance.endowment,
                objects=instance.objects,
                supply=instance.supply,
                demand={
                    **{
                        k: v
                        for k, v in instance.demand.items()
                        if k[0] not in coalition
                    },
                    **reported_entries,
                },
            )
            misreport_alloc, misreport_profile = _run_mechanism(reported, mechanism)
            report = ManipulationReport(
                coalition=coalition,
                true_demands={
                    p: instance.demand_between(*p) for p in pairs
                },
                reported_demands=reported_entries,
                truthful_utilities={a: baseline[a] for a in coalition},
                misreport_utilities={
                    a: utility(misreport_alloc, instance, a) for a in coalition
                },
            )
            if not report.is_counterexample:
                continue
            if mechanism == "lmmf":
                verdict = structure_check(reported, misreport_alloc, misreport_profile)
                if not verdict.passed:
                    raise InternalCheckError(
                        f"misreport run violated its own structure: {verdict.witness}"
                    )
                floors = {
                    a: _true_utility_floor(instance, reported, misreport_profile, a)
                    for a in coalition
                }
                robust_win = any(floors[a] > baseline[a] for a in coalition)
                no_robust_loss = all(floors[a] >= baseline[a] for a in coalition)
                if not (robust_win and no_robust_loss):
                    continue
            return SearchResult(
                counterexample=report,
                runs=runs,
                space=space,
                truncated=truncated,
                mechanism=mechanism,
                coalition_size=coalition_size,
            )
        if truncated:
            break
    return SearchResult(
        counterexample=None,
        runs=runs,
        space=space,
        truncated=truncated,
        mechanism=mechanism,
        coalition_size=coalition_size,
    )
