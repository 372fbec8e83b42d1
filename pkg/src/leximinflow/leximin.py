"""The allocation mechanism: breakpoint computation and lexicographic flow.

The mechanism raises a rate parameter lambda and lets every agent absorb
supply at rate endowment x lambda until the objects it can reach are
exhausted.  Agents freeze in tiers: tier i is the (inclusion-maximal) set of
agents whose joint absorption becomes tight at the i-th distinct rate
lambda_i, together with the objects they exhaust.  Each agent's final utility
is endowment(a) x lambda(a), where lambda(a) is the rate its tier froze at;
the allocation itself is any max flow of the network whose source edges are
capped at exactly those amounts.

The per-tier rate is the minimum, over nonempty subsets of the remaining
agents, of joint residual capacity over joint endowment.  It is found without
subset enumeration by an iterated min-ratio-cut scheme: guess lambda, solve a
max flow, read the source-heavy minimum cut; either the cut certifies lambda
as the minimum ratio (and its agent side is the maximal tight set), or the
agent side yields a strictly smaller ratio to recurse on.  Each tier needs at
most |remaining agents| + 1 max-flow solves.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Mapping

from .core import (
    Allocation,
    Instance,
    InternalCheckError,
    InvalidInstanceError,
    capped_supply,
    validate_instance,
)
from .maxflow import FlowNetwork, max_flow, source_heavy_min_cut
from .rational import Rational, ZERO
from .reporting import PropertyReport, failing, passing

SOURCE = ("source",)
SINK = ("sink",)


def agent_vertex(agent: str) -> tuple:
    return ("agent", agent)


def object_vertex(obj: str) -> tuple:
    return ("object", obj)


@dataclass(frozen=True)
class BreakpointProfile:
    """Tier structure of an instance: rates, agent tiers, exhausted objects.

    ``lambdas`` is strictly increasing.  ``agent_tiers[i]`` / ``object_tiers[i]``
    are the *cumulative* sets through tier i+1 (0-based), so the last agent
    tier is the full agent set.  ``per_agent`` maps each agent to the rate its
    tier froze at.  ``residual_caps[i]`` maps each object not yet exhausted
    when tier i+1 started to its remaining absorbable supply.
    """

    lambdas: tuple[Rational, ...]
    agent_tiers: tuple[frozenset, ...]
    object_tiers: tuple[frozenset, ...]
    per_agent: Mapping[str, Rational]
    residual_caps: tuple[Mapping[str, Rational], ...]

    @property
    def k(self) -> int:
        return len(self.lambdas)

    def tier_of(self, agent: str) -> int:
        """0-based index of the tier the agent froze in."""
        for i, tier in enumerate(self.agent_tiers):
            if agent in tier:
                return i
        raise KeyError(agent)

    def new_agents(self, i: int) -> frozenset:
        """Agents that froze exactly at tier i (0-based)."""
        if i == 0:
            return self.agent_tiers[0]
        return self.agent_tiers[i] - self.agent_tiers[i - 1]

    def new_objects(self, i: int) -> frozenset:
        """Objects exhausted exactly at tier i (0-based)."""
        if i == 0:
            return self.object_tiers[0]
        return self.object_tiers[i] - self.object_tiers[i - 1]


@dataclass(frozen=True)
class TierView:
    """The still-active part of an instance when a tier starts: remaining
    agents, not-yet-exhausted objects, their residual capacities, and the
    demand entries among them."""

    agents: tuple[str, ...]
    objects: tuple[str, ...]
    caps: Mapping[str, Rational]
    demand: Mapping[tuple[str, str], Rational]

    def __post_init__(self):
        for b in self.objects:
            if self.caps[b] < ZERO:
                raise ValueError(f"negative residual capacity for object {b!r}: {self.caps[b]}")


def tier_capacity(view: TierView, agent_subset) -> Rational:
    """Joint absorbable supply of a subset of the view's agents: per object,
    the subset's demand capped by residual capacity."""
    subset = set(agent_subset)
    total = ZERO
    for b in view.objects:
        demand = ZERO
        for a in subset:
            demand += view.demand.get((a, b), ZERO)
        total += min(view.caps[b], demand)
    return total


def build_network(instance: Instance, source_caps: Mapping[str, Rational]) -> FlowNetwork:
    """Bipartite agent/object flow network of an instance.

    Source-to-agent capacities are the caller's (this is the parametric part);
    agent-to-object edges carry demand (zero-demand edges omitted); object-to-
    sink edges carry the demand-capped supply.
    """
    capped = capped_supply(instance)
    vertices = (
        [SOURCE]
        + [agent_vertex(a) for a in instance.agents]
        + [object_vertex(b) for b in instance.objects]
        + [SINK]
    )
    edges = [(SOURCE, agent_vertex(a), source_caps[a]) for a in instance.agents]
    edges += [
        (agent_vertex(a), object_vertex(b), d) for (a, b), d in sorted(instance.demand.items())
    ]
    edges += [(object_vertex(b), SINK, capped[b]) for b in instance.objects]
    return FlowNetwork(vertices=tuple(vertices), source=SOURCE, sink=SINK, edges=tuple(edges))


def _view_network(view: TierView, source_caps: Mapping[str, Rational]) -> FlowNetwork:
    vertices = (
        [SOURCE]
        + [agent_vertex(a) for a in view.agents]
        + [object_vertex(b) for b in view.objects]
        + [SINK]
    )
    edges = [(SOURCE, agent_vertex(a), source_caps[a]) for a in view.agents]
    edges += [
        (agent_vertex(a), object_vertex(b), d) for (a, b), d in sorted(view.demand.items())
    ]
    edges += [(object_vertex(b), SINK, view.caps[b]) for b in view.objects]
    return FlowNetwork(vertices=tuple(vertices), source=SOURCE, sink=SINK, edges=tuple(edges))


def min_ratio(view: TierView, endowments: Mapping[str, Rational]) -> tuple[Rational, frozenset]:
    """Minimum of capacity/endowment over nonempty agent subsets, with the
    maximal subset attaining it.

    Iterated min-ratio-cut: starting from the full-set ratio, each round solves
    one max flow at source caps endowment x lambda and reads the source-heavy
    minimum cut.  A cut of capacity endowment-total x lambda certifies lambda;
    otherwise the cut's agent side has a strictly smaller ratio, which becomes
    the next lambda.
    """
    if not view.agents:
        raise ValueError("min_ratio needs at least one agent")
    total_e = ZERO
    for a in view.agents:
        total_e += endowments[a]
    lam = tier_capacity(view, view.agents) / total_e
    rounds = 0
    while True:
        rounds += 1
        if rounds > len(view.agents) + 1:
            raise InternalCheckError("min-ratio iteration exceeded its bound")
        network = _view_network(view, {a: endowments[a] * lam for a in view.agents})
        flow = max_flow(network)
        cut = source_heavy_min_cut(network, flow)
        tight = frozenset(a for a in view.agents if agent_vertex(a) in cut.source_side)
        if cut.capacity == total_e * lam:
            return lam, tight
        if not tight:
            raise InternalCheckError("non-certifying cut with empty agent side")
        tight_e = ZERO
        for a in tight:
            tight_e += endowments[a]
        next_lam = tier_capacity(view, tight) / tight_e
        if next_lam >= lam:
            raise InternalCheckError("min-ratio iteration failed to decrease")
        lam = next_lam


def breakpoints(instance: Instance) -> BreakpointProfile:
    """Tier structure of an instance: peel off the maximal minimum-ratio agent
    set at each rate, mark the objects it exhausts, and recompute residual
    capacities for the rest."""
    violations = validate_instance(instance)
    if violations:
        raise InvalidInstanceError("; ".join(violations))
    capped = capped_supply(instance)
    remaining = list(instance.agents)
    exhausted: set = set()
    caps = dict(capped)
    fixed: set = set()
    lambdas: list[Rational] = []
    agent_tiers: list[frozenset] = []
    object_tiers: list[frozenset] = []
    per_agent: dict[str, Rational] = {}
    residual_caps: list[dict[str, Rational]] = []
    while remaining:
        active_objects = tuple(b for b in instance.objects if b not in exhausted)
        view = TierView(
            agents=tuple(remaining),
            objects=active_objects,
            caps={b: caps[b] for b in active_objects},
            demand={
                (a, b): d
                for (a, b), d in instance.demand.items()
                if a in set(remaining) and b not in exhausted
            },
        )
        residual_caps.append(dict(view.caps))
        lam, tier = min_ratio(view, instance.endowment)
        if not tier:
            raise InternalCheckError("empty tier")
        if lambdas and lam <= lambdas[-1]:
            raise InternalCheckError(
                f"rates must strictly increase, got {lambdas[-1]} then {lam}"
            )
        newly_exhausted = {
            b
            for b in active_objects
            if instance.group_demand(tier, b) > caps[b]
        }
        fixed |= tier
        exhausted |= newly_exhausted
        lambdas.append(lam)
        agent_tiers.append(frozenset(fixed))
        object_tiers.append(frozenset(exhausted))
        for a in tier:
            per_agent[a] = lam
        remaining = [a for a in remaining if a not in tier]
        for b in instance.objects:
            if b not in exhausted:
                caps[b] = capped[b] - instance.group_demand(fixed, b)
                if caps[b] < ZERO:
                    raise InternalCheckError(
                        f"negative residual capacity for non-exhausted object {b!r}"
                    )
    return BreakpointProfile(
        lambdas=tuple(lambdas),
        agent_tiers=tuple(agent_tiers),
        object_tiers=tuple(object_tiers),
        per_agent=per_agent,
        residual_caps=tuple(residual_caps),
    )


def lexicographic_allocation(instance: Instance) -> tuple[Allocation, BreakpointProfile]:
    """Run the mechanism: compute the tier structure, then a max flow with
    source edges capped at endowment x frozen-rate, and read the allocation off
    the agent-to-object flow.

    Self-checks (fatal on failure): the flow saturates every source edge and
    every capped-supply edge, i.e. its value equals both the total of
    endowment x rate and the total demand-capped supply.
    """
    profile = breakpoints(instance)
    capped = capped_supply(instance)
    source_caps = {
        a: instance.endowment[a] * profile.per_agent[a] for a in instance.agents
    }
    network = build_network(instance, source_caps)
    flow = max_flow(network)
    total_capped = ZERO
    for b in instance.objects:
        total_capped += capped[b]
    total_source = ZERO
    for a in instance.agents:
        total_source += source_caps[a]
    if flow.value != total_capped or flow.value != total_source:
        raise InternalCheckError(
            f"lexicographic flow value {flow.value} != capped supply {total_capped}"
            f" or != endowment-rate total {total_source}"
        )
    amounts = {}
    for (tail, head, _), f in zip(network.edges, flow.edge_flows):
        if tail[0] == "agent" and head[0] == "object" and f != ZERO:
            amounts[(tail[1], head[1])] = f
    return Allocation(amounts), profile


def structure_check(
    instance: Instance, allocation: Allocation, profile: BreakpointProfile
) -> PropertyReport:
    """Verify the exact structural identities a mechanism allocation must obey.

    (a) an agent frozen at tier i receives its full demand on every object
        never exhausted by tier i; (b) objects exhausted at tier i give nothing
        to agents frozen later; (c) objects exhausted by tier i are fully
        consumed by the agents of tiers <= i; (d) per tier, the total frozen
        absorption equals exhausted supply plus the frozen agents' demand on
        unexhausted objects.
    """
    name = "structure"
    capped = capped_supply(instance)
    all_objects = set(instance.objects)
    for i in range(profile.k):
        cum_agents = profile.agent_tiers[i]
        cum_objects = profile.object_tiers[i]
        for a in profile.new_agents(i):
            for b in all_objects - cum_objects:
                mu = allocation.amount_of(a, b)
                d = instance.demand_between(a, b)
                if mu != d:
                    return failing(
                        name, (a, b), mu, d,
                        note="unexhausted object must be served in full",
                    )
        for b in profile.new_objects(i):
            for a in instance.agents:
                if a not in cum_agents:
                    mu = allocation.amount_of(a, b)
                    if mu != ZERO:
                        return failing(
                            name, (a, b), mu, ZERO,
                            note="later agent served from an exhausted object",
                        )
        for b in cum_objects:
            got = ZERO
            for a in cum_agents:
                got += allocation.amount_of(a, b)
            if got != capped[b]:
                return failing(
                    name, (b,), got, capped[b],
                    note="exhausted object not fully consumed by its tiers",
                )
        lhs = ZERO
        for j in range(i + 1):
            tier_e = ZERO
            for a in profile.new_agents(j):
                tier_e += instance.endowment[a]
            lhs += tier_e * profile.lambdas[j]
        rhs = ZERO
        for b in cum_objects:
            rhs += instance.supply[b]
        for b in all_objects - cum_objects:
            rhs += instance.group_demand(cum_agents, b)
        if lhs != rhs:
            return failing(
                name, (f"tier {i + 1}",), lhs, rhs,
                note="absorption total != exhausted supply + outside demand",
            )
    return passing(name)
