"""Reporting behavior of self-interested agents facing a learned system.

An agent holds a true full membership, pays a per-attribute disclosure
cost, and chooses which truthful masking of that membership to report.
Utility is measured either from what the interface displays (the
certificate gains a client actually sees) or from an oracle's view (true
group-conditional risk on held-out data).  Because every surviving option
is certified to strictly improve on its parent, displayed utility never
decreases along a surviving chain — so at zero cost, reporting everything
is always among the best responses.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from typing import Iterable, Sequence

from .assembly import ParticipatorySystem
from .dataset import Dataset, ReportingGroup, restrict_to, truthful_options
from .errors import ConfigError, NonTruthfulReport, UndefinedMetric
from .models import predict_scores

__all__ = [
    "AgentProfile",
    "agent_utility",
    "best_report",
    "participation_profile",
    "make_population",
]

UTILITY_MODES = ("displayed", "oracle")


@dataclass(frozen=True)
class AgentProfile:
    """One agent: a true full membership, a disclosure cost, a utility lens."""

    group: ReportingGroup
    cost_per_attribute: float = 0.0
    mode: str = "displayed"

    def __post_init__(self):
        if not self.group.is_full:
            raise ConfigError("agents hold full memberships")
        if self.mode not in UTILITY_MODES:
            raise ConfigError(f"unknown utility mode {self.mode!r}")
        if not (self.cost_per_attribute >= 0.0 or math.isinf(self.cost_per_attribute)):
            raise ConfigError("disclosure cost must be non-negative")


def _disclosure_cost(profile: AgentProfile, report: ReportingGroup) -> float:
    # guard the 0 * inf case: reporting nothing costs nothing at any price
    if report.n_reported == 0:
        return 0.0
    return profile.cost_per_attribute * report.n_reported


def _advertised_gain(system: ParticipatorySystem, node: ReportingGroup) -> float:
    total = 0.0
    for step in system.tree.path_to(node)[1:]:
        cert = system.certificates.get(step)
        if cert is not None and cert.gain is not None:
            total += cert.gain
    return total


def agent_utility(
    system: ParticipatorySystem,
    profile: AgentProfile,
    report: ReportingGroup,
    data: Dataset | None = None,
    policy: str = "truthful",
) -> float:
    """Benefit minus disclosure cost of filing this report.

    displayed: the sum of certificate gains along the served chain — what
    the interface promises.  oracle: the true risk drop the dispatched
    model delivers on the agent's group in held-out data.  Opting out is
    worth exactly zero under both lenses.
    """
    if not profile.group.refines(report):
        raise NonTruthfulReport(
            f"report {report.entries} is not a masking of {profile.group.entries}"
        )
    node = system.dispatch(report, policy)
    if profile.mode == "displayed":
        benefit = _advertised_gain(system, node)
    else:
        if data is None:
            raise ConfigError("oracle utility needs held-out data")
        rows = restrict_to(data, profile.group)
        if rows.n == 0:
            raise UndefinedMetric(f"no rows for group {profile.group.entries}")
        if not system.metric.defined_on(rows.labels):
            raise UndefinedMetric("metric undefined on this group's rows")
        served = system.models[system.model_ids[node]]
        root = system.root_model
        benefit = system.metric.risk(
            predict_scores(root, rows), rows.labels
        ) - system.metric.risk(predict_scores(served, rows), rows.labels)
    return benefit - _disclosure_cost(profile, report)


def best_report(
    system: ParticipatorySystem,
    profile: AgentProfile,
    data: Dataset | None = None,
    policy: str = "truthful",
) -> tuple[ReportingGroup, float]:
    """The utility-maximizing truthful report; ties favor disclosing less.

    Enumerates every masking of the agent's membership, so it is exact
    for the attribute counts this toolkit supports.
    """
    best: tuple[ReportingGroup, float] | None = None
    for option in truthful_options(profile.group):
        utility = agent_utility(system, profile, option, data, policy)
        if (
            best is None
            or utility > best[1] + 1e-12
            or (
                abs(utility - best[1]) <= 1e-12
                and option.n_reported < best[0].n_reported
            )
        ):
            best = (option, utility)
    assert best is not None
    return best


def make_population(
    data: Dataset, cost_per_attribute: float = 0.0, mode: str = "displayed"
) -> tuple[AgentProfile, ...]:
    """One agent per data row, holding that row's full membership."""
    return tuple(
        AgentProfile(
            group=data.full_group_of_row(i),
            cost_per_attribute=cost_per_attribute,
            mode=mode,
        )
        for i in range(data.n)
    )


def participation_profile(
    system: ParticipatorySystem,
    agents: Sequence[AgentProfile],
    costs: Iterable[float],
    data: Dataset | None = None,
    policy: str = "truthful",
) -> list[dict]:
    """Sweep disclosure costs and record how much the population reports.

    For each cost level, every agent re-solves its best response at that
    price.  Returns one row per cost: participation rate (any attribute
    reported), mean fraction of attributes reported, and mean utility.
    Infinite cost models an impossible-to-satisfy disclosure burden and
    must drive participation to zero.
    """
    if not agents:
        raise ConfigError("participation profile needs at least one agent")
    k = system.schema.k
    # agents' best responses depend only on (group, cost, mode); cache them
    out = []
    for cost in costs:
        cache: dict[tuple, tuple[ReportingGroup, float]] = {}
        participating = 0
        reported = 0.0
        utility = 0.0
        for agent in agents:
            priced = AgentProfile(agent.group, cost, agent.mode)
            key = (agent.group.entries, agent.mode)
            if key not in cache:
                cache[key] = best_report(system, priced, data, policy)
            report, u = cache[key]
            participating += report.n_reported > 0
            reported += report.n_reported / k
            utility += u
        n = len(agents)
        out.append(
            {
                "cost": cost,
                "participation": participating / n,
                "mean_reported_fraction": reported / n,
                "mean_utility": utility / n,
            }
        )
    return out
