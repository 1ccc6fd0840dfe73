"""Exhaustive and sampled property suites for the reduction, admissibility
and causal-correlation theorems, plus the flow-inside-superflow claim."""

from __future__ import annotations

import math
import random
from dataclasses import dataclass, field
from typing import Iterator

from . import digraph as dg
from .correlations import validate_theorem3
from .digraph import Digraph
from .enumeration import all_digraphs
from .flow import build_flow
from .model import (
    CausalModel,
    SpaceSpec,
    Table,
    _signaling_parents,
    derive_causal_structure,
    enumerate_models,
    is_consistent,
    reduce,
)
from .superflow import build_superflow, certify_causal_only, is_superflow_of


@dataclass
class SuiteReport:
    name: str
    graphs: int = 0
    models: int = 0
    checks: int = 0
    failures: list = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.failures

    def summary(self) -> str:
        verdict = "PASS" if self.ok else "FAIL"
        return (f"{self.name}: {verdict} graphs={self.graphs} models={self.models} "
                f"checks={self.checks} failures={len(self.failures)}")


def _random_faithful_table(rng, v, parents, spaces, tries=64):
    size = math.prod(spaces.out_card(p) for p in parents)
    for _ in range(tries):
        t = Table(parents, tuple(rng.randrange(spaces.in_card(v)) for _ in range(size)))
        if len(_signaling_parents(t, spaces)) == len(parents):
            return t
    return None


def sample_models(d: Digraph, spaces: SpaceSpec, count: int, rng) -> Iterator[CausalModel]:
    """Random faithful models on ``d`` (duplicates possible)."""
    for _ in range(count):
        params = []
        for v in d.vertices:
            t = _random_faithful_table(rng, v, dg.sorted_parents(d, v), spaces)
            if t is None:
                break
            params.append((v, t))
        else:
            yield CausalModel(d, spaces, tuple(params))


def suite_models(n_max=3, sample_n=4, sample_graphs=60, sample_models_per_graph=200, seed=0):
    """Yield ``(digraph, faithful model)`` pairs: every faithful binary model on
    every labeled digraph with at most ``n_max`` vertices, then a random sample
    of graphs and models with ``sample_n`` vertices (skipped when ``sample_n`` is
    ``None`` or not above ``n_max``)."""
    for n in range(1, n_max + 1):
        for d in all_digraphs(n):
            spaces = SpaceSpec.uniform(d.vertices)
            for item in enumerate_models(d, spaces, only_faithful=True):
                yield d, item.model
    if sample_n is None or sample_n <= n_max:
        return
    rng = random.Random(seed)
    # acyclic graphs are covered exhaustively by smaller n in spirit; cycles are where the theorems bite
    pool = list(all_digraphs(sample_n, ("cyclic",)))
    for d in rng.sample(pool, min(sample_graphs, len(pool))):
        spaces = SpaceSpec.uniform(d.vertices)
        for m in sample_models(d, spaces, sample_models_per_graph, rng):
            yield d, m


def run_suites(n_max=3, sample_n=4, seed=0, **kw) -> dict[str, SuiteReport]:
    """Run the reduction, admissibility and flow-inside-superflow checks over
    the same model population."""
    thm1 = SuiteReport("theorem1-reduction")
    thm2 = SuiteReport("theorem2-admissibility")
    sub = SuiteReport("flow-in-superflow")
    superflows: dict[Digraph, object] = {}
    last = None
    for d, m in suite_models(n_max, sample_n, seed=seed, **kw):
        if d != last:
            for r in (thm1, thm2, sub):
                r.graphs += 1
            last = d
        if not is_consistent(m):
            continue
        for r in (thm1, thm2, sub):
            r.models += 1
        thm2.checks += 1
        if not dg.is_soc(d):
            thm2.failures.append(m)
        for s in dg.sorted_sources(d):
            for o in range(m.spaces.out_card(s)):
                red = reduce(m, s, o)
                thm1.checks += 1
                eq4 = dg.remove_vertex(d, s)
                derived = derive_causal_structure(red.spaces, red.params)
                if not is_consistent(red) or not set(derived.edges) <= set(eq4.edges):
                    thm1.failures.append((m, s, o))
        if d not in superflows:
            superflows[d] = build_superflow(d)
        sub.checks += 1
        if not is_superflow_of(superflows[d], build_flow(m, check=False)):
            sub.failures.append(m)
    return {r.name: r for r in (thm1, thm2, sub)}


def two_cycle_admits_nothing() -> SuiteReport:
    report = SuiteReport("two-cycle-binary")
    d = Digraph("AB", [("A", "B"), ("B", "A")])
    report.graphs = 1
    for item in enumerate_models(d, SpaceSpec.uniform("AB")):
        report.models += 1
        report.checks += 1
        if item.faithful and item.consistent:
            report.failures.append(item.model)
    return report


def run_theorem3(n_max=3, all_interventions=False) -> SuiteReport:
    report = SuiteReport("theorem3-causal-correlations")
    for n in range(1, n_max + 1):
        for d in all_digraphs(n):
            if not certify_causal_only(d):
                continue
            report.graphs += 1
            r = validate_theorem3(d, SpaceSpec.uniform(d.vertices), all_interventions=all_interventions)
            report.models += r.models_checked
            report.checks += r.interventions_checked
            report.failures.extend(r.failures)
    return report
