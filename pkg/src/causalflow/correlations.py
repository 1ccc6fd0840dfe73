"""Deterministic correlations and the causal-decomposition test.

A deterministic correlation ``g`` maps each joint setting to a joint result.
Such a correlation decomposes causally iff some agent's result depends on its
own setting only and, for each value of that setting, the correlation of the
remaining agents (with that setting plugged in) decomposes causally again.
For deterministic tables every component of a convex decomposition has to
reproduce ``g`` itself, so this recursion is exact.
"""

from __future__ import annotations

import itertools
import math
from dataclasses import dataclass
from functools import lru_cache
from typing import Optional

from .errors import CausalFlowError


@dataclass(frozen=True)
class DeterministicCorrelation:
    """Total table ``rows[index(x)] == a`` over joint settings in lexicographic order."""

    agents: tuple[str, ...]
    setting_cards: tuple[int, ...]
    result_cards: tuple[int, ...]
    rows: tuple[tuple[int, ...], ...]

    def __post_init__(self):
        n = len(self.agents)
        if len(set(self.agents)) != n:
            raise CausalFlowError("duplicate agents")
        if len(self.setting_cards) != n or len(self.result_cards) != n:
            raise CausalFlowError("one setting and one result cardinality per agent required")
        if any(c < 1 for c in self.setting_cards + self.result_cards):
            raise CausalFlowError("cardinalities must be >= 1")
        expected = math.prod(self.setting_cards)
        if len(self.rows) != expected:
            raise CausalFlowError(f"table has {len(self.rows)} rows, expected {expected}")
        for row in self.rows:
            if len(row) != n or any(not 0 <= a < c for a, c in zip(row, self.result_cards)):
                raise CausalFlowError(f"row {row} out of range")

    @classmethod
    def from_function(cls, agents, setting_cards, result_cards, fn):
        xs = itertools.product(*[range(c) for c in setting_cards])
        return cls(tuple(agents), tuple(setting_cards), tuple(result_cards), tuple(tuple(fn(x)) for x in xs))

    def settings(self):
        return itertools.product(*[range(c) for c in self.setting_cards])

    def __call__(self, x) -> tuple[int, ...]:
        idx = 0
        for xi, c in zip(x, self.setting_cards):
            idx = idx * c + xi
        return self.rows[idx]

    def as_dict(self):
        return dict(zip(self.settings(), self.rows))

    def relabel(self, mapping) -> "DeterministicCorrelation":
        """Rename agents and reorder components into the new canonical order."""
        names = [mapping[a] for a in self.agents]
        order = sorted(range(len(names)), key=lambda k: names[k])
        table = self.as_dict()

        def fn(x_new):
            x_old = [0] * len(order)
            for pos, k in enumerate(order):
                x_old[k] = x_new[pos]
            a = table[tuple(x_old)]
            return tuple(a[k] for k in order)

        return DeterministicCorrelation.from_function(
            [names[k] for k in order],
            [self.setting_cards[k] for k in order],
            [self.result_cards[k] for k in order],
            fn,
        )


@dataclass(frozen=True)
class OrderTree:
    """Witness of a causal decomposition.

    ``agent`` acts first with result ``results[x]`` for its setting ``x``;
    ``branches[x]`` is the witness for the remaining agents under that setting.
    """

    agent: str
    results: tuple[int, ...]
    branches: tuple[Optional["OrderTree"], ...]

    def replay(self, setting: dict) -> dict:
        out = {}
        node = self
        while node is not None:
            x = setting[node.agent]
            out[node.agent] = node.results[x]
            node = node.branches[x]
        return out

    def render(self, indent=0) -> list[str]:
        pad = "  " * indent
        lines = []
        for x, (a, sub) in enumerate(zip(self.results, self.branches)):
            lines.append(f"{pad}{self.agent}: x={x} -> a={a}")
            if sub is not None:
                lines.extend(sub.render(indent + 1))
        return lines


def _decompose(agents, s_cards, table):
    """``table`` maps full setting tuples (over ``agents``) to result tuples."""
    if not agents:
        return None, True
    for k, v in enumerate(agents):
        results = {}
        ok = True
        for x, a in table.items():
            prev = results.setdefault(x[k], a[k])
            if prev != a[k]:
                ok = False
                break
        if not ok:
            continue
        if len(agents) == 1:
            return OrderTree(v, tuple(results[x] for x in range(s_cards[k])), (None,) * s_cards[k]), True
        rest = agents[:k] + agents[k + 1:]
        rest_cards = s_cards[:k] + s_cards[k + 1:]
        branches = []
        for xv in range(s_cards[k]):
            sub = {
                x[:k] + x[k + 1:]: a[:k] + a[k + 1:]
                for x, a in table.items()
                if x[k] == xv
            }
            tree, good = _cached_decompose(rest, rest_cards, _freeze(sub))
            if not good:
                ok = False
                break
            branches.append(tree)
        if ok:
            return OrderTree(v, tuple(results[x] for x in range(s_cards[k])), tuple(branches)), True
    return None, False


def _freeze(table):
    return tuple(sorted(table.items()))


@lru_cache(maxsize=1 << 16)
def _cached_decompose(agents, s_cards, frozen):
    return _decompose(agents, s_cards, dict(frozen))


@dataclass
class CausalityReport:
    causal: bool
    witness: Optional[OrderTree]

    def __bool__(self):
        return self.causal


def is_causal_deterministic(c: DeterministicCorrelation) -> CausalityReport:
    """Decide whether ``c`` decomposes causally; the witness replays to ``c``."""
    if len(c.agents) == 0:
        return CausalityReport(True, None)
    tree, ok = _cached_decompose(tuple(c.agents), tuple(c.setting_cards), _freeze(c.as_dict()))
    return CausalityReport(ok, tree)


def signals_to(c: DeterministicCorrelation, sender: str, receiver: str) -> bool:
    """True iff the result of ``receiver`` varies with the setting of ``sender``."""
    ks = c.agents.index(sender)
    kr = c.agents.index(receiver)
    seen = {}
    for x, a in c.as_dict().items():
        key = x[:ks] + x[ks + 1:]
        prev = seen.setdefault(key, a[kr])
        if prev != a[kr]:
            return True
    return False


@dataclass
class Theorem3Report:
    structure: object
    models_checked: int = 0
    interventions_checked: int = 0
    failures: list = None

    def __post_init__(self):
        if self.failures is None:
            self.failures = []

    @property
    def ok(self):
        return not self.failures


def _all_vertex_interventions(in_card, out_card):
    from .model import VertexIntervention

    cells = [(a, o) for a in range(in_card) for o in range(out_card)]
    for table in itertools.product(cells, repeat=out_card * in_card):
        yield VertexIntervention(out_card, in_card, table)


def validate_theorem3(d, spaces, all_interventions=False, limit=1 << 20) -> Theorem3Report:
    """Contract every faithful consistent model on a certified structure and
    check that each resulting correlation decomposes causally.

    By default each model is probed with the echo intervention (setting sent
    out, input reported back). ``all_interventions`` tries every deterministic
    intervention with the same setting and result sets instead.
    """
    from ._limits import check_limit
    from .model import Intervention, contract, echo_intervention, enumerate_models
    from .superflow import certify_causal_only

    if not certify_causal_only(d):
        raise CausalFlowError(f"{d.label()} is not certified causal-only; nothing to validate")
    if all_interventions:
        per_vertex = [list(_all_vertex_interventions(spaces.in_card(v), spaces.out_card(v))) for v in d.vertices]
        check_limit(math.prod(len(x) for x in per_vertex), limit, "number of intervention families")
        families = [Intervention(tuple(zip(d.vertices, combo))) for combo in itertools.product(*per_vertex)]
    else:
        families = [echo_intervention(spaces)]
    report = Theorem3Report(d)
    for item in enumerate_models(d, spaces, only_faithful=True):
        if not item.consistent:
            continue
        report.models_checked += 1
        for iv in families:
            report.interventions_checked += 1
            g = contract(item.model, iv)
            if not is_causal_deterministic(g):
                report.failures.append((item.model, iv))
    return report
