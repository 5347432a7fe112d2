"""Bounded checker for the meets/begun-by/later/next fragment.

Temporal witnesses in this fragment extend intervals forward, so the
existential searches are capped: by the exact interval-type bound
(LITERAL mode), by its tighter variant (TIGHT mode), or by a fixed
user-chosen cap (user mode). Two escape hatches keep practical queries
exact: modal-free operands are decided completely by reachability in
the product of the step relation with the per-variable automata, and
enumerations that provably cover every path (no reachable cycle) are
complete whatever the cap. Anything else is honestly reported as a
bounded verdict.

LITERAL and TIGHT mode refuse to run searches whose enumeration
frontier would exceed a ceiling, instead of silently truncating; the
user mode is taken as an explicit instruction and is never guarded.
"""

from __future__ import annotations

from collections import deque
from dataclasses import dataclass
from typing import Dict, FrozenSet, Iterable, List, Optional, Sequence, Set, Tuple

from .formulas import (
    And,
    Atom,
    Bot,
    C,
    Diamond,
    Formula,
    FragmentError,
    K,
    Not,
    Pi,
    Top,
    Var,
    eliminate_L,
    fis_bound_saturating,
    format_formula,
    modal_free,
    normalize,
    relations_of,
    resolve_agents,
    tight_bound_saturating,
    top_level_subformulas,
    variables_of,
)
from .regexes import run
from .systems import (
    GlobalConfig,
    InterpretedSystem,
    Interval,
    Relation,
    allen_successors,
    common_class,
    config_str,
    epi_class,
    label_holds,
    validate_interval,
)

_FRAGMENT = {Relation.A, Relation.BBAR, Relation.N}

# caps beyond any feasible enumeration are all equivalent; saturate here
_HUGE = 10**9


@dataclass(frozen=True)
class BoundMode:
    """How far bounded existential searches may extend an interval.

    kind "literal": the exact interval-type bound of the operand.
    kind "tight":   the DFA-state-count variant of that bound.
    kind "user":    a fixed cap, acknowledged in the verdict regime.
    """

    kind: str
    cap: Optional[int] = None

    def __post_init__(self) -> None:
        if self.kind not in ("literal", "tight", "user"):
            raise ValueError(f"unknown bound mode {self.kind!r}")
        if self.kind == "user":
            if self.cap is None or self.cap < 1:
                raise ValueError("user bound must be a positive integer")
        elif self.cap is not None:
            raise ValueError(f"{self.kind} mode takes no cap")


LITERAL_BOUND = BoundMode("literal")
TIGHT_BOUND = BoundMode("tight")


def user_bound(cap: int) -> BoundMode:
    return BoundMode("user", cap)


@dataclass(frozen=True)
class Verdict:
    """holds plus the regime: Conclusive when every existential was
    either complete or capped at no less than the exact interval-type
    bound of its operand; otherwise BoundedAt(k) with k the largest
    insufficient cap that was relied on."""

    holds: bool
    bounded_at: Optional[int] = None

    @property
    def conclusive(self) -> bool:
        return self.bounded_at is None

    @property
    def regime(self) -> str:
        if self.conclusive:
            return "Conclusive"
        return f"BoundedAt({self.bounded_at})"


class BoundInfeasibleError(RuntimeError):
    def __init__(self, message: str, estimate: int, ceiling: int):
        super().__init__(message)
        self.estimate = estimate
        self.ceiling = ceiling


DEFAULT_FRONTIER_CEILING = 10**7


# ---------------------------------------------------------------------------
# Complete search for modal-free operands

def _boolean_satisfier(
    sys: InterpretedSystem, operand: Formula
) -> Tuple[List[str], "object"]:
    """Compile a modal-free operand into (variable list, closure over
    (accepting-flags, point-flag))."""
    if not modal_free(operand):
        raise ValueError("operand must be modal-free")
    node = normalize(operand)
    names = sorted(variables_of(node))
    for name in names:
        if name not in sys.labelling:
            raise KeyError(f"unknown variable {name!r}")
    index = {name: i for i, name in enumerate(names)}

    def sat(accepting: Tuple[bool, ...], point: bool) -> bool:
        def ev(n: Formula) -> bool:
            if isinstance(n, Pi):
                return point
            if isinstance(n, Top):
                return True
            if isinstance(n, Bot):
                return False
            if isinstance(n, Var):
                return accepting[index[n.name]]
            if isinstance(n, Not):
                return not ev(n.sub)
            if isinstance(n, And):
                return ev(n.left) and ev(n.right)
            if isinstance(n, Atom):
                raise ValueError("reduce regex atoms to variables first")
            raise TypeError(f"unexpected node {n!r}")

        return ev(node)

    return names, sat


def regular_witness_search(
    sys: InterpretedSystem,
    operand: Formula,
    starts_at: Optional[GlobalConfig] = None,
    extends: Optional[Interval] = None,
) -> Optional[Interval]:
    """Shortest interval satisfying a modal-free operand, either among
    the intervals beginning at a configuration or among the proper
    forward extensions of a given interval; None when no such interval
    exists at any length.

    Complete: a modal-free verdict depends only on the per-variable
    automaton states after the interval's word and on pointhood, so
    breadth-first search over (configuration, automaton states, point
    flag) covers every case in finitely many steps.
    """
    if (starts_at is None) == (extends is None):
        raise ValueError("give exactly one of starts_at and extends")
    names, sat = _boolean_satisfier(sys, operand)
    dfas = [sys.dfa_for(name) for name in names]

    State = Tuple[GlobalConfig, Tuple[str, ...], bool]

    def advance(states: Tuple[str, ...], g: GlobalConfig) -> Tuple[str, ...]:
        sym = config_str(g)
        return tuple(dfa.step[(s, sym)] for dfa, s in zip(dfas, states))

    def accepting(states: Tuple[str, ...]) -> Tuple[bool, ...]:
        return tuple(s in dfa.accepting for dfa, s in zip(dfas, states))

    states = tuple(d.initial for d in dfas)
    if starts_at is not None:
        base: Tuple[GlobalConfig, ...] = (starts_at,)
        states = advance(states, starts_at)
        if sat(accepting(states), True):
            return Interval(base)
    else:
        base = extends.configs
        for g in base:
            states = advance(states, g)

    # extensions never form points, so pointhood drops out of the state
    parents: Dict[State, Tuple[Optional[State], GlobalConfig]] = {}
    queue: deque = deque()
    for succ in sys.successors(base[-1]):
        first: State = (succ, advance(states, succ), False)
        if first not in parents:
            parents[first] = (None, succ)
            queue.append(first)
    while queue:
        state = queue.popleft()
        cfg, st, _ = state
        if sat(accepting(st), False):
            suffix: List[GlobalConfig] = []
            cursor: Optional[State] = state
            while cursor is not None:
                prev, step_cfg = parents[cursor]
                suffix.append(step_cfg)
                cursor = prev
            suffix.reverse()
            return Interval(base + tuple(suffix))
        for succ in sys.successors(cfg):
            nxt: State = (succ, advance(st, succ), False)
            if nxt not in parents:
                parents[nxt] = (state, succ)
                queue.append(nxt)
    return None


# ---------------------------------------------------------------------------
# Feasibility guard

def _subgraph_from(
    sys: InterpretedSystem, starts: Iterable[GlobalConfig]
) -> Set[GlobalConfig]:
    reach: Set[GlobalConfig] = set()
    stack = list(starts)
    while stack:
        g = stack.pop()
        if g in reach:
            continue
        reach.add(g)
        stack.extend(sys.successors(g))
    return reach


def _cycle_reachable(sys: InterpretedSystem, starts: Iterable[GlobalConfig]) -> bool:
    reach = _subgraph_from(sys, starts)
    indegree = {g: 0 for g in reach}
    for g in reach:
        for s in sys.successors(g):
            indegree[s] += 1
    queue = [g for g, d in indegree.items() if d == 0]
    removed = 0
    while queue:
        g = queue.pop()
        removed += 1
        for s in sys.successors(g):
            indegree[s] -= 1
            if indegree[s] == 0:
                queue.append(s)
    return removed != len(reach)


def _count_paths(
    sys: InterpretedSystem,
    starts: Sequence[GlobalConfig],
    max_len: int,
    ceiling: int,
) -> int:
    """Paths of length 1..max_len beginning in starts, exactly if the
    count stays within the ceiling, else ceiling + 1."""
    if max_len <= 0 or not starts:
        return 0
    if max_len > ceiling + len(sys.reachable) + 1:
        # a reachable cycle alone yields one path per length
        if _cycle_reachable(sys, starts):
            return ceiling + 1
        max_len = min(max_len, len(sys.reachable) + 1)
    counts: Dict[GlobalConfig, int] = {}
    for g in starts:
        counts[g] = counts.get(g, 0) + 1
    total = sum(counts.values())
    for _ in range(max_len - 1):
        if total > ceiling:
            return ceiling + 1
        grown: Dict[GlobalConfig, int] = {}
        for g, c in counts.items():
            for s in sys.successors(g):
                grown[s] = grown.get(s, 0) + c
        if not grown:
            break
        counts = grown
        total += sum(counts.values())
    return min(total, ceiling + 1)


def _search_is_complete(
    sys: InterpretedSystem, starts: Sequence[GlobalConfig], budget: int
) -> bool:
    """True when paths from starts of length <= budget are all paths
    there are (acyclic region exhausted below the budget)."""
    if budget > len(sys.reachable) and not _cycle_reachable(sys, starts):
        return True
    return False


# ---------------------------------------------------------------------------
# The checker

def check_abln(
    sys: InterpretedSystem,
    interval: Interval,
    f: Formula,
    mode: BoundMode,
    frontier_ceiling: int = DEFAULT_FRONTIER_CEILING,
) -> Verdict:
    """Bounded verdict for a meets/begun-by/later/next formula (later
    is eliminated on entry; begins/during/ends and every backward
    modality are rejected)."""
    g0 = eliminate_L(f)
    extra = relations_of(g0) - _FRAGMENT
    if extra:
        names = ", ".join(sorted(r.value for r in extra))
        raise FragmentError(
            f"not in the meets/begun-by/later/next fragment: uses {names}"
        )
    validate_interval(sys, interval)
    root = normalize(resolve_agents(sys, g0))

    insufficient: List[int] = []

    def operand_cap(operand: Formula) -> int:
        if mode.kind == "user":
            return mode.cap
        if mode.kind == "literal":
            return fis_bound_saturating(sys, operand, _HUGE)
        return tight_bound_saturating(sys, operand, _HUGE)

    def cap_is_sufficient(operand: Formula, cap: int, complete: bool) -> bool:
        if complete or mode.kind == "literal":
            return True
        return fis_bound_saturating(sys, operand, cap + 1) <= cap

    def guard(starts: Sequence[GlobalConfig], max_len: int, what: str) -> None:
        if mode.kind == "user":
            return
        estimate = _count_paths(sys, starts, max_len, frontier_ceiling)
        if estimate > frontier_ceiling:
            raise BoundInfeasibleError(
                f"{what}: enumeration frontier exceeds the ceiling of "
                f"{frontier_ceiling} intervals; raise the ceiling, use an "
                f"explicit user bound, or shrink the formula",
                estimate,
                frontier_ceiling,
            )

    def temporal(node: Diamond, cfgs: Tuple[GlobalConfig, ...]) -> bool:
        operand = node.sub
        last = cfgs[-1]
        if modal_free(operand):
            if node.relation is Relation.A:
                return regular_witness_search(sys, operand, starts_at=last) is not None
            if node.relation is Relation.N:
                return any(
                    regular_witness_search(sys, operand, starts_at=s) is not None
                    for s in sys.successors(last)
                )
            return (
                regular_witness_search(sys, operand, extends=Interval(cfgs))
                is not None
            )
        cap = operand_cap(operand)
        max_len = len(cfgs) + cap
        if node.relation is Relation.A:
            starts: Sequence[GlobalConfig] = (last,)
        else:
            starts = sys.successors(last)
        guard(starts, max_len if node.relation is not Relation.BBAR else cap,
              f"<{node.relation.value}> {format_formula(operand)}")
        complete = _search_is_complete(sys, starts, cap)
        if not cap_is_sufficient(operand, cap, complete):
            insufficient.append(cap)
        for candidate in allen_successors(sys, Interval(cfgs), node.relation, max_len):
            if evaluate(node.sub, candidate.configs):
                return True
        return False

    def evaluate(node: Formula, cfgs: Tuple[GlobalConfig, ...]) -> bool:
        if isinstance(node, Pi):
            return len(cfgs) == 1
        if isinstance(node, Top):
            return True
        if isinstance(node, Bot):
            return False
        if isinstance(node, Var):
            return label_holds(sys, node.name, Interval(cfgs))
        if isinstance(node, Atom):
            raise FragmentError(
                "regex atoms must be reduced to variables before checking"
            )
        if isinstance(node, Not):
            return not evaluate(node.sub, cfgs)
        if isinstance(node, And):
            return evaluate(node.left, cfgs) and evaluate(node.right, cfgs)
        if isinstance(node, K):
            return all(
                evaluate(node.sub, member.configs)
                for member in epi_class(sys, Interval(cfgs), node.agent)
            )
        if isinstance(node, C):
            return all(
                evaluate(node.sub, member.configs)
                for member in common_class(sys, Interval(cfgs), node.group)
            )
        if isinstance(node, Diamond):
            return temporal(node, cfgs)
        raise TypeError(f"not a normalized formula node: {node!r}")

    holds = evaluate(root, interval.configs)
    return Verdict(holds, max(insufficient) if insufficient else None)


# ---------------------------------------------------------------------------
# Modal context trees

@dataclass(frozen=True)
class Mct:
    """Horizon-truncated modal context tree node: interval endpoints,
    pointhood, the automaton state per variable after the interval's
    word, and one deduplicated subtree set per top-level modal
    subformula."""

    first: str
    last: str
    point: bool
    states: Tuple[Tuple[str, str], ...]
    children: Tuple[Tuple[str, FrozenSet["Mct"]], ...]


def compute_mct(
    sys: InterpretedSystem,
    interval: Interval,
    f: Formula,
    horizon: int,
) -> Mct:
    """The modal context tree of the interval, with meets/begun-by/next
    edges truncated to successor intervals of length <= horizon
    (epistemic edges preserve length and are never truncated)."""
    if horizon < 1:
        raise ValueError("horizon must be positive")
    g0 = eliminate_L(f)
    extra = relations_of(g0) - _FRAGMENT
    if extra:
        names = ", ".join(sorted(r.value for r in extra))
        raise FragmentError(
            f"modal context trees cover the meets/begun-by/later/next "
            f"fragment only: uses {names}"
        )
    validate_interval(sys, interval)
    root = normalize(resolve_agents(sys, g0))

    def label_edges(node: Formula) -> List[Tuple[str, Formula, str]]:
        # (display key, operand, quantifier head) per top-level subformula
        out = []
        for head, operand in top_level_subformulas(node):
            out.append((f"{head} {format_formula(operand)}", operand, head))
        return sorted(out, key=lambda t: t[0])

    def related(head: str, cfgs: Tuple[GlobalConfig, ...]) -> List[Interval]:
        here = Interval(cfgs)
        if head.startswith("K{"):
            agent = int(head[2:-1])
            return sorted(epi_class(sys, here, agent), key=lambda i: i.configs)
        if head.startswith("C{"):
            group = tuple(int(a) for a in head[2:-1].split(","))
            return sorted(common_class(sys, here, group), key=lambda i: i.configs)
        relation = Relation(head[1:-1])
        return list(allen_successors(sys, here, relation, max_len=horizon))

    def build(node: Formula, cfgs: Tuple[GlobalConfig, ...]) -> Mct:
        word = [config_str(g) for g in cfgs]
        states = tuple(
            (var, run(sys.dfa_for(var), word)) for var in sorted(sys.variables)
        )
        children: List[Tuple[str, FrozenSet[Mct]]] = []
        for key, operand, head in label_edges(node):
            subtrees = frozenset(
                build(operand, member.configs) for member in related(head, cfgs)
            )
            children.append((key, subtrees))
        return Mct(
            first=sys.display(cfgs[0]),
            last=sys.display(cfgs[-1]),
            point=len(cfgs) == 1,
            states=states,
            children=tuple(children),
        )

    return build(root, interval.configs)


def mct_to_dot(tree: Mct) -> str:
    """Deterministic DOT rendering; children grouped per subformula."""
    lines = ["digraph mct {", "  node [shape=box];"]
    counter = [0]

    def emit(node: Mct) -> str:
        name = f"n{counter[0]}"
        counter[0] += 1
        point = "pi" if node.point else "!pi"
        states = ", ".join(f"{var}:{state}" for var, state in node.states)
        label = f"({node.first}, {node.last}, {point}" + (
            f" | {states})" if states else ")"
        )
        lines.append(f'  {name} [label="{label}"];')
        for key, subtrees in node.children:
            for sub in sorted(
                subtrees, key=lambda t: (t.first, t.last, t.point, t.states)
            ):
                child = emit(sub)
                lines.append(f'  {name} -> {child} [label="{key}"];')
        return name

    emit(tree)
    lines.append("}")
    return "\n".join(lines)
