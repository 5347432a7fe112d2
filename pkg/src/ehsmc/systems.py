"""Interpreted systems with regular labellings and their interval structure.

A system is a list of agents (index 0 by convention the environment),
each with local states, an initial state, actions, a protocol and local
transitions guarded by joint-action patterns. The induced global step
relation generates the reachable configurations; intervals are finite
paths through that relation, kept in canonical form as configuration
sequences. Anchored intervals additionally carry the history back to
the initial configuration and are needed only by the bounded oracle,
where backward interval relations live.
"""

from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from enum import Enum
from typing import Dict, FrozenSet, Iterable, Iterator, List, Optional, Sequence, Set, Tuple

from .regexes import (
    Alphabet,
    Dfa,
    RegexExpr,
    compile_regex,
    denotes,
    parse_regex,
    regex_to_text,
    run,
    symbols_of,
)

GlobalConfig = Tuple[str, ...]


class Relation(str, Enum):
    """Interval relation names; `bar` marks an inverse."""

    A = "A"
    ABAR = "Abar"
    B = "B"
    BBAR = "Bbar"
    D = "D"
    DBAR = "Dbar"
    E = "E"
    EBAR = "Ebar"
    L = "L"
    LBAR = "Lbar"
    N = "N"
    NBAR = "Nbar"
    O = "O"
    OBAR = "Obar"


FORWARD_RELATIONS = {Relation.A, Relation.B, Relation.BBAR, Relation.D, Relation.E, Relation.N}
UNBOUNDED_RELATIONS = {Relation.A, Relation.BBAR, Relation.N}


@dataclass(frozen=True)
class Interval:
    """Non-empty configuration sequence; consecutive entries must be
    global steps and the first configuration reachable (checked by
    `validate_interval`, not at construction)."""

    configs: Tuple[GlobalConfig, ...]

    def __post_init__(self) -> None:
        if not self.configs:
            raise ValueError("intervals are non-empty")

    def __len__(self) -> int:
        return len(self.configs)

    @property
    def first(self) -> GlobalConfig:
        return self.configs[0]

    @property
    def last(self) -> GlobalConfig:
        return self.configs[-1]


@dataclass(frozen=True)
class AnchoredInterval:
    """Interval plus its history: history ++ configs is a path from the
    initial configuration (empty history means the interval starts
    there)."""

    history: Tuple[GlobalConfig, ...]
    interval: Interval

    @property
    def total_length(self) -> int:
        return len(self.history) + len(self.interval)


def is_point(interval: Interval) -> bool:
    return len(interval.configs) == 1


@dataclass
class LocalComponent:
    name: str
    states: Tuple[str, ...]
    init: str
    actions: Tuple[str, ...]
    # state -> permitted actions; missing states are treated as empty
    protocol: Dict[str, Tuple[str, ...]]
    # (source state, joint-action pattern with '*' wildcards, target state)
    transitions: Tuple[Tuple[str, Tuple[str, ...], str], ...]


def _pattern_matches(pattern: Tuple[str, ...], joint: Tuple[str, ...]) -> bool:
    return len(pattern) == len(joint) and all(
        p == "*" or p == a for p, a in zip(pattern, joint)
    )


class InterpretedSystem:
    """Immutable system model with derived transition tables.

    The labelling maps each variable to a regular expression over the
    full configuration space (every tuple of local states), encoded as
    canonical strings "(l0,l1,...)". Aliases give configurations
    friendly display names.
    """

    def __init__(
        self,
        agents: Sequence[LocalComponent],
        labelling: Dict[str, RegexExpr],
        aliases: Optional[Dict[str, GlobalConfig]] = None,
    ):
        if not agents:
            raise ValueError("at least one agent is required")
        self.agents: Tuple[LocalComponent, ...] = tuple(agents)
        self.labelling: Dict[str, RegexExpr] = dict(labelling)
        self.variables: Tuple[str, ...] = tuple(labelling.keys())
        self.aliases: Dict[str, GlobalConfig] = dict(aliases or {})

        self.initial: GlobalConfig = tuple(a.init for a in self.agents)
        self.all_configs: Tuple[GlobalConfig, ...] = tuple(
            sorted(itertools.product(*(a.states for a in self.agents)))
        )
        # Degenerate inputs (an agent with no states) still construct, so
        # validate_system can report them instead of the constructor raising.
        self.alphabet: Optional[Alphabet] = (
            Alphabet(tuple(config_str(g) for g in self.all_configs))
            if self.all_configs
            else None
        )

        self._display: Dict[GlobalConfig, str] = {}
        for alias, cfg in self.aliases.items():
            self._display.setdefault(cfg, alias)

        self._succ: Dict[GlobalConfig, Tuple[GlobalConfig, ...]] = {
            g: self._compute_successors(g) for g in self.all_configs
        }
        self.reachable: Tuple[GlobalConfig, ...] = self._compute_reachable()
        self.reachable_set: FrozenSet[GlobalConfig] = frozenset(self.reachable)
        self._dfas: Dict[str, Dfa] = {}

    # -- derived tables -----------------------------------------------------

    def _compute_successors(self, g: GlobalConfig) -> Tuple[GlobalConfig, ...]:
        permitted = []
        for agent, local in zip(self.agents, g):
            acts = agent.protocol.get(local, ())
            if not acts:
                return ()
            permitted.append(sorted(acts))
        by_src: List[List[Tuple[Tuple[str, ...], str]]] = []
        for agent, local in zip(self.agents, g):
            by_src.append(
                [(pat, dst) for (src, pat, dst) in agent.transitions if src == local]
            )
        out: Set[GlobalConfig] = set()
        for joint in itertools.product(*permitted):
            targets: List[Set[str]] = []
            for rules in by_src:
                t = {dst for (pat, dst) in rules if _pattern_matches(pat, joint)}
                if not t:
                    break
                targets.append(t)
            else:
                out.update(itertools.product(*targets))
        return tuple(sorted(c for c in out if c in set(self.all_configs)))

    def _compute_reachable(self) -> Tuple[GlobalConfig, ...]:
        seen = {self.initial}
        queue = [self.initial]
        while queue:
            g = queue.pop(0)
            for h in self._succ.get(g, ()):
                if h not in seen:
                    seen.add(h)
                    queue.append(h)
        return tuple(sorted(seen))

    # -- accessors ------------------------------------------------------------

    def successors(self, g: GlobalConfig) -> Tuple[GlobalConfig, ...]:
        return self._succ.get(g, ())

    def display(self, g: GlobalConfig) -> str:
        return self._display.get(g, config_str(g))

    def config_by_name(self, name: str) -> GlobalConfig:
        if name in self.aliases:
            return self.aliases[name]
        for g in self.all_configs:
            if config_str(g) == name:
                return g
        raise KeyError(f"unknown configuration {name!r}")

    def dfa_for(self, var: str) -> Dfa:
        if var not in self.labelling:
            raise KeyError(f"unknown variable {var!r}")
        if self.alphabet is None:
            raise ValueError("system has an empty configuration space")
        if var not in self._dfas:
            self._dfas[var] = compile_regex(self.labelling[var], self.alphabet)
        return self._dfas[var]


def config_str(g: GlobalConfig) -> str:
    return "(" + ",".join(g) + ")"


# ---------------------------------------------------------------------------
# Core relations


def global_step(sys: InterpretedSystem, g: GlobalConfig, g2: GlobalConfig) -> bool:
    """True iff some joint action permitted by every protocol drives
    every local transition from g to g2."""
    return g2 in sys.successors(g)


def reachable_configs(sys: InterpretedSystem) -> Set[GlobalConfig]:
    return set(sys.reachable)


def label_holds(sys: InterpretedSystem, var: str, interval: Interval) -> bool:
    """Compiled-DFA route: the canonical configuration word of the
    interval is accepted by the minimal automaton of the variable."""
    dfa = sys.dfa_for(var)
    return run(dfa, [config_str(g) for g in interval.configs]) in dfa.accepting


def validate_interval(sys: InterpretedSystem, interval: Interval) -> None:
    if interval.first not in sys.reachable_set:
        raise ValueError(
            f"interval start {sys.display(interval.first)} is not reachable"
        )
    for a, b in zip(interval.configs, interval.configs[1:]):
        if not global_step(sys, a, b):
            raise ValueError(
                f"{sys.display(a)} -> {sys.display(b)} is not a global step"
            )


# ---------------------------------------------------------------------------
# Path enumeration (ascending length, then lexicographic)


def _paths_from(
    sys: InterpretedSystem, starts: Iterable[GlobalConfig], max_len: int
) -> Iterator[Tuple[GlobalConfig, ...]]:
    layer: List[Tuple[GlobalConfig, ...]] = [(g,) for g in sorted(set(starts))]
    length = 1
    while layer and length <= max_len:
        for path in layer:
            yield path
        length += 1
        layer = [
            path + (nxt,) for path in layer for nxt in sys.successors(path[-1])
        ]
        layer.sort()


def allen_successors(
    sys: InterpretedSystem,
    interval: Interval,
    relation: Relation,
    max_len: Optional[int] = None,
) -> Iterator[Interval]:
    """Enumerate the intervals related to the given one.

    Supported here: A, B, Bbar, D, E, N. The relations with unboundedly
    many successors (A, Bbar, N) require max_len; B, D, E ignore it.
    Backward relations need history tracking and are evaluated only by
    the bounded oracle.
    """
    relation = Relation(relation)
    if relation in UNBOUNDED_RELATIONS and max_len is None:
        raise ValueError(f"relation {relation.value} requires max_len")
    if relation not in FORWARD_RELATIONS:
        raise ValueError(
            f"relation {relation.value} is history-dependent; use the bounded oracle"
        )
    cfgs = interval.configs
    n = len(cfgs)

    if relation == Relation.B:
        for k in range(1, n):
            yield Interval(cfgs[:k])
    elif relation == Relation.E:
        for j in range(n - 1, 0, -1):
            yield Interval(cfgs[j:])
    elif relation == Relation.D:
        seen: Set[Tuple[GlobalConfig, ...]] = set()
        for ln in range(1, max(n - 1, 0)):
            chunk = sorted(
                cfgs[i : i + ln]
                for i in range(1, n - ln)
            )
            for c in chunk:
                if c not in seen:
                    seen.add(c)
                    yield Interval(tuple(c))
    elif relation == Relation.A:
        assert max_len is not None
        for path in _paths_from(sys, [cfgs[-1]], max_len):
            yield Interval(path)
    elif relation == Relation.N:
        assert max_len is not None
        for path in _paths_from(sys, sys.successors(cfgs[-1]), max_len):
            yield Interval(path)
    elif relation == Relation.BBAR:
        assert max_len is not None
        budget = max_len - n
        if budget >= 1:
            for ext in _paths_from(sys, sys.successors(cfgs[-1]), budget):
                yield Interval(cfgs + ext)


def later_successors(
    sys: InterpretedSystem, interval: Interval, max_len: int
) -> Iterator[Interval]:
    """Intervals whose first configuration is reachable from last(I) in
    at least one global step."""
    starts: Set[GlobalConfig] = set()
    frontier = set(sys.successors(interval.last))
    while frontier:
        starts |= frontier
        frontier = {
            h for g in frontier for h in sys.successors(g)
        } - starts
    yield from (Interval(p) for p in _paths_from(sys, starts, max_len))


# ---------------------------------------------------------------------------
# Epistemic structure


def epi_equiv(
    sys: InterpretedSystem, left: Interval, right: Interval, agent: int
) -> bool:
    """Same length and pointwise equal local states for the agent."""
    if not (0 <= agent < len(sys.agents)):
        raise IndexError(f"agent index {agent} out of range")
    if len(left) != len(right):
        return False
    return all(
        a[agent] == b[agent] for a, b in zip(left.configs, right.configs)
    )


def epi_class(sys: InterpretedSystem, interval: Interval, agent: int) -> Set[Interval]:
    """All valid intervals the agent cannot distinguish from this one."""
    if not (0 <= agent < len(sys.agents)):
        raise IndexError(f"agent index {agent} out of range")
    target = [g[agent] for g in interval.configs]
    partial: List[Tuple[GlobalConfig, ...]] = [
        (g,) for g in sys.reachable if g[agent] == target[0]
    ]
    for want in target[1:]:
        partial = [
            path + (nxt,)
            for path in partial
            for nxt in sys.successors(path[-1])
            if nxt[agent] == want
        ]
    return {Interval(p) for p in partial}


def common_class(
    sys: InterpretedSystem, interval: Interval, group: Iterable[int]
) -> Set[Interval]:
    """Closure of the interval under the epistemic classes of every
    agent in the group (the common-knowledge reachability set)."""
    agents = sorted(set(group))
    if not agents:
        raise ValueError("agent group must be non-empty")
    out: Set[Interval] = {interval}
    queue = [interval]
    while queue:
        current = queue.pop()
        for i in agents:
            for other in epi_class(sys, current, i):
                if other not in out:
                    out.add(other)
                    queue.append(other)
    return out


# ---------------------------------------------------------------------------
# Validation


@dataclass
class ValidationReport:
    violations: List[str] = field(default_factory=list)
    warnings: List[str] = field(default_factory=list)

    @property
    def ok(self) -> bool:
        return not self.violations


def validate_system(sys: InterpretedSystem) -> ValidationReport:
    report = ValidationReport()
    n = len(sys.agents)
    for idx, agent in enumerate(sys.agents):
        tag = f"agent {agent.name or idx}"
        if not agent.states:
            report.violations.append(f"{tag}: declares no local states")
        if len(set(agent.states)) != len(agent.states):
            report.violations.append(f"{tag}: duplicate local states")
        if agent.init not in agent.states:
            report.violations.append(f"{tag}: init {agent.init!r} not a state")
        for state, acts in agent.protocol.items():
            if state not in agent.states:
                report.violations.append(f"{tag}: protocol for unknown state {state!r}")
            for a in acts:
                if a not in agent.actions:
                    report.violations.append(
                        f"{tag}: protocol action {a!r} not declared"
                    )
        for state in agent.states:
            if not agent.protocol.get(state):
                report.warnings.append(
                    f"{tag}: state {state!r} permits no action (joint steps from it deadlock)"
                )
        for src, pattern, dst in agent.transitions:
            if src not in agent.states or dst not in agent.states:
                report.violations.append(
                    f"{tag}: transition {src!r} -> {dst!r} uses unknown states"
                )
            if len(pattern) != n:
                report.violations.append(
                    f"{tag}: pattern {pattern} has arity {len(pattern)}, expected {n}"
                )
            else:
                for j, slot in enumerate(pattern):
                    if slot != "*" and slot not in sys.agents[j].actions:
                        report.violations.append(
                            f"{tag}: pattern slot {j} names unknown action {slot!r}"
                        )
    for alias, cfg in sys.aliases.items():
        if len(cfg) != n or any(
            l not in agent.states for l, agent in zip(cfg, sys.agents)
        ):
            report.violations.append(f"config {alias}: {cfg} is not a configuration")
    valid_syms = set(sys.alphabet.symbols) if sys.alphabet is not None else set()
    for var, expr in sys.labelling.items():
        stray = symbols_of(expr) - valid_syms
        if stray:
            report.violations.append(
                f"label {var}: symbols outside the configuration space: {sorted(stray)}"
            )
        elif denotes(expr, []):
            report.warnings.append(
                f"label {var}: accepts the empty word, which no interval can match"
            )
    return report


# ---------------------------------------------------------------------------
# Text format


class SystemParseError(ValueError):
    def __init__(self, message: str, line: int):
        super().__init__(f"line {line}: {message}")
        self.line = line


def parse_system(text: str) -> InterpretedSystem:
    """Parse the system description format.

    `agent NAME` opens an agent block (declaration order fixes agent
    indices, the first being the environment); inside it `states`,
    `init`, `actions`, `protocol STATE: a b`, and
    `trans SRC (a0,...,am) DST` lines. Top level: `config ALIAS = (...)`
    and `label VAR = REGEX`. '#' starts a comment.
    """
    agents: List[dict] = []
    alias_lines: List[Tuple[str, Tuple[str, ...], int]] = []
    label_lines: List[Tuple[str, str, int]] = []

    for lineno, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        head, _, rest = line.partition(" ")
        rest = rest.strip()
        if head == "agent":
            if not rest:
                raise SystemParseError("agent needs a name", lineno)
            agents.append(
                {"name": rest, "states": (), "init": None, "actions": (),
                 "protocol": {}, "transitions": []}
            )
        elif head in ("states", "init", "actions", "protocol", "trans"):
            if not agents:
                raise SystemParseError(f"{head!r} before any agent block", lineno)
            current = agents[-1]
            if head == "states":
                current["states"] = tuple(rest.split())
            elif head == "init":
                current["init"] = rest
            elif head == "actions":
                current["actions"] = tuple(rest.split())
            elif head == "protocol":
                state, colon, acts = rest.partition(":")
                if not colon:
                    raise SystemParseError("protocol needs 'STATE: actions'", lineno)
                current["protocol"][state.strip()] = tuple(acts.split())
            else:
                parts = rest.split()
                if len(parts) != 3 or not (
                    parts[1].startswith("(") and parts[1].endswith(")")
                ):
                    raise SystemParseError(
                        "trans needs 'SRC (a0,...,am) DST'", lineno
                    )
                pattern = tuple(s.strip() for s in parts[1][1:-1].split(","))
                current["transitions"].append((parts[0], pattern, parts[2]))
        elif head == "config":
            name, eq, value = rest.partition("=")
            value = value.strip()
            if not eq or not (value.startswith("(") and value.endswith(")")):
                raise SystemParseError("config needs 'ALIAS = (l0,...,lm)'", lineno)
            cfg = tuple(s.strip() for s in value[1:-1].split(","))
            alias_lines.append((name.strip(), cfg, lineno))
        elif head == "label":
            name, eq, value = rest.partition("=")
            if not eq:
                raise SystemParseError("label needs 'VAR = REGEX'", lineno)
            label_lines.append((name.strip(), value.strip(), lineno))
        else:
            raise SystemParseError(f"unknown directive {head!r}", lineno)

    if not agents:
        raise SystemParseError("no agent blocks", 1)
    components = []
    for a in agents:
        if a["init"] is None:
            raise SystemParseError(f"agent {a['name']} has no init", 1)
        components.append(
            LocalComponent(
                name=a["name"],
                states=a["states"],
                init=a["init"],
                actions=a["actions"],
                protocol=a["protocol"],
                transitions=tuple(a["transitions"]),
            )
        )

    aliases = {name: cfg for name, cfg, _ in alias_lines}
    alias_to_symbol = {name: config_str(cfg) for name, cfg in aliases.items()}
    configs = tuple(itertools.product(*(c.states for c in components)))
    if label_lines and not configs:
        empty = next(c.name for c in components if not c.states)
        raise SystemParseError(
            f"cannot parse labels: agent {empty} declares no states",
            label_lines[0][2],
        )
    alphabet = Alphabet(tuple(config_str(c) for c in configs)) if configs else None
    labelling: Dict[str, RegexExpr] = {}
    for var, expr_text, lineno in label_lines:
        try:
            labelling[var] = parse_regex(expr_text, alphabet, alias_to_symbol)
        except ValueError as exc:
            raise SystemParseError(f"label {var}: {exc}", lineno) from exc
    return InterpretedSystem(components, labelling, aliases)


def load_system(path: str) -> InterpretedSystem:
    with open(path, "r", encoding="utf-8") as fh:
        return parse_system(fh.read())


def format_system(sys: InterpretedSystem) -> str:
    """Serialize back to the text format (round-trips through parse_system)."""
    lines: List[str] = []
    for agent in sys.agents:
        lines.append(f"agent {agent.name}")
        lines.append(f"  states {' '.join(agent.states)}")
        lines.append(f"  init {agent.init}")
        lines.append(f"  actions {' '.join(agent.actions)}")
        for state in agent.states:
            acts = agent.protocol.get(state, ())
            if acts:
                lines.append(f"  protocol {state}: {' '.join(acts)}")
        for src, pattern, dst in agent.transitions:
            lines.append(f"  trans {src} ({','.join(pattern)}) {dst}")

    # Every configuration mentioned in a label needs a printable name;
    # single-agent systems cannot use inline tuples, so make aliases up.
    symbol_to_alias = {config_str(cfg): alias for alias, cfg in sys.aliases.items()}
    needed: Set[str] = set()
    for expr in sys.labelling.values():
        needed |= symbols_of(expr)
    fresh = 1
    by_symbol: Dict[str, str] = dict(symbol_to_alias)
    for sym in sorted(needed):
        if sym not in by_symbol and len(sys.agents) == 1:
            while f"cfg{fresh}" in sys.aliases:
                fresh += 1
            by_symbol[sym] = f"cfg{fresh}"
            fresh += 1
    emitted: Set[str] = set()
    for alias, cfg in sys.aliases.items():
        lines.append(f"config {alias} = {config_str(cfg)}")
        emitted.add(alias)
    for sym, alias in sorted(by_symbol.items()):
        if alias not in emitted:
            lines.append(f"config {alias} = {sym}")
            emitted.add(alias)

    for var in sys.variables:
        text = regex_to_text(sys.labelling[var], display=lambda s: by_symbol.get(s, s))
        lines.append(f"label {var} = {text}")
    return "\n".join(lines) + "\n"


# ---------------------------------------------------------------------------
# DOT export


def tg_to_dot(sys: InterpretedSystem) -> str:
    """Reachable part of the global transition relation."""
    lines = ["digraph tg {", "  rankdir=LR;"]
    for g in sys.reachable:
        shape = "doublecircle" if g == sys.initial else "circle"
        lines.append(f'  "{sys.display(g)}" [shape={shape}];')
    for g in sys.reachable:
        for h in sys.successors(g):
            lines.append(f'  "{sys.display(g)}" -> "{sys.display(h)}";')
    lines.append("}")
    return "\n".join(lines)
