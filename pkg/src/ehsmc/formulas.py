"""Formula ASTs for the interval-epistemic logic, in two flavours.

The plus variant has propositional variables as atoms; the regex-atom
variant replaces them with regular expressions over letter predicates
(`p`, `!p`, the any-letter `T`, or an explicit valuation subset written
as a tuple symbol `(p,q)`). Both share the connectives, the knowledge
operators and the fourteen interval modalities. Boxes, disjunction and
implication are sugar: they are kept in the AST for display and removed
by `normalize`.
"""

from __future__ import annotations

from dataclasses import dataclass
from enum import Enum
from typing import FrozenSet, Iterator, List, Optional, Sequence, Set, Tuple, Union

from .regexes import RegexExpr, Sym, parse_regex, regex_to_text, symbols_of
from .systems import InterpretedSystem, Relation

AgentRef = Union[int, str]


class Formula:
    """Base class; concrete nodes are frozen dataclasses below."""

    __slots__ = ()


@dataclass(frozen=True)
class Pi(Formula):
    """Point-interval atom: true exactly on intervals of length one."""


@dataclass(frozen=True)
class Top(Formula):
    pass


@dataclass(frozen=True)
class Bot(Formula):
    pass


@dataclass(frozen=True)
class Var(Formula):
    name: str


@dataclass(frozen=True)
class Atom(Formula):
    """Regex over letter predicates (regex-atom variant only)."""

    expr: RegexExpr


@dataclass(frozen=True)
class Not(Formula):
    sub: Formula


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Or(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Implies(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class K(Formula):
    agent: AgentRef
    sub: Formula


@dataclass(frozen=True)
class C(Formula):
    group: Tuple[AgentRef, ...]
    sub: Formula

    def __post_init__(self) -> None:
        if not self.group:
            raise ValueError("common-knowledge group must be non-empty")
        # canonical group order: indices first, then names
        key = lambda a: (1, 0, a) if isinstance(a, str) else (0, a, "")
        object.__setattr__(self, "group", tuple(sorted(set(self.group), key=key)))


@dataclass(frozen=True)
class Diamond(Formula):
    relation: Relation
    sub: Formula


@dataclass(frozen=True)
class Box(Formula):
    relation: Relation
    sub: Formula


PI = Pi()
TOP = Top()
BOT = Bot()


class FormulaSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class FragmentError(ValueError):
    pass


class Fragment(str, Enum):
    BDE = "BDE"
    ABLN = "ABLN"
    FULL = "Full"


_BDE_RELATIONS = {Relation.B, Relation.D, Relation.E}
_ABLN_RELATIONS = {Relation.A, Relation.BBAR, Relation.L, Relation.N}


# ---------------------------------------------------------------------------
# Parsing

_KEYWORDS = {"pi": PI, "true": TOP, "false": BOT}


class _FormulaParser:
    """Recursive descent over `-> | & unary primary`, tightest last.

    `->` associates to the right; `&` and `|` chains are folded to the
    right as well so printing and re-parsing agree node for node.
    """

    def __init__(self, text: str, regex_atoms: bool):
        self.text = text
        self.pos = 0
        self.regex_atoms = regex_atoms

    def error(self, message: str, pos: Optional[int] = None) -> FormulaSyntaxError:
        return FormulaSyntaxError(message, self.pos if pos is None else pos)

    def skip_ws(self) -> None:
        while self.pos < len(self.text) and self.text[self.pos].isspace():
            self.pos += 1

    def peek(self) -> str:
        self.skip_ws()
        return self.text[self.pos] if self.pos < len(self.text) else ""

    def take_ident(self) -> str:
        start = self.pos
        while self.pos < len(self.text) and (
            self.text[self.pos].isalnum() or self.text[self.pos] == "_"
        ):
            self.pos += 1
        if self.pos == start:
            raise self.error("expected a name")
        return self.text[start:self.pos]

    def expect(self, ch: str) -> None:
        if self.peek() != ch:
            raise self.error(f"expected {ch!r}")
        self.pos += 1

    def parse(self) -> Formula:
        f = self.parse_implies()
        if self.peek():
            raise self.error(f"unexpected {self.peek()!r}")
        return f

    def parse_implies(self) -> Formula:
        left = self.parse_or()
        if self.peek() == "-":
            if not self.text.startswith("->", self.pos):
                raise self.error("expected '->'")
            self.pos += 2
            return Implies(left, self.parse_implies())
        return left

    def parse_or(self) -> Formula:
        parts = [self.parse_and()]
        while self.peek() == "|":
            self.pos += 1
            parts.append(self.parse_and())
        expr = parts[-1]
        for part in reversed(parts[:-1]):
            expr = Or(part, expr)
        return expr

    def parse_and(self) -> Formula:
        parts = [self.parse_unary()]
        while self.peek() == "&":
            self.pos += 1
            parts.append(self.parse_unary())
        expr = parts[-1]
        for part in reversed(parts[:-1]):
            expr = And(part, expr)
        return expr

    def parse_unary(self) -> Formula:
        ch = self.peek()
        if ch == "!":
            self.pos += 1
            return Not(self.parse_unary())
        if ch == "<" or ch == "[":
            close = ">" if ch == "<" else "]"
            start = self.pos
            self.pos += 1
            name = self.take_ident()
            self.expect(close)
            try:
                relation = Relation(name)
            except ValueError:
                raise self.error(f"unknown modality {name!r}", start) from None
            node = Diamond if ch == "<" else Box
            return node(relation, self.parse_unary())
        return self.parse_primary()

    def parse_primary(self) -> Formula:
        ch = self.peek()
        if ch == "(":
            self.pos += 1
            inner = self.parse_implies()
            self.expect(")")
            return inner
        if ch == "{":
            if not self.regex_atoms:
                raise self.error("regex atoms need the regex-atom variant")
            return self.parse_atom()
        if not (ch.isalnum() or ch == "_"):
            raise self.error("expected a formula")
        start = self.pos
        name = self.take_ident()
        if name in _KEYWORDS:
            return _KEYWORDS[name]
        if name in ("K", "C") and self.peek() == "{":
            agents = self.parse_agent_set(start)
            sub = self.parse_unary()
            if name == "K":
                if len(agents) != 1:
                    raise self.error("K takes exactly one agent", start)
                return K(agents[0], sub)
            return C(tuple(agents), sub)
        if self.regex_atoms:
            return Atom(Sym(name))
        return Var(name)

    def parse_agent_set(self, start: int) -> List[AgentRef]:
        self.expect("{")
        agents: List[AgentRef] = []
        while True:
            name = self.take_ident()
            agents.append(int(name) if name.isdigit() else name)
            ch = self.peek()
            if ch == ",":
                self.pos += 1
                continue
            self.expect("}")
            return agents

    def parse_atom(self) -> Formula:
        open_pos = self.pos
        close = self.text.find("}", self.pos)
        if close < 0:
            raise self.error("unterminated regex atom", open_pos)
        inner = self.text[self.pos + 1:close]
        try:
            expr = parse_regex(inner, predicate_mode=True)
        except ValueError as exc:
            raise self.error(f"bad regex atom: {exc}", open_pos) from exc
        self.pos = close + 1
        return Atom(expr)


def parse_plus(text: str) -> Formula:
    """Parse a formula of the plus variant (identifier atoms)."""
    return _FormulaParser(text, regex_atoms=False).parse()


def parse_re(text: str) -> Formula:
    """Parse a formula of the regex-atom variant: identifiers become
    single-letter regex atoms and `{ ... }` encloses a full regex over
    letter predicates."""
    return _FormulaParser(text, regex_atoms=True).parse()


# ---------------------------------------------------------------------------
# Printing

_PREC_IMPLIES = 0
_PREC_OR = 1
_PREC_AND = 2
_PREC_UNARY = 3


def format_formula(f: Formula) -> str:
    """Surface syntax; parse_plus/parse_re of the result rebuilds `f`."""

    def agent_set(agents: Sequence[AgentRef]) -> str:
        return "{" + ",".join(str(a) for a in agents) + "}"

    def go(node: Formula, level: int) -> str:
        if isinstance(node, Pi):
            return "pi"
        if isinstance(node, Top):
            return "true"
        if isinstance(node, Bot):
            return "false"
        if isinstance(node, Var):
            return node.name
        if isinstance(node, Atom):
            return "{" + regex_to_text(node.expr) + "}"
        if isinstance(node, Not):
            return wrap("!" + go(node.sub, _PREC_UNARY), _PREC_UNARY, level)
        if isinstance(node, And):
            text = f"{go(node.left, _PREC_AND + 1)} & {go(node.right, _PREC_AND)}"
            return wrap(text, _PREC_AND, level)
        if isinstance(node, Or):
            text = f"{go(node.left, _PREC_OR + 1)} | {go(node.right, _PREC_OR)}"
            return wrap(text, _PREC_OR, level)
        if isinstance(node, Implies):
            text = f"{go(node.left, _PREC_IMPLIES + 1)} -> {go(node.right, _PREC_IMPLIES)}"
            return wrap(text, _PREC_IMPLIES, level)
        if isinstance(node, K):
            return wrap(f"K{agent_set((node.agent,))} {go(node.sub, _PREC_UNARY)}",
                        _PREC_UNARY, level)
        if isinstance(node, C):
            return wrap(f"C{agent_set(node.group)} {go(node.sub, _PREC_UNARY)}",
                        _PREC_UNARY, level)
        if isinstance(node, Diamond):
            return wrap(f"<{node.relation.value}> {go(node.sub, _PREC_UNARY)}",
                        _PREC_UNARY, level)
        if isinstance(node, Box):
            return wrap(f"[{node.relation.value}] {go(node.sub, _PREC_UNARY)}",
                        _PREC_UNARY, level)
        raise TypeError(f"not a formula node: {node!r}")

    def wrap(text: str, prec: int, level: int) -> str:
        return f"({text})" if prec < level else text

    return go(f, 0)


# ---------------------------------------------------------------------------
# Rewrites

def normalize(f: Formula) -> Formula:
    """Remove sugar: Or/Implies into !/&, boxes into !<X>!."""
    if isinstance(f, Not):
        return Not(normalize(f.sub))
    if isinstance(f, And):
        return And(normalize(f.left), normalize(f.right))
    if isinstance(f, Or):
        return Not(And(Not(normalize(f.left)), Not(normalize(f.right))))
    if isinstance(f, Implies):
        return Not(And(normalize(f.left), Not(normalize(f.right))))
    if isinstance(f, K):
        return K(f.agent, normalize(f.sub))
    if isinstance(f, C):
        return C(f.group, normalize(f.sub))
    if isinstance(f, Diamond):
        return Diamond(f.relation, normalize(f.sub))
    if isinstance(f, Box):
        return Not(Diamond(f.relation, Not(normalize(f.sub))))
    return f


def _map_children(f: Formula, fn) -> Formula:
    if isinstance(f, Not):
        return Not(fn(f.sub))
    if isinstance(f, And):
        return And(fn(f.left), fn(f.right))
    if isinstance(f, Or):
        return Or(fn(f.left), fn(f.right))
    if isinstance(f, Implies):
        return Implies(fn(f.left), fn(f.right))
    if isinstance(f, K):
        return K(f.agent, fn(f.sub))
    if isinstance(f, C):
        return C(f.group, fn(f.sub))
    if isinstance(f, Diamond):
        return Diamond(f.relation, fn(f.sub))
    if isinstance(f, Box):
        return Box(f.relation, fn(f.sub))
    return f


def eliminate_L(f: Formula) -> Formula:
    """Rewrite every later-modality in terms of the meets-modality:
    <L>g becomes <A>(!pi & <A>g), and dually for boxes and inverses."""
    if isinstance(f, Diamond) and f.relation in (Relation.L, Relation.LBAR):
        meets = Relation.A if f.relation is Relation.L else Relation.ABAR
        return Diamond(meets, And(Not(PI), Diamond(meets, eliminate_L(f.sub))))
    if isinstance(f, Box) and f.relation in (Relation.L, Relation.LBAR):
        meets = Relation.A if f.relation is Relation.L else Relation.ABAR
        return Not(Diamond(meets, And(Not(PI), Diamond(meets, Not(eliminate_L(f.sub))))))
    return _map_children(f, eliminate_L)


def expand_N(f: Formula) -> Formula:
    """Rewrite the next-modality through meets and begins: <N>g becomes
    <A>(!pi & [B][B]false & <A>g). The boxed middle conjunct pins the
    bridging interval to length exactly two (no strict prefix of a
    strict prefix), so the target starts one step after the right
    endpoint. Used for cross-validation only; the bounded checker keeps
    the native modality."""
    if isinstance(f, Diamond) and f.relation is Relation.N:
        bridge = And(Not(PI), And(Box(Relation.B, Box(Relation.B, BOT)),
                                  Diamond(Relation.A, expand_N(f.sub))))
        return Diamond(Relation.A, bridge)
    if isinstance(f, Box) and f.relation is Relation.N:
        bridge = And(Not(PI), And(Box(Relation.B, Box(Relation.B, BOT)),
                                  Diamond(Relation.A, Not(expand_N(f.sub)))))
        return Not(Diamond(Relation.A, bridge))
    return _map_children(f, expand_N)


# ---------------------------------------------------------------------------
# Structure queries

def relations_of(f: Formula) -> Set[Relation]:
    """Interval relations used anywhere in the formula (boxes count as
    their underlying diamond)."""
    out: Set[Relation] = set()

    def walk(node: Formula) -> None:
        if isinstance(node, (Diamond, Box)):
            out.add(node.relation)
            walk(node.sub)
        elif isinstance(node, Not):
            walk(node.sub)
        elif isinstance(node, (And, Or, Implies)):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, (K, C)):
            walk(node.sub)

    walk(f)
    return out


def fragment_of(f: Formula) -> Fragment:
    rels = relations_of(f)
    if rels <= _BDE_RELATIONS:
        return Fragment.BDE
    if rels <= _ABLN_RELATIONS:
        return Fragment.ABLN
    return Fragment.FULL


def modal_free(f: Formula) -> bool:
    if isinstance(f, (K, C, Diamond, Box)):
        return False
    if isinstance(f, Not):
        return modal_free(f.sub)
    if isinstance(f, (And, Or, Implies)):
        return modal_free(f.left) and modal_free(f.right)
    return True


def modal_depth(f: Formula) -> int:
    if isinstance(f, (K, C)):
        return 1 + modal_depth(f.sub)
    if isinstance(f, (Diamond, Box)):
        return 1 + modal_depth(f.sub)
    if isinstance(f, Not):
        return modal_depth(f.sub)
    if isinstance(f, (And, Or, Implies)):
        return max(modal_depth(f.left), modal_depth(f.right))
    return 0


def ast_size(f: Formula) -> int:
    if isinstance(f, Not):
        return 1 + ast_size(f.sub)
    if isinstance(f, (And, Or, Implies)):
        return 1 + ast_size(f.left) + ast_size(f.right)
    if isinstance(f, (K, C, Diamond, Box)):
        return 1 + ast_size(f.sub)
    return 1


def variables_of(f: Formula) -> Set[str]:
    """Variables named by the formula; for regex atoms, the variables
    appearing in letter predicates (`T` names none)."""
    out: Set[str] = set()

    def pred_vars(symbol: str) -> Iterator[str]:
        if symbol == "T":
            return
        if symbol.startswith("!"):
            yield symbol[1:]
        elif symbol.startswith("(") and symbol.endswith(")"):
            inner = symbol[1:-1]
            for part in inner.split(","):
                if part:
                    yield part
        else:
            yield symbol

    def walk(node: Formula) -> None:
        if isinstance(node, Var):
            out.add(node.name)
        elif isinstance(node, Atom):
            for symbol in symbols_of(node.expr):
                out.update(pred_vars(symbol))
        elif isinstance(node, Not):
            walk(node.sub)
        elif isinstance(node, (And, Or, Implies)):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, (K, C, Diamond, Box)):
            walk(node.sub)

    walk(f)
    return out


def letter_predicate_holds(symbol: str, valuation: FrozenSet[str]) -> bool:
    """Interpret one letter predicate against the set of variables true
    at a configuration: `T` any letter, `!p` absence, `(p,q)` the exact
    valuation, a bare name presence."""
    if symbol == "T":
        return True
    if symbol.startswith("!"):
        return symbol[1:] not in valuation
    if symbol.startswith("(") and symbol.endswith(")"):
        wanted = {part for part in symbol[1:-1].split(",") if part}
        return valuation == wanted
    return symbol in valuation


def resolve_agents(sys: InterpretedSystem, f: Formula) -> Formula:
    """Replace agent names in K/C by indices and bounds-check indices."""
    by_name = {agent.name: i for i, agent in enumerate(sys.agents)}

    def resolve(ref: AgentRef) -> int:
        if isinstance(ref, str):
            if ref not in by_name:
                raise ValueError(f"unknown agent {ref!r}")
            return by_name[ref]
        if not 0 <= ref < len(sys.agents):
            raise ValueError(f"agent index {ref} out of range")
        return ref

    def walk(node: Formula) -> Formula:
        if isinstance(node, K):
            return K(resolve(node.agent), walk(node.sub))
        if isinstance(node, C):
            return C(tuple(resolve(a) for a in node.group), walk(node.sub))
        return _map_children(node, walk)

    return walk(f)


# ---------------------------------------------------------------------------
# Top-level modal subformulas and the interval-type bound

def top_level_subformulas(f: Formula) -> List[Tuple[str, Formula]]:
    """Maximal modal subformulas reachable through Boolean connectives
    only, as (modality label, operand) pairs in reading order with
    duplicates collapsed. Sugar is normalized first, so a box surfaces
    as its diamond with a negated operand."""
    out: List[Tuple[str, Formula]] = []
    seen: Set[Tuple[str, Formula]] = set()

    def walk(node: Formula) -> None:
        if isinstance(node, Not):
            walk(node.sub)
        elif isinstance(node, And):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, K):
            emit(f"K{{{node.agent}}}", node.sub)
        elif isinstance(node, C):
            emit("C{" + ",".join(str(a) for a in node.group) + "}", node.sub)
        elif isinstance(node, Diamond):
            emit(f"<{node.relation.value}>", node.sub)

    def emit(label: str, operand: Formula) -> None:
        entry = (label, operand)
        if entry not in seen:
            seen.add(entry)
            out.append(entry)

    walk(normalize(f))
    return out


def _require_post_elimination_abln(f: Formula) -> Formula:
    g = eliminate_L(f)
    rels = relations_of(g)
    extra = rels - {Relation.A, Relation.BBAR, Relation.N}
    if extra:
        names = ", ".join(sorted(r.value for r in extra))
        raise FragmentError(
            f"interval-type bound needs the A/Bbar/L/N fragment; saw {names}"
        )
    return g


def _fis_base(sys: InterpretedSystem) -> int:
    base = 2 * len(sys.all_configs) ** 2
    for var in sys.variables:
        base *= 2 ** len(sys.dfa_for(var).states)
    return base


def fis_bound(sys: InterpretedSystem, f: Formula) -> int:
    """Exact interval-type bound: with base b = 2|G|^2 * prod over
    variables of 2^(minimal DFA size), the bound of f is b times
    2^(bound of operand) for each distinct top-level modal subformula.
    Grows non-elementarily with modal depth; exact integers throughout,
    so depth two is already astronomically large on most systems (use
    fis_bound_saturating for comparisons)."""
    g = _require_post_elimination_abln(f)

    def go(node: Formula) -> int:
        value = _fis_base(sys)
        for _, operand in top_level_subformulas(node):
            value *= 2 ** go(operand)
        return value

    return go(g)


def fis_bound_saturating(sys: InterpretedSystem, f: Formula, cap: int) -> int:
    """min(fis_bound, cap) without building infeasible integers: any
    intermediate reaching the cap short-circuits. Exact below the cap."""
    if cap < 1:
        raise ValueError("cap must be positive")
    g = _require_post_elimination_abln(f)

    def go(node: Formula, cap: int) -> int:
        value = _fis_base(sys)
        if value >= cap:
            return cap
        for _, operand in top_level_subformulas(node):
            # 2^e >= cap whenever e reaches cap.bit_length()
            exponent = go(operand, cap.bit_length())
            if exponent >= cap.bit_length():
                return cap
            value *= 2 ** exponent
            if value >= cap:
                return cap
        return value

    return go(g, cap)


def tight_bound(sys: InterpretedSystem, f: Formula) -> int:
    """Alternative bound counting DFA states directly instead of their
    powersets: 2|G|^2 * prod |Q_q| * prod 2^(tight of operand) + 1. The
    +1 keeps the count strictly above the observed interval types."""
    g = _require_post_elimination_abln(f)

    def base() -> int:
        value = 2 * len(sys.all_configs) ** 2
        for var in sys.variables:
            value *= len(sys.dfa_for(var).states)
        return value

    def go(node: Formula) -> int:
        value = base()
        for _, operand in top_level_subformulas(node):
            value *= 2 ** go(operand)
        return value + 1

    return go(g)


def tight_bound_saturating(sys: InterpretedSystem, f: Formula, cap: int) -> int:
    if cap < 1:
        raise ValueError("cap must be positive")
    g = _require_post_elimination_abln(f)

    def base() -> int:
        value = 2 * len(sys.all_configs) ** 2
        for var in sys.variables:
            value *= len(sys.dfa_for(var).states)
        return value

    def go(node: Formula, cap: int) -> int:
        value = base()
        if value >= cap:
            return cap
        for _, operand in top_level_subformulas(node):
            exponent = go(operand, cap.bit_length())
            if exponent >= cap.bit_length():
                return cap
            value *= 2 ** exponent
            if value >= cap:
                return cap
        return min(value + 1, cap)

    return go(g, cap)
