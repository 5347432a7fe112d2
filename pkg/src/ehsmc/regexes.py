"""Regular expressions over finite alphabets of opaque symbols.

Two independent evaluation routes are provided on purpose. `denotes`
decides membership directly on the expression tree via derivatives,
while `compile_regex` builds a complete minimal DFA through the
Thompson / subset-construction / minimization pipeline. The routes
share no code so they can cross-validate each other.
"""

from __future__ import annotations

import re as _stdre
from dataclasses import dataclass
from typing import (
    Callable,
    Dict,
    FrozenSet,
    Iterable,
    List,
    Optional,
    Sequence,
    Set,
    Tuple,
)

Symbol = str


@dataclass(frozen=True)
class Alphabet:
    """Ordered finite set of opaque symbol identifiers.

    Symbols are kept sorted lexicographically so that state numbering
    and DOT output downstream are reproducible.
    """

    symbols: Tuple[Symbol, ...]

    def __post_init__(self) -> None:
        syms = tuple(self.symbols)
        if not syms:
            raise ValueError("alphabet must be non-empty")
        if len(set(syms)) != len(syms):
            raise ValueError("alphabet symbols must be pairwise distinct")
        object.__setattr__(self, "symbols", tuple(sorted(syms)))

    def __contains__(self, symbol: object) -> bool:
        return symbol in self.symbols

    def __iter__(self):
        return iter(self.symbols)

    def __len__(self) -> int:
        return len(self.symbols)


class RegexExpr:
    """Base class for regular-expression AST nodes; all nodes are immutable."""

    __slots__ = ()


@dataclass(frozen=True)
class Empty(RegexExpr):
    """Denotes the empty language."""


@dataclass(frozen=True)
class Epsilon(RegexExpr):
    """Denotes the language containing only the empty word."""


@dataclass(frozen=True)
class Sym(RegexExpr):
    symbol: Symbol


@dataclass(frozen=True)
class Concat(RegexExpr):
    left: RegexExpr
    right: RegexExpr


@dataclass(frozen=True)
class Union(RegexExpr):
    left: RegexExpr
    right: RegexExpr


@dataclass(frozen=True)
class Star(RegexExpr):
    inner: RegexExpr


EMPTY = Empty()
EPSILON = Epsilon()


def symbols_of(expr: RegexExpr) -> Set[Symbol]:
    """All symbols occurring in the expression."""
    out: Set[Symbol] = set()
    stack = [expr]
    while stack:
        node = stack.pop()
        if isinstance(node, Sym):
            out.add(node.symbol)
        elif isinstance(node, (Concat, Union)):
            stack.append(node.left)
            stack.append(node.right)
        elif isinstance(node, Star):
            stack.append(node.inner)
    return out


def union_of(parts: Sequence[RegexExpr]) -> RegexExpr:
    """Right-associated union of the given parts; Empty for no parts."""
    if not parts:
        return EMPTY
    expr = parts[-1]
    for part in reversed(parts[:-1]):
        expr = Union(part, expr)
    return expr


# ---------------------------------------------------------------------------
# Parsing


class RegexSyntaxError(ValueError):
    def __init__(self, message: str, position: int):
        super().__init__(f"{message} (at position {position})")
        self.position = position


class UnknownSymbolError(ValueError):
    def __init__(self, token: str, position: int):
        super().__init__(f"unknown symbol {token!r} (at position {position})")
        self.token = token
        self.position = position


_IDENT = _stdre.compile(r"[A-Za-z0-9_.]+")


class _Tokenizer:
    """Lexer for the concrete regex syntax.

    A '(' immediately followed by an identifier list with commas is read
    as one inline tuple symbol such as "(l0,l1)"; a lone parenthesized
    expression is grouping. Tuple symbols therefore need at least two
    components, which is why single-agent systems must use aliases.
    """

    def __init__(self, text: str, predicate_mode: bool = False):
        self.text = text
        self.pos = 0
        self.predicate_mode = predicate_mode
        self.tokens: List[Tuple[str, str, int]] = []  # (kind, value, pos)
        self._scan()

    def _scan(self) -> None:
        text = self.text
        n = len(text)
        i = 0
        while i < n:
            ch = text[i]
            if ch.isspace():
                i += 1
                continue
            if ch in "*+|;)":
                self.tokens.append(("op", ch, i))
                i += 1
                continue
            if ch == "(":
                tup = self._try_tuple(i)
                if tup is not None:
                    value, end = tup
                    self.tokens.append(("sym", value, i))
                    i = end
                else:
                    self.tokens.append(("op", "(", i))
                    i += 1
                continue
            if ch == "!" and self.predicate_mode:
                m = _IDENT.match(text, i + 1)
                if not m:
                    raise RegexSyntaxError("dangling '!'", i)
                self.tokens.append(("sym", "!" + m.group(0), i))
                i = m.end()
                continue
            m = _IDENT.match(text, i)
            if m:
                word = m.group(0)
                if word == "empty":
                    self.tokens.append(("empty", word, i))
                elif word == "eps":
                    self.tokens.append(("eps", word, i))
                else:
                    self.tokens.append(("sym", word, i))
                i = m.end()
                continue
            raise RegexSyntaxError(f"unexpected character {ch!r}", i)
        self.tokens.append(("eof", "", n))

    def _try_tuple(self, start: int) -> Optional[Tuple[str, int]]:
        # Commit to a tuple symbol only on "( IDENT ," lookahead.
        text = self.text
        i = start + 1
        parts: List[str] = []
        while True:
            while i < len(text) and text[i].isspace():
                i += 1
            m = _IDENT.match(text, i)
            if not m:
                return None
            parts.append(m.group(0))
            i = m.end()
            while i < len(text) and text[i].isspace():
                i += 1
            if i < len(text) and text[i] == ",":
                i += 1
                continue
            if i < len(text) and text[i] == ")" and len(parts) >= 2:
                return "(" + ",".join(parts) + ")", i + 1
            return None


class _RegexParser:
    def __init__(
        self,
        text: str,
        alphabet: Optional[Alphabet],
        aliases: Optional[Dict[str, Symbol]] = None,
        predicate_mode: bool = False,
    ):
        self.tokens = _Tokenizer(text, predicate_mode).tokens
        self.index = 0
        self.alphabet = alphabet
        self.aliases = aliases or {}

    def peek(self) -> Tuple[str, str, int]:
        return self.tokens[self.index]

    def consume(self) -> Tuple[str, str, int]:
        tok = self.tokens[self.index]
        self.index += 1
        return tok

    def parse(self) -> RegexExpr:
        expr = self._union()
        kind, value, pos = self.peek()
        if kind != "eof":
            raise RegexSyntaxError(f"unexpected token {value!r}", pos)
        return expr

    def _union(self) -> RegexExpr:
        parts = [self._concat()]
        while self.peek()[0] == "op" and self.peek()[1] in "+|":
            self.consume()
            parts.append(self._concat())
        expr = parts[-1]
        for part in reversed(parts[:-1]):
            expr = Union(part, expr)
        return expr

    def _concat(self) -> RegexExpr:
        parts = [self._postfix()]
        while True:
            kind, value, _ = self.peek()
            if kind == "op" and value == ";":
                self.consume()
                parts.append(self._postfix())
            elif kind in ("sym", "empty", "eps") or (kind == "op" and value == "("):
                parts.append(self._postfix())
            else:
                break
        expr = parts[-1]
        for part in reversed(parts[:-1]):
            expr = Concat(part, expr)
        return expr

    def _postfix(self) -> RegexExpr:
        expr = self._primary()
        while self.peek()[0] == "op" and self.peek()[1] == "*":
            self.consume()
            expr = Star(expr)
        return expr

    def _primary(self) -> RegexExpr:
        kind, value, pos = self.consume()
        if kind == "empty":
            return EMPTY
        if kind == "eps":
            return EPSILON
        if kind == "sym":
            return Sym(self._resolve(value, pos))
        if kind == "op" and value == "(":
            expr = self._union()
            kind, value, pos = self.consume()
            if not (kind == "op" and value == ")"):
                raise RegexSyntaxError("expected ')'", pos)
            return expr
        raise RegexSyntaxError(f"unexpected token {value!r}", pos)

    def _resolve(self, token: str, pos: int) -> Symbol:
        if token in self.aliases:
            return self.aliases[token]
        if self.alphabet is None or token in self.alphabet:
            return token
        raise UnknownSymbolError(token, pos)


def parse_regex(
    text: str,
    alphabet: Optional[Alphabet] = None,
    aliases: Optional[Dict[str, Symbol]] = None,
    predicate_mode: bool = False,
) -> RegexExpr:
    """Parse the concrete regex syntax into an AST.

    Precedence is star > concatenation > union; juxtaposition and ";"
    both denote concatenation; "empty" and "eps" are the constant
    languages. With `alphabet` given, symbol tokens must name alphabet
    members or keys of `aliases` (which map display names to symbols).
    With alphabet None any identifier is accepted, which is how the
    letter-predicate atoms of the regex-labelled logic are parsed.
    """
    return _RegexParser(text, alphabet, aliases, predicate_mode).parse()


def regex_to_text(expr: RegexExpr, display: Optional[Callable[[Symbol], str]] = None) -> str:
    """Render an AST back to concrete syntax (parse/print round-trips)."""
    disp = display or (lambda s: s)

    def prec(e: RegexExpr) -> int:
        if isinstance(e, Union):
            return 0
        if isinstance(e, Concat):
            return 1
        return 2

    def go(e: RegexExpr, outer: int) -> str:
        if isinstance(e, Empty):
            return "empty"
        if isinstance(e, Epsilon):
            return "eps"
        if isinstance(e, Sym):
            return disp(e.symbol)
        if isinstance(e, Union):
            # Chains re-parse right-associated, so a union on the left
            # keeps its parentheses.
            body = f"{go(e.left, 1)} + {go(e.right, 0)}"
            return f"({body})" if outer > 0 else body
        if isinstance(e, Concat):
            body = f"{go(e.left, 2)} {go(e.right, 1)}"
            return f"({body})" if outer > 1 else body
        if isinstance(e, Star):
            return f"{go(e.inner, 2)}*"
        raise TypeError(f"not a regex node: {e!r}")

    return go(expr, 0)


# ---------------------------------------------------------------------------
# Membership by derivatives (the reference route, independent of the DFA)


def _nullable(e: RegexExpr) -> bool:
    if isinstance(e, (Epsilon, Star)):
        return True
    if isinstance(e, (Empty, Sym)):
        return False
    if isinstance(e, Concat):
        return _nullable(e.left) and _nullable(e.right)
    if isinstance(e, Union):
        return _nullable(e.left) or _nullable(e.right)
    raise TypeError(f"not a regex node: {e!r}")


def _mk_concat(left: RegexExpr, right: RegexExpr) -> RegexExpr:
    if isinstance(left, Empty) or isinstance(right, Empty):
        return EMPTY
    if isinstance(left, Epsilon):
        return right
    if isinstance(right, Epsilon):
        return left
    return Concat(left, right)


def _mk_union(left: RegexExpr, right: RegexExpr) -> RegexExpr:
    if isinstance(left, Empty):
        return right
    if isinstance(right, Empty):
        return left
    if left == right:
        return left
    return Union(left, right)


def _derive(e: RegexExpr, letter: object, match: Callable[[Symbol, object], bool]) -> RegexExpr:
    if isinstance(e, (Empty, Epsilon)):
        return EMPTY
    if isinstance(e, Sym):
        return EPSILON if match(e.symbol, letter) else EMPTY
    if isinstance(e, Union):
        return _mk_union(_derive(e.left, letter, match), _derive(e.right, letter, match))
    if isinstance(e, Concat):
        head = _mk_concat(_derive(e.left, letter, match), e.right)
        if _nullable(e.left):
            return _mk_union(head, _derive(e.right, letter, match))
        return head
    if isinstance(e, Star):
        return _mk_concat(_derive(e.inner, letter, match), e)
    raise TypeError(f"not a regex node: {e!r}")


def denotes(
    expr: RegexExpr,
    word: Sequence[object],
    match: Optional[Callable[[Symbol, object], bool]] = None,
) -> bool:
    """Word membership decided by successive derivatives.

    With the default matcher, letters are compared to symbols by
    equality. A custom `match` lets the same machinery decide words of
    valuation sets against letter predicates.
    """
    matcher = match or (lambda sym, letter: sym == letter)
    current = expr
    for letter in word:
        current = _derive(current, letter, matcher)
        if isinstance(current, Empty):
            return False
    return _nullable(current)


# ---------------------------------------------------------------------------
# Compilation to a complete minimal DFA


@dataclass(frozen=True, eq=False)
class Dfa:
    """Complete minimal DFA; step is total over the alphabet.

    `sink` names the dead state (non-accepting, all loops) when one
    exists. States are numbered z1, z2, ... in breadth-first order from
    the initial state, the dead state being called zbot unless it is
    initial.
    """

    states: Tuple[str, ...]
    initial: str
    accepting: FrozenSet[str]
    step: Dict[Tuple[str, Symbol], str]
    alphabet: Alphabet
    sink: Optional[str] = None


def run(dfa: Dfa, word: Sequence[Symbol], start: Optional[str] = None) -> str:
    """State reached from `start` (default: initial) after reading the word."""
    state = dfa.initial if start is None else start
    for symbol in word:
        state = dfa.step[(state, symbol)]
    return state


def accepts(dfa: Dfa, word: Sequence[Symbol]) -> bool:
    return run(dfa, word) in dfa.accepting


class _Nfa:
    def __init__(self) -> None:
        self.count = 0
        self.eps: Dict[int, List[int]] = {}
        self.trans: Dict[Tuple[int, Symbol], List[int]] = {}

    def fresh(self) -> int:
        self.count += 1
        return self.count - 1

    def add_eps(self, src: int, dst: int) -> None:
        self.eps.setdefault(src, []).append(dst)

    def add_sym(self, src: int, symbol: Symbol, dst: int) -> None:
        self.trans.setdefault((src, symbol), []).append(dst)


def _thompson(expr: RegexExpr, nfa: _Nfa) -> Tuple[int, int]:
    start, accept = nfa.fresh(), nfa.fresh()
    if isinstance(expr, Empty):
        pass
    elif isinstance(expr, Epsilon):
        nfa.add_eps(start, accept)
    elif isinstance(expr, Sym):
        nfa.add_sym(start, expr.symbol, accept)
    elif isinstance(expr, Concat):
        ls, la = _thompson(expr.left, nfa)
        rs, ra = _thompson(expr.right, nfa)
        nfa.add_eps(start, ls)
        nfa.add_eps(la, rs)
        nfa.add_eps(ra, accept)
    elif isinstance(expr, Union):
        ls, la = _thompson(expr.left, nfa)
        rs, ra = _thompson(expr.right, nfa)
        nfa.add_eps(start, ls)
        nfa.add_eps(start, rs)
        nfa.add_eps(la, accept)
        nfa.add_eps(ra, accept)
    elif isinstance(expr, Star):
        inner_s, inner_a = _thompson(expr.inner, nfa)
        nfa.add_eps(start, inner_s)
        nfa.add_eps(start, accept)
        nfa.add_eps(inner_a, inner_s)
        nfa.add_eps(inner_a, accept)
    else:
        raise TypeError(f"not a regex node: {expr!r}")
    return start, accept


def _closure(nfa: _Nfa, states: Iterable[int]) -> FrozenSet[int]:
    seen = set(states)
    stack = list(seen)
    while stack:
        s = stack.pop()
        for t in nfa.eps.get(s, ()):
            if t not in seen:
                seen.add(t)
                stack.append(t)
    return frozenset(seen)


def compile_regex(expr: RegexExpr, alphabet: Optional[Alphabet] = None) -> Dfa:
    """Compile to the complete minimal DFA for the expression.

    Pipeline: Thompson construction, epsilon-closure subset
    construction, completion with an explicit dead state, partition
    refinement to the unique minimal automaton. When `alphabet` is not
    given it is inferred from the symbols of the expression.
    """
    if alphabet is None:
        syms = symbols_of(expr)
        if not syms:
            raise ValueError(
                "cannot infer an alphabet from a symbol-free expression; pass one explicitly"
            )
        alphabet = Alphabet(tuple(syms))
    else:
        stray = symbols_of(expr) - set(alphabet.symbols)
        if stray:
            raise ValueError(f"expression symbols outside the alphabet: {sorted(stray)}")

    nfa = _Nfa()
    start, accept = _thompson(expr, nfa)

    # Subset construction; the empty subset acts as the dead state, so
    # the result is complete by construction.
    init = _closure(nfa, [start])
    subsets: Dict[FrozenSet[int], int] = {init: 0}
    order: List[FrozenSet[int]] = [init]
    delta: Dict[Tuple[int, Symbol], int] = {}
    queue = [init]
    while queue:
        current = queue.pop(0)
        for symbol in alphabet.symbols:
            moved = set()
            for s in current:
                moved.update(nfa.trans.get((s, symbol), ()))
            nxt = _closure(nfa, moved)
            if nxt not in subsets:
                subsets[nxt] = len(order)
                order.append(nxt)
                queue.append(nxt)
            delta[(subsets[current], symbol)] = subsets[nxt]
    accepting = {subsets[s] for s in order if accept in s}

    # Partition refinement down to the minimal automaton.
    n = len(order)
    block = [1 if i in accepting else 0 for i in range(n)]
    while True:
        signatures: Dict[Tuple, int] = {}
        new_block = [0] * n
        for i in range(n):
            sig = (block[i],) + tuple(
                block[delta[(i, a)]] for a in alphabet.symbols
            )
            if sig not in signatures:
                signatures[sig] = len(signatures)
            new_block[i] = signatures[sig]
        if new_block == block:
            break
        block = new_block

    # Quotient, then breadth-first renaming from the initial block.
    rep_delta: Dict[Tuple[int, Symbol], int] = {}
    block_accepting: Set[int] = set()
    for i in range(n):
        for a in alphabet.symbols:
            rep_delta[(block[i], a)] = block[delta[(i, a)]]
        if i in accepting:
            block_accepting.add(block[i])

    init_block = block[0]
    bfs_order: List[int] = [init_block]
    seen = {init_block}
    qi = 0
    while qi < len(bfs_order):
        b = bfs_order[qi]
        qi += 1
        for a in alphabet.symbols:
            t = rep_delta[(b, a)]
            if t not in seen:
                seen.add(t)
                bfs_order.append(t)

    def dead(b: int) -> bool:
        return b not in block_accepting and all(
            rep_delta[(b, a)] == b for a in alphabet.symbols
        )

    names: Dict[int, str] = {}
    counter = 1
    dead_block = next((b for b in bfs_order if dead(b)), None)
    for b in bfs_order:
        if b == dead_block and b != init_block:
            names[b] = "zbot"
        else:
            names[b] = f"z{counter}"
            counter += 1

    states = tuple(names[b] for b in bfs_order)
    step = {
        (names[b], a): names[rep_delta[(b, a)]]
        for b in bfs_order
        for a in alphabet.symbols
    }
    return Dfa(
        states=states,
        initial=names[init_block],
        accepting=frozenset(names[b] for b in bfs_order if b in block_accepting),
        step=step,
        alphabet=alphabet,
        sink=names[dead_block] if dead_block is not None else None,
    )


# ---------------------------------------------------------------------------
# Language shape classification


class LanguageShape:
    POINT_BASED = "PointBased"
    ENDPOINT_BASED = "EndpointBased"
    GENERAL = "General"


def language_shape(dfa: Dfa) -> str:
    """Classify the language as PointBased, EndpointBased or General.

    PointBased: every accepted word has length 1 (the empty language
    qualifies vacuously). EndpointBased: membership depends only on the
    first symbol, the last symbol and whether the length is 1; decided
    per symbol pair by checking that all reachable mid-states give the
    same acceptance. A language containing the empty word has no
    endpoints to depend on and is classified General.
    """
    acc = dfa.accepting

    # Accepting states at word lengths 0, 1 and >= 2.
    len1 = {dfa.step[(dfa.initial, a)] for a in dfa.alphabet.symbols}
    reach2: Set[str] = set()
    frontier = set(len1)
    while frontier:
        nxt = {
            dfa.step[(s, a)]
            for s in frontier
            for a in dfa.alphabet.symbols
        }
        frontier = nxt - reach2
        reach2 |= frontier

    eps_accepted = dfa.initial in acc
    long_accepted = bool(reach2 & acc)
    if not eps_accepted and not long_accepted:
        return LanguageShape.POINT_BASED
    if eps_accepted:
        return LanguageShape.GENERAL

    for a in dfa.alphabet.symbols:
        after_first = dfa.step[(dfa.initial, a)]
        mids = {after_first}
        frontier = {after_first}
        while frontier:
            nxt = {dfa.step[(s, b)] for s in frontier for b in dfa.alphabet.symbols}
            frontier = nxt - mids
            mids |= frontier
        for b in dfa.alphabet.symbols:
            verdicts = {dfa.step[(m, b)] in acc for m in mids}
            if len(verdicts) > 1:
                return LanguageShape.GENERAL
    return LanguageShape.ENDPOINT_BASED


# ---------------------------------------------------------------------------
# DOT export


def dfa_to_dot(dfa: Dfa, display: Optional[Callable[[Symbol], str]] = None) -> str:
    """Render the automaton in DOT; accepting states doubled, sink dashed."""
    disp = display or (lambda s: s)
    lines = ["digraph dfa {", "  rankdir=LR;", '  __init [shape=point, label=""];']
    for state in dfa.states:
        attrs = ["shape=doublecircle" if state in dfa.accepting else "shape=circle"]
        if state == dfa.sink:
            attrs.append("style=dashed")
        lines.append(f'  "{state}" [{", ".join(attrs)}];')
    lines.append(f'  __init -> "{dfa.initial}";')
    for src in dfa.states:
        grouped: Dict[str, List[str]] = {}
        for symbol in dfa.alphabet.symbols:
            grouped.setdefault(dfa.step[(src, symbol)], []).append(disp(symbol))
        for dst in sorted(grouped):
            label = ",".join(grouped[dst])
            lines.append(f'  "{src}" -> "{dst}" [label="{label}"];')
    lines.append("}")
    return "\n".join(lines)
