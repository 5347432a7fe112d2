"""Translations between the two surface logics.

A formula over variables with arbitrary regular labellings can be
rewritten to a regex-atom formula over a point-based relabelling of the
same system, and conversely any regex-atom formula over a point-based
system folds back into plain variables by composing the labelling
through the atoms. Both directions preserve verdicts interval by
interval and are deterministic, so translated artifacts are diffable.
"""

from __future__ import annotations

import hashlib
from typing import Dict, List, Tuple

from .formulas import (
    And,
    Atom,
    Bot,
    Box,
    C,
    Diamond,
    Formula,
    Implies,
    K,
    Not,
    Or,
    Pi,
    Top,
    Var,
    letter_predicate_holds,
)
from .regexes import (
    Concat,
    Empty,
    Epsilon,
    LanguageShape,
    RegexExpr,
    Star,
    Sym,
    Union,
    language_shape,
    regex_to_text,
)
from .systems import GlobalConfig, InterpretedSystem, config_str


def _expr_size(expr: RegexExpr) -> int:
    if isinstance(expr, (Empty, Epsilon, Sym)):
        return 1
    if isinstance(expr, Star):
        return 1 + _expr_size(expr.inner)
    return 1 + _expr_size(expr.left) + _expr_size(expr.right)


def _formula_size(f: Formula) -> int:
    if isinstance(f, Atom):
        return 1 + _expr_size(f.expr)
    if isinstance(f, Not):
        return 1 + _formula_size(f.sub)
    if isinstance(f, (And, Or, Implies)):
        return 1 + _formula_size(f.left) + _formula_size(f.right)
    if isinstance(f, (K, C, Diamond, Box)):
        return 1 + _formula_size(f.sub)
    return 1


def _var_occurrences(f: Formula) -> Dict[str, int]:
    counts: Dict[str, int] = {}

    def walk(node: Formula) -> None:
        if isinstance(node, Var):
            counts[node.name] = counts.get(node.name, 0) + 1
        elif isinstance(node, Not):
            walk(node.sub)
        elif isinstance(node, (And, Or, Implies)):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, (K, C, Diamond, Box)):
            walk(node.sub)

    walk(f)
    return counts


def _union_of(symbols: List[str]) -> RegexExpr:
    if not symbols:
        return Empty()
    expr: RegexExpr = Sym(symbols[-1])
    for s in reversed(symbols[:-1]):
        expr = Union(Sym(s), expr)
    return expr


def _require_point_based(sys: InterpretedSystem) -> None:
    for var in sys.variables:
        if language_shape(sys.dfa_for(var)) != LanguageShape.POINT_BASED:
            raise ValueError(
                f"labelling is not point-based: variable {var!r} accepts "
                f"words of length other than 1"
            )


def _point_valuations(
    sys: InterpretedSystem,
) -> Dict[GlobalConfig, frozenset]:
    """Variable set holding at each configuration's point interval."""
    out: Dict[GlobalConfig, frozenset] = {}
    dfas = {var: sys.dfa_for(var) for var in sys.variables}
    for g in sys.all_configs:
        sym = config_str(g)
        out[g] = frozenset(
            var
            for var, dfa in dfas.items()
            if dfa.step[(dfa.initial, sym)] in dfa.accepting
        )
    return out


def lambda_compose(sys: InterpretedSystem, r: RegexExpr) -> RegexExpr:
    """Rewrite a regex over letter predicates into a regex over the
    configuration symbols, reading each predicate against the
    point-based labelling: a bare variable becomes the union of its
    configurations (the empty set becomes the empty regex), `!p` the
    complement within the configuration space, `T` every configuration,
    and an explicit tuple the configurations with exactly that
    valuation."""
    _require_point_based(sys)
    valuations = _point_valuations(sys)

    def known(name: str) -> None:
        if name not in sys.labelling:
            raise KeyError(f"unknown variable {name!r}")

    def matching(symbol: str) -> List[str]:
        if symbol == "T":
            return [config_str(g) for g in sys.all_configs]
        if symbol.startswith("!"):
            known(symbol[1:])
        elif symbol.startswith("(") and symbol.endswith(")"):
            for part in symbol[1:-1].split(","):
                if part:
                    known(part)
        else:
            known(symbol)
        return [
            config_str(g)
            for g in sys.all_configs
            if letter_predicate_holds(symbol, valuations[g])
        ]

    def rewrite(expr: RegexExpr) -> RegexExpr:
        if isinstance(expr, (Empty, Epsilon)):
            return expr
        if isinstance(expr, Sym):
            return _union_of(matching(expr.symbol))
        if isinstance(expr, Star):
            return Star(rewrite(expr.inner))
        if isinstance(expr, Concat):
            return Concat(rewrite(expr.left), rewrite(expr.right))
        return Union(rewrite(expr.left), rewrite(expr.right))

    return rewrite(r)


def _fresh_config_name(sys: InterpretedSystem, g: GlobalConfig) -> str:
    shown = sys.display(g)
    if shown.startswith("("):
        shown = "_".join(g)
    return f"v_{shown}"


def to_point_based(
    sys: InterpretedSystem, f: Formula
) -> Tuple[InterpretedSystem, Formula]:
    """Move the labelling regexes into the formula: the output system
    labels one fresh variable at each reachable configuration's point
    interval, and every variable of the formula becomes a regex atom
    over those fresh variables. Verdicts are preserved interval by
    interval; symbols of unreachable configurations are rewritten to an
    empty-language subexpression since no model interval contains
    them."""
    fresh = {config_str(g): _fresh_config_name(sys, g) for g in sys.reachable}
    new_labelling: Dict[str, RegexExpr] = {
        fresh[config_str(g)]: Sym(config_str(g)) for g in sys.reachable
    }
    new_sys = InterpretedSystem(sys.agents, new_labelling, sys.aliases)

    def rewrite_expr(expr: RegexExpr) -> RegexExpr:
        if isinstance(expr, (Empty, Epsilon)):
            return expr
        if isinstance(expr, Sym):
            if expr.symbol not in fresh:
                return Empty()
            return Sym(fresh[expr.symbol])
        if isinstance(expr, Star):
            return Star(rewrite_expr(expr.inner))
        if isinstance(expr, Concat):
            return Concat(rewrite_expr(expr.left), rewrite_expr(expr.right))
        return Union(rewrite_expr(expr.left), rewrite_expr(expr.right))

    def rewrite(node: Formula) -> Formula:
        if isinstance(node, Var):
            if node.name not in sys.labelling:
                raise KeyError(f"unknown variable {node.name!r}")
            return Atom(rewrite_expr(sys.labelling[node.name]))
        if isinstance(node, Atom):
            raise ValueError("formula already carries regex atoms")
        if isinstance(node, (Pi, Top, Bot)):
            return node
        if isinstance(node, Not):
            return Not(rewrite(node.sub))
        if isinstance(node, And):
            return And(rewrite(node.left), rewrite(node.right))
        if isinstance(node, Or):
            return Or(rewrite(node.left), rewrite(node.right))
        if isinstance(node, Implies):
            return Implies(rewrite(node.left), rewrite(node.right))
        if isinstance(node, K):
            return K(node.agent, rewrite(node.sub))
        if isinstance(node, C):
            return C(node.group, rewrite(node.sub))
        if isinstance(node, Diamond):
            return Diamond(node.relation, rewrite(node.sub))
        return Box(node.relation, rewrite(node.sub))

    out = rewrite(f)
    # Linear growth: each variable occurrence inlines one labelling regex
    # (rewriting symbols is one-to-one, so sizes carry over unchanged).
    budget = _formula_size(f) + sum(
        _expr_size(sys.labelling[name]) * count
        for name, count in _var_occurrences(f).items()
    )
    assert _formula_size(out) <= budget
    return new_sys, out


def _atoms_in_order(f: Formula) -> List[Atom]:
    out: List[Atom] = []
    seen: set = set()

    def walk(node: Formula) -> None:
        if isinstance(node, Atom):
            key = regex_to_text(node.expr)
            if key not in seen:
                seen.add(key)
                out.append(node)
        elif isinstance(node, Not):
            walk(node.sub)
        elif isinstance(node, (And, Or, Implies)):
            walk(node.left)
            walk(node.right)
        elif isinstance(node, (K, C, Diamond, Box)):
            walk(node.sub)

    walk(f)
    return out


def atom_variable_name(expr: RegexExpr) -> str:
    digest = hashlib.sha256(regex_to_text(expr).encode()).hexdigest()
    return f"q_{digest[:8]}"


def to_regular_labelling(
    sys: InterpretedSystem, f: Formula
) -> Tuple[InterpretedSystem, Formula]:
    """Fold regex atoms back into the labelling: each distinct atom of
    the formula gets one fresh variable labelled by the composed regex
    over configurations. Requires every existing label to be
    point-based. Verdicts are preserved interval by interval."""
    _require_point_based(sys)
    atoms = _atoms_in_order(f)
    names: Dict[str, str] = {}
    new_labelling: Dict[str, RegexExpr] = dict(sys.labelling)
    for atom in atoms:
        key = regex_to_text(atom.expr)
        name = atom_variable_name(atom.expr)
        if name in new_labelling:
            raise ValueError(f"fresh variable name collision on {name!r}")
        names[key] = name
        new_labelling[name] = lambda_compose(sys, atom.expr)
    new_sys = InterpretedSystem(sys.agents, new_labelling, sys.aliases)

    def rewrite(node: Formula) -> Formula:
        if isinstance(node, Atom):
            return Var(names[regex_to_text(node.expr)])
        if isinstance(node, (Pi, Top, Bot, Var)):
            return node
        if isinstance(node, Not):
            return Not(rewrite(node.sub))
        if isinstance(node, And):
            return And(rewrite(node.left), rewrite(node.right))
        if isinstance(node, Or):
            return Or(rewrite(node.left), rewrite(node.right))
        if isinstance(node, Implies):
            return Implies(rewrite(node.left), rewrite(node.right))
        if isinstance(node, K):
            return K(node.agent, rewrite(node.sub))
        if isinstance(node, C):
            return C(node.group, rewrite(node.sub))
        if isinstance(node, Diamond):
            return Diamond(node.relation, rewrite(node.sub))
        return Box(node.relation, rewrite(node.sub))

    return new_sys, rewrite(f)
