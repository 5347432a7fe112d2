"""Decision procedure for the begins/during/ends fragment.

Every temporal step shrinks the interval and epistemic steps preserve
its length, so plain recursion over the formula with explicit
universal/existential loops decides the fragment exactly: no bounds,
no histories. Atoms go through the compiled automata (`label_holds`),
which keeps this engine on a different code path from the oracle's
derivative-based evaluation.
"""

from __future__ import annotations

from typing import Dict, List, Optional, Tuple

from .formulas import (
    And,
    Atom,
    Bot,
    C,
    Diamond,
    Formula,
    Fragment,
    FragmentError,
    K,
    Not,
    Pi,
    Top,
    Var,
    format_formula,
    fragment_of,
    normalize,
    resolve_agents,
)
from .systems import (
    GlobalConfig,
    InterpretedSystem,
    Interval,
    Relation,
    allen_successors,
    common_class,
    epi_class,
    label_holds,
    validate_interval,
)

_BDE = (Relation.B, Relation.D, Relation.E)


def check_bde(
    sys: InterpretedSystem,
    interval: Interval,
    f: Formula,
    use_cache: bool = False,
    trace: Optional[List[str]] = None,
) -> bool:
    """Exact verdict for a begins/during/ends-fragment formula.

    The optional cache is keyed by (configuration sequence, subformula
    identity); the default is cache-free recursion. `trace`, when a
    list is passed, receives one line per failed universal branch and
    per exhausted existential enumeration, innermost first.
    """
    if fragment_of(f) is not Fragment.BDE:
        raise FragmentError(
            f"not in the begins/during/ends fragment: {format_formula(f)}"
        )
    validate_interval(sys, interval)
    root = normalize(resolve_agents(sys, f))
    limit = len(interval)
    cache: Optional[Dict[Tuple[Tuple[GlobalConfig, ...], int], bool]] = (
        {} if use_cache else None
    )

    def name_of(cfgs: Tuple[GlobalConfig, ...]) -> str:
        return " ".join(sys.display(g) for g in cfgs)

    def note(message: str) -> None:
        if trace is not None:
            trace.append(message)

    def go(node: Formula, cfgs: Tuple[GlobalConfig, ...]) -> bool:
        # temporal steps only ever shrink the interval
        assert len(cfgs) <= limit
        if cache is None:
            return evaluate(node, cfgs)
        key = (cfgs, id(node))
        if key not in cache:
            cache[key] = evaluate(node, cfgs)
        return cache[key]

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
            return not go(node.sub, cfgs)
        if isinstance(node, And):
            return go(node.left, cfgs) and go(node.right, cfgs)
        if isinstance(node, K):
            for member in epi_class(sys, Interval(cfgs), node.agent):
                if not go(node.sub, member.configs):
                    note(f"K{{{node.agent}}} fails at {name_of(member.configs)}")
                    return False
            return True
        if isinstance(node, C):
            for member in common_class(sys, Interval(cfgs), node.group):
                if not go(node.sub, member.configs):
                    group = ",".join(str(a) for a in node.group)
                    note(f"C{{{group}}} fails at {name_of(member.configs)}")
                    return False
            return True
        if isinstance(node, Diamond):
            if node.relation not in _BDE:
                raise FragmentError(f"relation {node.relation.value} not in fragment")
            for candidate in allen_successors(sys, Interval(cfgs), node.relation):
                if go(node.sub, candidate.configs):
                    return True
            note(f"<{node.relation.value}> exhausted at {name_of(cfgs)}")
            return False
        raise TypeError(f"not a normalized formula node: {node!r}")

    return go(root, interval.configs)
