"""Tests for the regular-expression engine.

The derivative-based `denotes` is the reference semantics; the DFA
pipeline is validated against it, never the other way round.
"""

import itertools

import pytest
from hypothesis import given, settings, strategies as st

from ehsmc.regexes import (
    EMPTY,
    EPSILON,
    Alphabet,
    Concat,
    LanguageShape,
    RegexSyntaxError,
    Star,
    Sym,
    Union,
    UnknownSymbolError,
    accepts,
    compile_regex,
    denotes,
    dfa_to_dot,
    language_shape,
    parse_regex,
    regex_to_text,
    run,
    symbols_of,
    union_of,
)

ALPHA = Alphabet(("g1", "g2", "g3"))
FIG4_TEXT = "g1 (g1+g2)* g3"


def fig4_expr():
    return parse_regex(FIG4_TEXT, ALPHA)


def all_words(symbols, max_len):
    for n in range(max_len + 1):
        yield from itertools.product(symbols, repeat=n)


# --- parsing ---------------------------------------------------------------


class TestParsing:
    def test_running_example_ast(self):
        expected = Concat(
            Sym("g1"), Concat(Star(Union(Sym("g1"), Sym("g2"))), Sym("g3"))
        )
        assert fig4_expr() == expected

    def test_eps_and_empty_literals(self):
        assert parse_regex("eps", ALPHA) == EPSILON
        assert parse_regex("empty", ALPHA) == EMPTY

    def test_unknown_symbol(self):
        with pytest.raises(UnknownSymbolError) as exc:
            parse_regex("g1 g4", ALPHA)
        assert "g4" in str(exc.value)

    def test_syntax_error_has_position(self):
        with pytest.raises(RegexSyntaxError):
            parse_regex("g1 +", ALPHA)
        with pytest.raises(RegexSyntaxError):
            parse_regex("(g1", ALPHA)

    def test_semicolon_and_pipe_are_synonyms(self):
        assert parse_regex("g1;g2", ALPHA) == parse_regex("g1 g2", ALPHA)
        assert parse_regex("g1|g2", ALPHA) == parse_regex("g1+g2", ALPHA)

    def test_aliases_resolve_to_symbols(self):
        alpha = Alphabet(("(l0,l1)", "(l0,l2)"))
        got = parse_regex("g1 g2", alpha, aliases={"g1": "(l0,l1)", "g2": "(l0,l2)"})
        assert got == Concat(Sym("(l0,l1)"), Sym("(l0,l2)"))

    def test_inline_tuple_symbols(self):
        alpha = Alphabet(("(l0,l1)", "(l0,l2)"))
        got = parse_regex("(l0,l1) (l0,l2)*", alpha)
        assert got == Concat(Sym("(l0,l1)"), Star(Sym("(l0,l2)")))

    def test_predicate_mode_accepts_negated_literals(self):
        got = parse_regex("p ; !p ; T", predicate_mode=True)
        assert got == Concat(Sym("p"), Concat(Sym("!p"), Sym("T")))


# --- denotes ---------------------------------------------------------------


class TestDenotes:
    def test_running_example_members(self):
        e = fig4_expr()
        assert denotes(e, ["g1", "g2", "g3"])
        assert denotes(e, ["g1", "g2", "g1", "g2", "g3"])

    def test_base_cases(self):
        assert not denotes(EMPTY, [])
        assert not denotes(EMPTY, ["g1"])
        assert denotes(EPSILON, [])
        assert not denotes(EPSILON, ["g1"])

    def test_rejections(self):
        e = fig4_expr()
        assert not denotes(e, ["g1"])
        assert not denotes(e, ["g3"])
        assert not denotes(e, ["g1", "g3", "g3"])

    def test_custom_matcher(self):
        # Letter predicates against valuation sets.
        e = parse_regex("p T* !p", predicate_mode=True)

        def match(sym, letter):
            if sym == "T":
                return True
            if sym.startswith("!"):
                return sym[1:] not in letter
            return sym in letter

        word = [frozenset({"p"}), frozenset(), frozenset({"q"})]
        assert denotes(e, word, match=match)
        assert not denotes(e, [frozenset({"p"})], match=match)


# --- compile / run ---------------------------------------------------------


class TestCompile:
    def test_running_example_dfa_size(self):
        d = compile_regex(fig4_expr(), ALPHA)
        assert len(d.states) == 4
        assert len(d.accepting) == 1

    def test_membership_vs_denotes_exhaustive(self):
        # 3^0 + ... + 3^6 = 1093 words.
        e = fig4_expr()
        d = compile_regex(e, ALPHA)
        checked = 0
        for word in all_words(ALPHA.symbols, 6):
            assert accepts(d, word) == denotes(e, word)
            checked += 1
        assert checked == 1093

    def test_empty_language_dfa(self):
        d = compile_regex(EMPTY, ALPHA)
        assert len(d.states) == 1
        assert not d.accepting

    def test_universal_language_dfa(self):
        d = compile_regex(parse_regex("(g1+g2+g3)*", ALPHA), ALPHA)
        assert len(d.states) == 1
        assert d.accepting == frozenset(d.states)

    def test_run_examples(self):
        d = compile_regex(fig4_expr(), ALPHA)
        assert run(d, ["g1", "g2", "g3"]) in d.accepting
        assert run(d, []) == d.initial
        assert run(d, ["g3"]) == d.sink

    def test_run_is_monoid_action(self):
        d = compile_regex(fig4_expr(), ALPHA)
        for word in all_words(ALPHA.symbols, 4):
            for cut in range(len(word) + 1):
                u, v = word[:cut], word[cut:]
                assert run(d, word) == run(d, v, start=run(d, u))

    def test_minimality_by_pair_distinguishability(self):
        # No two distinct states may be language-equivalent, and every
        # state must be reachable. Re-derived here from scratch.
        exprs = [
            fig4_expr(),
            parse_regex("g1+g2", ALPHA),
            parse_regex("(g1 g2)* + g3", ALPHA),
            parse_regex("g1 + g1 (g1+g2+g3)* g3", ALPHA),
            EMPTY,
            EPSILON,
        ]
        for e in exprs:
            d = compile_regex(e, ALPHA)
            reached = {d.initial}
            frontier = [d.initial]
            while frontier:
                s = frontier.pop()
                for a in ALPHA.symbols:
                    t = d.step[(s, a)]
                    if t not in reached:
                        reached.add(t)
                        frontier.append(t)
            assert reached == set(d.states)
            # partition refinement recheck
            block = {s: (s in d.accepting) for s in d.states}
            while True:
                sig = {
                    s: (block[s],) + tuple(block[d.step[(s, a)]] for a in ALPHA.symbols)
                    for s in d.states
                }
                fresh = {s: sig[s] for s in d.states}
                if len(set(fresh.values())) == len(set(block.values())):
                    break
                block = fresh
            assert len(set(block.values())) == len(d.states)

    def test_alphabet_mismatch_rejected(self):
        with pytest.raises(ValueError):
            compile_regex(Sym("g9"), ALPHA)

    def test_inferred_alphabet(self):
        d = compile_regex(parse_regex("b a", Alphabet(("a", "b"))))
        assert d.alphabet.symbols == ("a", "b")
        with pytest.raises(ValueError):
            compile_regex(EPSILON)


# --- language shape --------------------------------------------------------


class TestLanguageShape:
    def test_point_based(self):
        d = compile_regex(parse_regex("g1+g2", ALPHA), ALPHA)
        assert language_shape(d) == LanguageShape.POINT_BASED

    def test_endpoint_based(self):
        d = compile_regex(parse_regex("g1 + g1 (g1+g2+g3)* g3", ALPHA), ALPHA)
        assert language_shape(d) == LanguageShape.ENDPOINT_BASED

    def test_general(self):
        # Same endpoints, different membership: g1 g3 is accepted while
        # g1 g3 g3 is not.
        e = fig4_expr()
        assert denotes(e, ["g1", "g3"])
        assert not denotes(e, ["g1", "g3", "g3"])
        assert language_shape(compile_regex(e, ALPHA)) == LanguageShape.GENERAL

    def test_empty_language_is_point_based(self):
        assert language_shape(compile_regex(EMPTY, ALPHA)) == LanguageShape.POINT_BASED

    def test_epsilon_language_is_general(self):
        assert language_shape(compile_regex(EPSILON, ALPHA)) == LanguageShape.GENERAL

    def test_symbol_subsets_are_point_based(self):
        symbols = ALPHA.symbols
        for r in range(1, len(symbols) + 1):
            for subset in itertools.combinations(symbols, r):
                e = union_of([Sym(s) for s in subset])
                assert language_shape(compile_regex(e, ALPHA)) == LanguageShape.POINT_BASED

    def test_shape_matches_bruteforce_endpoint_check(self):
        # Brute force over words up to length 5 must never contradict
        # an EndpointBased or PointBased claim.
        exprs = [
            "g1 + g1 (g1+g2+g3)* g3",
            "g1 (g1+g2)* g3",
            "g1+g2",
            "g1 g2",
            "(g1+g2) (g1+g2+g3)* (g2+g3) + g1 + g2",
        ]
        for text in exprs:
            e = parse_regex(text, ALPHA)
            shape = language_shape(compile_regex(e, ALPHA))
            members = {w for w in all_words(ALPHA.symbols, 5) if denotes(e, w)}
            if shape == LanguageShape.POINT_BASED:
                assert all(len(w) == 1 for w in members)
            if shape == LanguageShape.ENDPOINT_BASED:
                seen = {}
                for w in members:
                    assert w, "endpoint-based languages cannot contain the empty word"
                for w in all_words(ALPHA.symbols, 5):
                    if not w:
                        continue
                    key = (w[0], w[-1], len(w) == 1)
                    verdict = w in members
                    assert seen.setdefault(key, verdict) == verdict


# --- randomized cross-validation -------------------------------------------


def regex_strategy(symbols):
    leaves = st.sampled_from(
        [EMPTY, EPSILON] + [Sym(s) for s in symbols]
    )
    return st.recursive(
        leaves,
        lambda sub: st.one_of(
            st.tuples(sub, sub).map(lambda p: Concat(*p)),
            st.tuples(sub, sub).map(lambda p: Union(*p)),
            sub.map(Star),
        ),
        max_leaves=8,
    )


@settings(max_examples=200, deadline=None)
@given(expr=regex_strategy(("a", "b", "c")), data=st.data())
def test_denotes_agrees_with_dfa(expr, data):
    alpha = Alphabet(("a", "b", "c"))
    d = compile_regex(expr, alpha)
    word = data.draw(st.lists(st.sampled_from(alpha.symbols), max_size=8))
    assert denotes(expr, word) == accepts(d, word)


@settings(max_examples=100, deadline=None)
@given(expr=regex_strategy(("a", "b")))
def test_print_parse_round_trip(expr):
    alpha = Alphabet(("a", "b"))
    assert parse_regex(regex_to_text(expr), alpha) == expr


# --- DOT -------------------------------------------------------------------


def test_dot_export_shape():
    d = compile_regex(fig4_expr(), ALPHA)
    dot = dfa_to_dot(d)
    assert dot.startswith("digraph dfa {")
    assert dot.count("doublecircle") == 1
    assert "style=dashed" in dot
    assert dot == dfa_to_dot(d)  # byte-deterministic


def test_symbols_of():
    assert symbols_of(fig4_expr()) == {"g1", "g2", "g3"}
