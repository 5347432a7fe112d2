"""Tests for the interpreted-system core: transition relation, intervals,
Allen relations, epistemic classes, text format."""

import itertools

import pytest

from ehsmc.regexes import EPSILON, parse_regex
from ehsmc.systems import (
    AnchoredInterval,
    Interval,
    LocalComponent,
    InterpretedSystem,
    Relation,
    SystemParseError,
    allen_successors,
    common_class,
    config_str,
    epi_class,
    epi_equiv,
    format_system,
    global_step,
    is_point,
    label_holds,
    later_successors,
    parse_system,
    reachable_configs,
    tg_to_dot,
    validate_interval,
    validate_system,
)

from conftest import iv


def names(sys_, intervals):
    return sorted("".join(sys_.display(c) for c in i.configs) for i in intervals)


def all_intervals(sys_, max_len):
    """Brute-force enumeration of valid intervals up to a length."""
    out = []
    layer = [(g,) for g in sys_.reachable]
    for _ in range(max_len):
        out.extend(layer)
        layer = [p + (n,) for p in layer for n in sys_.successors(p[-1])]
    return [Interval(p) for p in out]


class TestRunningExample:
    def test_configuration_space(self, is_ex):
        assert len(is_ex.all_configs) == 3
        assert is_ex.display(is_ex.initial) == "g1"

    def test_global_transition_pairs(self, is_ex, gs):
        edges = {
            (is_ex.display(a), is_ex.display(b))
            for a in is_ex.reachable
            for b in is_ex.successors(a)
        }
        assert edges == {("g1", "g2"), ("g2", "g3"), ("g2", "g1"), ("g3", "g1")}
        assert global_step(is_ex, gs["g1"], gs["g2"])
        assert not global_step(is_ex, gs["g1"], gs["g3"])

    def test_reachable(self, is_ex, gs):
        assert reachable_configs(is_ex) == {gs["g1"], gs["g2"], gs["g3"]}

    def test_label_membership(self, is_ex, gs):
        assert label_holds(is_ex, "p", iv(gs, "g1", "g2", "g3"))
        assert label_holds(is_ex, "p", iv(gs, "g1", "g2", "g1", "g2", "g3"))
        assert not label_holds(is_ex, "p", iv(gs, "g1"))
        with pytest.raises(KeyError):
            label_holds(is_ex, "nope", iv(gs, "g1"))

    def test_validation_clean(self, is_ex):
        report = validate_system(is_ex)
        assert report.ok
        assert not report.warnings


class TestIntervals:
    def test_point(self, gs):
        assert is_point(iv(gs, "g1"))
        assert not is_point(iv(gs, "g1", "g2"))

    def test_non_empty(self):
        with pytest.raises(ValueError):
            Interval(())

    def test_validate_interval(self, is_ex, gs):
        validate_interval(is_ex, iv(gs, "g1", "g2", "g3"))
        with pytest.raises(ValueError):
            validate_interval(is_ex, iv(gs, "g1", "g3"))

    def test_anchored_total_length(self, gs):
        a = AnchoredInterval((gs["g1"],), iv(gs, "g2", "g3"))
        assert a.total_length == 3


class TestAllenSuccessors:
    def test_begins(self, is_ex, gs):
        got = names(is_ex, allen_successors(is_ex, iv(gs, "g1", "g2", "g3"), Relation.B))
        assert got == ["g1", "g1g2"]

    def test_meets(self, is_ex, gs):
        got = names(is_ex, allen_successors(is_ex, iv(gs, "g1"), Relation.A, 3))
        assert got == ["g1", "g1g2", "g1g2g1", "g1g2g3"]

    def test_next(self, is_ex, gs):
        got = names(is_ex, allen_successors(is_ex, iv(gs, "g1", "g2"), Relation.N, 2))
        assert got == ["g1", "g1g2", "g3", "g3g1"]

    def test_during_and_ends(self, is_ex, gs):
        I = iv(gs, "g1", "g2", "g3")
        assert names(is_ex, allen_successors(is_ex, I, Relation.D)) == ["g2"]
        assert names(is_ex, allen_successors(is_ex, I, Relation.E)) == ["g2g3", "g3"]

    def test_during_deduplicates(self, is_ex, gs):
        I = iv(gs, "g1", "g2", "g1", "g2", "g3")
        got = list(allen_successors(is_ex, I, Relation.D))
        assert len(got) == len(set(got))

    def test_extends(self, is_ex, gs):
        got = names(is_ex, allen_successors(is_ex, iv(gs, "g1"), Relation.BBAR, 3))
        assert got == ["g1g2", "g1g2g1", "g1g2g3"]

    def test_missing_max_len(self, is_ex, gs):
        with pytest.raises(ValueError):
            list(allen_successors(is_ex, iv(gs, "g1"), Relation.A))

    def test_backward_relations_rejected(self, is_ex, gs):
        with pytest.raises(ValueError):
            list(allen_successors(is_ex, iv(gs, "g1"), Relation.ABAR, 3))

    def test_enumeration_matches_definitions(self, is_ex):
        # Every yielded interval satisfies the defining condition, and
        # every interval satisfying it (within the length cap) is
        # yielded. Brute-forced over all intervals of length <= 4.
        universe = all_intervals(is_ex, 4)
        for I in all_intervals(is_ex, 3):
            c = I.configs
            expected = {
                Relation.B: {J for J in universe if len(J) < len(I) and c[: len(J)] == J.configs},
                Relation.E: {J for J in universe if len(J) < len(I) and c[len(I) - len(J):] == J.configs},
                Relation.D: {
                    J
                    for J in universe
                    if any(
                        c[i : i + len(J)] == J.configs
                        for i in range(1, len(I) - len(J))
                    )
                },
                Relation.A: {J for J in universe if J.first == I.last},
                Relation.N: {
                    J for J in universe if J.first in is_ex.successors(I.last)
                },
                Relation.BBAR: {
                    J
                    for J in universe
                    if len(J) > len(I) and J.configs[: len(I)] == c
                },
            }
            for rel, want in expected.items():
                got = set(allen_successors(is_ex, I, rel, 4))
                assert got == want, (rel, names(is_ex, got), names(is_ex, want))

    def test_deterministic_order(self, is_ex, gs):
        I = iv(gs, "g2")
        a = [J.configs for J in allen_successors(is_ex, I, Relation.A, 3)]
        b = [J.configs for J in allen_successors(is_ex, I, Relation.A, 3)]
        assert a == b
        lengths = [len(c) for c in a]
        assert lengths == sorted(lengths)


class TestLater:
    def test_points_from_g1(self, is_ex, gs):
        got = names(is_ex, later_successors(is_ex, iv(gs, "g1"), 1))
        assert got == ["g1", "g2", "g3"]

    def test_g3_reaches_itself(self, is_ex, gs):
        got = names(is_ex, later_successors(is_ex, iv(gs, "g3"), 1))
        assert "g3" in got

    def test_no_successor_means_empty(self):
        sys_ = parse_system(
            """
agent Solo
  states s t
  init s
  actions go
  protocol s: go
  trans s (go) t
config cs = (s)
config ct = (t)
"""
        )
        t = sys_.aliases["ct"]
        assert list(later_successors(sys_, Interval((t,)), 3)) == []


class TestEpistemic:
    def test_blind_agent_relates_same_length(self, is_ex, gs):
        assert epi_equiv(is_ex, iv(gs, "g1", "g2"), iv(gs, "g2", "g3"), 0)
        assert not epi_equiv(is_ex, iv(gs, "g1"), iv(gs, "g1", "g2"), 0)

    def test_observant_agent_distinguishes(self, is_ex, gs):
        assert epi_equiv(is_ex, iv(gs, "g1", "g2"), iv(gs, "g1", "g2"), 1)
        assert not epi_equiv(is_ex, iv(gs, "g1", "g2"), iv(gs, "g2", "g3"), 1)

    def test_classes(self, is_ex, gs):
        assert names(is_ex, epi_class(is_ex, iv(gs, "g1"), 0)) == ["g1", "g2", "g3"]
        assert names(is_ex, epi_class(is_ex, iv(gs, "g1"), 1)) == ["g1"]
        assert names(is_ex, epi_class(is_ex, iv(gs, "g1", "g2"), 1)) == ["g1g2"]

    def test_common_classes(self, is_ex, gs):
        assert names(is_ex, common_class(is_ex, iv(gs, "g1"), {0, 1})) == ["g1", "g2", "g3"]
        assert names(is_ex, common_class(is_ex, iv(gs, "g1"), {1})) == ["g1"]

    def test_singleton_group_equals_class(self, is_ex):
        for I in all_intervals(is_ex, 2):
            assert common_class(is_ex, I, {0}) == epi_class(is_ex, I, 0) | {I}

    def test_equivalence_relation(self, is_ex):
        universe = all_intervals(is_ex, 3)
        for agent in (0, 1):
            for I in universe:
                assert epi_equiv(is_ex, I, I, agent)
            for I, J in itertools.combinations(universe, 2):
                assert epi_equiv(is_ex, I, J, agent) == epi_equiv(is_ex, J, I, agent)
            for I, J, K in itertools.product(universe, repeat=3):
                if epi_equiv(is_ex, I, J, agent) and epi_equiv(is_ex, J, K, agent):
                    assert epi_equiv(is_ex, I, K, agent)

    def test_common_class_closed(self, is_ex):
        for I in all_intervals(is_ex, 2):
            closure = common_class(is_ex, I, {0, 1})
            for member in closure:
                for agent in (0, 1):
                    assert epi_class(is_ex, member, agent) <= closure

    def test_bad_agent_index(self, is_ex, gs):
        with pytest.raises(IndexError):
            epi_equiv(is_ex, iv(gs, "g1"), iv(gs, "g1"), 7)


class TestValidation:
    def test_epsilon_label_warns(self, is_ex):
        sys_ = InterpretedSystem(is_ex.agents, {"p": EPSILON}, is_ex.aliases)
        report = validate_system(sys_)
        assert report.ok
        assert any("empty word" in w for w in report.warnings)

    def test_actionless_state_warns(self, is_ex):
        proc = is_ex.agents[1]
        crippled = LocalComponent(
            proc.name, proc.states, proc.init, proc.actions,
            {k: v for k, v in proc.protocol.items() if k != "l1"},
            proc.transitions,
        )
        sys_ = InterpretedSystem((is_ex.agents[0], crippled), is_ex.labelling, is_ex.aliases)
        report = validate_system(sys_)
        assert report.ok
        assert any("l1" in w and "no action" in w for w in report.warnings)

    def test_violations_reported_not_raised(self):
        agent = LocalComponent("a", ("s",), "missing", ("x",), {"s": ("y",)}, (("s", ("x", "x"), "s"),))
        sys_ = InterpretedSystem([agent], {})
        report = validate_system(sys_)
        assert not report.ok
        assert any("init" in v for v in report.violations)
        assert any("not declared" in v for v in report.violations)
        assert any("arity" in v for v in report.violations)


class TestTextFormat:
    def test_round_trip(self, is_ex):
        again = parse_system(format_system(is_ex))
        assert again.all_configs == is_ex.all_configs
        assert again.labelling == is_ex.labelling
        assert {(a, b) for a in again.reachable for b in again.successors(a)} == {
            (a, b) for a in is_ex.reachable for b in is_ex.successors(a)
        }
        # serialization is idempotent
        assert format_system(again) == format_system(is_ex)

    def test_parse_errors_carry_line_numbers(self):
        with pytest.raises(SystemParseError) as exc:
            parse_system("agent A\n  bogus x\n")
        assert "line 2" in str(exc.value)
        with pytest.raises(SystemParseError):
            parse_system("states l0\n")
        with pytest.raises(SystemParseError):
            parse_system("agent A\n  init s\nlabel p = q9\n")

    def test_config_str(self):
        assert config_str(("l0", "l1")) == "(l0,l1)"

    def test_modified_transition_shrinks_reachable(self, is_ex):
        proc = is_ex.agents[1]
        trimmed = LocalComponent(
            proc.name, proc.states, proc.init, proc.actions, proc.protocol,
            tuple(t for t in proc.transitions if not (t[0] == "l2" and t[2] == "l3")),
        )
        sys_ = InterpretedSystem((is_ex.agents[0], trimmed), is_ex.labelling, is_ex.aliases)
        assert {sys_.display(g) for g in sys_.reachable} == {"g1", "g2"}


def test_tg_dot(is_ex):
    dot = tg_to_dot(is_ex)
    assert dot.count("->") == 4
    assert dot.count("circle") >= 3
    assert dot == tg_to_dot(is_ex)
