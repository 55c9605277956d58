"""Language oracle analyses: extensions, specials, regularity, growth,
periodicity, unique special extensions."""

import pytest

from shiftlab.errors import (
    HorizonExceeded,
    InvariantViolation,
    NotAFactor,
    PreconditionFailure,
)
from shiftlab.generators import SequencePrefix, oracle_from_prefix
from shiftlab.language import (
    LanguageOracle,
    check_rbc,
    extension_graph,
    extensions,
    growth_profile,
    is_dendric,
    is_regular_bispecial,
    periodicity_check,
    special_extension_map,
    special_words,
)


class TestOracleInvariants:
    def test_factor_closure_violation(self, ab):
        factors = {1: [ab.word("a"), ab.word("b")], 2: [ab.word("ab")], 3: [ab.word("bab")]}
        with pytest.raises(InvariantViolation, match="closure"):
            LanguageOracle.from_factor_sets(ab, factors)

    def test_missing_alphabet_letter(self, ab):
        x = SequencePrefix.from_tokens(ab, "a" * 40, "constant")
        with pytest.raises(InvariantViolation, match="never occurs"):
            oracle_from_prefix(x, 4)

    def test_extendability_violation(self, ab):
        # level 4 offers no word with middle 'ba', so 'ba' cannot be
        # extended on both sides even though closure holds
        factors = {
            1: [ab.word("a"), ab.word("b")],
            2: [ab.word(t) for t in ("aa", "ab", "ba")],
            3: [ab.word(t) for t in ("aaa", "aab", "aba", "baa")],
            4: [ab.word(t) for t in ("aaaa", "aaab", "aaba", "baaa")],
        }
        with pytest.raises(InvariantViolation, match="extendability"):
            LanguageOracle.from_factor_sets(ab, factors)


class TestExtensions:
    def test_fibonacci_single_letter(self, fib_oracle, ab):
        rec = extensions(fib_oracle, ab.word("a"))
        assert rec.left == {"a", "b"}
        assert rec.right == {"a", "b"}
        assert rec.both == {("a", "b"), ("b", "a"), ("b", "b")}
        assert rec.multiplicity == 0

    def test_full_shift_pair(self, full_shift_2, zo):
        rec = extensions(full_shift_2, zo.word("01"))
        assert rec.left == {"0", "1"} and rec.right == {"0", "1"}
        assert len(rec.both) == 4
        assert rec.multiplicity == 1

    def test_not_a_factor(self, fib_oracle, ab):
        with pytest.raises(NotAFactor):
            extensions(fib_oracle, ab.word("bb"))

    def test_horizon(self, fib_oracle, ab):
        with pytest.raises(HorizonExceeded):
            extensions(fib_oracle, fib_oracle.words(29)[0])


class TestSpecialWords:
    def test_fibonacci_unique_left_special(self, fib_oracle):
        got = special_words(fib_oracle, 3, "left")
        assert {str(w) for w in got} == {"aba"}

    def test_fibonacci_bispecial(self, fib_oracle):
        assert {str(w) for w in special_words(fib_oracle, 3, "bi")} == {"aba"}

    def test_full_shift_all_bispecial(self, full_shift_2):
        assert len(special_words(full_shift_2, 2, "bi")) == 4

    def test_agrees_with_per_word_extensions(self, fib_oracle):
        # independent recomputation through the per-word extension query
        for n in range(1, 10):
            expect = {
                str(w)
                for w in fib_oracle.words(n)
                if len(extensions(fib_oracle, w).left) >= 2
            }
            assert {str(w) for w in special_words(fib_oracle, n, "left")} == expect


class TestRegularBispecial:
    def test_fibonacci_a(self, fib_oracle, ab):
        verdict = is_regular_bispecial(fib_oracle, ab.word("a"))
        assert verdict.regular
        assert verdict.left_witness == "b" and verdict.right_witness == "b"

    def test_fibonacci_aba(self, fib_oracle, ab):
        assert is_regular_bispecial(fib_oracle, ab.word("aba")).regular

    def test_full_shift_irregular(self, full_shift_2, zo):
        verdict = is_regular_bispecial(full_shift_2, zo.word("0"))
        assert not verdict.regular
        assert "2 right extensions" in verdict.reason

    def test_not_bispecial_rejected(self, fib_oracle, ab):
        with pytest.raises(PreconditionFailure, match="not bispecial"):
            is_regular_bispecial(fib_oracle, ab.word("ab"))


class TestExtensionGraph:
    def test_fibonacci_tree(self, fib_oracle, ab):
        g = extension_graph(fib_oracle, ab.word("a"))
        assert g.vertex_count == 4 and g.edge_count == 3
        assert g.is_tree and is_dendric(fib_oracle, ab.word("a"))

    def test_full_shift_complete_bipartite(self, full_shift_2, zo):
        g = extension_graph(full_shift_2, zo.word("0"))
        assert g.vertex_count == 4 and g.edge_count == 4
        assert not g.is_tree

    def test_nonspecial_word(self, fib_oracle, ab):
        g = extension_graph(fib_oracle, ab.word("aab"))
        assert g.vertex_count == 2 and g.edge_count == 1 and g.is_tree

    def test_dendric_implies_zero_multiplicity(self, fib_oracle, tm_oracle):
        for oracle in (fib_oracle, tm_oracle):
            for n in range(1, oracle.horizon - 1):
                for w in oracle.words(n):
                    if is_dendric(oracle, w):
                        assert extensions(oracle, w).multiplicity == 0


class TestGrowth:
    def test_fibonacci_sturmian(self, fib_oracle):
        profile = growth_profile(fib_oracle)
        assert all(profile.p[n] == n + 1 for n in range(1, 31))
        assert profile.K == 1 and profile.N0 == 1

    def test_full_shift_not_constant(self, full_shift_2):
        profile = growth_profile(full_shift_2)
        assert profile.p[5] == 32
        assert profile.K is None
        assert profile.verdict == "not constant within horizon"

    def test_iet3_differences(self, iet3_oracle):
        profile = growth_profile(iet3_oracle)
        assert profile.K == 2
        assert all(d == 2 for d in profile.differences.values())


class TestRbc:
    def test_fibonacci_holds(self, fib_oracle):
        report = check_rbc(fib_oracle, 1)
        assert report.holds_within_horizon and not report.violations
        assert report.n0_estimate == 1

    def test_full_shift_fails_everywhere(self, full_shift_2):
        report = check_rbc(full_shift_2, 1)
        assert not report.holds_within_horizon
        # every word of every checked length is an irregular bispecial
        by_len = {}
        for w, _ in report.violations:
            by_len.setdefault(len(w), 0)
            by_len[len(w)] += 1
        assert by_len == {n: 2**n for n in range(1, full_shift_2.horizon - 2)}

    def test_thue_morse_violations(self, tm_oracle):
        report = check_rbc(tm_oracle, 1)
        assert not report.holds_within_horizon
        assert min(len(w) for w, _ in report.violations) == 2
        words2 = {str(w) for w, _ in report.violations if len(w) == 2}
        assert words2 == {"01", "10"}

    def test_regular_iff_dendric_on_bispecials(self, fib_oracle, tm_oracle, iet3_oracle):
        for oracle in (fib_oracle, tm_oracle, iet3_oracle):
            for n in range(1, oracle.horizon - 2):
                bis = special_words(oracle, n, "bi")
                for w in bis:
                    assert (
                        is_regular_bispecial(oracle, w).regular
                        == is_dendric(oracle, w)
                    )


class TestPeriodicity:
    def test_periodic_coding(self, periodic01_oracle):
        report = periodicity_check(periodic01_oracle)
        assert report.periodic_within_horizon
        assert report.n0 == 2 and report.period == 2

    def test_fibonacci_aperiodic(self, fib_oracle):
        report = periodicity_check(fib_oracle)
        assert not report.periodic_within_horizon

    def test_full_shift_aperiodic(self, full_shift_2):
        assert not periodicity_check(full_shift_2).periodic_within_horizon


class TestPrefixesOfSpecials:
    def test_prefix_of_left_special_is_left_special(self, fib_oracle, iet3_oracle):
        for oracle in (fib_oracle, iet3_oracle):
            for n in range(2, oracle.horizon - 1):
                below = oracle.special_strings(n - 1, "left")
                for d in oracle.special_strings(n, "left"):
                    assert d[:-1] in below
                below_r = oracle.special_strings(n - 1, "right")
                for d in oracle.special_strings(n, "right"):
                    assert d[1:] in below_r


class TestSpecialExtensionMap:
    def test_fibonacci_left(self, fib_oracle, ab):
        res = special_extension_map(fib_oracle, "left", 1, 3)
        assert res.mapping == {ab.word("a"): ab.word("aba")}

    def test_fibonacci_right(self, fib_oracle, ab):
        res = special_extension_map(fib_oracle, "right", 1, 3)
        assert res.mapping == {ab.word("a"): ab.word("aba")}

    def test_identity(self, fib_oracle, ab):
        res = special_extension_map(fib_oracle, "left", 4, 4)
        assert res.mapping == {ab.word("abaa"): ab.word("abaa")}

    def test_refuses_without_rbc(self, tm_oracle):
        with pytest.raises(PreconditionFailure, match="RBC not established"):
            special_extension_map(tm_oracle, "left", 1, 6)

    def test_extension_sets_stabilize(self, fib_oracle, iet3_oracle):
        # the one-sided extension sets along the unique-extension ladder
        # become constant on the horizon tail
        for oracle in (fib_oracle, iet3_oracle):
            top = oracle.horizon - 2
            start = top // 2
            res = special_extension_map(oracle, "left", start, start)
            assert res.mapping is not None
            for w0 in res.mapping:
                exts = []
                for n in range(start, top + 1):
                    step = special_extension_map(oracle, "left", start, n)
                    assert step.mapping is not None
                    exts.append(extensions(oracle, step.mapping[w0]).left)
                assert len(set(map(frozenset, exts))) == 1


def test_report_shape(fib_oracle):
    from shiftlab.language import analysis_report

    report = analysis_report(fib_oracle)
    assert report["growth"]["K"] == 1
    assert report["rbc"]["holds_within_horizon"] is True
    assert report["periodicity"]["periodic_within_horizon"] is False
    assert len(report["growth"]["p"]) == fib_oracle.horizon
