"""Word primitives: occurrences, periodic powers, steps."""

import pytest
from hypothesis import given, strategies as st

from shiftlab.errors import AlphabetMismatch, HorizonExceeded, InvalidStep
from shiftlab.language import LanguageOracle
from shiftlab.words import (
    Alphabet,
    StepCertificate,
    Word,
    brute_force_valid_steps,
    minimal_step,
    occurrences,
    periodic_power,
    shift_match,
    valid_steps,
)

AB = Alphabet(("a", "b"))
ZO = Alphabet(("0", "1"))


def naive_occurrences(hay: Word, needle: Word):
    """Independent O(n*m) rescan."""
    positions = [
        i
        for i in range(1, len(hay) - len(needle) + 2)
        if hay.data[i - 1 : i - 1 + len(needle)] == needle.data
    ]
    return len(positions), positions


class TestOccurrences:
    def test_simple(self):
        assert occurrences(AB.word("abab"), AB.word("ab")) == (2, [1, 3])

    def test_overlapping(self):
        assert occurrences(AB.word("aaaa"), AB.word("aa")) == (3, [1, 2, 3])

    def test_block_of_ones(self):
        hay = ZO.word("0" + "1" * 15 + "0")
        count, positions = occurrences(hay, ZO.word("1111"))
        assert count == 12
        assert positions == list(range(2, 14))

    def test_alphabet_mismatch(self):
        with pytest.raises(AlphabetMismatch):
            occurrences(AB.word("ab"), ZO.word("01"))

    @given(
        st.text(alphabet="ab", min_size=1, max_size=30),
        st.text(alphabet="ab", min_size=1, max_size=5),
    )
    def test_matches_naive_rescan(self, hay, needle):
        h, n = AB.word(hay), AB.word(needle)
        assert occurrences(h, n) == naive_occurrences(h, n)


class TestPeriodicPower:
    def test_period_two(self):
        assert str(periodic_power(AB.word("abab"), 2, 3)) == "abababab"

    def test_ones_block(self):
        # step above half the length; the construction is still well defined
        w = ZO.word("1111")
        assert str(periodic_power(w, 3, 4)) == "1" * 13

    def test_invalid_step(self):
        with pytest.raises(InvalidStep, match="invalid step"):
            periodic_power(AB.word("ab"), 1, 2)

    def test_step_too_large(self):
        with pytest.raises(InvalidStep, match="too large"):
            periodic_power(AB.word("abab"), 4, 2)

    def test_r_one_is_identity(self):
        w = AB.word("abab")
        assert periodic_power(w, 2, 1) == w

    @given(st.text(alphabet="ab", min_size=2, max_size=14), st.integers(1, 13))
    def test_prefix_chain(self, text, q):
        w = AB.word(text)
        if not shift_match(w, q):
            return
        small = periodic_power(w, q, 2)
        big = periodic_power(w, q, 5)
        assert big.data.startswith(small.data)

    @given(st.text(alphabet="ab", min_size=2, max_size=14))
    def test_smaller_step_power_is_prefix(self, text):
        # for two steps (at most half the length, as the step definition
        # requires), the word doubled at the smaller step is a prefix of
        # the word doubled at the larger
        w = AB.word(text)
        steps = [q for q in range(1, len(w) // 2 + 1) if shift_match(w, q)]
        for q1 in steps:
            for q2 in steps:
                if q1 < q2:
                    assert periodic_power(w, q2, 2).data.startswith(
                        periodic_power(w, q1, 2).data
                    )


@pytest.fixture(scope="module")
def shift3():
    return LanguageOracle.full_shift(Alphabet(("0", "1", "a")), 7)


@pytest.fixture(scope="module")
def shift2():
    return LanguageOracle.full_shift(AB, 15)


class TestValidSteps:
    def test_constant_word(self, shift3):
        w = shift3.alphabet.word(["a", "a", "a", "a"])
        assert [c.q for c in valid_steps(w, shift3)] == [1, 2]

    def test_no_steps(self, shift2):
        assert valid_steps(AB.word("abaab"), shift2) == []

    def test_period_two(self, shift2):
        certs = valid_steps(AB.word("ababab"), shift2)
        assert [c.q for c in certs] == [2]
        assert certs[0].kind == "language-valid"

    def test_shift_only_diagnostic(self, fib_oracle):
        # the doubled power of ababa at step 2 is not a factor
        w = fib_oracle.alphabet.word("ababa")
        assert valid_steps(w, fib_oracle) == []
        diag = valid_steps(w, fib_oracle, include_shift_only=True)
        assert [(c.q, c.kind) for c in diag] == [(2, "shift-match-only")]

    def test_horizon_guard(self, fib_oracle):
        w = fib_oracle.alphabet.word("ab" * 11)  # needs horizon 33 > 30
        with pytest.raises(HorizonExceeded) as err:
            valid_steps(w, fib_oracle)
        assert err.value.required == 33

    def test_certificate_rejects_bad_step(self):
        with pytest.raises(Exception):
            StepCertificate(AB.word("abab"), 3, "language-valid")


class TestMinimalStep:
    def test_constant(self, shift2):
        assert minimal_step(AB.word("aaaaaa"), shift2) == 1

    def test_period_two(self, shift2):
        assert minimal_step(AB.word("ababab"), shift2) == 2

    def test_absent(self, shift2):
        assert minimal_step(AB.word("abaab"), shift2) is None


def test_step_scan_exhaustive_small(shift2):
    """Library step computation agrees with the brute-force rescan and
    gcd-closure holds, for every binary word of length up to 10."""
    from math import gcd

    for n in range(2, 11):
        for bits in range(2**n):
            data = "".join("ab"[(bits >> i) & 1] for i in range(n))
            w = AB.word(data)
            steps = [c.q for c in valid_steps(w, shift2)]
            assert steps == brute_force_valid_steps(w, shift2)
            for q1 in steps:
                for q2 in steps:
                    assert gcd(q1, q2) in steps
            if steps:
                q0 = minimal_step(w, shift2)
                assert q0 == steps[0]
                assert all(q % q0 == 0 for q in steps)
