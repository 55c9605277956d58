"""Finite words over a fixed alphabet: occurrences, periodic powers, steps.

Words are immutable and carry their alphabet.  Internally a word is a
string of single-character codes (one per alphabet symbol), so windowing,
concatenation and substring search run at C speed regardless of how long
the user-facing symbol tokens are.

All positions in public signatures are 1-based and inclusive, matching
standard combinatorics-on-words notation ``w[i..j]``.
"""

from __future__ import annotations

from dataclasses import dataclass
from functools import cached_property
from math import gcd
from typing import TYPE_CHECKING, Iterable, Sequence

from .errors import AlphabetMismatch, HorizonExceeded, InvalidStep, InvariantViolation

if TYPE_CHECKING:  # pragma: no cover
    from .language import LanguageOracle

#: Pool of internal one-character codes; bounds the alphabet size.
CODE_CHARS = "0123456789abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ"


@dataclass(frozen=True)
class Alphabet:
    """An ordered alphabet of distinct symbol tokens.

    The declaration order is total and fixed; every downstream operation
    that has to "choose one of several" breaks ties in this order.
    """

    symbols: tuple[str, ...]

    def __post_init__(self):
        if not self.symbols:
            raise ValueError("alphabet must contain at least one symbol")
        if len(set(self.symbols)) != len(self.symbols):
            raise ValueError("alphabet symbols must be pairwise distinct")
        if len(self.symbols) > len(CODE_CHARS):
            raise ValueError(f"alphabet larger than {len(CODE_CHARS)} symbols")
        if any(not s for s in self.symbols):
            raise ValueError("alphabet symbols must be nonempty strings")

    @property
    def size(self) -> int:
        return len(self.symbols)

    @cached_property
    def codes(self) -> str:
        return CODE_CHARS[: len(self.symbols)]

    @cached_property
    def _token_to_code(self) -> dict[str, str]:
        return {tok: CODE_CHARS[i] for i, tok in enumerate(self.symbols)}

    @cached_property
    def _single_char_tokens(self) -> bool:
        return all(len(tok) == 1 for tok in self.symbols)

    def code(self, token: str) -> str:
        try:
            return self._token_to_code[token]
        except KeyError:
            raise ValueError(f"unknown symbol {token!r}") from None

    def token(self, code: str) -> str:
        return self.symbols[CODE_CHARS.index(code)]

    def word(self, tokens: str | Sequence[str]) -> Word:
        """Build a word from a token string or a sequence of tokens.

        A plain string is only accepted when every alphabet symbol is a
        single character, otherwise the split would be ambiguous.
        """
        if isinstance(tokens, str):
            if not self._single_char_tokens:
                raise ValueError(
                    "string input is ambiguous for multi-character symbols; "
                    "pass a sequence of tokens"
                )
            seq: Iterable[str] = tokens
        else:
            seq = tokens
        data = "".join(self.code(tok) for tok in seq)
        if not data:
            raise ValueError("the empty word is excluded")
        return Word(self, data)

    def word_from_codes(self, data: str) -> Word:
        return Word(self, data)


@dataclass(frozen=True)
class Word:
    """A nonempty finite word; ``data`` holds one code char per letter."""

    alphabet: Alphabet
    data: str

    def __post_init__(self):
        if not self.data:
            raise ValueError("the empty word is excluded")
        if any(c not in self.alphabet.codes for c in self.data):
            raise ValueError("word contains codes outside its alphabet")

    def __len__(self) -> int:
        return len(self.data)

    def __str__(self) -> str:
        toks = self.tokens()
        return "".join(toks) if self.alphabet._single_char_tokens else " ".join(toks)

    def __repr__(self) -> str:
        return f"Word({str(self)!r})"

    def tokens(self) -> tuple[str, ...]:
        return tuple(self.alphabet.token(c) for c in self.data)

    def letters(self) -> tuple[int, ...]:
        return tuple(CODE_CHARS.index(c) for c in self.data)

    def sub(self, i: int, j: int) -> Word:
        """The subword at 1-based inclusive positions ``[i, j]``."""
        if not (1 <= i <= j <= len(self.data)):
            raise ValueError(f"invalid subword range [{i},{j}] of length {len(self)}")
        return Word(self.alphabet, self.data[i - 1 : j])

    def prefix(self, k: int) -> Word:
        return self.sub(1, k)

    def suffix(self, k: int) -> Word:
        return self.sub(len(self) - k + 1, len(self))

    def __add__(self, other: Word) -> Word:
        if other.alphabet != self.alphabet:
            raise AlphabetMismatch("cannot concatenate words over different alphabets")
        return Word(self.alphabet, self.data + other.data)


def _require_same_alphabet(a: Word, b: Word) -> None:
    if a.alphabet != b.alphabet:
        raise AlphabetMismatch("words use different alphabets")


def occurrences(haystack: Word, needle: Word) -> tuple[int, list[int]]:
    """Count occurrences of ``needle`` in ``haystack``, overlaps included.

    Returns ``(count, positions)`` with 1-based start positions in
    ascending order.
    """
    _require_same_alphabet(haystack, needle)
    positions: list[int] = []
    start = haystack.data.find(needle.data)
    while start != -1:
        positions.append(start + 1)
        start = haystack.data.find(needle.data, start + 1)
    return len(positions), positions


def shift_match(w: Word, q: int) -> bool:
    """Whether the length ``n-q`` suffix of ``w`` equals its prefix.

    This is the self-overlap equation that makes the periodic power
    ``periodic_power(w, q, r)`` well defined.  Requires ``1 <= q < n``.
    """
    n = len(w)
    if not 1 <= q < n:
        return False
    return w.data[q:] == w.data[: n - q]


def periodic_power(w: Word, q: int, r: int) -> Word:
    """The word of length ``n + (r-1)q`` in which ``w`` starts at
    positions ``1, q+1, ..., (r-1)q + 1``.

    Defined whenever the shift-match equation holds for ``(w, q)``;
    shorter overlaps (``q <= n/2``) are what step certificates require,
    but the construction itself is valid for any ``1 <= q <= n-1``.
    """
    n = len(w)
    if r < 1:
        raise ValueError("repetition count must be >= 1")
    if q < 1:
        raise InvalidStep("step must be positive")
    if q >= n:
        raise InvalidStep(f"step too large: q={q} for |w|={n}")
    if not shift_match(w, q):
        raise InvalidStep(f"invalid step: q={q} does not satisfy the shift match for {w}")
    total = n + (r - 1) * q
    period = w.data[:q]
    data = (period * (total // q + 1))[:total]
    return Word(w.alphabet, data)


def periodic_letter(w: Word, q: int, position: int) -> str:
    """Code char at 1-based ``position`` of the two-sided periodic
    extension of ``w`` with period ``q`` (position 1 = first letter of w;
    positions <= 0 extend to the left)."""
    return w.data[(position - 1) % q]


@dataclass(frozen=True)
class StepCertificate:
    """A verified step for a word.

    ``kind`` is ``"language-valid"`` when the doubled power is a factor,
    or ``"shift-match-only"`` when only the overlap equation holds (a
    diagnostic case never returned by :func:`valid_steps` itself).
    """

    word: Word
    q: int
    kind: str

    def __post_init__(self):
        n = len(self.word)
        if not (1 <= self.q <= n // 2):
            raise InvariantViolation(f"certificate step {self.q} outside [1, {n // 2}]")
        if not shift_match(self.word, self.q):
            raise InvariantViolation("certificate step fails the shift match")
        if self.kind not in ("language-valid", "shift-match-only"):
            raise InvariantViolation(f"unknown certificate kind {self.kind!r}")


def _require_step_horizon(w: Word, oracle: "LanguageOracle") -> None:
    n = len(w)
    needed = n + n // 2
    if oracle.horizon < needed:
        raise HorizonExceeded(
            f"deciding steps for a word of length {n} needs horizon {needed}, "
            f"oracle has {oracle.horizon}",
            required=needed,
        )


def valid_steps(
    w: Word, oracle: "LanguageOracle", include_shift_only: bool = False
) -> list[StepCertificate]:
    """All steps ``q`` in ``[1, n//2]`` whose doubled power is a factor.

    With ``include_shift_only`` the result also carries, flagged, the
    steps that satisfy the overlap equation but whose doubled power is
    not in the language.
    """
    if w.alphabet != oracle.alphabet:
        raise AlphabetMismatch("word and oracle use different alphabets")
    _require_step_horizon(w, oracle)
    out = []
    for q in range(1, len(w) // 2 + 1):
        if not shift_match(w, q):
            continue
        if oracle.contains(periodic_power(w, q, 2)):
            out.append(StepCertificate(w, q, "language-valid"))
        elif include_shift_only:
            out.append(StepCertificate(w, q, "shift-match-only"))
    return out


def minimal_step(w: Word, oracle: "LanguageOracle") -> int | None:
    """Least valid step of ``w``, or ``None`` when no step is valid.

    Post-check: the minimum must divide every valid step (the gcd of two
    valid steps is again valid), so a non-dividing minimum indicates a
    corrupted oracle or an implementation bug.
    """
    steps = [c.q for c in valid_steps(w, oracle)]
    if not steps:
        return None
    q0 = steps[0]
    for q in steps:
        if q % q0 != 0:
            raise InvariantViolation(
                f"minimal step {q0} does not divide valid step {q} for {w}"
            )
    return q0


def brute_force_valid_steps(w: Word, oracle: "LanguageOracle") -> list[int]:
    """Independent O(n^2) rescan of the step definition, for cross-checks."""
    n = len(w)
    _require_step_horizon(w, oracle)
    out = []
    for q in range(1, n // 2 + 1):
        if all(w.data[q + i] == w.data[i] for i in range(n - q)):
            doubled = w.data + w.data[n - q :]
            if oracle.contains(Word(w.alphabet, doubled)):
                out.append(q)
    return out


def step_gcd(q1: int, q2: int) -> int:
    return gcd(q1, q2)
