"""Exit words: the minimal contexts in which a sequence enters the
periodic circuit of a word, circles it, and leaves.

An exit word for ``w`` with step ``q`` decomposes as ``p + power + s``
where the interior is a stretch of the two-sided periodic extension of
``w`` and the first letter of ``p`` and last letter of ``s`` each break
the periodicity.  With ``q`` minimal the decomposition is unique and the
number of occurrences of ``w`` in the exit word equals the repetition
count.
"""

from __future__ import annotations

from dataclasses import dataclass
from math import ceil

from .errors import (
    HorizonExceeded,
    InvariantViolation,
    PreconditionFailure,
)
from .generators import SequencePrefix
from .language import LanguageOracle, check_rbc, growth_profile
from .words import Word, minimal_step, occurrences, periodic_power, shift_match


@dataclass(frozen=True)
class Representation:
    """One way to write an exit word as prefix + periodic power + suffix."""

    p: Word
    r: int
    s: Word

    def as_tuple(self) -> tuple[str, int, str]:
        return str(self.p), self.r, str(self.s)


@dataclass(frozen=True)
class ExitWord:
    """An exit word with all of its decompositions for one step value.

    ``canonical`` marks the step as the minimal step of the base word, in
    which case the decomposition list has exactly one entry.
    """

    z: Word
    base: Word
    q: int
    representations: tuple[Representation, ...]
    canonical: bool

    def to_json(self) -> dict:
        return {
            "z": str(self.z),
            "w": str(self.base),
            "q": self.q,
            "canonical": self.canonical,
            "representations": [
                {"p": str(rep.p), "r": rep.r, "s": str(rep.s)}
                for rep in self.representations
            ],
        }


def _periodic_char(w: Word, q: int, position: int) -> str:
    """Code char of the two-sided periodic extension of ``w`` (period
    ``q``) at a 1-based position; position 1 is the first letter of the
    power, positions <= 0 extend to the left."""
    return w.data[(position - 1) % q]


def is_representation(
    z: Word, w: Word, q: int, p_len: int, r: int, s_len: int
) -> bool:
    """Independent predicate for the decomposition conditions.

    Checks that the slice layout reproduces ``z``, that the interior is
    the periodic power, and that exactly the first letter of the prefix
    and the last letter of the suffix break the periodic extension.
    """
    n = len(w)
    mid = n + (r - 1) * q
    if p_len + mid + s_len != len(z) or not (0 <= p_len <= q and 0 <= s_len <= q):
        return False
    if z.data[p_len : p_len + mid] != periodic_power(w, q, r).data:
        return False
    # prefix: positions p_len .. 1 from the right edge of p map to
    # periodic positions 0, -1, ...
    if p_len == 0:
        return False  # the bare power is a suffix of the longer power
    for k in range(2, p_len + 1):
        if z.data[k - 1] != _periodic_char(w, q, k - p_len):
            return False
    if z.data[0] == _periodic_char(w, q, 1 - p_len):
        return False
    if s_len == 0:
        return False  # the bare power is a prefix of the longer power
    for k in range(1, s_len):
        if z.data[p_len + mid + k - 1] != _periodic_char(w, q, mid + k):
            return False
    if z.data[-1] == _periodic_char(w, q, mid + s_len):
        return False
    return True


def decompose(
    z: Word, w: Word, q: int, oracle: LanguageOracle | None = None
) -> list[Representation]:
    """All decompositions of ``z`` as an exit word of ``w`` with step ``q``.

    When the interior has a period shorter than ``q`` the power grid can
    slide, so several decompositions may coexist; with ``q`` equal to the
    minimal step of ``w`` exactly one survives, and the occurrence count
    of ``w`` in ``z`` equals its repetition count (both asserted here
    when an oracle is supplied).
    """
    n = len(w)
    if not 1 <= q <= n - 1 or not shift_match(w, q):
        raise PreconditionFailure(f"q={q} is not a step for {w}")
    out = []
    r = 1
    while n + (r - 1) * q + 2 <= len(z):
        mid = n + (r - 1) * q
        for p_len in range(1, q + 1):
            s_len = len(z) - mid - p_len
            if not 1 <= s_len <= q:
                continue
            if is_representation(z, w, q, p_len, r, s_len):
                out.append(
                    Representation(
                        z.sub(1, p_len), r, z.sub(p_len + mid + 1, len(z))
                    )
                )
        r += 1
    out.sort(key=lambda rep: len(rep.p))
    if oracle is not None and out:
        q_min = minimal_step(w, oracle)
        if q_min == q:
            if len(out) != 1:
                raise InvariantViolation(
                    f"minimal step {q} admits {len(out)} decompositions of {z}"
                )
            count, _ = occurrences(z, w)
            if count != out[0].r:
                raise InvariantViolation(
                    f"occurrence count {count} != repetition {out[0].r} at "
                    "minimal step"
                )
    return out


@dataclass(frozen=True)
class EnumerationReport:
    """Exit words of one (word, step) pair up to a length cap."""

    base: Word
    q: int
    cap: int
    exit_words: tuple[ExitWord, ...]
    partial: bool
    count_limit: int | None  # 2K^2 when the branching constant is known
    within_limit: bool | None

    def to_json(self) -> dict:
        return {
            "w": str(self.base),
            "q": self.q,
            "cap": self.cap,
            "partial": self.partial,
            "count": len(self.exit_words),
            "count_limit": self.count_limit,
            "within_limit": self.within_limit,
            "exit_words": [z.to_json() for z in self.exit_words],
        }


def enumerate_exit_words(
    w: Word, q: int, oracle: LanguageOracle, cap: int | None = None
) -> EnumerationReport:
    """All exit words of ``w`` with step ``q`` of length at most the cap
    (the oracle horizon by default).

    Candidates are generated from the circuit structure: an exit word is
    pinned down by where it enters the periodic circuit (prefix length
    plus breaking letter), where it leaves (suffix length plus breaking
    letter) and how often it goes round; only language membership of the
    assembled word remains to be filtered.
    """
    n = len(w)
    if not 1 <= q <= n - 1 or not shift_match(w, q):
        raise PreconditionFailure(f"q={q} is not a step for {w}")
    if not oracle.contains(w):
        raise PreconditionFailure(f"{w} is not a factor")
    cap = oracle.horizon if cap is None else min(cap, oracle.horizon)
    codes = oracle.alphabet.codes
    found: dict[str, Word] = {}
    partial = False
    for p_len in range(1, q + 1):
        left_expected = _periodic_char(w, q, 1 - p_len)
        left_tail = "".join(
            _periodic_char(w, q, k - p_len) for k in range(2, p_len + 1)
        )
        for a in codes:
            if a == left_expected:
                continue
            for s_len in range(1, q + 1):
                # positions are taken mod q, so neither the continuation
                # head nor the breaking letter depends on r
                right_head = "".join(
                    _periodic_char(w, q, n + k) for k in range(1, s_len)
                )
                right_expected = _periodic_char(w, q, n + s_len)
                for b in codes:
                    if b == right_expected:
                        continue
                    r = 1
                    found_in_series = False
                    while p_len + n + (r - 1) * q + s_len <= cap:
                        data = (
                            a
                            + left_tail
                            + periodic_power(w, q, r).data
                            + right_head
                            + b
                        )
                        z = Word(w.alphabet, data)
                        if oracle.contains(z):
                            found[data] = z
                            found_in_series = True
                        r += 1
                    if found_in_series:
                        partial = True
    exit_words = []
    q_min = minimal_step(w, oracle)
    for data in sorted(found, key=lambda d: (len(d), d)):
        z = found[data]
        # decompose re-checks every representation against the defining
        # predicate; with the minimal step it additionally asserts
        # uniqueness and the occurrence count
        reps = decompose(z, w, q, oracle if q == q_min else None)
        if not reps:
            raise InvariantViolation("constructed exit word fails the predicate")
        exit_words.append(
            ExitWord(z, w, q, tuple(reps), canonical=(q == q_min))
        )
    limit = within = None
    profile = growth_profile(oracle)
    if profile.K is not None and oracle.horizon >= 4:
        rbc = check_rbc(oracle, n_min=1)
        if rbc.holds_within_horizon:
            limit = 2 * profile.K * profile.K
            within = len(exit_words) <= limit
    return EnumerationReport(
        w, q, cap, tuple(exit_words), partial, limit, within
    )


# -- occurrence classification --------------------------------------------


@dataclass(frozen=True)
class OccurrenceClassification:
    """How one occurrence of a word sits inside a sequence: either the
    whole prefix up to it is a tail of the periodic power, or a unique
    exit word encloses it."""

    position: int
    case: str  # "suffix-of-power" | "inside-exit-word"
    r: int | None = None  # for the power case
    exit_word: ExitWord | None = None
    exit_start: int | None = None  # 1-based start of the exit word in x

    @property
    def exit_end(self) -> int | None:
        if self.exit_word is None or self.exit_start is None:
            return None
        return self.exit_start + len(self.exit_word.z) - 1


def classify_occurrence(
    x: SequencePrefix, w: Word, j: int, oracle: LanguageOracle
) -> OccurrenceClassification:
    """Classify the occurrence of ``w`` at position ``j`` of ``x``.

    Needs the minimal step of ``w`` to exist and enough sequence on both
    sides of ``j`` to find the periodicity breaks; running off either end
    raises (insufficient context, including the eventually periodic case).
    """
    n = len(w)
    if x.alphabet != w.alphabet:
        raise PreconditionFailure("sequence and word alphabets differ")
    if x.data[j - 1 : j - 1 + n] != w.data:
        raise PreconditionFailure(f"{w} does not occur at position {j}")
    q = minimal_step(w, oracle)
    if q is None:
        raise PreconditionFailure(f"{w} has no valid step")
    # extend the periodic match leftward from the occurrence
    j1 = j
    while j1 > 1 and x.data[j1 - 2] == _periodic_char(w, q, j1 - j):
        j1 -= 1
    if j1 == 1:
        r = ceil((j - 1) / q) + 1
        power = periodic_power(w, q, r)
        if not power.data.endswith(x.data[: j + n - 1]):
            raise InvariantViolation("suffix-of-power case failed verification")
        return OccurrenceClassification(j, "suffix-of-power", r=r)
    # extend rightward: find the first break after the occurrence
    t = j + n  # next position to test, 1-based
    while t <= len(x.data) and x.data[t - 1] == _periodic_char(w, q, t - j + 1):
        t += 1
    if t > len(x.data):
        raise HorizonExceeded(
            f"periodic match from position {j} runs to the end of the "
            "prefix; cannot resolve the enclosing exit word",
            required=len(x.data) + 1,
        )
    j2 = t - n  # the largest k with x[j .. k+n-1] inside the periodic word
    grid_first = j - ((j - j1) // q) * q
    r = (j2 - j) // q + (j - j1) // q + 1
    z = x.word(j1 - 1, j2 + n)
    p_word = x.word(j1 - 1, grid_first - 1)
    s_word = x.word(grid_first + n + (r - 1) * q, j2 + n)
    if not is_representation(z, w, q, len(p_word), r, len(s_word)):
        raise InvariantViolation("enclosing exit word fails the predicate")
    rep = Representation(p_word, r, s_word)
    exit_word = ExitWord(z, w, q, (rep,), canonical=True)
    return OccurrenceClassification(
        j, "inside-exit-word", exit_word=exit_word, exit_start=j1 - 1
    )


@dataclass(frozen=True)
class OverlapRecord:
    first_start: int
    second_start: int
    first_length: int
    gap_ok: bool  # second >= first + |z| - n
    count_in_union: int
    count_required: int
    count_ok: bool


@dataclass(frozen=True)
class OverlapReport:
    base: Word
    q: int
    pairs: tuple[OverlapRecord, ...]
    all_satisfied: bool
    skipped_positions: tuple[int, ...]


def check_overlap_bound(
    x: SequencePrefix, w: Word, q: int, oracle: LanguageOracle
) -> OverlapReport:
    """Scan a sequence for consecutive exit-word occurrences and verify
    the separation and occurrence-count bounds between neighbours.

    The bounds hold for every sequence, so a violation record would
    falsify the implementation, not the input.
    """
    q_min = minimal_step(w, oracle)
    if q_min != q:
        raise PreconditionFailure(f"q={q} is not the minimal step ({q_min})")
    n = len(w)
    starts = []
    pos = x.data.find(w.data)
    while pos != -1:
        starts.append(pos + 1)
        pos = x.data.find(w.data, pos + 1)
    occ_exits: dict[int, ExitWord] = {}
    skipped = []
    for j in starts:
        try:
            cls = classify_occurrence(x, w, j, oracle)
        except HorizonExceeded:
            skipped.append(j)
            continue
        if cls.case == "inside-exit-word":
            assert cls.exit_start is not None and cls.exit_word is not None
            occ_exits.setdefault(cls.exit_start, cls.exit_word)
    ordered = sorted(occ_exits)
    pairs = []
    ok = True
    for i, i2 in zip(ordered, ordered[1:]):
        z1, z2 = occ_exits[i], occ_exits[i2]
        gap_ok = i2 >= i + len(z1.z) - n
        union = x.word(i, i2 + len(z2.z) - 1)
        count, _ = occurrences(union, w)
        required = z1.representations[0].r + z2.representations[0].r
        count_ok = count >= required
        ok = ok and gap_ok and count_ok
        pairs.append(
            OverlapRecord(i, i2, len(z1.z), gap_ok, count, required, count_ok)
        )
    return OverlapReport(w, q, tuple(pairs), ok, tuple(skipped))
