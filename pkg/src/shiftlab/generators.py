"""Concrete sequence sources: interval exchanges, substitutions, rotation
codings, and file ingestion, plus the prefix-to-oracle bridge.

All interval-exchange and rotation arithmetic is exact.  Orbits run on
integers (points scaled by the common denominator of the data), so
"irrational-like" parameters are supplied as high-denominator convergents
and behave irrationally at any horizon this package can afford.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from fractions import Fraction
from math import lcm
from pathlib import Path
from typing import Sequence

from .errors import PreconditionFailure
from .language import LanguageOracle
from .words import Alphabet, Word


@dataclass(frozen=True)
class SequencePrefix:
    """A finite prefix of a one-sided infinite sequence."""

    alphabet: Alphabet
    data: str  # one code char per letter
    provenance: str
    recurrent: bool | None = None

    def __post_init__(self):
        if not self.data:
            raise ValueError("empty sequence prefix")
        bad = set(self.data) - set(self.alphabet.codes)
        if bad:
            raise ValueError(
                f"sequence data contains non-code characters {sorted(bad)}; "
                "use from_tokens for token input"
            )

    @classmethod
    def from_tokens(
        cls,
        alphabet: Alphabet,
        tokens: str | Sequence[str],
        provenance: str = "tokens",
        recurrent: bool | None = None,
    ) -> "SequencePrefix":
        return cls(alphabet, alphabet.word(tokens).data, provenance, recurrent)

    def __len__(self) -> int:
        return len(self.data)

    def word(self, i: int, j: int) -> Word:
        """The subword at 1-based inclusive positions ``[i, j]``."""
        if not (1 <= i <= j <= len(self.data)):
            raise ValueError(f"window [{i},{j}] outside prefix of length {len(self)}")
        return Word(self.alphabet, self.data[i - 1 : j])

    def tokens(self) -> tuple[str, ...]:
        return tuple(self.alphabet.token(c) for c in self.data)


# -- interval exchange transformations -----------------------------------


@dataclass(frozen=True)
class IETSpec:
    """Lengths, permutation and start point of an interval exchange.

    ``permutation[j-1]`` is the 1-based position that the j-th interval
    takes after rearrangement.
    """

    lengths: tuple[Fraction, ...]
    permutation: tuple[int, ...]
    start: Fraction = Fraction(0)

    def __post_init__(self):
        d = len(self.lengths)
        if d < 2:
            raise ValueError("interval exchange needs at least 2 intervals")
        if any(x <= 0 for x in self.lengths):
            raise ValueError("interval lengths must be positive")
        if sum(self.lengths) != 1:
            raise ValueError("interval lengths must sum to 1")
        if sorted(self.permutation) != list(range(1, d + 1)):
            raise ValueError("permutation must be a bijection of 1..d")
        if not 0 <= self.start < 1:
            raise ValueError("start point must lie in [0, 1)")

    @property
    def d(self) -> int:
        return len(self.lengths)


class IntervalExchange:
    """The piecewise translation defined by an :class:`IETSpec`.

    Points are handled as integers scaled by the common denominator of
    the input data, so iteration is exact and fast.
    """

    def __init__(self, spec: IETSpec):
        self.spec = spec
        d = spec.d
        self.scale = lcm(*(x.denominator for x in spec.lengths), spec.start.denominator)
        lens = [int(x * self.scale) for x in spec.lengths]
        # domain breakpoints 0 = b_0 < b_1 < ... < b_d = scale
        self.breaks = [0]
        for ln in lens:
            self.breaks.append(self.breaks[-1] + ln)
        # target offset of interval j: total length of intervals placed before it
        self.offsets = []
        for j in range(d):
            before = sum(lens[k] for k in range(d) if spec.permutation[k] < spec.permutation[j])
            self.offsets.append(before - self.breaks[j])

    def interval_of(self, p: int) -> int:
        """0-based index of the interval containing the scaled point."""
        lo, hi = 0, self.spec.d - 1
        while lo < hi:
            mid = (lo + hi + 1) // 2
            if self.breaks[mid] <= p:
                lo = mid
            else:
                hi = mid - 1
        return lo

    def apply(self, p: int) -> int:
        return p + self.offsets[self.interval_of(p)]

    def apply_fraction(self, x: Fraction) -> Fraction:
        """Exact image of an arbitrary point of [0, 1)."""
        scaled = x * self.scale
        j = 0
        for j in range(self.spec.d - 1, -1, -1):
            if self.breaks[j] <= scaled:
                break
        return x + Fraction(self.offsets[j], self.scale)

    def inverse_spec(self) -> IETSpec:
        """Spec of the inverse map (image intervals as new domain)."""
        d = self.spec.d
        inv = [0] * d
        for j, pj in enumerate(self.spec.permutation):
            inv[pj - 1] = j + 1
        lengths = tuple(self.spec.lengths[inv[p] - 1] for p in range(d))
        permutation = tuple(inv[p] for p in range(d))
        return IETSpec(lengths, permutation, Fraction(0))


@dataclass(frozen=True)
class KeaneDiagnostic:
    """Whether some orbit point hit an interior division point."""

    violated: bool
    step: int | None = None
    point: Fraction | None = None
    boundary_index: int | None = None


def iet_encode(spec: IETSpec, length: int) -> tuple[SequencePrefix, KeaneDiagnostic]:
    """Code the forward orbit of the start point by interval index.

    Letter ``i`` names the (1-based) interval containing the ``(i-1)``-th
    iterate, with the left-closed right-open interval convention.
    """
    if length < 1:
        raise ValueError("length must be >= 1")
    iet = IntervalExchange(spec)
    alphabet = Alphabet(tuple(str(j) for j in range(1, spec.d + 1)))
    interior = set(iet.breaks[1:-1])
    p = int(spec.start * iet.scale)
    letters = []
    diag = KeaneDiagnostic(False)
    for i in range(length):
        if p in interior and not diag.violated:
            diag = KeaneDiagnostic(
                True, i, Fraction(p, iet.scale), iet.breaks.index(p)
            )
        j = iet.interval_of(p)
        letters.append(alphabet.codes[j])
        p = iet.apply(p)
    prefix = SequencePrefix(
        alphabet,
        "".join(letters),
        f"iet d={spec.d} lengths={[str(x) for x in spec.lengths]} "
        f"pi={list(spec.permutation)} z={spec.start} N={length}",
        recurrent=True,
    )
    return prefix, diag


def iet_orbit(spec: IETSpec, length: int) -> list[Fraction]:
    """The first ``length`` orbit points, as exact fractions."""
    iet = IntervalExchange(spec)
    p = int(spec.start * iet.scale)
    out = []
    for _ in range(length):
        out.append(Fraction(p, iet.scale))
        p = iet.apply(p)
    return out


# -- substitutions ---------------------------------------------------------


@dataclass(frozen=True)
class SubstitutionSpec:
    """A substitution with a prolongable seed letter.

    The rule of the seed must begin with the seed and have length at
    least 2, so iteration converges to a unique growing fixed point.
    """

    alphabet: Alphabet
    rules: dict[str, tuple[str, ...]]  # token -> token sequence
    seed: str

    def __post_init__(self):
        for tok in self.alphabet.symbols:
            if tok not in self.rules or not self.rules[tok]:
                raise ValueError(f"rule missing or empty for symbol {tok!r}")
            for t in self.rules[tok]:
                if t not in self.alphabet.symbols:
                    raise ValueError(f"rule for {tok!r} uses unknown symbol {t!r}")
        if self.seed not in self.alphabet.symbols:
            raise ValueError(f"seed {self.seed!r} not in alphabet")
        seed_rule = self.rules[self.seed]
        if seed_rule[0] != self.seed:
            raise PreconditionFailure(
                f"seed not prolongable: rule({self.seed!r}) does not start with it"
            )
        if len(seed_rule) < 2:
            raise PreconditionFailure(
                "substitution is not growing on the seed"
            )


def substitution_fixed_point(spec: SubstitutionSpec, length: int) -> SequencePrefix:
    """The length-``length`` prefix of the fixed point of the substitution."""
    if length < 1:
        raise ValueError("length must be >= 1")
    code_rules = {
        spec.alphabet.code(tok): "".join(spec.alphabet.code(t) for t in seq)
        for tok, seq in spec.rules.items()
    }
    s = spec.alphabet.code(spec.seed)
    while len(s) < length:
        s = "".join(code_rules[c] for c in s[:length])
    rules_desc = ",".join(
        f"{tok}->{''.join(seq)}" for tok, seq in sorted(spec.rules.items())
    )
    return SequencePrefix(
        spec.alphabet,
        s[:length],
        f"substitution {rules_desc} seed={spec.seed} N={length}",
        recurrent=True,
    )


def fibonacci_prefix(length: int) -> SequencePrefix:
    """Fixed point of a -> ab, b -> a."""
    ab = Alphabet(("a", "b"))
    spec = SubstitutionSpec(ab, {"a": ("a", "b"), "b": ("a",)}, "a")
    return substitution_fixed_point(spec, length)


def thue_morse_prefix(length: int) -> SequencePrefix:
    """Fixed point of 0 -> 01, 1 -> 10."""
    zo = Alphabet(("0", "1"))
    spec = SubstitutionSpec(zo, {"0": ("0", "1"), "1": ("1", "0")}, "0")
    return substitution_fixed_point(spec, length)


# -- rotation codings ------------------------------------------------------


def continued_fraction_value(quotients: Sequence[int]) -> Fraction:
    """Value of the continued fraction [0; a1, a2, ...]."""
    if not quotients or any(a < 1 for a in quotients):
        raise ValueError("partial quotients must be positive integers")
    value = Fraction(0)
    for a in reversed(quotients):
        value = Fraction(1, a + value)
    return value


def rotation_coding(
    alpha: Fraction | Sequence[int], length: int
) -> SequencePrefix:
    """Two-letter coding of the rotation by ``alpha`` started at 0.

    Letter ``1`` marks orbit points in ``[1 - alpha, 1)``.  ``alpha`` may
    be given directly or as a stream of continued-fraction partial
    quotients (the convergent they determine is used, exactly).
    """
    if not isinstance(alpha, Fraction):
        alpha = continued_fraction_value(alpha)
    if not 0 < alpha < 1:
        raise ValueError("rotation number must lie in (0, 1)")
    if length < 1:
        raise ValueError("length must be >= 1")
    p, q = alpha.numerator, alpha.denominator
    zo = Alphabet(("0", "1"))
    threshold = q - p
    letters = []
    r = 0
    for _ in range(length):
        letters.append("1" if r >= threshold else "0")
        r = (r + p) % q
    return SequencePrefix(
        zo,
        "".join(letters),
        f"rotation alpha={alpha} N={length}",
        recurrent=True,
    )


# -- prefix -> oracle -------------------------------------------------------


def oracle_from_prefix(x: SequencePrefix, horizon: int) -> LanguageOracle:
    """Oracle whose factor sets are exactly the window contents of ``x``.

    Requires ``horizon <= len(x)/4`` so extension queries and the block
    computations downstream are honestly witnessed away from the prefix
    boundary.
    """
    if horizon < 1:
        raise ValueError("horizon must be >= 1")
    if 4 * horizon > len(x):
        raise PreconditionFailure(
            f"horizon {horizon} too large for prefix of length {len(x)}; "
            f"need length >= {4 * horizon}"
        )
    data = x.data
    levels = {}
    for n in range(1, horizon + 1):
        levels[n] = frozenset(
            data[i : i + n] for i in range(len(data) - n + 1)
        )
    return LanguageOracle(
        x.alphabet,
        levels,
        horizon,
        f"prefix N={len(x)} H={horizon} of [{x.provenance}]",
        recurrent=x.recurrent,
    )


# -- file ingestion ----------------------------------------------------------


def read_sequence_file(path: str | Path) -> SequencePrefix:
    """Sequence file: line 1 ``alphabet: s1,s2,...``; remaining lines are
    whitespace-separated symbol tokens."""
    text = Path(path).read_text()
    lines = text.splitlines()
    if not lines or not lines[0].lower().startswith("alphabet:"):
        raise ValueError(f"{path}: first line must be 'alphabet: s1,s2,...'")
    symbols = tuple(tok.strip() for tok in lines[0].split(":", 1)[1].split(","))
    alphabet = Alphabet(symbols)
    tokens = " ".join(lines[1:]).split()
    if not tokens:
        raise ValueError(f"{path}: no sequence data")
    data = "".join(alphabet.code(t) for t in tokens)
    return SequencePrefix(alphabet, data, f"file {path}", recurrent=None)


def read_iet_file(path: str | Path) -> IETSpec:
    """IET spec file: JSON with keys d, lambda (array of 'p/q' strings),
    pi (array of ints), z ('p/q')."""
    obj = json.loads(Path(path).read_text())
    lengths = tuple(Fraction(s) for s in obj["lambda"])
    if "d" in obj and obj["d"] != len(lengths):
        raise ValueError(f"{path}: d={obj['d']} but {len(lengths)} lengths given")
    return IETSpec(
        lengths,
        tuple(int(v) for v in obj["pi"]),
        Fraction(obj.get("z", 0)),
    )


def read_substitution_file(path: str | Path) -> SubstitutionSpec:
    """Substitution file: JSON with keys alphabet (array), rules (object
    mapping symbol to replacement string or array), seed."""
    obj = json.loads(Path(path).read_text())
    alphabet = Alphabet(tuple(obj["alphabet"]))
    rules = {}
    for tok, rep in obj["rules"].items():
        if isinstance(rep, str):
            if not alphabet._single_char_tokens:
                raise ValueError(
                    f"{path}: string rules are ambiguous for multi-character symbols"
                )
            rules[tok] = tuple(rep)
        else:
            rules[tok] = tuple(rep)
    return SubstitutionSpec(alphabet, rules, obj["seed"])
