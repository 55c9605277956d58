"""Finite-horizon language oracles and factor-language analyses.

An oracle stores the verified factor sets of a language up to a declared
horizon.  Every verdict produced here is a "within horizon" statement and
reports carry the horizon they were computed at; nothing is claimed about
lengths the oracle has not seen.
"""

from __future__ import annotations

import json
from dataclasses import dataclass
from typing import Iterable, Literal, Mapping

from .errors import (
    AlphabetMismatch,
    HorizonExceeded,
    InvariantViolation,
    NotAFactor,
    PreconditionFailure,
)
from .words import Alphabet, Word

Side = Literal["left", "right"]
SIDES: tuple[Side, Side] = ("left", "right")


class LanguageOracle:
    """Membership and extension queries, exact up to a declared horizon.

    Invariants checked at construction:

    * factor closure: both one-letter truncations of every stored word of
      length ``n`` are stored at length ``n - 1``;
    * extendability: every stored word of length ``n <= horizon - 2`` has
      a two-sided one-letter extension stored at length ``n + 2``;
    * every alphabet symbol occurs as a length-1 factor.
    """

    def __init__(
        self,
        alphabet: Alphabet,
        levels: Mapping[int, frozenset[str]],
        horizon: int,
        source_label: str,
        recurrent: bool | None = None,
        _skip_checks: bool = False,
    ):
        self.alphabet = alphabet
        self.horizon = horizon
        self.source_label = source_label
        self.recurrent = recurrent
        self._levels = dict(levels)
        self._left_maps: dict[int, dict[str, frozenset[str]]] = {}
        self._right_maps: dict[int, dict[str, frozenset[str]]] = {}
        self._special_sets: dict[tuple[int, Side], frozenset[str]] = {}
        if horizon < 1:
            raise ValueError("horizon must be >= 1")
        if set(self._levels) != set(range(1, horizon + 1)):
            raise ValueError("factor sets must cover lengths 1..horizon exactly")
        if not _skip_checks:
            self._check_invariants()

    # -- construction -------------------------------------------------

    @classmethod
    def from_factor_sets(
        cls,
        alphabet: Alphabet,
        factors: Mapping[int, Iterable[Word]],
        source_label: str = "explicit",
        recurrent: bool | None = None,
    ) -> "LanguageOracle":
        horizon = max(factors)
        levels = {}
        for n in range(1, horizon + 1):
            strs = set()
            for w in factors.get(n, ()):
                if w.alphabet != alphabet:
                    raise AlphabetMismatch("factor uses a different alphabet")
                if len(w) != n:
                    raise ValueError(f"word {w} filed under wrong length {n}")
                strs.add(w.data)
            levels[n] = frozenset(strs)
        return cls(alphabet, levels, horizon, source_label, recurrent)

    @classmethod
    def full_shift(cls, alphabet: Alphabet, horizon: int) -> "LanguageOracle":
        """The language of all words over the alphabet, up to the horizon."""
        if alphabet.size**horizon > 4_000_000:
            raise ValueError("full shift of this size would not fit in memory")
        codes = alphabet.codes
        levels: dict[int, frozenset[str]] = {}
        level = [""]
        for n in range(1, horizon + 1):
            level = [w + c for w in level for c in codes]
            levels[n] = frozenset(level)
        return cls(
            alphabet,
            levels,
            horizon,
            f"full shift on {','.join(alphabet.symbols)}",
            recurrent=True,
            _skip_checks=True,
        )

    def _check_invariants(self) -> None:
        for code in self.alphabet.codes:
            if code not in self._levels[1]:
                raise InvariantViolation(
                    f"alphabet symbol {self.alphabet.token(code)!r} never occurs "
                    "as a factor"
                )
        for n in range(2, self.horizon + 1):
            below = self._levels[n - 1]
            for w in self._levels[n]:
                if w[1:] not in below or w[:-1] not in below:
                    raise InvariantViolation(
                        f"factor closure fails at length {n}: {w!r}"
                    )
        for n in range(1, self.horizon - 1):
            above = self._levels[n + 2]
            middles = {w[1:-1] for w in above}
            for w in self._levels[n]:
                if w not in middles:
                    raise InvariantViolation(
                        f"extendability fails: no two-sided extension of a "
                        f"length-{n} factor within the data"
                    )

    # -- basic queries -------------------------------------------------

    def require_length(self, n: int, what: str = "query") -> None:
        if n > self.horizon:
            raise HorizonExceeded(
                f"{what} needs factors of length {n}, horizon is {self.horizon}",
                required=n,
            )
        if n < 1:
            raise ValueError("length must be >= 1")

    def factor_strings(self, n: int) -> frozenset[str]:
        self.require_length(n)
        return self._levels[n]

    def words(self, n: int) -> list[Word]:
        return [Word(self.alphabet, d) for d in sorted(self.factor_strings(n))]

    def contains(self, w: Word) -> bool:
        if w.alphabet != self.alphabet:
            raise AlphabetMismatch("word and oracle use different alphabets")
        self.require_length(len(w), "membership")
        return w.data in self._levels[len(w)]

    def p(self, n: int) -> int:
        """Complexity: the number of distinct factors of length ``n``."""
        return len(self.factor_strings(n))

    # -- extension maps (bulk, memoized) --------------------------------

    def left_extension_map(self, n: int) -> dict[str, frozenset[str]]:
        """For every factor of length ``n``: the codes extending it on the left."""
        if n not in self._left_maps:
            self.require_length(n + 1, "left extensions")
            acc: dict[str, set[str]] = {w: set() for w in self._levels[n]}
            for w1 in self._levels[n + 1]:
                acc[w1[1:]].add(w1[0])
            self._left_maps[n] = {w: frozenset(s) for w, s in acc.items()}
        return self._left_maps[n]

    def right_extension_map(self, n: int) -> dict[str, frozenset[str]]:
        if n not in self._right_maps:
            self.require_length(n + 1, "right extensions")
            acc: dict[str, set[str]] = {w: set() for w in self._levels[n]}
            for w1 in self._levels[n + 1]:
                acc[w1[:-1]].add(w1[-1])
            self._right_maps[n] = {w: frozenset(s) for w, s in acc.items()}
        return self._right_maps[n]

    def special_strings(self, n: int, side: Side) -> frozenset[str]:
        key = (n, side)
        if key not in self._special_sets:
            ext = (
                self.left_extension_map(n)
                if side == "left"
                else self.right_extension_map(n)
            )
            self._special_sets[key] = frozenset(
                w for w, exts in ext.items() if len(exts) >= 2
            )
        return self._special_sets[key]


# -- per-word extension analysis ---------------------------------------


@dataclass(frozen=True)
class ExtensionRecord:
    """One- and two-sided extensions of a factor, with multiplicity."""

    word: Word
    left: frozenset[str]  # symbol tokens
    right: frozenset[str]
    both: frozenset[tuple[str, str]]

    @property
    def multiplicity(self) -> int:
        return len(self.both) - len(self.left) - len(self.right) + 1

    def is_special(self, side: Side) -> bool:
        return len(self.left if side == "left" else self.right) >= 2

    @property
    def is_bispecial(self) -> bool:
        return len(self.left) >= 2 and len(self.right) >= 2


def extensions(oracle: LanguageOracle, w: Word) -> ExtensionRecord:
    """Exact extension sets of ``w``, read off the stored factor sets."""
    n = len(w)
    if n > oracle.horizon - 2:
        raise HorizonExceeded(
            f"extension query for length {n} needs horizon {n + 2}",
            required=n + 2,
        )
    if not oracle.contains(w):
        raise NotAFactor(f"not a factor: {w}")
    lvl1 = oracle.factor_strings(n + 1)
    lvl2 = oracle.factor_strings(n + 2)
    tok = oracle.alphabet.token
    codes = oracle.alphabet.codes
    left = frozenset(tok(a) for a in codes if a + w.data in lvl1)
    right = frozenset(tok(b) for b in codes if w.data + b in lvl1)
    both = frozenset(
        (tok(a), tok(b))
        for a in codes
        for b in codes
        if a + w.data + b in lvl2
    )
    return ExtensionRecord(w, left, right, both)


def special_words(
    oracle: LanguageOracle, n: int, side: Literal["left", "right", "bi"]
) -> set[Word]:
    """Factors of length ``n`` with at least two extensions on the side."""
    if n > oracle.horizon - 2:
        raise HorizonExceeded(
            f"special-word query at length {n} needs horizon {n + 2}",
            required=n + 2,
        )
    if side == "bi":
        strs = oracle.special_strings(n, "left") & oracle.special_strings(n, "right")
    else:
        strs = oracle.special_strings(n, side)
    return {Word(oracle.alphabet, d) for d in strs}


@dataclass(frozen=True)
class RegularityVerdict:
    """Outcome of the regular-bispecial test for one word."""

    word: Word
    regular: bool
    left_witness: str | None  # the unique a with aw right special
    right_witness: str | None  # the unique b with wb left special
    reason: str | None = None


def is_regular_bispecial(oracle: LanguageOracle, w: Word) -> RegularityVerdict:
    """Test whether exactly one right extension of ``w`` is left special
    and exactly one left extension is right special."""
    n = len(w)
    if n > oracle.horizon - 3:
        raise HorizonExceeded(
            f"regularity test at length {n} needs horizon {n + 3}",
            required=n + 3,
        )
    rec = extensions(oracle, w)
    if not rec.is_bispecial:
        raise PreconditionFailure(f"not bispecial: {w}")
    left_special_above = oracle.special_strings(n + 1, "left")
    right_special_above = oracle.special_strings(n + 1, "right")
    good_b = sorted(
        b for b in rec.right if w.data + oracle.alphabet.code(b) in left_special_above
    )
    good_a = sorted(
        a for a in rec.left if oracle.alphabet.code(a) + w.data in right_special_above
    )
    if len(good_b) == 1 and len(good_a) == 1:
        return RegularityVerdict(w, True, good_a[0], good_b[0])
    reason = (
        f"{len(good_b)} right extensions are left special "
        f"({','.join(good_b) or 'none'}); "
        f"{len(good_a)} left extensions are right special "
        f"({','.join(good_a) or 'none'})"
    )
    return RegularityVerdict(w, False, None, None, reason)


# -- extension graph ----------------------------------------------------


@dataclass(frozen=True)
class ExtensionGraph:
    """Bipartite graph on the one-sided extensions of a factor; edges are
    the two-sided extensions."""

    word: Word
    left: frozenset[str]
    right: frozenset[str]
    edges: frozenset[tuple[str, str]]

    @property
    def vertex_count(self) -> int:
        return len(self.left) + len(self.right)

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def is_connected(self) -> bool:
        verts = {("L", a) for a in self.left} | {("R", b) for b in self.right}
        if not verts:
            return True
        adj: dict[tuple[str, str], set[tuple[str, str]]] = {v: set() for v in verts}
        for a, b in self.edges:
            adj[("L", a)].add(("R", b))
            adj[("R", b)].add(("L", a))
        seen = set()
        stack = [next(iter(verts))]
        while stack:
            v = stack.pop()
            if v in seen:
                continue
            seen.add(v)
            stack.extend(adj[v] - seen)
        return len(seen) == len(verts)

    @property
    def is_tree(self) -> bool:
        return self.is_connected() and self.edge_count == self.vertex_count - 1


def extension_graph(oracle: LanguageOracle, w: Word) -> ExtensionGraph:
    rec = extensions(oracle, w)
    return ExtensionGraph(w, rec.left, rec.right, rec.both)


def is_dendric(oracle: LanguageOracle, w: Word) -> bool:
    return extension_graph(oracle, w).is_tree


# -- growth profile ------------------------------------------------------


@dataclass(frozen=True)
class GrowthProfile:
    """Complexity values, first differences, and the constant-tail verdict."""

    horizon: int
    p: dict[int, int]
    differences: dict[int, int]
    K: int | None
    N0: int | None

    @property
    def verdict(self) -> str:
        if self.K is None:
            return "not constant within horizon"
        return f"constant {self.K} from {self.N0}"

    def constant_at(self, n: int) -> bool:
        return self.K is not None and self.N0 is not None and self.N0 <= n

    def to_json(self) -> dict:
        return {
            "horizon": self.horizon,
            "p": [self.p[n] for n in range(1, self.horizon + 1)],
            "differences": [
                self.differences[n] for n in range(1, self.horizon)
            ],
            "K": self.K,
            "N0": self.N0,
            "verdict": self.verdict,
        }


def growth_profile(oracle: LanguageOracle) -> GrowthProfile:
    """Complexity profile with the growth-sum identity verified at every
    length and on both sides.

    The identity states that the complexity difference equals the total
    branching excess of the special words on either side; a mismatch is
    an internal-consistency failure of the oracle.
    """
    if oracle.horizon < 3:
        raise PreconditionFailure("growth profile needs horizon >= 3")
    H = oracle.horizon
    p = {n: oracle.p(n) for n in range(1, H + 1)}
    differences = {n: p[n + 1] - p[n] for n in range(1, H)}
    for n in range(1, H - 1):
        for side in SIDES:
            ext = (
                oracle.left_extension_map(n)
                if side == "left"
                else oracle.right_extension_map(n)
            )
            branch_sum = sum(len(e) - 1 for e in ext.values())
            if branch_sum != differences[n]:
                raise InvariantViolation(
                    f"growth-sum identity fails at n={n} side={side}: "
                    f"{branch_sum} != {differences[n]}"
                )
    K = N0 = None
    if H >= 3:
        tail_value = differences[H - 1]
        n0 = H - 1
        while n0 - 1 >= 1 and differences[n0 - 1] == tail_value:
            n0 -= 1
        # a single trailing value is not evidence of a constant tail
        if n0 <= H - 2:
            K, N0 = tail_value, n0
    return GrowthProfile(H, p, differences, K, N0)


# -- regular bispecial condition, periodicity ----------------------------


@dataclass(frozen=True)
class RbcReport:
    holds_within_horizon: bool
    violations: list[tuple[Word, str]]
    n0_estimate: int
    n_min: int
    max_length_checked: int
    horizon: int

    def to_json(self) -> dict:
        return {
            "horizon": self.horizon,
            "holds_within_horizon": self.holds_within_horizon,
            "n_min": self.n_min,
            "max_length_checked": self.max_length_checked,
            "n0_estimate": self.n0_estimate,
            "violations": [
                {"word": str(w), "reason": r} for w, r in self.violations
            ],
        }


def check_rbc(
    oracle: LanguageOracle, n_min: int = 1, n_max: int | None = None
) -> RbcReport:
    """Test every bispecial factor of length in ``[n_min, horizon-3]``
    (or up to ``n_max``) for regularity.

    ``n0_estimate`` is one more than the longest irregular bispecial found
    (a lower-bound witness only, never the true threshold).
    """
    top = oracle.horizon - 3
    if n_max is not None:
        top = min(top, n_max)
    if n_min > top:
        raise PreconditionFailure(
            f"no checkable lengths: n_min={n_min}, top={top}"
        )
    violations: list[tuple[Word, str]] = []
    for n in range(n_min, top + 1):
        bis = sorted(
            oracle.special_strings(n, "left") & oracle.special_strings(n, "right")
        )
        for data in bis:
            w = Word(oracle.alphabet, data)
            verdict = is_regular_bispecial(oracle, w)
            if not verdict.regular:
                violations.append((w, verdict.reason or "irregular"))
    n0_estimate = n_min
    if violations:
        n0_estimate = 1 + max(len(w) for w, _ in violations)
    return RbcReport(
        not violations, violations, n0_estimate, n_min, top, oracle.horizon
    )


@dataclass(frozen=True)
class PeriodicityReport:
    periodic_within_horizon: bool
    n0: int | None  # least length with p(n0) <= n0
    period: int | None
    horizon: int

    def to_json(self) -> dict:
        return {
            "horizon": self.horizon,
            "periodic_within_horizon": self.periodic_within_horizon,
            "n0": self.n0,
            "period": self.period,
        }


def periodicity_check(oracle: LanguageOracle) -> PeriodicityReport:
    """Morse-Hedlund test: report the least ``n0 <= horizon`` with
    ``p(n0) <= n0`` and the detected period, else aperiodic-within-horizon."""
    for n in range(1, oracle.horizon + 1):
        if oracle.p(n) <= n:
            return PeriodicityReport(True, n, _detect_period(oracle), oracle.horizon)
    return PeriodicityReport(False, None, None, oracle.horizon)


def _detect_period(oracle: LanguageOracle) -> int:
    top = oracle.factor_strings(oracle.horizon)
    for p in range(1, oracle.horizon + 1):
        if all(
            w[i] == w[i + p] for w in top for i in range(len(w) - p)
        ):
            return p
    return oracle.horizon  # unreachable for genuinely periodic data


# -- unique special extensions -------------------------------------------


@dataclass(frozen=True)
class ExtensionMapResult:
    mapping: dict[Word, Word] | None
    failure_witness: tuple[Word, int] | None  # (word, extension count)


def special_extension_map(
    oracle: LanguageOracle, side: Side, n1: int, n2: int
) -> ExtensionMapResult:
    """For each side-special word of length ``n1``, the unique side-special
    word of length ``n2`` extending it (keeping it as prefix for left
    specials, suffix for right specials).

    Refuses outright when the regular-bispecial condition has not been
    verified on the covered range; returns a failure witness when some
    word has zero or several special extensions (which would falsify that
    precondition).
    """
    if not (1 <= n1 <= n2 <= oracle.horizon - 2):
        raise HorizonExceeded(
            f"extension map needs n1 <= n2 <= {oracle.horizon - 2}",
            required=n2 + 2,
        )
    if n2 > n1:
        rbc = check_rbc(oracle, n_min=n1, n_max=min(n2, oracle.horizon - 3))
        if not rbc.holds_within_horizon:
            raise PreconditionFailure(
                "RBC not established on the requested range; first violation "
                f"at {rbc.violations[0][0]}"
            )
    mapping: dict[Word, Word] = {}
    for start in sorted(oracle.special_strings(n1, side)):
        current = start
        for n in range(n1, n2):
            specials_above = oracle.special_strings(n + 1, side)
            if side == "left":
                candidates = [
                    current + b
                    for b in oracle.alphabet.codes
                    if current + b in specials_above
                ]
            else:
                candidates = [
                    a + current
                    for a in oracle.alphabet.codes
                    if a + current in specials_above
                ]
            if len(candidates) != 1:
                return ExtensionMapResult(
                    None, (Word(oracle.alphabet, current), len(candidates))
                )
            current = candidates[0]
        mapping[Word(oracle.alphabet, start)] = Word(oracle.alphabet, current)
    return ExtensionMapResult(mapping, None)


def analysis_report(oracle: LanguageOracle, n_min: int = 1) -> dict:
    """Combined growth / RBC / periodicity JSON-ready report."""
    profile = growth_profile(oracle)
    per = periodicity_check(oracle)
    report = {
        "source": oracle.source_label,
        "alphabet": list(oracle.alphabet.symbols),
        "growth": profile.to_json(),
        "periodicity": per.to_json(),
    }
    if oracle.horizon - 3 >= n_min:
        report["rbc"] = check_rbc(oracle, n_min).to_json()
    return report


def dumps_report(report: dict) -> str:
    return json.dumps(report, indent=2, sort_keys=True)
