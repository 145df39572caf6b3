"""Species alphabets, multiset configurations, and annihilation rules.

Configurations are dense count vectors over a frozen, ordered alphabet;
rules are sparse (ordinal, count) pairs for reactants and products.  All
counts are plain Python ints, so the exponential-volume compiler can
exceed 64-bit ranges without ceremony.

Species emitted by the compilers follow this grammar (one token, no
whitespace):

    x[<i>]T | x[<i>]F        per-wire input carrier for gate <i>
    y[<i>]T | y[<i>]F        single-form gate output
    y[<j>-><i>]T|F           per-input gate output (input <j> into gate <i>)
    a[<i>]T|F, b[<i>]T|F     majority-gate vote and tally helpers
    dx, dy                   deleter species of the catalyst backend

The engine itself accepts any whitespace-free species token.

Rule text is one rule per line: reactants joined by `` + ``, then
``->``, then products (``.`` for none).  A catalytic rule repeats the
surviving reactant on the right, e.g. ``dx + x[1]T -> dx``.
"""
from __future__ import annotations

import re
from dataclasses import dataclass, field
from enum import Enum
from typing import Iterable, Mapping

SPECIES_RE = re.compile(
    r"^(?:d[xy]|[xab]\[\d+\][TF]|y\[\d+(?:->\d+)?\][TF])$"
)


def x_name(gid: int, bit: bool) -> str:
    return f"x[{gid}]{'T' if bit else 'F'}"


def y_name(gid: int, bit: bool) -> str:
    return f"y[{gid}]{'T' if bit else 'F'}"


def y_arrow_name(src: int, dst: int, bit: bool) -> str:
    return f"y[{src}->{dst}]{'T' if bit else 'F'}"


def a_name(gid: int, bit: bool) -> str:
    return f"a[{gid}]{'T' if bit else 'F'}"


def b_name(gid: int, bit: bool) -> str:
    return f"b[{gid}]{'T' if bit else 'F'}"


class AlphabetMismatch(ValueError):
    """Configuration and rule belong to different alphabets."""


class Alphabet:
    """Frozen ordered species alphabet; name <-> ordinal bijection."""

    def __init__(self, names: Iterable[str]):
        self.names = tuple(names)
        self.index: dict[str, int] = {}
        for i, n in enumerate(self.names):
            if not n or any(c.isspace() for c in n):
                raise ValueError(f"bad species name {n!r}")
            if n in self.index:
                raise ValueError(f"duplicate species {n!r}")
            self.index[n] = i

    def __len__(self) -> int:
        return len(self.names)

    def ordinal(self, name: str) -> int:
        try:
            return self.index[name]
        except KeyError:
            raise KeyError(f"species {name!r} not in alphabet") from None

    def __eq__(self, other) -> bool:
        return isinstance(other, Alphabet) and self.names == other.names

    def __hash__(self) -> int:
        return hash(self.names)

    def __repr__(self) -> str:  # pragma: no cover
        return f"Alphabet({len(self.names)} species)"


@dataclass(frozen=True)
class Configuration:
    """A multiset of species: dense counts over one alphabet."""

    alphabet: Alphabet
    counts: tuple[int, ...]

    def __post_init__(self):
        if len(self.counts) != len(self.alphabet):
            raise ValueError("counts length does not match alphabet")
        if any(c < 0 for c in self.counts):
            raise ValueError("negative species count")

    @classmethod
    def from_dict(cls, alphabet: Alphabet, d: Mapping[str, int]) -> "Configuration":
        counts = [0] * len(alphabet)
        for name, c in d.items():
            counts[alphabet.ordinal(name)] += c
        return cls(alphabet, tuple(counts))

    @property
    def volume(self) -> int:
        return sum(self.counts)

    def get(self, name: str) -> int:
        return self.counts[self.alphabet.ordinal(name)]

    def as_dict(self) -> dict[str, int]:
        """Sparse view for display: only species with nonzero count."""
        return {
            self.alphabet.names[i]: c for i, c in enumerate(self.counts) if c
        }

    def __repr__(self) -> str:  # pragma: no cover
        inner = ", ".join(f"{n}:{c}" for n, c in self.as_dict().items())
        return "{" + inner + "}"


class RuleFamily(Enum):
    TRUE_VOID = "true-void"
    CATALYTIC_VOID = "catalytic-void"
    AUTOGENESIS = "autogenesis"
    OTHER = "other"


@dataclass(frozen=True)
class RuleClass:
    size: tuple[int, int]
    family: RuleFamily


@dataclass(frozen=True)
class Rule:
    """A reaction: sparse reactant and product count vectors.

    ``reactants``/``products`` are sorted (ordinal, count) pairs with
    positive counts.  The net change (products - reactants) is cached
    for the engine.
    """

    alphabet: Alphabet
    reactants: tuple[tuple[int, int], ...]
    products: tuple[tuple[int, int], ...]
    delta: tuple[tuple[int, int], ...] = field(init=False, compare=False, repr=False)

    def __post_init__(self):
        if not self.reactants or any(c <= 0 for _, c in self.reactants):
            raise ValueError("rule needs at least one reactant with positive count")
        if any(c <= 0 for _, c in self.products):
            raise ValueError("product counts must be positive")
        net: dict[int, int] = {}
        for o, c in self.reactants:
            net[o] = net.get(o, 0) - c
        for o, c in self.products:
            net[o] = net.get(o, 0) + c
        object.__setattr__(
            self, "delta", tuple(sorted((o, d) for o, d in net.items() if d))
        )

    @classmethod
    def make(
        cls,
        alphabet: Alphabet,
        reactants: Mapping[str, int] | Iterable[str],
        products: Mapping[str, int] | Iterable[str] = (),
    ) -> "Rule":
        return cls(
            alphabet,
            _sparse(alphabet, reactants),
            _sparse(alphabet, products),
        )

    @property
    def text(self) -> str:
        return format_rule(self)

    def __str__(self) -> str:  # pragma: no cover
        return self.text


def _sparse(alphabet: Alphabet, spec) -> tuple[tuple[int, int], ...]:
    acc: dict[int, int] = {}
    items = spec.items() if isinstance(spec, Mapping) else ((n, 1) for n in spec)
    for name, c in items:
        o = alphabet.ordinal(name)
        acc[o] = acc.get(o, 0) + c
    return tuple(sorted((o, c) for o, c in acc.items() if c))


# -- operations ------------------------------------------------------------------


def classify_rule(rule: Rule) -> RuleClass:
    """Size (reactant volume, product volume) and family of a rule."""
    vol_r = sum(c for _, c in rule.reactants)
    vol_p = sum(c for _, c in rule.products)
    deltas = [d for _, d in rule.delta]
    if not deltas:
        family = RuleFamily.OTHER  # no net change (pure catalysis)
    elif all(d <= 0 for d in deltas):
        family = RuleFamily.TRUE_VOID if vol_p == 0 else RuleFamily.CATALYTIC_VOID
    elif all(d >= 0 for d in deltas):
        family = RuleFamily.AUTOGENESIS
    else:
        family = RuleFamily.OTHER
    return RuleClass(size=(vol_r, vol_p), family=family)


def is_void_family(rule: Rule) -> bool:
    return classify_rule(rule).family in (RuleFamily.TRUE_VOID, RuleFamily.CATALYTIC_VOID)


def _check_alphabet(config: Configuration, rule: Rule) -> None:
    if config.alphabet != rule.alphabet:
        raise AlphabetMismatch("configuration and rule use different alphabets")


def applicable(config: Configuration, rule: Rule) -> bool:
    """True iff the configuration dominates the rule's reactants."""
    _check_alphabet(config, rule)
    return all(config.counts[o] >= c for o, c in rule.reactants)


def apply_rule(config: Configuration, rule: Rule) -> Configuration:
    """Apply the rule once, returning the successor configuration."""
    if not applicable(config, rule):
        raise ValueError(f"rule not applicable: {rule.text}")
    counts = list(config.counts)
    for o, d in rule.delta:
        counts[o] += d
    return Configuration(config.alphabet, tuple(counts))


def is_terminal(config: Configuration, rules: Iterable[Rule]) -> bool:
    """True iff no rule applies to the configuration."""
    return not any(applicable(config, r) for r in rules)


# -- rule text -----------------------------------------------------------------


def format_rule(rule: Rule) -> str:
    names = rule.alphabet.names
    lhs = " + ".join(
        part for o, c in rule.reactants for part in [names[o]] * c
    )
    if rule.products:
        rhs = " + ".join(
            part for o, c in rule.products for part in [names[o]] * c
        )
    else:
        rhs = "."
    return f"{lhs} -> {rhs}"


def parse_rule(text: str, alphabet: Alphabet) -> Rule:
    """Parse ``A + B -> .`` style rule text (coefficients like ``2 A``
    are accepted too).  The arrow is space-delimited because species
    names themselves may contain ``->``."""
    if " -> " not in text:
        raise ValueError(f"bad rule (no ' -> '): {text!r}")
    lhs, rhs = text.split(" -> ", 1)
    return Rule(
        alphabet,
        _parse_side(lhs, alphabet, empty_ok=False),
        _parse_side(rhs, alphabet, empty_ok=True),
    )


def _parse_side(side: str, alphabet: Alphabet, empty_ok: bool) -> tuple[tuple[int, int], ...]:
    side = side.strip()
    if side in (".", "", "0"):
        if not empty_ok:
            raise ValueError("rule has no reactants")
        return ()
    acc: dict[int, int] = {}
    for term in side.split("+"):
        parts = term.split()
        if len(parts) == 1:
            coeff, name = 1, parts[0]
        elif len(parts) == 2 and parts[0].isdigit():
            coeff, name = int(parts[0]), parts[1]
        else:
            raise ValueError(f"bad rule term {term.strip()!r}")
        o = alphabet.ordinal(name)
        acc[o] = acc.get(o, 0) + coeff
    return tuple(sorted(acc.items()))
