"""Domain types for preference learning over binary-attribute alternatives.

An alternative is a fixed-width bit vector over a universe of n binary
attributes.  Utility models are additive over a family of attribute subsets:
an alternative scores the sum of the weights of the member subsets it
contains.  Observed preferences are strict ordered pairs of alternatives.
"""

from __future__ import annotations

from dataclasses import dataclass
from typing import Iterable, Iterator, Mapping, Sequence

MAX_ATTRIBUTES = 24


class DimensionError(ValueError):
    """Operands were built over different attribute universes."""


class ModelError(ValueError):
    """Utility weights do not line up with the subset family."""


class PreferenceError(ValueError):
    """Rejected preference data: self-pairs, contradictions, tier conflicts, cycles."""


def _check_width(n: int) -> None:
    if not 1 <= n <= MAX_ATTRIBUTES:
        raise ValueError(f"attribute count must be in [1, {MAX_ATTRIBUTES}], got {n}")


@dataclass(frozen=True)
class AttributeUniverse:
    """The ground set of n binary attributes, with optional display names."""

    n: int
    names: tuple[str, ...] | None = None

    def __post_init__(self) -> None:
        _check_width(self.n)
        if self.names is not None:
            names = tuple(self.names)
            if len(names) != self.n:
                raise ValueError("need exactly one name per attribute")
            if len(set(names)) != self.n:
                raise ValueError("attribute names must be distinct")
            object.__setattr__(self, "names", names)

    def name(self, index: int) -> str:
        """Display name of attribute ``index`` (1-based)."""
        if not 1 <= index <= self.n:
            raise IndexError(f"attribute index {index} out of range 1..{self.n}")
        return self.names[index - 1] if self.names else f"a{index}"

    def alternatives(self) -> list[Alternative]:
        """All 2**n alternatives, ordered by bit pattern."""
        return [Alternative(bits, self.n) for bits in range(1 << self.n)]


@dataclass(frozen=True)
class Alternative:
    """A length-n bit vector; bit i set means attribute i (1-based) is present.

    The text form reads left to right: ``"0111"`` has attributes 2, 3, 4
    but not attribute 1.
    """

    bits: int
    n: int

    def __post_init__(self) -> None:
        _check_width(self.n)
        if not 0 <= self.bits < (1 << self.n):
            raise ValueError(f"bit pattern {self.bits} does not fit {self.n} attributes")

    @classmethod
    def from_string(cls, text: str) -> Alternative:
        if not text or any(c not in "01" for c in text):
            raise ValueError(f"alternative must be a nonempty string of 0/1, got {text!r}")
        bits = 0
        for i, c in enumerate(text):
            if c == "1":
                bits |= 1 << i
        return cls(bits, len(text))

    @classmethod
    def from_attrs(cls, indices: Iterable[int], n: int) -> Alternative:
        bits = 0
        for i in indices:
            if not 1 <= i <= n:
                raise ValueError(f"attribute index {i} out of range 1..{n}")
            bits |= 1 << (i - 1)
        return cls(bits, n)

    def to_string(self) -> str:
        return "".join("1" if self.bits >> i & 1 else "0" for i in range(self.n))

    def has(self, index: int) -> bool:
        """Whether attribute ``index`` (1-based) is present."""
        if not 1 <= index <= self.n:
            raise IndexError(f"attribute index {index} out of range 1..{self.n}")
        return bool(self.bits >> (index - 1) & 1)

    def attrs(self) -> tuple[int, ...]:
        """Present attribute indices, ascending, 1-based."""
        return tuple(i for i in range(1, self.n + 1) if self.bits >> (i - 1) & 1)

    def __str__(self) -> str:
        return self.to_string()


@dataclass(frozen=True)
class AttributeSubset:
    """A nonempty set of attributes out of an n-attribute universe.

    Text form joins sorted 1-based indices with ``+``, e.g. ``"1+3"``.
    """

    bits: int
    n: int

    def __post_init__(self) -> None:
        _check_width(self.n)
        if not 0 < self.bits < (1 << self.n):
            raise ValueError(f"subset must be nonempty and fit {self.n} attributes")

    @classmethod
    def from_string(cls, text: str, n: int) -> AttributeSubset:
        try:
            indices = [int(part) for part in text.split("+")]
        except ValueError:
            raise ValueError(f"subset must look like '1+3', got {text!r}") from None
        return cls.from_attrs(indices, n)

    @classmethod
    def from_attrs(cls, indices: Iterable[int], n: int) -> AttributeSubset:
        bits = 0
        for i in indices:
            if not 1 <= i <= n:
                raise ValueError(f"attribute index {i} out of range 1..{n}")
            bits |= 1 << (i - 1)
        return cls(bits, n)

    def to_string(self) -> str:
        return "+".join(str(i) for i in self.attrs())

    @property
    def size(self) -> int:
        return self.bits.bit_count()

    def attrs(self) -> tuple[int, ...]:
        return tuple(i for i in range(1, self.n + 1) if self.bits >> (i - 1) & 1)

    def __str__(self) -> str:
        return self.to_string()


def indicator(alternative: Alternative, subset: AttributeSubset) -> int:
    """1 if every attribute of ``subset`` is present in ``alternative``, else 0."""
    if alternative.n != subset.n:
        raise DimensionError(
            f"width mismatch: alternative has {alternative.n} attributes, subset has {subset.n}"
        )
    return 1 if subset.bits & ~alternative.bits == 0 else 0


@dataclass(frozen=True)
class SubsetFamily:
    """An ordered, duplicate-free family of attribute subsets.

    Construction canonicalizes: members are deduplicated and sorted by
    (cardinality, bit pattern), so equal families compare equal regardless
    of input order.  The empty family is allowed.
    """

    members: tuple[AttributeSubset, ...]

    def __post_init__(self) -> None:
        members = tuple(sorted(set(self.members), key=lambda s: (s.size, s.bits)))
        widths = {s.n for s in members}
        if len(widths) > 1:
            raise DimensionError(f"family mixes attribute widths {sorted(widths)}")
        object.__setattr__(self, "members", members)

    @classmethod
    def of(cls, members: Iterable[AttributeSubset]) -> SubsetFamily:
        return cls(tuple(members))

    @classmethod
    def singletons(cls, n: int) -> SubsetFamily:
        return cls(tuple(AttributeSubset(1 << i, n) for i in range(n)))

    @classmethod
    def from_strings(cls, texts: Iterable[str], n: int) -> SubsetFamily:
        return cls(tuple(AttributeSubset.from_string(t, n) for t in texts))

    @property
    def degree(self) -> int:
        """Largest member cardinality; 0 for the empty family."""
        return max((s.size for s in self.members), default=0)

    def with_member(self, subset: AttributeSubset) -> SubsetFamily:
        return SubsetFamily(self.members + (subset,))

    def union(self, other: SubsetFamily) -> SubsetFamily:
        return SubsetFamily(self.members + other.members)

    def issubfamily(self, other: SubsetFamily) -> bool:
        return set(self.members) <= set(other.members)

    def to_strings(self) -> list[str]:
        return [s.to_string() for s in self.members]

    def __len__(self) -> int:
        return len(self.members)

    def __iter__(self) -> Iterator[AttributeSubset]:
        return iter(self.members)

    def __contains__(self, subset: object) -> bool:
        return subset in self.members


def lex_key(theta: SubsetFamily) -> tuple[int, int]:
    """Simplicity key: (degree, member count).  Smaller is simpler."""
    return (theta.degree, len(theta))


def lex_less(theta1: SubsetFamily, theta2: SubsetFamily) -> bool:
    """Strict lexicographic comparison of (degree, member count)."""
    return lex_key(theta1) < lex_key(theta2)


@dataclass(frozen=True)
class UtilityMap:
    """One real weight per member of a subset family, in family order."""

    family: SubsetFamily
    values: tuple[float, ...]

    def __post_init__(self) -> None:
        values = tuple(float(v) for v in self.values)
        if len(values) != len(self.family):
            raise ModelError(
                f"{len(values)} weights for a family of {len(self.family)} subsets"
            )
        object.__setattr__(self, "values", values)

    @classmethod
    def from_mapping(
        cls, family: SubsetFamily, weights: Mapping[AttributeSubset, float]
    ) -> UtilityMap:
        if set(weights) != set(family.members):
            raise ModelError("weight keys must be exactly the family members")
        return cls(family, tuple(weights[s] for s in family.members))

    def value_of(self, subset: AttributeSubset) -> float:
        try:
            return self.values[self.family.members.index(subset)]
        except ValueError:
            raise ModelError(f"subset {subset} is not in the family") from None

    def items(self) -> Iterator[tuple[AttributeSubset, float]]:
        return iter(zip(self.family.members, self.values))

    def as_dict(self) -> dict[AttributeSubset, float]:
        return dict(self.items())


def evaluate(theta: SubsetFamily, u: UtilityMap, alternative: Alternative) -> float:
    """Additive utility: sum of weights of the member subsets contained in the alternative."""
    if u.family != theta:
        raise ModelError("utility map was built for a different family")
    return sum(v for s, v in u.items() if indicator(alternative, s))


@dataclass(frozen=True)
class PreferenceSet:
    """Strict preference pairs (first preferred to second), duplicate-free.

    Construction rejects self-pairs and direct contradictions (both (A,B)
    and (B,A) present).  Input order of first occurrence is preserved.
    """

    pairs: tuple[tuple[Alternative, Alternative], ...]

    def __post_init__(self) -> None:
        seen: set[tuple[int, int]] = set()
        kept: list[tuple[Alternative, Alternative]] = []
        widths = set()
        for a, b in self.pairs:
            widths.update((a.n, b.n))
            if len(widths) > 1:
                raise DimensionError(f"preference pairs mix widths {sorted(widths)}")
            if a.bits == b.bits:
                raise PreferenceError(f"self-preference {a} > {b}")
            key = (a.bits, b.bits)
            if (b.bits, a.bits) in seen:
                raise PreferenceError(f"direct contradiction: both {a} > {b} and {b} > {a}")
            if key not in seen:
                seen.add(key)
                kept.append((a, b))
        object.__setattr__(self, "pairs", tuple(kept))

    @classmethod
    def of(cls, pairs: Iterable[tuple[Alternative, Alternative]]) -> PreferenceSet:
        return cls(tuple(pairs))

    @classmethod
    def from_strings(cls, lines: Iterable[str]) -> PreferenceSet:
        """Parse lines of the form ``"0111>0011"`` (first preferred to second)."""
        pairs = []
        for line in lines:
            text = line.strip()
            if not text:
                continue
            left, sep, right = text.partition(">")
            if not sep:
                raise PreferenceError(f"expected 'A>B', got {line!r}")
            pairs.append((Alternative.from_string(left.strip()),
                          Alternative.from_string(right.strip())))
        return cls(tuple(pairs))

    def to_strings(self) -> list[str]:
        return [f"{a}>{b}" for a, b in self.pairs]

    @property
    def n(self) -> int | None:
        """Attribute width, or None for the empty set."""
        return self.pairs[0][0].n if self.pairs else None

    def alternatives(self) -> tuple[Alternative, ...]:
        seen: dict[int, Alternative] = {}
        for a, b in self.pairs:
            seen.setdefault(a.bits, a)
            seen.setdefault(b.bits, b)
        return tuple(seen.values())

    def __len__(self) -> int:
        return len(self.pairs)

    def __iter__(self) -> Iterator[tuple[Alternative, Alternative]]:
        return iter(self.pairs)

    def __contains__(self, pair: object) -> bool:
        return pair in self.pairs


def preferences_from_tiers(
    assignments: Sequence[tuple[Alternative, int]]
) -> PreferenceSet:
    """All ordered pairs (A, B) with A assigned a strictly higher tier than B.

    Equal tiers contribute nothing.  Assigning one alternative to two
    different tiers is an error; exact duplicates collapse.
    """
    tiers: dict[int, int] = {}
    order: list[Alternative] = []
    for alt, tier in assignments:
        if tier < 1:
            raise PreferenceError(f"tier indices are positive, got {tier}")
        if alt.bits in tiers:
            if tiers[alt.bits] != tier:
                raise PreferenceError(
                    f"{alt} assigned to both tier {tiers[alt.bits]} and tier {tier}"
                )
            continue
        tiers[alt.bits] = tier
        order.append(alt)
    pairs = [
        (a, b)
        for a in order
        for b in order
        if tiers[a.bits] > tiers[b.bits]
    ]
    return PreferenceSet.of(pairs)


def _successors(prefs: PreferenceSet) -> tuple[list[int], dict[int, list[int]]]:
    nodes: list[int] = []
    succ: dict[int, list[int]] = {}
    for a, b in prefs:
        for x in (a.bits, b.bits):
            if x not in succ:
                succ[x] = []
                nodes.append(x)
        succ[a.bits].append(b.bits)
    return nodes, succ

def _reachability(prefs: PreferenceSet) -> dict[int, set[int]]:
    """Strictly-below sets per node; raises PreferenceError on a preference cycle."""
    nodes, succ = _successors(prefs)
    reach: dict[int, set[int]] = {}
    state: dict[int, int] = {}  # 0 unvisited / 1 on stack / 2 done

    def visit(x: int) -> set[int]:
        if state.get(x) == 2:
            return reach[x]
        if state.get(x) == 1:
            raise PreferenceError("preference cycle: no utility model can represent these pairs")
        state[x] = 1
        below: set[int] = set()
        for y in succ[x]:
            below.add(y)
            below |= visit(y)
        if x in below:
            raise PreferenceError("preference cycle: no utility model can represent these pairs")
        state[x] = 2
        reach[x] = below
        return below

    for x in nodes:
        visit(x)
    return reach


def transitive_closure(prefs: PreferenceSet) -> PreferenceSet:
    """Every strict comparison implied by chaining the given pairs."""
    if not len(prefs):
        return prefs
    reach = _reachability(prefs)
    n = prefs.n
    assert n is not None
    by_bits = {alt.bits: alt for alt in prefs.alternatives()}
    pairs = [
        (by_bits[x], by_bits[y])
        for x in by_bits
        for y in sorted(reach[x])
    ]
    return PreferenceSet.of(pairs)


def transitive_reduction(prefs: PreferenceSet) -> PreferenceSet:
    """Drop pairs already implied by chaining the others.

    The remaining pairs pin down the same strict order, so any additive
    model fitted against either set accepts exactly the same utilities.
    """
    if not len(prefs):
        return prefs
    reach = _reachability(prefs)
    _, succ = _successors(prefs)
    kept = []
    for a, b in prefs:
        implied = any(
            w != b.bits and b.bits in reach[w] for w in succ[a.bits]
        )
        if not implied:
            kept.append((a, b))
    return PreferenceSet.of(kept)
