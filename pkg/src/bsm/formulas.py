"""Syntax of the behaviour logic.

Formulas speak about one behaviour of one system through component-scoped
propositional atoms. Beyond the Boolean connectives there is a universal
modality (Box: the body holds of every behaviour of the system) and five
structural connectives about decomposing a system into parts or extending
it with further parts. Disjunction and implication are definable, so they
are exposed as expanding constructors rather than node kinds. Truth is kept
as a primitive node: an atom-based tautology would drag a component name
into the language and wreck formulas like `phi * top`, which must hold in
parts of any shape.
"""
from __future__ import annotations

from dataclasses import dataclass
from functools import reduce
from typing import Iterable, Iterator

from .errors import ArgumentError, LanguageError


class Formula:
    """Base class of all formula nodes; nodes are immutable values."""

    def __str__(self) -> str:
        return render(self)


@dataclass(frozen=True)
class Atom(Formula):
    """Component-scoped propositional variable, written component::name."""

    component: str
    name: str

    def __post_init__(self):
        if not self.component or not self.name:
            raise ArgumentError("atoms need a component and a variable name")


@dataclass(frozen=True)
class Top(Formula):
    """Truth; satisfied by every behaviour of every system."""


@dataclass(frozen=True)
class And(Formula):
    left: Formula
    right: Formula


@dataclass(frozen=True)
class Not(Formula):
    body: Formula


@dataclass(frozen=True)
class Box(Formula):
    """Universal modality: the body holds of every behaviour."""

    body: Formula


@dataclass(frozen=True)
class Star(Formula):
    """The system splits into two parts satisfying the two sides."""

    left: Formula
    right: Formula


@dataclass(frozen=True)
class DirStar(Formula):
    """A split whose shared components form an input of the right part."""

    left: Formula
    right: Formula


@dataclass(frozen=True)
class DisjStar(Formula):
    """A split whose parts share no components at all."""

    left: Formula
    right: Formula


@dataclass(frozen=True)
class Wand(Formula):
    """Every compatible extension satisfying the left satisfies the right."""

    left: Formula
    right: Formula


@dataclass(frozen=True)
class DirWand(Formula):
    """Like Wand, over extensions the current system feeds as an input."""

    left: Formula
    right: Formula


def Or(left: Formula, right: Formula) -> Formula:
    """Disjunction, expanded to its classical definition."""
    return Not(And(Not(left), Not(right)))


def Implies(left: Formula, right: Formula) -> Formula:
    """Implication, expanded to its classical definition."""
    return Or(Not(left), right)


STRUCTURAL_NODES = (Star, DirStar, DisjStar, Wand, DirWand)
_BINARY_SYMBOLS = {
    And: "&",
    Star: "*",
    DirStar: "*>",
    DisjStar: "*d",
    Wand: "-*",
    DirWand: "->*",
}


def children(formula: Formula) -> tuple[Formula, ...]:
    if isinstance(formula, (Not, Box)):
        return (formula.body,)
    if isinstance(formula, (And,) + STRUCTURAL_NODES):
        return (formula.left, formula.right)
    if isinstance(formula, (Atom, Top)):
        return ()
    raise ArgumentError(f"not a formula node: {formula!r}")


def subformulas(formula: Formula) -> Iterator[Formula]:
    """The formula and all its descendants, outermost first."""
    stack = [formula]
    while stack:
        node = stack.pop()
        yield node
        stack.extend(reversed(children(node)))


def render(formula: Formula) -> str:
    """Concrete syntax, fully parenthesized at every binary node."""
    if isinstance(formula, Atom):
        return f"{formula.component}::{formula.name}"
    if isinstance(formula, Top):
        return "top"
    if isinstance(formula, Not):
        return "!" + render(formula.body)
    if isinstance(formula, Box):
        return "[]" + render(formula.body)
    symbol = _BINARY_SYMBOLS.get(type(formula))
    if symbol is None:
        raise ArgumentError(f"not a formula node: {formula!r}")
    return f"({render(formula.left)} {symbol} {render(formula.right)})"


def atoms(formula: Formula) -> frozenset[Atom]:
    return frozenset(n for n in subformulas(formula) if isinstance(n, Atom))


def atom_components(formula: Formula) -> frozenset[str]:
    return frozenset(a.component for a in atoms(formula))


def uses_box(formula: Formula) -> bool:
    return any(isinstance(n, Box) for n in subformulas(formula))


def uses_structural(formula: Formula) -> bool:
    return any(isinstance(n, STRUCTURAL_NODES) for n in subformulas(formula))


def in_language(formula: Formula, component_names: Iterable[str]) -> bool:
    """Do all atoms stay within the given component names?"""
    return atom_components(formula) <= set(component_names)


def is_elementary(formula: Formula) -> bool:
    """No modality and no structural connectives."""
    return not uses_box(formula) and not uses_structural(formula)


@dataclass(frozen=True)
class Polarity:
    """Where Box occurrences sit relative to negation.

    positive: every Box is under an even number of negations; negative:
    under an odd number. A Box-free formula is both at once.
    """

    positive: bool
    negative: bool


def polarity(formula: Formula) -> Polarity:
    parities: set[int] = set()

    def walk(node: Formula, parity: int) -> None:
        if isinstance(node, STRUCTURAL_NODES):
            raise LanguageError(
                "polarity is defined only for formulas without structural connectives"
            )
        if isinstance(node, Box):
            parities.add(parity)
            walk(node.body, parity)
        elif isinstance(node, Not):
            walk(node.body, parity ^ 1)
        elif isinstance(node, And):
            walk(node.left, parity)
            walk(node.right, parity)

    walk(formula, 0)
    return Polarity(
        positive=all(p == 0 for p in parities),
        negative=all(p == 1 for p in parities),
    )


def conjoin(parts: Iterable[Formula]) -> Formula:
    """Right-associated conjunction of the parts; empty becomes truth."""
    items = list(parts)
    if not items:
        return Top()
    return reduce(lambda acc, part: And(part, acc), reversed(items))
