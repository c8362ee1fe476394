"""Recursive-descent parser for the formula concrete syntax.

Precedence, loosest to tightest: '->', '|', '&', the star family
('*', '*>', '*d', '-*', '->*'), then '!' and '[]'. Binary operators are
right-associative. Disjunction and implication parse into their classical
expansions, so the parsed tree uses core connectives only and rendering a
parsed formula is a fixed point.
"""
from ..errors import ParseError
from ..formulas import (
    And,
    Atom,
    Box,
    DirStar,
    DirWand,
    DisjStar,
    Formula,
    Implies,
    Not,
    Or,
    Star,
    Top,
    Wand,
)
from .lexer import Token, tokenize

_STAR_NODES = {"*": Star, "*>": DirStar, "*d": DisjStar, "-*": Wand, "->*": DirWand}


class _Cursor:
    def __init__(self, tokens: list[Token], pos: int):
        self.tokens = tokens
        self.pos = pos

    def peek(self) -> Token:
        return self.tokens[self.pos]

    def take(self) -> Token:
        tok = self.tokens[self.pos]
        self.pos += 1
        return tok


def _parse_implies(c: _Cursor) -> Formula:
    left = _parse_or(c)
    if c.peek().kind == "->":
        c.take()
        return Implies(left, _parse_implies(c))
    return left


def _parse_or(c: _Cursor) -> Formula:
    left = _parse_and(c)
    if c.peek().kind == "|":
        c.take()
        return Or(left, _parse_or(c))
    return left


def _parse_and(c: _Cursor) -> Formula:
    left = _parse_star(c)
    if c.peek().kind == "&":
        c.take()
        return And(left, _parse_and(c))
    return left


def _parse_star(c: _Cursor) -> Formula:
    left = _parse_unary(c)
    node = _STAR_NODES.get(c.peek().kind)
    if node is not None:
        c.take()
        return node(left, _parse_star(c))
    return left


def _parse_unary(c: _Cursor) -> Formula:
    tok = c.peek()
    if tok.kind == "!":
        c.take()
        return Not(_parse_unary(c))
    if tok.kind == "[]":
        c.take()
        return Box(_parse_unary(c))
    if tok.kind == "(":
        c.take()
        body = _parse_implies(c)
        closing = c.peek()
        if closing.kind != ")":
            raise ParseError(
                f"expected ')' but found {closing.text or 'end of input'!r}",
                closing.line,
                closing.column,
            )
        c.take()
        return body
    if tok.kind == "ident":
        c.take()
        if c.peek().kind == "::":
            c.take()
            name = c.peek()
            if name.kind != "ident":
                raise ParseError(
                    "expected a variable name after '::'", name.line, name.column
                )
            c.take()
            return Atom(tok.text, name.text)
        if tok.text == "top":
            return Top()
        raise ParseError(
            f"expected '::' after {tok.text!r} (or the keyword 'top')",
            tok.line,
            tok.column,
        )
    raise ParseError(
        f"expected a formula but found {tok.text or 'end of input'!r}",
        tok.line,
        tok.column,
    )


def parse_formula_tokens(tokens: list[Token], pos: int) -> tuple[Formula, int]:
    """Parse one formula starting at pos; returns it and the next position.

    The caller decides what may follow; anything this parser cannot extend
    the formula with is left in place.
    """
    cursor = _Cursor(tokens, pos)
    formula = _parse_implies(cursor)
    return formula, cursor.pos


def parse_formula(text: str) -> Formula:
    """Parse a standalone formula; the whole text must be one formula."""
    tokens = [t for t in tokenize(text) if t.kind != "newline"]
    formula, pos = parse_formula_tokens(tokens, 0)
    trailing = tokens[pos]
    if trailing.kind != "eof":
        raise ParseError(
            f"unexpected {trailing.text!r} after the formula",
            trailing.line,
            trailing.column,
        )
    return formula
