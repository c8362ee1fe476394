"""Tokenizer for the model text format.

Line-oriented: newlines are tokens, because declaration rows end at end of
line. Comments run from '#' to the line end. Operators are matched longest
first, so '->*' wins over '->' and '*>' over '*'. The one context-sensitive
case is '*d', which is a single token only when not followed by a name
character, letting 'x * d::p' and 'x *d y' coexist.
"""
from dataclasses import dataclass

from ..errors import ParseError

IDENT_START = frozenset(
    "abcdefghijklmnopqrstuvwxyzABCDEFGHIJKLMNOPQRSTUVWXYZ_"
)
IDENT_CONT = IDENT_START | frozenset("0123456789")
DIGITS = frozenset("0123456789")


@dataclass(frozen=True)
class Token:
    kind: str
    text: str
    line: int
    column: int


def _ident_follows(text: str, i: int) -> bool:
    return i < len(text) and (text[i] in IDENT_CONT or text[i] == ":")


def tokenize(text: str) -> list[Token]:
    tokens: list[Token] = []
    i = 0
    line = 1
    col = 1
    n = len(text)

    def push(kind: str, tok_text: str, width: int):
        nonlocal i, col
        tokens.append(Token(kind, tok_text, line, col))
        i += width
        col += width

    while i < n:
        ch = text[i]
        if ch == "\n":
            tokens.append(Token("newline", "\n", line, col))
            i += 1
            line += 1
            col = 1
            continue
        if ch in " \t\r":
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
                col += 1
            continue
        if ch == '"':
            start_line, start_col = line, col
            i += 1
            col += 1
            out = []
            while True:
                if i >= n or text[i] == "\n":
                    raise ParseError("unterminated string", start_line, start_col)
                c = text[i]
                if c == '"':
                    i += 1
                    col += 1
                    break
                if c == "\\":
                    if i + 1 >= n or text[i + 1] not in ('"', "\\"):
                        raise ParseError(
                            "bad escape; only \\\" and \\\\ are recognised",
                            line,
                            col,
                        )
                    out.append(text[i + 1])
                    i += 2
                    col += 2
                else:
                    out.append(c)
                    i += 1
                    col += 1
            tokens.append(Token("string", "".join(out), start_line, start_col))
            continue
        if ch in DIGITS:
            j = i
            while j < n and text[j] in DIGITS:
                j += 1
            if j < n and text[j] in "/." and j + 1 < n and text[j + 1] in DIGITS:
                j += 1
                while j < n and text[j] in DIGITS:
                    j += 1
            push("number", text[i:j], j - i)
            continue
        if ch in IDENT_START:
            j = i
            while j < n and text[j] in IDENT_CONT:
                j += 1
            push("ident", text[i:j], j - i)
            continue
        nxt = text[i + 1] if i + 1 < n else ""
        if ch == "-":
            if nxt == ">" and i + 2 < n and text[i + 2] == "*":
                push("->*", "->*", 3)
                continue
            if nxt == ">":
                push("->", "->", 2)
                continue
            if nxt == "*":
                push("-*", "-*", 2)
                continue
            raise ParseError("stray '-'; expected '->', '-*', or '->*'", line, col)
        if ch == "*":
            if nxt == ">":
                push("*>", "*>", 2)
                continue
            if nxt == "d" and not _ident_follows(text, i + 2):
                push("*d", "*d", 2)
                continue
            push("*", "*", 1)
            continue
        if ch == ":":
            if nxt == ":":
                push("::", "::", 2)
                continue
            push(":", ":", 1)
            continue
        if ch == "<":
            if nxt == "=":
                push("<=", "<=", 2)
                continue
            raise ParseError("stray '<'; expected '<='", line, col)
        if ch == "[":
            if nxt == "]":
                push("[]", "[]", 2)
                continue
            raise ParseError("stray '['; expected '[]'", line, col)
        if ch in "{}(),=!&|":
            push(ch, ch, 1)
            continue
        raise ParseError(f"unexpected character {ch!r}", line, col)
    tokens.append(Token("eof", "", line, col))
    return tokens
