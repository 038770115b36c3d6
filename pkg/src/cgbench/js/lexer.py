"""Tokenizer for the supported ECMAScript 5 subset."""

from __future__ import annotations

import re

from ..errors import JSParseError, UnsupportedConstruct

_TOKEN = re.compile(
    r"""
    (?P<ws>[ \t\f\v\u00a0\ufeff]+)
  | (?P<nl>\r\n|[\n\r\u2028\u2029])
  | (?P<lc>//[^\n\r\u2028\u2029]*)
  | (?P<bc>/\*(?:[^*]|\*(?!/))*\*/)
  | (?P<name>[A-Za-z_$\u0080-\uffff][\w$\u0080-\uffff]*)
  | (?P<num>0[xX][0-9a-fA-F]+|(?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)
  | (?P<str>"(?:[^"\\\n\r]|\\(?:\r\n|[\s\S]))*"|'(?:[^'\\\n\r]|\\(?:\r\n|[\s\S]))*')
  | (?P<punct>>>>=|===|!==|<<=|>>=|>>>|\*\*=|\.\.\.|=>|&&|\|\||\+\+|--|==|!=|<=|>=|\+=|-=|\*=|/=|%=|&=|\|=|\^=|<<|>>|\*\*|[{}()\[\];,<>+\-*/%&|^!~?:=.])
    """,
    re.VERBOSE,
)

_REGEX = re.compile(r"/(?![*/])(?:[^/\\\[\n\r\u2028\u2029]|\\.|\[(?:[^\]\\\n\r]|\\.)*\])*/[\w$]*")
_NEWLINES = re.compile(r"\r\n|[\n\r\u2028\u2029]")

KEYWORDS = frozenset("""
break case catch continue debugger default delete do else finally for function if in
instanceof new return switch this throw try typeof var void while with
null true false
""".split())

# Tokens after which a slash starts a regular expression literal.
_EXPR_END_NAMES = frozenset({"this", "null", "true", "false"})
_EXPR_END_PUNCT = frozenset({")", "]"})


class Token:
    __slots__ = ("kind", "value", "line", "col", "end_line", "end_col", "nl")

    def __init__(self, kind, value, line, col, end_line, end_col, nl):
        self.kind = kind
        self.value = value
        self.line = line
        self.col = col
        self.end_line = end_line
        self.end_col = end_col
        self.nl = nl

    def __repr__(self) -> str:
        return f"Token({self.kind}, {self.value!r}, {self.line}:{self.col})"


def _regex_allowed(prev: Token | None) -> bool:
    if prev is None:
        return True
    if prev.kind == "punct":
        return prev.value not in _EXPR_END_PUNCT
    if prev.kind == "name":
        return prev.value in KEYWORDS and prev.value not in _EXPR_END_NAMES
    return False


def tokenize(source: str, path: str = "<input>") -> list[Token]:
    """Split ``source`` into tokens with 1-based line/column positions.

    The last token is always ``eof``. ``Token.nl`` records whether a line
    terminator preceded the token, which the parser needs for semicolon
    insertion and restricted productions.
    """
    tokens: list[Token] = []
    append = tokens.append
    match = _TOKEN.match
    pos = 0
    n = len(source)
    line = 1
    line_start = 0
    nl = False
    prev: Token | None = None
    while pos < n:
        ch = source[pos]
        if ch == "/" and _regex_allowed(prev) and not source.startswith(("//", "/*"), pos):
            m = _REGEX.match(source, pos)
            if m is None:
                raise JSParseError("unterminated regular expression", path, line, pos - line_start + 1)
            end = m.end()
            col = pos - line_start + 1
            prev = Token("regex", m.group(), line, col, line, col + end - pos, nl)
            append(prev)
            nl = False
            pos = end
            continue
        m = match(source, pos)
        if m is None:
            col = pos - line_start + 1
            if ch == "`":
                raise UnsupportedConstruct("template literal", path, line, col)
            if ch in "\"'":
                raise JSParseError("unterminated string literal", path, line, col)
            raise JSParseError(f"unexpected character {ch!r}", path, line, col)
        kind = m.lastgroup
        end = m.end()
        if kind == "punct" and source.startswith("/*", pos):
            raise JSParseError("unterminated comment", path, line, pos - line_start + 1)
        if kind == "ws" or kind == "lc":
            pos = end
            continue
        if kind == "nl":
            line += 1
            line_start = end
            nl = True
            pos = end
            continue
        text = m.group()
        if kind == "bc":
            breaks = list(_NEWLINES.finditer(text))
            if breaks:
                line += len(breaks)
                line_start = pos + breaks[-1].end()
                nl = True
            pos = end
            continue
        col = pos - line_start + 1
        if kind == "str":
            breaks = list(_NEWLINES.finditer(text))
            if breaks:
                start_line = line
                line += len(breaks)
                line_start = pos + breaks[-1].end()
                prev = Token("str", text, start_line, col, line, end - line_start + 1, nl)
                append(prev)
                nl = False
                pos = end
                continue
        prev = Token(kind, text, line, col, line, col + end - pos, nl)
        append(prev)
        nl = False
        pos = end
    col = pos - line_start + 1
    append(Token("eof", "", line, col, line, col, True))
    return tokens


_SIMPLE_ESCAPES = {"n": "\n", "t": "\t", "r": "\r", "b": "\b", "f": "\f", "v": "\v", "0": "\0"}
_ESCAPE = re.compile(r"\\(u[0-9a-fA-F]{4}|x[0-9a-fA-F]{2}|\r\n|[\s\S])")


def _unescape(m: re.Match) -> str:
    esc = m.group(1)
    if esc[0] in "ux" and len(esc) > 1:
        return chr(int(esc[1:], 16))
    if esc in ("\r\n", "\n", "\r", "\u2028", "\u2029"):
        return ""
    return _SIMPLE_ESCAPES.get(esc, esc)


def decode_string(raw: str) -> str:
    """Value of a quoted string literal token."""
    body = raw[1:-1]
    if "\\" not in body:
        return body
    return _ESCAPE.sub(_unescape, body)


def decode_number(raw: str) -> int | float:
    if raw[:2] in ("0x", "0X"):
        return int(raw, 16)
    value = float(raw)
    if value.is_integer() and "e" not in raw.lower() and "." not in raw:
        return int(raw)
    return value
