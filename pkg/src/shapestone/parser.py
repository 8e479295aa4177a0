"""Surface syntax for paths, shapes, and schema documents.

Grammar (whitespace separates tokens, ``#`` starts a line comment)::

    path      := concat ('|' concat)*
    concat    := postfix ('/' postfix)*
    postfix   := atom ('*' | '?')*
    atom      := 'id' | NAME | '^' NAME | '(' path ')'

    shape     := 'top' | 'const' '(' NAME ')' | 'not' '(' shape ')'
               | 'and' '(' shape (',' shape)* ')'
               | 'or' '(' shape (',' shape)* ')'
               | 'ge' '(' INT ',' path ',' shape ')'
               | 'exists' '(' path ',' shape ')'          # ge(1, E, s)
               | 'le' '(' INT ',' path ',' shape ')'      # not(ge(n+1, E, s))
               | 'forall' '(' path ',' shape ')'          # not(exists(E, not(s)))
               | 'eq' '(' path ',' path ')'
               | 'disj' '(' path ',' path ')'
               | 'closed' '(' [NAME (',' NAME)*] ')'
               | NAME                                     # shape-name reference

    schema    := (NAME '<-' shape ';' | shape '<=' shape ';')*

``E?`` is zero-or-one and desugars to ``E|id``; all shape sugar expands at
parse time, so parsing the printed form of an AST reproduces the AST
exactly.  Bare names in shape position always denote shape names; constants
must be written ``const(...)``, keeping the token spaces unambiguous.
Counting bounds above 2**31-1 are rejected, as are ``ge(0, ...)`` and ``^``
applied to anything but a property name.
"""

from __future__ import annotations

from dataclasses import dataclass

from .errors import ParseError
from .model import RESERVED_CHARS
from .syntax import (
    MAX_COUNT,
    And,
    Closed,
    Comp,
    Const,
    Disj,
    Eq,
    Ge,
    Id,
    Inclusion,
    Inv,
    Not,
    Or,
    PathExpr,
    Prop,
    Ref,
    Rule,
    SchemaDoc,
    ShapeExpr,
    Star,
    Top,
    Union,
)

_PUNCT = {"(", ")", ",", "|", "/", "*", "^", "?", ";"}

#: Words with fixed meaning; they cannot name properties, constants, or shapes
#: in the surface syntax.
KEYWORDS = frozenset(
    {"id", "top", "const", "not", "and", "or", "ge", "exists", "le", "forall",
     "eq", "disj", "closed"}
)


@dataclass(frozen=True)
class _Token:
    kind: str  # 'name', 'punct', or 'end'
    text: str
    line: int
    column: int


def _tokenize(text: str) -> list[_Token]:
    tokens: list[_Token] = []
    line, col = 1, 1
    i = 0
    n = len(text)
    while i < n:
        ch = text[i]
        if ch == "\n":
            line += 1
            col = 1
            i += 1
            continue
        if ch.isspace():
            i += 1
            col += 1
            continue
        if ch == "#":
            while i < n and text[i] != "\n":
                i += 1
            continue
        if ch in _PUNCT:
            tokens.append(_Token("punct", ch, line, col))
            i += 1
            col += 1
            continue
        if ch == "<":
            nxt = text[i + 1] if i + 1 < n else ""
            if nxt in ("-", "="):
                tokens.append(_Token("punct", "<" + nxt, line, col))
                i += 2
                col += 2
                continue
            raise ParseError(f"unexpected character {ch!r}", line, col)
        if ch in RESERVED_CHARS:
            raise ParseError(f"unexpected character {ch!r}", line, col)
        start = i
        start_col = col
        while i < n and not text[i].isspace() and text[i] not in RESERVED_CHARS:
            i += 1
            col += 1
        tokens.append(_Token("name", text[start:i], line, start_col))
    tokens.append(_Token("end", "", line, col))
    return tokens


class _Parser:
    def __init__(self, text: str):
        self.tokens = _tokenize(text)
        self.pos = 0

    # -- token helpers ------------------------------------------------------

    @property
    def cur(self) -> _Token:
        return self.tokens[self.pos]

    def advance(self) -> _Token:
        tok = self.cur
        self.pos += 1
        return tok

    def expect(self, text: str) -> _Token:
        tok = self.cur
        if tok.kind == "end" or tok.text != text:
            raise ParseError(
                f"expected {text!r}, found {tok.text or 'end of input'!r}",
                tok.line,
                tok.column,
            )
        return self.advance()

    def expect_name(self, what: str = "name") -> _Token:
        tok = self.cur
        if tok.kind != "name":
            raise ParseError(
                f"expected {what}, found {tok.text or 'end of input'!r}",
                tok.line,
                tok.column,
            )
        if tok.text in KEYWORDS:
            raise ParseError(f"reserved word {tok.text!r} cannot be a {what}", tok.line, tok.column)
        return self.advance()

    def fail(self, message: str) -> ParseError:
        tok = self.cur
        return ParseError(message, tok.line, tok.column)

    # -- paths --------------------------------------------------------------

    def path(self) -> PathExpr:
        expr = self.concat()
        while self.cur.text == "|":
            self.advance()
            expr = Union(expr, self.concat())
        return expr

    def concat(self) -> PathExpr:
        expr = self.postfix()
        while self.cur.text == "/":
            self.advance()
            expr = Comp(expr, self.postfix())
        return expr

    def postfix(self) -> PathExpr:
        expr = self.path_atom()
        while self.cur.text in ("*", "?"):
            op = self.advance().text
            expr = Star(expr) if op == "*" else Union(expr, Id())
        return expr

    def path_atom(self) -> PathExpr:
        tok = self.cur
        if tok.text == "(":
            self.advance()
            expr = self.path()
            self.expect(")")
            return expr
        if tok.text == "^":
            self.advance()
            if self.cur.text == "(":
                raise self.fail("inverse applies only to property names")
            name = self.expect_name("property name")
            return Inv(name.text)
        if tok.kind == "name":
            if tok.text == "id":
                self.advance()
                return Id()
            if tok.text in KEYWORDS:
                raise self.fail(f"reserved word {tok.text!r} cannot be a property name")
            self.advance()
            return Prop(tok.text)
        raise self.fail(f"expected a path expression, found {tok.text or 'end of input'!r}")

    # -- shapes -------------------------------------------------------------

    def count(self) -> int:
        tok = self.cur
        if tok.kind != "name" or not tok.text.isdigit():
            raise self.fail(f"expected a count, found {tok.text or 'end of input'!r}")
        value = int(tok.text)
        if value > MAX_COUNT:
            raise ParseError(f"count {value} exceeds {MAX_COUNT}", tok.line, tok.column)
        self.advance()
        return value

    def shape(self) -> ShapeExpr:
        tok = self.cur
        if tok.kind != "name":
            raise self.fail(f"expected a shape, found {tok.text or 'end of input'!r}")
        word = tok.text
        if word == "top":
            self.advance()
            return Top()
        if word not in KEYWORDS:
            self.advance()
            return Ref(word)
        if word == "id":
            raise self.fail("'id' is a path expression, not a shape")
        self.advance()
        self.expect("(")
        shape = self._shape_call(word, tok)
        self.expect(")")
        return shape

    def _shape_call(self, word: str, tok: _Token) -> ShapeExpr:
        if word == "const":
            return Const(self.expect_name("constant").text)
        if word == "not":
            return Not(self.shape())
        if word in ("and", "or"):
            items = [self.shape()]
            while self.cur.text == ",":
                self.advance()
                items.append(self.shape())
            return And(tuple(items)) if word == "and" else Or(tuple(items))
        if word == "ge":
            n = self.count()
            if n < 1:
                raise ParseError("counts start at 1", tok.line, tok.column)
            self.expect(",")
            path = self.path()
            self.expect(",")
            return Ge(n, path, self.shape())
        if word == "exists":
            path = self.path()
            self.expect(",")
            return Ge(1, path, self.shape())
        if word == "le":
            n = self.count()
            if n + 1 > MAX_COUNT:
                raise ParseError(f"count {n} exceeds {MAX_COUNT - 1}", tok.line, tok.column)
            self.expect(",")
            path = self.path()
            self.expect(",")
            return Not(Ge(n + 1, path, self.shape()))
        if word == "forall":
            path = self.path()
            self.expect(",")
            return Not(Ge(1, path, Not(self.shape())))
        if word == "eq" or word == "disj":
            left = self.path()
            self.expect(",")
            right = self.path()
            return Eq(left, right) if word == "eq" else Disj(left, right)
        if word == "closed":
            names: list[str] = []
            if self.cur.text != ")":
                names.append(self.expect_name("property name").text)
                while self.cur.text == ",":
                    self.advance()
                    names.append(self.expect_name("property name").text)
            return Closed(frozenset(names))
        raise ParseError(f"unknown shape constructor {word!r}", tok.line, tok.column)

    # -- schema documents ----------------------------------------------------

    def schema(self) -> SchemaDoc:
        rules: list[Rule] = []
        inclusions: list[Inclusion] = []
        while self.cur.kind != "end":
            if (
                self.cur.kind == "name"
                and self.cur.text not in KEYWORDS
                and self.tokens[self.pos + 1].text == "<-"
            ):
                head = self.advance().text
                self.advance()  # '<-'
                body = self.shape()
                self.expect(";")
                rules.append(Rule(head, body))
                continue
            lhs = self.shape()
            self.expect("<=")
            rhs = self.shape()
            self.expect(";")
            inclusions.append(Inclusion(lhs, rhs))
        return SchemaDoc(tuple(rules), tuple(inclusions))

    def at_end(self) -> bool:
        return self.cur.kind == "end"


def _parse_whole(text: str, production: str):
    parser = _Parser(text)
    result = getattr(parser, production)()
    if not parser.at_end():
        tok = parser.cur
        raise ParseError(f"trailing input starting at {tok.text!r}", tok.line, tok.column)
    return result


def parse_path(text: str) -> PathExpr:
    return _parse_whole(text, "path")


def parse_shape(text: str) -> ShapeExpr:
    return _parse_whole(text, "shape")


def parse_schema(text: str) -> SchemaDoc:
    """Parse a schema document; shape-name references must be defined."""
    return _parse_whole(text, "schema")
