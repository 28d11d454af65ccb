"""Lexer and precedence-climbing parser for the lambda Prolog subset.

Operator scope, loosest first: ``:-``, ``=>``, ``;``, ``,``, ``=``, ``::``,
then application. ``=>``, ``;``, ``,`` and ``::`` associate to the right.
A lambda ``x\\ body`` extends as far to the right as its context allows.
"""

from __future__ import annotations

import re

from .errors import ParseError
from .syntax import (
    CONS,
    INFIX,
    NIL,
    PI,
    RIGHT_ASSOC,
    SIGMA,
    PApp,
    PBound,
    PConst,
    PInt,
    PLam,
    PStr,
    PVar,
    mk,
)
from .typeterms import TCon, TVar

_TOKEN = re.compile(
    r"""
    (?P<ws>\s+)
  | (?P<comment>%[^\n]*)
  | (?P<bcomment>/\*.*?\*/)
  | (?P<str>"(?:[^"\\\n]|\\.)*")
  | (?P<int>\d+)
  | (?P<op>:-|=>|->|::|\?-|[,;\\.()\[\]|=])
  | (?P<name>[A-Za-z_][A-Za-z0-9_']*|\$[A-Za-z0-9_]+)
    """,
    re.VERBOSE | re.DOTALL,
)

_KEYWORDS = {"kind", "type"}
_BINDERS = {"Pi": PI, "pi": PI, "Sigma": SIGMA, "sigma": SIGMA}


class Token:
    __slots__ = ("kind", "text", "line", "col")

    def __init__(self, kind, text, line, col):
        self.kind = kind
        self.text = text
        self.line = line
        self.col = col

    def __repr__(self):
        return f"Token({self.kind}, {self.text!r}, {self.line}:{self.col})"


def tokenize(text, source=None):
    out = []
    pos = 0
    line, line_start = 1, 0
    n = len(text)
    while pos < n:
        m = _TOKEN.match(text, pos)
        if m is None:
            raise ParseError(f"unexpected character {text[pos]!r}", line, pos - line_start + 1, source)
        kind = m.lastgroup
        s = m.group()
        col = pos - line_start + 1
        if kind == "name":
            if s in _BINDERS:
                out.append(Token("id", _BINDERS[s], line, col))
            elif s in _KEYWORDS:
                out.append(Token("kw", s, line, col))
            elif s[0].isupper() or s[0] == "_":
                out.append(Token("var", s, line, col))
            else:
                out.append(Token("id", s, line, col))
        elif kind in ("int", "op"):
            out.append(Token(kind, s, line, col))
        elif kind == "str":
            out.append(Token("str", _unescape(s[1:-1]), line, col))
        nl = s.count("\n")
        if nl:
            line += nl
            line_start = pos + s.rfind("\n") + 1
        pos = m.end()
    out.append(Token("eof", "", line, pos - line_start + 1))
    return out


def _unescape(s):
    return re.sub(r"\\(.)", lambda m: {"n": "\n", "t": "\t"}.get(m.group(1), m.group(1)), s)


class Statement:
    """One top-level item: a declaration or a clause/query term."""

    def __init__(self, kind, data, pos):
        self.kind = kind  # "kind", "type", "clause"
        self.data = data
        self.pos = pos

    def __repr__(self):
        return f"Statement({self.kind}, {self.data!r})"


class Parser:
    def __init__(self, text, source=None):
        self.toks = tokenize(text, source)
        self.i = 0
        self.source = source
        self.anon = 0

    # -- token helpers
    def peek(self, k=0):
        return self.toks[min(self.i + k, len(self.toks) - 1)]

    def next(self):
        t = self.toks[self.i]
        self.i += 1
        return t

    def error(self, msg, tok=None):
        tok = tok or self.peek()
        what = tok.text if tok.kind != "eof" else "end of input"
        raise ParseError(f"{msg} (found {what!r})", tok.line, tok.col, self.source)

    def expect(self, kind, text=None):
        t = self.peek()
        if t.kind != kind or (text is not None and t.text != text):
            self.error(f"expected {text or kind}")
        return self.next()

    def at(self, kind, text=None):
        t = self.peek()
        return t.kind == kind and (text is None or t.text == text)

    # -- statements
    def statements(self):
        out = []
        while not self.at("eof"):
            out.append(self.statement())
        return out

    def statement(self):
        t = self.peek()
        pos = (t.line, t.col)
        if t.kind == "kw" and t.text == "kind":
            self.next()
            names = self.name_list()
            k = self.kind_expr()
            self.expect("op", ".")
            return Statement("kind", (names, k), pos)
        if t.kind == "kw" and t.text == "type":
            self.next()
            names = self.name_list()
            ty = self.type_expr({})
            self.expect("op", ".")
            return Statement("type", (names, ty), pos)
        term = self.term(0, ())
        self.expect("op", ".")
        return Statement("clause", term, pos)

    def query(self):
        if self.at("op", "?-"):
            self.next()
        term = self.term(0, ())
        if self.at("op", "."):
            self.next()
        if not self.at("eof"):
            self.error("unexpected text after query")
        return term

    def name_list(self):
        names = [self.const_name()]
        while self.at("op", ","):
            self.next()
            names.append(self.const_name())
        return names

    def const_name(self):
        t = self.peek()
        if t.kind == "id":
            return self.next().text
        if t.kind == "op" and t.text in INFIX:
            return self.next().text
        self.error("expected a constant name")

    def kind_expr(self):
        arity = 0
        self.expect_type_word()
        while self.at("op", "->"):
            self.next()
            self.expect_type_word()
            arity += 1
        return arity

    def expect_type_word(self):
        t = self.peek()
        if t.kind == "kw" and t.text == "type":
            return self.next()
        self.error("expected 'type' in kind declaration")

    # -- types
    def type_expr(self, tvars):
        left = self.type_app(tvars)
        if self.at("op", "->"):
            self.next()
            right = self.type_expr(tvars)
            return TCon("->", (left, right))
        return left

    def type_app(self, tvars):
        t = self.peek()
        if t.kind == "id":
            self.next()
            args = []
            while self.peek().kind in ("id", "var") or self.at("op", "("):
                args.append(self.type_atom(tvars))
            return TCon(t.text, args)
        return self.type_atom(tvars)

    def type_atom(self, tvars):
        t = self.peek()
        if t.kind == "var":
            self.next()
            if t.text not in tvars:
                tvars[t.text] = TVar(t.text)
            return tvars[t.text]
        if t.kind == "id":
            self.next()
            return TCon(t.text, ())
        if self.at("op", "("):
            self.next()
            ty = self.type_expr(tvars)
            self.expect("op", ")")
            return ty
        self.error("expected a type")

    # -- terms
    def term(self, min_prec, bound):
        left = self.app(min_prec, bound)
        while True:
            t = self.peek()
            if t.kind != "op" or t.text not in INFIX:
                return left
            op = t.text
            p = INFIX[op]
            if p < min_prec:
                return left
            self.next()
            rmin = p if op in RIGHT_ASSOC else p + 1
            right = self.term(rmin, bound)
            left = mk(op, left, right, pos=(t.line, t.col))
            if op not in RIGHT_ASSOC and self.at("op", op):
                self.error(f"operator {op} is not associative")

    def starts_primary(self):
        t = self.peek()
        if t.kind in ("id", "var", "int", "str"):
            return True
        return t.kind == "op" and t.text in ("(", "[")

    def starts_bare_lambda(self):
        t = self.peek()
        return t.kind in ("id", "var") and self.peek(1).kind == "op" and self.peek(1).text == "\\"

    def app(self, min_prec, bound):
        # a bare lambda extends to the right, so nothing can follow it
        bare = self.starts_bare_lambda()
        head = self.primary(min_prec, bound)
        args = []
        while not bare and self.starts_primary():
            bare = self.starts_bare_lambda()
            args.append(self.primary(min_prec, bound))
        if args:
            if isinstance(head, (PInt, PStr)):
                self.error("literal cannot be applied")
            return PApp(head, args, head.pos)
        return head

    def primary(self, min_prec, bound):
        t = self.peek()
        pos = (t.line, t.col)
        if self.starts_bare_lambda():
            self.next()
            self.next()
            if t.text == "_":
                self.error("anonymous variable cannot be bound", t)
            body = self.term(min_prec, bound + (t.text,))
            return PLam(t.text, body, pos)
        if t.kind == "id":
            self.next()
            if t.text in bound:
                return PBound(t.text, pos)
            return PConst(t.text, pos)
        if t.kind == "var":
            self.next()
            if t.text in bound:
                return PBound(t.text, pos)
            if t.text == "_":
                self.anon += 1
                return PVar(f"_{self.anon}", pos)
            return PVar(t.text, pos)
        if t.kind == "int":
            self.next()
            return PInt(int(t.text), pos)
        if t.kind == "str":
            self.next()
            return PStr(t.text, pos)
        if t.kind == "op" and t.text == "(":
            self.next()
            inner = self.term(0, bound)
            self.expect("op", ")")
            return inner
        if t.kind == "op" and t.text == "[":
            self.next()
            return self.list_tail(bound, pos)
        self.error("expected a term")

    def list_tail(self, bound, pos):
        if self.at("op", "]"):
            self.next()
            return PConst(NIL, pos)
        items = [self.term(INFIX[CONS] - 1, bound)]
        while self.at("op", ","):
            self.next()
            items.append(self.term(INFIX[CONS] - 1, bound))
        tail = PConst(NIL, pos)
        if self.at("op", "|"):
            self.next()
            tail = self.term(0, bound)
        self.expect("op", "]")
        for it in reversed(items):
            tail = mk(CONS, it, tail, pos=pos)
        return tail


def parse_program(text, source=None):
    """Parse a program text into a list of statements."""
    return Parser(text, source).statements()


def parse_query(text):
    return Parser(text, "query").query()


def parse_term(text):
    p = Parser(text, "term")
    t = p.term(0, ())
    if not p.at("eof"):
        p.error("unexpected text after term")
    return t
