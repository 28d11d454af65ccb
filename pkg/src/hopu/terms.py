"""Term graph for suspension-calculus terms with logic variables.

Nodes are mutable Python objects. Logic variables are bound by setting
their ``binding`` slot; App and Susp nodes may be overwritten by a head
normal form through their ``ref`` slot, which turns them into indirection
cells. Every such mutation is recorded on a Trail so that backtracking can
restore the exact prior graph.
"""

from __future__ import annotations

import itertools


class KernelError(Exception):
    """Internal invariant violation in the term kernel."""


class Term:
    __slots__ = ()


class Const(Term):
    """A constant. ``name`` is its identity; eigen-constants get unique names."""

    __slots__ = ("name", "universe", "annots", "display")

    def __init__(self, name, universe=0, annots=(), display=None):
        self.name = name
        self.universe = universe
        self.annots = annots
        self.display = display if display is not None else name

    def __repr__(self):
        return f"Const({self.name!r})"


_var_ids = itertools.count(1)


class LogicVar(Term):
    __slots__ = ("binding", "universe", "id", "name")

    def __init__(self, universe=0, name=None):
        self.binding = None
        self.universe = universe
        self.id = next(_var_ids)
        self.name = name

    def __repr__(self):
        return f"LogicVar({self.name or self.id}@{self.universe})"


class DeBruijn(Term):
    __slots__ = ("index",)

    def __init__(self, index):
        if index < 1:
            raise KernelError(f"de Bruijn index must be positive, got {index}")
        self.index = index

    def __repr__(self):
        return f"#{self.index}"


class App(Term):
    __slots__ = ("head", "args", "ref")

    def __init__(self, head, args):
        if not args:
            raise KernelError("application needs at least one argument")
        if type(head) is App and head.ref is None:
            # flatten (h a) b into h a b
            args = head.args + tuple(args)
            head = head.head
        self.head = head
        self.args = tuple(args)
        self.ref = None

    def __repr__(self):
        return f"App({self.head!r}, {list(self.args)!r})"


class Abs(Term):
    __slots__ = ("n", "body")

    def __init__(self, n, body):
        if n < 1:
            raise KernelError("abstraction needs a positive binder count")
        if type(body) is Abs:
            n += body.n
            body = body.body
        self.n = n
        self.body = body

    def __repr__(self):
        return f"Abs({self.n}, {self.body!r})"


class Susp(Term):
    """The suspension [[body, ol, nl, env]]; env[0] is the entry for index 1."""

    __slots__ = ("body", "ol", "nl", "env", "ref")

    def __init__(self, body, ol, nl, env):
        self.body = body
        self.ol = ol
        self.nl = nl
        self.env = env
        self.ref = None

    def __repr__(self):
        return f"Susp({self.body!r}, {self.ol}, {self.nl}, {list(self.env)!r})"


class Dum:
    __slots__ = ("l",)

    def __init__(self, l):
        self.l = l

    def __eq__(self, other):
        return type(other) is Dum and other.l == self.l

    def __hash__(self):
        return hash(("dum", self.l))

    def __repr__(self):
        return f"@{self.l}"


class Bndg:
    __slots__ = ("term", "l")

    def __init__(self, term, l):
        self.term = term
        self.l = l

    def __repr__(self):
        return f"({self.term!r}, {self.l})"


class Trail:
    """Undo log of (cell, slot, previous value) entries."""

    def __init__(self):
        self.entries = []

    def mark(self):
        return len(self.entries)

    def record(self, obj, slot, old):
        self.entries.append((obj, slot, old))

    def undo_to(self, mark):
        entries = self.entries
        if mark > len(entries):
            raise ValueError(f"trail mark {mark} beyond height {len(entries)}")
        while len(entries) > mark:
            obj, slot, old = entries.pop()
            setattr(obj, slot, old)

    def __len__(self):
        return len(self.entries)


def deref(t):
    """Follow bound variables and forwarded nodes to the first live node."""
    seen = 0
    while True:
        k = type(t)
        if k is LogicVar:
            if t.binding is None:
                return t
            t = t.binding
        elif (k is App or k is Susp) and t.ref is not None:
            t = t.ref
        else:
            return t
        seen += 1
        if seen > 1_000_000:
            raise KernelError("cyclic indirection chain")


def bind(x, t, trail):
    if x.binding is not None:
        raise KernelError(f"variable {x!r} is already bound")
    trail.record(x, "binding", None)
    x.binding = t


def assign(node, value, trail):
    """Overwrite an App or Susp node with (a reference to) its reduct."""
    if node is value:
        return
    trail.record(node, "ref", node.ref)
    node.ref = value


def undo_to(mark, trail):
    trail.undo_to(mark)


def mk_app(head, args):
    return App(head, args) if args else head


def mk_abs(n, body):
    return Abs(n, body) if n > 0 else body


def is_trivial(ol, nl):
    return ol == 0 and nl == 0


# -- debug helpers ---------------------------------------------------------


def snapshot(roots, limit=200_000):
    """Structural record of every node reachable from roots, keyed by identity.

    Used to check that backtracking restores the graph exactly.
    """
    out = {}
    stack = list(roots)
    while stack:
        t = stack.pop()
        if id(t) in out:
            continue
        k = type(t)
        if k is Const:
            out[id(t)] = ("c", t.name, t.universe, tuple(map(id, t.annots)))
        elif k is LogicVar:
            out[id(t)] = ("v", id(t.binding), t.universe)
            if t.binding is not None:
                stack.append(t.binding)
        elif k is DeBruijn:
            out[id(t)] = ("i", t.index)
        elif k is App:
            out[id(t)] = ("app", id(t.head), tuple(map(id, t.args)), id(t.ref))
            stack.append(t.head)
            stack.extend(t.args)
            if t.ref is not None:
                stack.append(t.ref)
        elif k is Abs:
            out[id(t)] = ("abs", t.n, id(t.body))
            stack.append(t.body)
        elif k is Susp:
            env = tuple(
                ("d", e.l) if type(e) is Dum else ("b", id(e.term), e.l) for e in t.env
            )
            out[id(t)] = ("susp", id(t.body), t.ol, t.nl, env, id(t.ref))
            stack.append(t.body)
            for e in t.env:
                if type(e) is Bndg:
                    stack.append(e.term)
            if t.ref is not None:
                stack.append(t.ref)
        else:
            out[id(t)] = ("?", repr(t))
        if len(out) > limit:
            raise KernelError("term graph too large or cyclic")
    return out


def check_wellformed(t, limit=200_000):
    """Validate suspension invariants and acyclicity below t; returns True."""
    visiting = set()
    done = set()

    def walk(u, depth):
        if depth > limit:
            raise KernelError("term graph too deep")
        if id(u) in done:
            return
        if id(u) in visiting:
            raise KernelError("cycle in term graph")
        visiting.add(id(u))
        k = type(u)
        if k is LogicVar and u.binding is not None:
            walk(u.binding, depth + 1)
        elif k is App:
            if type(u.head) is App and u.head.ref is None:
                raise KernelError("unflattened application")
            walk(u.head, depth + 1)
            for a in u.args:
                walk(a, depth + 1)
            if u.ref is not None:
                walk(u.ref, depth + 1)
        elif k is Abs:
            if type(u.body) is Abs:
                raise KernelError("unconsolidated abstraction")
            walk(u.body, depth + 1)
        elif k is Susp:
            if len(u.env) != u.ol:
                raise KernelError("suspension environment length differs from ol")
            for e in u.env:
                if type(e) is Dum:
                    if not e.l < u.nl:
                        raise KernelError("dummy level not below nl")
                else:
                    if not e.l <= u.nl:
                        raise KernelError("binding level above nl")
                    walk(e.term, depth + 1)
            walk(u.body, depth + 1)
            if u.ref is not None:
                walk(u.ref, depth + 1)
        visiting.discard(id(u))
        done.add(id(u))

    walk(t, 0)
    return True
