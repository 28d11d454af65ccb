"""Display of kernel terms in normal form.

Bound variables are named x1, x2, ... by binding depth, outermost first.
Unbound logic variables use their query name when they have one and
``_1``, ``_2``, ... otherwise, numbered per answer in order of appearance.
"""

from __future__ import annotations

from .normalize import full_normalize
from .syntax import show_tree
from .terms import Abs, App, Const, DeBruijn, LogicVar, Trail, deref


class VarNames:
    """Per-answer naming of unbound logic variables."""

    def __init__(self, named=None):
        self.names = {}
        self.used = set()
        self.counter = 0
        for v, name in (named or {}).items():
            self.names[v] = name
            self.used.add(name)

    def __call__(self, v):
        name = self.names.get(v)
        if name is None:
            while True:
                self.counter += 1
                name = f"_{self.counter}"
                if name not in self.used:
                    break
            self.names[v] = name
            self.used.add(name)
        return name


def kernel_tree(t, names, binders=()):
    """Display tree of a normal kernel term (no suspensions left)."""
    t = deref(t)
    k = type(t)
    if k is Abs:
        inner = binders
        new = []
        for _ in range(t.n):
            name = f"x{len(inner) + 1}"
            inner = inner + (name,)
            new.append(name)
        d = kernel_tree(t.body, names, inner)
        for name in reversed(new):
            d = ("lam", name, d)
        return d
    if k is App:
        return ("app", kernel_tree(t.head, names, binders), [kernel_tree(a, names, binders) for a in t.args])
    if k is Const:
        return ("atom", t.display)
    if k is DeBruijn:
        if t.index > len(binders):
            return ("atom", f"#{t.index - len(binders)}")
        return ("atom", binders[-t.index])
    if k is LogicVar:
        return ("atom", names(t))
    raise TypeError(f"cannot display {t!r}")


def show_term(t, names=None, trail=None):
    """Normalize t and render it as concrete syntax."""
    if names is None:
        names = VarNames()
    nf = full_normalize(t, trail if trail is not None else Trail())
    return show_tree(kernel_tree(nf, names))


def freeze(t, mapping=None):
    """Copy a normal term, replacing unbound variables by fresh stand-ins.

    The copy no longer changes when the originals are bound later.
    """
    if mapping is None:
        mapping = {}
    t = deref(t)
    k = type(t)
    if k is Abs:
        return Abs(t.n, freeze(t.body, mapping))
    if k is App:
        return App(freeze(t.head, mapping), [freeze(a, mapping) for a in t.args])
    if k is LogicVar:
        c = mapping.get(t)
        if c is None:
            c = LogicVar(t.universe, t.name)
            mapping[t] = c
        return c
    return t
