"""Higher-order pattern unification with universe levels.

Bindings are made destructively in the term graph and recorded on the
trail. Pairs whose flexible side is outside the pattern fragment are moved
to the residual list of the unification state and re-examined later.

Atoms (arguments of a flexible term in the pattern fragment) are represented
as plain ints for de Bruijn indexes and as Const nodes for constants.
"""

from __future__ import annotations

import logging

from .normalize import eta_adjust, head_norm
from .terms import Abs, App, Const, DeBruijn, LogicVar, bind, deref
from .typeterms import unify_vectors

log = logging.getLogger("hopu.unify")


class UnifyFail(Exception):
    pass


class Defer(Exception):
    """Raised when a pair meets a flexible term outside the pattern fragment."""


class UnifyState:
    """The part of the engine state the unifier touches."""

    def __init__(self, trail, type_level="full"):
        self.trail = trail
        self.residuals = ()
        self.dirty = False
        self.type_level = type_level

    def add_residual(self, pair):
        self.trail.record(self, "residuals", self.residuals)
        self.residuals = self.residuals + (pair,)

    def take_residuals(self):
        pairs = self.residuals
        if pairs:
            self.trail.record(self, "residuals", pairs)
            self.residuals = ()
        return pairs


class UnifyOutcome:
    __slots__ = ("success", "deferred")

    def __init__(self, success, deferred=False):
        self.success = success
        self.deferred = deferred

    def __bool__(self):
        return self.success

    def __repr__(self):
        return f"UnifyOutcome({self.success}, deferred={self.deferred})"


# -- atoms ---------------------------------------------------------------


def _key(a):
    return a if type(a) is int else a.name


def pattern_atoms(x, args, trail):
    """The atom list of x applied to args, or None outside the pattern fragment."""
    out = []
    seen = set()
    for arg in args:
        v = head_norm(arg, trail)
        if v.binder_len or v.args:
            return None
        h = v.head
        if type(h) is DeBruijn:
            a = h.index
        elif type(h) is Const and h.universe > x.universe:
            a = h
        else:
            return None
        k = _key(a)
        if k in seen:
            return None
        seen.add(k)
        out.append(a)
    return out


def check_llambda(head, args, trail=None):
    if trail is None:
        from .terms import Trail

        trail = Trail()
    return pattern_atoms(head, args, trail) is not None


def select_down(zl, al):
    """Indexes pointing at each element of zl inside al, counted from the right."""
    n = len(al)
    pos = {_key(a): i for i, a in enumerate(al)}
    out = []
    for z in zl:
        i = pos.get(_key(z))
        if i is None:
            raise ValueError(f"{z!r} does not occur in the argument list")
        out.append(DeBruijn(n - i))
    return out


def raise_up(al, y):
    """Constants of al that y may depend on, in al order."""
    return [a for a in al if type(a) is Const and a.universe <= y.universe]


def _intersect(al, bl):
    keys = {_key(b) for b in bl}
    return [a for a in al if _key(a) in keys]


# -- binding construction ------------------------------------------------


def _bind(x, t, state):
    bind(x, t, state.trail)
    state.dirty = True
    if log.isEnabledFor(logging.DEBUG):
        log.debug("bind %r := %r", x, t)


def _is_identity(idx, m):
    return len(idx) == m and all(d.index == m - i for i, d in enumerate(idx))


def bnd(x, t, atoms, l, state):
    """Body of x's binding that makes x atoms... equal to t at depth l."""
    return _bnd_view(x, head_norm(t, state.trail), atoms, l, state)


def _bnd_view(x, v, atoms, l, state):
    m = v.binder_len
    l2 = l + m
    n = len(atoms)
    h = v.head
    k = type(h)
    if k is LogicVar:
        if h is x:
            raise UnifyFail("occurs check")
        body = _bnd_flex(x, h, v.args, atoms, l2, state)
        return Abs(m, body) if m else body
    if k is Const:
        if h.universe <= x.universe:
            newh = h
        else:
            newh = None
            for j, a in enumerate(atoms):
                if type(a) is Const and a.name == h.name:
                    newh = DeBruijn(n + l2 - j)
                    break
            if newh is None:
                raise UnifyFail(f"constant {h.name} escapes the scope of {x!r}")
    else:
        i = h.index
        if i <= l2:
            newh = h
        else:
            newh = None
            q = i - l2
            for j, a in enumerate(atoms):
                if type(a) is int and a == q:
                    newh = DeBruijn(n + l2 - j)
                    break
            if newh is None:
                raise UnifyFail("bound variable cannot be captured")
    if not v.args:
        body = newh
    else:
        new_args = []
        same = newh is h
        for a in v.args:
            b = _bnd_view(x, head_norm(a, state.trail), atoms, l2, state)
            same = same and b is deref(a)
            new_args.append(b)
        node = v.node
        if same and type(node) is App and node.args is v.args:
            body = node
        else:
            body = App(newh, new_args)
    return Abs(m, body) if m else body


def _bnd_flex(x, y, yargs, atoms, l, state):
    batoms = pattern_atoms(y, yargs, state.trail)
    if batoms is None:
        raise Defer()
    al = [a + l if type(a) is int else a for a in atoms]
    al.extend(range(l, 0, -1))
    p = len(batoms)
    zl = _intersect(al, batoms)
    if x.universe < y.universe:
        c = raise_up(al, y)
        w = select_down(c, al)
        u = select_down(zl, batoms)
        v = select_down(zl, al)
        hv = LogicVar(x.universe)
        _bind(y, _abs(p, _app(hv, c + u)), state)
        return _app(hv, w + v)
    c = raise_up(batoms, x)
    w = select_down(c, batoms)
    v = select_down(zl, batoms)
    u = select_down(zl, al)
    if _is_identity(w + v, p):
        hv = y
    else:
        hv = LogicVar(y.universe)
        _bind(y, _abs(p, _app(hv, w + v)), state)
    return _app(hv, c + u)


def _app(h, args):
    return App(h, args) if args else h


def _abs(n, t):
    return Abs(n, t) if n else t


def mksubst(x, v, atoms, state):
    """Bind x so that (x atoms...) equals the head normal form v."""
    if v.head is x:
        batoms = pattern_atoms(x, v.args, state.trail)
        if batoms is None:
            raise Defer()
        if len(batoms) != len(atoms) or v.binder_len:
            raise UnifyFail("argument count mismatch")
        n = len(atoms)
        keep = [
            DeBruijn(n - i)
            for i, (a, b) in enumerate(zip(atoms, batoms))
            if _key(a) == _key(b)
        ]
        hv = LogicVar(x.universe)
        _bind(x, _abs(n, _app(hv, keep)), state)
        return
    if not v.binder_len:
        node = v.node if v.args else v.head
        if _plain(x, node):
            _bind(x, _abs(len(atoms), node), state)
            return
    s = _bnd_view(x, v, atoms, 0, state)
    _bind(x, _abs(len(atoms), s), state)


def _plain(x, t):
    """True when t can be bound to x as is.

    That holds when t is built from constants, unbound variables and
    applications only, x does not occur in it, and nothing in it lives in
    a higher universe than x. Anything else takes the general path.
    """
    u = x.universe
    stack = [t]
    while stack:
        t = deref(stack.pop())
        k = type(t)
        if k is App:
            stack.extend(t.args)
            t = deref(t.head)
            k = type(t)
        if k is Const:
            if t.universe > u:
                return False
        elif k is LogicVar:
            if t is x or t.universe > u:
                return False
        else:
            return False
    return True


# -- simplification ------------------------------------------------------


def _rigid_rigid(v1, v2, work, state):
    h1, h2 = v1.head, v2.head
    if type(h1) is Const and type(h2) is Const:
        if h1.name != h2.name:
            raise UnifyFail(f"clash {h1.name} / {h2.name}")
        if h1.annots is not h2.annots and (v1.args or state.type_level == "none"):
            if not unify_vectors(h1.annots, h2.annots, state.trail):
                raise UnifyFail(f"type clash at {h1.name}")
    elif type(h1) is DeBruijn and type(h2) is DeBruijn:
        if h1.index != h2.index:
            raise UnifyFail("index clash")
    else:
        raise UnifyFail("head clash")
    if len(v1.args) != len(v2.args):
        raise UnifyFail("argument count mismatch")
    for pair in reversed(list(zip(v1.args, v2.args))):
        work.append(pair)


def _step(t1, t2, work, state):
    trail = state.trail
    v1 = head_norm(t1, trail)
    v2 = head_norm(t2, trail)
    if v1.binder_len < v2.binder_len:
        v1 = eta_adjust(v1, v2.binder_len - v1.binder_len)
    elif v2.binder_len < v1.binder_len:
        v2 = eta_adjust(v2, v1.binder_len - v2.binder_len)
    h1, h2 = v1.head, v2.head
    f1 = type(h1) is LogicVar
    f2 = type(h2) is LogicVar
    if not f1 and not f2:
        _rigid_rigid(v1, v2, work, state)
        return
    if f1 and f2 and not v1.args and not v2.args:
        if h1 is not h2:
            # keep the older or outer-scoped variable
            if (h1.universe, h1.id) < (h2.universe, h2.id):
                _bind(h2, h1, state)
            else:
                _bind(h1, h2, state)
        return
    if f1:
        atoms = pattern_atoms(h1, v1.args, trail)
        if atoms is not None:
            mksubst(h1, _body(v2), atoms, state)
            return
    if f2:
        atoms = pattern_atoms(h2, v2.args, trail)
        if atoms is not None:
            mksubst(h2, _body(v1), atoms, state)
            return
    raise Defer()


def _body(v):
    if v.binder_len == 0:
        return v
    return type(v)(0, v.head, v.args, v.source, v.node)


def unify_pairs(pairs, state):
    """Solve a list of disagreement pairs; non-pattern pairs become residuals."""
    trail = state.trail
    work = list(reversed(pairs))
    deferred = False
    while work:
        t1, t2 = work.pop()
        mark = trail.mark()
        try:
            _step(t1, t2, work, state)
        except Defer:
            trail.undo_to(mark)
            state.add_residual(_orient(t1, t2, trail))
            deferred = True
        except UnifyFail as e:
            if log.isEnabledFor(logging.DEBUG):
                log.debug("fail: %s", e)
            return UnifyOutcome(False, deferred)
    return UnifyOutcome(True, deferred)


def _orient(t1, t2, trail):
    v1 = head_norm(t1, trail)
    v2 = head_norm(t2, trail)
    if type(v1.head) is not LogicVar and type(v2.head) is LogicVar:
        return (t2, t1)
    return (t1, t2)


def unify(t1, t2, state):
    return unify_pairs([(t1, t2)], state)


def recheck_residuals(state):
    """Re-run deferred pairs until no new bindings occur."""
    while state.dirty and state.residuals:
        state.dirty = False
        out = unify_pairs(state.take_residuals(), state)
        if not out.success:
            return out
    state.dirty = False
    return UnifyOutcome(True)
