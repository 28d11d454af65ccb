"""Head normalization with lazy substitutions.

The recursive worker ``_hnorm`` descends through a term while carrying an
implicit suspension ``(ol, nl, env)`` instead of building suspension nodes.
It returns a 4-tuple ``(term, ol, nl, env)``: either a trivial suspension
``(hnf, 0, 0, ())`` or, in weak mode only, an abstraction still under a
non-trivial implicit suspension. Arguments of the resulting head normal form
are wrapped lazily with ``mk_susp``. App and Susp nodes reached under a
trivial suspension are overwritten with their normal form, so shared
subterms are reduced once.
"""

from __future__ import annotations

import logging

from .terms import (
    Abs,
    App,
    Bndg,
    Const,
    DeBruijn,
    Dum,
    KernelError,
    LogicVar,
    Susp,
    assign,
    deref,
)

log = logging.getLogger("hopu.normalize")

TRIV = (0, 0, ())

# set by the CLI's --trace normalize; checked before logging on the hot path
TRACE = False

# rewrite counters, read by tests that check laziness and sharing
STATS = {"beta": 0, "assign": 0}


def reset_stats():
    STATS["beta"] = 0
    STATS["assign"] = 0


class HeadNormalView:
    """A head normal form lam(binder_len, head args...) with lazy args."""

    __slots__ = ("binder_len", "head", "args", "source", "node")

    def __init__(self, binder_len, head, args, source=None, node=None):
        self.binder_len = binder_len
        self.head = head
        self.args = tuple(args)
        self.source = source
        # the body node (below the binders) when it is an explicit graph node
        self.node = node

    @property
    def rigid(self):
        return type(self.head) is not LogicVar

    def term(self):
        body = App(self.head, self.args) if self.args else self.head
        return Abs(self.binder_len, body) if self.binder_len else body

    def __repr__(self):
        return f"HeadNormalView({self.binder_len}, {self.head!r}, {list(self.args)!r})"


def mk_susp(t, ol, nl, env):
    """Build [[t, ol, nl, env]], applying the cheap reading rules eagerly."""
    if ol == 0 and nl == 0:
        return t
    t = deref(t)
    k = type(t)
    if k is Const or k is LogicVar:
        return t
    if k is DeBruijn:
        i = t.index
        if i > ol:
            return DeBruijn(i - ol + nl)
        item = env[i - 1]
        if type(item) is Dum:
            return DeBruijn(nl - item.l)
        return mk_susp(item.term, 0, nl - item.l, ())
    if k is Susp and ol == 0:
        return Susp(t.body, t.ol, t.nl + nl, t.env)
    return Susp(t, ol, nl, env)


def _dummies(nl, n):
    # environment prefix created by pushing a suspension under n binders
    return tuple(Dum(nl + n - 1 - j) for j in range(n))


def _explicit(r):
    """Turn an hnorm result into an explicit term (rule r6 on a suspended lambda)."""
    t, ol, nl, env = r
    if ol == 0 and nl == 0:
        return t
    if type(t) is not Abs:
        raise KernelError("non-trivial hnorm result must be an abstraction")
    n = t.n
    return Abs(n, mk_susp(t.body, ol + n, nl + n, _dummies(nl, n) + env))


def _shared(t, whnf, trail):
    """Normalize a self-contained term in place and return the explicit result."""
    r = _hnorm(t, 0, 0, (), whnf, trail)
    return _explicit(r)


def _beta_prime_ok(b, n):
    # body has the shape [[t, ol, nl, @(nl-1) :: ... :: @(nl-n) :: e]]
    if b.ol < n or b.nl < n:
        return False
    env = b.env
    top = b.nl - 1
    for j in range(n):
        item = env[j]
        if type(item) is not Dum or item.l != top - j:
            return False
    return True


def _hnorm(t, ol, nl, env, whnf, trail):
    while True:
        t = deref(t)
        k = type(t)
        if k is Const or k is LogicVar:
            return t, 0, 0, ()
        triv = ol == 0 and nl == 0

        if k is DeBruijn:
            if triv:
                return t, 0, 0, ()
            i = t.index
            if i > ol:
                return DeBruijn(i - ol + nl), 0, 0, ()
            item = env[i - 1]
            if type(item) is Dum:
                return DeBruijn(nl - item.l), 0, 0, ()
            d = nl - item.l
            s = item.term
            if d == 0:
                t, ol, nl, env = s, 0, 0, ()
            else:
                t, ol, nl, env = _shared(s, whnf, trail), 0, d, ()
            continue

        if k is Susp:
            if triv:
                r = _hnorm(t.body, t.ol, t.nl, t.env, whnf, trail)
                x = _explicit(r)
                assign(t, x, trail)
                STATS["assign"] += 1
                return x, 0, 0, ()
            t = _shared(t, whnf, trail)
            continue

        if k is Abs:
            if whnf:
                return t, ol, nl, env
            n = t.n
            if triv:
                b = _hnorm(t.body, 0, 0, (), False, trail)[0]
                if type(b) is Abs:
                    return Abs(n + b.n, b.body), 0, 0, ()
                if b is deref(t.body):
                    return t, 0, 0, ()
                return Abs(n, b), 0, 0, ()
            b = _hnorm(t.body, ol + n, nl + n, _dummies(nl, n) + env, False, trail)[0]
            return Abs(n, b), 0, 0, ()

        if k is App:
            return _hnorm_app(t, ol, nl, env, whnf, triv, trail)

        raise KernelError(f"unknown term node {t!r}")


def _hnorm_app(t, ol, nl, env, whnf, triv, trail):
    h = _hnorm(t.head, ol, nl, env, True, trail)
    f = h[0]
    args = t.args

    def wrap(a):
        return a if triv else mk_susp(a, ol, nl, env)

    if type(f) is not Abs:
        if type(f) is App:
            new = App(f.head, f.args + tuple(map(wrap, args)))
        elif triv and f is t.head:
            return t, 0, 0, ()
        else:
            new = App(f, tuple(map(wrap, args)))
        if triv:
            assign(t, new, trail)
            STATS["assign"] += 1
        return new, 0, 0, ()

    _, fol, fnl, fenv = h
    nargs = len(args)
    i = 0
    while True:
        n = f.n
        take = min(n, nargs - i)
        STATS["beta"] += take
        b = deref(f.body)
        if (
            take == n
            and fol == 0
            and fnl == 0
            and type(b) is Susp
            and _beta_prime_ok(b, n)
        ):
            # rule beta-prime: reuse the environment of the inner suspension
            lvl = b.nl - n
            new_items = tuple(Bndg(wrap(args[i + j]), lvl) for j in range(n - 1, -1, -1))
            f, fol, fnl, fenv = b.body, b.ol, lvl, new_items + b.env[n:]
        else:
            new_items = tuple(Bndg(wrap(args[i + j]), fnl) for j in range(take - 1, -1, -1))
            fenv = new_items + fenv
            fol += take
            f = Abs(n - take, f.body) if n > take else f.body
        i += take
        if i == nargs:
            r = _hnorm(f, fol, fnl, fenv, whnf, trail)
            break
        g = _hnorm(f, fol, fnl, fenv, True, trail)
        if type(g[0]) is Abs:
            f, fol, fnl, fenv = g
            continue
        gt = g[0]
        rest = tuple(wrap(a) for a in args[i:])
        if type(gt) is App:
            new = App(gt.head, gt.args + rest)
        else:
            new = App(gt, rest)
        r = (new, 0, 0, ())
        break
    if triv and r[1] == 0 and r[2] == 0:
        assign(t, r[0], trail)
        STATS["assign"] += 1
    return r


def head_norm(t, trail):
    """Rewrite t to head normal form and return its view."""
    x = _hnorm(t, 0, 0, (), False, trail)[0]
    n = 0
    x = deref(x)
    while type(x) is Abs:
        n += x.n
        x = deref(x.body)
    if type(x) is App:
        head = deref(x.head)
        args = x.args
    else:
        head = x
        args = ()
    if type(head) not in (Const, DeBruijn, LogicVar):
        raise KernelError(f"head normal form has a non-atomic head {head!r}")
    if TRACE:
        log.debug("head_norm -> binders %d, head %r, %d args", n, head, len(args))
    return HeadNormalView(n, head, args, t, x)


def full_normalize(t, trail):
    """Suspension-free beta-normal form of t."""
    v = head_norm(t, trail)
    if v.args:
        body = App(v.head, tuple(full_normalize(a, trail) for a in v.args))
    else:
        body = v.head
    return Abs(v.binder_len, body) if v.binder_len else body


def eta_adjust(v, extra, trail=None):
    """Eta-expand a head normal form by ``extra`` binders."""
    if extra <= 0:
        raise ValueError("eta_adjust needs a positive binder count")
    args = tuple(mk_susp(a, 0, extra, ()) for a in v.args)
    args += tuple(DeBruijn(j) for j in range(extra, 0, -1))
    head = v.head
    if type(head) is DeBruijn:
        head = DeBruijn(head.index + extra)
    return HeadNormalView(v.binder_len + extra, head, args, v.source)
