"""First-order type expressions and their unification.

The arrow is just the binary constructor ``->``; a sort is a constructor
applied to no arguments.
"""

from __future__ import annotations

import itertools

ARROW = "->"

_tvar_ids = itertools.count(1)


class TypeTerm:
    __slots__ = ()


class TVar(TypeTerm):
    __slots__ = ("binding", "id", "name")

    def __init__(self, name=None):
        self.binding = None
        self.id = next(_tvar_ids)
        self.name = name

    def __repr__(self):
        return f"TVar({self.name or self.id})"


class TCon(TypeTerm):
    __slots__ = ("name", "args")

    def __init__(self, name, args=()):
        self.name = name
        self.args = tuple(args)

    def __repr__(self):
        return format_type(self)


def Sort(name):
    return TCon(name, ())


def arrow(a, b):
    return TCon(ARROW, (a, b))


def arrows(args, result):
    for a in reversed(args):
        result = arrow(a, result)
    return result


O = Sort("o")
INT = Sort("int")
STRING = Sort("string")


def tderef(t):
    while type(t) is TVar and t.binding is not None:
        t = t.binding
    return t


def occurs(v, t):
    t = tderef(t)
    if t is v:
        return True
    if type(t) is TCon:
        return any(occurs(v, a) for a in t.args)
    return False


def type_unify(a, b, trail):
    """Most general first-order unifier, recorded as trailed TVar bindings."""
    stack = [(a, b)]
    while stack:
        x, y = stack.pop()
        x = tderef(x)
        y = tderef(y)
        if x is y:
            continue
        if type(x) is TVar:
            if occurs(x, y):
                return False
            trail.record(x, "binding", None)
            x.binding = y
        elif type(y) is TVar:
            if occurs(y, x):
                return False
            trail.record(y, "binding", None)
            y.binding = x
        else:
            if x.name != y.name or len(x.args) != len(y.args):
                return False
            stack.extend(zip(x.args, y.args))
    return True


def unify_vectors(xs, ys, trail, mask=None):
    """Unify two annotation vectors position by position.

    Positions that are elided (None) on either side, or switched off in
    ``mask``, are skipped.
    """
    if len(xs) != len(ys):
        return False
    for i, (x, y) in enumerate(zip(xs, ys)):
        if x is None or y is None:
            continue
        if mask is not None and not mask[i]:
            continue
        if not type_unify(x, y, trail):
            return False
    return True


def type_vars(t, out=None):
    """Type variables of t in first-occurrence order."""
    if out is None:
        out = []
    t = tderef(t)
    if type(t) is TVar:
        if t not in out:
            out.append(t)
    else:
        for a in t.args:
            type_vars(a, out)
    return out


def split_arrow(t):
    """(argument types, target type)."""
    args = []
    t = tderef(t)
    while type(t) is TCon and t.name == ARROW:
        args.append(t.args[0])
        t = tderef(t.args[1])
    return args, t


def target(t):
    return split_arrow(t)[1]


def is_pred_type(t):
    tg = target(t)
    return type(tg) is TCon and tg.name == "o" and not tg.args


def copy_type(t, mapping):
    """Copy t, replacing variables through mapping (filled with fresh ones)."""
    t = tderef(t)
    if type(t) is TVar:
        v = mapping.get(t)
        if v is None:
            v = mapping[t] = TVar()
        return v
    if not t.args:
        return t
    return TCon(t.name, tuple(copy_type(a, mapping) for a in t.args))


def resolve(t):
    """Fully dereferenced copy of t (unbound variables kept by identity)."""
    t = tderef(t)
    if type(t) is TVar or not t.args:
        return t
    return TCon(t.name, tuple(resolve(a) for a in t.args))


def format_type(t, names=None, prec=0):
    t = tderef(t)
    if type(t) is TVar:
        if names is not None:
            if t not in names:
                names[t] = f"T{len(names) + 1}"
            return names[t]
        return t.name or f"_T{t.id}"
    if t.name == ARROW:
        s = f"{format_type(t.args[0], names, 1)} -> {format_type(t.args[1], names, 0)}"
        return f"({s})" if prec > 0 else s
    if not t.args:
        return t.name
    s = " ".join([t.name] + [format_type(a, names, 2) for a in t.args])
    return f"({s})" if prec > 1 else s


class SkeletonInfo:
    """How a declared constant's type splits into skeleton and annotation.

    ``type_vars`` lists every variable of the declared type in first
    occurrence order; ``annot_positions`` selects the ones carried at runtime
    when type footprint reduction is on.
    """

    def __init__(self, name, skeleton, type_vars, annot_positions, is_pred):
        self.name = name
        self.skeleton = skeleton
        self.type_vars = type_vars
        self.annot_positions = annot_positions
        self.is_pred = is_pred

    @property
    def annotation_vars(self):
        return [self.type_vars[i] for i in self.annot_positions]

    def positions(self, level):
        if level == "none":
            return tuple(range(len(self.type_vars)))
        return self.annot_positions

    def __repr__(self):
        return f"SkeletonInfo({self.name}, {format_type(self.skeleton)}, {self.annotation_vars})"


def split_skeleton(name, ty):
    tvs = type_vars(ty)
    pred = is_pred_type(ty)
    if pred:
        positions = tuple(range(len(tvs)))
    else:
        in_target = type_vars(target(ty))
        positions = tuple(i for i, v in enumerate(tvs) if v not in in_target)
    return SkeletonInfo(name, ty, tvs, positions, pred)
