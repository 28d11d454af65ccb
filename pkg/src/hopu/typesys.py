"""Signatures, type inference and the neededness analysis for predicate
type annotations."""

from __future__ import annotations

from .errors import TypeCheckError
from .syntax import (
    AND,
    EQ,
    IMP,
    LOGICAL,
    NECK,
    OR,
    PI,
    SIGMA,
    PApp,
    PBound,
    PConst,
    PInt,
    PLam,
    PStr,
    PVar,
    split_app,
)
from .terms import Trail
from .typeterms import (
    INT,
    O,
    STRING,
    TCon,
    TVar,
    arrow,
    copy_type,
    format_type,
    occurs,
    split_skeleton,
    tderef,
    type_unify,
    type_vars,
)

# constants whose annotations are never needed at run time
UNANNOTATED = LOGICAL | {EQ}

LEVELS = ("none", "skeleton", "full")


def _builtin_types():
    a, b, c, d, e = (TVar("A") for _ in range(5))
    return {
        "true": O,
        AND: arrow(O, arrow(O, O)),
        OR: arrow(O, arrow(O, O)),
        IMP: arrow(O, arrow(O, O)),
        NECK: arrow(O, arrow(O, O)),
        PI: arrow(arrow(a, O), O),
        SIGMA: arrow(arrow(b, O), O),
        "::": arrow(c, arrow(TCon("list", (c,)), TCon("list", (c,)))),
        "nil": TCon("list", (d,)),
        EQ: arrow(e, arrow(e, O)),
    }


class Signature:
    """Declared kinds and constant types."""

    def __init__(self):
        self.kinds = {"o": 0, "int": 0, "string": 0, "list": 1}
        self.consts = {}
        self.builtin = set()
        for name, ty in _builtin_types().items():
            self.consts[name] = split_skeleton(name, ty)
            self.builtin.add(name)

    def copy(self):
        s = Signature.__new__(Signature)
        s.kinds = dict(self.kinds)
        s.consts = dict(self.consts)
        s.builtin = set(self.builtin)
        return s

    def declare_kind(self, name, arity, pos=None):
        if name in self.kinds:
            if self.kinds[name] == arity:
                return
            raise TypeCheckError(f"kind {name} redeclared with a different arity", pos)
        self.kinds[name] = arity

    def declare_type(self, name, ty, pos=None):
        self.check_type(ty, pos)
        if name in self.builtin:
            raise TypeCheckError(f"cannot redeclare built-in constant {name}", pos)
        old = self.consts.get(name)
        if old is not None:
            if format_type(old.skeleton, {}) == format_type(ty, {}):
                return
            raise TypeCheckError(f"constant {name} redeclared with a different type", pos)
        self.consts[name] = split_skeleton(name, ty)

    def check_type(self, ty, pos=None):
        ty = tderef(ty)
        if type(ty) is TVar:
            return
        if ty.name == "->":
            for a in ty.args:
                self.check_type(a, pos)
            return
        arity = self.kinds.get(ty.name)
        if arity is None:
            raise TypeCheckError(f"unknown type constructor {ty.name}", pos)
        if arity != len(ty.args):
            raise TypeCheckError(
                f"type constructor {ty.name} expects {arity} arguments, got {len(ty.args)}", pos
            )
        for a in ty.args:
            self.check_type(a, pos)

    def info(self, name):
        return self.consts.get(name)

    def is_pred(self, name):
        info = self.consts.get(name)
        return info is not None and info.is_pred and name not in UNANNOTATED


# -- inference -------------------------------------------------------------


class _Infer:
    def __init__(self, sig):
        self.sig = sig
        self.trail = Trail()
        self.vars = {}

    def unify(self, a, b, pos, what):
        if not type_unify(a, b, self.trail):
            names = {}
            raise TypeCheckError(
                f"{what}: expected {format_type(b, names)}, found {format_type(a, names)}", pos
            )

    def term(self, t, scope):
        if isinstance(t, PConst):
            info = self.sig.info(t.name)
            if info is None:
                raise TypeCheckError(f"undeclared constant {t.name}", t.pos)
            mapping = {}
            ty = copy_type(info.skeleton, mapping)
            t.inst = [mapping[v] for v in info.type_vars]
            return ty
        if isinstance(t, PVar):
            ty = self.vars.get(t.name)
            if ty is None:
                ty = self.vars[t.name] = TVar()
            t.ty = ty
            return ty
        if isinstance(t, PBound):
            for name, ty in reversed(scope):
                if name == t.name:
                    t.ty = ty
                    return ty
            raise TypeCheckError(f"unbound identifier {t.name}", t.pos)
        if isinstance(t, PInt):
            return INT
        if isinstance(t, PStr):
            return STRING
        if isinstance(t, PLam):
            a = TVar()
            t.ty = a
            body = self.term(t.body, scope + ((t.name, a),))
            return arrow(a, body)
        if isinstance(t, PApp):
            fty = self.term(t.head, scope)
            for arg in t.args:
                aty = self.term(arg, scope)
                r = TVar()
                self.unify(arrow(aty, r), fty, arg.pos, "ill-typed application")
                fty = r
            return fty
        raise TypeError(f"not a term: {t!r}")


def infer_clause(clause, sig):
    """Type a program clause in place; returns the clause variable types."""
    inf = _Infer(sig)
    inf.unify(inf.term(clause.head, ()), O, clause.head.pos, "clause head must be a proposition")
    if clause.body is not None:
        inf.unify(inf.term(clause.body, ()), O, clause.body.pos, "clause body must be a goal")
    clause.var_types = inf.vars
    return inf.vars


def infer_goal(goal, sig):
    """Type a query goal in place; returns its variable types."""
    inf = _Infer(sig)
    inf.unify(inf.term(goal, ()), O, goal.pos, "query must be a goal")
    return inf.vars


def infer_types(ast, sig):
    """Clause or goal, typed in place."""
    if hasattr(ast, "head"):
        return infer_clause(ast, sig)
    return infer_goal(ast, sig)


def annotations(t, sig, level):
    """Resolved annotation vector of a typed constant occurrence."""
    info = sig.info(t.name)
    if info is None or t.name in UNANNOTATED or not t.inst:
        return ()
    return tuple(t.inst[i] for i in info.positions(level))


# -- neededness ------------------------------------------------------------


def _atom_head(g):
    h, args = split_app(g)
    return (h, args) if isinstance(h, PConst) else (None, args)


def _goal_parts(g):
    """Classify a goal term: returns (kind, payload)."""
    h, args = split_app(g)
    if isinstance(h, PConst):
        n = h.name
        if n in (AND, OR) and len(args) == 2:
            return "conj", args
        if n in (PI, SIGMA) and len(args) == 1:
            a = args[0]
            return "quant", [a.body if isinstance(a, PLam) else a]
        if n == IMP and len(args) == 2:
            return "imp", args
        if n == "true" and not args:
            return "true", None
        return "atom", (h, args)
    return "flex", None


def _clause_parts(d):
    """Classify an embedded clause: conj/quant/rule/fact."""
    h, args = split_app(d)
    if isinstance(h, PConst):
        n = h.name
        if n == AND and len(args) == 2:
            return "conj", args
        if n == PI and len(args) == 1:
            a = args[0]
            return "quant", [a.body if isinstance(a, PLam) else a]
        if n == NECK and len(args) == 2:
            return "rule", (args[0], args[1])
        if n == IMP and len(args) == 2:
            return "rule", (args[1], args[0])
    return "fact", (d, None)


def embedded_clauses(goal):
    """Heads and bodies of all clauses added by augment goals inside goal."""
    out = []

    def walk_goal(g):
        kind, p = _goal_parts(g)
        if kind == "conj":
            walk_goal(p[0])
            walk_goal(p[1])
        elif kind == "quant":
            walk_goal(p[0])
        elif kind == "imp":
            walk_clause(p[0])
            walk_goal(p[1])

    def walk_clause(d):
        kind, p = _clause_parts(d)
        if kind == "conj":
            walk_clause(p[0])
            walk_clause(p[1])
        elif kind == "quant":
            walk_clause(p[0])
        else:
            head, body = p
            out.append((head, body))
            if body is not None:
                walk_goal(body)

    if goal is not None:
        walk_goal(goal)
    return out


def atom_head_ids(clause):
    """ids of PConst nodes that sit in predicate-head position."""
    ids = set()

    def goal(g):
        kind, p = _goal_parts(g)
        if kind == "conj":
            goal(p[0])
            goal(p[1])
        elif kind == "quant":
            goal(p[0])
        elif kind == "imp":
            dclause(p[0])
            goal(p[1])
        elif kind == "atom":
            ids.add(id(p[0]))

    def dclause(d):
        kind, p = _clause_parts(d)
        if kind == "conj":
            dclause(p[0])
            dclause(p[1])
        elif kind == "quant":
            dclause(p[0])
        else:
            h, _ = _atom_head(p[0])
            if h is not None:
                ids.add(id(h))
            if p[1] is not None:
                goal(p[1])

    h, _ = _atom_head(clause.head)
    if h is not None:
        ids.add(id(h))
    if clause.body is not None:
        goal(clause.body)
    return ids


def _const_nodes(t, out):
    if isinstance(t, PConst):
        out.append(t)
    elif isinstance(t, PApp):
        _const_nodes(t.head, out)
        for a in t.args:
            _const_nodes(a, out)
    elif isinstance(t, PLam):
        _const_nodes(t.body, out)
    return out


def _occurs_in(v, types):
    return any(t is not None and occurs(v, t) for t in types)


def find_needed(clauses, sig):
    """Which predicate type-annotation positions can affect solvability.

    Returns a dict from predicate name to a list of booleans.
    """
    needed = {}
    for name, info in sig.consts.items():
        if sig.is_pred(name):
            needed[name] = [False] * len(info.type_vars)

    # predicates defined by embedded clauses keep every position
    for c in clauses:
        for head, _ in embedded_clauses(c.body):
            h, _ = _atom_head(head)
            if h is not None and h.name in needed:
                needed[h.name] = [True] * len(needed[h.name])

    def head_vector(c):
        h, _ = _atom_head(c.head)
        return h.inst or []

    for c in clauses:
        p = c.pred
        if p not in needed:
            continue
        vec = head_vector(c)
        heads = atom_head_ids(c)
        others = []
        nodes = _const_nodes(c.head, [])
        if c.body is not None:
            _const_nodes(c.body, nodes)
        for node in nodes:
            if id(node) in heads or node.name in UNANNOTATED or not node.inst:
                continue
            info = sig.info(node.name)
            if info.is_pred:
                # a predicate passed as data may later be called through solve
                others.extend(node.inst)
            else:
                others.extend(node.inst[i] for i in info.annot_positions)
        emb = []
        for head, _ in embedded_clauses(c.body):
            h, _ = _atom_head(head)
            if h is not None and h.inst:
                emb.extend(h.inst)
        for i, ty in enumerate(vec):
            ty = tderef(ty)
            if type(ty) is not TVar:
                needed[p][i] = True
            elif _occurs_in(ty, vec[:i] + vec[i + 1 :]):
                needed[p][i] = True
            elif _occurs_in(ty, others) or _occurs_in(ty, emb):
                needed[p][i] = True

    def body_needs(g, v):
        kind, p = _goal_parts(g)
        if kind == "conj":
            return body_needs(p[0], v) or body_needs(p[1], v)
        if kind == "quant":
            return body_needs(p[0], v)
        if kind == "imp":
            return embedded_needs(p[0], v) or body_needs(p[1], v)
        if kind == "atom":
            h = p[0]
            mask = needed.get(h.name)
            if mask is None or not h.inst:
                return False
            return any(m and occurs(v, t) for m, t in zip(mask, h.inst))
        return False

    def embedded_needs(d, v):
        kind, p = _clause_parts(d)
        if kind == "conj":
            return embedded_needs(p[0], v) or embedded_needs(p[1], v)
        if kind == "quant":
            return embedded_needs(p[0], v)
        if kind == "rule":
            return body_needs(p[1], v)
        return False

    changed = True
    while changed:
        changed = False
        for c in clauses:
            p = c.pred
            if p not in needed or c.body is None:
                continue
            vec = head_vector(c)
            for i, ty in enumerate(vec):
                if needed[p][i]:
                    continue
                ty = tderef(ty)
                if body_needs(c.body, ty):
                    needed[p][i] = True
                    changed = True
    return needed


def annotation_vars(sig, name):
    info = sig.info(name)
    return [] if info is None else info.annotation_vars


__all__ = [
    "Signature",
    "infer_clause",
    "infer_goal",
    "infer_types",
    "find_needed",
    "annotations",
    "type_vars",
    "LEVELS",
]
