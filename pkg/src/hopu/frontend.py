"""From program text to runnable clause templates.

Pipeline: parse, collect declarations, elaborate clauses, type them,
eliminate body disjunctions, run the neededness analysis, and compile each
clause into a builder that produces a fresh kernel instance (new logic
variables for the clause variables, new type variables for the clause's type
variables) every time the clause is used.
"""

from __future__ import annotations

import itertools

from .errors import LoadError, TypeCheckError
from .parser import parse_program, parse_query
from .syntax import (
    AND,
    IMP,
    NECK,
    OR,
    PI,
    SIGMA,
    Clause,
    collect_vars,
    PApp,
    PBound,
    PConst,
    PInt,
    PLam,
    PStr,
    PVar,
    free_names,
    quote_string,
    replace_bound,
    split_app,
)
from .terms import Abs, App, Const, DeBruijn, LogicVar
from .typesys import (
    LEVELS,
    UNANNOTATED,
    Signature,
    atom_head_ids,
    embedded_clauses,
    find_needed,
    infer_clause,
    infer_goal,
)
from .typeterms import O, arrows, copy_type, resolve, type_vars


# -- elaboration -----------------------------------------------------------

_pi_names = itertools.count(1)


def _clause_shape(d):
    h, args = split_app(d)
    if isinstance(h, PConst):
        if h.name == AND and len(args) == 2:
            return "conj", args
        if h.name == PI and len(args) == 1:
            return "quant", args[0]
        if h.name == NECK and len(args) == 2:
            return "rule", (args[0], args[1])
        if h.name == IMP and len(args) == 2:
            return "rule", (args[1], args[0])
    return "fact", (d, None)


def elab(d, pos=None):
    """Split a program clause into atomic or implicational clauses.

    Conjunctions are split and universal quantifiers distributed; a
    quantified variable becomes a clause variable.
    """
    kind, p = _clause_shape(d)
    if kind == "conj":
        return elab(p[0], pos) + elab(p[1], pos)
    if kind == "quant":
        if not isinstance(p, PLam):
            raise LoadError(f"{_where(pos)}pi in a clause needs an explicit abstraction")
        var = f"_{p.name}{next(_pi_names)}"
        body = replace_bound(p.body, p.name, lambda b: PVar(var, b.pos))
        return elab(body, pos)
    head, body = p
    _check_head(head, pos)
    return [Clause(head, body, pos)]


def _where(pos):
    return f"{pos[0]}:{pos[1]}: " if pos else ""


def _check_head(head, pos):
    h, _ = split_app(head)
    if not isinstance(h, PConst) or h.name in UNANNOTATED or h.name in ("::", "nil"):
        raise LoadError(f"{_where(pos)}clause head must be an atom with a predicate constant head")


# -- disjunction elimination ----------------------------------------------


class _DisjElim:
    def __init__(self, sig, counter):
        self.sig = sig
        self.counter = counter
        self.generated = []

    def goal(self, g):
        h, args = split_app(g)
        if not isinstance(h, PConst):
            return g
        n = h.name
        if n == OR and len(args) == 2:
            return self.replace(g)
        if n == AND and len(args) == 2:
            return PApp(h, [self.goal(args[0]), self.goal(args[1])], g.pos)
        if n in (PI, SIGMA) and len(args) == 1 and isinstance(args[0], PLam):
            lam = args[0]
            return PApp(h, [PLam(lam.name, self.goal(lam.body), lam.pos)], g.pos)
        if n == IMP and len(args) == 2:
            return PApp(h, [self.dclause(args[0]), self.goal(args[1])], g.pos)
        return g

    def dclause(self, d):
        h, args = split_app(d)
        if not isinstance(h, PConst):
            return d
        n = h.name
        if n == AND and len(args) == 2:
            return PApp(h, [self.dclause(args[0]), self.dclause(args[1])], d.pos)
        if n == PI and len(args) == 1 and isinstance(args[0], PLam):
            lam = args[0]
            return PApp(h, [PLam(lam.name, self.dclause(lam.body), lam.pos)], d.pos)
        if n == NECK and len(args) == 2:
            return PApp(h, [args[0], self.goal(args[1])], d.pos)
        if n == IMP and len(args) == 2:
            return PApp(h, [self.goal(args[0]), args[1]], d.pos)
        return d

    def replace(self, g):
        fv = free_names(g)
        types = []
        for kind, name in fv:
            node = _find_named(g, kind, name)
            if node is None or node.ty is None:
                raise TypeCheckError(f"cannot type variable {name} of a disjunction", g.pos)
            types.append(resolve(node.ty))
        k = next(self.counter)
        pred = f"$disj_{k}"
        ty = copy_type(arrows(types, O), {})
        self.sig.declare_type(pred, ty)
        call_args = [PVar(n, g.pos) if kind == "var" else PBound(n, g.pos) for kind, n in fv]
        head_args = []
        renames = []
        for kind, name in fv:
            if kind == "var":
                head_args.append(PVar(name, g.pos))
            else:
                v = f"_{name}{k}"
                renames.append((name, v))
                head_args.append(PVar(v, g.pos))
        _, (g1, g2) = split_app(g)
        for alt in (g1, g2):
            for name, v in renames:
                alt = replace_bound(alt, name, lambda b, v=v: PVar(v, b.pos))
            head = PApp(PConst(pred, g.pos), head_args, g.pos) if head_args else PConst(pred, g.pos)
            self.generated.append(Clause(head, alt, g.pos, origin="disj"))
        if call_args:
            return PApp(PConst(pred, g.pos), call_args, g.pos)
        return PConst(pred, g.pos)


def _find_named(t, kind, name):
    cls = PVar if kind == "var" else PBound
    if isinstance(t, cls) and t.name == name:
        return t
    if isinstance(t, PApp):
        for s in [t.head] + list(t.args):
            r = _find_named(s, kind, name)
            if r is not None:
                return r
    if isinstance(t, PLam) and not (kind == "bound" and t.name == name):
        return _find_named(t.body, kind, name)
    return None


def eliminate_disjunctions(clauses, sig, counter=None):
    """Replace every body disjunction by a call to a fresh predicate.

    New predicates are named $disj_1, $disj_2, ... and declared in sig.
    Returns the new clause list; generated clauses follow the clause that
    gave rise to them and are processed in turn.
    """
    if counter is None:
        counter = itertools.count(1)
    out = []
    work = list(clauses)
    i = 0
    while i < len(work):
        c = work[i]
        i += 1
        if c.body is None:
            out.append(c)
            continue
        infer_clause(c, sig)
        el = _DisjElim(sig, counter)
        body = el.goal(c.body)
        if el.generated:
            c = Clause(c.head, body, c.pos, c.origin)
            work[i:i] = el.generated
        out.append(c)
    return out


# -- compilation to builders ----------------------------------------------
#
# A builder is a pair (fn, const): either const is a ready term shared by
# every instance, or fn(V, T) builds a fresh one, where V holds the clause's
# logic variables and T maps the clause's type variables to fresh ones.


def _has_tvars(annots):
    return any(a is not None and type_vars(a) for a in annots)


class _Compiler:
    def __init__(self, sig, level, needed, slots, head_ids):
        self.sig = sig
        self.level = level
        self.needed = needed
        self.slots = slots
        self.head_ids = head_ids

    def annots(self, t):
        info = self.sig.info(t.name)
        if info is None or t.name in UNANNOTATED or not t.inst:
            return ()
        out = [resolve(t.inst[i]) for i in info.positions(self.level)]
        if self.level == "full" and id(t) in self.head_ids:
            mask = self.needed.get(t.name)
            if mask is not None:
                out = [a if m else None for a, m in zip(out, mask)]
        return tuple(out)

    def term(self, t, scope):
        if isinstance(t, PConst):
            annots = self.annots(t)
            name = t.name
            if _has_tvars(annots):

                def build(V, T, name=name, annots=annots):
                    return Const(name, 0, tuple(None if a is None else copy_type(a, T) for a in annots))

                return build, None
            return None, Const(name, 0, annots)
        if isinstance(t, PInt):
            return None, Const(str(t.value), 0, ())
        if isinstance(t, PStr):
            return None, Const(quote_string(t.value), 0, ())
        if isinstance(t, PBound):
            for i in range(len(scope) - 1, -1, -1):
                if scope[i] == t.name:
                    return None, DeBruijn(len(scope) - i)
            raise LoadError(f"unbound identifier {t.name}")
        if isinstance(t, PVar):
            i = self.slots.get(t.name)
            if i is None:
                raise LoadError(f"unknown variable {t.name}")
            return (lambda V, T, i=i: V[i]), None
        if isinstance(t, PLam):
            n = 0
            while isinstance(t, PLam):
                scope = scope + (t.name,)
                n += 1
                t = t.body
            f, c = self.term(t, scope)
            if f is None:
                return None, Abs(n, c)
            return (lambda V, T: Abs(n, f(V, T))), None
        if isinstance(t, PApp):
            hf, hc = self.term(t.head, scope)
            parts = [self.term(a, scope) for a in t.args]
            if hf is None and all(f is None for f, _ in parts):
                return None, App(hc, [c for _, c in parts])
            if all(f is None for f, _ in parts):
                args = tuple(c for _, c in parts)
                return (lambda V, T: App(hf(V, T), args)), None
            if hf is None:
                return (lambda V, T: App(hc, [c if f is None else f(V, T) for f, c in parts])), None
            return (
                lambda V, T: App(hf(V, T), [c if f is None else f(V, T) for f, c in parts])
            ), None
        raise LoadError(f"cannot compile {t!r}")

    def builder(self, t):
        f, c = self.term(t, ())
        if f is None:
            return lambda V, T: c
        return f


def _first_arg_key(t):
    h, args = split_app(t)
    if not args:
        return None
    a = args[0]
    if isinstance(a, PInt):
        return str(a.value)
    if isinstance(a, PStr):
        return quote_string(a.value)
    ah, _ = split_app(a)
    if isinstance(ah, PConst):
        return ah.name
    return None


class CompiledClause:
    """A clause ready for resolution."""

    __slots__ = ("pred", "nvars", "head", "body", "key", "source", "var_names")

    def __init__(self, pred, var_names, head, body, key, source):
        self.pred = pred
        self.var_names = var_names
        self.nvars = len(var_names)
        self.head = head
        self.body = body
        self.key = key
        self.source = source

    def __repr__(self):
        return f"CompiledClause({self.source!r})"


def compile_clause(c, sig, level, needed):
    names = c.vars
    slots = {n: i for i, n in enumerate(names)}
    comp = _Compiler(sig, level, needed, slots, atom_head_ids(c))
    head = comp.builder(c.head)
    body = comp.builder(c.body) if c.body is not None else None
    return CompiledClause(c.pred, names, head, body, _first_arg_key(c.head), c)


class Query:
    """A typed query compiled against a program."""

    def __init__(self, goal, var_names, var_types, build):
        self.goal = goal
        self.var_names = var_names
        self.var_types = var_types
        self.build = build

    def instantiate(self, universe=0):
        V = [LogicVar(universe, name) for name in self.var_names]
        T = {}
        return self.build(V, T), V, T


def compile_query(text, program):
    """Parse, type and compile a query against a loaded program."""
    goal = parse_query(text) if isinstance(text, str) else text
    var_types = infer_goal(goal, program.sig)
    names = []
    _collect_query_vars(goal, names)
    slots = {n: i for i, n in enumerate(names)}
    comp = _Compiler(program.sig, program.level, program.needed, slots, set())
    return Query(goal, names, var_types, comp.builder(goal))


def _collect_query_vars(t, out):
    collect_vars(t, out)


def encode(t, scope=(), variables=None, sig=None, level="full"):
    """Kernel term for a named term.

    Bound names become de Bruijn indexes; capitalized variables are looked
    up in ``variables`` (created as fresh LogicVars when missing).
    """
    if variables is None:
        variables = {}
    names = []
    _collect_query_vars(t, names)
    for n in names:
        if n not in variables:
            variables[n] = LogicVar(0, n)
    slots = {n: i for i, n in enumerate(names)}
    comp = _Compiler(sig or Signature(), level, {}, slots, set())
    f, c = comp.term(t, tuple(scope))
    if f is None:
        return c
    return f([variables[n] for n in names], {})


# -- programs --------------------------------------------------------------


class Program:
    """Declarations plus typed, elaborated clauses, compiled per type level."""

    def __init__(self, level="full"):
        if level not in LEVELS:
            raise ValueError(f"unknown type optimization level {level}")
        self.level = level
        self.sig = Signature()
        self.clauses = []
        self.needed = {}
        self.db = {}
        self.dynamic_preds = set()
        self.sources = []
        self._disj_next = 1

    def load_text(self, text, source=None):
        """Add declarations and clauses from text. Atomic: on error nothing changes."""
        statements = parse_program(text, source)
        sig = self.sig.copy()
        fresh = []
        for st in statements:
            if st.kind == "kind":
                names, arity = st.data
                for n in names:
                    sig.declare_kind(n, arity, st.pos)
            elif st.kind == "type":
                names, ty = st.data
                for n in names:
                    sig.declare_type(n, ty, st.pos)
            else:
                fresh.extend(elab(st.data, st.pos))
        for c in fresh:
            infer_clause(c, sig)
        counter = itertools.count(self._disj_next)
        fresh = eliminate_disjunctions(fresh, sig, counter)
        for c in fresh:
            infer_clause(c, sig)
        self.sig = sig
        self.clauses = self.clauses + fresh
        self._disj_next = next(counter)
        self.sources.append(source)
        self.recompile()
        return fresh

    def load_file(self, path):
        try:
            with open(path, encoding="utf-8") as fh:
                text = fh.read()
        except OSError as e:
            raise LoadError(f"cannot read {path}: {e.strerror}") from None
        return self.load_text(text, str(path))

    def set_level(self, level):
        if level not in LEVELS:
            raise ValueError(f"unknown type optimization level {level}")
        self.level = level
        self.recompile()

    def recompile(self):
        self.needed = find_needed(self.clauses, self.sig) if self.level == "full" else {}
        db = {}
        for c in self.clauses:
            cc = compile_clause(c, self.sig, self.level, self.needed)
            db.setdefault(cc.pred, []).append(cc)
        self.db = db
        dyn = set()
        for c in self.clauses:
            for head, _ in embedded_clauses(c.body):
                h, _ = split_app(head)
                if isinstance(h, PConst):
                    dyn.add(h.name)
        self.dynamic_preds = dyn

    def query(self, text):
        return compile_query(text, self)


def load_program(text, level="full", source=None):
    p = Program(level)
    p.load_text(text, source)
    return p
