"""Depth-first interpreter for hereditary Harrop goals.

Goals are kernel terms whose heads are logical constants. The agenda is a
linked list of frames (goal, context, universe, rest); a context is a stack
of clause blocks added by augment goals. Choice points record a trail mark
and enough state to resume: either the rest of a candidate clause list or
the right branch of a disjunction.
"""

from __future__ import annotations

import logging

from .errors import EngineError, StepLimit
from .frontend import Program, compile_query
from .normalize import full_normalize, head_norm, mk_susp
from .printer import VarNames, freeze, kernel_tree
from .syntax import AND, EQ, IMP, NECK, OR, PI, SIGMA, TRUE, show_tree
from .terms import Abs, App, Bndg, Const, DeBruijn, LogicVar, Trail, bind, deref
from .typeterms import copy_type, format_type, resolve
from .unify import UnifyState, recheck_residuals, unify_pairs

log = logging.getLogger("hopu.engine")

_TRUE = Const(TRUE)


class DynClause:
    """A clause added by an augment goal.

    ``head`` and ``body`` live under ``k`` universally quantified binders;
    an instance substitutes fresh logic variables for them.
    """

    __slots__ = ("pred", "k", "head", "body", "key")

    def __init__(self, pred, k, head, body, key):
        self.pred = pred
        self.k = k
        self.head = head
        self.body = body
        self.key = key

    def instance(self, n):
        if self.k == 0:
            return self.head, self.body
        env = tuple(Bndg(LogicVar(n), 0) for _ in range(self.k))
        head = mk_susp(self.head, self.k, 0, env)
        body = mk_susp(self.body, self.k, 0, env) if self.body is not None else None
        return head, body

    def __repr__(self):
        return f"DynClause({self.pred}, k={self.k})"


class Context:
    """One block of dynamic clauses on top of an older context."""

    __slots__ = ("clauses", "parent")

    def __init__(self, clauses, parent):
        self.clauses = clauses
        self.parent = parent


class Answer:
    """One solution: printable bindings, type bindings and residual pairs."""

    def __init__(self, bindings, terms, types, residuals, residual_terms):
        self.bindings = bindings
        self.terms = terms
        self.types = types
        self.residuals = residuals
        self.residual_terms = residual_terms

    @property
    def conditional(self):
        return bool(self.residuals)

    def lines(self):
        out = [f"{name} = {text}" for name, text in self.bindings.items()]
        out.extend(f"| <{a}, {b}>" for a, b in self.residuals)
        return out

    def __repr__(self):
        return f"Answer({self.bindings!r}, residuals={self.residuals!r})"


def _first_key(args, trail):
    if not args:
        return None
    v = head_norm(args[0], trail)
    if v.binder_len == 0 and type(v.head) is Const:
        return v.head.name
    return None


class Engine:
    """Solves queries against a loaded Program."""

    def __init__(self, program: Program, max_steps=None):
        self.program = program
        self.trail = Trail()
        self.max_steps = max_steps
        self.steps = 0
        self.uc = 0
        self.eigen = 0

    # -- public entry points

    def solve(self, text, max_answers=None):
        """Lazy stream of answers to a query given as text."""
        query = compile_query(text, self.program)
        goal, V, T = query.instantiate(0)
        return self.run(goal, V, T, query, max_answers)

    def run(self, goal, V, T=None, query=None, max_answers=None):
        state = UnifyState(self.trail, self.program.level)
        mark0 = self.trail.mark()
        self.steps = 0
        count = 0
        try:
            for _ in self._search(goal, state):
                yield self._answer(V, T or {}, query, state)
                count += 1
                if max_answers is not None and count >= max_answers:
                    return
        finally:
            self.trail.undo_to(mark0)

    def succeeds(self, goal):
        """Whether goal has a solution; all bindings are undone afterwards."""
        state = UnifyState(self.trail, self.program.level)
        mark0 = self.trail.mark()
        search = self._search(goal, state)
        try:
            return next(search, None) is not None
        finally:
            search.close()
            self.trail.undo_to(mark0)

    # -- search

    def _search(self, goal, state):
        choices = []
        agenda = (goal, None, 0, None)
        while True:
            if agenda is None:
                yield True
                agenda = self._backtrack(choices, state)
            else:
                agenda = self._step(agenda, choices, state)
                if agenda is False:
                    agenda = self._backtrack(choices, state)
            if agenda is False:
                return
            if self.max_steps is not None:
                self.steps += 1
                if self.steps > self.max_steps:
                    raise StepLimit(f"step limit of {self.max_steps} exceeded")

    def _backtrack(self, choices, state):
        while choices:
            cp = choices.pop()
            self.trail.undo_to(cp[0])
            state.dirty = False
            if cp[1] == "alt":
                return cp[2]
            _, _, g, cands, i, ctx, n, rest = cp
            agenda = self._try_clauses(g, cands, i, ctx, n, rest, choices, state)
            if agenda is not False:
                return agenda
        return False

    def _step(self, frame, choices, state):
        goal, ctx, n, rest = frame
        trail = self.trail
        v = head_norm(goal, trail)
        if v.binder_len:
            raise EngineError("goal is an abstraction, not a proposition")
        h = v.head
        args = v.args
        k = type(h)
        if k is LogicVar:
            # flexible goal: instantiate with the always-true predicate
            body = _TRUE if not args else Abs(len(args), _TRUE)
            bind(h, body, trail)
            state.dirty = True
            if not recheck_residuals(state):
                return False
            return rest
        if k is not Const:
            raise EngineError("goal head is a bound variable")
        name = h.name
        na = len(args)
        if name == AND and na == 2:
            return (args[0], ctx, n, (args[1], ctx, n, rest))
        if name == TRUE and na == 0:
            return rest
        if name == OR and na == 2:
            choices.append((trail.mark(), "alt", (args[1], ctx, n, rest)))
            return (args[0], ctx, n, rest)
        if name == SIGMA and na == 1:
            x = LogicVar(n)
            return (App(args[0], [x]), ctx, n, rest)
        if name == PI and na == 1:
            self.uc = max(self.uc, n) + 1
            self.eigen += 1
            c = Const(f"$c{self.eigen}", self.uc, (), f"c{self.eigen}")
            return (App(args[0], [c]), ctx, self.uc, rest)
        if name == IMP and na == 2:
            block = {}
            for dc in self._elab(args[0], 0):
                block.setdefault(dc.pred, []).append(dc)
            return (args[1], Context(block, ctx), n, rest)
        if name == EQ and na == 2:
            if not unify_pairs([(args[0], args[1])], state) or not recheck_residuals(state):
                return False
            return rest
        if name == NECK:
            raise EngineError("a clause cannot be used as a goal")
        cands = self._candidates(name, args, ctx)
        if log.isEnabledFor(logging.DEBUG):
            log.debug("goal %s at universe %d: %d candidate clauses", name, n, len(cands))
        return self._try_clauses(goal, cands, 0, ctx, n, rest, choices, state)

    def _candidates(self, name, args, ctx):
        out = []
        key = _first_key(args, self.trail)
        c = ctx
        while c is not None:
            for dc in c.clauses.get(name, ()):
                if key is None or dc.key is None or dc.key == key:
                    out.append(dc)
            c = c.parent
        base = self.program.db.get(name)
        if base:
            for cc in base:
                if key is None or cc.key is None or cc.key == key:
                    out.append(cc)
        elif not out and not name.startswith("$c") and name not in self.program.dynamic_preds:
            raise EngineError(f"no clauses for predicate {name}")
        return out

    def _try_clauses(self, goal, cands, i, ctx, n, rest, choices, state):
        trail = self.trail
        debug = log.isEnabledFor(logging.DEBUG)
        last = len(cands) - 1
        while i <= last:
            cl = cands[i]
            mark = trail.mark()
            if type(cl) is DynClause:
                head, body = cl.instance(n)
                build = None
            else:
                V = [LogicVar(n) for _ in range(cl.nvars)]
                T = {}
                head = cl.head(V, T)
                build = cl.body
            if unify_pairs([(goal, head)], state) and recheck_residuals(state):
                if debug:
                    log.debug("use clause %r", cl if build is None else cl.source)
                if i < last:
                    choices.append((mark, "clauses", goal, cands, i + 1, ctx, n, rest))
                if build is not None:
                    body = build(V, T)
                elif type(cl) is not DynClause:
                    body = None
                if body is None:
                    return rest
                return (body, ctx, n, rest)
            trail.undo_to(mark)
            state.dirty = False
            i += 1
        return False

    # -- augment goals

    def _elab(self, d, k):
        """Dynamic clauses of a program clause under k universal binders."""
        trail = self.trail
        v = head_norm(d, trail)
        if v.binder_len:
            raise EngineError("an abstraction cannot be used as a clause")
        h = v.head
        if type(h) is Const:
            name = h.name
            args = v.args
            if name == AND and len(args) == 2:
                return self._elab(args[0], k) + self._elab(args[1], k)
            if name == PI and len(args) == 1:
                body = App(mk_susp(args[0], 0, 1, ()), [DeBruijn(1)])
                return self._elab(body, k + 1)
            if name == TRUE and not args:
                return []
            if name == NECK and len(args) == 2:
                return [self._dyn(args[0], args[1], k)]
            if name == IMP and len(args) == 2:
                return [self._dyn(args[1], args[0], k)]
            return [self._dyn(d, None, k)]
        raise EngineError("clause head must be a predicate constant")

    def _dyn(self, head, body, k):
        v = head_norm(head, self.trail)
        if type(v.head) is not Const or v.binder_len or v.head.name in (AND, OR, IMP, NECK, PI, SIGMA, TRUE, EQ):
            raise EngineError("clause head must be a predicate constant")
        return DynClause(v.head.name, k, head, body, _first_key(v.args, self.trail))

    # -- answers

    def _answer(self, V, T, query, state):
        trail = self.trail
        named = {}
        for v in V:
            if v.name is not None and not v.name.startswith("_"):
                named[v] = v.name
        names = VarNames(named)
        bindings = {}
        terms = {}
        mapping = {}
        for v in V:
            if v.name is None or v.name.startswith("_"):
                continue
            t = deref(v)
            if t is v:
                continue
            nf = full_normalize(t, trail)
            terms[v.name] = freeze(nf, mapping)
            bindings[v.name] = show_tree(kernel_tree(nf, names))
        types = {}
        if query is not None:
            tv_names = {}
            for name, ty in query.var_types.items():
                if name.startswith("_"):
                    continue
                types[name] = format_type(resolve(copy_type(ty, T)), tv_names)
        residuals = []
        residual_terms = []
        for a, b in state.residuals:
            na = full_normalize(a, trail)
            nb = full_normalize(b, trail)
            residual_terms.append((freeze(na, mapping), freeze(nb, mapping)))
            residuals.append((show_tree(kernel_tree(na, names)), show_tree(kernel_tree(nb, names))))
        return Answer(bindings, terms, types, residuals, residual_terms)


# -- library API -----------------------------------------------------------


def load(text, level="full", source=None):
    """Load program text and return a program handle."""
    p = Program(level)
    p.load_text(text, source)
    return p


def solve(program, query, max_answers=None, max_steps=None):
    """Answer stream for a query against a program handle."""
    return Engine(program, max_steps).solve(query, max_answers)
