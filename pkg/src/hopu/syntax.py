"""Named abstract syntax produced by the parser.

Goals and clause bodies are ordinary terms whose heads are logical
constants (``,`` ``;`` ``=>`` ``:-`` ``pi`` ``sigma`` ``true``); the helpers
below view them as goal trees where needed.
"""

from __future__ import annotations

AND = ","
OR = ";"
IMP = "=>"
NECK = ":-"
PI = "pi"
SIGMA = "sigma"
TRUE = "true"
CONS = "::"
NIL = "nil"
EQ = "="

LOGICAL = {AND, OR, IMP, NECK, PI, SIGMA, TRUE}
INFIX = {NECK: 1, IMP: 2, OR: 3, AND: 4, EQ: 5, CONS: 6}
RIGHT_ASSOC = {IMP, OR, AND, CONS}


class PTerm:
    __slots__ = ("pos",)


class PVar(PTerm):
    """Implicitly quantified variable (capitalized identifier)."""

    __slots__ = ("name", "ty")

    def __init__(self, name, pos=None):
        self.name = name
        self.pos = pos
        self.ty = None

    def __repr__(self):
        return f"PVar({self.name})"


class PConst(PTerm):
    """Occurrence of a declared or built-in constant.

    After type inference ``inst`` holds the instantiation of every type
    variable of the constant's declared type, in first-occurrence order.
    """

    __slots__ = ("name", "inst")

    def __init__(self, name, pos=None):
        self.name = name
        self.pos = pos
        self.inst = None

    def __repr__(self):
        return f"PConst({self.name})"


class PBound(PTerm):
    """Occurrence of a lambda-bound variable."""

    __slots__ = ("name", "ty")

    def __init__(self, name, pos=None):
        self.name = name
        self.pos = pos
        self.ty = None

    def __repr__(self):
        return f"PBound({self.name})"


class PLam(PTerm):
    __slots__ = ("name", "body", "ty")

    def __init__(self, name, body, pos=None):
        self.name = name
        self.body = body
        self.pos = pos
        self.ty = None

    def __repr__(self):
        return f"PLam({self.name}, {self.body!r})"


class PApp(PTerm):
    __slots__ = ("head", "args")

    def __init__(self, head, args, pos=None):
        if isinstance(head, PApp):
            args = list(head.args) + list(args)
            head = head.head
        self.head = head
        self.args = list(args)
        self.pos = pos if pos is not None else head.pos

    def __repr__(self):
        return f"PApp({self.head!r}, {self.args!r})"


class PInt(PTerm):
    __slots__ = ("value",)

    def __init__(self, value, pos=None):
        self.value = value
        self.pos = pos

    def __repr__(self):
        return f"PInt({self.value})"


class PStr(PTerm):
    __slots__ = ("value",)

    def __init__(self, value, pos=None):
        self.value = value
        self.pos = pos

    def __repr__(self):
        return f"PStr({self.value!r})"


def mk(name, *args, pos=None):
    head = PConst(name, pos)
    return PApp(head, args, pos) if args else head


def head_name(t):
    """Name of the head constant of t, or None."""
    if isinstance(t, PApp):
        t = t.head
    return t.name if isinstance(t, PConst) else None


def split_app(t):
    if isinstance(t, PApp):
        return t.head, t.args
    return t, []


def is_op(t, name, arity=2):
    h, args = split_app(t)
    return isinstance(h, PConst) and h.name == name and len(args) == arity


def lam_body(t):
    """(name, body) of a pi/sigma argument given as an explicit abstraction."""
    if isinstance(t, PLam):
        return t.name, t.body
    return None


class Clause:
    """A program clause: head atom, optional body goal, clause variables."""

    def __init__(self, head, body=None, pos=None, origin=None):
        self.head = head
        self.body = body
        self.pos = pos
        self.origin = origin
        self.var_types = {}

    @property
    def pred(self):
        return head_name(self.head)

    @property
    def vars(self):
        out = []
        for t in (self.head, self.body):
            if t is not None:
                collect_vars(t, out)
        return out

    def term(self):
        if self.body is None:
            return self.head
        return mk(NECK, self.head, self.body, pos=self.pos)

    def __repr__(self):
        return f"Clause({show_pterm(self.term())})"


def collect_vars(t, out):
    if isinstance(t, PVar):
        if t.name not in out:
            out.append(t.name)
    elif isinstance(t, PApp):
        collect_vars(t.head, out)
        for a in t.args:
            collect_vars(a, out)
    elif isinstance(t, PLam):
        collect_vars(t.body, out)
    return out


def free_bound(t, bound=(), out=None):
    """Lambda-bound names occurring free in t (bound outside t), in order."""
    if out is None:
        out = []
    if isinstance(t, PBound):
        if t.name not in bound and t.name not in out:
            out.append(t.name)
    elif isinstance(t, PApp):
        free_bound(t.head, bound, out)
        for a in t.args:
            free_bound(a, bound, out)
    elif isinstance(t, PLam):
        free_bound(t.body, bound + (t.name,), out)
    return out


def free_names(t, bound=(), out=None):
    """Variables and outer-bound names of t in first-occurrence order.

    Entries are ('var', name) or ('bound', name).
    """
    if out is None:
        out = []
    if isinstance(t, PVar):
        k = ("var", t.name)
        if k not in out:
            out.append(k)
    elif isinstance(t, PBound):
        k = ("bound", t.name)
        if t.name not in bound and k not in out:
            out.append(k)
    elif isinstance(t, PApp):
        free_names(t.head, bound, out)
        for a in t.args:
            free_names(a, bound, out)
    elif isinstance(t, PLam):
        free_names(t.body, bound + (t.name,), out)
    return out


def replace_bound(t, name, repl):
    """Substitute repl() for free occurrences of bound name in t."""
    if isinstance(t, PBound):
        return repl(t) if t.name == name else t
    if isinstance(t, PApp):
        return PApp(
            replace_bound(t.head, name, repl),
            [replace_bound(a, name, repl) for a in t.args],
            t.pos,
        )
    if isinstance(t, PLam):
        if t.name == name:
            return t
        return PLam(t.name, replace_bound(t.body, name, repl), t.pos)
    return t


def copy_pterm(t):
    if isinstance(t, PVar):
        return PVar(t.name, t.pos)
    if isinstance(t, PConst):
        return PConst(t.name, t.pos)
    if isinstance(t, PBound):
        return PBound(t.name, t.pos)
    if isinstance(t, PApp):
        return PApp(copy_pterm(t.head), [copy_pterm(a) for a in t.args], t.pos)
    if isinstance(t, PLam):
        return PLam(t.name, copy_pterm(t.body), t.pos)
    return t


# -- printing --------------------------------------------------------------
#
# Both parsed terms and kernel normal forms are printed through a small
# display tree: ("atom", text) | ("app", head, [args]) | ("lam", name, body).


def show_tree(d, prec=0, open_right=True):
    kind = d[0]
    if kind == "atom":
        return d[1]
    if kind == "lam":
        s = f"{d[1]}\\ {show_tree(d[2], 0, open_right)}"
        return s if open_right and prec == 0 else f"({s})"
    head, args = d[1], d[2]
    if head[0] == "atom" and head[1] in INFIX and len(args) == 2:
        op = head[1]
        p = INFIX[op]
        if op in RIGHT_ASSOC:
            lp, rp = p + 1, p
        else:
            lp, rp = p + 1, p + 1
        left = show_tree(args[0], lp, False)
        right = show_tree(args[1], rp, open_right or prec < p)
        if op == AND:
            s = f"{left}, {right}"
        elif op == CONS:
            s = f"{left}::{right}"
        else:
            s = f"{left} {op} {right}"
        return f"({s})" if prec > p else s
    parts = [show_tree(head, 10, False)]
    # inside parentheses the last argument is open to the right again
    open_last = open_right or prec > 7
    for i, a in enumerate(args):
        last = i == len(args) - 1
        if a[0] == "lam" and last and open_last:
            parts.append(show_tree(a, 0, True))
        else:
            parts.append(show_tree(a, 10, False))
    s = " ".join(parts)
    return f"({s})" if prec > 7 else s


def pterm_tree(t):
    if isinstance(t, (PVar, PConst, PBound)):
        return ("atom", t.name)
    if isinstance(t, PInt):
        return ("atom", str(t.value))
    if isinstance(t, PStr):
        return ("atom", quote_string(t.value))
    if isinstance(t, PLam):
        return ("lam", t.name, pterm_tree(t.body))
    return ("app", pterm_tree(t.head), [pterm_tree(a) for a in t.args])


def quote_string(s):
    return '"' + s.replace("\\", "\\\\").replace('"', '\\"').replace("\n", "\\n") + '"'


def show_pterm(t):
    return show_tree(pterm_tree(t))
