"""Micro-benchmarks over the bundled reversal and copy programs.

Each case loads a corpus program, prebuilds its inputs and then times a
fixed number of top-level calls. Only wall time is reported.
"""

from __future__ import annotations

import time
from importlib import resources

from .engine import Engine
from .frontend import Program
from .terms import Abs, App, Const, DeBruijn, bind


def corpus_text(name):
    return resources.files("hopu").joinpath("corpus", name).read_text(encoding="utf-8")


def _mlist(n):
    t = Const("mnil")
    for i in reversed(range(n)):
        t = App(Const("mcons"), [Const(f"e{i % 10}"), t])
    return t


def _copy_term(depth):
    """A closed tm of the given depth, alternating abstraction and application."""

    def build(d, bound):
        if d == 0:
            return DeBruijn(1) if bound else Const("a")
        if d % 2:
            return App(Const("abs"), [Abs(1, build(d - 1, bound + 1))])
        return App(Const("app"), [build(d - 1, bound), build(d - 1, bound)])

    return build(depth, 0)


class BenchResult:
    def __init__(self, name, calls, seconds, detail):
        self.name = name
        self.calls = calls
        self.seconds = seconds
        self.detail = detail

    def __str__(self):
        return f"{self.name}: {self.calls} calls ({self.detail}), wall time {self.seconds:.3f} s"


def _run_calls(program, query_text, inputs):
    engine = Engine(program)
    query = program.query(query_text)
    start = time.perf_counter()
    for t in inputs:
        goal, V, _ = query.instantiate(0)
        mark = engine.trail.mark()
        bind(V[0], t, engine.trail)
        if not engine.succeeds(goal):
            raise RuntimeError(f"benchmark call failed: {query_text}")
        engine.trail.undo_to(mark)
    return time.perf_counter() - start


# case -> (corpus file, query, default call count, input description)
CASES = {
    "naive-rev": ("rev.lp", "rev L R", 30_000, "naive reverse, lists of length 0 to 5"),
    "linear-rev": ("rev.lp", "lrev L R", 10_000, "accumulator reverse, 10 element list"),
    "copy-depth4": ("copy.lp", "copy T R", 5_000, "copy of a depth 4 term"),
}


def run_bench(name, level="full", calls=None):
    if name not in CASES:
        raise ValueError(f"unknown benchmark {name}")
    fname, query, default, detail = CASES[name]
    n = default if calls is None else calls
    program = Program(level)
    program.load_text(corpus_text(fname), fname)
    if name == "naive-rev":
        pool = [_mlist(k) for k in range(6)]
    elif name == "linear-rev":
        pool = [_mlist(10)]
    else:
        pool = [_copy_term(4)]
    inputs = [pool[i % len(pool)] for i in range(n)]
    secs = _run_calls(program, query, inputs)
    return BenchResult(name, n, secs, detail)
