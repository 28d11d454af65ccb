"""Command line driver: batch queries, an interactive loop and benchmarks.

Exit status: 0 when every batch query had an answer, 1 when some query had
none, 2 on a load, parse or type error (or bad usage).
"""

from __future__ import annotations

import argparse
import logging
import re
import sys

from . import normalize
from .bench import CASES, run_bench
from .engine import Engine
from .errors import EngineError, HopuError, ParseError, StepLimit
from .frontend import Program
from .typesys import LEVELS

TRACE_LOGGERS = {"unify": "hopu.unify", "normalize": "hopu.normalize", "clauses": "hopu.engine"}


class Config:
    """Settings shared by batch mode and the interactive loop."""

    def __init__(self, type_opt="full", answers=10, max_steps=None, trace=()):
        self.type_opt = type_opt
        self.answers = answers
        self.max_steps = max_steps
        self.trace = tuple(trace)


def build_parser():
    p = argparse.ArgumentParser(prog="hopu", description="Interpreter for a higher-order logic programming language.")
    p.add_argument("files", nargs="*", help="program files, loaded in order")
    p.add_argument("-q", "--query", action="append", default=[], help="run a query in batch mode (repeatable)")
    p.add_argument("--answers", type=int, default=10, metavar="N", help="maximum answers per query (default 10)")
    p.add_argument("--type-opt", choices=LEVELS, default="full", help="type annotation level (default full)")
    p.add_argument("--trace", action="append", default=[], choices=sorted(TRACE_LOGGERS), help="log an area to stderr")
    p.add_argument("--bench", choices=sorted(CASES), help="run a micro-benchmark and print its wall time")
    p.add_argument("--bench-calls", type=int, metavar="N", help="override the benchmark's call count")
    p.add_argument("--max-steps", type=int, metavar="N", help="abort a query after N solver steps")
    return p


def setup_trace(areas):
    if not areas:
        return
    logging.basicConfig(stream=sys.stderr, format="%(name)s: %(message)s")
    for area in areas:
        logging.getLogger(TRACE_LOGGERS[area]).setLevel(logging.DEBUG)
    normalize.TRACE = "normalize" in areas


def load_files(program, files, err):
    for f in files:
        try:
            program.load_file(f)
        except ParseError as e:
            print(f"error: {e}", file=err)
            return False
        except HopuError as e:
            print(f"error: {f}: {e}", file=err)
            return False
    return True


def format_answer(answer, final="."):
    lines = answer.lines()
    binding_count = len(answer.bindings)
    if binding_count:
        lines[binding_count - 1] += final
    elif not answer.residuals:
        lines = ["yes" + final]
    return lines


def run_query(program, text, config, out, err):
    """Print up to config.answers answers; returns the number found, or None on error."""
    engine = Engine(program, config.max_steps)
    count = 0
    try:
        stream = engine.solve(text, config.answers)
        for answer in stream:
            if count:
                out.write("\n")
            out.write("\n".join(format_answer(answer)) + "\n")
            count += 1
    except StepLimit as e:
        print(f"error: {e}", file=err)
        return count
    except EngineError as e:
        print(f"error: {e}", file=err)
        return count
    except HopuError as e:
        print(f"error: {e}", file=err)
        return None
    if count == 0:
        out.write("no.\n")
    elif count < config.answers:
        out.write("no more answers\n")
    return count


# -- interactive loop --------------------------------------------------------

_LOAD = re.compile(r'#load\s+"([^"]*)"\s*\.?\s*$')
_TYPEOPT = re.compile(r"#typeopt\s+(\S+?)\s*\.?\s*$")
_QUIT = re.compile(r"#quit\s*\.?\s*$")


class Repl:
    def __init__(self, program, config, inp, out, err):
        self.program = program
        self.config = config
        self.inp = inp
        self.out = out
        self.err = err
        self.pending = None

    def readline(self):
        if self.pending is not None:
            line, self.pending = self.pending, None
            return line
        return self.inp.readline()

    def run(self):
        while True:
            self.out.write("?- ")
            self.out.flush()
            line = self.readline()
            if not line:
                self.out.write("\n")
                return 0
            text = line.strip()
            if not text:
                continue
            if text.startswith("?-"):
                text = text[2:].strip()
            if _QUIT.match(text):
                return 0
            m = _LOAD.match(text)
            if m:
                self.load(m.group(1))
                continue
            m = _TYPEOPT.match(text)
            if m:
                self.typeopt(m.group(1))
                continue
            if text.startswith("#"):
                print(f"error: unknown command {text}", file=self.err)
                continue
            self.query(text)

    def load(self, path):
        try:
            self.program.load_file(path)
        except HopuError as e:
            print(f"error: {e}", file=self.err)
            return
        self.out.write(f"loaded {path}\n")

    def typeopt(self, level):
        if level not in LEVELS:
            print(f"error: unknown level {level}; use one of {', '.join(LEVELS)}", file=self.err)
            return
        self.program.set_level(level)
        self.config.type_opt = level
        self.out.write(f"type optimization: {level}\n")

    def query(self, text):
        engine = Engine(self.program, self.config.max_steps)
        try:
            stream = engine.solve(text)
        except HopuError as e:
            print(f"error: {e}", file=self.err)
            return
        try:
            answer = next(stream, None)
            while answer is not None:
                if not answer.bindings and not answer.residuals:
                    self.out.write("yes\n")
                    return
                for line in format_answer(answer, ""):
                    self.out.write(line + "\n")
                self.out.flush()
                reply = self.readline()
                if reply.strip() != ";":
                    if reply.strip():
                        self.pending = reply
                    self.out.write("yes\n")
                    return
                answer = next(stream, None)
            self.out.write("no\n")
        except HopuError as e:
            print(f"error: {e}", file=self.err)
        finally:
            stream.close()


def main(argv=None, out=None, err=None, inp=None):
    out = out or sys.stdout
    err = err or sys.stderr
    inp = inp or sys.stdin
    parser = build_parser()
    try:
        args = parser.parse_args(argv)
    except SystemExit as e:
        return e.code if isinstance(e.code, int) else 2
    if args.answers < 1:
        print("error: --answers must be positive", file=err)
        return 2
    sys.setrecursionlimit(max(sys.getrecursionlimit(), 20_000))
    setup_trace(args.trace)
    config = Config(args.type_opt, args.answers, args.max_steps, args.trace)

    if args.bench:
        try:
            result = run_bench(args.bench, config.type_opt, args.bench_calls)
        except (HopuError, RuntimeError) as e:
            print(f"error: {e}", file=err)
            return 2
        out.write(f"{result}\n")
        return 0

    program = Program(config.type_opt)
    if not load_files(program, args.files, err):
        return 2

    if args.query:
        status = 0
        for q in args.query:
            n = run_query(program, q, config, out, err)
            if n is None:
                return 2
            if n == 0:
                status = 1
        return status
    return Repl(program, config, inp, out, err).run()


if __name__ == "__main__":
    sys.exit(main())
