import random

import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from hopu.bench import corpus_text
from hopu.errors import LoadError, ParseError, TypeCheckError
from hopu.frontend import Program, elab, eliminate_disjunctions, encode
from hopu.parser import parse_program, parse_query, parse_term
from hopu.syntax import show_pterm
from hopu.terms import Abs, App, Const, DeBruijn
from hopu.typesys import Signature, infer_clause

from oracles import kernel_to_db

CORPUS = ["append.lp", "copy.lp", "hetero.lp", "mapfun.lp", "mappred.lp", "prenex.lp", "print.lp", "rev.lp"]


def clauses_of(text):
    out = []
    for s in parse_program(text):
        if s.kind == "clause":
            out.extend(elab(s.data, s.pos))
    return out


def test_copy_program_parses_into_three_clauses():
    cs = clauses_of(corpus_text("copy.lp"))
    assert len(cs) == 3
    assert all(c.pred == "copy" for c in cs)
    assert show_pterm(cs[2].body) == "pi c\\ copy c c => copy (T1 c) (T2 c)"


def test_kind_declaration_arity():
    (s,) = parse_program("kind pair type -> type -> type.")
    assert s.kind == "kind" and s.data == (["pair"], 2)


def test_empty_body_is_a_parse_error():
    with pytest.raises(ParseError) as e:
        parse_program("foo X :- .")
    assert "1:" in str(e.value)


def test_list_sugar():
    assert show_pterm(parse_term("[a, b | L]")) == "a::b::L"
    assert show_pterm(parse_term("[]")) == "nil"


def test_elab_examples():
    (d,) = [s.data for s in parse_program("pi x\\ (p x, (q x :- r x)).")]
    cs = elab(d)
    assert [c.pred for c in cs] == ["p", "q"]
    assert cs[0].body is None and show_pterm(cs[1].body) == "r " + show_pterm(cs[1].head.args[0])
    # the quantified variable becomes a clause variable
    assert cs[0].head.args[0].name.startswith("_x")
    (a,) = elab(parse_term("p a"))
    assert a.body is None
    cs = elab(parse_term("p a , (r b => q b)"))
    assert [c.pred for c in cs] == ["p", "q"] and show_pterm(cs[1].body) == "r b"


def test_elab_rejects_logical_heads():
    with pytest.raises(LoadError):
        elab(parse_term("(p ; q) :- r"))


def _program(text):
    sig = Signature()
    clauses = []
    for s in parse_program(text):
        if s.kind == "kind":
            for n in s.data[0]:
                sig.declare_kind(n, s.data[1])
        elif s.kind == "type":
            for n in s.data[0]:
                sig.declare_type(n, s.data[1])
        else:
            clauses.extend(elab(s.data, s.pos))
    for c in clauses:
        infer_clause(c, sig)
    return clauses, sig


DISJ = """
kind i type.
type f i -> i.
type foo i -> o.
type bar1, bar2, bar3 i -> i -> o.
foo X :- bar1 U V, (bar2 (f X) U ; bar3 (f X) V).
"""


def test_disjunction_becomes_a_new_predicate():
    clauses, sig = _program(DISJ)
    out = eliminate_disjunctions(clauses, sig)
    assert len(out) == 3
    assert show_pterm(out[0].body) == "bar1 U V, $disj_1 X U V"
    assert show_pterm(out[1].term()) == "$disj_1 X U V :- bar2 (f X) U"
    assert show_pterm(out[2].term()) == "$disj_1 X U V :- bar3 (f X) V"
    assert sig.info("$disj_1").is_pred


def test_program_without_disjunctions_is_unchanged():
    clauses, sig = _program(corpus_text("copy.lp"))
    out = eliminate_disjunctions(clauses, sig)
    assert [show_pterm(c.term()) for c in out] == [show_pterm(c.term()) for c in clauses]


def test_nested_disjunctions():
    clauses, sig = _program("type p, q, r, s o.\np :- q ; (r ; s).")
    out = eliminate_disjunctions(clauses, sig)
    assert len(out) == 5
    preds = {c.pred for c in out if c.pred.startswith("$disj")}
    assert preds == {"$disj_1", "$disj_2"}


def test_disjunction_under_binder_passes_bound_variable():
    p = Program()
    p.load_text("kind i type.\ntype a i.\ntype q, r i -> o.\ntype t o.\nq a.\nt :- sigma y\\ (q y ; r y).")
    (gen,) = [c for c in p.clauses if c.pred == "t"]
    assert show_pterm(gen.body) == "sigma y\\ $disj_1 y"


def test_encode_examples():
    assert kernel_to_db(encode(parse_term("x\\ y\\ (x y)"))) == ("lam", ("lam", ("app", ("i", 2), ("i", 1))))
    t = encode(parse_term("x\\ y\\ x y"))
    assert type(t) is Abs and t.n == 2
    assert type(t.body) is App and t.body.head.index == 2 and t.body.args[0].index == 1
    a = encode(parse_term("abs (x\\ app a x)"))
    assert type(a) is App and a.head.name == "abs"
    (lam,) = a.args
    assert type(lam) is Abs and lam.n == 1
    assert [x.name if type(x) is Const else x.index for x in lam.body.args] == ["a", 1]


def test_encode_is_alpha_invariant():
    assert kernel_to_db(encode(parse_term("x\\ x"))) == kernel_to_db(encode(parse_term("y\\ y")))
    nested = encode(parse_term("f (x\\ g x (y\\ h y x))"))
    renamed = encode(parse_term("f (u\\ g u (v\\ h v u))"))
    assert kernel_to_db(nested) == kernel_to_db(renamed)


def test_encode_flattens_applications():
    t = encode(parse_term("(f a) b c"))
    assert type(t) is App and t.head.name == "f" and len(t.args) == 3


@pytest.mark.parametrize("name", CORPUS)
def test_printing_round_trip(name):
    for c in clauses_of(corpus_text(name)):
        once = show_pterm(c.term())
        twice = show_pterm(parse_term(once))
        assert once == twice


def test_load_is_atomic():
    p = Program()
    p.load_text(corpus_text("append.lp"))
    before = (len(p.clauses), dict(p.sig.consts))
    with pytest.raises(TypeCheckError):
        p.load_text('type q int -> o.\nq 1.\nq "x".')
    assert (len(p.clauses), dict(p.sig.consts)) == before


def test_unknown_constant_is_an_error():
    with pytest.raises(TypeCheckError):
        Program().load_text("p :- nosuch.")


# -- random names for the alpha property -------------------------------------

_names = st.sampled_from(["x", "y", "z", "w", "u"])


def _random_lam(rng, scope, depth):
    if depth == 0 or rng.random() < 0.3:
        return rng.choice(scope) if scope and rng.random() < 0.7 else "a"
    if rng.random() < 0.4:
        v = rng.choice(["p", "q", "r"])
        return ("lam", v, _random_lam(rng, scope + [v], depth - 1))
    return ("g", _random_lam(rng, scope, depth - 1), _random_lam(rng, scope, depth - 1))


def _render(t, ren):
    if isinstance(t, str):
        return ren.get(t, t)
    if t[0] == "lam":
        return f"({ren[t[1]]}\\ {_render(t[2], ren)})"
    return f"(g {_render(t[1], ren)} {_render(t[2], ren)})"


@settings(max_examples=100, deadline=None)
@given(st.integers(0, 2**32 - 1), st.permutations(["s1", "s2", "s3"]))
def test_encoding_alpha_property(seed, perm):
    t = _random_lam(random.Random(seed), [], 5)
    base = {"p": "p", "q": "q", "r": "r"}
    other = dict(zip(["p", "q", "r"], perm))
    a = encode(parse_term(_render(t, base)))
    b = encode(parse_term(_render(t, other)))
    assert kernel_to_db(a) == kernel_to_db(b)
