import random

from hypothesis import given, settings
from hypothesis import strategies as st

from hopu.normalize import STATS, eta_adjust, full_normalize, head_norm, reset_stats
from hopu.terms import Abs, App, Bndg, Const, DeBruijn, LogicVar, Susp, Trail, check_wellformed

from oracles import (
    I,
    arrow,
    encode_named,
    kernel_to_db,
    make_consts,
    named_to_db,
    normalize_named,
    random_term,
    random_terms,
)


def db(t):
    return kernel_to_db(t)


def test_worked_example_head_normal_form():
    # ((x\ ((y\ z\ z y x) t2)) t3) with t2 = g #1 and t3 = f a
    f, g, a = Const("f"), Const("g"), Const("a")
    t2 = App(g, [DeBruijn(1)])
    t3 = App(f, [a])
    inner = App(Abs(2, App(DeBruijn(1), [DeBruijn(2), DeBruijn(3)])), [t2])
    t = App(Abs(1, inner), [t3])
    v = head_norm(t, Trail())
    assert v.binder_len == 1
    assert type(v.head) is DeBruijn and v.head.index == 1
    s1, s2 = v.args
    assert type(s1) is Susp and s1.body is t2 and (s1.ol, s1.nl) == (1, 1)
    assert len(s1.env) == 1 and type(s1.env[0]) is Bndg
    assert s1.env[0].term is t3 and s1.env[0].l == 0
    assert type(s2) is Susp and s2.body is t3 and (s2.ol, s2.nl, s2.env) == (0, 1, ())


def test_head_norm_constant():
    c = Const("c")
    v = head_norm(c, Trail())
    assert (v.binder_len, v.head, v.args) == (0, c, ())


def test_head_norm_index_above_old_level():
    s = Const("s")
    t = Susp(DeBruijn(2), 1, 0, (Bndg(s, 0),))
    v = head_norm(t, Trail())
    assert v.binder_len == 0 and v.head.index == 1 and v.args == ()


def test_full_normalize_examples():
    trail = Trail()
    c, d = Const("c"), Const("d")
    assert full_normalize(App(Abs(1, DeBruijn(1)), [c]), trail) is c
    x = LogicVar()
    assert full_normalize(Susp(x, 1, 2, (Bndg(c, 0),)), trail) is x
    t = App(Abs(2, App(DeBruijn(2), [DeBruijn(1)])), [c, d])
    assert db(full_normalize(t, trail)) == ("app", ("c", "c"), ("c", "d"))


def test_full_normalize_matches_oracle_on_example():
    named = ("app", ("app", ("lam", "x", ("lam", "y", ("app", ("var", "x"), ("var", "y")))), ("const", "f")), ("const", "a"))
    consts = make_consts()
    out = db(full_normalize(encode_named(named, consts), Trail()))
    assert out == named_to_db(normalize_named(named))


def test_eta_adjust_examples():
    c, t1 = Const("c"), Const("t1")
    trail = Trail()
    v = head_norm(App(c, [t1]), trail)
    w = eta_adjust(v, 1)
    assert w.binder_len == 1 and w.head is c
    assert w.args[0] is t1  # a constant is unchanged by the suspension
    assert type(w.args[1]) is DeBruijn and w.args[1].index == 1
    v2 = head_norm(Abs(1, DeBruijn(2)), trail)
    # under the binder the head is #2; view the body alone
    body = type(v2)(0, v2.head, v2.args)
    w2 = eta_adjust(body, 1)
    assert w2.head.index == 3 and w2.args[0].index == 1


def test_eta_adjust_preserves_meaning():
    f, c = Const("f"), Const("c")
    trail = Trail()
    w = eta_adjust(head_norm(f, trail), 1)
    applied = App(w.term(), [c])
    assert db(full_normalize(applied, trail)) == ("app", ("c", "f"), ("c", "c"))


def test_eta_adjust_rejects_zero():
    import pytest

    with pytest.raises(ValueError):
        eta_adjust(head_norm(Const("c"), Trail()), 0)


def test_head_norm_is_lazy_in_arguments():
    # (x\ h (f x) (f x)) a : only the outer redex is contracted
    f, h, a = Const("f"), Const("h"), Const("a")
    arg_redex = App(Abs(1, App(f, [DeBruijn(1)])), [DeBruijn(1)])
    t = App(Abs(1, App(h, [arg_redex, arg_redex])), [a])
    reset_stats()
    v = head_norm(t, Trail())
    assert v.head is h
    assert STATS["beta"] == 1
    assert all(type(x) is Susp for x in v.args)


def test_shared_redex_is_rewritten_once():
    f, g, a = Const("f"), Const("g"), Const("a")
    r = App(Abs(1, App(f, [DeBruijn(1), DeBruijn(1)])), [a])
    t = App(g, [r, r])
    trail = Trail()
    reset_stats()
    out = full_normalize(t, trail)
    assert STATS["beta"] == 1
    assert r.ref is not None
    assert db(out) == ("app", ("app", ("c", "g"), ("app", ("app", ("c", "f"), ("c", "a")), ("c", "a"))),
                       ("app", ("app", ("c", "f"), ("c", "a")), ("c", "a")))


def test_rewrites_are_undone():
    from hopu.terms import snapshot

    terms = random_terms(40, seed=3)
    consts = make_consts()
    trail = Trail()
    for named in terms:
        t = encode_named(named, consts)
        before = snapshot([t])
        mark = trail.mark()
        full_normalize(t, trail)
        check_wellformed(t)
        trail.undo_to(mark)
        assert snapshot([t]) == before


def test_oracle_agreement_seeded():
    consts = make_consts()
    for named in random_terms(400, seed=11):
        got = db(full_normalize(encode_named(named, consts), Trail()))
        assert got == named_to_db(normalize_named(named)), named


@settings(max_examples=150, deadline=None)
@given(st.integers(0, 2**32 - 1), st.sampled_from([I, arrow(I, I)]), st.integers(3, 30))
def test_oracle_agreement_property(seed, ty, size):
    named = random_term(random.Random(seed), ty, size=size)
    got = db(full_normalize(encode_named(named, make_consts()), Trail()))
    assert got == named_to_db(normalize_named(named))


@settings(max_examples=80, deadline=None)
@given(st.integers(0, 2**32 - 1))
def test_normal_forms_are_fixed_points(seed):
    named = random_term(random.Random(seed), I, size=25)
    trail = Trail()
    nf = full_normalize(encode_named(named, make_consts()), trail)
    again = full_normalize(nf, trail)
    assert db(again) == db(nf)
