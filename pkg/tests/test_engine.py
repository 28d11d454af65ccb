import pytest

from hopu.engine import Engine, load, solve
from hopu.errors import EngineError, StepLimit
from hopu.terms import snapshot

from corpus_queries import (
    GRANDPARENT,
    MAPFUN,
    MAPPRED,
    PRENEX_1,
    PRENEX_1_ANSWER,
    PRENEX_2,
    PRENEX_2_ANSWERS,
    QUERIES,
    answer_key,
    db_of,
    program,
)
from oracles import kernel_to_db


def answers(p, query, limit=None):
    return list(Engine(p).solve(query, limit))


def test_copy_through_abstraction():
    (a,) = answers(program("copy.lp"), "copy (app a (abs x\\ app x a)) R")
    assert a.bindings == {"R": "app a (abs x1\\ app x1 a)"}


def test_prenex_first_query():
    p = program("prenex.lp")
    (a,) = answers(p, PRENEX_1)
    assert kernel_to_db(a.terms["Pnf"]) == db_of(PRENEX_1_ANSWER, p)


def test_prenex_second_query_gives_the_five_forms():
    p = program("prenex.lp")
    got = [kernel_to_db(a.terms["Pnf"]) for a in answers(p, PRENEX_2)]
    expected = [db_of(t, p) for t in PRENEX_2_ANSWERS]
    assert len(got) == 5
    assert sorted(map(repr, got)) == sorted(map(repr, expected))


def test_mappred_and_grandparent():
    p = program("mappred.lp")
    assert [a.bindings for a in answers(p, MAPPRED)] == [{"L": "john::dick::nil"}]
    assert [a.bindings for a in answers(p, GRANDPARENT)] == [{"L": "mary::kate::nil"}]


def test_mapfun_leaves_a_constraint():
    (a,) = answers(program("mapfun.lp"), MAPFUN)
    assert a.bindings == {}
    assert a.residuals == [("F a", "g a")]
    assert a.conditional


def test_append_enumerates_splits_in_order():
    got = [a.bindings for a in answers(program("append.lp"), "append L1 L2 (1 :: 2 :: nil)")]
    assert got == [
        {"L1": "nil", "L2": "1::2::nil"},
        {"L1": "1::nil", "L2": "2::nil"},
        {"L1": "1::2::nil", "L2": "nil"},
    ]


def test_ad_hoc_polymorphism_selects_by_type():
    p = program("print.lp")
    assert len(answers(p, "printlist (1 :: 2 :: nil)")) == 1
    assert answers(p, "printlist (1 :: 5 :: nil)") == []
    assert len(answers(p, 'printlist ("one" :: nil)')) == 1


def test_query_types_are_reported():
    (a,) = answers(program("append.lp"), "append (1 :: nil) (2 :: nil) L")
    assert a.types["L"] == "list int"


# -- flexible goals ----------------------------------------------------------


def test_flexible_goal_variable_relation():
    p = program("mappred.lp")
    got = [a.bindings for a in answers(p, "mappred (bob :: nil) P L")]
    # P is instantiated to the always-true relation, L stays open
    assert len(got) == 1
    assert got[0]["P"] == "x1\\ x2\\ true"


def test_flexible_goal_alone():
    p = load("kind i type.\ntype c i.\ntype q i -> o.\nq c.")
    (a,) = answers(p, "F c")
    assert a.bindings["F"] == "x1\\ true"


def test_flexible_goal_inside_mappred_with_known_relation():
    p = program("mappred.lp")
    got = [a.bindings["Y"] for a in answers(p, "sigma P\\ (P = parent, P bob Y)")]
    assert got == ["john"]


# -- scoping -----------------------------------------------------------------

SCOPE = """
kind i type.
type p i -> i -> o.
type t o.
t :- pi x\\ (p x x => sigma y\\ pi z\\ p y z).
"""


def test_universal_constant_cannot_escape():
    assert answers(load(SCOPE), "t") == []


def test_augment_is_local_to_its_goal():
    p = program("copy.lp")
    assert answers(p, "pi c\\ (copy c c => copy (app c c) (app c c))") != []
    # the augmentation for an eigen constant is not visible afterwards
    assert answers(p, "pi c\\ ((copy c c => true), copy c c)") == []


def test_existential_may_not_capture_later_constant():
    p = load("kind i type.\ntype q i -> i -> o.\nq X X.")
    assert answers(p, "sigma Y\\ pi x\\ q x Y") == []
    assert len(answers(p, "pi x\\ sigma Y\\ q x Y")) == 1


# -- state restoration -------------------------------------------------------


@pytest.mark.parametrize("name,query", QUERIES)
def test_exhaustion_restores_state(name, query):
    p = program(name)
    engine = Engine(p)
    q = p.query(query)
    goal, V, T = q.instantiate(0)
    before = snapshot([goal] + V)
    mark = engine.trail.mark()
    list(engine.run(goal, V, T, q))
    assert engine.trail.mark() == mark
    assert snapshot([goal] + V) == before


def test_abandoned_stream_restores_state():
    p = program("append.lp")
    engine = Engine(p)
    q = p.query("append L1 L2 (1 :: 2 :: nil)")
    goal, V, T = q.instantiate(0)
    before = snapshot([goal] + V)
    stream = engine.run(goal, V, T, q)
    next(stream)
    stream.close()
    assert engine.trail.mark() == 0
    assert snapshot([goal] + V) == before


# -- type levels -------------------------------------------------------------


@pytest.mark.parametrize("name,query", QUERIES)
def test_type_levels_agree(name, query):
    results = {}
    for level in ("none", "skeleton", "full"):
        results[level] = [answer_key(a) for a in answers(program(name, level), query, 20)]
    assert results["none"] == results["full"] == results["skeleton"]


# -- limits and errors -------------------------------------------------------


def test_step_limit():
    p = load("type loop o.\nloop :- loop.")
    with pytest.raises(StepLimit):
        list(Engine(p, max_steps=500).solve("loop"))


def test_unknown_predicate_is_reported():
    p = load("type p, q o.\np :- q.")
    with pytest.raises(EngineError, match="no clauses for predicate q"):
        answers(p, "p")


def test_dynamic_predicate_without_base_clauses_just_fails():
    p = load("type p, q o.\np :- q => q.\nr :- q.\ntype r o.")
    assert len(answers(p, "p")) == 1
    assert answers(p, "r") == []


def test_max_answers():
    p = program("print.lp")
    assert len(list(solve(p, "print X", max_answers=2))) == 2


def test_answers_are_deterministic():
    p = program("prenex.lp")
    first = [a.bindings for a in answers(p, PRENEX_2)]
    for _ in range(3):
        assert [a.bindings for a in answers(p, PRENEX_2)] == first


def test_disjunction_in_query_and_body():
    p = load("type p, q, r o.\nq.\nr.\np :- q ; r.")
    assert len(answers(p, "p")) == 2
    assert len(answers(p, "q ; r")) == 2


def test_unification_goal():
    p = load("kind i type.\ntype f i -> i.\ntype a i.")
    (a,) = answers(p, "F a = f a")
    assert a.bindings == {}  # F a against f a is outside the pattern fragment
    assert a.residuals == [("F a", "f a")]
    (b,) = answers(p, "pi x\\ F x = f x")
    assert b.bindings == {"F": "x1\\ f x1"}
