import pytest
from hypothesis import given, settings
from hypothesis import strategies as st

from oracles import brute_pareto
from morphsynth.errors import ValidationError
from morphsynth.model import MAXIMIZE, MINIMIZE
from morphsynth.pareto import dominates, nondominated, pareto_filter


def test_dominates():
    assert dominates((1, 2), (2, 2))
    assert not dominates((1, 2), (1, 2))
    assert dominates((3, 1), (2, 1), MAXIMIZE)
    assert dominates((3, 1), (2, 2), [MAXIMIZE, MINIMIZE])
    assert not dominates((1, 3), (2, 1))


def test_duplicates_and_order():
    items = [("a", (2, 2)), ("b", (1, 3)), ("c", (2, 2)), ("d", (3, 3))]
    assert pareto_filter(items) == ["a", "b", "c"]
    assert pareto_filter(items, method="scan") == ["a", "b", "c"]


def test_errors():
    with pytest.raises(ValidationError):
        pareto_filter([])
    with pytest.raises(ValidationError):
        pareto_filter([("a", (1, 2)), ("b", (1,))])
    with pytest.raises(ValidationError):
        pareto_filter([("a", (1, 2, 3))], method="sweep")
    with pytest.raises(ValidationError):
        pareto_filter([("a", (1,))], method="magic")


pairs = st.lists(st.tuples(st.integers(0, 6), st.integers(0, 6)), min_size=1, max_size=25)


@settings(max_examples=60, deadline=None)
@given(pairs, st.lists(st.sampled_from([MINIMIZE, MAXIMIZE]), min_size=2, max_size=2))
def test_sweep_equals_scan(vectors, dirs):
    items = list(enumerate(vectors))
    assert pareto_filter(items, dirs, "sweep") == pareto_filter(items, dirs, "scan")


@settings(max_examples=60, deadline=None)
@given(pairs)
def test_nondominated_generic(vectors):
    keep = nondominated(vectors, lambda a, b: dominates(a, b))
    assert keep == brute_pareto(vectors)
