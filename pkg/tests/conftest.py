"""Shared fixtures and hypothesis strategies."""
import pytest
from hypothesis import strategies as st

from satlab import (And, Eq, Exists, Forall, GapNumber, Not, One, Or, Plus,
                    Times, Var, Zero, make_universe, std)

VARS = ["v0", "v1", "v2", "v3", "x", "y"]


@pytest.fixture
def uni():
    return make_universe(("g1", "g2", "g3"))


@pytest.fixture
def uni2():
    return make_universe(("g1", "g2"))


def terms(max_leaves=4):
    leaf = st.one_of(st.builds(Zero), st.builds(One),
                     st.sampled_from(VARS).map(Var))
    return st.recursive(
        leaf,
        lambda t: st.builds(Plus, t, t) | st.builds(Times, t, t),
        max_leaves=max_leaves)


def formulas(max_leaves=5):
    atom = st.builds(Eq, terms(3), terms(3))
    return st.recursive(
        atom,
        lambda f: st.one_of(
            st.builds(Not, f),
            st.builds(Or, f, f),
            st.builds(And, f, f),
            st.builds(Exists, st.sampled_from(VARS), f),
            st.builds(Forall, st.sampled_from(VARS), f)),
        max_leaves=max_leaves)


def gap_numbers(labels=("g1", "g2", "g3"), max_offset=5):
    # negative offsets are fine inside a Z-gap, not on the standard segment
    nonstd = st.builds(GapNumber, st.sampled_from(tuple(labels)),
                       st.integers(-max_offset, max_offset))
    return st.integers(0, max_offset).map(std) | nonstd


@pytest.fixture
def gn_std():
    return std
