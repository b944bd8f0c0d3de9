import os
import sys

from hypothesis import HealthCheck, settings
from hypothesis import strategies as st

sys.path.insert(0, os.path.dirname(__file__))

from forestalg.terms import Tree  # noqa: E402

settings.register_profile("default", deadline=None, max_examples=60,
                          suppress_health_check=[HealthCheck.too_slow])
settings.load_profile(os.environ.get("HYPOTHESIS_PROFILE", "default"))


def forests(symbols=("a", "b"), max_leaves=6, holes=False):
    """Strategy for small forests, optionally with holes among the leaves."""
    leaf_labels = list(symbols) + (["_"] if holes else [])
    leaf = st.sampled_from(leaf_labels).map(lambda s: Tree(s, ()))
    trees = st.recursive(
        leaf,
        lambda kids: st.builds(Tree, st.sampled_from(list(symbols)),
                               st.lists(kids, min_size=1, max_size=3).map(tuple)),
        max_leaves=max_leaves)
    return st.lists(trees, max_size=3).map(tuple)


def pytest_terminal_summary(terminalreporter):
    mod = sys.modules.get("test_acceptance")
    if mod is None or not mod.RESULTS:
        return
    terminalreporter.section("acceptance criteria")
    for number in sorted(mod.RESULTS):
        terminalreporter.write_line(mod.RESULTS[number])
