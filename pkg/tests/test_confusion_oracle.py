"""Confusion detectors against brute-force search over small multicontexts.

Vertical and uniform searches agree exactly at 8 nodes on every algebra of
the catalogue.  Some horizontal witnesses need 8 nodes, which is too slow
to enumerate for the whole catalogue here, so the horizontal brute force
runs at 6 nodes and only the implication brute ⇒ detector is asserted.
The exact comparison at 8 nodes runs in the acceptance tests on the
smaller catalogue.
"""
import pytest

from forestalg.algebra import generate_algebra
from forestalg.classify import (has_horizontal_confusion, horizontal_confusion,
                                uniform_vertical_confusion, vertical_confusion)
from oracles import brute_horizontal, brute_vertical, catalogue

CATALOGUE = [generate_algebra(add, 0, V)[0] for add, V in catalogue(3, 8)]


def test_catalogue_size():
    assert len(CATALOGUE) == 234


@pytest.mark.parametrize("A", CATALOGUE, ids=lambda A: f"H{A.n_h}V{A.n_v}")
def test_detectors_vs_brute(A):
    w = vertical_confusion(A)
    assert (w is not None) == (brute_vertical(A, 8) is not None)
    if w is not None:
        assert w.replay(A)
    u = uniform_vertical_confusion(A)
    assert (u is not None) == (brute_vertical(A, 8, uniform=True) is not None)
    if u is not None:
        assert u.replay(A) and w is not None

    hw = horizontal_confusion(A)
    if hw is not None:
        assert hw.replay(A)
        assert has_horizontal_confusion(hw.hom(A), hw.multicontext, hw.subset)
    if brute_horizontal(A, 6) is not None:
        assert hw is not None
