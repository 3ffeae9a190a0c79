import json
from fractions import Fraction

import pytest

from conftest import A2, CORPUS
from weilzeta.fqm import (
    GramMatrix, LatticeError, UnsupportedLattice, build_fqm, complement_part, is_anisotropic, load_gram, p_part,
    signature, smith_normal_form,
)


def test_a2_invariants():
    D = build_fqm(A2)
    assert (D.order, D.level, signature(A2)) == (3, 3, 2)
    assert sorted(D.q(x) for x in D.elements()) == [0, Fraction(1, 3), Fraction(1, 3)]
    assert is_anisotropic(D)


def test_hyperbolic_plane_is_trivial():
    D = build_fqm([[0, 1], [1, 0]])
    assert D.order == 1 and D.level == 1


@pytest.mark.parametrize("name", sorted(CORPUS))
def test_order_is_determinant(name):
    g = GramMatrix(CORPUS[name])
    D = build_fqm(g)
    assert D.order == abs(g.determinant)
    # q is well defined: b(x, y) = q(x+y) - q(x) - q(y)
    els = D.elements()[:20]
    for x in els:
        for y in els:
            assert (D.q(D.add(x, y)) - D.q(x) - D.q(y)) % 1 == D.b(x, y)


def test_smith_normal_form():
    A = [[2, 4, 4], [-6, 6, 12], [10, -4, -16]]
    S, U, V = smith_normal_form(A)
    diag = [S[i][i] for i in range(3)]
    assert [abs(d) for d in diag] == [2, 6, 12]
    prod = [[sum(U[i][k] * A[k][l] * V[l][j] for k in range(3) for l in range(3)) for j in range(3)] for i in range(3)]
    assert prod == S


def test_primary_and_complement_parts():
    D = build_fqm(CORPUS["det15"])
    assert p_part(D, 3).order == 3 and p_part(D, 5).order == 5
    assert complement_part(D, 3).order == 5
    assert complement_part(D, 1).order == 15


def test_load_errors(tmp_path):
    with pytest.raises(LatticeError):
        load_gram('{"gram": [[2, 1], [0, 2]]}')
    with pytest.raises(LatticeError):
        load_gram('{"gram": [[1, 0], [0, 2]]}')
    with pytest.raises(UnsupportedLattice):
        load_gram('{"gram": [[2]]}')
    with pytest.raises(LatticeError):
        load_gram("not json {")
    f = tmp_path / "a2.json"
    f.write_text(json.dumps({"gram": A2}))
    assert load_gram(str(f)).entries == ((2, 1), (1, 2))
