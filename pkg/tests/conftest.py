import pytest

# even lattices of even rank; name -> Gram matrix
CORPUS = {
    "A2": [[2, 1], [1, 2]],
    "det7": [[2, 1], [1, 4]],
    "det11": [[2, 1], [1, 6]],
    "det15": [[4, 1], [1, 4]],
    "A4": [[2, -1, 0, 0], [-1, 2, -1, 0], [0, -1, 2, -1], [0, 0, -1, 2]],
    "A2+det7": [[2, 1, 0, 0], [1, 2, 0, 0], [0, 0, 2, 1], [0, 0, 1, 4]],
    "A2+A2": [[2, 1, 0, 0], [1, 2, 0, 0], [0, 0, 2, 1], [0, 0, 1, 2]],
}

A2 = CORPUS["A2"]

# |D| = 19: every prime up to 13 is coprime to the level
DET19 = [[2, 1], [1, 10]]


@pytest.fixture
def corpus():
    return CORPUS
