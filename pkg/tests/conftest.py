"""Shared session fixtures: the expensive pipeline objects are built once.

Levels 3 and 4 of the mesh hierarchy are the validation workhorses; the
series basis is evaluated on both.  The Green kernel is only needed at
level 3 (the integral-path checks), which keeps memory modest.
"""

import numpy as np
import pytest

from wpcurv import curvature, qdiff, surface, wedge
from wpcurv.fuchsian import enumerate_words, octagon_group


@pytest.fixture(scope="session")
def group():
    return octagon_group(2)


@pytest.fixture(scope="session")
def words8(group):
    return enumerate_words(group, 8, norm_cap=400.0)


@pytest.fixture(scope="session")
def basis(group, words8):
    return qdiff.build_qdiff_basis(group, 8, word_set=words8)


@pytest.fixture(scope="session")
def surf3(group):
    return surface.build_mesh(group, 3)


@pytest.fixture(scope="session")
def surf4(group):
    return surface.build_mesh(group, 4)


def _pipeline(basis, surf):
    fields_raw = [qdiff.beltrami_from_qdiff(q, surf) for q in basis]
    gram_raw = qdiff.gram_matrix(fields_raw, surf)
    fields, gram, C = qdiff.orthonormalize(fields_raw, gram_raw)
    P = curvature.pairing_table(fields, surf)
    R = curvature.curvature_tensor(P)
    Q = wedge.assemble_Q(R)
    return {
        "fields_raw": fields_raw,
        "gram_raw": gram_raw,
        "fields": fields,
        "gram": gram,
        "cholesky": C,
        "pairings": P,
        "tensor": R,
        "Q": Q,
    }


@pytest.fixture(scope="session")
def pipe3(basis, surf3):
    return _pipeline(basis, surf3)


@pytest.fixture(scope="session")
def pipe4(basis, surf4):
    return _pipeline(basis, surf4)


@pytest.fixture(scope="session")
def green3(surf3):
    return surface.green_kernel(surf3)


@pytest.fixture(scope="session")
def jmat3():
    return wedge.j_wedge_matrix(3)
