from fractions import Fraction

import pytest

from orbitrig.exact import mat_mul, rank_exact, transpose
from orbitrig.symmetry import (
    CATALOG_ORDERS,
    Gain,
    SymmetryError,
    catalog_names,
    compose,
    enumerate_group,
    fixed_subspace,
    inverse,
    lattice_deformation_space,
    lattice_family_for,
    make_family,
    symmetric_lattice_dim,
    symmetric_rigid_motions,
    trivial_motion_dim_finite,
)

ALL_GROUPS = [(n, 3) for n in catalog_names(3)] + [(n, 2) for n in catalog_names(2)]


@pytest.mark.parametrize("name,d", ALL_GROUPS)
def test_catalog_closure_and_orthogonality(name, d):
    g = enumerate_group(name, d)
    assert g.order == CATALOG_ORDERS[d][name]
    mats = {e.matrix for e in g.elements}
    assert len(mats) == g.order
    eye = tuple(tuple(int(i == j) for j in range(d)) for i in range(d))
    for e in g.elements:
        m = [list(r) for r in e.matrix]
        assert mat_mul(m, transpose(m)) == [list(r) for r in eye]
        for f in g.elements:
            prod = tuple(tuple(x for x in row) for row in mat_mul(m, [list(r) for r in f.matrix]))
            assert prod in mats
    labels = [e.label for e in g.elements]
    assert len(set(labels)) == len(labels)


@pytest.mark.parametrize("name,d", ALL_GROUPS)
def test_family_compatible_and_injective_gram(name, d):
    g = enumerate_group(name, d)
    fam = lattice_family_for(g)
    assert fam.compatible_with(g)
    for theta in fam.sample_thetas():
        assert fam.is_valid(theta)
        lat = fam.basis_fn(theta)
        for e in g.elements:
            m = fam.integer_conjugator(e.matrix, theta)
            assert all(x.denominator == 1 for row in m for x in row)
    # the Gram matrix separates parameters: distinct thetas give distinct shapes
    a, b = fam.sample_thetas()[:2]
    gram = lambda t: mat_mul(fam.basis_fn(t), transpose(fam.basis_fn(t)))
    assert gram(a) != gram(b)


def test_group_examples():
    ci = enumerate_group("Ci", 3)
    assert {e.matrix for e in ci.elements} == {((1, 0, 0), (0, 1, 0), (0, 0, 1)), ((-1, 0, 0), (0, -1, 0), (0, 0, -1))}
    c2h = enumerate_group("C2h", 3)
    diag = lambda *x: tuple(tuple(x[i] if i == j else 0 for j in range(3)) for i in range(3))
    assert {e.matrix for e in c2h.elements} == {diag(1, 1, 1), diag(-1, -1, 1), diag(1, 1, -1), diag(-1, -1, -1)}
    c3 = enumerate_group("C3", 3)
    cyc = ((0, 0, 1), (1, 0, 0), (0, 1, 0))
    assert cyc in {e.matrix for e in c3.elements} and c3.order == 3


def test_ci_in_plane_is_reported_as_c2():
    with pytest.raises(SymmetryError, match="C2"):
        enumerate_group("Ci", 2)
    with pytest.raises(SymmetryError):
        enumerate_group("Oh9", 3)


def test_compose_and_inverse_examples():
    g2 = enumerate_group("C2", 2)
    c2 = g2.index_by_label("C2")
    assert compose(Gain((1, 0), c2), Gain((0, 1), c2), g2) == Gain((1, -1), 0)
    h = Gain((2, -5), c2)
    assert compose(Gain((0, 0), 0), h, g2) == h
    assert inverse(Gain((0, 1), c2), g2) == Gain((0, 1), c2)
    assert inverse(Gain((3, 0), 0), g2) == Gain((-3, 0), 0)
    ci = enumerate_group("Ci", 3)
    i = ci.index_by_label("i")
    assert compose(Gain((1, 2, 3), i), Gain((1, 0, 0), i), ci) == Gain((0, 2, 3), 0)


def test_c4_inverse_example():
    c4 = enumerate_group("C4", 3)
    g = Gain((1, 0, 0), c4.index_by_label("C4"))
    inv = inverse(g, c4)
    assert inv == Gain((0, -1, 0), c4.index_by_label("C4^3"))
    assert compose(g, inv, c4).is_identity() and compose(inv, g, c4).is_identity()


@pytest.mark.parametrize("name,d", ALL_GROUPS)
def test_gain_group_axioms(name, d):
    g = enumerate_group(name, d)
    gains = [Gain(tuple((k * 7 + j) % 3 - 1 for j in range(d)), k % g.order) for k in range(4)]
    for a in gains:
        assert compose(a, inverse(a, g), g).is_identity()
        for b in gains:
            for c in gains:
                assert compose(compose(a, b, g), c, g) == compose(a, compose(b, c, g), g)


def test_fixed_subspace_examples():
    assert len(fixed_subspace(enumerate_group("Cs", 3))) == 2
    assert fixed_subspace(enumerate_group("Ci", 3)) == []
    basis = fixed_subspace(enumerate_group("C2", 3))
    assert len(basis) == 1 and rank_exact([basis[0], [0, 0, 1]]) == 1


@pytest.mark.parametrize("name,triv", [("C1", 6), ("Ci", 3), ("C2", 2), ("Cs", 3), ("C2h", 1),
                                        ("D2h", 0), ("C4", 2), ("C3", 2)])
def test_triv_matches_table(name, triv):
    assert trivial_motion_dim_finite(enumerate_group(name, 3)) == triv


def test_triv_plane_half_turn():
    assert trivial_motion_dim_finite(enumerate_group("C2", 2)) == 1


def test_symmetric_rigid_motions_commute():
    # velocity field x -> A x + t is symmetric iff s A = A s and s t = t
    for name in ("C2", "Cs", "C3", "D2d"):
        g = enumerate_group(name, 3)
        for a, t in symmetric_rigid_motions(g):
            for e in g.elements:
                s = [list(r) for r in e.matrix]
                assert mat_mul(s, a) == mat_mul(a, s)
                assert [sum(s[i][j] * t[j] for j in range(3)) for i in range(3)] == list(t)


def test_family_examples():
    fam = lattice_family_for(enumerate_group("C2", 3))
    assert (fam.name, fam.parameter_count) == ("monoclinic", 4)
    fam = lattice_family_for(enumerate_group("Ci", 3))
    assert (fam.name, fam.parameter_count) == ("triclinic", 6)
    fam = lattice_family_for(enumerate_group("C4", 2))
    assert (fam.name, fam.parameter_count) == ("square", 1)


def test_deformation_dimensions():
    ci = enumerate_group("Ci", 3)
    tri = lattice_family_for(ci)
    theta = tri.sample_thetas()[0]
    assert lattice_deformation_space(tri, theta, "scaling").dimension == 3
    mono = lattice_family_for(enumerate_group("C2", 3))
    assert lattice_deformation_space(mono, mono.sample_thetas()[0], "scaling").dimension == 3
    for name in ("triclinic", "cubic", "rhombohedral"):
        fam = make_family(name, 3)
        assert lattice_deformation_space(fam, fam.sample_thetas()[1], "fixed").dimension == 0
        assert lattice_deformation_space(fam, fam.sample_thetas()[1], "hydrostatic").dimension == 1
    assert symmetric_lattice_dim(ci, "distortional") == 5


def test_distortional_preserves_volume_to_first_order():
    fam = make_family("triclinic", 3)
    theta = fam.sample_thetas()[2]
    space = lattice_deformation_space(fam, theta, "distortional")
    from orbitrig.exact import inverse as minv
    inv = minv(fam.basis_fn(theta))
    for b in space.matrices():
        prod = mat_mul(inv, b)
        assert sum(prod[i][i] for i in range(3)) == 0
