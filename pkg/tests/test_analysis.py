import numpy as np
import pytest

from orbitrig.analysis import (
    GLIDE_EXAMPLE_NOTE,
    InstabilityError,
    adjusted_counts,
    finite_symmetric_minimal,
    higher_dim_flex,
    lift_residuals,
    maxwell_combined,
    maxwell_finite,
    maxwell_finite_symmetric,
    maxwell_periodic,
    motion_space,
    rank_float,
)
from orbitrig.corpus import random_gain_graph
from orbitrig.framework import random_generic_placement
from orbitrig.symmetry import SymmetryError, enumerate_group, lattice_family_for
from orbitrig.tables import DOCUMENTED_DISCREPANCIES, TABLE_IDS, diff_report, discrepancies, reproduce_table


def test_plain_counts():
    assert maxwell_finite(2, 4, 4) == 1
    assert maxwell_finite(3, 6, 12) == 0
    assert maxwell_periodic(2, 2, 5, "flexible") == 0
    assert maxwell_periodic(2, 2, 2, "fixed") == 0
    assert maxwell_periodic(3, 1, 0, "fixed") == 0


def test_quad_symmetric_count():
    assert maxwell_finite_symmetric(enumerate_group("C2", 2), v0=2, e0=2) == 1


@pytest.mark.parametrize("name,triv,offset,f", [("C1", 6, -6, 0), ("Ci", 3, -3, 0), ("C2", 2, -3, 1),
                                                 ("Cs", 3, -3, 0), ("C2h", 1, -1, 0), ("D2h", 0, 0, 0),
                                                 ("C4", 2, -1, -1), ("C3", 2, -2, 0)])
def test_finite_minimal_counts(name, triv, offset, f):
    assert finite_symmetric_minimal(enumerate_group(name, 3)) == (triv, offset, f)


def test_combined_examples():
    ci = maxwell_combined("Ci", 3, "flexible")
    assert (ci.ell, ci.t, ci.e0_offset, ci.f_computed) == (6, 0, 2, 4)
    assert ci.e0_expression() == "3v0+2"
    c2 = maxwell_combined("C2", 2, "fixed")
    assert c2.f_computed == 1
    pred = maxwell_combined("C2", 3, "flexible")
    assert pred.discrepancy_flag and pred.f_published != pred.f_computed


def test_combined_with_explicit_counts():
    pred = maxwell_combined("C2", 2, "flexible", v0=3, e0=7)
    assert pred.f_computed == 2
    pred = maxwell_combined("Cs", 2, "flexible", v0=3, e0=7)
    assert pred.f_computed == 0
    with pytest.raises(ValueError):
        maxwell_combined("Cs", 2, "flexible", e0=7)


@pytest.mark.parametrize("table_id", TABLE_IDS)
def test_table_discrepancies_are_documented(table_id):
    assert discrepancies(table_id) == {x for x in DOCUMENTED_DISCREPANCIES if x[0] == table_id}
    text, ok = diff_report(table_id)
    assert ok and "as documented" in text


def test_table_row_counts():
    sizes = {t: len(reproduce_table(t)) for t in TABLE_IDS}
    assert sizes["plane-flexible"] == 7 and sizes["plane-fixed"] == 4
    assert sizes["space-ci"] == 5 and sizes["space-flexible"] == 25 and sizes["space-fixed"] == 10
    assert sizes["finite-3d"] == 8


def test_adjusted_examples():
    assert adjusted_counts("Ci", 3, "flexible", fixed_bar_orbits=[["i"]]).f_computed == 4
    assert adjusted_counts("Cs", 3, "flexible", v0=2, fixed_joint_specs=[["s"]]).f_computed == 1
    p = adjusted_counts("Cs", 3, "flexible", v0=3, fixed_joint_specs=[["s"], ["s"]], e_offset=4)
    assert p.f_computed == 1 and p.stress_lower_bound >= 1


def test_adjusted_rejects_non_subgroups():
    with pytest.raises(SymmetryError):
        adjusted_counts("C2v", 3, fixed_joint_specs=[["C2", "sx", "sy", "nonsense"]])
    with pytest.raises(SymmetryError):
        adjusted_counts("Cs", 2, v0=1, fixed_joint_specs=[["s"], ["s"]])


def test_adjusted_without_fixed_elements_matches_plain():
    for name, d in [("C2", 2), ("Ci", 3), ("D2h", 3)]:
        assert adjusted_counts(name, d).f_computed == maxwell_combined(name, d).f_computed


def test_higher_dimension_formulas():
    assert [higher_dim_flex("Ci", 3), higher_dim_flex("Cs", 3), higher_dim_flex("Ci", 4),
            higher_dim_flex("Cs", 4)] == [4, 0, 7, 1]
    for d in (2, 3, 4, 5):
        for name in ("Ci", "Cs"):
            if d == 2 and name == "Ci":
                continue
            assert maxwell_combined(name, d, "flexible").f_computed == higher_dim_flex(name, d)


@pytest.mark.parametrize("name,seed", [("Ci", 0), ("Ci", 1), ("Ci", 2), ("Cs", 0), ("Cs", 1)])
def test_four_dimensional_brute_force(name, seed):
    g = enumerate_group(name, 4)
    fam = lattice_family_for(g)
    pred = maxwell_combined(g, variant="flexible")
    graph = random_gain_graph(g, 2, 8 + pred.e0_offset, seed)
    fw = random_generic_placement(graph, fam, "flexible", seed)
    assert motion_space(fw).flex_dimension == higher_dim_flex(name, 4)


def test_glide_note():
    assert GLIDE_EXAMPLE_NOTE["f"] == 0 and GLIDE_EXAMPLE_NOTE["ell"] - GLIDE_EXAMPLE_NOTE["t"] - 2 == 0


def test_rank_float_matches_exact_and_detects_instability():
    from orbitrig.corpus import demo_by_id
    ms = motion_space(demo_by_id("figure-9").load())
    assert rank_float(ms.matrix.entries) == ms.rank
    assert rank_float(lambda s: np.eye(3) * (1 if s != 2 else 0), seeds=[1, 3]) == 3
    with pytest.raises(InstabilityError):
        rank_float(lambda s: np.diag([1.0, 1.0, 0.0 if s == 2 else 1.0]), seeds=[1, 2])


def test_lift_of_trivial_motion_is_zero_on_rows():
    from orbitrig.corpus import demo_by_id
    fw = demo_by_id("figure-5d").load()
    ms = motion_space(fw)
    for v in ms.kernel_basis:
        res = lift_residuals(fw, v)
        assert res and not any(res)
