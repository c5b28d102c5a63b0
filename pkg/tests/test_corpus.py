import json

import pytest

from orbitrig.analysis import lift_residuals, motion_space
from orbitrig.corpus import DEMO_DIR, DEMOS, all_entries, check_entry, manifest


@pytest.mark.parametrize("entry", all_entries(), ids=lambda e: e.id)
def test_entry_meets_expectations(entry):
    assert check_entry(entry) == []


@pytest.mark.parametrize("entry", DEMOS, ids=lambda e: e.id)
@pytest.mark.parametrize("seed", [1, 2, 3])
def test_demo_graphs_are_generic_in_the_seed(entry, seed):
    assert check_entry(entry, seed) == []


def test_manifest_on_disk_is_current():
    on_disk = json.loads((DEMO_DIR / "manifest.json").read_text())
    assert on_disk == json.loads(json.dumps(manifest()))


def test_every_expectation_has_provenance():
    for e in DEMOS:
        for key in e.expected:
            assert e.provenance[key] in {"PAPER", "TRIVIAL", "DERIVED"}


@pytest.mark.parametrize("entry", all_entries(), ids=lambda e: e.id)
def test_kernel_lift_is_exact(entry):
    fw = entry.load()
    ms = motion_space(fw)
    for vec in ms.nontrivial_basis:
        res = lift_residuals(fw, vec)
        assert res and not any(res)
