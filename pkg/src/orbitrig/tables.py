"""Published count tables and their recomputation."""
from __future__ import annotations

from dataclasses import dataclass, field

from .symmetry import VARIANTS, enumerate_group, nosym_lattice_dim

TABLE_IDS = ("finite-3d", "plane-c2", "plane-flexible", "plane-fixed", "space-ci", "space-c2",
             "space-flexible", "space-fixed", "lattice-params")

TITLES = {
    "finite-3d": "Impact of 3-space point groups on finite counts",
    "plane-c2": "Plane lattice deformations with C2",
    "plane-flexible": "Added flexibility, fully flexible 2-D lattice",
    "plane-fixed": "Added flexibility, fixed 2-D lattice",
    "space-ci": "3-D lattice deformations with Ci",
    "space-c2": "3-D lattice deformations with C2",
    "space-flexible": "Added flexibility, fully flexible 3-D lattice",
    "space-fixed": "Added flexibility, fixed 3-D lattice",
    "lattice-params": "Lattice deformation parameters without symmetry",
}

# Published rows, verbatim.  e0 is the published offset in e0 = d v0 + offset.
# Group-table rows: (schoenflies, hermann-mauguin as printed, orbifold, k, t, ell, e0 offset, f)
PLANE_FLEXIBLE = [
    ("C1", "1", "o", 1, 2, 3, 1, 0),
    ("C2", "2", "2222", 2, 0, 3, 1, 2),
    ("C2v", "2m", "2*22", 4, 0, 2, 1, 1),
    ("Cs", "m", "**", 2, 1, 2, 1, 0),
    ("C2v", "2/m", "*2222", 4, 0, 2, 1, 1),
    ("C4", "4", "442", 4, 0, 1, 1, 0),
    ("C4v", "4m", "*442", 4, 0, 1, 1, 0),
]

PLANE_FIXED = [
    ("C1", "1", "o", 1, 2, 0, -2, 0),
    ("C2", "2", "2222", 2, 0, 0, -1, 1),
    ("C2v", "2m", "2*22", 4, 0, 0, 0, 0),
    ("Cs", "m", "**", 2, 1, 0, -1, 0),
]

SPACE_FLEXIBLE = [
    ("C1", "1", "11", 1, 3, 6, 3, 0),
    ("Ci", "-1", "1x", 2, 0, 6, 2, 4),
    ("C2", "2", "22", 2, 1, 4, 2, 1),
    ("Cs", "m", "1*", 2, 2, 4, 2, 0),
    ("C2h", "2/m", "2*", 4, 0, 4, 1, 2),
    ("C2v", "222", "*22", 4, 1, 3, 1, 1),
    ("D2", "mm2", "222", 4, 0, 3, 1, 2),
    ("D2h", "mmm", "*222", 8, 0, 3, 1, 2),
    ("C4", "4", "44", 4, 1, 2, 1, 0),
    ("S4", "-2", "2x", 4, 0, 2, 1, 1),
    ("C4h", "4/m", "4*", 8, 0, 2, 1, 1),
    ("C4v", "4mm", "*44", 8, 1, 2, 1, 0),
    ("D2d", "-42m", "2*2", 8, 0, 2, 1, 1),
    ("D4", "422", "422", 8, 0, 2, 1, 1),
    ("D4h", "4/mmm", "*422", 16, 0, 2, 1, 1),
    ("C3", "3", "33", 3, 1, 2, 1, 0),
    ("S6", "-3", "3x", 6, 0, 2, 1, 1),
    ("D3", "32", "322", 6, 0, 2, 1, 1),
    ("C3v", "3m", "*33", 6, 1, 2, 1, 0),
    ("D3d", "-3m", "2*3", 12, 0, 2, 1, 1),
    ("T", "23", "332", 12, 0, 1, 1, 0),
    ("Th", "m-3", "3*2", 24, 0, 1, 1, 0),
    ("Td", "-43m", "*332", 24, 0, 1, 1, 0),
    ("O", "432", "432", 24, 0, 1, 1, 0),
    ("Oh", "m-3m", "*432", 48, 0, 1, 1, 0),
]

SPACE_FIXED = [
    ("C1", "1", "11", 1, 3, 0, -3, 0),
    ("Ci", "-1", "1x", 2, 0, 0, -1, 1),
    ("C2", "2", "22", 2, 1, 0, -1, 0),
    ("Cs", "m", "1*", 2, 2, 0, -1, -1),
    ("C2h", "2/m", "2*", 4, 0, 0, 0, 0),
    ("C2v", "222", "*22", 4, 1, 0, 0, -1),
    ("D2", "mm2", "222", 4, 0, 0, 0, 0),
    ("D2h", "mmm", "*222", 8, 0, 0, 0, 0),
    ("C4", "4", "44", 4, 1, 0, 0, -1),
    ("S4", "-2", "2x", 4, 0, 0, 0, 0),
]

# Variant-table rows: (variant, k, t, ell, e0 offset, f)
PLANE_C2 = [
    ("flexible", 2, 0, 3, 1, 2),
    ("distortional", 2, 0, 2, 0, 2),
    ("hydrostatic", 2, 0, 1, -1, 2),
    ("fixed", 2, 0, 0, -1, 1),
]

SPACE_CI = [
    ("flexible", 2, 0, 6, 2, 4),
    ("distortional", 2, 0, 5, 1, 4),
    ("scaling", 2, 0, 3, 0, 3),
    ("hydrostatic", 2, 0, 1, -1, 2),
    ("fixed", 2, 0, 0, -1, 1),
]

SPACE_C2 = [
    ("flexible", 2, 1, 4, 1, 2),
    ("distortional", 2, 1, 3, 0, 2),
    ("scaling", 2, 1, 3, 0, 2),
    ("hydrostatic", 2, 1, 1, -1, 1),
    ("fixed", 2, 1, 0, -1, 0),
]

# Finite point groups in 3-space: (schoenflies, k, triv, e0 offset, f)
FINITE_3D = [
    ("C1", 1, 6, -6, 0),
    ("Ci", 2, 3, -3, 0),
    ("C2", 2, 2, -3, 1),
    ("Cs", 2, 3, -3, 0),
    ("C2h", 4, 1, -1, 0),
    ("D2h", 8, 0, 0, 0),
    ("C4", 4, 2, -1, -1),
    ("C3", 3, 2, -2, 0),
]

# (variant, 2-D, 3-D)
LATTICE_PARAMS = [
    ("flexible", 3, 6),
    ("distortional", 2, 5),
    ("scaling", 2, 3),
    ("hydrostatic", 1, 1),
    ("fixed", 0, 0),
]

GROUP_TABLES = {
    "plane-flexible": (2, "flexible", PLANE_FLEXIBLE),
    "plane-fixed": (2, "fixed", PLANE_FIXED),
    "space-flexible": (3, "flexible", SPACE_FLEXIBLE),
    "space-fixed": (3, "fixed", SPACE_FIXED),
}

VARIANT_TABLES = {
    "plane-c2": (2, "C2", PLANE_C2),
    "space-ci": (3, "Ci", SPACE_CI),
    "space-c2": (3, "C2", SPACE_C2),
}

# The rows where recomputation disagrees with the printed table.
DOCUMENTED_DISCREPANCIES = frozenset({
    ("plane-c2", "hydrostatic"),
    ("space-c2", "flexible"),
    ("space-c2", "distortional"),
    ("space-flexible", "C2h"),
})


@dataclass
class TableRow:
    table: str
    key: str
    computed: dict
    published: dict
    mismatched: list = field(default_factory=list)
    notes: list = field(default_factory=list)     # disagreements in descriptive columns (k, t, ell)

    @property
    def discrepancy(self) -> bool:
        return bool(self.mismatched)


def _row_key(name: str, orbifold: str, rows) -> str:
    if sum(1 for r in rows if r[0] == name) > 1:
        return f"{name} {orbifold}"
    return name


# columns whose disagreement counts as a discrepancy; the rest are reported as notes
COUNT_COLUMNS = ("e0_offset", "f", "triv", "2d", "3d")


def _compare(table: str, key: str, computed: dict, published: dict) -> TableRow:
    bad = [k for k in published if k in computed and computed[k] != published[k]]
    counts = [k for k in bad if k in COUNT_COLUMNS]
    notes = [k for k in bad if k not in COUNT_COLUMNS]
    return TableRow(table, key, computed, published, counts, notes)


def reproduce_table(table_id: str) -> list[TableRow]:
    from .analysis import finite_symmetric_minimal, maxwell_combined

    if table_id not in TABLE_IDS:
        raise KeyError(f"unknown table {table_id!r}; known: {', '.join(TABLE_IDS)}")
    out = []
    if table_id in GROUP_TABLES:
        d, variant, rows = GROUP_TABLES[table_id]
        for name, hm, orb, k, t, ell, off, f in rows:
            pred = maxwell_combined(enumerate_group(name, d), variant=variant)
            pred_dict = {"k": pred.k, "t": pred.t, "ell": pred.ell, "e0_offset": pred.e0_offset,
                         "f": pred.f_computed}
            pub = {"k": k, "t": t, "ell": ell, "e0_offset": off, "f": f}
            if variant == "fixed":
                pub.pop("ell")
            out.append(_compare(table_id, _row_key(name, orb, rows), pred_dict, pub))
    elif table_id in VARIANT_TABLES:
        d, name, rows = VARIANT_TABLES[table_id]
        group = enumerate_group(name, d)
        for variant, k, t, ell, off, f in rows:
            pred = maxwell_combined(group, variant=variant)
            pred_dict = {"k": pred.k, "t": pred.t, "ell": pred.ell, "e0_offset": pred.e0_offset,
                         "f": pred.f_computed}
            pub = {"k": k, "t": t, "ell": ell, "e0_offset": off, "f": f}
            out.append(_compare(table_id, variant, pred_dict, pub))
    elif table_id == "finite-3d":
        for name, k, triv, off, f in FINITE_3D:
            group = enumerate_group(name, 3)
            c_triv, c_off, c_f = finite_symmetric_minimal(group)
            out.append(_compare(table_id, name, {"k": group.order, "triv": c_triv, "e0_offset": c_off, "f": c_f},
                                {"k": k, "triv": triv, "e0_offset": off, "f": f}))
    else:
        for variant, two, three in LATTICE_PARAMS:
            comp = {"2d": nosym_lattice_dim(variant, 2), "3d": nosym_lattice_dim(variant, 3)}
            out.append(_compare(table_id, variant, comp, {"2d": two, "3d": three}))
    return out


def discrepancies(table_id: str) -> set[tuple[str, str]]:
    return {(r.table, r.key) for r in reproduce_table(table_id) if r.discrepancy}


def documented_for(table_id: str) -> set[tuple[str, str]]:
    return {x for x in DOCUMENTED_DISCREPANCIES if x[0] == table_id}


def diff_report(table_id: str) -> tuple[str, bool]:
    """Text report and whether the discrepancy set equals the documented one."""
    rows = reproduce_table(table_id)
    found = {(r.table, r.key) for r in rows if r.discrepancy}
    expected = documented_for(table_id)
    lines = [f"# {table_id}: {TITLES[table_id]}"]
    for r in rows:
        status = "MISMATCH" if r.discrepancy else "ok"
        detail = ", ".join(f"{k}: computed {r.computed[k]} published {r.published[k]}" for k in r.mismatched)
        lines.append(f"{r.key:14s} {status}" + (f"  ({detail})" if detail else ""))
        for k in r.notes:
            lines.append(f"{'':14s} note: printed {k} {r.published[k]}, catalog {r.computed[k]}")
    unexpected = sorted(found - expected)
    missing = sorted(expected - found)
    for t, k in unexpected:
        lines.append(f"UNDOCUMENTED discrepancy: {t} {k}")
    for t, k in missing:
        lines.append(f"documented discrepancy not reproduced: {t} {k}")
    ok = not unexpected and not missing
    lines.append(f"discrepancies: {len(found)} (documented {len(expected)}) -> {'as documented' if ok else 'UNEXPECTED'}")
    return "\n".join(lines) + "\n", ok


def published_f(name: str, d: int, variant: str) -> dict[str, int]:
    """All published f values for (group, dimension, variant), keyed by table id."""
    out: dict[str, int] = {}
    for tid, (td, tv, rows) in GROUP_TABLES.items():
        if td == d and tv == variant:
            for r in rows:
                if r[0] == name:
                    out.setdefault(tid if sum(1 for x in rows if x[0] == name) == 1 else f"{tid}:{r[2]}", r[7])
    for tid, (td, gname, rows) in VARIANT_TABLES.items():
        if td == d and gname == name:
            for r in rows:
                if r[0] == variant:
                    out[tid] = r[5]
    return out
