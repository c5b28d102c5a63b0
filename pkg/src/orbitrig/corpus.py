"""Demo frameworks and minimal synthetic instances."""
from __future__ import annotations

import json
import random
from dataclasses import dataclass, field
from fractions import Fraction
from math import comb
from pathlib import Path

from .framework import (
    Edge,
    FrameworkError,
    OrbitFramework,
    OrbitGraph,
    expand_patch,
    load,
    random_generic_placement,
    serialize,
)
from .symmetry import (
    Gain,
    PointGroup,
    compose,
    enumerate_group,
    inverse,
    lattice_family_for,
    make_family,
)

DEMO_DIR = Path(__file__).parent / "demos"
SYNTHETIC_DIR = DEMO_DIR / "synthetic"


def _edge(group: PointGroup, tail: int, head: int, n=None, label: str = "id") -> Edge:
    d = group.dimension
    return Edge(tail, head, Gain(tuple(n) if n is not None else (0,) * d, group.index_by_label(label)))


# ---------------------------------------------------------------------------
# graphs of the worked examples

def quad_c2_graph() -> OrbitGraph:
    """Half-turn symmetric four-bar: one plain edge and one edge through the rotation."""
    g = enumerate_group("C2", 2)
    return OrbitGraph(2, g, 2, (_edge(g, 1, 2), _edge(g, 1, 2, label="C2")))


def periodic_square_graph() -> OrbitGraph:
    g = enumerate_group("C1", 2)
    edges = (_edge(g, 1, 2), _edge(g, 2, 3), _edge(g, 3, 1, (1, 0)), _edge(g, 1, 4, (0, 1)),
             _edge(g, 4, 1), _edge(g, 4, 3))
    return OrbitGraph(2, g, 4, edges)


def two_vertex_graph() -> OrbitGraph:
    g = enumerate_group("C1", 2)
    edges = (_edge(g, 1, 2, (0, 0)), _edge(g, 1, 2, (0, 2)), _edge(g, 2, 1, (1, 0)),
             _edge(g, 2, 1, (1, 1)), _edge(g, 1, 1, (0, 1)))
    return OrbitGraph(2, g, 2, edges)


def halfturn_fixed_graph() -> OrbitGraph:
    g = enumerate_group("C2", 2)
    edges = (_edge(g, 1, 2), _edge(g, 2, 3), _edge(g, 1, 3, (-1, 0)),
             _edge(g, 2, 3, (0, 0), "C2"), _edge(g, 3, 1, (0, 1), "C2"))
    return OrbitGraph(2, g, 3, edges)


def halfturn_flexible_graph() -> OrbitGraph:
    g = enumerate_group("C2", 2)
    edges = (_edge(g, 1, 2), _edge(g, 2, 3), _edge(g, 3, 1), _edge(g, 1, 2, (0, 1)),
             _edge(g, 1, 2, (-1, 0), "C2"), _edge(g, 2, 1, (0, 0), "C2"), _edge(g, 3, 1, (0, 0), "C2"))
    return OrbitGraph(2, g, 3, edges)


def mirror_graph() -> OrbitGraph:
    g = enumerate_group("Cs", 2)
    edges = (_edge(g, 1, 2), _edge(g, 2, 3), _edge(g, 1, 3), _edge(g, 1, 3, (0, 0), "s"),
             _edge(g, 2, 1, (0, 0), "s"), _edge(g, 2, 1, (-1, 0), "s"), _edge(g, 1, 3, (0, 1)))
    return OrbitGraph(2, g, 3, edges)


def inversion_graph() -> OrbitGraph:
    g = enumerate_group("Ci", 3)
    gains = [((0, 0, 0), "id"), ((0, 0, 0), "i"), ((-1, 0, 0), "id"), ((0, 0, -1), "id"),
             ((0, 1, 0), "id"), ((-1, 0, 0), "i"), ((0, 1, 0), "i"), ((0, 0, -1), "i")]
    return OrbitGraph(3, g, 2, tuple(_edge(g, 1, 2, n, lab) for n, lab in gains))


# ---------------------------------------------------------------------------
# synthetic instances

def _is_involution(g: Gain, group: PointGroup) -> bool:
    sq = compose(g, g, group)
    return sq.is_identity()


def _edge_key(e: Edge, group: PointGroup):
    a = (e.tail, e.head, e.gain)
    rev = (e.head, e.tail, inverse(e.gain, group))
    return min(a, rev, key=lambda x: (x[0], x[1], x[2].translation, x[2].element))


def random_gain_graph(group: PointGroup, v0: int, e0: int, seed: int, periodic: bool = True,
                      max_tries: int = 10000) -> OrbitGraph:
    """Random gain graph with no fixed bars and no repeated bar orbits."""
    rng = random.Random(seed)
    d = group.dimension
    edges: list[Edge] = []
    seen = set()
    tries = 0
    while len(edges) < e0:
        tries += 1
        if tries > max_tries:
            raise FrameworkError("could not draw enough distinct edge orbits")
        a, b = rng.randint(1, v0), rng.randint(1, v0)
        n = tuple(rng.choice((-1, 0, 0, 1)) for _ in range(d)) if periodic else (0,) * d
        g = Gain(n, rng.randrange(group.order))
        e = Edge(a, b, g)
        if a == b and (g.is_identity() or _is_involution(g, group)):
            continue
        key = _edge_key(e, group)
        if key in seen:
            continue
        seen.add(key)
        edges.append(e)
    return OrbitGraph(d, group, v0, tuple(edges))


@dataclass
class SyntheticSpec:
    table: str
    key: str
    group: str
    dimension: int
    variant: str | None        # None for finite frameworks
    v0: int
    e0: int
    f: int
    seed: int = 0


def synthetic_specs() -> list[SyntheticSpec]:
    """One minimal instance per recomputed table row (computed counts, not printed ones)."""
    from .analysis import finite_symmetric_minimal, maxwell_combined
    from .tables import FINITE_3D, GROUP_TABLES, VARIANT_TABLES, _row_key

    specs = []
    for tid, (d, variant, rows) in GROUP_TABLES.items():
        for r in rows:
            pred = maxwell_combined(enumerate_group(r[0], d), variant=variant)
            v0 = 3 if d == 2 else 2
            specs.append(SyntheticSpec(tid, _row_key(r[0], r[2], rows), r[0], d, variant, v0,
                                       d * v0 + pred.e0_offset, pred.f_computed))
    for tid, (d, name, rows) in VARIANT_TABLES.items():
        for r in rows:
            pred = maxwell_combined(enumerate_group(name, d), variant=r[0])
            v0 = 3 if d == 2 else 2
            specs.append(SyntheticSpec(tid, r[0], name, d, r[0], v0, d * v0 + pred.e0_offset, pred.f_computed))
    for r in FINITE_3D:
        group = enumerate_group(r[0], 3)
        triv, off, f = finite_symmetric_minimal(group)
        v0 = 3
        specs.append(SyntheticSpec("finite-3d", r[0], r[0], 3, None, v0, 3 * v0 + off, f))
    return specs


def synthetic_framework(spec: SyntheticSpec, seed: int) -> OrbitFramework:
    group = enumerate_group(spec.group, spec.dimension)
    periodic = spec.variant is not None
    graph = random_gain_graph(group, spec.v0, spec.e0, seed, periodic=periodic)
    family = lattice_family_for(group) if periodic else None
    return random_generic_placement(graph, family, spec.variant or "fixed", seed)


def synthetic_filename(spec: SyntheticSpec) -> str:
    return f"{spec.table}--{spec.key.replace(' ', '_').replace('*', 'x')}.json"


# ---------------------------------------------------------------------------
# demo manifest

@dataclass
class DemoEntry:
    id: str
    file: str
    description: str
    expected: dict
    provenance: dict
    variants: dict = field(default_factory=dict)   # variant -> expected overrides
    patch: dict | None = None                      # {"cells": [lo, hi], "joints": n}

    def load(self) -> OrbitFramework:
        return load(DEMO_DIR / self.file)


DEMOS = [
    DemoEntry("example-3.2.1", "quad_c2.json",
              "half-turn symmetric four-bar, finite",
              {"rank": 2, "flex_dim": 1, "stress_dim": 0},
              {"flex_dim": "PAPER", "rank": "DERIVED", "stress_dim": "DERIVED"}),
    DemoEntry("figure-1", "periodic_square.json",
              "plain periodic framework with four vertex orbits",
              {"flex_dim": 0, "stress_dim": 0},
              {"flex_dim": "DERIVED", "stress_dim": "DERIVED", "patch": "TRIVIAL"},
              variants={"flexible": {"flex_dim": 3}},
              patch={"cells": [0, 2], "joints": 36}),
    DemoEntry("example-4.3.1", "two_vertex.json",
              "two vertex orbits, five edge orbits, plain periodic",
              {"rank": 5, "flex_dim": 0},
              {"rank": "PAPER", "flex_dim": "DERIVED"},
              variants={"fixed": {"rank": 2}}),
    DemoEntry("figure-2c", "halfturn_fixed.json",
              "half-turn periodic framework with a flex on the fixed lattice",
              {"flex_dim": 1, "stress_dim": 0},
              {"flex_dim": "PAPER", "stress_dim": "DERIVED", "patch": "TRIVIAL"},
              patch={"cells": [0, 0], "joints": 6}),
    DemoEntry("figure-5d", "halfturn_flexible.json",
              "half-turn periodic framework, two flexes on the flexible lattice",
              {"flex_dim": 2, "stress_dim": 0},
              {"flex_dim": "PAPER", "stress_dim": "DERIVED"}),
    DemoEntry("figure-6", "mirror.json",
              "mirror periodic framework, rigid on the flexible lattice",
              {"flex_dim": 0, "stress_dim": 0},
              {"flex_dim": "PAPER", "stress_dim": "DERIVED"}),
    DemoEntry("figure-9", "inversion.json",
              "inversion-symmetric periodic framework in 3-space",
              {"flex_dim": 4, "stress_dim": 0},
              {"flex_dim": "PAPER", "stress_dim": "DERIVED"}),
]

DEMO_GRAPHS = {
    "quad_c2.json": (quad_c2_graph, None, None, 11),
    "periodic_square.json": (periodic_square_graph, "parallelogram", "fixed", 12),
    "two_vertex.json": (two_vertex_graph, "parallelogram", "flexible", 13),
    "halfturn_fixed.json": (halfturn_fixed_graph, "parallelogram", "fixed", 14),
    "halfturn_flexible.json": (halfturn_flexible_graph, "parallelogram", "flexible", 15),
    "mirror.json": (mirror_graph, "rectangular", "flexible", 16),
    "inversion.json": (inversion_graph, "triclinic", "flexible", 17),
}


def demo_by_id(demo_id: str) -> DemoEntry:
    for d in DEMOS:
        if d.id == demo_id:
            return d
    raise KeyError(f"unknown demo {demo_id!r}; known: {', '.join(d.id for d in DEMOS)}")


def synthetic_entries() -> list[DemoEntry]:
    out = []
    for spec in synthetic_specs():
        f = spec.f
        out.append(DemoEntry(
            f"synthetic:{spec.table}:{spec.key}", "synthetic/" + synthetic_filename(spec),
            f"minimal instance for {spec.table} row {spec.key} (v0={spec.v0}, e0={spec.e0})",
            {"flex_dim": max(f, 0), "stress_dim": max(-f, 0)},
            {"flex_dim": "DERIVED", "stress_dim": "DERIVED"}))
    return out


def all_entries() -> list[DemoEntry]:
    return DEMOS + synthetic_entries()


def check_entry(entry: DemoEntry, seed: int | None = None) -> list[str]:
    """Return a list of failed expectations (empty when the entry passes).

    With a seed the frozen graph is re-placed at fresh generic positions.
    """
    from .analysis import motion_space

    fw = entry.load()
    if seed is not None:
        fw = random_generic_placement(fw.graph, fw.family, fw.variant, seed, fw.stabilizers)
    failures = []
    cases = [(None, entry.expected)]
    for variant, overrides in entry.variants.items():
        cases.append((variant, {**overrides}))
    for variant, expected in cases:
        ms = motion_space(fw, variant)
        got = {"rank": ms.rank, "flex_dim": ms.flex_dimension, "stress_dim": ms.stress_dimension}
        for key, want in expected.items():
            if got[key] != want:
                failures.append(f"{variant or fw.variant}: {key} = {got[key]}, expected {want}")
    if entry.patch:
        patch = expand_patch(fw, tuple(entry.patch["cells"]))
        if len(patch.joints) != entry.patch["joints"]:
            failures.append(f"patch joints = {len(patch.joints)}, expected {entry.patch['joints']}")
    return failures


def manifest() -> list[dict]:
    return [{"id": e.id, "file": e.file, "description": e.description, "expected": e.expected,
             "variants": e.variants, "patch": e.patch, "provenance": e.provenance} for e in all_entries()]


def write_demo_files(seed_search: int = 50) -> None:
    """Freeze seeded placements of every demo and synthetic instance as JSON files."""
    from .analysis import motion_space

    DEMO_DIR.mkdir(exist_ok=True)
    SYNTHETIC_DIR.mkdir(exist_ok=True)
    for fname, (builder, fam, variant, seed) in DEMO_GRAPHS.items():
        graph = builder()
        family = make_family(fam, graph.dimension) if fam else None
        fw = random_generic_placement(graph, family, variant or "fixed", seed)
        (DEMO_DIR / fname).write_bytes(serialize(fw))
    for spec in synthetic_specs():
        want = (max(spec.f, 0), max(-spec.f, 0))
        for seed in range(seed_search):
            try:
                fw = synthetic_framework(spec, seed)
            except FrameworkError:
                continue
            ms = motion_space(fw)
            if (ms.flex_dimension, ms.stress_dimension) == want:
                (SYNTHETIC_DIR / synthetic_filename(spec)).write_bytes(serialize(fw))
                break
        else:
            raise RuntimeError(f"no seed realizes {spec.table} {spec.key}")
    (DEMO_DIR / "manifest.json").write_text(json.dumps(manifest(), indent=2) + "\n")
