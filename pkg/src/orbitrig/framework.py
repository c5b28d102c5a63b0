"""Gain graphs, placements, JSON I/O and patch expansion."""
from __future__ import annotations

import itertools
import json
import random
from dataclasses import dataclass, field, replace
from fractions import Fraction
from typing import Iterable, Sequence

from .exact import Matrix, Vector, det, inverse as mat_inverse, kernel_exact, transpose
from .symmetry import (
    Gain,
    LatticeFamily,
    PointGroup,
    SymmetryError,
    check_variant,
    compose,
    enumerate_group,
    fixed_subspace,
    inverse,
    lattice_family_for,
    make_family,
)

KINDS = ("finite", "finite-symmetric", "periodic", "combined")

SAMPLE_SCALE = 10**6
SAMPLE_DENOMINATOR = 10**6 + 7


class FrameworkError(ValueError):
    pass


def parse_rational(x) -> Fraction:
    if isinstance(x, bool):
        raise FrameworkError(f"not a rational: {x!r}")
    if isinstance(x, int):
        return Fraction(x)
    if isinstance(x, str):
        try:
            return Fraction(x.strip())
        except (ValueError, ZeroDivisionError):
            raise FrameworkError(f"not a rational: {x!r}") from None
    if isinstance(x, Fraction):
        return x
    raise FrameworkError(f"rationals must be strings like '3/4', got {x!r}")


def format_rational(x: Fraction) -> str:
    x = Fraction(x)
    return str(x.numerator) if x.denominator == 1 else f"{x.numerator}/{x.denominator}"


@dataclass(frozen=True)
class Edge:
    tail: int
    head: int
    gain: Gain

    def is_loop(self) -> bool:
        return self.tail == self.head


@dataclass(frozen=True)
class OrbitGraph:
    dimension: int
    group: PointGroup
    vertex_count: int
    edges: tuple[Edge, ...]

    @property
    def edge_count(self) -> int:
        return len(self.edges)

    def check(self) -> None:
        d = self.dimension
        if self.group.dimension != d:
            raise FrameworkError("group dimension differs from framework dimension")
        for k, e in enumerate(self.edges):
            for v in (e.tail, e.head):
                if not 1 <= v <= self.vertex_count:
                    raise FrameworkError(f"edge {k}: vertex {v} out of range 1..{self.vertex_count}")
            if len(e.gain.translation) != d:
                raise FrameworkError(f"edge {k}: translation has length {len(e.gain.translation)}, expected {d}")
            if not 0 <= e.gain.element < self.group.order:
                raise FrameworkError(f"edge {k}: element index out of range")
            if e.is_loop() and e.gain.is_identity():
                raise FrameworkError(f"edge {k}: loop with identity gain (zero-length bar)")


def apply_gain(g: Gain, p: Sequence, lattice: Matrix | None, group: PointGroup) -> Vector:
    """s*p + n*L, where n*L is the integer combination of lattice rows."""
    out = group.elements[g.element].apply(p)
    if any(g.translation):
        if lattice is None:
            raise FrameworkError("translation gain without a lattice")
        for ni, row in zip(g.translation, lattice):
            if ni:
                out = [x + ni * Fraction(y) for x, y in zip(out, row)]
    return out


def subgroup_closure(group: PointGroup, elements: Iterable[int]) -> tuple[int, ...]:
    members = {0}
    frontier = set(elements) | {0}
    members |= frontier
    while frontier:
        new = set()
        for a in frontier:
            for b in list(members):
                for c in (group.product(a, b), group.product(b, a)):
                    if c not in members:
                        new.add(c)
        members |= new
        frontier = new
    return tuple(sorted(members))


@dataclass(frozen=True)
class OrbitFramework:
    graph: OrbitGraph
    positions: tuple[tuple[Fraction, ...], ...]
    family: LatticeFamily | None = None
    theta: tuple[Fraction, ...] = ()
    variant: str = "fixed"
    stabilizers: tuple[tuple[int, ...], ...] = ()   # per vertex; () means trivial

    def __post_init__(self):
        object.__setattr__(self, "positions", tuple(tuple(Fraction(x) for x in p) for p in self.positions))
        object.__setattr__(self, "theta", tuple(Fraction(t) for t in self.theta))
        if not self.stabilizers:
            object.__setattr__(self, "stabilizers", tuple(() for _ in range(self.graph.vertex_count)))
        else:
            object.__setattr__(self, "stabilizers", tuple(tuple(s) for s in self.stabilizers))

    @property
    def dimension(self) -> int:
        return self.graph.dimension

    @property
    def group(self) -> PointGroup:
        return self.graph.group

    @property
    def is_periodic(self) -> bool:
        return self.family is not None

    @property
    def kind(self) -> str:
        sym = not self.group.is_trivial
        if self.is_periodic:
            return "combined" if sym else "periodic"
        return "finite-symmetric" if sym else "finite"

    @property
    def lattice(self) -> Matrix | None:
        return self.family.basis_fn(self.theta) if self.family is not None else None

    def stabilizer(self, vertex: int) -> tuple[int, ...]:
        """Element indices of the stabilizer of a 1-based vertex (always includes the identity)."""
        s = self.stabilizers[vertex - 1]
        return s if s else (0,)

    def free_basis(self, vertex: int) -> list[Vector]:
        """Basis of the subspace a vertex may move in (all of R^d when unstabilized)."""
        stab = self.stabilizer(vertex)
        d = self.dimension
        if len(stab) == 1:
            return [[Fraction(int(i == j)) for i in range(d)] for j in range(d)]
        return fixed_subspace(self.group, [s for s in stab if s != 0])

    def edge_vector(self, edge: Edge, positions=None, lattice=None) -> Vector:
        """d = p_tail - g(p_head)."""
        positions = self.positions if positions is None else positions
        lattice = self.lattice if lattice is None else lattice
        moved = apply_gain(edge.gain, positions[edge.head - 1], lattice, self.group)
        return [Fraction(a) - b for a, b in zip(positions[edge.tail - 1], moved)]

    def with_positions(self, positions, theta=None) -> "OrbitFramework":
        return replace(self, positions=tuple(tuple(p) for p in positions),
                       theta=self.theta if theta is None else tuple(theta))


# ---------------------------------------------------------------------------
# validation

def validate(fw: OrbitFramework) -> None:
    """Raise FrameworkError on any structural or geometric violation."""
    g = fw.graph
    d = fw.dimension
    g.check()
    if len(fw.positions) != g.vertex_count:
        raise FrameworkError(f"{len(fw.positions)} positions for {g.vertex_count} vertices")
    for i, p in enumerate(fw.positions):
        if len(p) != d:
            raise FrameworkError(f"vertex {i + 1}: position has length {len(p)}, expected {d}")
    check_variant(fw.variant)
    lattice = None
    if fw.family is not None:
        if fw.family.dimension != d:
            raise FrameworkError("lattice family dimension mismatch")
        if len(fw.theta) != fw.family.parameter_count:
            raise FrameworkError(
                f"{fw.family.name} lattice needs {fw.family.parameter_count} parameters, got {len(fw.theta)}")
        if not fw.family.is_valid(fw.theta):
            raise FrameworkError("lattice parameters outside the validity region (det <= 0)")
        if not fw.family.compatible_with(fw.group):
            raise FrameworkError(f"{fw.family.name} lattice is not compatible with {fw.group.schoenflies}")
        lattice = fw.lattice
    else:
        for k, e in enumerate(g.edges):
            if any(e.gain.translation):
                raise FrameworkError(f"edge {k}: translation gain in a finite framework")
    if len(fw.stabilizers) != g.vertex_count:
        raise FrameworkError("stabilizer list length mismatch")
    for v in range(1, g.vertex_count + 1):
        for s in fw.stabilizer(v):
            if fw.group.elements[s].apply(fw.positions[v - 1]) != list(fw.positions[v - 1]):
                raise FrameworkError(
                    f"vertex {v} does not lie in the fixed subspace of its stabilizer "
                    f"(element {fw.group.elements[s].label})")
    _check_injective(fw, lattice)
    for k, e in enumerate(g.edges):
        if not any(fw.edge_vector(e)):
            raise FrameworkError(f"edge {k}: zero-length bar")


def _check_injective(fw: OrbitFramework, lattice) -> None:
    """Distinct orbit copies must occupy distinct points."""
    group = fw.group
    inv_l = mat_inverse(lattice) if lattice is not None else None
    pos = fw.positions
    for a in range(len(pos)):
        stab_a = set(fw.stabilizer(a + 1))
        for b in range(a, len(pos)):
            for si, el in enumerate(group.elements):
                if a == b and si in stab_a:
                    continue
                diff = [x - y for x, y in zip(pos[a], el.apply(pos[b]))]
                if inv_l is None:
                    hit = not any(diff)
                else:
                    coords = [sum((diff[i] * inv_l[i][j] for i in range(len(diff))), Fraction(0))
                              for j in range(len(diff))]
                    hit = all(c.denominator == 1 for c in coords)
                if hit:
                    raise FrameworkError(
                        f"placement not injective: vertex {a + 1} coincides with a copy of vertex {b + 1} "
                        f"under {el.label}")


# ---------------------------------------------------------------------------
# JSON I/O

def _family_from_doc(doc, group: PointGroup, d: int) -> LatticeFamily:
    name = doc.get("crystal_family")
    if name is None:
        return lattice_family_for(group)
    return make_family(name, d)


def from_dict(doc: dict) -> OrbitFramework:
    try:
        return _from_dict(doc)
    except SymmetryError as exc:
        raise FrameworkError(str(exc)) from None


def _from_dict(doc: dict) -> OrbitFramework:
    if not isinstance(doc, dict):
        raise FrameworkError("framework document must be a JSON object")
    for key in ("dimension", "vertices"):
        if key not in doc:
            raise FrameworkError(f"missing key {key!r}")
    d = doc["dimension"]
    if not isinstance(d, int) or d < 1:
        raise FrameworkError("dimension must be a positive integer")
    group = enumerate_group(doc.get("group", "C1") or "C1", d)
    periodic = doc.get("periodic", "lattice_params" in doc)
    family, theta = None, ()
    variant = doc.get("variant", "fixed")
    if periodic:
        if "lattice_params" not in doc:
            raise FrameworkError("periodic framework needs lattice_params")
        family = _family_from_doc(doc, group, d)
        theta = tuple(parse_rational(t) for t in doc["lattice_params"])
    verts = doc["vertices"]
    if not isinstance(verts, list):
        raise FrameworkError("vertices must be a list")
    ids = [v.get("id") for v in verts]
    if sorted(ids) != list(range(1, len(verts) + 1)):
        raise FrameworkError("vertex ids must be 1..v0")
    by_id = {v["id"]: v for v in verts}
    positions, stabs = [], []
    for i in range(1, len(verts) + 1):
        v = by_id[i]
        if "pos" not in v:
            raise FrameworkError(f"vertex {i}: missing pos")
        positions.append(tuple(parse_rational(x) for x in v["pos"]))
        st = v.get("stabilizer")
        if st in (None, [], ""):
            stabs.append(())
        else:
            labels = [st] if isinstance(st, str) else list(st)
            idx = [group.index_by_label(lab) for lab in labels]
            closure = subgroup_closure(group, idx)
            stabs.append(closure if len(closure) > 1 else ())
    edges = []
    for k, e in enumerate(doc.get("edges", [])):
        try:
            tail, head = int(e["tail"]), int(e["head"])
        except (KeyError, TypeError, ValueError):
            raise FrameworkError(f"edge {k}: tail/head missing") from None
        trans = e.get("translation", [0] * d)
        if len(trans) != d:
            raise FrameworkError(f"edge {k}: translation vector length {len(trans)} != {d}")
        if any(not isinstance(x, int) or isinstance(x, bool) for x in trans):
            raise FrameworkError(f"edge {k}: translations must be integers")
        elem = group.index_by_label(e.get("element", "id"))
        edges.append(Edge(tail, head, Gain(tuple(trans), elem)))
    graph = OrbitGraph(d, group, len(verts), tuple(edges))
    fw = OrbitFramework(graph, tuple(positions), family, theta, variant, tuple(stabs))
    validate(fw)
    return fw


def parse(data: bytes | str) -> OrbitFramework:
    if isinstance(data, bytes):
        data = data.decode("utf-8")
    try:
        doc = json.loads(data)
    except json.JSONDecodeError as exc:
        raise FrameworkError(f"invalid JSON: {exc}") from None
    return from_dict(doc)


def load(path) -> OrbitFramework:
    with open(path, "rb") as fh:
        return parse(fh.read())


def to_dict(fw: OrbitFramework) -> dict:
    g = fw.graph
    doc: dict = {"dimension": fw.dimension, "group": fw.group.schoenflies}
    if fw.family is None:
        doc["periodic"] = False
    else:
        doc["crystal_family"] = fw.family.name
        doc["variant"] = fw.variant
        doc["lattice_params"] = [format_rational(t) for t in fw.theta]
    verts = []
    for i, p in enumerate(fw.positions):
        stab = fw.stabilizers[i]
        labels = [fw.group.elements[s].label for s in stab if s != 0] if stab else None
        verts.append({"id": i + 1, "pos": [format_rational(x) for x in p], "stabilizer": labels})
    doc["vertices"] = verts
    edges = []
    for e in g.edges:
        item = {"tail": e.tail, "head": e.head}
        if not e.gain.is_identity():
            item["translation"] = list(e.gain.translation)
            item["element"] = fw.group.elements[e.gain.element].label
        edges.append(item)
    doc["edges"] = edges
    return doc


def serialize(fw: OrbitFramework) -> bytes:
    return (json.dumps(to_dict(fw), indent=2) + "\n").encode("utf-8")


# ---------------------------------------------------------------------------
# orbit bookkeeping

def reroot_edge(fw: OrbitFramework, index: int) -> OrbitFramework:
    """Replace edge (a,b;g) by (b,a;g^-1); the represented bar orbit is unchanged."""
    edges = list(fw.graph.edges)
    e = edges[index]
    edges[index] = Edge(e.head, e.tail, inverse(e.gain, fw.group))
    return replace(fw, graph=replace(fw.graph, edges=tuple(edges)))


def change_representative(fw: OrbitFramework, vertex: int, h: Gain) -> OrbitFramework:
    """Move the representative of ``vertex`` to h(p), re-expressing incident gains."""
    group = fw.group
    h_inv = inverse(h, group)
    positions = list(fw.positions)
    positions[vertex - 1] = tuple(apply_gain(h, positions[vertex - 1], fw.lattice, group))
    edges = []
    for e in fw.graph.edges:
        g = e.gain
        if e.tail == vertex:
            g = compose(h, g, group)
        if e.head == vertex:
            g = compose(g, h_inv, group)
        edges.append(Edge(e.tail, e.head, g))
    stabs = list(fw.stabilizers)
    if stabs[vertex - 1]:
        s = h.element
        s_inv = group.inverse_index(s)
        stabs[vertex - 1] = tuple(sorted(group.product(group.product(s, k), s_inv) for k in stabs[vertex - 1]))
    return replace(fw, graph=replace(fw.graph, edges=tuple(edges)), positions=tuple(positions),
                   stabilizers=tuple(stabs))


# ---------------------------------------------------------------------------
# patch expansion

@dataclass(frozen=True)
class PlacedJoint:
    rep: int
    gain: Gain
    coords: tuple[Fraction, ...]


@dataclass(frozen=True)
class PlacedBar:
    edge: int
    gain: Gain
    ends: tuple[int | None, int | None]
    coords: tuple[tuple[Fraction, ...], tuple[Fraction, ...]]

    @property
    def dangling(self) -> bool:
        return None in self.ends


@dataclass
class PlacedPatch:
    dimension: int
    joints: list[PlacedJoint] = field(default_factory=list)
    bars: list[PlacedBar] = field(default_factory=list)
    lattice: Matrix | None = None
    cells: tuple[tuple[int, int], ...] = ()

    def joint_index(self) -> dict[tuple[Fraction, ...], int]:
        return {j.coords: i for i, j in enumerate(self.joints)}

    def interior_bars(self) -> list[PlacedBar]:
        return [b for b in self.bars if not b.dangling]


def _normalize_range(cell_range, d: int) -> tuple[tuple[int, int], ...]:
    if cell_range is None:
        return tuple((0, 0) for _ in range(d))
    if len(cell_range) == 2 and all(isinstance(x, int) for x in cell_range):
        return tuple((int(cell_range[0]), int(cell_range[1])) for _ in range(d))
    if len(cell_range) != d:
        raise FrameworkError("cell range needs one (lo, hi) pair per axis")
    return tuple((int(lo), int(hi)) for lo, hi in cell_range)


def _coset_reps(group: PointGroup, stab: Sequence[int], include: bool) -> list[int]:
    if not include:
        return [0]
    seen, reps = set(), []
    for s in range(group.order):
        if s in seen:
            continue
        reps.append(s)
        seen.update(group.product(s, k) for k in stab)
    return reps


def expand_patch(fw: OrbitFramework, cell_range=None, include_point_group: bool = True,
                 positions=None, theta=None) -> PlacedPatch:
    """Place every orbit copy with translation inside ``cell_range`` (inclusive box)."""
    d = fw.dimension
    group = fw.group
    positions = fw.positions if positions is None else positions
    lattice = fw.family.basis_fn(theta if theta is not None else fw.theta) if fw.family else None
    cells = _normalize_range(cell_range, d) if fw.family else tuple((0, 0) for _ in range(d))
    boxes = list(itertools.product(*[range(lo, hi + 1) for lo, hi in cells]))
    patch = PlacedPatch(d, lattice=lattice, cells=cells)
    where: dict[tuple, int] = {}
    for rep in range(1, fw.graph.vertex_count + 1):
        for s in _coset_reps(group, fw.stabilizer(rep), include_point_group):
            for n in boxes:
                g = Gain(n, s)
                xy = tuple(apply_gain(g, positions[rep - 1], lattice, group))
                if xy in where:
                    other = patch.joints[where[xy]]
                    raise FrameworkError(
                        f"orbit copies collide: vertex {rep} and vertex {other.rep} at {xy}")
                where[xy] = len(patch.joints)
                patch.joints.append(PlacedJoint(rep, g, xy))
    elements = range(group.order) if include_point_group else [0]
    seen_bars = set()
    for k, e in enumerate(fw.graph.edges):
        for s in elements:
            for n in boxes:
                h = Gain(n, s)
                a = tuple(apply_gain(h, positions[e.tail - 1], lattice, group))
                b = tuple(apply_gain(compose(h, e.gain, group), positions[e.head - 1], lattice, group))
                key = frozenset((a, b))
                if key in seen_bars:
                    continue
                seen_bars.add(key)
                patch.bars.append(PlacedBar(k, h, (where.get(a), where.get(b)), (a, b)))
    return patch


# ---------------------------------------------------------------------------
# random generic placement

def _sample(rng: random.Random) -> Fraction:
    return Fraction(rng.randint(-SAMPLE_SCALE, SAMPLE_SCALE), SAMPLE_DENOMINATOR)


def random_generic_placement(graph: OrbitGraph, family: LatticeFamily | None = None, variant: str = "fixed",
                             seed: int = 0, stabilizers=None, max_tries: int = 200) -> OrbitFramework:
    """Seeded rational placement; resamples on accidental coincidences."""
    rng = random.Random(seed)
    d = graph.dimension
    stabilizers = tuple(stabilizers) if stabilizers else tuple(() for _ in range(graph.vertex_count))
    last_error = None
    for _ in range(max_tries):
        theta = ()
        if family is not None:
            for _ in range(max_tries):
                theta = tuple(_sample(rng) for _ in range(family.parameter_count))
                if family.is_valid(theta):
                    break
            else:
                raise FrameworkError("could not sample admissible lattice parameters")
        positions = []
        for v in range(graph.vertex_count):
            stab = stabilizers[v]
            if stab and len(stab) > 1:
                basis = fixed_subspace(graph.group, [s for s in stab if s != 0])
                coeffs = [_sample(rng) for _ in basis]
                p = [sum((c * b[i] for c, b in zip(coeffs, basis)), Fraction(0)) for i in range(d)]
            else:
                p = [_sample(rng) for _ in range(d)]
            positions.append(tuple(p))
        fw = OrbitFramework(graph, tuple(positions), family, theta, variant, stabilizers)
        try:
            validate(fw)
            return fw
        except FrameworkError as exc:
            last_error = exc
    raise FrameworkError(f"no valid generic placement after {max_tries} tries: {last_error}")
