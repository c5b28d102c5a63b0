"""Ranks, motion spaces and Maxwell-type counts."""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from math import ceil, comb
from typing import Callable, Iterable, Sequence

import numpy as np

from .exact import kernel_exact, rank_exact, span_basis
from .framework import OrbitFramework, PlacedPatch, expand_patch, subgroup_closure
from .matrices import OrbitRigidityMatrix, build_matrix
from .symmetry import (
    PointGroup,
    SymmetryError,
    check_variant,
    enumerate_group,
    fixed_subspace,
    lattice_family_for,
    nosym_lattice_dim,
    symmetric_lattice_dim,
    symmetric_rigid_motions,
    trivial_motion_dim_finite,
)

__all__ = [
    "rank_exact", "kernel_exact", "rank_float", "InstabilityError", "MotionSpace", "motion_space",
    "maxwell_finite", "maxwell_finite_symmetric", "finite_symmetric_minimal", "maxwell_periodic",
    "maxwell_combined", "CountPrediction", "adjusted_counts", "higher_dim_flex", "GLIDE_EXAMPLE_NOTE",
    "lift_velocities", "lift_residuals",
]

DEFAULT_TOL = 1e-9


class InstabilityError(RuntimeError):
    pass


def _float_rank(m, tol: float) -> int:
    a = np.asarray(m, dtype=float)
    if a.size == 0:
        return 0
    sv = np.linalg.svd(a, compute_uv=False)
    if sv[0] == 0:
        return 0
    return int(np.sum(sv > tol * sv[0]))


def rank_float(m, tol: float = DEFAULT_TOL, seeds: Iterable[int] | None = None) -> int:
    """Numerical rank: singular values above tol * sigma_max.

    If ``m`` is callable it is treated as seed -> matrix and every seed must
    give the same rank, otherwise InstabilityError is raised.
    """
    if not callable(m):
        return _float_rank(m, tol)
    seeds = list(seeds) if seeds is not None else [1, 2, 3]
    ranks = {s: _float_rank(m(s), tol) for s in seeds}
    if len(set(ranks.values())) != 1:
        raise InstabilityError(f"numerical rank disagrees across seeds: {ranks}")
    return next(iter(ranks.values()))


# ---------------------------------------------------------------------------
# motion spaces

@dataclass
class MotionSpace:
    kind: str
    rank: int
    columns: int
    kernel_basis: list[list[Fraction]]
    trivial_basis: list[list[Fraction]]
    nontrivial_basis: list[list[Fraction]]
    flex_dimension: int
    stress_dimension: int
    matrix: OrbitRigidityMatrix | None = None

    @property
    def nullity(self) -> int:
        return len(self.kernel_basis)


def _lift_velocity(basis_rows: list, u: Sequence) -> list:
    """Coordinates of a velocity u in a vertex's free basis (basis vectors are RREF-like)."""
    d = len(u)
    if len(basis_rows) == d:
        # identity basis unless the vertex is stabilized
        return list(u)
    # kernel_exact bases carry a unit at their free column
    coords = []
    for b in basis_rows:
        free = next(i for i in range(d) if b[i] == 1 and all(o[i] == 0 for o in basis_rows if o is not b))
        coords.append(u[free])
    return coords


def trivial_motions(fw: OrbitFramework, matrix: OrbitRigidityMatrix) -> list[list[Fraction]]:
    d = fw.dimension
    kind = fw.kind
    if kind in ("finite", "finite-symmetric"):
        if kind == "finite":
            motions = []
            for i in range(d):
                for j in range(i + 1, d):
                    a = [[Fraction(0)] * d for _ in range(d)]
                    a[i][j], a[j][i] = Fraction(1), Fraction(-1)
                    motions.append((a, [Fraction(0)] * d))
            for i in range(d):
                motions.append(([[Fraction(0)] * d for _ in range(d)], [Fraction(int(i == k)) for k in range(d)]))
        else:
            motions = symmetric_rigid_motions(fw.group)
        vecs = []
        for a, t in motions:
            vec = []
            for p, basis in zip(fw.positions, matrix.vertex_bases):
                u = [sum((a[i][j] * p[j] for j in range(d)), Fraction(0)) + t[i] for i in range(d)]
                vec.extend(_lift_velocity(basis, u))
            vecs.append(vec)
    else:
        taus = fixed_subspace(fw.group) if kind == "combined" else \
            [[Fraction(int(i == j)) for i in range(d)] for j in range(d)]
        vecs = []
        for tau in taus:
            vec = []
            for basis in matrix.vertex_bases:
                vec.extend(_lift_velocity(basis, tau))
            vec.extend([Fraction(0)] * matrix.lattice_columns)
            vecs.append(vec)
    return span_basis(vecs) if vecs else []


def motion_space(fw: OrbitFramework, variant: str | None = None) -> MotionSpace:
    m = build_matrix(fw, variant)
    rows = m.entries
    ncols = len(m.column_labels)
    r = rank_exact(rows) if rows else 0
    kernel = kernel_exact(rows, ncols) if rows else kernel_exact([], ncols)
    trivial = trivial_motions(fw, m)
    # extend the trivial span by kernel vectors to isolate nontrivial directions
    nontrivial = []
    current = list(trivial)
    base_rank = len(span_basis(current)) if current else 0
    for v in kernel:
        trial = current + [v]
        if rank_exact(trial) > base_rank:
            current = trial
            base_rank += 1
            nontrivial.append(v)
    flex = len(kernel) - len(trivial)
    return MotionSpace(fw.kind, r, ncols, kernel, trivial, nontrivial, flex,
                       fw.graph.edge_count - r, m)


def lift_velocities(fw: OrbitFramework, vec: Sequence, patch: PlacedPatch,
                    matrix: OrbitRigidityMatrix | None = None) -> list[list[Fraction]]:
    """Symmetrized joint velocities on a patch: copy (n, s) of i moves with s u_i + n Ldot."""
    m = matrix or build_matrix(fw)
    vel, coeffs = m.split_vector(list(vec))
    d = fw.dimension
    ldot = [[Fraction(0)] * d for _ in range(d)]
    if m.deformation is not None:
        for c, b in zip(coeffs, m.deformation.matrices()):
            ldot = [[x + c * y for x, y in zip(r1, r2)] for r1, r2 in zip(ldot, b)]
    out = []
    for j in patch.joints:
        u = vel[j.rep - 1] or [Fraction(0)] * d
        s = fw.group.elements[j.gain.element].matrix
        w = [sum((s[i][k] * u[k] for k in range(d)), Fraction(0)) for i in range(d)]
        for ni, row in zip(j.gain.translation, ldot):
            if ni:
                w = [x + ni * y for x, y in zip(w, row)]
        out.append(w)
    return out


def lift_residuals(fw: OrbitFramework, vec: Sequence, cell_range=(-1, 1)) -> list[Fraction]:
    """Rows of the expanded rigidity matrix applied to the lifted velocity, one per interior bar."""
    patch = expand_patch(fw, cell_range)
    vel = lift_velocities(fw, vec, patch)
    res = []
    for bar in patch.interior_bars():
        a, b = bar.ends
        pa, pb = patch.joints[a].coords, patch.joints[b].coords
        res.append(sum(((x - y) * (u - w) for x, y, u, w in zip(pa, pb, vel[a], vel[b])), Fraction(0)))
    return res


# ---------------------------------------------------------------------------
# counts

def maxwell_finite(d: int, v: int, e: int) -> int:
    return max(0, d * v - comb(d + 1, 2) - e)


def maxwell_finite_symmetric(group: PointGroup, v0: int, e0: int, d: int | None = None) -> int:
    """(d v0 - triv) - e0; negative values count symmetric self-stresses."""
    d = d or group.dimension
    return d * v0 - trivial_motion_dim_finite(group) - e0


def finite_symmetric_minimal(group: PointGroup) -> tuple[int, int, int]:
    """(triv, e0 offset, f) when e0 is the least count compatible with e = dv - C(d+1,2)."""
    d, k = group.dimension, group.order
    triv = trivial_motion_dim_finite(group)
    offset = ceil(Fraction(-comb(d + 1, 2), k))
    return triv, offset, -triv - offset


def maxwell_periodic(d: int, v: int, e: int, variant: str) -> int:
    check_variant(variant)
    return max(0, d * v - d + nosym_lattice_dim(variant, d) - e)


def nosym_constant(variant: str, d: int) -> int:
    """c in e = dv + c, the count for a minimally rigid periodic framework without symmetry."""
    return nosym_lattice_dim(variant, d) - d


@dataclass
class CountPrediction:
    group: str
    dimension: int
    variant: str
    k: int
    t: int
    ell: int
    e0_offset: int              # e0_min = d * v0 + e0_offset
    f_computed: int
    v0: int | None = None
    e0: int | None = None
    f_published: int | None = None
    published_sources: dict = field(default_factory=dict)
    discrepancy_flag: bool = False
    stress_lower_bound: int = 0
    note: str = ""

    @property
    def e0_min(self) -> int | None:
        return None if self.v0 is None else self.dimension * self.v0 + self.e0_offset

    def e0_expression(self) -> str:
        sub = "v0" if self.k > 1 else "v"
        off = self.e0_offset
        return f"{self.dimension}{sub}" + ("" if off == 0 else f"{off:+d}")

    def as_dict(self) -> dict:
        return {
            "group": self.group, "dimension": self.dimension, "variant": self.variant,
            "k": self.k, "t": self.t, "ell": self.ell, "e0_min": self.e0_expression(),
            "f_computed": self.f_computed, "f_published": self.f_published,
            "discrepancy": self.discrepancy_flag, "stress_lower_bound": self.stress_lower_bound,
        }


def _resolve_group(group, d: int | None) -> PointGroup:
    if isinstance(group, PointGroup):
        return group
    if d is None:
        raise ValueError("dimension required with a group name")
    return enumerate_group(group, d)


def maxwell_combined(group, d: int | None = None, variant: str = "flexible", v0: int | None = None,
                     e0: int | None = None, family=None) -> CountPrediction:
    g = _resolve_group(group, d)
    d = g.dimension
    check_variant(variant)
    k = g.order
    t = len(fixed_subspace(g))
    ell = symmetric_lattice_dim(g, variant, family)
    c = nosym_constant(variant, d)
    offset = ceil(Fraction(c, k))
    if e0 is not None:
        if v0 is None:
            raise ValueError("e0 needs v0")
        f = d * v0 + ell - t - e0
    else:
        f = ell - t - offset
    pred = CountPrediction(g.schoenflies, d, variant, k, t, ell, offset, f, v0, e0)
    pred.stress_lower_bound = max(-f, 0)
    if e0 is None:
        from .tables import published_f
        sources = published_f(g.schoenflies, d, variant)
        if sources:
            pred.published_sources = sources
            values = list(sources.values())
            pred.f_published = next((x for x in values if x != f), values[0])
            pred.discrepancy_flag = any(x != f for x in values)
    return pred


def _stabilizer_indices(g: PointGroup, labels) -> tuple[int, ...]:
    if isinstance(labels, str):
        labels = [labels]
    idx = {0} | {g.index_by_label(lab) for lab in labels}
    closure = set(subgroup_closure(g, idx))
    if closure != idx:
        raise SymmetryError(f"stabilizer {sorted(labels)} is not a subgroup of {g.schoenflies}")
    return tuple(sorted(idx))


def adjusted_counts(group, d: int | None = None, variant: str = "flexible", v0: int = 1,
                    fixed_bar_orbits: Sequence = (), fixed_joint_specs: Sequence = (),
                    e_offset: int | None = None) -> CountPrediction:
    """Counts with bars or joints fixed by non-trivial elements.

    ``fixed_bar_orbits`` and ``fixed_joint_specs`` list the stabilizer of each
    such orbit as element labels.  The non-symmetric target is e = dv + e_offset
    (default: the minimal rigid count for the variant).
    """
    g = _resolve_group(group, d)
    d = g.dimension
    k = g.order
    t = len(fixed_subspace(g))
    ell = symmetric_lattice_dim(g, variant)
    c = nosym_constant(variant, d) if e_offset is None else e_offset
    joint_loss = 0      # lost vertices in the full count
    column_loss = 0
    for spec in fixed_joint_specs:
        h = _stabilizer_indices(g, spec)
        joint_loss += k - k // len(h)
        column_loss += d - len(fixed_subspace(g, [x for x in h if x != 0]))
    bar_loss = 0
    for spec in fixed_bar_orbits:
        h = _stabilizer_indices(g, spec)
        bar_loss += k - k // len(h)
    if len(fixed_joint_specs) > v0:
        raise SymmetryError("more fixed joints than vertex orbits")
    # k e0 - bar_loss = d (k v0 - joint_loss) + c
    offset = ceil(Fraction(c - d * joint_loss + bar_loss, k))
    e0 = d * v0 + offset
    cols = d * v0 - column_loss + ell
    f = cols - t - e0
    v = k * v0 - joint_loss
    e = k * e0 - bar_loss
    stress = e - (d * v + nosym_constant(variant, d))
    pred = CountPrediction(g.schoenflies, d, variant, k, t, ell, offset, f, v0, e0)
    pred.stress_lower_bound = max(stress, 0)
    return pred


def higher_dim_flex(group: str, d: int) -> int:
    if d < 2:
        raise ValueError("d >= 2 required")
    if group == "Ci":
        return comb(d + 1, 2) - ceil(Fraction(comb(d, 2), 2))
    if group == "Cs":
        return comb(d, 2) // 2 + 2 - d
    raise ValueError(f"higher-dimensional formula only for Ci and Cs, not {group!r}")


GLIDE_EXAMPLE_NOTE = {
    "id": "glide-3d-flexible",
    "description": "Z^3 with a glide reflection on the fully flexible lattice: "
                   "e0 = 3v0 + 2 against 3v0 + 4 - 2, so no added flex; two joints on the glide plane add one.",
    "ell": 4, "t": 2, "e0_offset": 2, "f": 0,
    "matrix_support": False,
}
