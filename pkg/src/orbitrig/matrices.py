"""Rigidity and orbit matrices.

Every row is the gradient of c_e = 1/2 |d_e|^2 with d_e = p_a - s p_b - n.L
for the edge (a, b; (n, s)).  Columns are vertex coordinates (reduced to the
fixed subspace of a stabilizer where one is declared) followed by one column
per basis element of the allowed lattice deformations.
"""
from __future__ import annotations

from dataclasses import dataclass, field
from fractions import Fraction
from typing import Sequence

from .framework import Edge, FrameworkError, OrbitFramework, apply_gain, format_rational
from .symmetry import DeformationSpace, lattice_deformation_space


@dataclass
class OrbitRigidityMatrix:
    entries: list[list]
    row_labels: list[str]
    column_labels: list[str]
    kind: str
    variant: str | None = None
    deformation: DeformationSpace | None = None
    vertex_bases: list[list] = field(default_factory=list)

    @property
    def shape(self) -> tuple[int, int]:
        return len(self.entries), len(self.column_labels)

    @property
    def lattice_columns(self) -> int:
        return self.deformation.dimension if self.deformation is not None else 0

    @property
    def vertex_columns(self) -> int:
        return len(self.column_labels) - self.lattice_columns

    def to_tsv(self, as_float: bool = False) -> str:
        lines = ["edge\t" + "\t".join(self.column_labels)]
        for lab, row in zip(self.row_labels, self.entries):
            cells = [f"{float(x):.17g}" if as_float else format_rational(x) for x in row]
            lines.append(lab + "\t" + "\t".join(cells))
        return "\n".join(lines) + "\n"

    def split_vector(self, vec: Sequence) -> tuple[list[list], list]:
        """Vertex velocities (full d-vectors) and lattice coefficients for a column vector."""
        out, pos = [], 0
        for basis in self.vertex_bases:
            coords = vec[pos:pos + len(basis)]
            pos += len(basis)
            d = len(basis[0]) if basis else 0
            if basis:
                out.append([sum((c * b[i] for c, b in zip(coords, basis)), 0 * coords[0] if coords else 0)
                            for i in range(d)])
            else:
                out.append(None)
        return out, list(vec[pos:])


def edge_label(fw: OrbitFramework, k: int) -> str:
    e = fw.graph.edges[k]
    lab = fw.group.elements[e.gain.element].label
    n = ",".join(str(x) for x in e.gain.translation)
    return f"e{k}:{e.tail}-{e.head};({n});{lab}"


def _dot(u, v):
    out = 0
    for a, b in zip(u, v):
        out = out + a * b
    return out


def vertex_bases(fw: OrbitFramework) -> list[list]:
    return [fw.free_basis(v) for v in range(1, fw.graph.vertex_count + 1)]


def _column_labels(fw: OrbitFramework, bases, deformation) -> list[str]:
    labels = []
    axes = "xyz" if fw.dimension <= 3 else None
    for v, basis in enumerate(bases, start=1):
        if len(basis) == fw.dimension and fw.stabilizers[v - 1] == ():
            for i in range(fw.dimension):
                labels.append(f"v{v}.{axes[i] if axes else i}")
        else:
            for i in range(len(basis)):
                labels.append(f"v{v}.f{i}")
    if deformation is not None:
        fam = deformation.family
        if deformation.variant == "flexible":
            labels.extend(f"L.{name}" for name in fam.param_names)
        else:
            labels.extend(f"L.{deformation.variant}{i}" for i in range(deformation.dimension))
    return labels


def gradient_rows(fw: OrbitFramework, positions, lattice, deform_mats, bases) -> list[list]:
    """Rows of the orbit matrix; works with Fraction or float data."""
    group = fw.group
    d = fw.dimension
    offsets, pos = [], 0
    for b in bases:
        offsets.append(pos)
        pos += len(b)
    width = pos + len(deform_mats)
    zero = 0.0 if positions and isinstance(positions[0][0], float) else Fraction(0)
    rows = []
    for e in fw.graph.edges:
        s = group.elements[e.gain.element].matrix
        n = e.gain.translation
        moved = apply_gain(e.gain, positions[e.head - 1], lattice, group) if isinstance(zero, Fraction) \
            else _apply_float(s, n, positions[e.head - 1], lattice)
        dv = [a - b for a, b in zip(positions[e.tail - 1], moved)]
        back = [-sum(s[j][i] * dv[j] for j in range(d)) for i in range(d)]   # -s^T d
        row = [zero] * width
        blocks = [(e.tail, dv), (e.head, back)]
        for v, block in blocks:
            basis = bases[v - 1]
            for c, bvec in enumerate(basis):
                row[offsets[v - 1] + c] = row[offsets[v - 1] + c] + _dot(bvec, block)
        for j, bmat in enumerate(deform_mats):
            nb = [sum(n[i] * bmat[i][c] for i in range(d)) for c in range(d)]
            row[pos + j] = -_dot(nb, dv)
        rows.append(row)
    return rows


def _apply_float(s, n, p, lattice):
    d = len(p)
    out = [sum(s[i][j] * p[j] for j in range(d)) for i in range(d)]
    if any(n):
        for ni, lrow in zip(n, lattice):
            if ni:
                out = [x + ni * y for x, y in zip(out, lrow)]
    return out


def _build(fw: OrbitFramework, kind: str, variant: str | None) -> OrbitRigidityMatrix:
    bases = vertex_bases(fw)
    deformation = None
    mats: list = []
    lattice = None
    if fw.family is not None:
        variant = variant or fw.variant
        deformation = lattice_deformation_space(fw.family, fw.theta, variant)
        mats = deformation.matrices()
        lattice = fw.lattice
    rows = gradient_rows(fw, fw.positions, lattice, mats, bases)
    return OrbitRigidityMatrix(
        entries=rows,
        row_labels=[edge_label(fw, k) for k in range(fw.graph.edge_count)],
        column_labels=_column_labels(fw, bases, deformation),
        kind=kind,
        variant=variant if fw.family is not None else None,
        deformation=deformation,
        vertex_bases=bases,
    )


def finite_rigidity_matrix(fw: OrbitFramework) -> OrbitRigidityMatrix:
    if fw.family is not None or not fw.group.is_trivial:
        raise FrameworkError("finite rigidity matrix needs a finite framework without symmetry")
    for k, e in enumerate(fw.graph.edges):
        if e.is_loop():
            raise FrameworkError(f"edge {k}: loop in a finite framework")
    return _build(fw, "finite", None)


def finite_orbit_matrix(fw: OrbitFramework) -> OrbitRigidityMatrix:
    if fw.family is not None:
        raise FrameworkError("finite orbit matrix needs a finite framework")
    for k, e in enumerate(fw.graph.edges):
        if any(e.gain.translation):
            raise FrameworkError(f"edge {k}: translation gain in a finite framework")
    return _build(fw, "finite-symmetric", None)


def periodic_orbit_matrix(fw: OrbitFramework, variant: str | None = None) -> OrbitRigidityMatrix:
    if fw.family is None:
        raise FrameworkError("periodic orbit matrix needs a lattice")
    for k, e in enumerate(fw.graph.edges):
        if e.gain.element != 0:
            raise FrameworkError(f"edge {k}: point-group element in a plain periodic framework")
    return _build(fw, "periodic", variant)


def combined_orbit_matrix(fw: OrbitFramework, variant: str | None = None) -> OrbitRigidityMatrix:
    if fw.family is None:
        raise FrameworkError("combined orbit matrix needs a lattice")
    if not fw.family.compatible_with(fw.group):
        raise FrameworkError(f"{fw.family.name} lattice is not compatible with {fw.group.schoenflies}")
    return _build(fw, "combined", variant)


def build_matrix(fw: OrbitFramework, variant: str | None = None) -> OrbitRigidityMatrix:
    kind = fw.kind
    if kind == "finite":
        return finite_rigidity_matrix(fw)
    if kind == "finite-symmetric":
        return finite_orbit_matrix(fw)
    if kind == "periodic":
        return periodic_orbit_matrix(fw, variant)
    return combined_orbit_matrix(fw, variant)


def squared_lengths(fw: OrbitFramework, positions=None, theta=None) -> list:
    lattice = fw.family.basis_fn(theta) if (fw.family is not None and theta is not None) else fw.lattice
    positions = fw.positions if positions is None else positions
    return [_dot(v, v) for v in (fw.edge_vector(e, positions, lattice) for e in fw.graph.edges)]


def constraint_residuals(fw: OrbitFramework, reference_lengths=None, *, squared: bool = False,
                         positions=None, theta=None) -> list:
    """1/2 (|d_e|^2 - l_e^2) per edge at the given (or stored) configuration."""
    current = squared_lengths(fw, positions, theta)
    if reference_lengths is None:
        ref = squared_lengths(fw)
    elif squared:
        ref = list(reference_lengths)
    else:
        ref = [x * x for x in reference_lengths]
    return [(c - r) / 2 for c, r in zip(current, ref)]


def displaced(fw: OrbitFramework, matrix: OrbitRigidityMatrix, direction: Sequence, t) -> tuple[list, tuple]:
    """Positions and theta after moving by t * direction in column coordinates."""
    velocities, lat = matrix.split_vector(list(direction))
    positions = []
    for p, u in zip(fw.positions, velocities):
        positions.append(tuple(p) if u is None else tuple(x + t * y for x, y in zip(p, u)))
    theta = fw.theta
    if matrix.deformation is not None and lat:
        coeffs = matrix.deformation.coefficients
        theta = tuple(th + t * sum((c * v[i] for c, v in zip(lat, coeffs)), Fraction(0) * t)
                      for i, th in enumerate(fw.theta))
    return positions, theta
