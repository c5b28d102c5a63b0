"""Point groups, semidirect-product gains and symmetry-compatible lattices.

All group elements are exact signed permutation matrices.  Three-fold
axes sit along (1,1,1) so that cubic and trigonal groups stay rational.
"""
from __future__ import annotations

import itertools
from dataclasses import dataclass, field
from fractions import Fraction
from functools import cached_property
from math import comb
from typing import Sequence

from .exact import (
    Matrix,
    Vector,
    det,
    identity,
    intersect_subspaces,
    inverse as mat_inverse,
    kernel_exact,
    mat_mul,
    mat_vec,
    span_basis,
    transpose,
)

DEFAULT_GROUP_BOUND = 96

IntMatrix = tuple[tuple[int, ...], ...]


class SymmetryError(ValueError):
    pass


def _freeze(m: Sequence[Sequence]) -> IntMatrix:
    out = []
    for row in m:
        r = []
        for x in row:
            x = Fraction(x)
            if x.denominator != 1:
                raise SymmetryError(f"non-integer group matrix entry {x}")
            r.append(int(x))
        out.append(tuple(r))
    return tuple(out)


def _matmul_int(a: IntMatrix, b: IntMatrix) -> IntMatrix:
    bt = list(zip(*b))
    return tuple(tuple(sum(x * y for x, y in zip(row, col)) for col in bt) for row in a)


def _transpose_int(a: IntMatrix) -> IntMatrix:
    return tuple(zip(*a))


def _eye(d: int) -> IntMatrix:
    return tuple(tuple(int(i == j) for j in range(d)) for i in range(d))


# ---------------------------------------------------------------------------
# element naming

def _axis_label(v: Sequence[int]) -> str:
    nz = [i for i, x in enumerate(v) if x != 0]
    if len(nz) == 1 and len(v) <= 3:
        return "xyz"[nz[0]]
    return "[" + ",".join(str(x) for x in v) + "]"


def _primitive(v: Sequence[Fraction]) -> tuple[int, ...]:
    """Integer multiple of v with gcd 1 and first nonzero entry positive."""
    from math import gcd, lcm

    den = 1
    for x in v:
        den = lcm(den, Fraction(x).denominator)
    ints = [int(Fraction(x) * den) for x in v]
    g = 0
    for x in ints:
        g = gcd(g, x)
    ints = [x // g for x in ints]
    first = next(x for x in ints if x != 0)
    if first < 0:
        ints = [-x for x in ints]
    return tuple(ints)


def _fixed_dim(m: IntMatrix, eig: int) -> list[Vector]:
    d = len(m)
    sys = [[m[i][j] - eig * int(i == j) for j in range(d)] for i in range(d)]
    return kernel_exact(sys)


def _rotation_order(trace_val: int, d: int) -> int:
    # 2D: tr = 2cos(phi); 3D: tr = 1 + 2cos(phi)
    c2 = trace_val if d == 2 else trace_val - 1  # 2cos(phi)
    return {2: 1, 1: 6, 0: 4, -1: 3, -2: 2}[c2]


def _rotation_power(m: IntMatrix, axis: Sequence[int] | None, n: int) -> int:
    """k with m = R(-2*pi*k/n) about ``axis`` (clockwise seen from the axis tip)."""
    if n <= 2:
        return 1
    d = len(m)
    if d == 2:
        # sin(phi) sign from m[1][0]
        return n - 1 if m[1][0] > 0 else 1
    a = axis
    # pick a vector not parallel to the axis
    for cand in ((1, 0, 0), (0, 1, 0), (0, 0, 1)):
        cr = (a[1] * cand[2] - a[2] * cand[1], a[2] * cand[0] - a[0] * cand[2], a[0] * cand[1] - a[1] * cand[0])
        if any(cr):
            v = cand
            break
    mv = tuple(sum(m[i][j] * v[j] for j in range(3)) for i in range(3))
    cr = (v[1] * mv[2] - v[2] * mv[1], v[2] * mv[0] - v[0] * mv[2], v[0] * mv[1] - v[1] * mv[0])
    s = sum(x * y for x, y in zip(cr, a))
    return n - 1 if s > 0 else 1


def _describe(m: IntMatrix) -> tuple[str, str]:
    """(base label, axis descriptor) for a signed permutation matrix."""
    d = len(m)
    eye = _eye(d)
    if m == eye:
        return "id", ""
    if m == tuple(tuple(-x for x in row) for row in eye):
        return ("C2" if d == 2 else "i"), ""
    tr = sum(m[i][i] for i in range(d))
    det_m = int(det(m))
    if d not in (2, 3):
        # higher dimensions: only reflections and -I are catalogued
        fixed = _fixed_dim(m, 1)
        if det_m == -1 and len(fixed) == d - 1:
            normal = _primitive(_fixed_dim(m, -1)[0])
            return "s", _axis_label(normal)
        return "g", ""
    if det_m == 1:
        n = _rotation_order(tr, d)
        axis = None
        if d == 3:
            axis = _primitive(_fixed_dim(m, 1)[0])
        k = _rotation_power(m, axis, n)
        base = f"C{n}" if k == 1 else f"C{n}^{k}"
        return base, _axis_label(axis) if axis else ""
    # improper
    if d == 2:
        normal = _primitive(_fixed_dim(m, -1)[0])
        return "s", _axis_label(normal)
    minus = _fixed_dim(m, -1)
    if len(minus) == 1 and len(_fixed_dim(m, 1)) == 2:
        return "s", _axis_label(_primitive(minus[0]))
    # rotoreflection: m = sigma_a * R(phi)
    axis = _primitive(minus[0])
    sigma = [[int(i == j) - 2 * Fraction(axis[i] * axis[j], sum(x * x for x in axis)) for j in range(3)] for i in range(3)]
    rot = mat_mul(sigma, m)
    n = _rotation_order(int(sum(rot[i][i] for i in range(3))), 3)
    k = _rotation_power(rot, axis, n)
    base = f"S{n}" if k == 1 else f"S{n}^{k}"
    return base, _axis_label(axis)


# ---------------------------------------------------------------------------
# group types

@dataclass(frozen=True)
class GroupElement:
    matrix: IntMatrix
    label: str

    @property
    def dimension(self) -> int:
        return len(self.matrix)

    def apply(self, v: Sequence) -> Vector:
        return [sum((Fraction(x) * y for x, y in zip(row, v)), Fraction(0)) for row in self.matrix]

    @property
    def determinant(self) -> int:
        return int(det(self.matrix))


@dataclass(frozen=True, eq=False)
class PointGroup:
    dimension: int
    generators: tuple[GroupElement, ...]
    elements: tuple[GroupElement, ...]
    schoenflies: str
    hermann_mauguin: str = ""
    orbifold: str = ""

    @property
    def order(self) -> int:
        return len(self.elements)

    @cached_property
    def _index(self) -> dict[IntMatrix, int]:
        return {e.matrix: i for i, e in enumerate(self.elements)}

    @cached_property
    def _labels(self) -> dict[str, int]:
        return {e.label: i for i, e in enumerate(self.elements)}

    def index_of(self, matrix: Sequence[Sequence]) -> int:
        key = _freeze(matrix)
        try:
            return self._index[key]
        except KeyError:
            raise SymmetryError(f"matrix {key} is not an element of {self.schoenflies}") from None

    def index_by_label(self, label: str) -> int:
        try:
            return self._labels[label]
        except KeyError:
            known = ", ".join(e.label for e in self.elements)
            raise SymmetryError(f"unknown element {label!r} in {self.schoenflies}; known: {known}") from None

    @cached_property
    def table(self) -> list[list[int]]:
        return [[self._index[_matmul_int(a.matrix, b.matrix)] for b in self.elements] for a in self.elements]

    @cached_property
    def inverses(self) -> list[int]:
        return [self._index[_transpose_int(e.matrix)] for e in self.elements]

    def product(self, i: int, j: int) -> int:
        return self.table[i][j]

    def inverse_index(self, i: int) -> int:
        return self.inverses[i]

    @property
    def is_trivial(self) -> bool:
        return self.order == 1

    def __eq__(self, other) -> bool:
        if not isinstance(other, PointGroup):
            return NotImplemented
        return self.dimension == other.dimension and self._index.keys() == other._index.keys()

    def __hash__(self) -> int:
        return hash((self.dimension, frozenset(self._index)))

    def __repr__(self) -> str:
        return f"PointGroup({self.schoenflies!r}, dim={self.dimension}, order={self.order})"


def _close(gens: list[IntMatrix], d: int, bound: int) -> list[IntMatrix]:
    eye = _eye(d)
    elements = [eye]
    seen = {eye}
    frontier = [eye]
    while frontier:
        nxt = []
        for a in frontier:
            for g in gens:
                prod = _matmul_int(a, g)
                if prod not in seen:
                    seen.add(prod)
                    elements.append(prod)
                    nxt.append(prod)
                    if len(elements) > bound:
                        raise SymmetryError(f"group enumeration exceeded bound {bound}")
        frontier = nxt
    return elements


def _assign_labels(mats: list[IntMatrix]) -> list[str]:
    described = [_describe(m) for m in mats]
    counts: dict[str, int] = {}
    for base, _ in described:
        counts[base] = counts.get(base, 0) + 1
    out = []
    for base, axis in described:
        out.append(base + axis if counts[base] > 1 and axis else base)
    if len(set(out)) != len(out):
        # fall back to positional suffixes
        seen: dict[str, int] = {}
        fixed = []
        for lab in out:
            seen[lab] = seen.get(lab, 0) + 1
            fixed.append(lab if seen[lab] == 1 else f"{lab}#{seen[lab]}")
        out = fixed
    return out


def make_group(generators: Sequence[Sequence[Sequence]], dimension: int, schoenflies: str = "",
               hermann_mauguin: str = "", orbifold: str = "", bound: int = DEFAULT_GROUP_BOUND) -> PointGroup:
    """Enumerate the closure of integer orthogonal generators."""
    gens = [_freeze(g) for g in generators]
    for g in gens:
        if len(g) != dimension:
            raise SymmetryError("generator dimension mismatch")
        if _matmul_int(_transpose_int(g), g) != _eye(dimension):
            raise SymmetryError(f"generator {g} is not orthogonal")
    mats = _close(gens, dimension, bound)
    labels = _assign_labels(mats)
    elements = tuple(GroupElement(m, lab) for m, lab in zip(mats, labels))
    lookup = {e.matrix: e for e in elements}
    return PointGroup(dimension, tuple(lookup[g] for g in gens), elements,
                      schoenflies, hermann_mauguin, orbifold)


# ---------------------------------------------------------------------------
# catalog

def _diag(*xs: int) -> IntMatrix:
    return tuple(tuple(x if i == j else 0 for j in range(len(xs))) for i, x in enumerate(xs))


_C4Z = ((0, -1, 0), (1, 0, 0), (0, 0, 1))
_S4Z = ((0, -1, 0), (1, 0, 0), (0, 0, -1))
_C2Z = _diag(-1, -1, 1)
_C2X = _diag(1, -1, -1)
_MX = _diag(-1, 1, 1)
_MZ = _diag(1, 1, -1)
_INV3 = _diag(-1, -1, -1)
_C3 = ((0, 0, 1), (1, 0, 0), (0, 1, 0))          # (x,y,z) -> (z,x,y)
_C2D = ((0, -1, 0), (-1, 0, 0), (0, 0, -1))      # half-turn about (1,-1,0)
_SWAP_XY = ((0, 1, 0), (1, 0, 0), (0, 0, 1))     # mirror with normal (1,-1,0)

# name -> (generators, hermann-mauguin, orbifold, crystal family)
CATALOG_3D: dict[str, tuple[tuple[IntMatrix, ...], str, str, str]] = {
    "C1": ((), "1", "11", "triclinic"),
    "Ci": ((_INV3,), "-1", "1x", "triclinic"),
    "C2": ((_C2Z,), "2", "22", "monoclinic"),
    "Cs": ((_MZ,), "m", "1*", "monoclinic"),
    "C2h": ((_C2Z, _INV3), "2/m", "2*", "monoclinic"),
    "C2v": ((_C2Z, _MX), "mm2", "*22", "orthorhombic"),
    "D2": ((_C2Z, _C2X), "222", "222", "orthorhombic"),
    "D2h": ((_C2Z, _C2X, _INV3), "mmm", "*222", "orthorhombic"),
    "C4": ((_C4Z,), "4", "44", "tetragonal"),
    "S4": ((_S4Z,), "-4", "2x", "tetragonal"),
    "C4h": ((_C4Z, _MZ), "4/m", "4*", "tetragonal"),
    "C4v": ((_C4Z, _MX), "4mm", "*44", "tetragonal"),
    "D2d": ((_S4Z, _C2X), "-42m", "2*2", "tetragonal"),
    "D4": ((_C4Z, _C2X), "422", "422", "tetragonal"),
    "D4h": ((_C4Z, _C2X, _INV3), "4/mmm", "*422", "tetragonal"),
    "C3": ((_C3,), "3", "33", "rhombohedral"),
    "S6": ((_C3, _INV3), "-3", "3x", "rhombohedral"),
    "D3": ((_C3, _C2D), "32", "322", "rhombohedral"),
    "C3v": ((_C3, _SWAP_XY), "3m", "*33", "rhombohedral"),
    "D3d": ((_C3, _C2D, _INV3), "-3m", "2*3", "rhombohedral"),
    "T": ((_C3, _C2Z), "23", "332", "cubic"),
    "Th": ((_C3, _C2Z, _INV3), "m-3", "3*2", "cubic"),
    "Td": ((_C3, _C2Z, _SWAP_XY), "-43m", "*332", "cubic"),
    "O": ((_C3, _C4Z), "432", "432", "cubic"),
    "Oh": ((_C3, _C4Z, _INV3), "m-3m", "*432", "cubic"),
}

CATALOG_2D: dict[str, tuple[tuple[IntMatrix, ...], str, str, str]] = {
    "C1": ((), "1", "o", "parallelogram"),
    "C2": ((_diag(-1, -1),), "2", "2222", "parallelogram"),
    "Cs": ((_diag(-1, 1),), "m", "**", "rectangular"),
    "C2v": ((_diag(-1, -1), _diag(-1, 1)), "2mm", "*2222", "rectangular"),
    "C4": ((((0, -1), (1, 0)),), "4", "442", "square"),
    "C4v": ((((0, -1), (1, 0)), _diag(-1, 1)), "4mm", "*442", "square"),
}

# orders used to cross-check enumeration
CATALOG_ORDERS = {
    2: {"C1": 1, "C2": 2, "Cs": 2, "C2v": 4, "C4": 4, "C4v": 8},
    3: {"C1": 1, "Ci": 2, "C2": 2, "Cs": 2, "C2h": 4, "C2v": 4, "D2": 4, "D2h": 8,
        "C4": 4, "S4": 4, "C4h": 8, "C4v": 8, "D2d": 8, "D4": 8, "D4h": 16,
        "C3": 3, "S6": 6, "D3": 6, "C3v": 6, "D3d": 12,
        "T": 12, "Th": 24, "Td": 24, "O": 24, "Oh": 48},
}

_ALIASES_2D = {"Ci": "C2", "C2h": "C2v", "D2": "C2v", "D4": "C4v"}

_GROUP_CACHE: dict[tuple[str, int], PointGroup] = {}


def _general_catalog(name: str, d: int):
    # dimensions other than 2 and 3: identity, inversion and a single mirror
    if name == "C1":
        return (), "1", "", "triclinic"
    if name == "Ci":
        return (_diag(*([-1] * d)),), "-1", "", "triclinic"
    if name == "Cs":
        return (_diag(*([1] * (d - 1) + [-1])),), "m", "", "monoclinic"
    return None


def catalog_entry(schoenflies: str, dimension: int):
    if dimension == 3:
        entry = CATALOG_3D.get(schoenflies)
    elif dimension == 2:
        entry = CATALOG_2D.get(schoenflies)
        if entry is None and schoenflies in _ALIASES_2D:
            raise SymmetryError(
                f"{schoenflies} in 2D acts as {_ALIASES_2D[schoenflies]}; use {_ALIASES_2D[schoenflies]!r}")
    elif dimension >= 2:
        entry = _general_catalog(schoenflies, dimension)
    else:
        raise SymmetryError(f"unsupported dimension {dimension}")
    if entry is None:
        raise SymmetryError(f"unknown point group {schoenflies!r} in dimension {dimension}")
    return entry


def enumerate_group(schoenflies: str, dimension: int, bound: int = DEFAULT_GROUP_BOUND) -> PointGroup:
    """Catalog group in standard orientation."""
    key = (schoenflies, dimension)
    if key in _GROUP_CACHE and bound == DEFAULT_GROUP_BOUND:
        return _GROUP_CACHE[key]
    gens, hm, orb, _ = catalog_entry(schoenflies, dimension)
    group = make_group(gens, dimension, schoenflies, hm, orb, bound=bound)
    expected = CATALOG_ORDERS.get(dimension, {}).get(schoenflies)
    if expected is not None and group.order != expected:
        raise SymmetryError(f"{schoenflies}: enumerated order {group.order} != {expected}")
    if bound == DEFAULT_GROUP_BOUND:
        _GROUP_CACHE[key] = group
    return group


def trivial_group(dimension: int) -> PointGroup:
    return enumerate_group("C1", dimension)


def catalog_names(dimension: int) -> list[str]:
    if dimension == 3:
        return list(CATALOG_3D)
    if dimension == 2:
        return list(CATALOG_2D)
    return ["C1", "Ci", "Cs"]


# ---------------------------------------------------------------------------
# gains: elements of Z^d x| S

@dataclass(frozen=True)
class Gain:
    translation: tuple[int, ...]
    element: int = 0

    def __post_init__(self):
        object.__setattr__(self, "translation", tuple(int(x) for x in self.translation))

    @classmethod
    def identity(cls, d: int) -> "Gain":
        return cls((0,) * d, 0)

    def is_identity(self) -> bool:
        return self.element == 0 and not any(self.translation)


def _act_int(group: PointGroup, element: int, n: Sequence[int]) -> tuple[int, ...]:
    m = group.elements[element].matrix
    return tuple(sum(m[i][j] * n[j] for j in range(len(n))) for i in range(len(n)))


def compose(g1: Gain, g2: Gain, group: PointGroup) -> Gain:
    """(n1, s1)(n2, s2) = (n1 + s1 n2, s1 s2)."""
    moved = _act_int(group, g1.element, g2.translation)
    return Gain(tuple(a + b for a, b in zip(g1.translation, moved)), group.product(g1.element, g2.element))


def inverse(g: Gain, group: PointGroup) -> Gain:
    inv = group.inverse_index(g.element)
    moved = _act_int(group, inv, g.translation)
    return Gain(tuple(-x for x in moved), inv)


def gain_label(g: Gain, group: PointGroup) -> str:
    return f"({','.join(map(str, g.translation))};{group.elements[g.element].label})"


# ---------------------------------------------------------------------------
# fixed subspaces and symmetric rigid motions

def fixed_subspace(group: PointGroup, elements: Sequence[int] | None = None) -> list[Vector]:
    """Exact basis of the vectors fixed by every element (default: the generators)."""
    d = group.dimension
    mats = [group.elements[i].matrix for i in elements] if elements is not None else [g.matrix for g in group.generators]
    rows = []
    for m in mats:
        for i in range(d):
            rows.append([m[i][j] - int(i == j) for j in range(d)])
    if not rows:
        return [[Fraction(int(i == j)) for i in range(d)] for j in range(d)]
    return kernel_exact(rows)


def _skew_basis(d: int) -> list[Matrix]:
    out = []
    for i, j in itertools.combinations(range(d), 2):
        a = [[Fraction(0)] * d for _ in range(d)]
        a[i][j] = Fraction(1)
        a[j][i] = Fraction(-1)
        out.append(a)
    return out


def symmetric_rigid_motions(group: PointGroup) -> list[tuple[Matrix, Vector]]:
    """Basis of pairs (A, t), A skew, with sA = As and st = t for all generators.

    These are the symmetric infinitesimal rigid motions x -> Ax + t.
    """
    d = group.dimension
    skews = _skew_basis(d)
    n_a = len(skews)
    n_unknowns = n_a + d
    rows: list[list[Fraction]] = []
    for g in group.generators:
        s = g.matrix
        # commutator s A - A s, linear in the skew coordinates
        comms = [mat_mul(s, a) for a in skews]
        comms2 = [mat_mul(a, s) for a in skews]
        for i in range(d):
            for j in range(d):
                row = [comms[k][i][j] - comms2[k][i][j] for k in range(n_a)] + [Fraction(0)] * d
                rows.append(row)
        for i in range(d):
            rows.append([Fraction(0)] * n_a + [Fraction(s[i][j] - int(i == j)) for j in range(d)])
    if rows:
        ker = kernel_exact(rows)
    else:
        ker = kernel_exact([], n_unknowns)
    out = []
    for v in ker:
        a = [[sum((v[k] * skews[k][i][j] for k in range(n_a)), Fraction(0)) for j in range(d)] for i in range(d)]
        out.append((a, list(v[n_a:])))
    return out


def trivial_motion_dim_finite(group: PointGroup) -> int:
    return len(symmetric_rigid_motions(group))


# ---------------------------------------------------------------------------
# lattice families

VARIANTS = ("flexible", "distortional", "scaling", "hydrostatic", "fixed")


def check_variant(variant: str) -> str:
    if variant not in VARIANTS:
        raise SymmetryError(f"unknown lattice variant {variant!r}; expected one of {VARIANTS}")
    return variant


def _unit(d: int, i: int, j: int) -> Matrix:
    m = [[Fraction(0)] * d for _ in range(d)]
    m[i][j] = Fraction(1)
    return m


@dataclass(frozen=True)
class LatticeFamily:
    """Linear family L(theta) = sum theta_i E_i; rows of L are lattice vectors."""

    name: str
    dimension: int
    param_names: tuple[str, ...]
    generators: tuple[Matrix, ...]   # E_i = dL/dtheta_i

    def __hash__(self) -> int:
        return hash((self.name, self.dimension, self.param_names))

    @property
    def parameter_count(self) -> int:
        return len(self.generators)

    def basis_fn(self, theta: Sequence) -> Matrix:
        if len(theta) != self.parameter_count:
            raise SymmetryError(f"{self.name} lattice needs {self.parameter_count} parameters, got {len(theta)}")
        d = self.dimension
        theta = [Fraction(t) for t in theta]
        return [[sum((t * e[i][j] for t, e in zip(theta, self.generators)), Fraction(0)) for j in range(d)]
                for i in range(d)]

    def combine(self, coeffs: Sequence) -> Matrix:
        """sum c_i E_i for a tangent direction given in parameter coordinates."""
        return self.basis_fn(coeffs)

    def is_valid(self, theta: Sequence) -> bool:
        lat = self.basis_fn(theta)
        if det(lat) <= 0:
            return False
        if self.name == "rhombohedral":
            x, y = (Fraction(t) for t in theta)
            return x > 0 and -x / 2 < y < x
        return True

    def integer_conjugator(self, s: IntMatrix, theta: Sequence) -> Matrix:
        """M_s with L s^T = M_s L."""
        lat = self.basis_fn(theta)
        return mat_mul(mat_mul(lat, transpose(s)), mat_inverse(lat))

    def compatible_with(self, group: PointGroup, samples: Sequence[Sequence] | None = None) -> bool:
        """True when every generator maps the lattice onto itself for all theta.

        Also requires the induced action on integer translation vectors to be
        the element matrix itself, which is what gain composition uses.
        """
        if group.dimension != self.dimension:
            return False
        samples = samples or self.sample_thetas()
        for g in group.generators:
            for theta in samples:
                m = self.integer_conjugator(g.matrix, theta)
                if any(Fraction(x).denominator != 1 for row in m for x in row):
                    return False
                if [[int(x) for x in row] for row in m] != [list(r) for r in _transpose_int(g.matrix)]:
                    return False
        return True

    def sample_thetas(self) -> list[list[Fraction]]:
        """Three fixed admissible parameter points."""
        out = []
        for k, base in enumerate((Fraction(3, 2), Fraction(7, 5), Fraction(11, 6))):
            theta = [base + Fraction(i, 7 + k) for i in range(self.parameter_count)]
            if self.name == "rhombohedral":
                theta = [base, Fraction(1, 3 + k)]
            out.append(theta)
        return out


def _lower_triangular_family(name: str, d: int) -> LatticeFamily:
    gens, names = [], []
    for i in range(d):
        for j in range(i + 1):
            gens.append(_unit(d, i, j))
            names.append(f"t{i + 1}{j + 1}")
    return LatticeFamily(name, d, tuple(names), tuple(gens))


def _monoclinic_family(d: int) -> LatticeFamily:
    # lower-triangular block on the first d-1 axes, last axis perpendicular
    gens, names = [], []
    for i in range(d - 1):
        for j in range(i + 1):
            gens.append(_unit(d, i, j))
            names.append(f"t{i + 1}{j + 1}")
    gens.append(_unit(d, d - 1, d - 1))
    names.append(f"t{d}{d}")
    return LatticeFamily("monoclinic", d, tuple(names), tuple(gens))


def _diag_family(name: str, d: int, blocks: Sequence[Sequence[int]], names: Sequence[str]) -> LatticeFamily:
    gens = []
    for block in blocks:
        m = [[Fraction(0)] * d for _ in range(d)]
        for i in block:
            m[i][i] = Fraction(1)
        gens.append(m)
    return LatticeFamily(name, d, tuple(names), tuple(gens))


def _rhombohedral_family() -> LatticeFamily:
    ex = [[Fraction(int(i == j)) for j in range(3)] for i in range(3)]
    ey = [[Fraction(int(i != j)) for j in range(3)] for i in range(3)]
    return LatticeFamily("rhombohedral", 3, ("x", "y"), (ex, ey))


FAMILY_NAMES = ("triclinic", "monoclinic", "orthorhombic", "tetragonal", "rhombohedral", "cubic",
                "parallelogram", "rectangular", "square")


def make_family(name: str, dimension: int) -> LatticeFamily:
    d = dimension
    if name in ("triclinic", "parallelogram"):
        if (name == "parallelogram") != (d == 2):
            raise SymmetryError(f"family {name} not available in dimension {d}")
        return _lower_triangular_family(name, d)
    if name == "monoclinic" and d >= 3:
        return _monoclinic_family(d)
    if name == "orthorhombic" and d == 3:
        return _diag_family(name, 3, [[0], [1], [2]], ("a", "b", "c"))
    if name == "tetragonal" and d == 3:
        return _diag_family(name, 3, [[0, 1], [2]], ("a", "c"))
    if name == "rhombohedral" and d == 3:
        return _rhombohedral_family()
    if name == "cubic" and d == 3:
        return _diag_family(name, 3, [[0, 1, 2]], ("a",))
    if name == "rectangular" and d == 2:
        return _diag_family(name, 2, [[0], [1]], ("a", "b"))
    if name == "square" and d == 2:
        return _diag_family(name, 2, [[0, 1]], ("a",))
    raise SymmetryError(f"unknown lattice family {name!r} in dimension {d}")


def lattice_family_for(group: PointGroup) -> LatticeFamily:
    _, _, _, fam = catalog_entry(group.schoenflies, group.dimension)
    return make_family(fam, group.dimension)


@dataclass(frozen=True)
class DeformationSpace:
    """Allowed lattice velocities, as coefficient vectors over the family generators."""

    family: LatticeFamily
    variant: str
    coefficients: tuple[tuple[Fraction, ...], ...]

    @property
    def dimension(self) -> int:
        return len(self.coefficients)

    def matrices(self) -> list[Matrix]:
        return [self.family.combine(c) for c in self.coefficients]


def _flat(m: Matrix) -> list[Fraction]:
    return [x for row in m for x in row]


def lattice_deformation_space(family: LatticeFamily, theta0: Sequence, variant: str) -> DeformationSpace:
    check_variant(variant)
    p = family.parameter_count
    d = family.dimension
    theta0 = [Fraction(t) for t in theta0]
    lat0 = family.basis_fn(theta0)
    if det(lat0) == 0:
        raise SymmetryError("singular lattice matrix")
    eye = [[Fraction(int(i == j)) for j in range(p)] for i in range(p)]
    if variant == "flexible":
        basis = eye
    elif variant == "fixed":
        basis = []
    elif variant == "hydrostatic":
        basis = [theta0]
    elif variant == "distortional":
        inv0 = mat_inverse(lat0)
        functional = []
        for e in family.generators:
            prod = mat_mul(inv0, e)
            functional.append(sum((prod[i][i] for i in range(d)), Fraction(0)))
        basis = kernel_exact([functional])
    else:  # scaling
        # unknowns (c_1..c_p, delta_1..delta_d): sum c_i E_i - diag(delta) L0 = 0
        cols = [_flat(e) for e in family.generators]
        for k in range(d):
            dl = [[-lat0[i][j] if i == k else Fraction(0) for j in range(d)] for i in range(d)]
            cols.append(_flat(dl))
        ker = kernel_exact(transpose(cols))
        basis = span_basis([v[:p] for v in ker])
    basis = span_basis(basis) if basis else []
    return DeformationSpace(family, variant, tuple(tuple(v) for v in basis))


def lattice_parameter_count(family: LatticeFamily, theta0: Sequence, variant: str) -> int:
    return lattice_deformation_space(family, theta0, variant).dimension


def nosym_lattice_dim(variant: str, d: int) -> int:
    """Lattice deformation count with no symmetry (triclinic / parallelogram family)."""
    fam = make_family("parallelogram" if d == 2 else "triclinic", d)
    return lattice_deformation_space(fam, fam.sample_thetas()[0], variant).dimension


def symmetric_lattice_dim(group: PointGroup, variant: str, family: LatticeFamily | None = None) -> int:
    family = family or lattice_family_for(group)
    return lattice_deformation_space(family, family.sample_thetas()[0], variant).dimension


def translation_dim(group: PointGroup) -> int:
    return len(fixed_subspace(group))


def finite_trivial_count(d: int) -> int:
    return comb(d + 1, 2)
