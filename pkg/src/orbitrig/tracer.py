"""Predictor-corrector continuation of finite mechanisms."""
from __future__ import annotations

import csv
import io
from dataclasses import dataclass, field
from fractions import Fraction

import numpy as np

from .analysis import DEFAULT_TOL, motion_space
from .framework import OrbitFramework, expand_patch
from .matrices import gradient_rows, vertex_bases
from .symmetry import fixed_subspace, symmetric_rigid_motions

MAX_NEWTON = 25


class RigidFrameworkError(ValueError):
    pass


@dataclass
class TraceStep:
    positions: np.ndarray          # (v0, d)
    theta: np.ndarray
    drift: float
    iterations: int


@dataclass
class TracePath:
    steps: list[TraceStep]
    step_size: float
    tol: float
    direction_history: list[np.ndarray] = field(default_factory=list)
    termination: str = "completed"
    message: str = ""

    @property
    def max_drift(self) -> float:
        return max((s.drift for s in self.steps), default=0.0)

    def displacement(self) -> float:
        a, b = self.steps[0], self.steps[-1]
        return float(max(np.max(np.abs(b.positions - a.positions)),
                         np.max(np.abs(b.theta - a.theta)) if a.theta.size else 0.0))


class _System:
    """Float replay of an orbit framework: state is (positions, theta)."""

    def __init__(self, fw: OrbitFramework, rank_tol: float):
        self.fw = fw
        self.rank_tol = rank_tol
        self.d = fw.dimension
        self.bases = [np.array([[float(x) for x in b] for b in basis]).reshape(len(basis), self.d)
                      for basis in vertex_bases(fw)]
        self.vertex_cols = sum(len(b) for b in self.bases)
        self.family = fw.family
        self.variant = fw.variant
        if self.family is not None:
            self.gens = [np.array([[float(x) for x in row] for row in e]) for e in self.family.generators]
        p0 = np.array([[float(x) for x in p] for p in fw.positions]).reshape(len(fw.positions), self.d)
        th0 = np.array([float(t) for t in fw.theta])
        self.ref_sq = self.squared_lengths(p0, th0)

    # lattice ---------------------------------------------------------
    def lattice(self, theta):
        if self.family is None:
            return None
        return sum(t * g for t, g in zip(theta, self.gens))

    def deformation(self, theta) -> np.ndarray:
        """Columns: allowed theta-velocities (orthonormal) for the variant at theta."""
        if self.family is None:
            return np.zeros((0, 0))
        p = len(self.gens)
        v = self.variant
        if v == "flexible":
            return np.eye(p)
        if v == "fixed" or p == 0:
            return np.zeros((p, 0))
        if v == "hydrostatic":
            return (theta / np.linalg.norm(theta)).reshape(p, 1)
        lat = self.lattice(theta)
        if v == "distortional":
            inv = np.linalg.inv(lat)
            a = np.array([[np.trace(inv @ g) for g in self.gens]])
        else:  # scaling: sum c_i E_i - diag(delta) L = 0
            d = self.d
            cols = [g.ravel() for g in self.gens]
            for k in range(d):
                m = np.zeros((d, d))
                m[k, :] = -lat[k, :]
                cols.append(m.ravel())
            big = np.array(cols).T
            ns = _null_space(big, 1e-12)
            if ns.shape[1] == 0:
                return np.zeros((p, 0))
            sub = ns[:p, :]
            u, s, _ = np.linalg.svd(sub, full_matrices=False)
            return u[:, s > 1e-12 * max(s.max(), 1.0)]
        return _null_space(a, 1e-12)

    # geometry --------------------------------------------------------
    def edge_vectors(self, pos, theta):
        lat = self.lattice(theta)
        group = self.fw.group
        out = []
        for e in self.fw.graph.edges:
            s = np.array(group.elements[e.gain.element].matrix, dtype=float)
            moved = s @ pos[e.head - 1]
            if lat is not None:
                moved = moved + np.array(e.gain.translation, dtype=float) @ lat
            out.append(pos[e.tail - 1] - moved)
        return np.array(out).reshape(len(out), self.d)

    def squared_lengths(self, pos, theta):
        ev = self.edge_vectors(pos, theta)
        return np.einsum("ij,ij->i", ev, ev) if len(ev) else np.zeros(0)

    def residual(self, pos, theta):
        return 0.5 * (self.squared_lengths(pos, theta) - self.ref_sq)

    def drift(self, pos, theta) -> float:
        if not len(self.ref_sq):
            return 0.0
        return float(np.max(np.abs(np.sqrt(self.squared_lengths(pos, theta)) - np.sqrt(self.ref_sq))))

    def jacobian(self, pos, theta, dmat):
        lat = self.lattice(theta)
        mats = [sum(c * g for c, g in zip(col, self.gens)) for col in dmat.T] if dmat.size else []
        rows = gradient_rows(self.fw, [list(map(float, p)) for p in pos],
                             lat.tolist() if lat is not None else None,
                             [m.tolist() for m in mats], [b.tolist() for b in self.bases])
        width = self.vertex_cols + len(mats)
        return np.array(rows, dtype=float).reshape(len(rows), width)

    def chord_residual(self, pos0, th0, pos, th, h):
        dist2 = np.sum((pos - pos0) ** 2) + np.sum((th - th0) ** 2)
        return 0.5 * (dist2 - h * h)

    def chord_gradient(self, pos0, th0, pos, th, dmat):
        g = []
        for i, b in enumerate(self.bases):
            if len(b):
                g.extend(b @ (pos[i] - pos0[i]))
        if dmat.size:
            g.extend(dmat.T @ (th - th0))
        return np.array(g, dtype=float).reshape(1, -1)

    def move(self, pos, theta, dmat, vec):
        pos = pos.copy()
        k = 0
        for i, b in enumerate(self.bases):
            n = len(b)
            if n:
                pos[i] = pos[i] + vec[k:k + n] @ b
            k += n
        if dmat.size:
            theta = theta + dmat @ vec[k:]
        return pos, theta

    def trivial(self, pos, dmat) -> np.ndarray:
        """Rows spanning the trivial motions at this configuration (column coordinates)."""
        kind = self.fw.kind
        d = self.d
        vecs = []
        if kind in ("finite", "finite-symmetric"):
            if kind == "finite":
                motions = []
                for i in range(d):
                    for j in range(i + 1, d):
                        a = np.zeros((d, d))
                        a[i, j], a[j, i] = 1.0, -1.0
                        motions.append((a, np.zeros(d)))
                motions += [(np.zeros((d, d)), np.eye(d)[i]) for i in range(d)]
            else:
                motions = [(np.array(a, dtype=float), np.array(t, dtype=float))
                           for a, t in symmetric_rigid_motions(self.fw.group)]
            for a, t in motions:
                vec = []
                for p, b in zip(pos, self.bases):
                    u = a @ p + t
                    vec.extend(np.linalg.lstsq(b.T, u, rcond=None)[0] if len(b) else [])
                vecs.append(vec)
        else:
            taus = fixed_subspace(self.fw.group) if kind == "combined" else np.eye(d)
            taus = np.array([[float(x) for x in t] for t in taus]).reshape(-1, d)
            lat_cols = dmat.shape[1] if dmat.size else 0
            for tau in taus:
                vec = []
                for b in self.bases:
                    vec.extend(np.linalg.lstsq(b.T, tau, rcond=None)[0] if len(b) else [])
                vec.extend([0.0] * lat_cols)
                vecs.append(vec)
        if not vecs:
            return np.zeros((0, self.vertex_cols + (dmat.shape[1] if dmat.size else 0)))
        m = np.array(vecs, dtype=float)
        u, s, vt = np.linalg.svd(m, full_matrices=False)
        return vt[s > 1e-12 * max(s.max(), 1.0)]


def _null_space(a: np.ndarray, tol: float) -> np.ndarray:
    rows, cols = a.shape
    if rows == 0:
        return np.eye(cols)
    u, s, vt = np.linalg.svd(a, full_matrices=True)
    rank = int(np.sum(s > tol * s[0])) if s.size and s[0] > 0 else 0
    return vt[rank:].T


def _nontrivial_kernel(jac: np.ndarray, trivial: np.ndarray, rank_tol: float) -> tuple[np.ndarray, int]:
    """Orthonormal columns spanning kernel ⊖ trivial, plus the numerical nullity."""
    ker = _null_space(jac, rank_tol)
    nullity = ker.shape[1]
    if trivial.size:
        q, _ = np.linalg.qr(trivial.T)
        ker = ker - q @ (q.T @ ker)
    if ker.shape[1] == 0:
        return ker, nullity
    u, s, _ = np.linalg.svd(ker, full_matrices=False)
    keep = s > 1e-6
    return u[:, keep], nullity


def trace(fw: OrbitFramework, steps: int = 100, step_size: float = 1e-2, tol: float = 1e-12,
          direction_index: int = 0, rank_tol: float = DEFAULT_TOL, sign: float = 1.0,
          initial_direction: np.ndarray | None = None) -> TracePath:
    ms = motion_space(fw)
    if ms.flex_dimension < 1:
        raise RigidFrameworkError(f"no nontrivial kernel: framework is infinitesimally rigid "
                                  f"(flex dimension {ms.flex_dimension})")
    sysm = _System(fw, rank_tol)
    pos = np.array([[float(x) for x in p] for p in fw.positions]).reshape(len(fw.positions), fw.dimension)
    theta = np.array([float(t) for t in fw.theta])
    path = TracePath([TraceStep(pos.copy(), theta.copy(), 0.0, 0)], step_size, tol)
    prev = None
    nullity0 = None
    for _ in range(steps):
        dmat = sysm.deformation(theta)
        jac = sysm.jacobian(pos, theta, dmat)
        triv = sysm.trivial(pos, dmat)
        basis, nullity = _nontrivial_kernel(jac, triv, rank_tol)
        if nullity0 is None:
            nullity0 = nullity
        elif nullity != nullity0:
            path.termination, path.message = "rank-change", f"nullity {nullity0} -> {nullity}"
            break
        if basis.shape[1] == 0:
            path.termination, path.message = "flex-exhausted", "no nontrivial direction left"
            break
        if prev is None:
            if initial_direction is not None:
                v = basis @ (basis.T @ np.asarray(initial_direction, dtype=float))
            else:
                if direction_index >= basis.shape[1]:
                    raise ValueError(f"direction index {direction_index} out of range "
                                     f"({basis.shape[1]} nontrivial directions)")
                v = sign * basis[:, direction_index]
        else:
            v = basis @ (basis.T @ prev)
        norm = np.linalg.norm(v)
        if norm < 1e-8:
            path.termination, path.message = "flex-exhausted", "direction lost continuity"
            break
        v = v / norm
        # predictor
        new_pos, new_theta = sysm.move(pos, theta, dmat, step_size * v)
        # corrector: minimum-norm Newton on lengths plus the chord |x - x_k| = h,
        # which makes a step and its reverse land on each other
        ok = False
        iters = 0
        r = np.zeros(0)
        for iters in range(0, MAX_NEWTON + 1):
            r = np.append(sysm.residual(new_pos, new_theta),
                          sysm.chord_residual(pos, theta, new_pos, new_theta, step_size))
            if np.max(np.abs(r)) <= tol:
                ok = True
                break
            if iters == MAX_NEWTON:
                break
            dm = sysm.deformation(new_theta)
            j = np.vstack([sysm.jacobian(new_pos, new_theta, dm),
                           sysm.chord_gradient(pos, theta, new_pos, new_theta, dm)])
            delta = np.linalg.lstsq(j, -r, rcond=None)[0]
            new_pos, new_theta = sysm.move(new_pos, new_theta, dm, delta)
        if not ok:
            path.termination, path.message = "newton-failure", f"residual {np.max(np.abs(r)):.3e}"
            break
        pos, theta = new_pos, new_theta
        prev = v
        path.direction_history.append(v)
        path.steps.append(TraceStep(pos.copy(), theta.copy(), sysm.drift(pos, theta), iters))
    return path


# ---------------------------------------------------------------------------
# export

def _csv(path: TracePath, fw: OrbitFramework) -> bytes:
    d = fw.dimension
    axes = "xyz" if d <= 3 else [str(i) for i in range(d)]
    header = ["step"]
    for v in range(1, fw.graph.vertex_count + 1):
        header += [f"v{v}.{axes[i]}" for i in range(d)]
    if fw.family is not None:
        header += [f"theta.{n}" for n in fw.family.param_names]
    header += ["drift", "newton_iterations"]
    buf = io.StringIO()
    w = csv.writer(buf, lineterminator="\n")
    w.writerow(header)
    for k, s in enumerate(path.steps):
        row = [k] + [f"{x:.17g}" for x in s.positions.ravel()]
        row += [f"{x:.17g}" for x in s.theta]
        row += [f"{s.drift:.3e}", s.iterations]
        w.writerow(row)
    return buf.getvalue().encode("utf-8")


def _snapshot_indices(n: int, which) -> list[int]:
    if which is not None:
        return [i if i >= 0 else n + i for i in which]
    return sorted({0, n // 2, n - 1}) if n > 2 else list(range(n))


def _svg(path: TracePath, fw: OrbitFramework, cell_range, snapshots) -> bytes:
    idx = _snapshot_indices(len(path.steps), snapshots)
    groups = []
    for k in idx:
        s = path.steps[k]
        pos = [tuple(Fraction(float(x)) for x in p) for p in s.positions]
        theta = tuple(Fraction(float(t)) for t in s.theta)
        patch = expand_patch(fw, cell_range, positions=pos, theta=theta if fw.family else None)
        segs = [([float(x) for x in b.coords[0][:2]], [float(x) for x in b.coords[1][:2]]) for b in patch.bars]
        pts = [[float(x) for x in j.coords[:2]] for j in patch.joints]
        cell = None
        if fw.family is not None:
            lat = [[float(x) for x in row[:2]] for row in fw.family.basis_fn(theta)[:2]]
            cell = [[0.0, 0.0], lat[0], [lat[0][0] + lat[1][0], lat[0][1] + lat[1][1]], lat[1]]
        groups.append((k, segs, pts, cell))
    xs = [c for _, segs, pts, cell in groups for p in pts + [q for sg in segs for q in sg] + (cell or []) for c in [p[0]]]
    ys = [c for _, segs, pts, cell in groups for p in pts + [q for sg in segs for q in sg] + (cell or []) for c in [p[1]]]
    x0, x1 = min(xs), max(xs)
    y0, y1 = min(ys), max(ys)
    width = max(x1 - x0, 1e-9)
    height = max(y1 - y0, 1e-9)
    pad = 0.05 * max(width, height)
    panel_w = width + 2 * pad
    out = [f'<svg xmlns="http://www.w3.org/2000/svg" viewBox="0 0 {panel_w * len(groups):.6g} {height + 2 * pad:.6g}">']
    sw = 0.004 * max(width, height)
    for n, (k, segs, pts, cell) in enumerate(groups):
        ox = n * panel_w + pad - x0
        oy = pad + y1   # flip y

        def tx(p):
            return f"{p[0] + ox:.6g}", f"{oy - p[1]:.6g}"

        out.append(f'<g id="step-{k}" class="snapshot">')
        if cell:
            pts_s = " ".join(",".join(tx(p)) for p in cell)
            out.append(f'<polygon class="cell" points="{pts_s}" fill="none" stroke="#999" '
                       f'stroke-dasharray="{2 * sw:.3g}" stroke-width="{sw:.3g}"/>')
        for a, b in segs:
            (xa, ya), (xb, yb) = tx(a), tx(b)
            out.append(f'<line class="bar" x1="{xa}" y1="{ya}" x2="{xb}" y2="{yb}" stroke="#222" '
                       f'stroke-width="{sw:.3g}"/>')
        for p in pts:
            x, y = tx(p)
            out.append(f'<circle class="joint" cx="{x}" cy="{y}" r="{2 * sw:.3g}" fill="#c33"/>')
        out.append("</g>")
    out.append("</svg>")
    return ("\n".join(out) + "\n").encode("utf-8")


def export(path: TracePath, fw: OrbitFramework, fmt: str = "csv", cell_range=None, snapshots=None) -> bytes:
    if not path.steps:
        raise ValueError("empty path")
    if fmt == "csv":
        return _csv(path, fw)
    if fmt == "svg":
        return _svg(path, fw, cell_range, snapshots)
    raise ValueError(f"unknown export format {fmt!r}")
