"""Geometry of the slit tangent bundle of the doubly warped product.

The adapted frame has 2(n1+n2) basis fields: n horizontal (the adapted base
derivations) followed by n vertical (the fiber derivations).  Frame vectors
are component arrays in that basis.  The warped Sasaki-type lift repeats the
product fundamental tensor on the horizontal and vertical blocks.

The Koszul computation is ground truth for the Levi-Civita connection; the
closed-form table is a transcription that is diffed against it, never
silently trusted.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .engine import POINT, WorkPoint, workspace
from .errors import PreconditionError
from .linalg import invert_matrix
from .metrics import ProductConfig, TangentSample

FAMILIES = ("h1", "h2", "v1", "v2")


@dataclass(frozen=True, eq=False)
class FrameVector:
    """Components in the adapted basis: n horizontal then n vertical slots."""

    comps: np.ndarray
    n1: int
    n2: int

    @property
    def n(self) -> int:
        return self.n1 + self.n2

    @property
    def horizontal(self) -> np.ndarray:
        return self.comps[:self.n]

    @property
    def vertical(self) -> np.ndarray:
        return self.comps[self.n:]

    def vertical_projector(self) -> "FrameVector":
        out = self.comps.copy()
        out[:self.n] = 0.0
        return FrameVector(out, self.n1, self.n2)

    def horizontal_projector(self) -> "FrameVector":
        out = self.comps.copy()
        out[self.n:] = 0.0
        return FrameVector(out, self.n1, self.n2)

    def tangent_map(self) -> "FrameVector":
        """The almost tangent structure: horizontal slots moved to vertical."""
        out = np.zeros_like(self.comps)
        out[self.n:] = self.comps[:self.n]
        return FrameVector(out, self.n1, self.n2)


def frame_vector(cfg: ProductConfig, comps) -> FrameVector:
    arr = np.asarray(comps, dtype=float)
    if arr.shape != (2 * cfg.n,):
        raise ValueError(f"frame vectors over this product have {2 * cfg.n} components")
    return FrameVector(arr, cfg.n1, cfg.n2)


def basis_horizontal(cfg: ProductConfig, a: int) -> FrameVector:
    arr = np.zeros(2 * cfg.n)
    arr[a] = 1.0
    return FrameVector(arr, cfg.n1, cfg.n2)


def basis_vertical(cfg: ProductConfig, a: int) -> FrameVector:
    arr = np.zeros(2 * cfg.n)
    arr[cfg.n + a] = 1.0
    return FrameVector(arr, cfg.n1, cfg.n2)


def frame_family(cfg: ProductConfig, A: int) -> str:
    n, n1 = cfg.n, cfg.n1
    if A < n:
        return "h1" if A < n1 else "h2"
    return "v1" if A - n < n1 else "v2"


@dataclass(frozen=True, eq=False)
class LiftedMetric:
    """Warped Sasaki-type metric in the adapted frame: blockdiag(g, g)."""

    matrix: np.ndarray
    n1: int
    n2: int

    def pairing(self, X: FrameVector, Y: FrameVector) -> float:
        return float(X.comps @ self.matrix @ Y.comps)


@dataclass(frozen=True, eq=False)
class ConnectionTable:
    """nabla values over ordered adapted-frame basis pairs: entries[A][B] is
    the frame vector nabla_{e_A} e_B."""

    kind: str
    entries: np.ndarray  # (2n, 2n, 2n)


class _LiftedPoint:
    """Shared ingredients of the lifted geometry at one sample."""

    def __init__(self, wp: WorkPoint):
        self.wp = wp
        self.cfg = wp.cfg
        self.n1, self.n2 = wp.cfg.n1, wp.cfg.n2
        self.n = wp.cfg.n
        ep = wp.product
        self.g = ep.g_values()
        self.C = ep.cartan()
        self.Rb = ep.bracket_curvature_values()
        self.Gf = ep.connection_fiber_values()
        self.Fh = ep.horizontal_values()
        self.dg = np.empty((self.n, self.n, self.n))
        for b in range(self.n):
            for c in range(b, self.n):
                for e in range(self.n):
                    val = ep.delta_g(POINT)[b][c][e].value
                    self.dg[b, c, e] = self.dg[c, b, e] = val
        self.metric = np.zeros((2 * self.n, 2 * self.n))
        self.metric[:self.n, :self.n] = self.g
        self.metric[self.n:, self.n:] = self.g
        inv, _ = invert_matrix([list(row) for row in self.metric])
        self.metric_inv = np.array(inv)

    # metric components in the frame: m(B, C) fields and their derivatives
    def metric_component(self, B: int, C: int) -> float:
        return self.metric[B, C]

    def frame_metric_derivative(self, A: int, B: int, C: int) -> float:
        """e_A applied to the component field m(e_B, e_C)."""
        n = self.n
        bv, cv = B >= n, C >= n
        if bv != cv:
            return 0.0  # mixed components vanish identically
        b, c = B % n, C % n
        if A < n:
            return self.dg[b, c, A]
        return 2.0 * self.C[A - n, b, c]

    def bracket(self, A: int, B: int) -> np.ndarray:
        """Lie bracket of two basis fields, as frame components."""
        n = self.n
        out = np.zeros(2 * n)
        if A < n and B < n:
            out[n:] = self.Rb[:, A, B]
        elif A < n <= B:
            out[n:] = self.Gf[:, A, B - n]
        elif B < n <= A:
            out[n:] = -self.Gf[:, B, A - n]
        return out

    def pairing(self, xc: np.ndarray, yc: np.ndarray) -> float:
        return float(xc @ self.metric @ yc)

    def cartan_up(self, which: int) -> np.ndarray:
        eng = self.wp.factor(which)
        return np.einsum("sh,hij->sij", eng.ginv_values(), eng.cartan())


def _lifted(cfg: ProductConfig, p: TangentSample) -> _LiftedPoint:
    wp = workspace(cfg).at(p)
    key = ("lifted_point",)
    got = wp.product._memo.get(key)
    if got is None:
        got = _LiftedPoint(wp)
        wp.product._memo[key] = got
    return got


def lifted_metric(cfg: ProductConfig, p: TangentSample) -> LiftedMetric:
    lp = _lifted(cfg, p)
    return LiftedMetric(lp.metric, cfg.n1, cfg.n2)


# ---------------------------------------------------------------------------
# Levi-Civita connection: Koszul ground truth and the closed-form table
# ---------------------------------------------------------------------------

def koszul_levi_civita(cfg: ProductConfig, p: TangentSample) -> ConnectionTable:
    """Solve the Koszul identity over the adapted frame, brackets included."""
    lp = _lifted(cfg, p)
    m = 2 * lp.n
    out = np.empty((m, m, m))
    basis = np.eye(m)
    brackets = np.array([[lp.bracket(A, B) for B in range(m)] for A in range(m)])
    for A in range(m):
        for B in range(m):
            rhs = np.empty(m)
            for Z in range(m):
                rhs[Z] = (lp.frame_metric_derivative(A, B, Z)
                          + lp.frame_metric_derivative(B, A, Z)
                          - lp.frame_metric_derivative(Z, A, B)
                          + lp.pairing(brackets[A, B], basis[Z])
                          - lp.pairing(brackets[A, Z], basis[B])
                          - lp.pairing(brackets[B, Z], basis[A]))
            out[A, B] = 0.5 * lp.metric_inv @ rhs
    return ConnectionTable("levi-civita-koszul", out)


def levi_civita_closed_forms(cfg: ProductConfig, p: TangentSample) -> ConnectionTable:
    """The transcribed component table of the Levi-Civita connection.

    Index conventions inside: r, k, s, i, j run over the first factor
    (local = combined), lam, mu, al, be, ga over the second (combined index
    n1 + local).  Gf, Rb, Fh, dg carry combined indices; the factor metrics
    carry local ones.
    """
    lp = _lifted(cfg, p)
    n, n1, n2 = lp.n, lp.n1, lp.n2
    wp = lp.wp
    g1, g2 = wp.factor1.g_values(), wp.factor2.g_values()
    g1inv, g2inv = wp.factor1.ginv_values(), wp.factor2.ginv_values()
    f1sq, f2sq = wp.warp_sq(1), wp.warp_sq(2)
    C1u, C2u = lp.cartan_up(1), lp.cartan_up(2)
    Rb, Gf, Fh, dg = lp.Rb, lp.Gf, lp.Fh, lp.dg
    out = np.zeros((2 * n, 2 * n, 2 * n))

    # Horizontal-horizontal inputs; same-factor pairs pick up the factor
    # Cartan term on their own vertical slots.
    for a in range(n):
        for b in range(n):
            row = out[a, b]
            row[:n] = Fh[:, a, b]
            row[n:] = 0.5 * Rb[:, a, b]
            if a < n1 and b < n1:
                for s in range(n1):
                    row[n + s] -= C1u[s, a, b]
            elif a >= n1 and b >= n1:
                for ga in range(n2):
                    row[n + n1 + ga] -= C2u[ga, a - n1, b - n1]

    # Horizontal input, vertical field of the first factor.
    for a in range(n):
        a_latin = a < n1
        for j in range(n1):
            row = out[a, n + j]
            for s in range(n1):
                acc = sum(g1[r, j] * g1inv[k, s] * Rb[r, k, a]
                          for r in range(n1) for k in range(n1))
                row[s] = 0.5 * acc + (C1u[s, a, j] if a_latin else 0.0)
            for ga in range(n2):
                acc = sum(g1[r, j] * g2inv[ga, mu] * Rb[r, n1 + mu, a]
                          for r in range(n1) for mu in range(n2))
                row[n1 + ga] = (f2sq / (2.0 * f1sq)) * acc
            for s in range(n1):
                acc = 0.0
                for k in range(n1):
                    mixed = sum(Gf[r, a, j] * g1[r, k] - Gf[r, a, k] * g1[r, j]
                                for r in range(n1))
                    if a_latin:
                        inner = dg[j, k, a] / f2sq + mixed
                        acc += 0.5 * g1inv[k, s] * inner
                    else:
                        inner = dg[j, k, a] + f2sq * mixed
                        acc += g1inv[k, s] * inner / (2.0 * f2sq)
                row[n + s] = acc
            for ga in range(n2):
                acc = 0.0
                for mu in range(n2):
                    inner = (f1sq * sum(Gf[n1 + lam, a, j] * g2[lam, mu]
                                        for lam in range(n2))
                             - f2sq * sum(Gf[r, a, n1 + mu] * g1[r, j]
                                          for r in range(n1)))
                    acc += g2inv[ga, mu] * inner
                row[n + n1 + ga] = acc / (2.0 * f1sq)

    # Horizontal input, vertical field of the second factor.
    for a in range(n):
        a_latin = a < n1
        for be in range(n2):
            b = n1 + be
            row = out[a, n + b]
            for s in range(n1):
                acc = sum(g2[lam, be] * g1inv[k, s] * Rb[n1 + lam, k, a]
                          for lam in range(n2) for k in range(n1))
                row[s] = (f1sq / (2.0 * f2sq)) * acc
            for ga in range(n2):
                acc = sum(g2[lam, be] * g2inv[mu, ga] * Rb[n1 + lam, n1 + mu, a]
                          for lam in range(n2) for mu in range(n2))
                row[n1 + ga] = 0.5 * acc + (0.0 if a_latin else C2u[ga, a - n1, be])
            for s in range(n1):
                acc = 0.0
                for k in range(n1):
                    inner = (f2sq * sum(Gf[r, a, b] * g1[r, k] for r in range(n1))
                             - f1sq * sum(Gf[n1 + lam, a, k] * g2[lam, be]
                                          for lam in range(n2)))
                    acc += g1inv[k, s] * inner
                row[n + s] = acc / (2.0 * f2sq)
            for ga in range(n2):
                acc = 0.0
                for mu in range(n2):
                    inner = (dg[b, n1 + mu, a]
                             + f1sq * sum(Gf[n1 + lam, a, b] * g2[lam, mu]
                                          - Gf[n1 + lam, a, n1 + mu] * g2[lam, be]
                                          for lam in range(n2)))
                    acc += g2inv[ga, mu] * inner
                row[n + n1 + ga] = acc / (2.0 * f1sq)

    # Vertical-vertical inputs: both first factor.
    for i in range(n1):
        for j in range(n1):
            row = out[n + i, n + j]
            for s in range(n1):
                acc = 0.0
                for k in range(n1):
                    inner = (sum(Gf[r, k, j] * g1[r, i] + Gf[r, k, i] * g1[r, j]
                                 for r in range(n1))
                             - dg[i, j, k] / f2sq)
                    acc += 0.5 * g1inv[k, s] * inner
                row[s] = acc
            for ga in range(n2):
                acc = 0.0
                for mu in range(n2):
                    inner = (f2sq * sum(Gf[r, n1 + mu, j] * g1[r, i]
                                        + Gf[r, n1 + mu, i] * g1[r, j]
                                        for r in range(n1))
                             - dg[i, j, n1 + mu])
                    acc += g2inv[ga, mu] * inner
                row[n1 + ga] = acc / (2.0 * f1sq)
            for s in range(n1):
                row[n + s] = C1u[s, i, j]

    # Vertical-vertical inputs: mixed factors (symmetric, bracket-free).
    for al in range(n2):
        a = n1 + al
        for j in range(n1):
            row = out[n + a, n + j]
            for s in range(n1):
                acc = 0.0
                for k in range(n1):
                    inner = (f1sq * sum(Gf[n1 + lam, k, j] * g2[lam, al]
                                        for lam in range(n2))
                             + f2sq * sum(Gf[r, k, a] * g1[r, j] for r in range(n1)))
                    acc += g1inv[k, s] * inner
                row[s] = acc / (2.0 * f2sq)
            for ga in range(n2):
                acc = 0.0
                for mu in range(n2):
                    inner = (f1sq * sum(Gf[n1 + lam, n1 + mu, j] * g2[lam, al]
                                        for lam in range(n2))
                             + f2sq * sum(Gf[r, n1 + mu, a] * g1[r, j]
                                          for r in range(n1)))
                    acc += g2inv[ga, mu] * inner
                row[n1 + ga] = acc / (2.0 * f1sq)
            out[n + j, n + a] = row

    # Vertical-vertical inputs: both second factor.
    for al in range(n2):
        a = n1 + al
        for be in range(n2):
            b = n1 + be
            row = out[n + a, n + b]
            for s in range(n1):
                acc = 0.0
                for k in range(n1):
                    inner = (-dg[a, b, k]
                             + f1sq * sum(Gf[n1 + lam, k, b] * g2[lam, al]
                                          + Gf[n1 + lam, k, a] * g2[lam, be]
                                          for lam in range(n2)))
                    acc += g1inv[k, s] * inner
                row[s] = acc / (2.0 * f2sq)
            for ga in range(n2):
                acc = 0.0
                for mu in range(n2):
                    inner = (-dg[a, b, n1 + mu]
                             + f1sq * sum(Gf[n1 + lam, n1 + mu, b] * g2[lam, al]
                                          + Gf[n1 + lam, n1 + mu, a] * g2[lam, be]
                                          for lam in range(n2)))
                    acc += g2inv[ga, mu] * inner
                row[n1 + ga] = acc / (2.0 * f1sq)
            for ga in range(n2):
                row[n + n1 + ga] = C2u[ga, al, be]

    # Vertical input on a horizontal field follows from zero torsion:
    # nabla_V H = nabla_H V - [H, V].
    for A in range(n):
        for B in range(n):
            out[n + B, A] = out[A, n + B].copy()
            out[n + B, A][n:] -= Gf[:, A, B]
    return ConnectionTable("levi-civita-closed-form", out)


def levi_civita_block_residuals(cfg: ProductConfig, p: TangentSample) -> dict[str, float]:
    """Max |Koszul - closed form| per ordered input-family pair."""
    kos = koszul_levi_civita(cfg, p).entries
    clo = levi_civita_closed_forms(cfg, p).entries
    diff = np.abs(kos - clo)
    out: dict[str, float] = {}
    for A in range(2 * cfg.n):
        for B in range(2 * cfg.n):
            key = frame_family(cfg, A) + "." + frame_family(cfg, B)
            val = float(diff[A, B].max())
            out[key] = max(out.get(key, 0.0), val)
    return out


def induced_vertical_connection(cfg: ProductConfig, p: TangentSample) -> ConnectionTable:
    """Vertical projection of the Levi-Civita connection on vertical fields."""
    kos = koszul_levi_civita(cfg, p).entries
    n = cfg.n
    out = np.zeros_like(kos)
    for A in range(2 * n):
        for B in range(n, 2 * n):
            out[A, B, n:] = kos[A, B, n:]
    return ConnectionTable("induced-vertical", out)


# ---------------------------------------------------------------------------
# The adapted foliation connection and the Reinhart diagnostics
# ---------------------------------------------------------------------------

def vaisman_connection(cfg: ProductConfig, p: TangentSample) -> ConnectionTable:
    """Distribution-preserving adapted connection of the vertical foliation."""
    lp = _lifted(cfg, p)
    n, n1 = lp.n, lp.n1
    out = np.zeros((2 * n, 2 * n, 2 * n))
    C1u, C2u = lp.cartan_up(1), lp.cartan_up(2)
    for a in range(n):
        for b in range(n):
            out[a, b, :n] = lp.Fh[:, a, b]          # horizontal on horizontal
            out[a, n + b, n:] = lp.Gf[:, a, b]      # horizontal on vertical
    for a in range(n):
        for b in range(n):
            if a < n1 and b < n1:
                out[n + a, n + b, n:n + n1] = C1u[:, a, b]
            elif a >= n1 and b >= n1:
                out[n + a, n + b, n + n1:] = C2u[:, a - n1, b - n1]
            # mixed vertical pairs and vertical-on-horizontal rows stay zero
    return ConnectionTable("vaisman", out)


def vaisman_axiom_residuals(cfg: ProductConfig, p: TangentSample) -> dict[str, float]:
    """Numerical residuals of the three defining conditions."""
    lp = _lifted(cfg, p)
    n = lp.n
    table = vaisman_connection(cfg, p).entries
    # (i) distribution preservation: outputs stay in the input field's bundle.
    pres = 0.0
    for A in range(2 * n):
        for B in range(2 * n):
            if B < n:
                pres = max(pres, float(np.max(np.abs(table[A, B, n:]))))
            else:
                pres = max(pres, float(np.max(np.abs(table[A, B, :n]))))
    # (ii) metric parallelism on all-horizontal and all-vertical triples.
    par = 0.0
    for block in (range(0, n), range(n, 2 * n)):
        for X in block:
            for Y in block:
                for Z in block:
                    val = (lp.frame_metric_derivative(X, Y, Z)
                           - lp.pairing(table[X, Y], np.eye(2 * n)[Z])
                           - lp.pairing(np.eye(2 * n)[Y], table[X, Z]))
                    par = max(par, abs(val))
    # (iii) torsion projections.
    tor = 0.0
    for X in range(2 * n):
        for Y in range(2 * n):
            t = table[X, Y] - table[Y, X] - lp.bracket(X, Y)
            if X >= n or Y >= n:
                tor = max(tor, float(np.max(np.abs(t[n:]))))
            if X < n or Y < n:
                tor = max(tor, float(np.max(np.abs(t[:n]))))
    return {"preservation": pres, "parallelism": par, "torsion": tor}


def reinhart_defect(cfg: ProductConfig, p: TangentSample, X: FrameVector,
                    Y: FrameVector, Z: FrameVector) -> float:
    """(nabla_X G)(Y, Z) for structural X and transversal Y, Z.

    X must be vertical and Y, Z horizontal (projector-checked); components
    are taken constant in the adapted frame.
    """
    if float(np.max(np.abs(X.horizontal))) > 0.0:
        raise PreconditionError("reinhart defect needs a vertical first argument")
    if float(np.max(np.abs(Y.vertical))) > 0.0 or float(np.max(np.abs(Z.vertical))) > 0.0:
        raise PreconditionError("reinhart defect needs horizontal second and third arguments")
    lp = _lifted(cfg, p)
    n = lp.n
    table = vaisman_connection(cfg, p).entries
    xc, yc, zc = X.comps, Y.comps, Z.comps
    dmetric = 0.0
    for a in range(n):
        if xc[n + a] == 0.0:
            continue
        grad = 2.0 * np.einsum("bc,b,c->", lp.C[a], yc[:n], zc[:n])
        dmetric += xc[n + a] * grad
    nab_y = np.einsum("a,b,abk->k", xc, yc, table)
    nab_z = np.einsum("a,b,abk->k", xc, zc, table)
    return float(dmetric - lp.pairing(nab_y, zc) - lp.pairing(yc, nab_z))


def reinhart_identity_value(cfg: ProductConfig, p: TangentSample, X: FrameVector,
                            Y: FrameVector, Z: FrameVector) -> float:
    """The factor-Cartan closed form the defect must equal."""
    wp = workspace(cfg).at(p)
    n1, n = cfg.n1, cfg.n
    f1sq, f2sq = wp.warp_sq(1), wp.warp_sq(2)
    C1 = wp.factor1.cartan()
    C2 = wp.factor2.cartan()
    x1, x2 = X.comps[n:n + n1], X.comps[n + n1:]
    y1, y2 = Y.comps[:n1], Y.comps[n1:n]
    z1, z2 = Z.comps[:n1], Z.comps[n1:n]
    return float(2.0 * f2sq * np.einsum("ijk,i,j,k->", C1, x1, y1, z1)
                 + 2.0 * f1sq * np.einsum("abc,a,b,c->", C2, x2, y2, z2))


# ---------------------------------------------------------------------------
# Almost complex structure, symplectic form, integrability
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class ComplexStructure:
    """J: horizontal -> minus vertical, vertical -> horizontal."""

    n1: int
    n2: int

    def apply(self, X: FrameVector) -> FrameVector:
        n = self.n1 + self.n2
        out = np.empty_like(X.comps)
        out[:n] = X.comps[n:]
        out[n:] = -X.comps[:n]
        return FrameVector(out, self.n1, self.n2)

    def matrix(self) -> np.ndarray:
        n = self.n1 + self.n2
        out = np.zeros((2 * n, 2 * n))
        out[:n, n:] = np.eye(n)
        out[n:, :n] = -np.eye(n)
        return out


def almost_complex(cfg: ProductConfig, p: TangentSample | None = None) -> ComplexStructure:
    return ComplexStructure(cfg.n1, cfg.n2)


def symplectic_form(cfg: ProductConfig, p: TangentSample, X: FrameVector,
                    Y: FrameVector) -> float:
    """Omega(X, Y) = G(X, JY) in the adapted frame."""
    lp = _lifted(cfg, p)
    J = almost_complex(cfg)
    return lp.pairing(X.comps, J.apply(Y).comps)


def symplectic_frame_table(cfg: ProductConfig, p: TangentSample) -> np.ndarray:
    lp = _lifted(cfg, p)
    J = almost_complex(cfg).matrix()
    return lp.metric @ J


@dataclass(frozen=True)
class ClosednessReport:
    d_residual: float
    potential_residual: float


def _omega_coordinate_matrix(cfg: ProductConfig, p: TangentSample) -> np.ndarray:
    """Omega over the coordinate basis (base coords then fiber coords)."""
    wp = workspace(cfg).at(p)
    g = wp.product.g_values()
    N = wp.product.nonlinear_connection_values()
    n = cfg.n
    out = np.zeros((2 * n, 2 * n))
    out[:n, :n] = g @ N - N.T @ g
    out[:n, n:] = g
    out[n:, :n] = -g
    return out


def closedness_check(cfg: ProductConfig, region) -> ClosednessReport:
    """d(Omega) = 0 by first-order central differences, plus the potential test.

    The potential test rebuilds Omega from the exterior derivative of the
    canonical one-form (half the fiber gradient of the squared norm); with
    the orientation d(w_a dz^a)(U,V) = U w(V) - V w(U) the almost-symplectic
    form equals minus that derivative.
    """
    zs = list(cfg.base) + list(cfg.fiber)
    m = len(zs)
    d_res = 0.0
    pot_res = 0.0
    for p in region:
        wp = workspace(cfg).at(p)
        # exterior derivative of the canonical one-form, via exact jets
        domega = np.zeros((m, m))
        g = wp.product.g_values()
        for a, za in enumerate(zs[:cfg.n]):
            for b, zb in enumerate(zs[:cfg.n]):
                domega[a, b] = 0.5 * (wp.product.F2_partial((za, cfg.fiber[b]))
                                      - wp.product.F2_partial((zb, cfg.fiber[a])))
        domega[cfg.n:, :cfg.n] = g
        domega[:cfg.n, cfg.n:] = -g
        omega = _omega_coordinate_matrix(cfg, p)
        pot_res = max(pot_res, float(np.max(np.abs(omega + domega))))
        # finite-difference exterior derivative of Omega itself
        grads = np.empty((m, m, m))
        for a, za in enumerate(zs):
            h = 1e-4 * (1.0 + abs(p.coord(za)))
            plus = _omega_coordinate_matrix(cfg, p.shifted(za, h))
            minus = _omega_coordinate_matrix(cfg, p.shifted(za, -h))
            grads[a] = (plus - minus) / (2.0 * h)
        for a in range(m):
            for b in range(a + 1, m):
                for c in range(b + 1, m):
                    val = grads[a][b, c] - grads[b][a, c] + grads[c][a, b]
                    d_res = max(d_res, abs(val))
    return ClosednessReport(d_res, pot_res)


def nijenhuis_tables(cfg: ProductConfig, p: TangentSample) -> tuple[np.ndarray, np.ndarray]:
    """Integrability obstruction of J over all frame pairs, by two routes.

    The first table is assembled from the closed-form components (built from
    the bracket curvature alone); the second evaluates the defining bracket
    combination [JX,JY] - J[JX,Y] - J[X,JY] - [X,Y] directly.
    """
    lp = _lifted(cfg, p)
    n = lp.n
    m = 2 * n
    closed = np.zeros((m, m, m))
    for a in range(n):
        for b in range(n):
            closed[a, b, n:] = -lp.Rb[:, a, b]              # horizontal pair
            closed[n + a, n + b, n:] = lp.Rb[:, a, b]       # vertical pair
            closed[a, n + b, :n] = -lp.Rb[:, a, b]          # mixed pair
            closed[n + b, a, :n] = lp.Rb[:, a, b]
    Jm = almost_complex(cfg).matrix()

    def bracket_fields(xc: np.ndarray, yc: np.ndarray) -> np.ndarray:
        out = np.zeros(m)
        for A in range(m):
            if xc[A] == 0.0:
                continue
            for B in range(m):
                if yc[B] == 0.0:
                    continue
                out += xc[A] * yc[B] * lp.bracket(A, B)
        return out

    direct = np.zeros((m, m, m))
    basis = np.eye(m)
    for A in range(m):
        for B in range(m):
            X, Y = basis[A], basis[B]
            JX, JY = Jm @ X, Jm @ Y
            direct[A, B] = (bracket_fields(JX, JY)
                            - Jm @ bracket_fields(JX, Y)
                            - Jm @ bracket_fields(X, JY)
                            - bracket_fields(X, Y))
    return closed, direct


@dataclass(frozen=True)
class KahlerReport:
    is_kahler: bool
    max_bracket_curvature: float
    max_nijenhuis: float
    equivalence_holds: bool


def kahler_verdict(cfg: ProductConfig, region, tol: float = 1e-7,
                   nijenhuis_tol: float | None = None) -> KahlerReport:
    """Kahler iff the horizontal distribution is integrable over the region."""
    ntol = tol if nijenhuis_tol is None else nijenhuis_tol
    max_r = 0.0
    max_n = 0.0
    for p in region:
        lp = _lifted(cfg, p)
        max_r = max(max_r, float(np.max(np.abs(lp.Rb))))
        _closed, direct = nijenhuis_tables(cfg, p)
        max_n = max(max_n, float(np.max(np.abs(direct))))
    verdict = max_r <= tol
    return KahlerReport(verdict, max_r, max_n, (max_n <= ntol) == verdict)


@dataclass(frozen=True)
class TotallyGeodesicReport:
    vertical: bool
    horizontal: bool
    vertical_criterion: float      # max |F - G|
    horizontal_cartan: float       # max |C|
    horizontal_mixed_blocks: float  # max over the four mixed bracket blocks
    vertical_invariance_consistent: bool
    horizontal_invariance_consistent: bool


def totally_geodesic_verdicts(cfg: ProductConfig, region,
                              tol: float = 1e-7) -> TotallyGeodesicReport:
    """Criteria for the vertical/horizontal bundles to be totally geodesic."""
    region = list(region)
    if len(region) < 20:
        raise PreconditionError("totally-geodesic verdicts need at least 20 sample points")
    n1, n = cfg.n1, cfg.n
    max_fg = max_c = max_mixed = 0.0
    kos_v = kos_h = 0.0
    for p in region:
        lp = _lifted(cfg, p)
        max_fg = max(max_fg, float(np.max(np.abs(lp.Fh - lp.Gf))))
        max_c = max(max_c, float(np.max(np.abs(lp.C))))
        R = lp.Rb
        for blockmax in (np.abs(R[n1:, :n1, :n1]).max(), np.abs(R[:n1, :n1, n1:]).max(),
                         np.abs(R[n1:, :n1, n1:]).max(), np.abs(R[:n1, n1:, n1:]).max()):
            max_mixed = max(max_mixed, float(blockmax))
        kos = koszul_levi_civita(cfg, p).entries
        kos_v = max(kos_v, float(np.max(np.abs(kos[n:, n:, :n]))))
        kos_h = max(kos_h, float(np.max(np.abs(kos[:n, :n, n:]))))
    vertical = max_fg <= tol
    horizontal = max_c <= tol and max_mixed <= tol
    return TotallyGeodesicReport(
        vertical=vertical, horizontal=horizontal,
        vertical_criterion=max_fg, horizontal_cartan=max_c,
        horizontal_mixed_blocks=max_mixed,
        vertical_invariance_consistent=(kos_v <= tol) == vertical,
        horizontal_invariance_consistent=(kos_h <= tol) == horizontal,
    )
