"""Warped-product block formulas, transcribed for diffing against the engine.

Every function here evaluates the closed-form factor/warp decomposition of a
product-level tensor at one point, from factor-engine quantities and warp
derivatives only.  These are the likeliest transcription-error site, so the
generic AD path in :mod:`dwfinsler.engine` is ground truth and the comparison
suites report the offending block by name.

Block keys name factor membership per slot: the character before the dot is
the upper slot, the rest are the lower slots in order ('1' = first factor,
'2' = second).  Rank-2 objects drop the dot.
"""

from __future__ import annotations

import numpy as np

from .coords import base1, base2, fiber1, fiber2
from .engine import WorkPoint


def block_ranges(pattern: str, n1: int, n2: int):
    chars = pattern.replace(".", "")
    return tuple(range(0, n1) if ch == "1" else range(n1, n1 + n2) for ch in chars)


def compare_blocks(generic: np.ndarray, blocks: dict[str, np.ndarray],
                   n1: int, n2: int) -> dict[str, float]:
    """Max absolute deviation of each closed-form block from the generic tensor."""
    out = {}
    for key, closed in blocks.items():
        view = generic[np.ix_(*block_ranges(key, n1, n2))]
        out[key] = float(np.max(np.abs(view - closed))) if closed.size else 0.0
    return out


class _Ingredients:
    """Factor-engine values and warp partials shared by all block formulas."""

    def __init__(self, wp: WorkPoint):
        cfg = wp.cfg
        self.n1, self.n2 = cfg.n1, cfg.n2
        f1, f2 = wp.factor1, wp.factor2
        self.g1, self.g2 = f1.g_values(), f2.g_values()
        self.g1inv, self.g2inv = f1.ginv_values(), f2.ginv_values()
        self.C1, self.C2 = f1.cartan(), f2.cartan()
        self.F1sq, self.F2sq = f1.F2_value(), f2.F2_value()
        self.f1sq, self.f2sq = wp.warp_sq(1), wp.warp_sq(2)
        self.w1x = np.array([wp.warp_partial(1, (base1(h),)) for h in range(self.n1)])
        self.w2u = np.array([wp.warp_partial(2, (base2(a),)) for a in range(self.n2)])
        self.dF1dy = np.array([f1.F2_partial((fiber1(h),)) for h in range(self.n1)])
        self.dF2dv = np.array([f2.F2_partial((fiber2(a),)) for a in range(self.n2)])
        self.vsum = float(self.w2u @ np.asarray(wp.sample.v))
        self.ysum = float(self.w1x @ np.asarray(wp.sample.y))
        # Fiber derivatives of the factor inverse metrics: [k, h, extra dirs...]
        self.dginv1 = np.stack(
            [f1.ginv_fiber_partial((fiber1(r),)) for r in range(self.n1)], axis=-1)
        self.dginv2 = np.stack(
            [f2.ginv_fiber_partial((fiber2(r),)) for r in range(self.n2)], axis=-1)
        self._f1, self._f2 = f1, f2

    def d2ginv1(self):
        n1 = self.n1
        out = np.empty((n1, n1, n1, n1))
        for i in range(n1):
            for j in range(i, n1):
                m = self._f1.ginv_fiber_partial((fiber1(i), fiber1(j)))
                out[:, :, i, j] = out[:, :, j, i] = m
        return out

    def d2ginv2(self):
        n2 = self.n2
        out = np.empty((n2, n2, n2, n2))
        for i in range(n2):
            for j in range(i, n2):
                m = self._f2.ginv_fiber_partial((fiber2(i), fiber2(j)))
                out[:, :, i, j] = out[:, :, j, i] = m
        return out

    def d3ginv(self, which: int):
        f, n, mk = (self._f1, self.n1, fiber1) if which == 1 else (self._f2, self.n2, fiber2)
        out = np.empty((n, n, n, n, n))
        for i in range(n):
            for j in range(i, n):
                for l in range(j, n):
                    m = f.ginv_fiber_partial((mk(i), mk(j), mk(l)))
                    for perm in ((i, j, l), (i, l, j), (j, i, l), (j, l, i),
                                 (l, i, j), (l, j, i)):
                        out[(slice(None), slice(None)) + perm] = m
        return out


def spray_blocks(wp: WorkPoint) -> dict[str, np.ndarray]:
    """Product spray from factor sprays plus warp corrections."""
    q = _Ingredients(wp)
    G1 = wp.factor1.spray_values()
    G2 = wp.factor2.spray_values()
    top = G1 + (q.g1inv @ (q.vsum * q.dF1dy - q.w1x * q.F2sq)) / (4.0 * q.f2sq)
    bot = G2 + (q.g2inv @ (q.ysum * q.dF2dv - q.w2u * q.F1sq)) / (4.0 * q.f1sq)
    return {"1": top, "2": bot}


def nonlinear_connection_blocks(wp: WorkPoint) -> dict[str, np.ndarray]:
    q = _Ingredients(wp)
    n1, n2 = q.n1, q.n2
    N11 = (wp.factor1.nonlinear_connection_values()
           - np.einsum("ihj,h->ij", q.dginv1, q.w1x) * q.F2sq / (4.0 * q.f2sq)
           + (q.vsum / (2.0 * q.f2sq)) * np.eye(n1))
    N12 = (np.outer(q.g1inv @ q.dF1dy, q.w2u)
           - np.outer(q.g1inv @ q.w1x, q.dF2dv)) / (4.0 * q.f2sq)
    N21 = (np.outer(q.g2inv @ q.dF2dv, q.w1x)
           - np.outer(q.g2inv @ q.w2u, q.dF1dy)) / (4.0 * q.f1sq)
    N22 = (wp.factor2.nonlinear_connection_values()
           - np.einsum("agb,g->ab", q.dginv2, q.w2u) * q.F1sq / (4.0 * q.f1sq)
           + (q.ysum / (2.0 * q.f1sq)) * np.eye(n2))
    return {"11": N11, "12": N12, "21": N21, "22": N22}


def connection_fiber_blocks(wp: WorkPoint) -> dict[str, np.ndarray]:
    """Second fiber derivatives of the spray, block by block."""
    q = _Ingredients(wp)
    n1, n2 = q.n1, q.n2
    out = {}
    out["1.11"] = (wp.factor1.connection_fiber_values()
                   - np.einsum("khji,h->kij", q.d2ginv1(), q.w1x) * q.F2sq / (4.0 * q.f2sq))
    out["1.12"] = (-np.einsum("khi,h,b->kib", q.dginv1, q.w1x, q.dF2dv) / (4.0 * q.f2sq)
                   + np.einsum("ki,b->kib", np.eye(n1), q.w2u) / (2.0 * q.f2sq))
    out["1.22"] = -np.einsum("k,ab->kab", q.g1inv @ q.w1x, q.g2) / (2.0 * q.f2sq)
    out["2.11"] = -np.einsum("g,ij->gij", q.g2inv @ q.w2u, q.g1) / (2.0 * q.f1sq)
    out["2.12"] = (-np.einsum("agb,a,i->gib", q.dginv2, q.w2u, q.dF1dy) / (4.0 * q.f1sq)
                   + np.einsum("gb,i->gib", np.eye(n2), q.w1x) / (2.0 * q.f1sq))
    out["2.22"] = (wp.factor2.connection_fiber_values()
                   - np.einsum("glba,l->gab", q.d2ginv2(), q.w2u) * q.F1sq / (4.0 * q.f1sq))
    return out


def _mixing_rates(q: _Ingredients) -> tuple[np.ndarray, np.ndarray]:
    """The warp-induced shifts of the factor nonlinear connections."""
    m1 = (q.vsum / (2.0 * q.f2sq)) * np.eye(q.n1) \
        - np.einsum("rhi,h->ri", q.dginv1, q.w1x) * q.F2sq / (4.0 * q.f2sq)
    m2 = (q.ysum / (2.0 * q.f1sq)) * np.eye(q.n2) \
        - np.einsum("mla,l->ma", q.dginv2, q.w2u) * q.F1sq / (4.0 * q.f1sq)
    return m1, m2


def horizontal_blocks(wp: WorkPoint) -> dict[str, np.ndarray]:
    q = _Ingredients(wp)
    m1, m2 = _mixing_rates(q)
    dg1 = 2.0 * q.C1  # fiber derivative of the factor metric
    dg2 = 2.0 * q.C2
    nc = nonlinear_connection_blocks(wp)
    N12, N21 = nc["12"], nc["21"]
    out = {}
    corr1 = (np.einsum("rj,hir->hij", m1, dg1) + np.einsum("ri,hjr->hij", m1, dg1)
             - np.einsum("rh,ijr->hij", m1, dg1))
    out["1.11"] = wp.factor1.horizontal_values() - 0.5 * np.einsum("kh,hij->kij", q.g1inv, corr1)
    out["1.12"] = np.einsum("kh,hib->kib",
                            q.g1inv,
                            np.einsum("b,hi->hib", q.w2u, q.g1)
                            - q.f2sq * np.einsum("rb,hir->hib", N12, dg1)) / (2.0 * q.f2sq)
    out["1.22"] = -np.einsum("kh,hab->kab",
                             q.g1inv,
                             np.einsum("h,ab->hab", q.w1x, q.g2)
                             - q.f1sq * np.einsum("lh,abl->hab", N21, dg2)) / (2.0 * q.f2sq)
    out["2.11"] = -np.einsum("gl,lij->gij",
                             q.g2inv,
                             np.einsum("l,ij->lij", q.w2u, q.g1)
                             - q.f2sq * np.einsum("rl,ijr->lij", N12, dg1)) / (2.0 * q.f1sq)
    out["2.12"] = np.einsum("gl,lib->gib",
                            q.g2inv,
                            np.einsum("i,bl->lib", q.w1x, q.g2)
                            - q.f1sq * np.einsum("ai,bla->lib", N21, dg2)) / (2.0 * q.f1sq)
    corr2 = (np.einsum("mb,lam->lab", m2, dg2) + np.einsum("ma,lbm->lab", m2, dg2)
             - np.einsum("ml,abm->lab", m2, dg2))
    out["2.22"] = wp.factor2.horizontal_values() - 0.5 * np.einsum("gl,lab->gab", q.g2inv, corr2)
    return out


def berwald_blocks(wp: WorkPoint) -> dict[str, np.ndarray]:
    q = _Ingredients(wp)
    n1, n2 = q.n1, q.n2
    out = {}
    out["1.111"] = (wp.factor1.berwald()
                    - np.einsum("khijl,h->kijl", q.d3ginv(1), q.w1x) * q.F2sq / (4.0 * q.f2sq))
    out["1.121"] = -np.einsum("khli,h,b->kibl", q.d2ginv1(), q.w1x, q.dF2dv) / (4.0 * q.f2sq)
    out["1.221"] = -np.einsum("ab,khl,h->kabl", q.g2, q.dginv1, q.w1x) / (2.0 * q.f2sq)
    out["1.222"] = -np.einsum("abl,k->kabl", q.C2, q.g1inv @ q.w1x) / q.f2sq
    out["1.122"] = -np.einsum("khi,h,bl->kibl", q.dginv1, q.w1x, q.g2) / (2.0 * q.f2sq)
    out["2.222"] = (wp.factor2.berwald()
                    - np.einsum("gnbal,n->gabl", q.d3ginv(2), q.w2u) * q.F1sq / (4.0 * q.f1sq))
    out["2.122"] = -np.einsum("agbl,a,i->gibl", q.d2ginv2(), q.w2u, q.dF1dy) / (4.0 * q.f1sq)
    out["2.112"] = -np.einsum("ij,agl,a->gijl", q.g1, q.dginv2, q.w2u) / (2.0 * q.f1sq)
    out["2.111"] = -np.einsum("ijk,g->gijk", q.C1, q.g2inv @ q.w2u) / q.f1sq
    out["2.121"] = -np.einsum("agb,a,ik->gibk", q.dginv2, q.w2u, q.g1) / (2.0 * q.f1sq)
    return out


def matsumoto_contraction_rhs(wp: WorkPoint) -> np.ndarray:
    """Expected fiber-squared contraction of the mixed Matsumoto block."""
    q = _Ingredients(wp)
    n = q.n1 + q.n2
    Fsq = wp.product.F2_value()
    mean2 = wp.factor2.mean_cartan()
    return -(q.f1sq * q.f2sq * q.F1sq * q.F2sq) / ((n + 1) * Fsq) * mean2


def cartan_scaled_factor_blocks(wp: WorkPoint) -> dict[str, np.ndarray]:
    """Pure blocks of the product Cartan torsion: warp-scaled factor tensors."""
    q = _Ingredients(wp)
    return {"111": q.f2sq * q.C1, "222": q.f1sq * q.C2}
