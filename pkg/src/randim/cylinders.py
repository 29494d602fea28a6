"""Inverse-branch compositions, cylinder intervals, and distortion constants.

A depth-n code (g0, ..., g_{n-1}) selects one inverse branch per fiber along
the orbit; the composition pulls [0,1] back to a subinterval of the branch
domain g0.  Compositions are evaluated from the deepest symbol inward, so a
code shares the fibers of the path starting at a given offset.
"""

from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import Explosion


@dataclass(frozen=True)
class CylinderCode:
    symbols: tuple[int, ...]

    @property
    def depth(self):
        return len(self.symbols)


@dataclass(frozen=True)
class CylinderInterval:
    code: tuple[int, ...]
    lo: float
    hi: float
    deriv_at_mid: float | None = None

    @property
    def diam(self):
        return self.hi - self.lo

    @property
    def depth(self):
        return len(self.code)


def distortion_constant(eta: float) -> float:
    """Two-sided derivative-ratio bound for pullbacks of [eta, 1-eta]."""
    if eta <= 0:
        raise ValueError("eta must be positive")
    return ((1.0 + eta) / eta) ** 2


def pullback_point(family, path, code, y: float, first_offset: int = 0):
    """Pull one point back through the inverse-branch composition of ``code``.

    Returns (x, deriv) with deriv = |d/dy of the composition| accumulated by
    the chain rule.  Depth 0 returns (y, 1.0).
    """
    symbols = tuple(code.symbols) if isinstance(code, CylinderCode) else tuple(code)
    x = float(y)
    deriv = 1.0
    for m in range(len(symbols) - 1, -1, -1):
        ev = family.map_for(path, first_offset + m).evals[symbols[m]]
        x = float(ev.inverse(x))
        deriv /= abs(float(ev.deriv(x)))
    return x, deriv


def pullback_grid(family, path, code, ys, first_offset: int = 0):
    """Vectorized pullback of many points through a single code."""
    symbols = tuple(code.symbols) if isinstance(code, CylinderCode) else tuple(code)
    x = np.asarray(ys, dtype=float).copy()
    deriv = np.ones_like(x)
    for m in range(len(symbols) - 1, -1, -1):
        ev = family.map_for(path, first_offset + m).evals[symbols[m]]
        x = ev.inverse(x)
        deriv /= np.abs(ev.deriv(x))
    return x, deriv


def pullback_many(family, path, codes: np.ndarray, ys, first_offset: int = 0):
    """Pull back one point per code; codes is an (F, n) integer array.

    Symbols at the same position are grouped so each step costs a handful of
    vectorized branch evaluations regardless of the frontier size.
    """
    codes = np.asarray(codes, dtype=int)
    if codes.ndim != 2:
        raise ValueError("codes must be a 2-d array")
    x = np.asarray(ys, dtype=float).copy()
    deriv = np.ones_like(x)
    n = codes.shape[1]
    for m in range(n - 1, -1, -1):
        mp = family.map_for(path, first_offset + m)
        col = codes[:, m]
        for s in np.unique(col):
            mask = col == s
            ev = mp.evals[int(s)]
            xs = ev.inverse(x[mask])
            x[mask] = xs
            deriv[mask] /= np.abs(ev.deriv(xs))
    return x, deriv


def truncation_point(family, path, k: int, offset: int = 0) -> float:
    """Left endpoint of the k-th truncation window: the k-fold pullback of 1
    through the branch at 0 along the orbit starting at ``offset``."""
    if k < 1:
        raise ValueError("k must be >= 1")
    x = 1.0
    for m in range(k - 1, -1, -1):
        mp = family.map_for(path, offset + m)
        ev = mp.evals[mp.partition.delta0_index]
        x = float(ev.inverse(x))
    return x


def level_interval(family, path, j: int, offset: int = 0) -> tuple[float, float]:
    """The j-th dyadic-like level set near 0: between consecutive pullbacks of 1."""
    hi = 1.0 if j == 1 else truncation_point(family, path, j - 1, offset)
    lo = truncation_point(family, path, j, offset)
    return lo, hi


def neutral_window(family, path, k: int, offset: int = 0) -> tuple[float, float]:
    """V(k) = [0, truncation_point(k)], the part removed by truncation."""
    return 0.0, truncation_point(family, path, k, offset)


def expand_cylinder_tree(family, path, max_depth: int | None = None,
                         diam_below: float | None = None,
                         leaf_cap: int = 10_000_000,
                         first_offset: int = 0,
                         with_deriv: bool = False):
    """Breadth-first refinement of the cylinder partition.

    Children of a frontier node are the pullbacks of each branch domain
    through the node's composition; refinement stops per node once its
    diameter drops below ``diam_below`` (or the machine floor 1e-14) or the
    node reaches ``max_depth``.  Returns a list of CylinderInterval leaves
    ordered by code, plus the per-depth supremum of frontier diameters.
    """
    if max_depth is None and diam_below is None:
        raise ValueError("need a stopping rule: max_depth or diam_below")
    if max_depth is None:
        max_depth = 25
    if max_depth > 25:
        raise ValueError("max_depth capped at 25")
    nG = family.partition.n_branches
    if nG < 2:
        raise ValueError("tree expansion needs at least two branches")
    eps = diam_below if diam_below is not None else 0.0
    eps = max(eps, 1e-14)
    if max_depth == 0:
        return [CylinderInterval((), 0.0, 1.0, 1.0 if with_deriv else None)], [1.0]

    # frontier: codes (F, depth), los, his
    codes = np.empty((1, 0), dtype=int)
    los = np.array([0.0])
    his = np.array([1.0])
    leaves = []
    sup_by_depth = [1.0]

    for depth in range(max_depth):
        diams = his - los
        refine = diams >= eps
        done = ~refine
        for i in np.nonzero(done)[0]:
            leaves.append((tuple(codes[i]), los[i], his[i]))
        if not np.any(refine):
            break
        parent_codes = codes[refine]
        n_parent = parent_codes.shape[0]
        if n_parent * nG + len(leaves) > leaf_cap:
            raise Explosion(f"cylinder tree would exceed leaf cap {leaf_cap} at depth {depth + 1}")
        # children: pull each branch-domain endpoint back through the parent codes
        child_codes = np.repeat(parent_codes, nG, axis=0)
        new_sym = np.tile(np.arange(nG), n_parent)[:, None]
        child_codes = np.concatenate([child_codes, new_sym], axis=1)
        bounds = np.array(family.partition.intervals())  # (nG, 2)
        ylo = np.tile(bounds[:, 0], n_parent)
        yhi = np.tile(bounds[:, 1], n_parent)
        # deepest symbol maps its own domain, so only the parent prefix acts
        xlo, _ = pullback_many(family, path, child_codes[:, :-1], ylo, first_offset)
        xhi, _ = pullback_many(family, path, child_codes[:, :-1], yhi, first_offset)
        los = np.minimum(xlo, xhi)
        his = np.maximum(xlo, xhi)
        codes = child_codes
        sup_by_depth.append(float(np.max(his - los)))
        if depth == max_depth - 1:
            for i in range(codes.shape[0]):
                leaves.append((tuple(codes[i]), los[i], his[i]))
            codes = np.empty((0, max_depth), dtype=int)
            break

    leaves.sort(key=lambda t: t[0])
    if not with_deriv:
        return [CylinderInterval(c, float(lo), float(hi)) for c, lo, hi in leaves], sup_by_depth

    # derivative of the composition at the midpoint of [eta, 1-eta], i.e. 0.5,
    # grouped by depth for vectorized evaluation
    by_depth = {}
    for i, (c, _, _) in enumerate(leaves):
        by_depth.setdefault(len(c), []).append(i)
    derivs = np.empty(len(leaves))
    for d, idxs in by_depth.items():
        cs = np.array([leaves[i][0] for i in idxs], dtype=int).reshape(len(idxs), d)
        _, dv = pullback_many(family, path, cs, np.full(len(idxs), 0.5), first_offset)
        derivs[idxs] = dv
    return [CylinderInterval(c, float(lo), float(hi), float(derivs[i]))
            for i, (c, lo, hi) in enumerate(leaves)], sup_by_depth
