"""Piecewise monotone interval maps with full branches onto [0,1].

A map is described by an ordered partition of closed subintervals of [0,1]
with disjoint interiors.  Every branch is monotone and onto [0,1]; a branch
is either uniformly expanding or carries a single critical point at one of
its endpoints, with the critical value pinned to 0 or 1.  The geometry (the
partition, the expansion constant kappa, the derivative cap A) is shared by
every map of a family; only the branch profiles may depend on the fiber
parameter.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field
from typing import Callable, Sequence

import numpy as np

from .errors import BadGeometry, NonDifferentiable

EXPANDING = "expanding"
CRITICAL = "critical"

# Slack used when grid-checking inequalities that hold with equality by design.
_GRID_SLACK = 1e-9


# ---------------------------------------------------------------------------
# branch evaluators
# ---------------------------------------------------------------------------

class AffineBranch:
    """f(x) = (x-lo)/(hi-lo) (increasing) or (hi-x)/(hi-lo) (decreasing)."""

    kind = EXPANDING

    def __init__(self, lo: float, hi: float, increasing: bool = True):
        self.lo = float(lo)
        self.hi = float(hi)
        self.increasing = bool(increasing)
        self._slope = 1.0 / (self.hi - self.lo)

    def value(self, x):
        if self.increasing:
            return (np.asarray(x) - self.lo) * self._slope
        return (self.hi - np.asarray(x)) * self._slope

    def deriv(self, x):
        s = self._slope if self.increasing else -self._slope
        return np.full_like(np.asarray(x, dtype=float), s)

    def inverse(self, y):
        y = np.clip(np.asarray(y, dtype=float), 0.0, 1.0)
        if self.increasing:
            return self.lo + y * (self.hi - self.lo)
        return self.hi - y * (self.hi - self.lo)

    def schwarzian(self, x):
        return np.zeros_like(np.asarray(x, dtype=float))

    @property
    def min_abs_deriv(self):
        return self._slope

    @property
    def max_abs_deriv(self):
        return self._slope


class PowerBranch:
    """Branch with a critical point c at one endpoint, f(c) in {0,1}.

    Normal form f(x) = v_c + (1-2*v_c) * (|x-c|/L)**p with p > 1, so that the
    far endpoint maps to 1-v_c and f'(c) = 0.
    """

    kind = CRITICAL

    def __init__(self, lo: float, hi: float, critical_side: str, critical_value: int, p: float):
        if critical_side not in ("left", "right"):
            raise BadGeometry(f"critical_side must be 'left' or 'right', got {critical_side!r}")
        if critical_value not in (0, 1):
            raise BadGeometry(f"critical_value must be 0 or 1, got {critical_value!r}")
        if not p > 1.0:
            raise BadGeometry(f"power-branch exponent must exceed 1, got {p}")
        self.lo = float(lo)
        self.hi = float(hi)
        self.critical_side = critical_side
        self.critical_value = int(critical_value)
        self.p = float(p)
        self.c = self.lo if critical_side == "left" else self.hi
        self.L = self.hi - self.lo
        # orientation: sign of f on the branch
        away = 1.0 if critical_value == 0 else -1.0
        toward_c = -1.0 if critical_side == "right" else 1.0
        self.increasing = (away * toward_c) > 0

    def value(self, x):
        u = np.abs(np.asarray(x, dtype=float) - self.c) / self.L
        v = u**self.p
        return self.critical_value + (1 - 2 * self.critical_value) * v

    def deriv(self, x):
        x = np.asarray(x, dtype=float)
        u = np.abs(x - self.c) / self.L
        mag = (self.p / self.L) * u ** (self.p - 1.0)
        sgn = np.sign(x - self.c) * (1 - 2 * self.critical_value)
        return mag * sgn

    def inverse(self, y):
        y = np.clip(np.asarray(y, dtype=float), 0.0, 1.0)
        u = np.abs(y - self.critical_value) ** (1.0 / self.p)
        if self.critical_side == "left":
            return self.c + self.L * u
        return self.c - self.L * u

    def schwarzian(self, x):
        # scale/translation invariant: S equals that of u -> u**p
        d = np.asarray(x, dtype=float) - self.c
        with np.errstate(divide="ignore"):
            return -(self.p**2 - 1.0) / (2.0 * d * d)

    @property
    def min_abs_deriv(self):
        return 0.0

    @property
    def max_abs_deriv(self):
        return self.p / self.L


class UserBranch:
    """Branch given by a callable pair (f, f_inverse), optional derivative.

    When no derivative is supplied it is approximated by central differences
    with step 1e-6 (relative to the branch length for very short branches).
    """

    def __init__(self, lo: float, hi: float, f: Callable, finv: Callable,
                 df: Callable | None = None, kind: str = EXPANDING,
                 critical_side: str | None = None, critical_value: int | None = None,
                 p: float | None = None):
        self.lo = float(lo)
        self.hi = float(hi)
        self.f = f
        self.finv = finv
        self._df = df
        self.kind = kind
        self.critical_side = critical_side
        self.critical_value = critical_value
        self.p = p
        self.c = None
        if kind == CRITICAL:
            self.c = self.lo if critical_side == "left" else self.hi
        self.increasing = float(f(self.hi)) > float(f(self.lo))
        self._h = min(1e-6, 1e-4 * (self.hi - self.lo))

    def value(self, x):
        return np.asarray(self.f(np.asarray(x, dtype=float)), dtype=float)

    def deriv(self, x):
        if self._df is not None:
            return np.asarray(self._df(np.asarray(x, dtype=float)), dtype=float)
        x = np.asarray(x, dtype=float)
        h = self._h
        xp = np.minimum(x + h, self.hi)
        xm = np.maximum(x - h, self.lo)
        return (self.value(xp) - self.value(xm)) / (xp - xm)

    def inverse(self, y):
        y = np.clip(np.asarray(y, dtype=float), 0.0, 1.0)
        return np.asarray(self.finv(y), dtype=float)

    def schwarzian(self, x):
        # five-point stencil for f''' and f''; step tied to the branch length
        h = 1e-4 * (self.hi - self.lo)
        x = np.asarray(x, dtype=float)
        f = self.value
        f1 = (f(x + h) - f(x - h)) / (2 * h)
        f2 = (f(x + h) - 2 * f(x) + f(x - h)) / h**2
        f3 = (f(x + 2 * h) - 2 * f(x + h) + 2 * f(x - h) - f(x - 2 * h)) / (2 * h**3)
        with np.errstate(divide="ignore", invalid="ignore"):
            return f3 / f1 - 1.5 * (f2 / f1) ** 2


# ---------------------------------------------------------------------------
# declarative branch / partition specs
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class BranchSpec:
    """Declarative description of one branch of the shared partition.

    ``exponent`` is the order of tangency at the critical point minus one
    (gamma in the normal form (x-c)**(1+gamma)); ``exponent_from_fiber``
    marks families whose tangency order is the fiber parameter itself, in
    which case ``exponent`` records the supremum over the parameter range.
    """

    lo: float
    hi: float
    kind: str = EXPANDING
    critical_side: str | None = None     # 'left' | 'right' for critical branches
    exponent: float | None = None        # gamma >= 1, None for expanding
    critical_value: int | None = None    # 0 | 1, None for expanding
    increasing: bool | None = None       # orientation hint for affine branches
    exponent_from_fiber: bool = False

    def __post_init__(self):
        if not (0.0 <= self.lo < self.hi <= 1.0):
            raise BadGeometry(f"branch [{self.lo}, {self.hi}] is not a subinterval of [0,1]")
        if self.kind == CRITICAL:
            if self.critical_side not in ("left", "right"):
                raise BadGeometry("critical branch needs critical_side 'left' or 'right'")
            if self.critical_value not in (0, 1):
                raise BadGeometry("critical branch needs critical_value 0 or 1")
            if self.exponent is None or self.exponent < 1.0:
                raise BadGeometry("critical branch needs exponent gamma >= 1")
        elif self.kind != EXPANDING:
            raise BadGeometry(f"unknown branch kind {self.kind!r}")

    @property
    def length(self):
        return self.hi - self.lo

    @property
    def critical_point(self):
        if self.kind != CRITICAL:
            return None
        return self.lo if self.critical_side == "left" else self.hi


@dataclass(frozen=True)
class PartitionSpec:
    """The shared interval collection with its uniformity constants.

    ``relaxed_mode`` waives the requirement of a critical branch mapping to 0;
    it exists only so that affine cookie-cutter oracles (which have no critical
    points at all) can be pushed through the same pipelines.  Every report and
    output produced from a relaxed partition carries the flag.
    """

    branches: tuple[BranchSpec, ...]
    kappa: float
    bigA: float
    relaxed_mode: bool = False

    def __post_init__(self):
        if len(self.branches) < 1:
            raise BadGeometry("partition needs at least one branch")
        if not self.kappa > 1.0:
            raise BadGeometry(f"kappa must exceed 1, got {self.kappa}")
        if not self.bigA > 1.0:
            raise BadGeometry(f"A must exceed 1, got {self.bigA}")
        ivals = sorted((b.lo, b.hi) for b in self.branches)
        for (l1, h1), (l2, h2) in zip(ivals, ivals[1:]):
            if l2 < h1 - 1e-15:
                raise BadGeometry(f"branches [{l1},{h1}] and [{l2},{h2}] overlap")
        if abs(ivals[0][0]) > 1e-15:
            raise BadGeometry("0 must belong to a branch interval")
        if abs(ivals[-1][1] - 1.0) > 1e-15:
            raise BadGeometry("1 must belong to a branch interval")
        if len(self.branches) >= 2 and ivals[0][1] >= ivals[-1][0]:
            raise BadGeometry("0 and 1 must lie in two different branches")
        if len(self.branches) == 1:
            raise BadGeometry("0 and 1 must lie in two different branches")
        if not self.relaxed_mode and not any(
            b.kind == CRITICAL and b.critical_value == 0 for b in self.branches
        ):
            raise BadGeometry(
                "no critical branch with critical value 0; "
                "use relaxed_mode=True for purely expanding oracles"
            )

    @property
    def n_branches(self):
        return len(self.branches)

    @property
    def delta0_index(self):
        return min(range(len(self.branches)), key=lambda i: self.branches[i].lo)

    @property
    def delta1_index(self):
        return max(range(len(self.branches)), key=lambda i: self.branches[i].hi)

    @property
    def gamma_plus(self):
        gs = [b.exponent for b in self.branches if b.kind == CRITICAL]
        return max(gs) if gs else None

    @property
    def gamma0_plus(self):
        gs = [b.exponent for b in self.branches if b.kind == CRITICAL and b.critical_value == 0]
        return max(gs) if gs else None

    def intervals(self):
        return [(b.lo, b.hi) for b in self.branches]

    def covers_unit_interval(self, tol: float = 1e-12) -> bool:
        ivals = sorted(self.intervals())
        if ivals[0][0] > tol or ivals[-1][1] < 1.0 - tol:
            return False
        return all(l2 - h1 <= tol for (_, h1), (l2, _) in zip(ivals, ivals[1:]))


# ---------------------------------------------------------------------------
# realized maps
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class MapInstance:
    """One realized map of a family: partition plus concrete branch evaluators.

    Immutable after construction; the mutable ``_cache`` dict only memoizes
    derived tables (bin pullback tables, validation grids) keyed by shape.
    """

    partition: PartitionSpec
    evals: tuple
    fiber_param: float | None = None
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    @property
    def n_branches(self):
        return len(self.evals)

    def branch_interval(self, i: int):
        b = self.partition.branches[i]
        return (b.lo, b.hi)

    def locate(self, x):
        """Branch index containing each point of x, or -1 for gap points."""
        x = np.asarray(x, dtype=float)
        idx = np.full(x.shape, -1, dtype=int)
        for i, b in enumerate(self.partition.branches):
            inside = (x >= b.lo) & (x <= b.hi)
            idx = np.where(inside & (idx < 0), i, idx)
        return idx

    def apply(self, x):
        """Forward image T(x); NaN outside the branch domains."""
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, np.nan)
        for i, ev in enumerate(self.evals):
            b = self.partition.branches[i]
            inside = (x >= b.lo) & (x <= b.hi)
            if np.any(inside):
                out = np.where(inside, ev.value(x), out)
        return out

    def deriv(self, x):
        """T'(x) on the branch domains; NaN in the gaps."""
        x = np.asarray(x, dtype=float)
        out = np.full(x.shape, np.nan)
        for i, ev in enumerate(self.evals):
            b = self.partition.branches[i]
            inside = (x >= b.lo) & (x <= b.hi)
            if np.any(inside):
                out = np.where(inside, ev.deriv(x), out)
        return out

    def deriv_at_zero(self) -> float:
        return float(self.evals[self.partition.delta0_index].deriv(0.0))


def schwarzian(map_inst: MapInstance, branch: int, x: float) -> float:
    """Schwarzian derivative S(f) = f'''/f' - 1.5 (f''/f')^2 of one branch.

    Closed-form branches are differentiated exactly; user branches fall back
    to central finite differences.  Raises NonDifferentiable at points where
    f' vanishes (the critical endpoint).
    """
    ev = map_inst.evals[branch]
    d = float(np.abs(ev.deriv(x)))
    if d == 0.0 or not math.isfinite(d):
        raise NonDifferentiable(f"f' vanishes at x={x} on branch {branch}")
    return float(ev.schwarzian(x))


# ---------------------------------------------------------------------------
# validation of the class conditions
# ---------------------------------------------------------------------------

@dataclass
class ConditionResult:
    name: str
    passed: bool
    detail: str
    witness: float | None = None


@dataclass
class ValidationReport:
    conditions: list
    relaxed_mode: bool
    s_value: float | None

    @property
    def passed(self):
        return all(c.passed for c in self.conditions)

    def condition(self, name: str) -> ConditionResult:
        for c in self.conditions:
            if c.name == name:
                return c
        raise KeyError(name)

    def summary(self) -> str:
        lines = []
        for c in self.conditions:
            lines.append(f"{c.name}: {'pass' if c.passed else 'FAIL'} ({c.detail})")
        if self.relaxed_mode:
            lines.append("relaxed_mode: critical-branch requirement waived (oracle map)")
        return "\n".join(lines)


def _branch_grid(b: BranchSpec, n: int):
    return np.linspace(b.lo, b.hi, n)


def compute_expansion_margin(map_inst: MapInstance, grid_points: int = 512):
    """Smallest s satisfying both uniform-expansion clauses near 0 and 1.

    s is derived, not user supplied: the lower bound is the pullback of the
    larger endpoint-branch length through the branch at 0; the derivative
    clause is then verified on a grid.  Returns (s, ok, detail).
    """
    part = map_inst.partition
    b0 = part.branches[part.delta0_index]
    b1 = part.branches[part.delta1_index]
    target = max(b0.length, b1.length)
    s = float(map_inst.evals[part.delta0_index].inverse(target))
    if s > 0.45:
        return s, False, f"required s={s:.4f} exceeds 0.45"
    lo_region = (0.0, s)
    hi_region = (1.0 - s, 1.0)
    worst = np.inf
    for i, b in enumerate(part.branches):
        for rlo, rhi in (lo_region, hi_region):
            a, c = max(b.lo, rlo), min(b.hi, rhi)
            if c <= a:
                continue
            xs = np.linspace(a, c, max(8, grid_points // 8))
            worst = min(worst, float(np.min(np.abs(map_inst.evals[i].deriv(xs)))))
    if worst < part.kappa - _GRID_SLACK:
        return s, False, f"|f'| dips to {worst:.4f} < kappa on [0,s] u [1-s,1]"
    return s, True, f"s={s:.4f}, min |f'| on guard region {worst:.4f}"


def validate_map(map_inst: MapInstance, grid_points: int = 1000, tol: float = 1e-8) -> ValidationReport:
    """Grid-check the class conditions; failures become report entries, not errors.

    Checked per branch: smoothness surrogate (finite values), injectivity via a
    constant derivative sign, surjectivity onto [0,1] via the endpoint images,
    and a non-positive Schwarzian away from critical endpoints.  Affine
    branches sit exactly at S = 0, which the report accepts: the distortion
    arguments only need S <= 0, and the affine oracles would otherwise be
    unrepresentable.
    """
    part = map_inst.partition
    conds = []
    n = max(100, grid_points)

    # (M1): C^3 on each branch, injective, onto [0,1], non-positive Schwarzian.
    ok, detail, witness = True, "all branches monotone onto [0,1], S <= 0", None
    for i, b in enumerate(part.branches):
        ev = map_inst.evals[i]
        xs = _branch_grid(b, n)
        vals = np.asarray(ev.value(xs), dtype=float)
        endpoints = sorted((float(vals[0]), float(vals[-1])))
        if abs(endpoints[0]) > tol or abs(endpoints[1] - 1.0) > tol:
            ok, detail, witness = False, f"branch {i} image [{endpoints[0]:.3g},{endpoints[1]:.3g}] is not [0,1]", b.lo
            break
        dv = np.diff(vals)
        if not (np.all(dv > -tol) or np.all(dv < tol)):
            ok, detail, witness = False, f"branch {i} is not monotone on its grid", b.lo
            break
        inner = xs[1:-1]
        if b.kind == CRITICAL:
            inner = inner[np.abs(inner - b.critical_point) > 1e-9]
        sv = np.asarray(ev.schwarzian(inner), dtype=float)
        if np.any(sv > 1e-9):
            j = int(np.argmax(sv))
            ok, detail, witness = False, f"branch {i} has S={sv[j]:.3g} > 0", float(inner[j])
            break
    conds.append(ConditionResult("M1", ok, detail, witness))

    # (M2): uniform expansion on expanding branches.
    ok, detail, witness = True, f"|f'| >= kappa={part.kappa:g} on expanding branches", None
    for i, b in enumerate(part.branches):
        if b.kind != EXPANDING:
            continue
        xs = _branch_grid(b, n)
        m = float(np.min(np.abs(map_inst.evals[i].deriv(xs))))
        if m < part.kappa - _GRID_SLACK:
            ok, detail, witness = False, f"branch {i} has |f'|={m:.4f} < kappa", b.lo
            break
    conds.append(ConditionResult("M2", ok, detail, witness))

    # (M3): unique critical point at a branch endpoint.
    ok, detail, witness = True, "critical points sit at branch endpoints, f'(c)=0", None
    for i, b in enumerate(part.branches):
        if b.kind != CRITICAL:
            continue
        ev = map_inst.evals[i]
        c = b.critical_point
        if abs(float(ev.deriv(c))) > tol:
            ok, detail, witness = False, f"branch {i}: f'(c)={float(ev.deriv(c)):.3g} != 0", c
            break
        xs = _branch_grid(b, n)[1:-1]
        xs = xs[np.abs(xs - c) > 1e-6]
        if xs.size and float(np.min(np.abs(ev.deriv(xs)))) <= 0.0:
            ok, detail, witness = False, f"branch {i}: interior critical point", b.lo
            break
    conds.append(ConditionResult("M3", ok, detail, witness))

    # (M4): critical values in {0,1}; the branch at 1 sends 1 to 0.
    ok, detail, witness = True, "f(c) in {0,1} and f(1)=0", None
    for i, b in enumerate(part.branches):
        if b.kind != CRITICAL:
            continue
        v = float(map_inst.evals[i].value(b.critical_point))
        if min(abs(v), abs(v - 1.0)) > tol:
            ok, detail, witness = False, f"branch {i}: f(c)={v:.3g} not in {{0,1}}", b.critical_point
            break
    v1 = float(map_inst.evals[part.delta1_index].value(1.0))
    if ok and abs(v1) > tol:
        ok, detail, witness = False, f"f(1)={v1:.3g} != 0", 1.0
    conds.append(ConditionResult("M4", ok, detail, witness))

    # (M5a): f(0)=0, f'(0) >= kappa, f'(1) <= -kappa.
    v0 = float(map_inst.evals[part.delta0_index].value(0.0))
    d0 = float(map_inst.evals[part.delta0_index].deriv(0.0))
    d1 = float(map_inst.evals[part.delta1_index].deriv(1.0))
    ok = abs(v0) <= tol and d0 >= part.kappa - _GRID_SLACK and d1 <= -part.kappa + _GRID_SLACK
    conds.append(ConditionResult(
        "M5a", ok, f"f(0)={v0:.3g}, f'(0)={d0:.4g}, f'(1)={d1:.4g}", 0.0 if not ok else None))

    # (M5b): derivative cap.
    sup = 0.0
    for i, b in enumerate(part.branches):
        xs = _branch_grid(b, n)
        sup = max(sup, float(np.max(np.abs(map_inst.evals[i].deriv(xs)))))
    ok = sup <= part.bigA * (1.0 + 1e-9)
    conds.append(ConditionResult("M5b", ok, f"sup |f'| = {sup:.4g} vs A = {part.bigA:g}", None))

    # (M5c): computed expansion margin s.
    s_value, ok, detail = compute_expansion_margin(map_inst, grid_points)
    conds.append(ConditionResult("M5c", ok, detail, None))

    # (M6): normal-form envelope on critical branches.  The example families
    # have constant envelope A_D, so only the upper bound is imposed on A_D'.
    ok, detail, witness = True, "normal-form envelope within [1/A, A]", None
    for i, b in enumerate(part.branches):
        if b.kind != CRITICAL:
            continue
        ev = map_inst.evals[i]
        c = b.critical_point
        vc = float(ev.value(c))
        p = getattr(ev, "p", None)
        gamma = (p - 1.0) if p is not None else b.exponent
        xs = _branch_grid(b, n)
        xs = xs[np.abs(xs - c) > 1e-4 * b.length]
        # envelope magnitude |A_D(x)| = |f(x) - f(c)| / |x - c|**(gamma+1)
        mag = np.abs(np.asarray(ev.value(xs)) - vc) / np.abs(xs - c) ** (gamma + 1.0)
        if np.any(mag > part.bigA * (1 + 1e-9)) or np.any(mag < 1.0 / part.bigA * (1 - 1e-9)):
            j = int(np.argmax(np.maximum(mag / part.bigA, 1.0 / (mag * part.bigA))))
            ok, detail, witness = False, f"branch {i}: |A_D|={mag[j]:.4g} outside [1/A, A]", float(xs[j])
            break
        denv = np.abs(np.diff(mag) / np.diff(xs))
        if denv.size and float(np.max(denv)) > part.bigA * (1 + 1e-6) + tol:
            ok, detail, witness = False, f"branch {i}: |A_D'|={float(np.max(denv)):.4g} > A", None
            break
    conds.append(ConditionResult("M6", ok, detail, witness))

    # (M7): some critical branch maps to 0; waived in relaxed mode.
    has_crit0 = any(b.kind == CRITICAL and b.critical_value == 0 for b in part.branches)
    if part.relaxed_mode:
        conds.append(ConditionResult("M7", True, "waived (relaxed_mode oracle)", None))
    else:
        conds.append(ConditionResult(
            "M7", has_crit0, "critical branch with value 0 present" if has_crit0
            else "no critical branch maps to 0", None))

    return ValidationReport(conds, part.relaxed_mode, s_value)


# ---------------------------------------------------------------------------
# realization and built-in families
# ---------------------------------------------------------------------------

def realize_map(partition: PartitionSpec, fiber_param: float | None = None) -> MapInstance:
    """Build concrete branch evaluators for one fiber of a family."""
    evals = []
    for b in partition.branches:
        if b.kind == EXPANDING:
            inc = b.increasing if b.increasing is not None else (b.hi < 1.0 - 1e-15)
            evals.append(AffineBranch(b.lo, b.hi, increasing=inc))
        else:
            gamma = fiber_param - 1.0 if b.exponent_from_fiber else b.exponent
            if b.exponent_from_fiber and fiber_param is None:
                raise BadGeometry("fiber parameter required for this partition")
            evals.append(PowerBranch(b.lo, b.hi, b.critical_side, b.critical_value, 1.0 + gamma))
    return MapInstance(partition, tuple(evals), fiber_param)


@dataclass
class RandomFamily:
    """A measurable assignment of fiber parameters to maps over one partition."""

    partition: PartitionSpec
    builder: Callable[[float], MapInstance]
    param_range: tuple[float, float]
    name: str = "family"
    _cache: dict = field(default_factory=dict, repr=False, compare=False)

    def map_for_param(self, param: float) -> MapInstance:
        key = float(param)
        m = self._cache.get(key)
        if m is None:
            m = self.builder(key)
            if len(self._cache) > 256:
                self._cache.clear()
            self._cache[key] = m
        return m

    def map_for(self, path, offset: int) -> MapInstance:
        return self.map_for_param(path.param(offset))

    @property
    def n_branches(self):
        return self.partition.n_branches

    @property
    def log_deriv_sup(self):
        """log ||T'||_inf, realized as log A of the validated partition."""
        return math.log(self.partition.bigA)


def build_example_family(a: float, b: float,
                         critical_blocks: Sequence[tuple[float, float, int]],
                         omega_range: tuple[float, float]) -> RandomFamily:
    """The explicit four-case family: affine tails, power-law half-blocks.

    The map sends [0,a] affinely to [0,1], [b,1] affinely (decreasing) to
    [0,1], and each block (a_j, b_j, target) to a pair of power branches with
    a common critical point at the block center mapping to ``target``.  The
    fiber parameter is the tangency exponent, drawn from ``omega_range``.
    """
    if not (0.0 < a < b < 1.0):
        raise BadGeometry(f"need 0 < a < b < 1, got a={a}, b={b}")
    w_lo, w_hi = float(omega_range[0]), float(omega_range[1])
    if not (3.0 <= w_lo < w_hi) or not math.isfinite(w_hi):
        raise BadGeometry(f"omega_range must be a bounded interval inside [3, inf), got {omega_range}")
    blocks = sorted(critical_blocks)
    specs = [BranchSpec(0.0, a, EXPANDING, increasing=True)]
    prev_hi = a
    sup_slope = max(1.0 / a, 1.0 / (1.0 - b))
    sup_env = 1.0
    for (aj, bj, target) in blocks:
        if aj < a - 1e-15 or bj > b + 1e-15:
            raise BadGeometry(f"block ({aj},{bj}) escapes [a,b]=[{a},{b}]")
        if aj < prev_hi - 1e-15:
            raise BadGeometry(f"block ({aj},{bj}) overlaps an earlier block")
        if target not in (0, 1):
            raise BadGeometry(f"block target must be 0 or 1, got {target}")
        mj = 0.5 * (aj + bj)
        half = 0.5 * (bj - aj)
        specs.append(BranchSpec(aj, mj, CRITICAL, critical_side="right",
                                exponent=w_hi - 1.0, critical_value=target,
                                exponent_from_fiber=True))
        specs.append(BranchSpec(mj, bj, CRITICAL, critical_side="left",
                                exponent=w_hi - 1.0, critical_value=target,
                                exponent_from_fiber=True))
        sup_slope = max(sup_slope, w_hi / half)
        sup_env = max(sup_env, (1.0 / half) ** w_hi)
        prev_hi = bj
    specs.append(BranchSpec(b, 1.0, EXPANDING, increasing=False))
    kappa = min(1.0 / a, 1.0 / (1.0 - b))
    bigA = max(sup_slope, sup_env) * (1.0 + 1e-9)
    part = PartitionSpec(tuple(specs), kappa=kappa, bigA=bigA, relaxed_mode=False)

    def builder(w: float) -> MapInstance:
        if not (w_lo <= w <= w_hi):
            raise BadGeometry(f"fiber parameter {w} outside omega_range [{w_lo},{w_hi}]")
        return realize_map(part, w)

    return RandomFamily(part, builder, (w_lo, w_hi), name="example")


def build_affine_cookie_cutter(intervals: Sequence[tuple[float, float]]) -> MapInstance:
    """Deterministic affine oracle: each interval is mapped affinely onto [0,1].

    The branch containing 0 increases and the branch containing 1 decreases,
    matching the fixed-point normalization of the validated class.  The
    attractor dimension obeys the Moran equation sum(len_i ** s) = 1.
    """
    ivals = sorted((float(l), float(h)) for l, h in intervals)
    for (l1, h1), (l2, h2) in zip(ivals, ivals[1:]):
        if l2 < h1 - 1e-15:
            raise BadGeometry(f"intervals [{l1},{h1}] and [{l2},{h2}] overlap")
    specs = []
    for (lo, hi) in ivals:
        inc = hi < 1.0 - 1e-15
        specs.append(BranchSpec(lo, hi, EXPANDING, increasing=inc))
    slopes = [1.0 / (hi - lo) for lo, hi in ivals]
    part = PartitionSpec(tuple(specs), kappa=min(slopes), bigA=max(slopes) * (1 + 1e-12),
                         relaxed_mode=True)
    return realize_map(part)


def constant_family(map_inst: MapInstance, name: str = "constant") -> RandomFamily:
    """Wrap a single deterministic map as a (degenerate) random family."""
    return RandomFamily(map_inst.partition, lambda _p: map_inst,
                        (-math.inf, math.inf), name=name)
