"""Base orbit sampling: finite two-sided windows of fiber parameters.

Three base kinds are built in: a Dirac point mass (deterministic), an
irrational rotation read through an affine parameter map, and a Bernoulli
shift over a finite alphabet.  All windows are deterministic functions of
(seed, sample_index, absolute coordinate), so shifted or widened windows
agree wherever they overlap and workers can fan out by sample index.
"""

from __future__ import annotations

import math
from dataclasses import dataclass, field, replace
from fractions import Fraction

import numpy as np

from .errors import ConfigError

DIRAC = "dirac"
ROTATION = "rotation"
BERNOULLI = "bernoulli"

#: golden-ratio conjugate, the default rotation number
ALPHA_GOLDEN = (math.sqrt(5.0) - 1.0) / 2.0


@dataclass(frozen=True)
class BaseSystem:
    """An ergodic invertible base transformation with an invariant measure.

    The rotation angle is held as a high-precision rational approximant
    (denominator >= 1e9), which makes orbit arithmetic exact and reproducible;
    at desk scale the approximant is indistinguishable from an irrational.
    Ergodicity of the three built-in kinds is assumed, not verified.
    """

    kind: str
    seed: int = 0
    param: float | None = None                       # dirac
    alpha: float | None = None                       # rotation
    param_range: tuple[float, float] | None = None   # rotation: affine image of [0,1)
    alphabet: tuple[tuple[float, float], ...] | None = None  # bernoulli: (param, prob)

    def __post_init__(self):
        if self.kind == DIRAC:
            if self.param is None:
                raise ConfigError("base.param", "Dirac base needs a parameter")
        elif self.kind == ROTATION:
            if self.alpha is None or not (0.0 < self.alpha < 1.0):
                raise ConfigError("base.alpha", f"rotation angle must lie in (0,1), got {self.alpha}")
            if self.param_range is None or not self.param_range[0] < self.param_range[1]:
                raise ConfigError("base.param_range", "rotation needs an increasing parameter range")
            frac = Fraction(self.alpha).limit_denominator(10**12)
            if frac.denominator < 10**9:
                raise ConfigError("base.alpha", "angle is too rational: approximant denominator < 1e9")
            object.__setattr__(self, "_alpha_frac", frac)
        elif self.kind == BERNOULLI:
            if not self.alphabet:
                raise ConfigError("base.alphabet", "Bernoulli base needs a nonempty alphabet")
            total = sum(p for _, p in self.alphabet)
            if abs(total - 1.0) > 1e-12:
                raise ConfigError("base.alphabet", f"probabilities sum to {total!r}, not 1")
            if any(p < 0 for _, p in self.alphabet):
                raise ConfigError("base.alphabet", "probabilities must be nonnegative")
        else:
            raise ConfigError("base.kind", f"unknown base kind {self.kind!r}")

    def _param_at(self, sample_index: int, j: int) -> float:
        """Parameter of the fiber at absolute window coordinate j."""
        if self.kind == DIRAC:
            return float(self.param)
        if self.kind == ROTATION:
            rng = np.random.default_rng([self.seed & 0x7FFFFFFF, sample_index])
            x0 = Fraction(rng.random()).limit_denominator(10**12)
            x = (x0 + j * self._alpha_frac) % 1
            lo, hi = self.param_range
            return lo + float(x) * (hi - lo)
        # bernoulli: one independent draw per absolute coordinate
        rng = np.random.default_rng([self.seed & 0x7FFFFFFF, sample_index, j + 2**32])
        u = rng.random()
        acc = 0.0
        for p, prob in self.alphabet:
            acc += prob
            if u < acc:
                return float(p)
        return float(self.alphabet[-1][0])

    def with_seed(self, seed: int | None) -> "BaseSystem":
        return self if seed is None else replace(self, seed=int(seed))


@dataclass(frozen=True)
class BasePath:
    """A realized window of fiber parameters around an abstract center 0.

    ``param(j)`` reads the parameter of the fiber j shifts into the future
    (negative j: into the past).  ``shift(k)`` re-centers the window; reads
    agree with the unshifted path because sampling is keyed to absolute
    coordinates.
    """

    base: BaseSystem
    sample_index: int
    n_past: int
    n_future: int
    params: np.ndarray = field(repr=False, compare=False)
    center_offset: int = 0

    def param(self, j: int) -> float:
        i = j + self.center_offset + self.n_past
        if not (0 <= i < len(self.params)):
            raise IndexError(
                f"offset {j} outside realized window "
                f"[{-self.n_past - self.center_offset}, {self.n_future - self.center_offset}]")
        return float(self.params[i])

    @property
    def offsets(self):
        return range(-self.n_past - self.center_offset,
                     self.n_future - self.center_offset + 1)

    def shift(self, k: int) -> "BasePath":
        return BasePath(self.base, self.sample_index, self.n_past, self.n_future,
                        self.params, self.center_offset + k)

    @property
    def provenance(self):
        return {"base_kind": self.base.kind, "seed": self.base.seed,
                "sample_index": self.sample_index}


def sample_path(base: BaseSystem, n_past: int, n_future: int, sample_index: int = 0) -> BasePath:
    """Materialize the window j in [-n_past, n_future] of one base orbit."""
    if n_past < 0 or n_future < 0:
        raise ValueError("window bounds must be nonnegative")
    js = np.arange(-n_past, n_future + 1)
    params = np.array([base._param_at(sample_index, int(j)) for j in js])
    return BasePath(base, sample_index, n_past, n_future, params)


def chi0(base: BaseSystem, family, n_samples: int = 64) -> tuple[float, float]:
    """Monte Carlo estimate of the expected log-derivative at the fixed point 0.

    A Dirac base is a single exact evaluation with zero standard error.
    """
    if base.kind == DIRAC:
        m = family.map_for_param(float(base.param))
        return math.log(abs(m.deriv_at_zero())), 0.0
    vals = np.empty(n_samples)
    for i in range(n_samples):
        p = sample_path(base, 0, 0, sample_index=i).param(0)
        vals[i] = math.log(abs(family.map_for_param(p).deriv_at_zero()))
    est = float(np.mean(vals))
    stderr = float(np.std(vals, ddof=1) / math.sqrt(n_samples)) if n_samples > 1 else 0.0
    return est, stderr


def dirac_base(param: float, seed: int = 0) -> BaseSystem:
    return BaseSystem(DIRAC, seed=seed, param=param)


def rotation_base(param_range: tuple[float, float], alpha: float = ALPHA_GOLDEN,
                  seed: int = 0) -> BaseSystem:
    return BaseSystem(ROTATION, seed=seed, alpha=alpha, param_range=tuple(param_range))


def bernoulli_base(alphabet, seed: int = 0) -> BaseSystem:
    return BaseSystem(BERNOULLI, seed=seed, alphabet=tuple((float(p), float(q)) for p, q in alphabet))
