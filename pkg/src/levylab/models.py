"""Lévy model catalog: jump laws, cumulant exponents, and path regularity.

Two families are supported:

* ``BrownianDrift`` — X_t = drift*t + sigma*B_t (no jumps), and
* ``CompoundPoissonDrift`` — X_t = drift*t + (up jumps) - (down jumps),
  with independent compound-Poisson components on each side.

Both have bounded-variation jump parts, so the mass of the upward jump
measure above any level is finite.  Everything downstream (ladder
factorization, renewal computation, exact path simulation) derives from
the immutable :class:`LevyModel` value defined here.
"""

from __future__ import annotations

import enum
import math
from dataclasses import dataclass
from functools import cached_property

import numpy as np
from scipy import integrate, special

from .errors import DomainError, UnsupportedModel

__all__ = [
    "JumpLaw",
    "ExponentialJumps",
    "TiltedParetoJumps",
    "TabulatedJumps",
    "LevyModel",
    "ModelKind",
    "MomentClass",
    "MomentReport",
    "PathCase",
    "RegularityReport",
    "psi_eval",
    "psi_derivative",
    "cramer_root",
    "exp_moment",
    "pi_tail",
    "classify_path_regularity",
    "model_from_spec",
    "model_to_spec",
]

# Tolerances fixed by the module contract.
ROOT_ABS_TOL = 1e-12        # bisection interval width for the Cramér root
CRITICAL_TOL = 1e-10        # |E e^{aX_1} - 1| band counted as critical
_TAB_REFINE_TOL = 1e-9      # relative-change stop for tabulated transforms


class ModelKind(enum.Enum):
    BROWNIAN_DRIFT = "BrownianDrift"
    COMPOUND_POISSON_DRIFT = "CompoundPoissonDrift"


# ---------------------------------------------------------------------------
# Jump laws
# ---------------------------------------------------------------------------

class JumpLaw:
    """A jump-size law on (0, inf), defined through its survival function.

    Subclasses provide exact log-survival, density, the exponential-moment
    transform ``mgf(lam) = E e^{lam Y}`` (with its divergence boundary),
    the integrated tail ``int_x^inf S(u) du``, and exact sampling.
    """

    def log_survival(self, x):
        raise NotImplementedError

    def survival(self, x):
        return np.exp(self.log_survival(x))

    def density(self, x):
        raise NotImplementedError

    @property
    def mean(self) -> float:
        raise NotImplementedError

    def mgf_sup(self) -> tuple[float, bool]:
        """Supremum of {lam : E e^{lam Y} < inf} and whether it is attained."""
        raise NotImplementedError

    def mgf(self, lam: float) -> float:
        """E e^{lam Y}, +inf past the divergence boundary."""
        raise NotImplementedError

    def integrated_tail(self, x):
        """int_x^inf S(u) du, exact or to near machine precision."""
        raise NotImplementedError

    def sample(self, rng: np.random.Generator, n: int) -> np.ndarray:
        raise NotImplementedError


@dataclass(frozen=True)
class ExponentialJumps(JumpLaw):
    """Exponential law with rate eta: S(x) = e^{-eta x}."""

    rate: float

    def __post_init__(self):
        if not self.rate > 0:
            raise ValueError("exponential jump rate must be positive")

    def log_survival(self, x):
        return -self.rate * np.asarray(x, dtype=float)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return self.rate * np.exp(-self.rate * x)

    @property
    def mean(self) -> float:
        return 1.0 / self.rate

    def mgf_sup(self):
        return self.rate, False

    def mgf(self, lam):
        if lam >= self.rate:
            return math.inf
        return self.rate / (self.rate - lam)

    def integrated_tail(self, x):
        return np.exp(-self.rate * np.asarray(x, dtype=float)) / self.rate

    def sample(self, rng, n):
        return rng.exponential(1.0 / self.rate, size=n)


@dataclass(frozen=True)
class TiltedParetoJumps(JumpLaw):
    """Exponentially tilted Pareto law: S(x) = e^{-tilt x} (1+x)^{-shape}.

    The moment transform is finite up to and including lam = tilt when
    shape > 1, which is what makes this the workhorse for the
    subcritical (no Cramér root) regime.
    """

    tilt: float   # exponential decay rate (the alpha of the tail class)
    shape: float  # polynomial index rho > 1

    def __post_init__(self):
        if not (self.tilt > 0 and self.shape > 1):
            raise ValueError("tilted Pareto needs tilt > 0 and shape > 1")

    def log_survival(self, x):
        x = np.asarray(x, dtype=float)
        return -self.tilt * x - self.shape * np.log1p(x)

    def density(self, x):
        x = np.asarray(x, dtype=float)
        return np.exp(-self.tilt * x) * (1 + x) ** (-self.shape) * (
            self.tilt + self.shape / (1 + x)
        )

    @property
    def mean(self) -> float:
        val, _ = integrate.quad(
            lambda u: math.exp(-self.tilt * u) * (1 + u) ** (-self.shape),
            0, np.inf)
        return val

    def mgf_sup(self):
        return self.tilt, True

    def mgf(self, lam):
        if lam > self.tilt:
            return math.inf
        if lam == self.tilt:
            return 1.0 + self.tilt / (self.shape - 1)
        val, _ = integrate.quad(
            lambda u: math.exp(-(self.tilt - lam) * u) * (1 + u) ** (-self.shape),
            0, np.inf)
        return 1.0 + lam * val

    def integrated_tail(self, x):
        x = np.asarray(x, dtype=float)
        if float(self.shape).is_integer() and self.shape >= 1:
            # int_x^inf e^{-a u}(1+u)^{-n} du = e^a (1+x)^{1-n} E_n(a(1+x))
            n = int(self.shape)
            z = self.tilt * (1 + x)
            return math.exp(self.tilt) * (1 + x) ** (1 - n) * special.expn(n, z)
        scalar = np.isscalar(x) or np.ndim(x) == 0
        xs = np.atleast_1d(x)
        out = np.array([
            integrate.quad(
                lambda u: math.exp(-self.tilt * u) * (1 + u) ** (-self.shape),
                xi, np.inf)[0]
            for xi in xs
        ])
        return float(out[0]) if scalar else out

    def sample(self, rng, n):
        # S is the product of an Exp(tilt) and a Pareto-II(shape) survival,
        # so the law is that of the minimum of the two.
        e = rng.exponential(1.0 / self.tilt, size=n)
        p = rng.pareto(self.shape, size=n)
        return np.minimum(e, p)


@dataclass(frozen=True)
class TabulatedJumps(JumpLaw):
    """Jump law given by a grid of (x, log S(x)) pairs, interpolated linearly
    in log space and extrapolated with the last slope.

    Transforms are evaluated by trapezoid quadrature in log space with step
    refinement until the relative change is below 1e-9.
    """

    x: tuple
    log_sf: tuple

    def __post_init__(self):
        xs = np.asarray(self.x, dtype=float)
        ls = np.asarray(self.log_sf, dtype=float)
        if xs.ndim != 1 or xs.shape != ls.shape or xs.size < 2:
            raise ValueError("tabulated law needs matching 1-d x / log_sf grids")
        if xs[0] != 0.0 or ls[0] != 0.0:
            raise ValueError("tabulated survival must start at S(0) = 1")
        if np.any(np.diff(xs) <= 0) or np.any(np.diff(ls) > 0):
            raise ValueError("grid must be increasing with nonincreasing log S")

    @cached_property
    def _grid(self):
        return np.asarray(self.x, dtype=float), np.asarray(self.log_sf, dtype=float)

    @cached_property
    def _tail_slope(self) -> float:
        xs, ls = self._grid
        return (ls[-1] - ls[-2]) / (xs[-1] - xs[-2])

    def log_survival(self, x):
        xs, ls = self._grid
        x = np.asarray(x, dtype=float)
        out = np.interp(x, xs, ls)
        beyond = x > xs[-1]
        if np.any(beyond):
            out = np.where(beyond, ls[-1] + self._tail_slope * (x - xs[-1]), out)
        return out

    def density(self, x):
        # central difference of the survival; adequate for diagnostics
        h = 1e-6
        x = np.asarray(x, dtype=float)
        lo = np.maximum(x - h, 0.0)
        return (self.survival(lo) - self.survival(x + h)) / (x + h - lo)

    def _refined(self, integrand_log_weight: float) -> float:
        """int_0^inf e^{w u} S(u) du by refined trapezoid on the log values."""
        xs, _ = self._grid
        decay = -(self._tail_slope + integrand_log_weight)
        if decay <= 0:
            return math.inf
        x_hi = xs[-1] + 40.0 / decay
        n, prev = 2048, None
        while n <= 2 ** 22:
            grid = np.linspace(0.0, x_hi, n + 1)
            vals = np.exp(self.log_survival(grid) + integrand_log_weight * grid)
            cur = float(np.trapezoid(vals, grid))
            if prev is not None and abs(cur - prev) <= _TAB_REFINE_TOL * abs(cur):
                return cur
            prev, n = cur, 2 * n
        return prev

    @property
    def mean(self) -> float:
        return self._refined(0.0)

    def mgf_sup(self):
        return -self._tail_slope, False

    def mgf(self, lam):
        if lam >= -self._tail_slope:
            return math.inf
        if lam == 0.0:
            return 1.0
        return 1.0 + lam * self._refined(lam)

    def integrated_tail(self, x):
        xs, _ = self._grid
        decay = -self._tail_slope
        scalar = np.isscalar(x) or np.ndim(x) == 0
        out = []
        for xi in np.atleast_1d(np.asarray(x, dtype=float)):
            x_hi = max(xs[-1], xi) + 40.0 / decay
            grid = np.linspace(xi, x_hi, 4097)
            out.append(float(np.trapezoid(np.exp(self.log_survival(grid)), grid)))
        out = np.array(out)
        return float(out[0]) if scalar else out

    def sample(self, rng, n):
        # inverse transform on -log S, linear in log space per segment
        xs, ls = self._grid
        u = rng.exponential(size=n)  # -log U ~ Exp(1)
        out = np.interp(u, -ls, xs)
        beyond = u > -ls[-1]
        if np.any(beyond):
            out = np.where(beyond, xs[-1] + (u + ls[-1]) / (-self._tail_slope), out)
        return out


# ---------------------------------------------------------------------------
# The model
# ---------------------------------------------------------------------------

@dataclass(frozen=True)
class LevyModel:
    """Immutable description of the process X.

    Invariants: a Brownian model has sigma > 0 and no jumps; a compound
    Poisson model has sigma = 0 and at least one positive jump rate.
    All operations on models are pure functions, safe for concurrent use.
    """

    drift: float
    sigma: float = 0.0
    jump_rate_up: float = 0.0
    jump_rate_down: float = 0.0
    jump_law_up: JumpLaw | None = None
    jump_law_down: JumpLaw | None = None

    def __post_init__(self):
        if self.sigma < 0 or self.jump_rate_up < 0 or self.jump_rate_down < 0:
            raise ValueError("sigma and jump rates must be nonnegative")
        if self.sigma > 0 and (self.jump_rate_up > 0 or self.jump_rate_down > 0):
            raise ValueError("Brownian models carry no jumps in this catalog")
        if self.sigma == 0 and self.jump_rate_up + self.jump_rate_down == 0:
            raise ValueError("compound Poisson models need a positive jump rate")
        if self.jump_rate_up > 0 and self.jump_law_up is None:
            raise ValueError("jump_rate_up > 0 requires jump_law_up")
        if self.jump_rate_down > 0 and self.jump_law_down is None:
            raise ValueError("jump_rate_down > 0 requires jump_law_down")

    @staticmethod
    def brownian(drift: float, sigma: float) -> "LevyModel":
        if not sigma > 0:
            raise ValueError("Brownian model needs sigma > 0")
        return LevyModel(drift=drift, sigma=sigma)

    @staticmethod
    def compound_poisson(drift: float, rate_up: float = 0.0,
                         law_up: JumpLaw | None = None,
                         rate_down: float = 0.0,
                         law_down: JumpLaw | None = None) -> "LevyModel":
        return LevyModel(drift=drift, sigma=0.0,
                         jump_rate_up=rate_up, jump_rate_down=rate_down,
                         jump_law_up=law_up, jump_law_down=law_down)

    @property
    def kind(self) -> ModelKind:
        return ModelKind.BROWNIAN_DRIFT if self.sigma > 0 else ModelKind.COMPOUND_POISSON_DRIFT

    @property
    def is_spectrally_positive(self) -> bool:
        return self.jump_rate_down == 0.0

    @property
    def mean(self) -> float:
        """E X_1 (finite for the whole catalog)."""
        m = self.drift
        if self.jump_rate_up > 0:
            m += self.jump_rate_up * self.jump_law_up.mean
        if self.jump_rate_down > 0:
            m -= self.jump_rate_down * self.jump_law_down.mean
        return m

    def psi_domain_sup(self) -> tuple[float, bool]:
        """Supremum of the finite domain of psi on [0, inf), and whether
        psi is finite at it."""
        if self.jump_rate_up == 0:
            return math.inf, False
        return self.jump_law_up.mgf_sup()


# ---------------------------------------------------------------------------
# Reports
# ---------------------------------------------------------------------------

class MomentClass(enum.Enum):
    SUBCRITICAL = "subcritical"
    CRITICAL = "critical"
    SUPERCRITICAL = "supercritical"
    INFINITE = "infinite"


@dataclass(frozen=True)
class MomentReport:
    alpha: float
    value: float                 # E e^{alpha X_1}, may be +inf
    classification: MomentClass


class PathCase(enum.Enum):
    I = "I"      # 0 regular for both half-lines; excursion measure infinite
    II = "II"    # 0 irregular for [0, inf); finite measure, mass = up rate
    III = "III"  # compound Poisson skeleton; finite measure


@dataclass(frozen=True)
class RegularityReport:
    reg_up: bool        # 0 regular for [0, inf)
    reg_down: bool      # 0 regular for (-inf, 0)
    n_finite: bool      # excursion measure finite
    n_mass: float | None
    case: PathCase


# ---------------------------------------------------------------------------
# Operations
# ---------------------------------------------------------------------------

def psi_eval(model: LevyModel, lam: float) -> float:
    """Cumulant exponent psi(lam) = log E e^{lam X_1}; +inf where it diverges.

    Total function into the extended reals: never raises.
    """
    lam = float(lam)
    val = model.drift * lam + 0.5 * model.sigma ** 2 * lam ** 2
    if model.jump_rate_up > 0:
        m = model.jump_law_up.mgf(lam) if lam >= 0 else 1.0 + _neg_side_mgf_excess(model.jump_law_up, -lam)
        if math.isinf(m):
            return math.inf
        val += model.jump_rate_up * (m - 1.0)
    if model.jump_rate_down > 0:
        # down jumps enter with the opposite sign
        m = model.jump_law_down.mgf(-lam) if lam <= 0 else 1.0 + _neg_side_mgf_excess(model.jump_law_down, lam)
        if math.isinf(m):
            return math.inf
        val += model.jump_rate_down * (m - 1.0)
    return val


def _neg_side_mgf_excess(law: JumpLaw, lam_abs: float) -> float:
    """E e^{-lam_abs Y} - 1 for lam_abs >= 0 (always finite)."""
    if lam_abs == 0:
        return 0.0
    if isinstance(law, ExponentialJumps):
        return law.rate / (law.rate + lam_abs) - 1.0
    val, _ = integrate.quad(lambda u: math.exp(law.log_survival(u) - lam_abs * u), 0, np.inf)
    return -lam_abs * val  # 1 - lam int e^{-lam u} S du - 1


def psi_derivative(model: LevyModel, lam: float, h: float = 1e-6) -> float:
    """Central-difference psi'(lam) inside the finite domain."""
    return (psi_eval(model, lam + h) - psi_eval(model, lam - h)) / (2 * h)


def cramer_root(model: LevyModel) -> float | None:
    """The positive root gamma of psi, when one exists inside the finite domain.

    psi is convex with psi(0) = 0, so for a model with negative mean there
    is at most one positive root; it exists iff psi becomes positive before
    the transform's divergence boundary.  Returns None in the subcritical
    case (psi still negative at the boundary) and for models with
    nonnegative mean.  Bisection to width 1e-12, then one Newton polish.

    Raises:
        DomainError: if psi(lam) = +inf for every lam > 0.
    """
    sup, attained = model.psi_domain_sup()
    if sup == 0.0:
        raise DomainError("psi is infinite on all of (0, inf) for this model")
    if model.mean >= 0:
        return None

    # find b with psi(b) > 0, expanding toward the domain boundary
    if math.isinf(sup):
        b = 1.0
        while psi_eval(model, b) <= 0:
            b *= 2.0
            if b > 1e12:
                return None
    else:
        if attained and psi_eval(model, sup) <= 0:
            return None   # subcritical all the way to the boundary
        b = sup
        if not attained:
            # psi -> +inf at sup; step inside until the sign shows
            step = sup * 1e-3
            while psi_eval(model, sup - step) <= 0:
                step /= 8.0
                if step < sup * 1e-15:
                    return None
            b = sup - step
        elif psi_eval(model, b) == math.inf:
            return None

    a = 0.0
    # keep a on the negative side: psi'(0) = mean < 0 guarantees a start
    while b - a > ROOT_ABS_TOL:
        mid = 0.5 * (a + b)
        if psi_eval(model, mid) <= 0:
            a = mid
        else:
            b = mid
    root = 0.5 * (a + b)
    d = psi_derivative(model, root, h=min(1e-7, 0.25 * (sup - root) if math.isfinite(sup) else 1e-7))
    if d != 0 and math.isfinite(d):
        polished = root - psi_eval(model, root) / d
        if a <= polished <= b or abs(psi_eval(model, polished)) < abs(psi_eval(model, root)):
            root = polished
    return root


def exp_moment(model: LevyModel, alpha: float) -> MomentReport:
    """E e^{alpha X_1} with a criticality classification at tolerance 1e-10."""
    if not alpha > 0:
        raise ValueError("alpha must be positive")
    p = psi_eval(model, alpha)
    if math.isinf(p):
        return MomentReport(alpha, math.inf, MomentClass.INFINITE)
    value = math.exp(p)
    if abs(value - 1.0) <= CRITICAL_TOL:
        cls = MomentClass.CRITICAL
    elif value < 1.0:
        cls = MomentClass.SUBCRITICAL
    else:
        cls = MomentClass.SUPERCRITICAL
    return MomentReport(alpha, value, cls)


def pi_tail(model: LevyModel, x, side: str = "up"):
    """Tail of the jump measure: rate * S(x) on the requested side.

    Exact for the parametric laws; vectorized over x.
    """
    x = np.asarray(x, dtype=float)
    if np.any(x < 0):
        raise DomainError("pi_tail is defined for x >= 0")
    if side == "up":
        rate, law = model.jump_rate_up, model.jump_law_up
    elif side == "down":
        rate, law = model.jump_rate_down, model.jump_law_down
    else:
        raise ValueError("side must be 'up' or 'down'")
    if rate == 0:
        return np.zeros_like(x) if x.ndim else 0.0
    out = rate * law.survival(x)
    return out if x.ndim else float(out)


def log_pi_tail(model: LevyModel, x, side: str = "up"):
    """log of pi_tail, exact in log space (no underflow at deep x)."""
    x = np.asarray(x, dtype=float)
    rate = model.jump_rate_up if side == "up" else model.jump_rate_down
    law = model.jump_law_up if side == "up" else model.jump_law_down
    if rate == 0:
        return np.full_like(x, -np.inf) if x.ndim else -math.inf
    out = math.log(rate) + law.log_survival(x)
    return out if x.ndim else float(out)


def classify_path_regularity(model: LevyModel) -> RegularityReport:
    """Trichotomy for the excursion measure of the reflected process.

    * Brownian models: 0 is regular for both half-lines, the excursion
      measure is infinite (Case I).
    * Compound Poisson with strictly negative drift: 0 is irregular for
      [0, inf) and the upward jump mass is finite, so the measure is
      finite with total mass equal to the up-jump rate (Case II).
    * Compound Poisson with zero drift: the inverse local time is itself
      compound Poisson (Case III); the reported mass counts down-jump
      events at the minimum as zero-height excursions, so it is the total
      jump rate.  The rate of strictly positive excursions is the up rate.

    Raises:
        UnsupportedModel: positive-drift compound Poisson with no down
            jumps (the supremum is trivially infinite).
    """
    if model.kind is ModelKind.BROWNIAN_DRIFT:
        return RegularityReport(reg_up=True, reg_down=True, n_finite=False,
                                n_mass=None, case=PathCase.I)
    if model.drift < 0:
        return RegularityReport(reg_up=False, reg_down=True, n_finite=True,
                                n_mass=model.jump_rate_up, case=PathCase.II)
    if model.drift == 0:
        return RegularityReport(reg_up=True, reg_down=False, n_finite=True,
                                n_mass=model.jump_rate_up + model.jump_rate_down,
                                case=PathCase.III)
    if model.jump_rate_down == 0:
        raise UnsupportedModel(
            "positive-drift compound Poisson with no downward jumps has a "
            "trivially infinite supremum; outside the supported regime")
    return RegularityReport(reg_up=True, reg_down=False, n_finite=True,
                            n_mass=model.jump_rate_up + model.jump_rate_down,
                            case=PathCase.III)


# ---------------------------------------------------------------------------
# Model specification schema (consumed by the harness)
# ---------------------------------------------------------------------------

_LAW_KINDS = {"exponential", "tilted_pareto", "tabulated"}


def _law_from_spec(spec: dict, where: str) -> JumpLaw:
    law = spec.get("law")
    params = spec.get("params", {})
    if law == "exponential":
        return ExponentialJumps(rate=float(params["rate"]))
    if law == "tilted_pareto":
        return TiltedParetoJumps(tilt=float(params["alpha"]), shape=float(params["rho"]))
    if law == "tabulated":
        return TabulatedJumps(x=tuple(params["x"]), log_sf=tuple(params["log_survival"]))
    raise UnsupportedModel(f"{where}: unknown jump law {law!r} (expected one of {sorted(_LAW_KINDS)})")


def model_from_spec(spec: dict) -> LevyModel:
    """Build a LevyModel from the keyed schema:

    ``{"kind": ..., "drift": ..., "sigma": ..., "jumps_up": {"rate", "law",
    "params"}, "jumps_down": {...}}``
    """
    kind = spec.get("kind")
    drift = float(spec.get("drift", 0.0))
    if kind == "BrownianDrift":
        return LevyModel.brownian(drift=drift, sigma=float(spec.get("sigma", 1.0)))
    if kind != "CompoundPoissonDrift":
        raise UnsupportedModel(f"unknown model kind {kind!r}")
    rate_up = rate_down = 0.0
    law_up = law_down = None
    if "jumps_up" in spec and spec["jumps_up"]:
        rate_up = float(spec["jumps_up"].get("rate", 0.0))
        if rate_up > 0:
            law_up = _law_from_spec(spec["jumps_up"], "jumps_up")
    if "jumps_down" in spec and spec["jumps_down"]:
        rate_down = float(spec["jumps_down"].get("rate", 0.0))
        if rate_down > 0:
            law_down = _law_from_spec(spec["jumps_down"], "jumps_down")
    return LevyModel.compound_poisson(drift=drift, rate_up=rate_up, law_up=law_up,
                                      rate_down=rate_down, law_down=law_down)


def _law_to_spec(rate: float, law: JumpLaw | None) -> dict | None:
    if rate == 0 or law is None:
        return None
    if isinstance(law, ExponentialJumps):
        return {"rate": rate, "law": "exponential", "params": {"rate": law.rate}}
    if isinstance(law, TiltedParetoJumps):
        return {"rate": rate, "law": "tilted_pareto",
                "params": {"alpha": law.tilt, "rho": law.shape}}
    if isinstance(law, TabulatedJumps):
        return {"rate": rate, "law": "tabulated",
                "params": {"x": list(law.x), "log_survival": list(law.log_sf)}}
    raise UnsupportedModel(f"cannot serialize jump law {type(law).__name__}")


def model_to_spec(model: LevyModel) -> dict:
    spec = {"kind": model.kind.value, "drift": model.drift}
    if model.kind is ModelKind.BROWNIAN_DRIFT:
        spec["sigma"] = model.sigma
        return spec
    up = _law_to_spec(model.jump_rate_up, model.jump_law_up)
    down = _law_to_spec(model.jump_rate_down, model.jump_law_down)
    if up:
        spec["jumps_up"] = up
    if down:
        spec["jumps_down"] = down
    return spec
