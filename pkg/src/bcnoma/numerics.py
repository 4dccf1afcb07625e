"""Shared numerical kernels: adaptive quadrature, error functions, seeded
exponential streams and a small order-preserving worker pool."""

from __future__ import annotations

import math
import os
import warnings
from concurrent.futures import ProcessPoolExecutor
from dataclasses import dataclass
from typing import Callable, Iterable, Iterator, Sequence

import numpy as np
from scipy import integrate, special

WORKERS_ENV = "BCNOMA_WORKERS"


class QuadratureError(RuntimeError):
    """Adaptive quadrature gave up; carries the best estimate it reached."""

    def __init__(self, message: str, value: float, error: float):
        super().__init__(f"{message} (best estimate {value!r}, error {error!r})")
        self.value = value
        self.error = error


@dataclass(frozen=True)
class QuadratureSpec:
    """Tolerances and tail handling for :func:`integrate_1d`.

    ``semi_infinite_transform`` selects how an infinite upper limit is mapped
    onto a finite interval: ``"log"`` uses x = a - scale*ln(t) and suits
    exponentially decaying tails, ``"algebraic"`` uses x = a + scale*t/(1-t)
    and suits power-law tails.
    """

    abs_tol: float = 1e-13
    rel_tol: float = 1e-10
    max_subdivisions: int = 200
    semi_infinite_transform: str = "log"

    def __post_init__(self):
        if not (self.abs_tol > 0 and self.rel_tol > 0):
            raise ValueError("quadrature tolerances must be positive")
        if self.max_subdivisions < 1:
            raise ValueError("max_subdivisions must be >= 1")
        if self.semi_infinite_transform not in ("log", "algebraic"):
            raise ValueError(f"unknown transform {self.semi_infinite_transform!r}")

    def tighter(self, factor: float = 10.0) -> "QuadratureSpec":
        """Same spec with both tolerances divided by ``factor`` (for inner integrals)."""
        return QuadratureSpec(self.abs_tol / factor, self.rel_tol / factor,
                              self.max_subdivisions, self.semi_infinite_transform)


DEFAULT_SPEC = QuadratureSpec()


@dataclass(frozen=True)
class QuadResult:
    value: float
    error: float


def integrate_1d(f: Callable[[float], float], a: float, b: float,
                 spec: QuadratureSpec = DEFAULT_SPEC, *, scale: float = 1.0,
                 sqrt_endpoint: bool = False) -> QuadResult:
    """Integrate ``f`` over [a, b] with adaptive Gauss-Kronrod subdivision.

    ``b`` may be ``math.inf``; the tail is mapped to a finite interval with
    the transform named in ``spec`` using ``scale`` as its length scale (the
    mean of the exponential weight, typically). ``sqrt_endpoint=True``
    substitutes x = a + t**2 to remove a sqrt-type singularity at ``a``
    (finite intervals only).

    Raises :class:`QuadratureError` when ``max_subdivisions`` is exhausted.
    """
    if not (a <= b):
        raise ValueError(f"integration limits out of order: [{a}, {b}]")
    if a == b:
        return QuadResult(0.0, 0.0)

    if math.isinf(b):
        if sqrt_endpoint:
            raise ValueError("sqrt_endpoint needs a finite interval")
        if spec.semi_infinite_transform == "log":
            def g(t):
                return f(a - scale * math.log(t)) * scale / t
        else:
            def g(t):
                s = 1.0 - t
                return f(a + scale * t / s) * scale / (s * s)
        lo, hi = 0.0, 1.0
    elif sqrt_endpoint:
        def g(t):
            return 2.0 * t * f(a + t * t)
        lo, hi = 0.0, math.sqrt(b - a)
    else:
        g, lo, hi = f, a, b

    with warnings.catch_warnings():
        warnings.simplefilter("ignore", integrate.IntegrationWarning)
        out = integrate.quad(g, lo, hi, epsabs=spec.abs_tol, epsrel=spec.rel_tol,
                             limit=spec.max_subdivisions, full_output=1)
    value, err, info = out[0], out[1], out[2]
    # roundoff warnings are tolerated; running out of subdivisions is not
    if info["last"] >= spec.max_subdivisions and err > max(spec.abs_tol, spec.rel_tol * abs(value)):
        raise QuadratureError("subdivision limit reached", value, err)
    if not math.isfinite(value):
        raise QuadratureError("non-finite integral", value, err)
    return QuadResult(float(value), float(err))


# error functions ----------------------------------------------------------

def erf(x):
    """Error function (array-aware)."""
    return special.erf(x)


def erfc_scaled(x):
    """exp(x**2) * erfc(x), finite for large positive x."""
    return special.erfcx(x)


def scaled_erf_difference(p, s):
    """exp(p**2) * (erf(p) - erf(p + s)) for p, s >= 0 without overflow.

    Rewritten through erfc as erfcx(p+s)*exp(-s*(2p+s)) - erfcx(p).
    """
    p = np.asarray(p, dtype=float)
    s = np.asarray(s, dtype=float)
    out = special.erfcx(p + s) * np.exp(-s * (2.0 * p + s)) - special.erfcx(p)
    return out if out.ndim else float(out)


def h_gamma2(t: float) -> float:
    """(1 - (1 + t) exp(-t)) / t**2, stable as t -> 0."""
    if t < 0.25:
        # alternating series sum_{m>=2} (-1)^m (m-1) t^(m-2) / m!
        total, term_fact, power = 0.0, 2.0, 1.0
        for m in range(2, 30):
            total += (-1) ** m * (m - 1) * power / term_fact
            power *= t
            term_fact *= m + 1
        return total
    return -(math.expm1(-t) + t * math.exp(-t)) / (t * t)


# seeded streams ------------------------------------------------------------

def substream(seed: int, index: int) -> np.random.Generator:
    """Counter-based generator for substream ``index`` of master ``seed``."""
    ss = np.random.SeedSequence(entropy=int(seed), spawn_key=(int(index),))
    return np.random.Generator(np.random.Philox(ss))


def exponential(mean: float, u):
    """Inverse-CDF map of uniforms on [0, 1) to exponential variates."""
    return -mean * np.log1p(-np.asarray(u))


class ExpStream:
    """Reproducible stream of exponential variates for one worker.

    Every variate consumes exactly one uniform, so ``draw(3)`` followed by
    ``draw(2)`` yields the same numbers as ``draw(5)``.
    """

    def __init__(self, mean: float, seed: int, worker: int = 0):
        if not mean > 0:
            raise ValueError(f"exponential mean must be positive, got {mean}")
        self.mean = float(mean)
        self.seed = int(seed)
        self.worker = int(worker)
        self._gen = substream(seed, worker)

    def draw(self, n: int) -> np.ndarray:
        return exponential(self.mean, self._gen.random(n))

    def __iter__(self) -> Iterator[float]:
        return self

    def __next__(self) -> float:
        return float(self.draw(1)[0])


def exp_stream(mean: float, seed: int, worker: int = 0) -> ExpStream:
    return ExpStream(mean, seed, worker)


# workers -------------------------------------------------------------------

def worker_count() -> int:
    raw = os.environ.get(WORKERS_ENV, "1")
    try:
        n = int(raw)
    except ValueError as exc:
        raise ValueError(f"{WORKERS_ENV} must be an integer, got {raw!r}") from exc
    return max(1, n)


def parallel_map(fn: Callable, items: Iterable, workers: int | None = None) -> list:
    """``list(map(fn, items))``, spread over processes when workers > 1.

    Results always come back in input order.
    """
    items: Sequence = list(items)
    workers = worker_count() if workers is None else workers
    if workers <= 1 or len(items) <= 1:
        return [fn(it) for it in items]
    with ProcessPoolExecutor(max_workers=workers) as pool:
        return list(pool.map(fn, items))
