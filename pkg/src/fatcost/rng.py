"""Stateless counter-based uniforms and an inverse normal CDF.

Generator
---------
Draws come from the SplitMix64 output function (Steele, Lea & Flood 2014,
"Fast splittable pseudorandom number generators"), used as a keyed hash of
a counter::

    GOLDEN   = 0x9E3779B97F4A7C15
    mix64(z) = z ^= z >> 30; z *= 0xBF58476D1CE4E5B9
               z ^= z >> 27; z *= 0x94D049BB133111EB
               z ^  z >> 31                            (all mod 2**64)

    key(seed, run)     = mix64(mix64(seed) + GOLDEN * (run + 1))
    bits(seed, run, i) = mix64(key(seed, run) + GOLDEN * (i + 1))
    u(seed, run, i)    = ((bits >> 11) + 0.5) * 2**-53       in (0, 1)

Draw ``i`` of run ``run`` is a pure function of ``(seed, run, i)``, so runs
can be produced in any order or in parallel with identical results.

Inverse normal
--------------
:func:`norm_ppf` is Wichura's algorithm AS 241 (PPND16, Applied Statistics
37, 1988), a piecewise rational approximation accurate to about 1e-16.
"""
from __future__ import annotations

import numpy as np

GOLDEN = np.uint64(0x9E3779B97F4A7C15)
_M1 = np.uint64(0xBF58476D1CE4E5B9)
_M2 = np.uint64(0x94D049BB133111EB)
_MASK = (1 << 64) - 1


def mix64(z) -> np.ndarray:
    z = np.asarray(z, dtype=np.uint64)
    with np.errstate(over="ignore"):  # wraparound mod 2**64 is the point
        z = (z ^ (z >> np.uint64(30))) * _M1
        z = (z ^ (z >> np.uint64(27))) * _M2
    return z ^ (z >> np.uint64(31))


def _u64(value: int) -> np.ndarray:
    return np.array([int(value) & _MASK], dtype=np.uint64)


def stream_keys(seed: int, runs) -> np.ndarray:
    """``key(seed, run)`` for each run index in ``runs``."""
    run_idx = np.asarray(runs, dtype=np.uint64)
    return mix64(mix64(_u64(seed)) + GOLDEN * (run_idx + np.uint64(1)))


def uniforms(seed: int, runs, n: int, offset: int = 0) -> np.ndarray:
    """Uniforms in (0, 1), shape ``(len(runs), n)``, draws ``offset .. offset + n - 1``."""
    keys = stream_keys(seed, runs)[:, None]
    idx = np.arange(offset, offset + n, dtype=np.uint64)[None, :]
    bits = mix64(keys + GOLDEN * (idx + np.uint64(1)))
    return ((bits >> np.uint64(11)).astype(np.float64) + 0.5) * 2.0**-53


_A = (3.3871328727963666080e0, 1.3314166789178437745e2, 1.9715909503065514427e3,
      1.3731693765509461125e4, 4.5921953931549871457e4, 6.7265770927008700853e4,
      3.3430575583588128105e4, 2.5090809287301226727e3)
_B = (1.0, 4.2313330701600911252e1, 6.8718700749205790830e2, 5.3941960214247511077e3,
      2.1213794301586595867e4, 3.9307895800092710610e4, 2.8729085735721942674e4,
      5.2264952788528545610e3)
_C = (1.42343711074968357734e0, 4.63033784615654529590e0, 5.76949722146069140550e0,
      3.64784832476320460504e0, 1.27045825245236838258e0, 2.41780725177450611770e-1,
      2.27238449892691845833e-2, 7.74545014278341407640e-4)
_D = (1.0, 2.05319162663775882187e0, 1.67638483018380384940e0, 6.89767334985100004550e-1,
      1.48103976427480074590e-1, 1.51986665636164571966e-2, 5.47593808499534494600e-4,
      1.05075007164441684324e-9)
_E = (6.65790464350110377720e0, 5.46378491116411436990e0, 1.78482653991729133580e0,
      2.96560571828504891230e-1, 2.65321895265761230930e-2, 1.24266094738807843860e-3,
      2.71155556874348757815e-5, 2.01033439929228813265e-7)
_F = (1.0, 5.99832206555887937690e-1, 1.36929880922735805310e-1, 1.48753612908506148525e-2,
      7.86869131145613259100e-4, 1.84631831751005468180e-5, 1.42151175831644588870e-7,
      2.04426310338993978564e-15)


def _poly(coef, r):
    out = np.full_like(r, coef[-1])
    for c in coef[-2::-1]:
        out = out * r + c
    return out


def norm_ppf(p) -> np.ndarray:
    """Standard normal quantile (AS 241); ``p`` in (0, 1), endpoints map to -inf / inf."""
    p = np.asarray(p, dtype=np.float64)
    q = p - 0.5
    out = np.empty_like(p)

    central = np.abs(q) <= 0.425
    r = 0.180625 - q[central] ** 2
    out[central] = q[central] * _poly(_A, r) / _poly(_B, r)

    tail = ~central
    with np.errstate(divide="ignore", invalid="ignore"):
        r = np.sqrt(-np.log(np.minimum(p[tail], 1.0 - p[tail])))
        near = r <= 5.0
        x = np.empty_like(r)
        rn = r[near] - 1.6
        x[near] = _poly(_C, rn) / _poly(_D, rn)
        rf = r[~near] - 5.0
        x[~near] = _poly(_E, rf) / _poly(_F, rf)
    x = np.where(np.isinf(r), np.inf, x)
    out[tail] = np.where(q[tail] < 0, -x, x)
    return out
