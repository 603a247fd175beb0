"""Hot numeric kernels for noise-distribution training.

Each kernel has a vectorized numpy implementation and, when numba is
importable, an ``@njit``-compiled loop version.  The compiled path is the
default; set ``ZONOPRIV_NO_NUMBA=1`` to force the pure-numpy fallback
(``benchmarks/bench_kernels.py`` compares the two).  Both paths agree to
floating-point roundoff and are covered by a parity test.

Training evaluates the loss tens of thousands of times (finite-difference
gradients, one call per parameter per epoch), which is why these live in a
dedicated kernel module.
"""

from __future__ import annotations

import os

import numpy as np
from scipy.special import expit

__all__ = [
    "NUMBA_ENABLED",
    "half_distribution",
    "tight_delta",
    "utility",
    "training_loss",
]


def _half_distribution_np(phi_half, a, b, c, f):
    """Half probabilities from the stacked-sigmoid model (numpy path).

    r_l = ln(a^2 + sum_j b_j^2 * sigmoid(c * (phi_l - f_j))) on the left-half
    grid, returned as 0.5 * softmax(r): strictly positive, sums to 1/2.
    """
    z = a * a + (b * b) @ expit(c * (phi_half[None, :] - f[:, None]))
    r = np.log(z)
    r -= r.max()
    e = np.exp(r)
    return 0.5 * e / e.sum()


def _tight_delta_np(p, shift, e_eps):
    """sum_l max(0, p[l] - e^eps * p[l + shift]) with out-of-range mass 0."""
    n = p.shape[0]
    if shift >= n:
        return float(p.sum())
    gain = p[: n - shift] - e_eps * p[shift:]
    tail = p[n - shift:].sum() if shift > 0 else 0.0
    return float(np.maximum(gain, 0.0).sum() + tail)


def _utility_np(p, abs_phi, gamma):
    """(sum_l |phi_l|^gamma p_l)^(1/gamma)."""
    if gamma == 1:
        return float(np.dot(abs_phi, p))
    return float(np.dot(abs_phi ** gamma, p) ** (1.0 / gamma))


def _training_loss_np(phi_half, a, b, c, f, shift, e_eps, omega, gamma):
    """Fused loss delta + omega * utility on the assembled distribution.

    Assembly = model half -> sort ascending (monotone toward the center) ->
    mirror.  Returns (loss, delta, utility).
    """
    half = np.sort(_half_distribution_np(phi_half, a, b, c, f))
    p = np.concatenate([half, half[::-1]])
    delta = _tight_delta_np(p, shift, e_eps)
    abs_half = np.abs(phi_half)
    if gamma == 1:
        util = 2.0 * float(np.dot(abs_half, half))
    else:
        util = (2.0 * float(np.dot(abs_half ** gamma, half))) ** (1.0 / gamma)
    return delta + omega * util, delta, util


def _half_distribution_loops(phi_half, a, b, c, f):
    n = phi_half.shape[0]
    v1 = b.shape[0]
    r = np.empty(n)
    for l in range(n):
        z = a * a
        for j in range(v1):
            x = c * (phi_half[l] - f[j])
            if x >= 0.0:
                sig = 1.0 / (1.0 + np.exp(-x))
            else:
                ex = np.exp(x)
                sig = ex / (1.0 + ex)
            z += b[j] * b[j] * sig
        r[l] = np.log(z)
    rmax = r[0]
    for l in range(1, n):
        if r[l] > rmax:
            rmax = r[l]
    total = 0.0
    for l in range(n):
        r[l] = np.exp(r[l] - rmax)
        total += r[l]
    for l in range(n):
        r[l] = 0.5 * r[l] / total
    return r


def _tight_delta_loops(p, shift, e_eps):
    n = p.shape[0]
    acc = 0.0
    for l in range(n):
        shifted = p[l + shift] if l + shift < n else 0.0
        gain = p[l] - e_eps * shifted
        if gain > 0.0:
            acc += gain
    return acc


def _utility_loops(p, abs_phi, gamma):
    acc = 0.0
    if gamma == 1:
        for l in range(p.shape[0]):
            acc += abs_phi[l] * p[l]
        return acc
    for l in range(p.shape[0]):
        acc += abs_phi[l] ** gamma * p[l]
    return acc ** (1.0 / gamma)


def _make_numba_kernels():
    from numba import njit

    half_nb = njit(cache=True)(_half_distribution_loops)
    delta_nb = njit(cache=True)(_tight_delta_loops)
    util_nb = njit(cache=True)(_utility_loops)

    @njit(cache=True)
    def loss_nb(phi_half, a, b, c, f, shift, e_eps, omega, gamma):
        half = np.sort(half_nb(phi_half, a, b, c, f))
        n = half.shape[0]
        p = np.empty(2 * n)
        p[:n] = half
        p[n:] = half[::-1]
        delta = delta_nb(p, shift, e_eps)
        util = 0.0
        if gamma == 1:
            for l in range(n):
                util += -phi_half[l] * half[l]
            util *= 2.0
        else:
            for l in range(n):
                util += (-phi_half[l]) ** gamma * half[l]
            util = (2.0 * util) ** (1.0 / gamma)
        return delta + omega * util, delta, util

    return half_nb, delta_nb, util_nb, loss_nb


def _numba_disabled() -> bool:
    return os.environ.get("ZONOPRIV_NO_NUMBA", "").strip().lower() in (
        "1", "true", "yes", "on",
    )


NUMBA_ENABLED = False
if not _numba_disabled():
    try:
        (_half_distribution_nb, _tight_delta_nb,
         _utility_nb, _training_loss_nb) = _make_numba_kernels()
        NUMBA_ENABLED = True
    except ImportError:  # pragma: no cover - numba is a declared dependency
        NUMBA_ENABLED = False

if NUMBA_ENABLED:
    half_distribution = _half_distribution_nb
    tight_delta = _tight_delta_nb
    utility = _utility_nb
    training_loss = _training_loss_nb
else:
    half_distribution = _half_distribution_np
    tight_delta = _tight_delta_np
    utility = _utility_np
    training_loss = _training_loss_np
