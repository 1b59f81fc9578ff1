"""Inverse problem: measured moments/correlations -> pseudo-distributions.

Conventions (recorded on each output's ordering_tag):
  - conditional_from_moments returns K[i|j] directly;
  - joint_from_correlations and npoint_from_correlations return the
    complex-conjugated KD distribution, which is what the correlation data
    determine.

Eigenvalue nodes are affinely rescaled to [-1, 1] before inversion to tame
Vandermonde conditioning; the moment data are transformed consistently
(binomial re-expansion of operator powers), which is mathematically exact.
"""

from __future__ import annotations

import warnings
from math import comb

import numpy as np

from .core import ObservableSpec
from .errors import DimensionMismatch, SizeCap
from .moments import CorrelationMatrix, MomentVector
from .oracle import PseudoDistribution
from .vandermonde import build_vandermonde, invert_vandermonde, solve_least_squares

SUM_CHECK_TOL = 1e-6


def _affine_params(nodes: np.ndarray):
    """(alpha, beta) with nodes = alpha * t + beta mapping t into [-1, 1]."""
    lo, hi = float(np.min(nodes)), float(np.max(nodes))
    if hi == lo:
        return 1.0, 0.0
    return (hi - lo) / 2.0, (hi + lo) / 2.0


def _moment_rescale_matrix(orders: int, alpha: float, beta: float) -> np.ndarray:
    """Lower-triangular M with <T^n> = sum_k M[n, k] <A^k> for T = (A - beta)/alpha.

    Valid for weak values too: A commutes with itself, so the binomial
    expansion holds at operator level.
    """
    m = np.zeros((orders, orders))
    for n in range(orders):
        for k in range(n + 1):
            m[n, k] = comb(n, k) * ((-beta) ** (n - k)) / (alpha**n)
    return m


def _scaled_inverse_rows(nodes: np.ndarray, orders: int) -> np.ndarray:
    """Matrix R with Q = R @ moments, via rescaled nodes.

    Exact case (orders == d): R = V_t^{-1} M.  Otherwise the caller solves the
    rectangular system instead.
    """
    alpha, beta = _affine_params(nodes)
    t_nodes = (nodes - beta) / alpha
    v_inv = invert_vandermonde(build_vandermonde(t_nodes))
    m = _moment_rescale_matrix(orders, alpha, beta)
    return v_inv @ m


def _check_sum(values: np.ndarray, renormalize: bool, what: str):
    total = complex(np.sum(values))
    if abs(total - 1.0) > SUM_CHECK_TOL:
        warnings.warn(
            f"{what} sums to {total:.6g}, deviating from 1 by {abs(total - 1.0):.3e} "
            "(noisy or inconsistent input data?)",
            RuntimeWarning,
            stacklevel=3,
        )
    if renormalize:
        return values / total
    return values


def conditional_from_moments(
    a: ObservableSpec, mv: MomentVector, renormalize: bool = False
) -> PseudoDistribution:
    """Q = V^{-1} A-vector; least-squares (pseudo-inverse) when the number of
    measured moments differs from d."""
    d = a.dim
    nodes = np.asarray(a.eigenvalues, dtype=float)
    moments = mv.values
    if abs(moments[0] - 1.0) > 1e-9:
        raise ValueError(f"zeroth moment must be 1, got {moments[0]}")
    r = moments.size
    if r == d:
        q = _scaled_inverse_rows(nodes, d) @ moments
    else:
        alpha, beta = _affine_params(nodes)
        t_nodes = (nodes - beta) / alpha
        v_rect = np.vander(t_nodes, r, increasing=True).T  # r rows of powers
        t_moments = _moment_rescale_matrix(r, alpha, beta) @ moments
        q = solve_least_squares(v_rect, t_moments)
    q = _check_sum(q, renormalize, "conditional pseudo-distribution")
    return PseudoDistribution(
        q,
        (a.label,),
        ordering_tag="kd-conditional",
        conditioning=f"{mv.postselection}",
    )


def joint_from_correlations(
    a: ObservableSpec, b: ObservableSpec, c: CorrelationMatrix, renormalize: bool = False
) -> PseudoDistribution:
    """Q = V^{-1} C (W^{-1})^T; equals conj(kd_joint) of the underlying state."""
    if a.dim != b.dim:
        raise DimensionMismatch("observables act on different dimensions")
    d = a.dim
    vals = c.values
    if vals.shape != (d, d):
        raise DimensionMismatch(f"correlation matrix must be {d}x{d}, got {vals.shape}")
    if abs(vals[0, 0] - 1.0) > 1e-9:
        raise ValueError(f"C[0,0] must be 1, got {vals[0, 0]}")
    ra = _scaled_inverse_rows(np.asarray(a.eigenvalues, float), d)
    rb = _scaled_inverse_rows(np.asarray(b.eigenvalues, float), d)
    q = ra @ vals @ rb.T
    q = _check_sum(q, renormalize, "joint pseudo-distribution")
    return PseudoDistribution(q, (a.label, b.label), ordering_tag="kd-conjugate")


def npoint_from_correlations(obs_list, c_tensor, renormalize: bool = False) -> PseudoDistribution:
    """Per-axis inverse-Vandermonde contraction of an N-point correlation tensor.

    Returns the N-point bracket-chain distribution <psi|o_i1>...<o_iN|psi>,
    which for N = 2 is the conjugate of the two-observable KD matrix.
    """
    obs_list = list(obs_list)
    c = np.asarray(c_tensor, dtype=complex)
    n = len(obs_list)
    if c.ndim != n:
        raise DimensionMismatch("tensor rank must match number of observables")
    d = obs_list[0].dim
    if d**n > 10**6:
        raise SizeCap(f"tensor with {d}^{n} entries exceeds the 1e6 cap")
    for axis, obs in enumerate(obs_list):
        if c.shape[axis] != obs.dim:
            raise DimensionMismatch(f"axis {axis} length does not match observable dimension")
        r = _scaled_inverse_rows(np.asarray(obs.eigenvalues, float), obs.dim)
        c = np.moveaxis(np.tensordot(r, c, axes=([1], [axis])), 0, axis)
    c = _check_sum(c, renormalize, "n-point pseudo-distribution")
    labels = tuple(obs.label for obs in obs_list)
    return PseudoDistribution(c, labels, ordering_tag="kd-npoint")
