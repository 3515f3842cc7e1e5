"""Trajectory-consistent training objectives.

Loss-flavored ATE/RPE/acceleration terms with scale normalization, plus the
confidence-aware point regression and RGB photometric losses and the analytic
translation gradient of the pose loss.

These are the training-objective variants; the benchmark-style metrics with
alignment live in metrics.py.
"""

from __future__ import annotations

import math
from dataclasses import dataclass

import numpy as np

from .errors import (EmptyList, EmptyTrajectory, LengthMismatch,
                     MissingConfidence, ShapeMismatch, TooShort)
from .geometry import PointSet, Trajectory


@dataclass(frozen=True)
class LossWeights:
    w_a: float = 1.0  # ATE term
    w_r: float = 1.0  # RPE term
    w_s: float = 1.0  # acceleration term
    lambda1: float = 1.0  # confidence regression loss
    lambda2: float = 1.0  # RGB loss
    lambda3: float = 1.0  # pose loss
    alpha_conf: float = 0.2


def scale_normalizer(vectors) -> float:
    """Mean Euclidean norm of a list of 3-vectors, floored at 1e-8."""
    v = np.asarray(vectors, dtype=float).reshape(-1, 3)
    if v.shape[0] == 0:
        raise EmptyList("scale_normalizer needs at least one vector")
    return max(float(np.mean(np.linalg.norm(v, axis=1))), 1e-8)


def loss_conf(pred: PointSet, gt: PointSet, alpha: float = 0.2) -> float:
    """Confidence-weighted scale-normalized point regression loss."""
    if len(pred) != len(gt):
        raise LengthMismatch("point sets must have equal length")
    if pred.confidences is None:
        raise MissingConfidence("predicted point set must carry confidences")
    s_pred = scale_normalizer(pred.points)
    s_gt = scale_normalizer(gt.points)
    residuals = np.linalg.norm(pred.points / s_pred - gt.points / s_gt, axis=1)
    conf = pred.confidences
    return float(np.sum(conf * residuals - alpha * np.log(conf)))


def loss_rgb(pred: np.ndarray, gt: np.ndarray) -> float:
    """Squared L2 photometric error."""
    pred = np.asarray(pred, dtype=float)
    gt = np.asarray(gt, dtype=float)
    if pred.shape != gt.shape:
        raise ShapeMismatch("rasters must have the same shape")
    return float(np.sum((pred - gt) ** 2))


def hemisphere_align(quats: np.ndarray) -> np.ndarray:
    """Flip signs along a quaternion sequence so consecutive dots are >= 0."""
    out = np.array(quats, dtype=float, copy=True)
    for i in range(1, out.shape[0]):
        if np.dot(out[i], out[i - 1]) < 0:
            out[i] = -out[i]
    return out


def loss_ate(pred: Trajectory, gt: Trajectory) -> float:
    """Per-frame absolute error of scale-normalized translations plus a
    quaternion agreement term 1 - |q_pred . q_gt|."""
    n = len(pred)
    if n != len(gt):
        raise LengthMismatch("trajectories must have equal length")
    if n == 0:
        raise EmptyTrajectory("loss_ate needs at least one pose")
    tp, tg = pred.translations(), gt.translations()
    sp, sg = scale_normalizer(tp), scale_normalizer(tg)
    trans = np.linalg.norm(tp / sp - tg / sg, axis=1)
    qdots = np.abs(np.sum(pred.quaternions() * gt.quaternions(), axis=1))
    return float(np.mean(trans + (1.0 - qdots)))


def loss_rpe(pred: Trajectory, gt: Trajectory) -> float:
    """First-difference consistency of translations and quaternion components."""
    n = len(pred)
    if n != len(gt):
        raise LengthMismatch("trajectories must have equal length")
    if n < 2:
        raise TooShort("loss_rpe needs at least 2 poses")
    dtp = np.diff(pred.translations(), axis=0)
    dtg = np.diff(gt.translations(), axis=0)
    dqp = np.diff(hemisphere_align(pred.quaternions()), axis=0)
    dqg = np.diff(hemisphere_align(gt.quaternions()), axis=0)
    terms = (np.linalg.norm(dtp - dtg, axis=1)
             + np.linalg.norm(dqp - dqg, axis=1))
    return float(np.mean(terms))


def loss_acc(pred: Trajectory) -> float:
    """Second-difference (acceleration) penalty on one trajectory."""
    n = len(pred)
    if n < 3:
        raise TooShort("loss_acc needs at least 3 poses")
    d2t = np.diff(pred.translations(), n=2, axis=0)
    d2q = np.diff(hemisphere_align(pred.quaternions()), n=2, axis=0)
    terms = np.linalg.norm(d2t, axis=1) + np.linalg.norm(d2q, axis=1)
    return float(np.mean(terms))


def loss_pose(pred: Trajectory, gt: Trajectory, w: LossWeights = LossWeights()) -> float:
    """Weighted sum of the ATE, RPE, and acceleration terms."""
    n = len(pred)
    if w.w_r > 0 and n < 2:
        raise TooShort("RPE term needs at least 2 poses")
    if w.w_s > 0 and n < 3:
        raise TooShort("acceleration term needs at least 3 poses")
    total = w.w_a * loss_ate(pred, gt)
    if w.w_r > 0:
        total += w.w_r * loss_rpe(pred, gt)
    if w.w_s > 0:
        total += w.w_s * loss_acc(pred)
    return total


def loss_total(conf: float, rgb: float, pose: float,
               w: LossWeights = LossWeights()) -> float:
    """Weighted sum of the three top-level loss components."""
    return w.lambda1 * conf + w.lambda2 * rgb + w.lambda3 * pose


def _safe_unit(v: np.ndarray) -> np.ndarray:
    # subgradient 0 at zero-norm residuals
    n = np.linalg.norm(v)
    if n == 0.0:
        return np.zeros_like(v)
    return v / n


def grad_pose_translations(pred: Trajectory, gt: Trajectory,
                           w: LossWeights = LossWeights()) -> np.ndarray:
    """Analytic gradient of loss_pose with respect to predicted translations.

    The scale normalizers are treated as constants (stop-gradient), matching
    what a finite-difference check with frozen normalizers verifies.
    """
    n = len(pred)
    if n != len(gt):
        raise LengthMismatch("trajectories must have equal length")
    if w.w_r > 0 and n < 2:
        raise TooShort("RPE term needs at least 2 poses")
    if w.w_s > 0 and n < 3:
        raise TooShort("acceleration term needs at least 3 poses")
    tp, tg = pred.translations(), gt.translations()
    grad = np.zeros_like(tp)

    if w.w_a > 0:
        sp, sg = scale_normalizer(tp), scale_normalizer(tg)
        for t in range(n):
            u = _safe_unit(tp[t] / sp - tg[t] / sg)
            grad[t] += w.w_a * u / (sp * n)

    if w.w_r > 0:
        dtp = np.diff(tp, axis=0)
        dtg = np.diff(tg, axis=0)
        for t in range(n - 1):
            v = _safe_unit(dtp[t] - dtg[t])
            grad[t + 1] += w.w_r * v / (n - 1)
            grad[t] -= w.w_r * v / (n - 1)

    if w.w_s > 0:
        d2 = np.diff(tp, n=2, axis=0)
        for t in range(n - 2):
            u = _safe_unit(d2[t])
            grad[t + 2] += w.w_s * u / (n - 2)
            grad[t + 1] -= 2.0 * w.w_s * u / (n - 2)
            grad[t] += w.w_s * u / (n - 2)

    return grad
