"""Benchmark-style evaluation metrics.

Trajectory metrics with closed-form similarity alignment, depth metrics under
three alignment modes, and point-cloud accuracy / completeness / normal
consistency. These follow the standard benchmark conventions and are distinct
from the training losses in losses.py.
"""

from __future__ import annotations

import math
from dataclasses import dataclass
from enum import Enum

import numpy as np

from .errors import (DegenerateConfiguration, LengthMismatch,
                     NoOverlappingValidity, ShapeMismatch, TooFewPoints,
                     TooShort)
from .geometry import PointSet, Trajectory
from .spatial import DepthMap

_BRUTE_FORCE_LIMIT = 2000


@dataclass(frozen=True)
class Similarity3:
    """Similarity transform p -> scale * rotation @ p + translation."""

    scale: float
    rotation: np.ndarray  # (3, 3)
    translation: np.ndarray  # (3,)

    def apply(self, points: np.ndarray) -> np.ndarray:
        pts = np.asarray(points, dtype=float).reshape(-1, 3)
        return self.scale * pts @ self.rotation.T + self.translation


class DepthEvalMode(Enum):
    ORIGINAL = "original"
    SCALE = "scale"
    SCALE_AND_SHIFT = "scale_and_shift"


def umeyama_align(src, dst, with_scale: bool = True) -> Similarity3:
    """Least-squares similarity transform taking src points onto dst points.

    Closed-form solution via SVD of the cross-covariance; with_scale=False
    fixes the scale at 1 (rigid alignment).
    """
    src = np.asarray(src, dtype=float).reshape(-1, 3)
    dst = np.asarray(dst, dtype=float).reshape(-1, 3)
    if src.shape != dst.shape:
        raise LengthMismatch("point lists must have equal length")
    n = src.shape[0]
    if n < 3:
        raise DegenerateConfiguration("alignment needs at least 3 points")

    mu_src = src.mean(axis=0)
    mu_dst = dst.mean(axis=0)
    src_c = src - mu_src
    dst_c = dst - mu_dst
    cov = dst_c.T @ src_c / n
    u, d, vt = np.linalg.svd(cov)
    if d[1] < 1e-12 * max(d[0], 1e-300):
        raise DegenerateConfiguration("points are collinear or coincident")
    s = np.eye(3)
    if np.linalg.det(u) * np.linalg.det(vt) < 0:
        s[2, 2] = -1.0
    rotation = u @ s @ vt
    if with_scale:
        var_src = np.mean(np.sum(src_c ** 2, axis=1))
        scale = float(np.trace(np.diag(d) @ s) / var_src)
    else:
        scale = 1.0
    translation = mu_dst - scale * rotation @ mu_src
    return Similarity3(scale, rotation, translation)


def metric_ate(pred: Trajectory, gt: Trajectory, with_scale: bool = False) -> float:
    """RMSE of translation residuals after aligning pred onto gt."""
    if len(pred) != len(gt):
        raise LengthMismatch("trajectories must have equal length")
    tp, tg = pred.translations(), gt.translations()
    transform = umeyama_align(tp, tg, with_scale=with_scale)
    residuals = transform.apply(tp) - tg
    return float(np.sqrt(np.mean(np.sum(residuals ** 2, axis=1))))


def _se3(pose) -> np.ndarray:
    m = np.eye(4)
    m[:3, :3] = pose.q.to_matrix()
    m[:3, 3] = pose.t
    return m


def _se3_inv(m: np.ndarray) -> np.ndarray:
    out = np.eye(4)
    out[:3, :3] = m[:3, :3].T
    out[:3, 3] = -m[:3, :3].T @ m[:3, 3]
    return out


def metric_rpe(pred: Trajectory, gt: Trajectory) -> tuple[float, float]:
    """RMSE of per-step SE(3) relative-motion error.

    Returns (translational RMSE in scene units, rotational RMSE in degrees).
    """
    n = len(pred)
    if n != len(gt):
        raise LengthMismatch("trajectories must have equal length")
    if n < 2:
        raise TooShort("RPE needs at least 2 poses")
    trans_sq, rot_sq = [], []
    for i in range(1, n):
        rel_pred = _se3_inv(_se3(pred[i - 1])) @ _se3(pred[i])
        rel_gt = _se3_inv(_se3(gt[i - 1])) @ _se3(gt[i])
        err = _se3_inv(rel_gt) @ rel_pred
        trans_sq.append(float(np.sum(err[:3, 3] ** 2)))
        r = err[:3, :3]
        # atan2 form is well conditioned near the identity, unlike acos
        sin_angle = 0.5 * math.sqrt((r[2, 1] - r[1, 2]) ** 2
                                    + (r[0, 2] - r[2, 0]) ** 2
                                    + (r[1, 0] - r[0, 1]) ** 2)
        cos_angle = (np.trace(r) - 1.0) / 2.0
        angle = math.atan2(sin_angle, cos_angle)
        rot_sq.append(angle ** 2)
    rpe_trans = math.sqrt(float(np.mean(trans_sq)))
    rpe_rot = math.degrees(math.sqrt(float(np.mean(rot_sq))))
    return rpe_trans, rpe_rot


def metric_depth(pred: DepthMap, gt: DepthMap,
                 mode: DepthEvalMode = DepthEvalMode.ORIGINAL
                 ) -> tuple[float, float]:
    """Absolute relative error and the delta < 1.25 inlier percentage.

    scale mode multiplies pred by the median gt/pred ratio; scale_and_shift
    applies the least-squares affine correction a * pred + b.
    """
    if pred.depths.shape != gt.depths.shape:
        raise ShapeMismatch("depth maps must have the same shape")
    mask = pred.valid & gt.valid
    if not mask.any():
        raise NoOverlappingValidity("no pixel is valid in both maps")
    p = pred.depths[mask]
    g = gt.depths[mask]
    if mode is DepthEvalMode.SCALE:
        p = p * float(np.median(g / p))
    elif mode is DepthEvalMode.SCALE_AND_SHIFT:
        a, b = np.polyfit(p, g, 1)
        p = a * p + b
    abs_rel = float(np.mean(np.abs(p - g) / g))
    with np.errstate(divide="ignore", invalid="ignore"):
        ratio = np.maximum(p / g, g / p)
    delta = 100.0 * float(np.mean(ratio < 1.25))
    return abs_rel, delta


def _nearest_neighbors(query: np.ndarray, ref: np.ndarray
                       ) -> tuple[np.ndarray, np.ndarray]:
    """Index and distance of the nearest ref point for each query point.

    Brute force below _BRUTE_FORCE_LIMIT points, KD-tree above; both exact.
    """
    if max(query.shape[0], ref.shape[0]) <= _BRUTE_FORCE_LIMIT:
        d2 = np.sum((query[:, None, :] - ref[None, :, :]) ** 2, axis=2)
        idx = np.argmin(d2, axis=1)
        dist = np.sqrt(d2[np.arange(query.shape[0]), idx])
        return idx, dist
    from scipy.spatial import cKDTree
    dist, idx = cKDTree(ref).query(query)
    return np.asarray(idx), np.asarray(dist)


def estimate_normals(points: np.ndarray, k: int = 16) -> np.ndarray:
    """Per-point normals from local PCA over the k nearest neighbors.

    The normal is the smallest-eigenvalue direction of the neighborhood
    covariance, oriented toward the coordinate origin.
    """
    pts = np.asarray(points, dtype=float).reshape(-1, 3)
    n = pts.shape[0]
    if n < k + 1:
        raise TooFewPoints(f"normal estimation needs at least {k + 1} points")
    d2 = np.sum((pts[:, None, :] - pts[None, :, :]) ** 2, axis=2)
    order = np.argsort(d2, axis=1)
    normals = np.zeros_like(pts)
    for i in range(n):
        nb = pts[order[i, :k + 1]]  # includes the point itself
        nb_c = nb - nb.mean(axis=0)
        _, _, vt = np.linalg.svd(nb_c, full_matrices=False)
        normal = vt[-1]
        if np.dot(normal, pts[i]) > 0:  # point toward the origin
            normal = -normal
        normals[i] = normal
    return normals


def metric_recon(pred: PointSet, gt: PointSet, k_normals: int = 16
                 ) -> tuple[float, float, float]:
    """Accuracy, completeness, and normal consistency of a predicted cloud.

    acc: mean pred-to-gt nearest distance; comp: the reverse; nc: mean
    absolute cosine between each pred normal and its matched gt normal.
    Clouds must already be expressed in the same frame.
    """
    p, g = pred.points, gt.points
    if min(p.shape[0], g.shape[0]) < k_normals + 1:
        raise TooFewPoints(f"reconstruction metrics need > {k_normals} points")
    idx_pg, dist_pg = _nearest_neighbors(p, g)
    _, dist_gp = _nearest_neighbors(g, p)
    acc = float(np.mean(dist_pg))
    comp = float(np.mean(dist_gp))
    n_pred = estimate_normals(p, k_normals)
    n_gt = estimate_normals(g, k_normals)
    nc = float(np.mean(np.abs(np.sum(n_pred * n_gt[idx_pg], axis=1))))
    return acc, comp, nc
