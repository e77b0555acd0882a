"""Object-level contrastive objective with per-instance pooling and projection.

The loss is a symmetric InfoNCE over matched instances of a scene pair:
positives are the same instance seen in both rooms, negatives are every other
projected feature in the batch. It is computed as two directional terms, each
stacking features as (anchor room, other room, extras); swapping the rooms
therefore swaps two IEEE additions and the value is unchanged bit for bit.
"""
from __future__ import annotations

from dataclasses import dataclass

import numpy as np

from .errors import DegenerateFeature, DegeneratePair, InvalidInput, MissingInstance

NORM_FLOOR = 1e-12


@dataclass(frozen=True)
class OclConfig:
    tau: float = 0.1
    exclude_self: bool = True

    def validate(self) -> None:
        if not self.tau > 0:
            raise InvalidInput("temperature must be positive")


def pool_by_instance(features: np.ndarray, labels: np.ndarray, ids) -> np.ndarray:
    """Average per-point features into one row per instance id, ascending.

    Only the requested ids participate; confounder points (label 0) and any
    other label never touch the result.
    """
    feats = np.asarray(features, dtype=np.float64)
    lab = np.asarray(labels)
    if feats.ndim != 2:
        raise InvalidInput("features must be a (points, dim) matrix")
    if lab.shape != (feats.shape[0],):
        raise InvalidInput("labels must align one-to-one with feature rows")
    rows = []
    for instance_id in sorted(int(i) for i in ids):
        mask = lab == instance_id
        if not mask.any():
            raise MissingInstance(f"instance {instance_id} has no points")
        rows.append(feats[mask].mean(axis=0))
    if not rows:
        raise InvalidInput("no instance ids to pool")
    return np.stack(rows, axis=0)


def _normalize_rows(x: np.ndarray) -> np.ndarray:
    norms = np.linalg.norm(x, axis=-1, keepdims=True)
    if np.any(norms < NORM_FLOOR):
        raise DegenerateFeature("feature norm below 1e-12; cannot project to the sphere")
    return x / norms


def _init_mlp(dims, rng):
    weights = [
        rng.normal(0.0, 1.0 / np.sqrt(d_in), size=(d_in, d_out))
        for d_in, d_out in zip(dims[:-1], dims[1:])
    ]
    biases = [rng.normal(0.0, 0.01, size=d_out) for d_out in dims[1:]]
    return weights, biases


@dataclass
class ProjectionHead:
    """MLP followed by L2 normalization onto the unit hypersphere."""

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @classmethod
    def create(cls, in_dim: int, out_dim: int = 128, hidden_dims=None, seed: int = 0):
        if hidden_dims is None:
            hidden_dims = (in_dim,)
        dims = [in_dim, *hidden_dims, out_dim]
        weights, biases = _init_mlp(dims, np.random.default_rng(seed))
        return cls(weights=weights, biases=biases)

    @property
    def in_dim(self) -> int:
        return self.weights[0].shape[0]

    def forward(self, h: np.ndarray) -> np.ndarray:
        """Project one vector or a row matrix; output rows have unit norm."""
        x = np.asarray(h, dtype=np.float64)
        single = x.ndim == 1
        if single:
            x = x.reshape(1, -1)
        if x.shape[1] != self.in_dim:
            raise InvalidInput(f"head expects width {self.in_dim}, got {x.shape[1]}")
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            x = np.maximum(x @ w + b, 0.0)
        x = x @ self.weights[-1] + self.biases[-1]
        x = _normalize_rows(x)
        return x[0] if single else x


def project(h: np.ndarray, head: ProjectionHead) -> np.ndarray:
    """Map a pooled feature onto the unit hypersphere through the head."""
    return head.forward(h)


@dataclass
class ToyEncoder:
    """Shared per-point MLP standing in for a real backbone.

    Applying the same map to every point makes it permutation-equivariant by
    construction; it exists to exercise the loss end to end, not to train.
    """

    weights: list[np.ndarray]
    biases: list[np.ndarray]

    @classmethod
    def create(cls, width: int = 64, depth: int = 3, seed: int = 0):
        if depth < 1:
            raise InvalidInput("encoder needs at least one layer")
        dims = [3] + [width] * depth
        weights, biases = _init_mlp(dims, np.random.default_rng(seed))
        return cls(weights=weights, biases=biases)

    @property
    def width(self) -> int:
        return self.weights[-1].shape[1]

    def encode(self, points: np.ndarray) -> np.ndarray:
        x = np.asarray(points, dtype=np.float64)
        if x.ndim != 2 or x.shape[1] != 3:
            raise InvalidInput("encoder expects an (N, 3) point array")
        for w, b in zip(self.weights[:-1], self.biases[:-1]):
            x = np.tanh(x @ w + b)
        return x @ self.weights[-1] + self.biases[-1]


def toy_encode(scene, encoder: ToyEncoder) -> np.ndarray:
    """Per-point features for a RoomScene or a raw point array."""
    points = scene.points if hasattr(scene, "points") else scene
    return encoder.encode(points)


def _as_feature_stack(f_a, f_b, batch_extras):
    a = np.asarray(f_a, dtype=np.float64)
    b = np.asarray(f_b, dtype=np.float64)
    if a.ndim != 2 or b.ndim != 2 or a.shape != b.shape:
        raise InvalidInput("matched feature sets must be equal-shape (n, dim) matrices")
    if batch_extras is None:
        extras = np.zeros((0, a.shape[1]), dtype=np.float64)
    else:
        extras = np.asarray(batch_extras, dtype=np.float64)
        if extras.size == 0:
            extras = np.zeros((0, a.shape[1]), dtype=np.float64)
        if extras.ndim != 2 or extras.shape[1] != a.shape[1]:
            raise InvalidInput("batch extras must match the feature dimensionality")
    if not (np.isfinite(a).all() and np.isfinite(b).all() and np.isfinite(extras).all()):
        raise InvalidInput("features must be finite")
    if a.shape[0] < 2 and extras.shape[0] == 0:
        raise InvalidInput("need n >= 2 matched instances or batch extras as negatives")
    return a, b, extras


def _side_logits(anchors, positives, extras, tau, exclude_self):
    """Masked logits and positive logits for one direction of the loss."""
    n = anchors.shape[0]
    stack = np.concatenate([anchors, positives, extras], axis=0)
    logits = anchors @ stack.T / tau
    pos = logits[np.arange(n), n + np.arange(n)].copy()
    if exclude_self:
        logits[np.arange(n), np.arange(n)] = -np.inf
    return logits, pos


def _side_loss(anchors, positives, extras, tau, exclude_self) -> float:
    logits, pos = _side_logits(anchors, positives, extras, tau, exclude_self)
    m = logits.max(axis=1, keepdims=True)
    lse = m[:, 0] + np.log(np.exp(logits - m).sum(axis=1))
    return float(np.mean(lse - pos))


def ocl_loss(f_a, f_b, batch_extras=None, cfg: OclConfig = OclConfig()) -> float:
    """Symmetric instance-matched InfoNCE.

    f_a[i] and f_b[i] must be the same instance's projected features in the
    two rooms; batch_extras holds projected features of other pairs in the
    batch, acting as additional negatives. With exclude_self an anchor's own
    feature leaves its denominator; without it the denominator runs over the
    entire batch feature set.
    """
    cfg.validate()
    a, b, extras = _as_feature_stack(f_a, f_b, batch_extras)
    return _side_loss(a, b, extras, cfg.tau, cfg.exclude_self) + _side_loss(
        b, a, extras, cfg.tau, cfg.exclude_self
    )


def _side_grad(anchors, positives, extras, tau, exclude_self):
    n = anchors.shape[0]
    stack = np.concatenate([anchors, positives, extras], axis=0)
    logits, _ = _side_logits(anchors, positives, extras, tau, exclude_self)
    m = logits.max(axis=1, keepdims=True)
    expv = np.exp(logits - m)
    probs = expv / expv.sum(axis=1, keepdims=True)

    scale = 1.0 / (n * tau)
    grad_anchor = (probs @ stack - positives) * scale
    grad_stack = probs.T @ anchors * scale
    g_anchors = grad_anchor + grad_stack[:n]
    g_positives = grad_stack[n : 2 * n] - anchors * scale
    g_extras = grad_stack[2 * n :]
    return g_anchors, g_positives, g_extras


def ocl_grad(f_a, f_b, batch_extras=None, cfg: OclConfig = OclConfig()):
    """Analytic gradient of ocl_loss with respect to every input vector.

    Returns (grad_a, grad_b, grad_extras) matching the input shapes. Exists
    for numerical verification, not for training.
    """
    cfg.validate()
    a, b, extras = _as_feature_stack(f_a, f_b, batch_extras)
    ga1, gb1, ge1 = _side_grad(a, b, extras, cfg.tau, cfg.exclude_self)
    gb2, ga2, ge2 = _side_grad(b, a, extras, cfg.tau, cfg.exclude_self)
    return ga1 + ga2, gb1 + gb2, ge1 + ge2


def pair_features(pair, encoder: ToyEncoder, head: ProjectionHead):
    """Projected per-instance features (f_a, f_b) for a scene pair."""
    if not pair.shared_ids:
        raise DegeneratePair("pair has no shared instances")
    ids = pair.shared_ids
    f_a = head.forward(pool_by_instance(toy_encode(pair.room_a, encoder), pair.room_a.labels, ids))
    f_b = head.forward(pool_by_instance(toy_encode(pair.room_b, encoder), pair.room_b.labels, ids))
    return f_a, f_b


def ocl_end_to_end(
    pair,
    encoder: ToyEncoder,
    head: ProjectionHead,
    cfg: OclConfig = OclConfig(),
    batch_extras=None,
) -> float:
    """Encode both rooms, pool shared instances, project, and evaluate the loss."""
    f_a, f_b = pair_features(pair, encoder, head)
    return ocl_loss(f_a, f_b, batch_extras, cfg)
