"""Learned reward prior: a small convolutional network trained from scratch.

Predicts the reward of an action from a mechanism image. The image passes
through two strided convolutions and a spatial-softmax layer that reduces
each feature channel to the expected 2-D location of its activations; the
action (zero-padded to three components so both mechanism kinds share one
input space) passes through a small MLP; a distance regressor maps the
concatenated encodings to a scalar reward estimate.

Forward and backward passes are implemented directly in numpy; there is no
autodiff framework. Convolutions use strided im2col so both directions are
plain matrix products. Training is Adam on mean squared error over seeded
shuffled minibatches and is bit-deterministic given (weights, data,
schedule, seed).
"""
from __future__ import annotations

import json
import math
from dataclasses import dataclass, fields, replace
from pathlib import Path

import numpy as np

from .mechanisms import IMAGE_SIZE, MechanismKind, action_bounds

WEIGHTS_VERSION = "mechprior-weights-v1"

_KERNEL = 3
_STRIDE = 2
_CONV1_OUT = 8
_CONV2_OUT = 16
_H1 = (IMAGE_SIZE - _KERNEL) // _STRIDE + 1  # 31
_H2 = (_H1 - _KERNEL) // _STRIDE + 1  # 15
ACTION_DIM = 3
_Z_IM_DIM = 2 * _CONV2_OUT  # 32
_Z_ACT_DIM = 16
_FA_HIDDEN = 32
_FD_HIDDEN = 64
_TAU_FLOOR = 1e-3

# Normalized pixel coordinate grids for the spatial softmax, flattened
# row-major: x varies over columns, y over rows, both spanning [-1, 1].
_XGRID = np.tile(np.linspace(-1.0, 1.0, _H2), _H2)
_YGRID = np.repeat(np.linspace(-1.0, 1.0, _H2), _H2)

_FIT_STREAM = 0x66697400  # namespaces fit shuffles apart from other RNG uses


class TrainingDiverged(RuntimeError):
    """Loss became non-finite during fitting."""


@dataclass(frozen=True)
class NetworkWeights:
    conv1_w: np.ndarray  # (8, 1, 3, 3)
    conv1_b: np.ndarray  # (8,)
    conv2_w: np.ndarray  # (16, 8, 3, 3)
    conv2_b: np.ndarray  # (16,)
    tau: np.ndarray  # () spatial softmax temperature, > 0
    fa1_w: np.ndarray  # (32, 3)
    fa1_b: np.ndarray  # (32,)
    fa2_w: np.ndarray  # (16, 32)
    fa2_b: np.ndarray  # (16,)
    fd1_w: np.ndarray  # (64, 48)
    fd1_b: np.ndarray  # (64,)
    fd2_w: np.ndarray  # (64, 64)
    fd2_b: np.ndarray  # (64,)
    fd3_w: np.ndarray  # (1, 64)
    fd3_b: np.ndarray  # (1,)
    version: str = WEIGHTS_VERSION


_PARAM_FIELDS = tuple(f.name for f in fields(NetworkWeights) if f.name != "version")

_SHAPES = {
    "conv1_w": (_CONV1_OUT, 1, _KERNEL, _KERNEL),
    "conv1_b": (_CONV1_OUT,),
    "conv2_w": (_CONV2_OUT, _CONV1_OUT, _KERNEL, _KERNEL),
    "conv2_b": (_CONV2_OUT,),
    "tau": (),
    "fa1_w": (_FA_HIDDEN, ACTION_DIM),
    "fa1_b": (_FA_HIDDEN,),
    "fa2_w": (_Z_ACT_DIM, _FA_HIDDEN),
    "fa2_b": (_Z_ACT_DIM,),
    "fd1_w": (_FD_HIDDEN, _Z_IM_DIM + _Z_ACT_DIM),
    "fd1_b": (_FD_HIDDEN,),
    "fd2_w": (_FD_HIDDEN, _FD_HIDDEN),
    "fd2_b": (_FD_HIDDEN,),
    "fd3_w": (1, _FD_HIDDEN),
    "fd3_b": (1,),
}


@dataclass(frozen=True)
class TrainSchedule:
    epochs: int = 40
    minibatch: int = 64
    step_size: float = 1e-3
    decay: tuple[float, float] = (0.9, 0.999)

    def __post_init__(self) -> None:
        if self.epochs < 1 or self.minibatch < 1:
            raise ValueError("epochs and minibatch must be positive")
        if self.step_size <= 0:
            raise ValueError("step_size must be positive")
        if not all(0.0 < d < 1.0 for d in self.decay):
            raise ValueError("moment decay parameters must lie in (0, 1)")


class Dataset:
    """Accumulated (mechanism, image, action, reward) interaction records.

    Images are stored once per mechanism id; records reference them, so a
    10k-interaction dataset over 100 mechanisms keeps 100 images.
    """

    def __init__(self, kind: MechanismKind):
        self.kind = kind
        self.mech_ids: list[int] = []
        self.actions: list[np.ndarray] = []
        self.rewards: list[float] = []
        self.images: dict[int, np.ndarray] = {}
        self._bounds = action_bounds(kind)

    def __len__(self) -> int:
        return len(self.rewards)

    def append(self, mech_id: int, image: np.ndarray, action: np.ndarray, reward: float) -> None:
        if not (math.isfinite(reward) and reward >= 0.0):
            raise ValueError(f"reward must be finite and nonnegative, got {reward}")
        a = np.asarray(action, dtype=float)
        if not self._bounds.contains(a):
            raise ValueError(f"action {a.tolist()} outside bounds for {self.kind.value}")
        if mech_id not in self.images:
            self.images[int(mech_id)] = np.asarray(image, dtype=float)
        self.mech_ids.append(int(mech_id))
        self.actions.append(a)
        self.rewards.append(float(reward))

    def record(self, i: int) -> tuple[int, np.ndarray, np.ndarray, float]:
        mid = self.mech_ids[i]
        return mid, self.images[mid], self.actions[i], self.rewards[i]

    def padded_actions(self) -> np.ndarray:
        out = np.zeros((len(self), ACTION_DIM))
        for i, a in enumerate(self.actions):
            out[i, : a.shape[0]] = a
        return out

    def targets(self) -> np.ndarray:
        return np.asarray(self.rewards, dtype=float)

    def image_table(self) -> tuple[np.ndarray, np.ndarray]:
        """Unique images in first-seen order plus a per-record index into them."""
        order: dict[int, int] = {}
        for mid in self.mech_ids:
            if mid not in order:
                order[mid] = len(order)
        images = np.stack([self.images[mid] for mid in order]) if order else np.empty((0, IMAGE_SIZE, IMAGE_SIZE))
        index = np.asarray([order[mid] for mid in self.mech_ids], dtype=np.intp)
        return images, index


def pad_actions(actions: np.ndarray) -> np.ndarray:
    """Zero-pad action rows to the shared 3-component input space."""
    a = np.atleast_2d(np.asarray(actions, dtype=float))
    if a.shape[1] == ACTION_DIM:
        return a
    out = np.zeros((a.shape[0], ACTION_DIM))
    out[:, : a.shape[1]] = a
    return out


def init_weights(seed: int) -> NetworkWeights:
    """Fresh weights, fan-in-scaled uniform; biases zero; temperature 1."""
    rng = np.random.default_rng(np.random.SeedSequence([0x6E6E00, int(seed)]))

    def uniform(shape: tuple[int, ...], fan_in: int) -> np.ndarray:
        bound = 1.0 / math.sqrt(fan_in)
        return rng.uniform(-bound, bound, size=shape)

    return NetworkWeights(
        conv1_w=uniform(_SHAPES["conv1_w"], _KERNEL * _KERNEL),
        conv1_b=np.zeros(_CONV1_OUT),
        conv2_w=uniform(_SHAPES["conv2_w"], _CONV1_OUT * _KERNEL * _KERNEL),
        conv2_b=np.zeros(_CONV2_OUT),
        tau=np.array(1.0),
        fa1_w=uniform(_SHAPES["fa1_w"], ACTION_DIM),
        fa1_b=np.zeros(_FA_HIDDEN),
        fa2_w=uniform(_SHAPES["fa2_w"], _FA_HIDDEN),
        fa2_b=np.zeros(_Z_ACT_DIM),
        fd1_w=uniform(_SHAPES["fd1_w"], _Z_IM_DIM + _Z_ACT_DIM),
        fd1_b=np.zeros(_FD_HIDDEN),
        fd2_w=uniform(_SHAPES["fd2_w"], _FD_HIDDEN),
        fd2_b=np.zeros(_FD_HIDDEN),
        fd3_w=uniform(_SHAPES["fd3_w"], _FD_HIDDEN),
        fd3_b=np.zeros(1),
    )


def _im2col(x: np.ndarray, k: int, s: int) -> np.ndarray:
    """(B, C, H, W) -> (B, OH*OW, C*k*k) patches via strided slicing."""
    b, c, h, w = x.shape
    oh = (h - k) // s + 1
    ow = (w - k) // s + 1
    cols = np.empty((b, oh, ow, c, k, k))
    for ki in range(k):
        for kj in range(k):
            cols[:, :, :, :, ki, kj] = x[:, :, ki : ki + s * oh : s, kj : kj + s * ow : s].transpose(0, 2, 3, 1)
    return cols.reshape(b, oh * ow, c * k * k)


def _col2im(dcols: np.ndarray, x_shape: tuple[int, ...], k: int, s: int) -> np.ndarray:
    """Adjoint of _im2col: scatter patch gradients back onto the input grid."""
    b, c, h, w = x_shape
    oh = (h - k) // s + 1
    ow = (w - k) // s + 1
    view = dcols.reshape(b, oh, ow, c, k, k)
    dx = np.zeros(x_shape)
    for ki in range(k):
        for kj in range(k):
            dx[:, :, ki : ki + s * oh : s, kj : kj + s * ow : s] += view[:, :, :, :, ki, kj].transpose(0, 3, 1, 2)
    return dx


def _conv_forward(x: np.ndarray, w: np.ndarray, b: np.ndarray, s: int):
    n_filters = w.shape[0]
    k = w.shape[2]
    cols = _im2col(x, k, s)
    flat = cols @ w.reshape(n_filters, -1).T + b
    oh = (x.shape[2] - k) // s + 1
    out = flat.transpose(0, 2, 1).reshape(x.shape[0], n_filters, oh, -1)
    return out, cols


def _conv_backward(dout: np.ndarray, cols: np.ndarray, w: np.ndarray, x_shape, s: int, need_dx: bool):
    n_filters = w.shape[0]
    k = w.shape[2]
    b, _, oh, ow = dout.shape
    dflat = dout.reshape(b, n_filters, oh * ow).transpose(0, 2, 1)
    dw = (dflat.reshape(-1, n_filters).T @ cols.reshape(-1, cols.shape[2])).reshape(w.shape)
    db = dflat.sum(axis=(0, 1))
    dx = None
    if need_dx:
        dcols = dflat @ w.reshape(n_filters, -1)
        dx = _col2im(dcols, x_shape, k, s)
    return dw, db, dx


def spatial_softmax(feature_maps: np.ndarray, tau: float) -> np.ndarray:
    """Expected activation locations per channel, in [-1, 1] coordinates.

    Takes (C, H, W) maps and returns 2C values ordered channel-major as
    (x_0, y_0, x_1, y_1, ...). The softmax uses max-subtraction, so large
    activations and small temperatures stay finite.
    """
    if tau <= 0:
        raise ValueError("tau must be positive")
    c, h, w = feature_maps.shape
    flat = feature_maps.reshape(c, h * w) / tau
    flat = flat - flat.max(axis=1, keepdims=True)
    e = np.exp(flat)
    s = e / e.sum(axis=1, keepdims=True)
    xg = np.tile(np.linspace(-1.0, 1.0, w), h)
    yg = np.repeat(np.linspace(-1.0, 1.0, h), w)
    return np.stack([s @ xg, s @ yg], axis=1).reshape(2 * c)


def _forward(w: NetworkWeights, images: np.ndarray, img_index: np.ndarray, actions: np.ndarray):
    """Batched forward pass over unique images plus per-record image indices."""
    x = images[:, None, :, :]
    z1, cols1 = _conv_forward(x, w.conv1_w, w.conv1_b, _STRIDE)
    a1 = np.maximum(z1, 0.0)
    z2, cols2 = _conv_forward(a1, w.conv2_w, w.conv2_b, _STRIDE)
    a2 = np.maximum(z2, 0.0)

    tau = float(w.tau)
    maps = a2.reshape(a2.shape[0], _CONV2_OUT, _H2 * _H2)
    u = maps / tau
    u = u - u.max(axis=2, keepdims=True)
    e = np.exp(u)
    soft = e / e.sum(axis=2, keepdims=True)
    ex = soft @ _XGRID
    ey = soft @ _YGRID
    zim_u = np.stack([ex, ey], axis=2).reshape(a2.shape[0], _Z_IM_DIM)
    zim = zim_u[img_index]

    za1 = actions @ w.fa1_w.T + w.fa1_b
    ha1 = np.maximum(za1, 0.0)
    za = ha1 @ w.fa2_w.T + w.fa2_b

    h = np.concatenate([zim, za], axis=1)
    zd1 = h @ w.fd1_w.T + w.fd1_b
    hd1 = np.maximum(zd1, 0.0)
    zd2 = hd1 @ w.fd2_w.T + w.fd2_b
    hd2 = np.maximum(zd2, 0.0)
    pred = (hd2 @ w.fd3_w.T + w.fd3_b)[:, 0]

    cache = (x, cols1, z1, a1, cols2, z2, maps, soft, img_index, actions, za1, ha1, h, zd1, hd1, zd2, hd2)
    return pred, cache


def _backward(w: NetworkWeights, cache, dpred: np.ndarray) -> NetworkWeights:
    (x, cols1, z1, a1, cols2, z2, maps, soft, img_index, actions, za1, ha1, h, zd1, hd1, zd2, hd2) = cache
    tau = float(w.tau)

    dout = dpred[:, None]
    dfd3_w = dout.T @ hd2
    dfd3_b = dout.sum(axis=0)
    dhd2 = dout @ w.fd3_w
    dzd2 = dhd2 * (zd2 > 0.0)
    dfd2_w = dzd2.T @ hd1
    dfd2_b = dzd2.sum(axis=0)
    dhd1 = dzd2 @ w.fd2_w
    dzd1 = dhd1 * (zd1 > 0.0)
    dfd1_w = dzd1.T @ h
    dfd1_b = dzd1.sum(axis=0)
    dh = dzd1 @ w.fd1_w

    dzim = dh[:, :_Z_IM_DIM]
    dza = dh[:, _Z_IM_DIM:]

    dfa2_w = dza.T @ ha1
    dfa2_b = dza.sum(axis=0)
    dha1 = dza @ w.fa2_w
    dza1 = dha1 * (za1 > 0.0)
    dfa1_w = dza1.T @ actions
    dfa1_b = dza1.sum(axis=0)

    n_unique = soft.shape[0]
    dzim_u = np.zeros((n_unique, _Z_IM_DIM))
    np.add.at(dzim_u, img_index, dzim)
    dpoints = dzim_u.reshape(n_unique, _CONV2_OUT, 2)
    dsoft = dpoints[:, :, 0:1] * _XGRID + dpoints[:, :, 1:2] * _YGRID
    # Softmax backward; du is the gradient w.r.t. maps / tau.
    du = soft * (dsoft - np.sum(soft * dsoft, axis=2, keepdims=True))
    dmaps = du / tau
    dtau = -np.sum(du * maps) / (tau * tau)
    da2 = dmaps.reshape(n_unique, _CONV2_OUT, _H2, _H2)

    dz2 = da2 * (z2 > 0.0)
    dconv2_w, dconv2_b, da1 = _conv_backward(dz2, cols2, w.conv2_w, a1.shape, _STRIDE, need_dx=True)
    dz1 = da1 * (z1 > 0.0)
    dconv1_w, dconv1_b, _ = _conv_backward(dz1, cols1, w.conv1_w, x.shape, _STRIDE, need_dx=False)

    return NetworkWeights(
        conv1_w=dconv1_w,
        conv1_b=dconv1_b,
        conv2_w=dconv2_w,
        conv2_b=dconv2_b,
        tau=np.array(dtau),
        fa1_w=dfa1_w,
        fa1_b=dfa1_b,
        fa2_w=dfa2_w,
        fa2_b=dfa2_b,
        fd1_w=dfd1_w,
        fd1_b=dfd1_b,
        fd2_w=dfd2_w,
        fd2_b=dfd2_b,
        fd3_w=dfd3_w,
        fd3_b=dfd3_b,
        version=w.version,
    )


def predict_batch(w: NetworkWeights, image: np.ndarray, actions: np.ndarray) -> np.ndarray:
    """Predictions for many padded actions against a single image."""
    acts = pad_actions(actions)
    images = np.asarray(image, dtype=float)[None, :, :]
    pred, _ = _forward(w, images, np.zeros(acts.shape[0], dtype=np.intp), acts)
    return pred


def predict_reward(w: NetworkWeights, image: np.ndarray, action: np.ndarray) -> float:
    return float(predict_batch(w, image, np.asarray(action, dtype=float)[None, :])[0])


def encode_image(w: NetworkWeights, image: np.ndarray) -> np.ndarray:
    """Spatial-softmax feature points for one image (the 32-D image code)."""
    x = np.asarray(image, dtype=float)[None, None, :, :]
    z1, _ = _conv_forward(x, w.conv1_w, w.conv1_b, _STRIDE)
    a1 = np.maximum(z1, 0.0)
    z2, _ = _conv_forward(a1, w.conv2_w, w.conv2_b, _STRIDE)
    a2 = np.maximum(z2, 0.0)
    return spatial_softmax(a2[0], float(w.tau))


def predict_from_encoding(w: NetworkWeights, z_im: np.ndarray, actions: np.ndarray) -> np.ndarray:
    """Predictions from a precomputed image code; used on hot paths."""
    acts = pad_actions(actions)
    ha1 = np.maximum(acts @ w.fa1_w.T + w.fa1_b, 0.0)
    za = ha1 @ w.fa2_w.T + w.fa2_b
    h = np.concatenate([np.broadcast_to(z_im, (acts.shape[0], _Z_IM_DIM)), za], axis=1)
    hd1 = np.maximum(h @ w.fd1_w.T + w.fd1_b, 0.0)
    hd2 = np.maximum(hd1 @ w.fd2_w.T + w.fd2_b, 0.0)
    return (hd2 @ w.fd3_w.T + w.fd3_b)[:, 0]


def make_prior(w: NetworkWeights, image: np.ndarray):
    """Vectorized prior over raw (unpadded) actions with a cached image code."""
    z_im = encode_image(w, image)

    def prior(actions: np.ndarray) -> np.ndarray:
        return predict_from_encoding(w, z_im, actions)

    return prior


def loss_and_gradient(
    w: NetworkWeights, images: np.ndarray, actions: np.ndarray, rewards: np.ndarray
) -> tuple[float, NetworkWeights]:
    """Mean squared error over the batch and its gradient for every parameter.

    images is (B, 64, 64), actions is (B, 3) already padded, rewards is (B,).
    """
    images = np.asarray(images, dtype=float)
    actions = np.asarray(actions, dtype=float)
    rewards = np.asarray(rewards, dtype=float)
    n = images.shape[0]
    if n == 0:
        raise ValueError("batch must be nonempty")
    pred, cache = _forward(w, images, np.arange(n, dtype=np.intp), actions)
    err = pred - rewards
    loss = float(err @ err) / n
    grads = _backward(w, cache, 2.0 * err / n)
    return loss, grads


def _loss_and_grad_indexed(w, images_u, img_index, actions, rewards):
    pred, cache = _forward(w, images_u, img_index, actions)
    err = pred - rewards
    loss = float(err @ err) / rewards.shape[0]
    return loss, _backward(w, cache, 2.0 * err / rewards.shape[0])


def fit(w: NetworkWeights, data: Dataset, schedule: TrainSchedule, seed: int) -> NetworkWeights:
    """Adam fine-tuning of w on the full dataset; returns new weights.

    Minibatches are drawn from a seeded shuffle each epoch. The temperature
    is kept above a small floor so the spatial softmax stays defined.
    Raises TrainingDiverged if the loss leaves the reals.
    """
    if len(data) == 0:
        raise ValueError("dataset is empty")
    images_u, img_index = data.image_table()
    actions = data.padded_actions()
    targets = data.targets()
    n = len(data)

    params = {name: np.array(getattr(w, name)) for name in _PARAM_FIELDS}
    m = {name: np.zeros_like(p) for name, p in params.items()}
    v = {name: np.zeros_like(p) for name, p in params.items()}
    b1, b2 = schedule.decay
    eps = 1e-8
    step = 0

    rng = np.random.default_rng(np.random.SeedSequence([_FIT_STREAM, int(seed)]))
    current = replace(w, **params)
    for epoch in range(schedule.epochs):
        perm = rng.permutation(n)
        for start in range(0, n, schedule.minibatch):
            idx = perm[start : start + schedule.minibatch]
            uniq, inv = np.unique(img_index[idx], return_inverse=True)
            loss, grads = _loss_and_grad_indexed(
                current, images_u[uniq], inv.astype(np.intp), actions[idx], targets[idx]
            )
            if not math.isfinite(loss):
                raise TrainingDiverged(
                    f"non-finite loss {loss} at epoch {epoch}, batch offset {start}"
                )
            step += 1
            scale = schedule.step_size * math.sqrt(1.0 - b2**step) / (1.0 - b1**step)
            for name in _PARAM_FIELDS:
                g = getattr(grads, name)
                m[name] = b1 * m[name] + (1.0 - b1) * g
                v[name] = b2 * v[name] + (1.0 - b2) * g * g
                params[name] = params[name] - scale * m[name] / (np.sqrt(v[name]) + eps)
            params["tau"] = np.maximum(params["tau"], _TAU_FLOOR)
            current = replace(w, **params)
    return current


def weights_to_vector(w: NetworkWeights) -> np.ndarray:
    return np.concatenate([np.asarray(getattr(w, name)).ravel() for name in _PARAM_FIELDS])


def vector_to_weights(template: NetworkWeights, vec: np.ndarray) -> NetworkWeights:
    out = {}
    offset = 0
    for name in _PARAM_FIELDS:
        shape = _SHAPES[name]
        size = int(np.prod(shape)) if shape else 1
        out[name] = np.asarray(vec[offset : offset + size]).reshape(shape)
        offset += size
    return replace(template, **out)


def save_weights(w: NetworkWeights, path: str | Path) -> None:
    payload = {
        "version": w.version,
        "arch": {
            "image_size": IMAGE_SIZE,
            "conv_channels": [_CONV1_OUT, _CONV2_OUT],
            "kernel": _KERNEL,
            "stride": _STRIDE,
            "action_layers": [ACTION_DIM, _FA_HIDDEN, _Z_ACT_DIM],
            "dist_layers": [_Z_IM_DIM + _Z_ACT_DIM, _FD_HIDDEN, _FD_HIDDEN, 1],
        },
        "params": {
            name: np.asarray(getattr(w, name)).ravel().tolist() for name in _PARAM_FIELDS
        },
    }
    Path(path).write_text(json.dumps(payload), encoding="utf-8")


def load_weights(path: str | Path) -> NetworkWeights:
    payload = json.loads(Path(path).read_text(encoding="utf-8"))
    if payload.get("version") != WEIGHTS_VERSION:
        raise ValueError(f"unsupported weights version: {payload.get('version')!r}")
    out = {}
    for name in _PARAM_FIELDS:
        shape = _SHAPES[name]
        flat = np.asarray(payload["params"][name], dtype=float)
        expected = int(np.prod(shape)) if shape else 1
        if flat.size != expected:
            raise ValueError(f"parameter {name} has {flat.size} values, expected {expected}")
        out[name] = flat.reshape(shape)
    if float(out["tau"]) <= 0:
        raise ValueError("temperature must be positive")
    return NetworkWeights(version=WEIGHTS_VERSION, **out)
