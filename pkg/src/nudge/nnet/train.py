"""Training: BCE-on-softmax loss, Adam, gradient checking.

Loss is binary cross-entropy on the snore probability taken from the 2-way
softmax (equivalent to 2-class cross-entropy), with a 1e-12 floor inside
the logs. All math in float64.
"""

from dataclasses import dataclass, field

import numpy as np

from ..errors import EmptyInputError, TrainingDivergedError
from .layers import softmax
from .model import SnoreModel
from .rng import SplitMix64

LOG_EPS = 1e-12


@dataclass
class TrainConfig:
    lr: float = 0.001
    beta1: float = 0.9
    beta2: float = 0.999
    epsilon: float = 1e-8
    batch_size: int = 32
    max_epochs: int = 5
    seed: int = 0

    def __post_init__(self):
        if self.lr <= 0:
            raise ValueError("lr must be positive")
        if not (0 < self.beta1 < self.beta2 < 1):
            raise ValueError("need 0 < beta1 < beta2 < 1")
        if self.batch_size < 1:
            raise ValueError("batch_size must be >= 1")


@dataclass
class AdamState:
    t: int = 0
    m: dict = field(default_factory=dict)
    v: dict = field(default_factory=dict)


def adam_update(state: AdamState, cfg: TrainConfig, grads: dict, params: dict) -> None:
    """One Adam step with bias correction; mutates params in place."""
    state.t += 1
    t = state.t
    for name, g in grads.items():
        m = state.m.get(name)
        if m is None:
            m = np.zeros_like(g)
            state.m[name] = m
            state.v[name] = np.zeros_like(g)
        v = state.v[name]
        m *= cfg.beta1
        m += (1 - cfg.beta1) * g
        v *= cfg.beta2
        v += (1 - cfg.beta2) * np.square(g)
        m_hat = m / (1 - cfg.beta1 ** t)
        v_hat = v / (1 - cfg.beta2 ** t)
        params[name] -= cfg.lr * m_hat / (np.sqrt(v_hat) + cfg.epsilon)


def batch_loss_and_grads(model: SnoreModel, feats: np.ndarray, labels: np.ndarray):
    """Mean BCE over the batch plus per-parameter gradient dict."""
    probs = softmax(model.forward_logits(feats))
    p = probs[:, 1]
    y = labels.astype(np.float64)
    loss = float(np.mean(
        -(y * np.log(np.maximum(p, LOG_EPS))
          + (1 - y) * np.log(np.maximum(1 - p, LOG_EPS)))
    ))
    # d loss / d logits for BCE through the 2-way softmax: (y-p, p-y) / B
    g = (p - y) / len(y)
    model.backward(np.stack([-g, g], axis=1))
    grads = {}
    for lname, layer in model.param_layers():
        grads[f"{lname}.w"] = layer.gw
        grads[f"{lname}.b"] = layer.gb
    return loss, grads


def train_step(model: SnoreModel, batch, cfg: TrainConfig, opt_state: AdamState) -> float:
    """One Adam step on a batch of (features, label); returns the batch loss."""
    if not batch:
        raise EmptyInputError("train_step on empty batch")
    feats = np.stack([np.asarray(getattr(f, "coeffs", f), dtype=np.float64)
                      for f, _ in batch])
    labels = np.array([y for _, y in batch])
    loss, grads = batch_loss_and_grads(model, feats, labels)
    if not np.isfinite(loss):
        raise TrainingDivergedError(f"loss is {loss}")
    adam_update(opt_state, cfg, grads, dict(model.parameters()))
    return loss


def train(model: SnoreModel, samples, cfg: TrainConfig, progress=None) -> list[float]:
    """Full training loop; shuffles per epoch with a seed+epoch PRNG stream.

    Returns per-epoch mean losses.
    """
    if not samples:
        raise EmptyInputError("train on empty dataset")
    opt = AdamState()
    history = []
    for epoch in range(cfg.max_epochs):
        order = list(range(len(samples)))
        SplitMix64(cfg.seed + epoch).shuffle(order)
        losses = []
        for start in range(0, len(order), cfg.batch_size):
            batch = [samples[i] for i in order[start:start + cfg.batch_size]]
            losses.append(train_step(model, batch, cfg, opt))
        history.append(float(np.mean(losses)))
        if progress:
            progress(epoch, history[-1])
    return history


def gradient_check(model: SnoreModel, sample, n_params: int = 200,
                   h: float = 1e-4, seed: int = 0, grad_transform=None) -> float:
    """Max relative error of analytic vs central-finite-difference gradients.

    `grad_transform` lets tests corrupt the analytic gradients to prove the
    check can fail.
    """
    features, label = sample
    feats = np.asarray(getattr(features, "coeffs", features), dtype=np.float64)[None]
    labels = np.array([label])
    _, grads = batch_loss_and_grads(model, feats, labels)
    grads = {k: v.copy() for k, v in grads.items()}
    if grad_transform:
        grads = grad_transform(grads)

    params = dict(model.parameters())
    flat_index = [(name, i) for name, arr in params.items() for i in range(arr.size)]
    rng = SplitMix64(seed)
    picks = set()
    while len(picks) < min(n_params, len(flat_index)):
        picks.add(rng.below(len(flat_index)))

    def loss_only():
        probs = softmax(model.forward_logits(feats))
        p = probs[0, 1]
        y = float(label)
        return -(y * np.log(max(p, LOG_EPS)) + (1 - y) * np.log(max(1 - p, LOG_EPS)))

    max_rel = 0.0
    for k in picks:
        name, i = flat_index[k]
        arr = params[name]
        orig = arr.flat[i]
        arr.flat[i] = orig + h
        lp = loss_only()
        arr.flat[i] = orig - h
        lm = loss_only()
        arr.flat[i] = orig
        numeric = (lp - lm) / (2 * h)
        analytic = grads[name].flat[i]
        rel = abs(analytic - numeric) / max(abs(analytic) + abs(numeric), 1e-6)
        max_rel = max(max_rel, rel)
    return max_rel
