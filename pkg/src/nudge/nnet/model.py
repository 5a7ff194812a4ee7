"""The snore classifier: architecture, init, forward pass, serialization.

Fixed stack for the default (98, 13) feature input:
Conv(1->8, 3x3, pad 1) - ReLU - MaxPool2 - Conv(8->16) - ReLU - MaxPool2 -
Flatten - Dense(->64) - ReLU - Dense(->2) - Softmax, i.e. spatial sizes
(98,13) -> (49,6) -> (24,3), flatten 1152. Reduced variants (fewer channels,
smaller input) exist only so gradient checks stay fast.
"""

import json
import os

import numpy as np

from ..errors import CorruptModelError, DimensionError, EmptyInputError, UnsupportedFormatError
from .layers import Conv2D, Dense, Flatten, MaxPool2x2, ReLU, softmax
from .rng import SplitMix64

FORMAT_VERSION = "snorenet-v1"

DEFAULT_ARCH = {"input_hw": [98, 13], "conv1": 8, "conv2": 16, "dense": 64}


class SnoreModel:
    def __init__(self, arch: dict | None = None):
        self.arch = dict(arch or DEFAULT_ARCH)
        h, w = self.arch["input_hw"]
        c1, c2, d = self.arch["conv1"], self.arch["conv2"], self.arch["dense"]
        flat = c2 * (h // 4) * (w // 4)
        self.layers = [
            Conv2D(1, c1),
            ReLU(),
            MaxPool2x2(),
            Conv2D(c1, c2),
            ReLU(),
            MaxPool2x2(),
            Flatten(),
            Dense(flat, d),
            ReLU(),
            Dense(d, 2),
        ]

    @property
    def input_hw(self):
        return tuple(self.arch["input_hw"])

    def param_layers(self):
        return [(f"layer{i}", l) for i, l in enumerate(self.layers) if l.params()]

    def parameters(self):
        """Flat (name, array) list in layer order."""
        out = []
        for lname, layer in self.param_layers():
            for pname, arr in layer.params():
                out.append((f"{lname}.{pname}", arr))
        return out

    def forward_logits(self, features_batch: np.ndarray) -> np.ndarray:
        """(B, H, W) feature batch -> (B, 2) logits."""
        h, w = self.input_hw
        if features_batch.shape[1:] != (h, w):
            raise DimensionError(
                f"expected features of shape (*, {h}, {w}), got {features_batch.shape}"
            )
        x = features_batch[:, None, :, :]
        for layer in self.layers:
            x = layer.forward(x)
        return x

    def backward(self, grad_logits: np.ndarray) -> None:
        g = grad_logits
        for layer in reversed(self.layers):
            g = layer.backward(g)


def init_weights(seed: int, arch: dict | None = None) -> SnoreModel:
    """Deterministic uniform +/-sqrt(6/(fan_in+fan_out)) init, zero biases.

    One splitmix64 stream seeded with `seed`; weights drawn layer by layer
    in network order, row-major within each array.
    """
    model = SnoreModel(arch)
    rng = SplitMix64(seed)
    for _, layer in model.param_layers():
        if isinstance(layer, Conv2D):
            k = layer.kernel
            fan_in, fan_out = layer.in_ch * k * k, layer.out_ch * k * k
        else:
            fan_in, fan_out = layer.n_in, layer.n_out
        limit = np.sqrt(6.0 / (fan_in + fan_out))
        flat = np.array([rng.uniform() for _ in range(layer.w.size)])
        layer.w = ((flat * 2.0 - 1.0) * limit).reshape(layer.w.shape)
        # biases stay zero
    return model


def forward(model: SnoreModel, features) -> tuple[float, float]:
    """Class probabilities (p_non_snore, p_snore) for one feature matrix."""
    coeffs = getattr(features, "coeffs", features)
    probs = softmax(model.forward_logits(np.asarray(coeffs, dtype=np.float64)[None]))
    return float(probs[0, 0]), float(probs[0, 1])


def forward_batch(model: SnoreModel, features_batch: np.ndarray) -> np.ndarray:
    return softmax(model.forward_logits(features_batch))


def save_model(model: SnoreModel, path) -> None:
    doc = {
        "version": FORMAT_VERSION,
        "arch": model.arch,
        "weights": {name: arr.ravel().tolist() for name, arr in model.parameters()},
    }
    tmp = f"{path}.tmp"
    with open(tmp, "w") as f:
        json.dump(doc, f)
    os.replace(tmp, path)


def load_model(path) -> SnoreModel:
    try:
        with open(path) as f:
            doc = json.load(f)
    except (json.JSONDecodeError, UnicodeDecodeError) as e:
        raise CorruptModelError(f"model file {path} is not readable: {e}") from e
    if not isinstance(doc, dict) or "version" not in doc:
        raise CorruptModelError(f"model file {path} has no version field")
    if doc["version"] != FORMAT_VERSION:
        raise UnsupportedFormatError(
            f"model version {doc['version']!r}, expected {FORMAT_VERSION!r}"
        )
    model = SnoreModel(doc["arch"])
    weights = doc["weights"]
    for name, arr in model.parameters():
        if name not in weights:
            raise CorruptModelError(f"model file missing weights for {name}")
        flat = np.array(weights[name], dtype=np.float64)
        if flat.size != arr.size:
            raise CorruptModelError(
                f"{name}: expected {arr.size} values, got {flat.size}"
            )
        if not np.all(np.isfinite(flat)):
            raise CorruptModelError(f"{name}: non-finite weights")
        arr[...] = flat.reshape(arr.shape)
    return model


def evaluate(model: SnoreModel, dataset) -> float:
    """Accuracy over (features, label) pairs; argmax prediction, ties -> snore."""
    items = list(dataset)
    if not items:
        raise EmptyInputError("evaluate on empty dataset")
    correct = 0
    for features, label in items:
        _, p_snore = forward(model, features)
        pred = 1 if p_snore >= 0.5 else 0
        correct += int(pred == label)
    return correct / len(items)
