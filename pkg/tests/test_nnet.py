import numpy as np
import pytest

from nudge.errors import (
    CorruptModelError,
    DimensionError,
    EmptyInputError,
    UnsupportedFormatError,
)
from nudge.nnet import (
    AdamState,
    SnoreModel,
    TrainConfig,
    evaluate,
    forward,
    forward_batch,
    gradient_check,
    init_weights,
    load_model,
    save_model,
    train,
    train_step,
)
from nudge.nnet.layers import softmax
from nudge.nnet.train import adam_update

from conftest import SMALL_ARCH

# Frozen at first build from the documented PRNG recipe:
# splitmix64(42) first uniform, mapped to +/-sqrt(6/(9+72)).
GOLDEN_FIRST_CONV_WEIGHT_SEED42 = 0.13149126505960956


def naive_forward(model, feat):
    """Nested-loop re-implementation of the forward pass (the oracle)."""
    h, w = model.input_hw
    x = [feat.tolist()]  # channels x H x W
    for layer in model.layers:
        name = type(layer).__name__
        if name == "Conv2D":
            out = []
            for o in range(layer.out_ch):
                plane = [[0.0] * len(x[0][0]) for _ in range(len(x[0]))]
                for r in range(len(plane)):
                    for c in range(len(plane[0])):
                        acc = layer.b[o]
                        for ic in range(len(x)):
                            for dr in range(3):
                                for dc in range(3):
                                    rr, cc = r + dr - 1, c + dc - 1
                                    if 0 <= rr < len(plane) and 0 <= cc < len(plane[0]):
                                        acc += layer.w[o][ic][dr][dc] * x[ic][rr][cc]
                        plane[r][c] = acc
                out.append(plane)
            x = out
        elif name == "ReLU":
            if isinstance(x[0], list):
                x = [[[max(0.0, v) for v in row] for row in plane] for plane in x]
            else:
                x = [max(0.0, v) for v in x]
        elif name == "MaxPool2x2":
            out = []
            for plane in x:
                oh, ow = len(plane) // 2, len(plane[0]) // 2
                out.append([
                    [max(plane[2 * r][2 * c], plane[2 * r][2 * c + 1],
                         plane[2 * r + 1][2 * c], plane[2 * r + 1][2 * c + 1])
                     for c in range(ow)]
                    for r in range(oh)
                ])
            x = out
        elif name == "Flatten":
            x = [v for plane in x for row in plane for v in row]
        elif name == "Dense":
            x = [sum(layer.w[o][i] * x[i] for i in range(len(x))) + layer.b[o]
                 for o in range(layer.n_out)]
    z = np.array(x)
    e = np.exp(z - z.max())
    return e / e.sum()


@pytest.fixture
def small_model(rng):
    model = init_weights(7, SMALL_ARCH)
    return model


@pytest.fixture
def small_sample(rng):
    return rng.standard_normal(SMALL_ARCH["input_hw"]), 1


# --- init ----------------------------------------------------------------

def test_init_deterministic():
    a, b = init_weights(5), init_weights(5)
    for (na, pa), (nb, pb) in zip(a.parameters(), b.parameters()):
        assert na == nb
        assert np.array_equal(pa, pb)


def test_init_biases_zero():
    model = init_weights(5)
    for name, arr in model.parameters():
        if name.endswith(".b"):
            assert np.all(arr == 0)


def test_init_golden_value():
    assert init_weights(42).layers[0].w.flat[0] == GOLDEN_FIRST_CONV_WEIGHT_SEED42


def test_init_within_bounds():
    model = init_weights(3)
    conv1 = model.layers[0]
    limit = np.sqrt(6 / (9 + 8 * 9))
    assert np.all(np.abs(conv1.w) <= limit)


# --- forward -------------------------------------------------------------

def test_forward_zero_weights_is_uniform(rng):
    model = SnoreModel()  # all weights zero
    p0, p1 = forward(model, rng.standard_normal((98, 13)))
    assert (p0, p1) == (0.5, 0.5)


def test_softmax_equal_logits():
    np.testing.assert_array_equal(softmax(np.array([[0.0, 0.0]])), [[0.5, 0.5]])


def test_softmax_properties(rng):
    probs = softmax(rng.standard_normal((20, 2)) * 10)
    assert np.all(probs > 0) and np.all(probs < 1)
    np.testing.assert_allclose(probs.sum(axis=1), 1.0, atol=1e-6)


def test_forward_shape_mismatch():
    with pytest.raises(DimensionError):
        forward(init_weights(0), np.zeros((97, 13)))


def test_forward_matches_nested_loop_oracle(small_model, rng):
    feat = rng.standard_normal(SMALL_ARCH["input_hw"])
    got = np.array(forward(small_model, feat))
    want = naive_forward(small_model, feat)
    np.testing.assert_allclose(got, want, atol=1e-6)


# --- Adam ----------------------------------------------------------------

def test_adam_single_scalar_step():
    cfg = TrainConfig()
    state = AdamState()
    w = np.array([0.0])
    adam_update(state, cfg, {"w": np.array([1.0])}, {"w": w})
    assert w[0] == pytest.approx(-0.001 / (1 + 1e-8), rel=1e-12)


def test_adam_bias_correction_second_step():
    cfg = TrainConfig()
    state = AdamState()
    w = np.array([0.0])
    for _ in range(2):
        adam_update(state, cfg, {"w": np.array([1.0])}, {"w": w})
    # constant gradients: m_hat = v_hat = 1 each step
    assert w[0] == pytest.approx(-2 * 0.001 / (1 + 1e-8), rel=1e-9)


# --- train_step ----------------------------------------------------------

def test_train_step_perfect_model_small_loss(small_model, rng):
    # drive the model to saturated correct outputs, then check near-zero loss
    feats = [(rng.standard_normal(SMALL_ARCH["input_hw"]), 1)]
    cfg = TrainConfig(lr=0.05, max_epochs=1)
    opt = AdamState()
    for _ in range(400):
        loss = train_step(small_model, feats, cfg, opt)
    before = {n: a.copy() for n, a in small_model.parameters()}
    loss = train_step(small_model, feats, cfg, opt)
    assert loss <= 1e-10
    for name, arr in small_model.parameters():
        assert np.max(np.abs(arr - before[name])) <= cfg.lr + 1e-12


def test_train_step_deterministic(rng):
    feats = [(rng.standard_normal(SMALL_ARCH["input_hw"]), i % 2) for i in range(8)]
    results = []
    for _ in range(2):
        model = init_weights(3, SMALL_ARCH)
        opt = AdamState()
        loss = train_step(model, feats, TrainConfig(), opt)
        results.append((loss, {n: a.copy() for n, a in model.parameters()}))
    assert results[0][0] == results[1][0]
    for name in results[0][1]:
        assert np.array_equal(results[0][1][name], results[1][1][name])


def test_train_step_empty_batch(small_model):
    with pytest.raises(EmptyInputError):
        train_step(small_model, [], TrainConfig(), AdamState())


def test_training_loss_non_increasing_overall(rng):
    feats = [(rng.standard_normal(SMALL_ARCH["input_hw"]) + (2.0 if i % 2 else -2.0),
              i % 2) for i in range(64)]
    model = init_weights(11, SMALL_ARCH)
    opt = AdamState()
    cfg = TrainConfig(batch_size=64)
    losses = [train_step(model, feats, cfg, opt) for _ in range(50)]
    increases = sum(max(0.0, b - a) for a, b in zip(losses, losses[1:]))
    assert increases <= 0.05
    assert losses[-1] < losses[0]


def test_full_training_run_reproducible(rng):
    feats = [(rng.standard_normal(SMALL_ARCH["input_hw"]), i % 2) for i in range(20)]
    weights = []
    for _ in range(2):
        model = init_weights(9, SMALL_ARCH)
        train(model, feats, TrainConfig(max_epochs=2, seed=4, batch_size=4))
        weights.append({n: a.copy() for n, a in model.parameters()})
    for name in weights[0]:
        assert np.array_equal(weights[0][name], weights[1][name])


# --- gradient check ------------------------------------------------------

def test_gradient_check_passes(small_model, small_sample):
    assert gradient_check(small_model, small_sample, n_params=200) < 1e-4


def test_gradient_check_catches_sign_flip(small_model, small_sample):
    def flip_conv(grads):
        return {k: (-v if "layer0" in k else v) for k, v in grads.items()}
    err = gradient_check(small_model, small_sample, n_params=200,
                         grad_transform=flip_conv)
    assert err > 0.1


def test_gradient_zero_model_closed_form(rng):
    # zero weights, zero input: p = 0.5, final dense bias gradient = [y-p, p-y]
    model = SnoreModel(SMALL_ARCH)
    feat = np.zeros(SMALL_ARCH["input_hw"])
    from nudge.nnet.train import batch_loss_and_grads
    _, grads = batch_loss_and_grads(model, feat[None], np.array([1]))
    last = [n for n, _ in model.param_layers()][-1]
    np.testing.assert_allclose(grads[f"{last}.b"], [0.5, -0.5], atol=1e-6)


# --- serialization -------------------------------------------------------

def test_save_load_roundtrip(tmp_path, small_model, rng):
    feat = rng.standard_normal(SMALL_ARCH["input_hw"])
    path = tmp_path / "model.json"
    save_model(small_model, path)
    loaded = load_model(path)
    assert forward(loaded, feat) == forward(small_model, feat)
    for (n1, a1), (n2, a2) in zip(small_model.parameters(), loaded.parameters()):
        assert np.array_equal(a1, a2)


def test_load_wrong_version(tmp_path, small_model):
    path = tmp_path / "model.json"
    save_model(small_model, path)
    doc = path.read_text().replace("snorenet-v1", "snorenet-v0")
    path.write_text(doc)
    with pytest.raises(UnsupportedFormatError):
        load_model(path)


def test_load_truncated(tmp_path, small_model):
    path = tmp_path / "model.json"
    save_model(small_model, path)
    data = path.read_bytes()
    path.write_bytes(data[:len(data) // 2])
    with pytest.raises(CorruptModelError):
        load_model(path)


# --- evaluate ------------------------------------------------------------

def test_evaluate_agreement_and_inversion(small_model, rng):
    feats = [rng.standard_normal(SMALL_ARCH["input_hw"]) for _ in range(20)]
    preds = [1 if forward(small_model, f)[1] >= 0.5 else 0 for f in feats]
    assert evaluate(small_model, list(zip(feats, preds))) == 1.0
    assert evaluate(small_model, [(f, 1 - p) for f, p in zip(feats, preds)]) == 0.0


def test_evaluate_matches_recount(small_model, rng):
    data = [(rng.standard_normal(SMALL_ARCH["input_hw"]), int(rng.integers(2)))
            for _ in range(200)]
    acc = evaluate(small_model, data)
    recount = sum(
        int((forward(small_model, f)[1] >= 0.5) == bool(y)) for f, y in data
    ) / len(data)
    assert acc == recount


def test_evaluate_empty(small_model):
    with pytest.raises(EmptyInputError):
        evaluate(small_model, [])
