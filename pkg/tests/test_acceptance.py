"""Acceptance suite: one checked, printed pass/fail line per criterion.

These tests pin the behaviors the package is accepted against, each with
its stated tolerance and runtime budget.  They deliberately recompute
expectations through independent routes (exhaustive sweeps, finite
differences, brute-force recounts) rather than through the library calls
under test.
"""

import itertools
import json
import math
import statistics
import time
from pathlib import Path

import numpy as np
import pytest

from motioncodes import (
    COMPONENT_SIZES,
    HeadParams,
    InvalidDoFError,
    InvalidInteractionError,
    MODALITIES,
    ModelConfig,
    PredictorModel,
    TrainConfig,
    cli,
    default_codebook,
    enumerate_all,
    evaluate,
    format_code,
    from_bits,
    fuse,
    gradient,
    inject_noun_noise,
    loss,
    parse_code,
    predict,
    synth_dataset,
    to_bits,
    to_classes,
    train,
    within_k_accuracy,
)

README = Path(__file__).resolve().parents[1] / "README.md"


def report(num, name, ok, detail=""):
    status = "PASS" if ok else "FAIL"
    suffix = f" ({detail})" if detail else ""
    line = f"criterion {num:2d} [{name}]: {status}{suffix}"
    print(line)
    assert ok, line


def book_codes():
    return [entry.code for entry in default_codebook().entries]


def test_criterion_01_enumeration():
    start = time.perf_counter()
    codes = enumerate_all()
    accepted = 0
    rejected = 0
    for bits in itertools.product("01", repeat=9):
        try:
            from_bits("".join(bits))
        except (InvalidInteractionError, InvalidDoFError):
            rejected += 1
        else:
            accepted += 1
    elapsed = time.perf_counter() - start
    ok = len(codes) == 180 and accepted == 180 and rejected == 332 and elapsed < 1.0
    report(1, "enumeration", ok,
           f"{len(codes)} enumerated, {accepted}/{rejected} split, {elapsed:.2f}s")


def test_criterion_02_round_trips():
    start = time.perf_counter()
    codes = enumerate_all()
    parse_ok = all(parse_code(format_code(c)) == c for c in codes)
    bits_ok = all(from_bits(to_bits(c)) == c for c in codes)
    tuples = [tuple(to_classes(c)) for c in codes]
    bijection_ok = (len(set(tuples)) == 180
                    and all(parse_code(format_code(c)) == c for c in codes))
    from motioncodes import from_classes
    inverse_ok = all(from_classes(to_classes(c)) == c for c in codes)
    elapsed = time.perf_counter() - start
    ok = parse_ok and bits_ok and bijection_ok and inverse_ok and elapsed < 1.0
    report(2, "round trips", ok, f"{elapsed:.2f}s")


def test_criterion_03_codebook_fidelity():
    book = default_codebook()
    rows_ok = len(book) == 20
    lookups = {
        "pour": "000-0-00-01-0",
        "mix": "111-1-11-00-0",
        "open": "101-0-11-00-1",
    }
    lookups_ok = all(
        [format_code(c) for c, _ in book.codes_for(verb)] == [code]
        for verb, code in lookups.items())
    nearest = book.nearest_verbs(parse_code("101-0-11-00-0"), k=49)
    open_close = {(label, d) for label, code, d in nearest
                  if format_code(code) == "101-0-11-00-1"}
    nearest_ok = open_close == {("open", 1), ("close", 1)}
    ok = rows_ok and lookups_ok and nearest_ok
    report(3, "codebook fidelity", ok)


def test_criterion_04_wizard_fidelity(tmp_path, capsys):
    answers = tmp_path / "answers.txt"
    answers.write_text("y\nrigid\ncontinuous\nacyclic\n1\n1\nn\n")
    code = cli.main(["wizard", "--answers", str(answers)])
    out = capsys.readouterr().out.splitlines()
    ok = code == 0 and out and out[0] == "101-0-01-01-0"
    report(4, "wizard fidelity", ok, out[0] if out else "no output")


def _fd_gradient(model, batch, modality, step=1e-5):
    grads = []
    for h in range(len(COMPONENT_SIZES)):
        base = model.heads[modality][h]
        grad_w = np.zeros_like(base.weights)
        for idx in np.ndindex(base.weights.shape):
            plus = model.copy()
            plus.heads[modality][h].weights[idx] += step
            minus = model.copy()
            minus.heads[modality][h].weights[idx] -= step
            grad_w[idx] = (loss(plus, batch, modality)
                           - loss(minus, batch, modality)) / (2 * step)
        grad_b = np.zeros_like(base.bias)
        for i in range(base.bias.size):
            plus = model.copy()
            plus.heads[modality][h].bias[i] += step
            minus = model.copy()
            minus.heads[modality][h].bias[i] -= step
            grad_b[i] = (loss(plus, batch, modality)
                         - loss(minus, batch, modality)) / (2 * step)
        grads.append(HeadParams(grad_w, grad_b))
    return grads


def test_criterion_05_gradient_oracle():
    start = time.perf_counter()
    codes = enumerate_all()
    worst = 0.0
    for seed in range(20):
        rng = np.random.default_rng(seed)
        d = int(rng.integers(4, 9))
        config = ModelConfig(
            d_v=d,
            lambdas=rng.uniform(0.2, 2.0, size=5),
            weight_decay=float(rng.uniform(0.0, 0.1)),
            seed=seed,
        )
        heads = {
            modality: [
                HeadParams(rng.standard_normal((k, d)), rng.standard_normal(k))
                for k in COMPONENT_SIZES
            ]
            for modality in MODALITIES
        }
        model = PredictorModel(config, heads)
        batch = [
            (rng.standard_normal(d), to_classes(codes[rng.integers(len(codes))]))
            for _ in range(int(rng.integers(1, 5)))
        ]
        modality = MODALITIES[seed % 2]
        analytic = gradient(model, batch, modality)
        numeric = _fd_gradient(model, batch, modality)
        for a, f in zip(analytic, numeric):
            for x, y in ((a.weights, f.weights), (a.bias, f.bias)):
                err = np.abs(x - y) / np.maximum(np.abs(y), 1e-6)
                worst = max(worst, float(err.max()))
    elapsed = time.perf_counter() - start
    ok = worst <= 1e-4 and elapsed < 30.0
    report(5, "gradient oracle", ok, f"max rel err {worst:.2e}, {elapsed:.1f}s")


def test_criterion_06_loss_anchor():
    anchor = (math.log(5) + math.log(2) + math.log(3) + math.log(3)
              + math.log(2))
    model = PredictorModel.zeros(ModelConfig(d_v=10, weight_decay=0.0))
    rng = np.random.default_rng(6)
    errors = []
    for code in (enumerate_all()[0], enumerate_all()[97]):
        batch = [(rng.standard_normal(10), to_classes(code))]
        for modality in MODALITIES:
            errors.append(abs(loss(model, batch, modality) - anchor))
    ok = max(errors) < 1e-6 and abs(anchor - 5.19295685089021) < 1e-11
    report(6, "loss anchor", ok, f"max deviation {max(errors):.2e}")


def test_criterion_07_synthetic_learnability():
    start = time.perf_counter()
    codes = book_codes()
    dataset, _ = synth_dataset(codes, 1200, d_v=64, sigma=0.1, seed=0)
    train_set, test_set = dataset[:1000], dataset[1000:]
    model = PredictorModel.initialized(ModelConfig(d_v=64, seed=0))
    config = TrainConfig(epochs=50, base_lr=3e-4, decay_factor=0.6,
                         decay_every=5, seed=0)
    trained, _ = train(model, train_set, config=config)
    pairs = [(predict(trained, r).fused_code, r.label) for r in test_set]
    result = evaluate(pairs)
    elapsed = time.perf_counter() - start
    ok = (len(codes) == 20
          and result.exact_accuracy >= 0.95
          and result.within_1_bit_accuracy >= 0.99
          and elapsed < 60.0)
    report(7, "synthetic learnability", ok,
           f"exact {result.exact_accuracy:.3f}, within-1 "
           f"{result.within_1_bit_accuracy:.3f}, {elapsed:.1f}s")


def test_criterion_08_metric_oracle():
    codes = enumerate_all()
    rng = np.random.default_rng(8)
    idx = rng.integers(0, len(codes), size=(1000, 2))
    pairs = [(codes[i], codes[j]) for i, j in idx]
    result = evaluate(pairs)

    def bit_distance(a, b):
        return bin(int(to_bits(a), 2) ^ int(to_bits(b), 2)).count("1")

    exact = sum(1 for p, t in pairs if bit_distance(p, t) == 0)
    within = sum(1 for p, t in pairs if bit_distance(p, t) <= 1)
    counts_ok = result.exact_count == exact and result.within_1_count == within
    curve = [within_k_accuracy(pairs, k) for k in range(10)]
    monotone_ok = all(a <= b for a, b in zip(curve, curve[1:])) and curve[9] == 1.0
    ok = counts_ok and monotone_ok
    report(8, "metric oracle", ok,
           f"exact {exact}, within-1 {within}, curve {curve[0]:.3f}->{curve[9]:.3f}")


def test_criterion_09_fusion_properties():
    rng = np.random.default_rng(9)
    identity_ok = True
    commutative_ok = True
    for _ in range(100):
        a = [rng.dirichlet(np.ones(k)) for k in COMPONENT_SIZES]
        b = [rng.dirichlet(np.ones(k)) for k in COMPONENT_SIZES]
        for x, y in zip(fuse(a, a), a):
            identity_ok = identity_ok and np.allclose(x, y)
        for x, y in zip(fuse(a, b), fuse(b, a)):
            commutative_ok = commutative_ok and np.allclose(x, y)

    model = PredictorModel.initialized(ModelConfig(d_v=6, seed=9))
    for src, dst in zip(model.heads["rgb"], model.heads["flow"]):
        dst.weights[...] = src.weights
        dst.bias[...] = src.bias
    from motioncodes import FeatureRecord
    agree_ok = True
    for i in range(10):
        xi = rng.standard_normal(6)
        record = FeatureRecord(f"a{i}", xi, xi)
        result = predict(model, record)
        agree_ok = agree_ok and (result.fused_code == result.rgb_code
                                 == result.flow_code)
    ok = identity_ok and commutative_ok and agree_ok
    report(9, "fusion properties", ok)


def test_criterion_10_noun_trend():
    start = time.perf_counter()
    codes = book_codes()

    def run(dataset, table, use_nouns, seed):
        train_set, test_set = dataset[:1000], dataset[1000:]
        config = ModelConfig(d_v=64, d_n=table.dimension if use_nouns else 0,
                             use_nouns=use_nouns, seed=seed)
        model = PredictorModel.initialized(config)
        trained, _ = train(model, train_set, table, TrainConfig(seed=seed))
        pairs = [(predict(trained, r, table).fused_code, r.label)
                 for r in test_set]
        return evaluate(pairs).exact_accuracy

    accuracy = {"none": [], "noisy": [], "clean": []}
    for seed in range(5):
        dataset, table = synth_dataset(codes, 1200, d_v=64, sigma=0.8, seed=seed)
        noisy = inject_noun_noise(dataset, 0.2, table.tokens(), seed=seed)
        accuracy["none"].append(run(dataset, table, False, seed))
        accuracy["noisy"].append(run(noisy, table, True, seed))
        accuracy["clean"].append(run(dataset, table, True, seed))
    median = {k: statistics.median(v) for k, v in accuracy.items()}
    elapsed = time.perf_counter() - start
    ok = (median["none"] <= median["noisy"] <= median["clean"]
          and median["none"] < median["clean"]
          and elapsed < 300.0)
    report(10, "noun trend", ok,
           f"none {median['none']:.3f} <= noisy {median['noisy']:.3f} "
           f"<= clean {median['clean']:.3f}, {elapsed:.0f}s")


def test_criterion_11_non_reproducible_claims_stated():
    text = README.read_text(encoding="utf-8")
    needles = ("38.9", "48.0", "EPIC-KITCHENS", "I3D", "not reproduced")
    missing = [n for n in needles if n not in text]
    ok = not missing and "acceptance" in text.lower()
    report(11, "non-reproducible claims stated", ok,
           f"missing {missing}" if missing else "all statements present")
