"""Per-class generator networks trained through a frozen blackbox.

Each class gets its own generator mapping uniform noise to a record in
[-1, 1]^features (tanh head).  Training composes generator and blackbox:
the loss is cross-entropy against a soft one-hot target, the blackbox
weights are never touched, and the gradient arriving at the blackbox's
input layer becomes the gradient at the generator's output layer.
"""

from __future__ import annotations

import time
from dataclasses import dataclass, field

import numpy as np

from . import netcore
from .netcore import DenseLayer, Mlp, TrainConfig, make_mlp
from .oracle import GradientUnavailableError, top_class


@dataclass
class GeneratorConfig:
    noise_size: int | None = None  # defaults to the blackbox feature count
    hidden: list | None = None  # defaults to [2 * feature_count]
    epochs: int = 2000
    batch_size: int = 64
    learning_rate: float = 0.005
    rng_seed: int = 0
    soft_target: float = 0.99

    def __post_init__(self):
        if not 0.0 < self.soft_target <= 1.0:
            raise ValueError("soft_target must lie in (0, 1]")
        if self.epochs < 0 or self.batch_size < 1 or self.learning_rate <= 0:
            raise ValueError("bad generator training parameters")


@dataclass
class Generator:
    body: Mlp  # noise_size -> ... -> feature_count, tanh head
    class_index: int
    noise_size: int

    def sample(self, n, rng):
        """n records in [-1, 1]^features from fresh uniform noise."""
        if n == 0:
            return np.empty((0, self.body.out_dim))
        noise = rng.uniform(-1.0, 1.0, size=(n, self.noise_size))
        return self.body.forward_batch(noise)


def make_target(class_index, num_class, soft_target=0.99):
    """The regression target of generator training: zeros with soft_target
    at the wanted class.  Deliberately not normalised."""
    if not 0 <= class_index < num_class:
        raise ValueError(f"class index {class_index} out of range for {num_class} classes")
    out = np.zeros(num_class)
    out[class_index] = soft_target
    return out


def _require_gradients(blackbox):
    if not getattr(blackbox, "supports_gradient", False):
        raise GradientUnavailableError(
            "gradient-free oracle cannot train a generator; use an "
            "in-process oracle"
        )


def _make_generator_body(cfg, feature_count, rng):
    noise = cfg.noise_size if cfg.noise_size is not None else feature_count
    hidden = cfg.hidden if cfg.hidden is not None else [2 * feature_count]
    dims = [noise, *hidden, feature_count]
    acts = ["relu"] * len(hidden) + ["tanh"]
    return make_mlp(dims, acts, rng), noise


def train_generator(blackbox, class_index, cfg):
    """Train one generator for class_index; returns (Generator, loss history).

    The blackbox only ever runs forward passes and an input-gradient
    computation; its weights are bit-identical before and after.
    """
    _require_gradients(blackbox)
    if not 0 <= class_index < blackbox.class_count:
        raise ValueError(f"class index {class_index} out of range")
    rng = np.random.default_rng(cfg.rng_seed)
    body, noise_size = _make_generator_body(cfg, blackbox.feature_count, rng)
    bb_net = blackbox.net
    target = make_target(class_index, blackbox.class_count, cfg.soft_target)
    opt = TrainConfig(
        learning_rate=cfg.learning_rate, epochs=1, batch_size=cfg.batch_size,
        optimizer="adam", rng_seed=cfg.rng_seed,
    )
    state = netcore._AdamState(body)
    history = []
    for _ in range(cfg.epochs):
        noise = rng.uniform(-1.0, 1.0, size=(cfg.batch_size, noise_size))
        T = np.tile(target, (cfg.batch_size, 1))
        gen_inputs, gen_outputs = netcore._forward_trace(body, noise)
        X = gen_outputs[-1]
        bb_inputs, bb_outputs = netcore._forward_trace(bb_net, X)
        P = bb_outputs[-1]
        total = float(-np.sum(T * np.log(np.clip(P, netcore.PROB_CLAMP, None))))
        if not np.isfinite(total):
            raise netcore.TrainingError("non-finite generator loss")
        grad_out = netcore._loss_grad_at_output(bb_net, bb_outputs, T)
        input_grad, _ = netcore._backward(bb_net, bb_inputs, bb_outputs, grad_out)
        _, gen_grads = netcore._backward(body, gen_inputs, gen_outputs, input_grad)
        gen_grads = [(dW / cfg.batch_size, db / cfg.batch_size) for dW, db in gen_grads]
        netcore.apply_gradients(body, gen_grads, opt, state)
        history.append(total / cfg.batch_size)
    return Generator(body, class_index, noise_size), history


def generate(gen, blackbox, n, rng):
    """Sample n records from a trained generator, labeled with the
    generator's class and tagged with blackbox confidence for it.

    Returns (records, confidences, seconds_per_record).
    """
    t0 = time.perf_counter()
    records = gen.sample(n, rng)
    dt = time.perf_counter() - t0
    if n == 0:
        return records, np.empty(0), 0.0
    probs = blackbox.classify_batch(records)
    confs = probs[:, gen.class_index]
    return records, confs, dt / n


def train_all_generators(blackbox, cfg, ensembles_per_class=1):
    """One or more independently seeded generators per class.

    Returns {class_index: [Generator, ...]}.
    """
    _require_gradients(blackbox)
    if ensembles_per_class < 1:
        raise ValueError("ensembles_per_class must be >= 1")
    out = {}
    for c in range(blackbox.class_count):
        gens = []
        for e in range(ensembles_per_class):
            seed = int(
                np.random.SeedSequence([cfg.rng_seed, c, e]).generate_state(1)[0]
            )
            sub = GeneratorConfig(**{**cfg.__dict__, "rng_seed": seed})
            gen, _ = train_generator(blackbox, c, sub)
            gens.append(gen)
        out[c] = gens
    return out


def sample_pooled(generators, blackbox, n_per_class, seed, conf_min=None):
    """Sample the data view from trained generators, pooled over ensembles.

    Records failing the optional conf_min filter (argmax or confidence)
    are dropped; returns (records, labels, confidences, n_filtered,
    seconds_per_record).
    """
    records, labels, confs, times = [], [], [], []
    filtered = 0
    for c, gens in sorted(generators.items()):
        per_gen = [n_per_class // len(gens)] * len(gens)
        for i in range(n_per_class % len(gens)):
            per_gen[i] += 1
        for e, (gen, n) in enumerate(zip(gens, per_gen)):
            rng = np.random.default_rng([seed, c, e])
            recs, cf, spr = generate(gen, blackbox, n, rng)
            if conf_min is not None and len(recs):
                probs = blackbox.classify_batch(recs)
                keep = (np.argmax(probs, axis=1) == c) & (cf >= conf_min)
                filtered += int((~keep).sum())
                recs, cf = recs[keep], cf[keep]
            records.append(recs)
            confs.append(cf)
            labels.append(np.full(len(recs), c, dtype=int))
            times.append(spr)
    records = np.concatenate(records) if records else np.empty((0, 0))
    return (
        records,
        np.concatenate(labels) if labels else np.empty(0, dtype=int),
        np.concatenate(confs) if confs else np.empty(0),
        filtered,
        float(np.mean(times)) if times else 0.0,
    )


def serialize_generator(gen):
    """netcore model format plus class / noise_size header fields."""
    return (
        f"generator class {gen.class_index} noise_size {gen.noise_size}\n"
        + netcore.serialize(gen.body)
    )


def deserialize_generator(blob):
    if isinstance(blob, bytes):
        blob = blob.decode("utf-8")
    head, _, rest = blob.partition("\n")
    parts = head.split()
    if (
        len(parts) != 5
        or parts[0] != "generator"
        or parts[1] != "class"
        or parts[3] != "noise_size"
    ):
        raise netcore.ModelFormatError("not a generator blob", 0)
    body = netcore.deserialize(rest)
    return Generator(body, int(parts[2]), int(parts[4]))
