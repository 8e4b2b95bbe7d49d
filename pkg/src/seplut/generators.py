"""Context-vector to LUT generators, and constructors for weight bundles.

The 1D generator is a single FC layer squashed through a sigmoid into (0, 1).
The 3D generator is rank-factorized: a K-dimensional bottleneck of mixing
weights followed by an FC layer whose columns are K image-independent basis
LUTs added to a base LUT; its output is left unactivated.
"""

from __future__ import annotations

import numpy as np
from scipy.special import expit, logit

from .core import (
    FLOAT_DTYPE,
    ContextVector,
    Lut1D,
    Lut3D,
    WeightBundle,
    expected_tensor_shapes,
    identity_lut3d,
)
from .errors import ShapeMismatchError

#: Sigmoid targets are clamped away from {0, 1} so logits stay finite. The
#: nominal 1e-4 clamp is tightened by 0.1%: float32 cannot represent 0.9999
#: closer than ~1.7e-8, which would push the top-entry error past 1e-4.
IDENTITY_CLAMP = 1e-4 * 0.999


def _check_vector(e: ContextVector, bundle: WeightBundle) -> np.ndarray:
    v = e.values.astype(np.float64)
    if v.shape[0] != 32 * bundle.m:
        raise ShapeMismatchError(
            f"context vector length {v.shape[0]} != 32*m = {32 * bundle.m}"
        )
    return v


def generate_lut1d(e: ContextVector, bundle: WeightBundle) -> Lut1D:
    """sigmoid(W @ E + b) reshaped to (3, S_o); every entry lies in (0, 1)."""
    v = _check_vector(e, bundle)
    w = bundle.tensor("gen1d.fc.weight").astype(np.float64)
    b = bundle.tensor("gen1d.fc.bias").astype(np.float64)
    if w.shape != (3 * bundle.s_o, v.shape[0]) or b.shape != (3 * bundle.s_o,):
        raise ShapeMismatchError(
            f"1D generator tensors {w.shape}/{b.shape} do not match "
            f"(3*S_o, 32m) = ({3 * bundle.s_o}, {v.shape[0]})"
        )
    y = expit(w @ v + b)
    return Lut1D(y.reshape(3, bundle.s_o).astype(FLOAT_DTYPE))


def generate_lut3d(e: ContextVector, bundle: WeightBundle) -> Lut3D:
    """W2 @ (W1 @ E + b1) + b2 reshaped to (3, S_t, S_t, S_t); unactivated."""
    v = _check_vector(e, bundle)
    s = bundle.s_t
    w1 = bundle.tensor("gen3d.fc1.weight").astype(np.float64)
    b1 = bundle.tensor("gen3d.fc1.bias").astype(np.float64)
    w2 = bundle.tensor("gen3d.fc2.weight").astype(np.float64)
    b2 = bundle.tensor("gen3d.fc2.bias").astype(np.float64)
    if w1.shape != (bundle.k, v.shape[0]) or w2.shape != (3 * s**3, bundle.k):
        raise ShapeMismatchError(
            f"3D generator tensors {w1.shape}/{w2.shape} do not match "
            f"(K, 32m)/(3*S_t^3, K) for K={bundle.k}, S_t={s}"
        )
    mix = w1 @ v + b1
    flat = w2 @ mix + b2
    return Lut3D(flat.reshape(3, s, s, s).astype(FLOAT_DTYPE))


def extract_basis_luts(bundle: WeightBundle) -> tuple[Lut3D, list[Lut3D]]:
    """Decompose the 3D generator into (base LUT, K basis LUTs).

    For any mixing vector w, base + sum_k w[k]*basis[k] reproduces
    generate_lut3d's output.
    """
    s = bundle.s_t
    w2 = bundle.tensor("gen3d.fc2.weight")
    b2 = bundle.tensor("gen3d.fc2.bias")
    if w2.shape != (3 * s**3, bundle.k):
        raise ShapeMismatchError(
            f"gen3d.fc2.weight shape {w2.shape} != (3*S_t^3, K) for S_t={s}, K={bundle.k}"
        )
    base = Lut3D(b2.reshape(3, s, s, s).astype(FLOAT_DTYPE))
    basis = [
        Lut3D(w2[:, k].reshape(3, s, s, s).astype(FLOAT_DTYPE)) for k in range(bundle.k)
    ]
    return base, basis


def is_monotone_lut1d(lut: Lut1D) -> bool:
    """Diagnostic: True when every channel curve is non-decreasing.

    Monotonicity is not enforced on generated LUTs; callers may warn on it.
    """
    return bool(np.all(np.diff(lut.values.astype(np.float64), axis=1) >= 0.0))


def identity_logits(s_o: int) -> np.ndarray:
    """FC bias vector whose sigmoid is the identity ramp (within the clamp)."""
    ramp = np.arange(s_o, dtype=np.float64) / (s_o - 1)
    targets = np.clip(ramp, IDENTITY_CLAMP, 1.0 - IDENTITY_CLAMP)
    return np.tile(logit(targets), 3)


def make_identity_bundle(
    m: int, s_o: int, s_t: int, k: int, leaky_slope: float = 0.2
) -> WeightBundle:
    """Bundle whose generated LUTs are the identity for any input image.

    Generator weights are zero, so the context vector cannot perturb the
    output: the 1D bias encodes the ramp through the sigmoid (exact within
    the 1e-4 clamp) and the 3D bias is the exact identity lattice.
    """
    shapes = expected_tensor_shapes(m, s_o, s_t, k)
    tensors = {name: np.zeros(shape, dtype=FLOAT_DTYPE) for name, shape in shapes.items()}
    for i in range(1, 5):
        tensors[f"backbone.in{i}.gamma"] = np.ones(shapes[f"backbone.in{i}.gamma"], FLOAT_DTYPE)
    tensors["gen1d.fc.bias"] = identity_logits(s_o).astype(FLOAT_DTYPE)
    tensors["gen3d.fc2.bias"] = identity_lut3d(s_t).values.reshape(-1).astype(FLOAT_DTYPE)
    return WeightBundle(m=m, s_o=s_o, s_t=s_t, k=k, leaky_slope=leaky_slope, tensors=tensors)


def make_random_bundle(
    m: int,
    s_o: int,
    s_t: int,
    k: int,
    seed: int,
    leaky_slope: float = 0.2,
    lut_noise: float = 0.05,
) -> WeightBundle:
    """Seeded bundle with training-plausible scales: Xavier-style conv weights
    and generators that perturb smooth near-identity LUTs.

    Used by benchmarks and tests that need realistic non-degenerate weights.
    """
    rng = np.random.default_rng(seed)
    shapes = expected_tensor_shapes(m, s_o, s_t, k)
    tensors: dict[str, np.ndarray] = {}
    for name, shape in shapes.items():
        if name.endswith(".weight") and name.startswith("backbone."):
            fan_in = int(np.prod(shape[1:]))
            std = float(np.sqrt(2.0 / (fan_in + shape[0])))
            tensors[name] = rng.normal(0.0, std, shape).astype(FLOAT_DTYPE)
        elif name.endswith(".gamma"):
            tensors[name] = (1.0 + 0.05 * rng.standard_normal(shape)).astype(FLOAT_DTYPE)
        else:
            tensors[name] = (0.01 * rng.standard_normal(shape)).astype(FLOAT_DTYPE)
    e_dim = 32 * m
    tensors["gen1d.fc.weight"] = (
        lut_noise / np.sqrt(e_dim) * rng.standard_normal(shapes["gen1d.fc.weight"])
    ).astype(FLOAT_DTYPE)
    tensors["gen1d.fc.bias"] = (
        identity_logits(s_o) + lut_noise * rng.standard_normal(3 * s_o)
    ).astype(FLOAT_DTYPE)
    tensors["gen3d.fc1.weight"] = (
        0.15 / np.sqrt(e_dim) * rng.standard_normal(shapes["gen3d.fc1.weight"])
    ).astype(FLOAT_DTYPE)
    tensors["gen3d.fc1.bias"] = rng.normal(0.0, 0.15, k).astype(FLOAT_DTYPE)
    # basis amplitudes and the base offset are kept small enough that the
    # generated 3D LUT stays a valid color table (entries inside [0, 1])
    tensors["gen3d.fc2.weight"] = np.clip(
        0.4 * lut_noise * rng.standard_normal(shapes["gen3d.fc2.weight"]), -0.06, 0.06
    ).astype(FLOAT_DTYPE)
    base = identity_lut3d(s_t).values.reshape(-1) * 0.85 + 0.075
    tensors["gen3d.fc2.bias"] = (
        base + np.clip(0.4 * lut_noise * rng.standard_normal(3 * s_t**3), -0.04, 0.04)
    ).astype(FLOAT_DTYPE)
    return WeightBundle(m=m, s_o=s_o, s_t=s_t, k=k, leaky_slope=leaky_slope, tensors=tensors)
