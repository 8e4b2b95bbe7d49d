"""Contracted bundle tensor names and shapes.

Shapes are fully determined by the hyper-parameters (m, S_o, S_t, K): a
five-block CNN backbone with channel widths m, 2m, 4m, 8m, 8m and per-block
instance-norm affine pairs on the first four, a (3*S_o x 32m) 1D-LUT
generator, and a rank-K factorized (K x 32m, 3*S_t^3 x K) 3D-LUT generator.
"""

from __future__ import annotations

BUNDLE_TENSOR_NAMES = (
    "backbone.conv1.weight", "backbone.conv1.bias",
    "backbone.conv2.weight", "backbone.conv2.bias",
    "backbone.conv3.weight", "backbone.conv3.bias",
    "backbone.conv4.weight", "backbone.conv4.bias",
    "backbone.conv5.weight", "backbone.conv5.bias",
    "backbone.in1.gamma", "backbone.in1.beta",
    "backbone.in2.gamma", "backbone.in2.beta",
    "backbone.in3.gamma", "backbone.in3.beta",
    "backbone.in4.gamma", "backbone.in4.beta",
    "gen1d.fc.weight", "gen1d.fc.bias",
    "gen3d.fc1.weight", "gen3d.fc1.bias",
    "gen3d.fc2.weight", "gen3d.fc2.bias",
)


def expected_shapes(m: int, s_o: int, s_t: int, k: int) -> dict[str, tuple[int, ...]]:
    if m < 1 or s_o < 2 or s_t < 2 or k < 1:
        raise ValueError(
            f"invalid hyper-parameters m={m}, S_o={s_o}, S_t={s_t}, K={k}"
        )
    widths = [m, 2 * m, 4 * m, 8 * m, 8 * m]
    shapes: dict[str, tuple[int, ...]] = {}
    c_in = 3
    for i, c_out in enumerate(widths, start=1):
        shapes[f"backbone.conv{i}.weight"] = (c_out, c_in, 3, 3)
        shapes[f"backbone.conv{i}.bias"] = (c_out,)
        c_in = c_out
    for i, c in enumerate(widths[:4], start=1):
        shapes[f"backbone.in{i}.gamma"] = (c,)
        shapes[f"backbone.in{i}.beta"] = (c,)
    e = 32 * m
    shapes["gen1d.fc.weight"] = (3 * s_o, e)
    shapes["gen1d.fc.bias"] = (3 * s_o,)
    shapes["gen3d.fc1.weight"] = (k, e)
    shapes["gen3d.fc1.bias"] = (k,)
    shapes["gen3d.fc2.weight"] = (3 * s_t**3, k)
    shapes["gen3d.fc2.bias"] = (3 * s_t**3,)
    return shapes
