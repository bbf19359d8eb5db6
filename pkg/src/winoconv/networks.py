"""Built-in convolution layer tables for well-known CNNs.

Shapes follow the commonly published architectures (batch-norm
Inception-v3 at 299x299, SqueezeNet v1.0, Caffe-style ceil pooling
where that determines a spatial size).  Only convolution layers are
listed; pooling and activations influence the tables solely through
the spatial sizes they produce.
"""

from __future__ import annotations

from .tensor import ConvLayerSpec

PAD_1X7 = (0, 0, 3, 3)
PAD_7X1 = (3, 3, 0, 0)
PAD_1X3 = (0, 0, 1, 1)
PAD_3X1 = (1, 1, 0, 0)


def _conv(name, size, in_c, out_m, k=3, pad=1, stride=1) -> ConvLayerSpec:
    h, w = size if isinstance(size, tuple) else (size, size)
    kh, kw = k if isinstance(k, tuple) else (k, k)
    p = pad if isinstance(pad, tuple) else (pad, pad, pad, pad)
    return ConvLayerSpec(name, h, w, in_c, out_m, kh, kw, p, stride)


def _vgg(plan) -> list[ConvLayerSpec]:
    layers = []
    for block, size, in_c, out_c, reps in plan:
        for i in range(1, reps + 1):
            layers.append(
                _conv(f"conv{block}_{i}", size, in_c if i == 1 else out_c, out_c)
            )
    return layers


VGG16 = _vgg(
    [
        (1, 224, 3, 64, 2),
        (2, 112, 64, 128, 2),
        (3, 56, 128, 256, 3),
        (4, 28, 256, 512, 3),
        (5, 14, 512, 512, 3),
    ]
)

VGG19 = _vgg(
    [
        (1, 224, 3, 64, 2),
        (2, 112, 64, 128, 2),
        (3, 56, 128, 256, 4),
        (4, 28, 256, 512, 4),
        (5, 14, 512, 512, 4),
    ]
)


def _inception_googlenet(name, size, in_c, c1, c3r, c3, c5r, c5, pool):
    return [
        _conv(f"{name}/1x1", size, in_c, c1, k=1, pad=0),
        _conv(f"{name}/3x3_reduce", size, in_c, c3r, k=1, pad=0),
        _conv(f"{name}/3x3", size, c3r, c3, k=3, pad=1),
        _conv(f"{name}/5x5_reduce", size, in_c, c5r, k=1, pad=0),
        _conv(f"{name}/5x5", size, c5r, c5, k=5, pad=2),
        _conv(f"{name}/pool_proj", size, in_c, pool, k=1, pad=0),
    ]


GOOGLENET = (
    [
        _conv("conv1/7x7_s2", 224, 3, 64, k=7, pad=3, stride=2),
        _conv("conv2/3x3_reduce", 56, 64, 64, k=1, pad=0),
        _conv("conv2/3x3", 56, 64, 192, k=3, pad=1),
    ]
    + _inception_googlenet("inception_3a", 28, 192, 64, 96, 128, 16, 32, 32)
    + _inception_googlenet("inception_3b", 28, 256, 128, 128, 192, 32, 96, 64)
    + _inception_googlenet("inception_4a", 14, 480, 192, 96, 208, 16, 48, 64)
    + _inception_googlenet("inception_4b", 14, 512, 160, 112, 224, 24, 64, 64)
    + _inception_googlenet("inception_4c", 14, 512, 128, 128, 256, 24, 64, 64)
    + _inception_googlenet("inception_4d", 14, 512, 112, 144, 288, 32, 64, 64)
    + _inception_googlenet("inception_4e", 14, 528, 256, 160, 320, 32, 128, 128)
    + _inception_googlenet("inception_5a", 7, 832, 256, 160, 320, 32, 128, 128)
    + _inception_googlenet("inception_5b", 7, 832, 384, 192, 384, 48, 128, 128)
)


def _fire(name, size, in_c, squeeze, expand):
    return [
        _conv(f"{name}/squeeze1x1", size, in_c, squeeze, k=1, pad=0),
        _conv(f"{name}/expand1x1", size, squeeze, expand, k=1, pad=0),
        _conv(f"{name}/expand3x3", size, squeeze, expand, k=3, pad=1),
    ]


SQUEEZENET = (
    [_conv("conv1", 224, 3, 96, k=7, pad=0, stride=2)]
    + _fire("fire2", 54, 96, 16, 64)
    + _fire("fire3", 54, 128, 16, 64)
    + _fire("fire4", 54, 128, 32, 128)
    + _fire("fire5", 27, 256, 32, 128)
    + _fire("fire6", 27, 256, 48, 192)
    + _fire("fire7", 27, 384, 48, 192)
    + _fire("fire8", 27, 384, 64, 256)
    + _fire("fire9", 13, 512, 64, 256)
    + [_conv("conv10", 13, 512, 1000, k=1, pad=0)]
)


def _mixed_5(name, in_c):
    return [
        _conv(f"{name}/1x1", 35, in_c, 64, k=1, pad=0),
        _conv(f"{name}/5x5_reduce", 35, in_c, 48, k=1, pad=0),
        _conv(f"{name}/5x5", 35, 48, 64, k=5, pad=2),
        _conv(f"{name}/dbl_reduce", 35, in_c, 64, k=1, pad=0),
        _conv(f"{name}/dbl_3x3a", 35, 64, 96, k=3, pad=1),
        _conv(f"{name}/dbl_3x3b", 35, 96, 96, k=3, pad=1),
        _conv(f"{name}/pool_proj", 35, in_c, 64, k=1, pad=0),
    ]


def _mixed_6(name, mid):
    return [
        _conv(f"{name}/1x1", 17, 768, 192, k=1, pad=0),
        _conv(f"{name}/7x7_reduce", 17, 768, mid, k=1, pad=0),
        _conv(f"{name}/1x7", 17, mid, mid, k=(1, 7), pad=PAD_1X7),
        _conv(f"{name}/7x1", 17, mid, 192, k=(7, 1), pad=PAD_7X1),
        _conv(f"{name}/dbl_reduce", 17, 768, mid, k=1, pad=0),
        _conv(f"{name}/dbl_7x1a", 17, mid, mid, k=(7, 1), pad=PAD_7X1),
        _conv(f"{name}/dbl_1x7a", 17, mid, mid, k=(1, 7), pad=PAD_1X7),
        _conv(f"{name}/dbl_7x1b", 17, mid, mid, k=(7, 1), pad=PAD_7X1),
        _conv(f"{name}/dbl_1x7b", 17, mid, 192, k=(1, 7), pad=PAD_1X7),
        _conv(f"{name}/pool_proj", 17, 768, 192, k=1, pad=0),
    ]


def _mixed_7(name, in_c):
    return [
        _conv(f"{name}/1x1", 8, in_c, 320, k=1, pad=0),
        _conv(f"{name}/3x3_reduce", 8, in_c, 384, k=1, pad=0),
        _conv(f"{name}/3x3_1x3", 8, 384, 384, k=(1, 3), pad=PAD_1X3),
        _conv(f"{name}/3x3_3x1", 8, 384, 384, k=(3, 1), pad=PAD_3X1),
        _conv(f"{name}/dbl_reduce", 8, in_c, 448, k=1, pad=0),
        _conv(f"{name}/dbl_3x3", 8, 448, 384, k=3, pad=1),
        _conv(f"{name}/dbl_1x3", 8, 384, 384, k=(1, 3), pad=PAD_1X3),
        _conv(f"{name}/dbl_3x1", 8, 384, 384, k=(3, 1), pad=PAD_3X1),
        _conv(f"{name}/pool_proj", 8, in_c, 192, k=1, pad=0),
    ]


INCEPTION_V3 = (
    [
        _conv("conv_1a_3x3", 299, 3, 32, k=3, pad=0, stride=2),
        _conv("conv_2a_3x3", 149, 32, 32, k=3, pad=0),
        _conv("conv_2b_3x3", 147, 32, 64, k=3, pad=1),
        _conv("conv_3b_1x1", 73, 64, 80, k=1, pad=0),
        _conv("conv_4a_3x3", 73, 80, 192, k=3, pad=0),
    ]
    + _mixed_5("mixed_5b", 192)
    + _mixed_5("mixed_5c", 256)
    + _mixed_5("mixed_5d", 288)
    + [
        _conv("mixed_6a/3x3", 35, 288, 384, k=3, pad=0, stride=2),
        _conv("mixed_6a/dbl_reduce", 35, 288, 64, k=1, pad=0),
        _conv("mixed_6a/dbl_3x3a", 35, 64, 96, k=3, pad=1),
        _conv("mixed_6a/dbl_3x3b", 35, 96, 96, k=3, pad=0, stride=2),
    ]
    + _mixed_6("mixed_6b", 128)
    + _mixed_6("mixed_6c", 160)
    + _mixed_6("mixed_6d", 160)
    + _mixed_6("mixed_6e", 192)
    + [
        _conv("mixed_7a/3x3_reduce", 17, 768, 192, k=1, pad=0),
        _conv("mixed_7a/3x3", 17, 192, 320, k=3, pad=0, stride=2),
        _conv("mixed_7a/7x7_reduce", 17, 768, 192, k=1, pad=0),
        _conv("mixed_7a/1x7", 17, 192, 192, k=(1, 7), pad=PAD_1X7),
        _conv("mixed_7a/7x1", 17, 192, 192, k=(7, 1), pad=PAD_7X1),
        _conv("mixed_7a/3x3_2", 17, 192, 192, k=3, pad=0, stride=2),
    ]
    + _mixed_7("mixed_7b", 1280)
    + _mixed_7("mixed_7c", 2048)
)

BUILTIN_NETWORKS = {
    "vgg16": VGG16,
    "vgg19": VGG19,
    "googlenet": GOOGLENET,
    "inception-v3": INCEPTION_V3,
    "squeezenet": SQUEEZENET,
}


def network_names() -> tuple[str, ...]:
    return tuple(BUILTIN_NETWORKS)


def canonical_name(name: str):
    """Builtin key for a user-supplied network name; None if unknown.
    Hyphens, underscores and case are ignored when matching.
    """
    wanted = name.strip().lower().replace("-", "").replace("_", "")
    for key in BUILTIN_NETWORKS:
        if key.replace("-", "") == wanted:
            return key
    return None


def get_network(name: str):
    """Layer table for a builtin name; None if unknown."""
    key = canonical_name(name)
    return list(BUILTIN_NETWORKS[key]) if key else None
