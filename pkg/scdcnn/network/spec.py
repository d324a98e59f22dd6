"""
network/spec.py — Network topology and its key=value text form.

Layer kinds
    conv_pool   5×5 valid convolution + 2×2 pooling + activation (one FEB per pooled output)
    fc          fully connected inner product + activation, no pooling
    output      fully connected inner product, scores decoded without activation

Stages group layers the way the layer-wise configuration tables do: every
conv_pool layer is its own stage and the fully connected tail is the last one.
"""
from __future__ import annotations

import math
from typing import Annotated, Iterable, Literal, Optional, Union

from pydantic import BaseModel, Field, ValidationError, model_validator

from scdcnn.core.errors import FormatError
from scdcnn.core.models import ActVariant, FebConfig, FebIpVariant, PoolVariant

ApcSetting = Literal["exact", "approximate", "auto"]
Shape3 = tuple[int, int, int]

POOL_SIZE = 2


class ConvPoolLayer(BaseModel):
    model_config = {"frozen": True}

    kind: Literal["conv_pool"] = "conv_pool"
    filters: int = Field(ge=1)
    kernel: int = Field(5, ge=1)
    ip_variant: FebIpVariant = "apc"
    pool_variant: PoolVariant = "max"
    states: Optional[int] = None
    apc_mode: ApcSetting = "auto"

    @property
    def act_variant(self) -> ActVariant:
        if self.ip_variant == "apc":
            return "btanh"
        return "stanh_fifth" if self.pool_variant == "max" else "stanh"


class FullyConnectedLayer(BaseModel):
    model_config = {"frozen": True}

    kind: Literal["fc"] = "fc"
    outputs: int = Field(ge=1)
    ip_variant: FebIpVariant = "apc"
    states: Optional[int] = None
    apc_mode: ApcSetting = "auto"

    @property
    def act_variant(self) -> ActVariant:
        return "btanh" if self.ip_variant == "apc" else "stanh"


class OutputLayer(BaseModel):
    model_config = {"frozen": True}

    kind: Literal["output"] = "output"
    classes: int = Field(ge=1)
    ip_variant: FebIpVariant = "apc"
    apc_mode: ApcSetting = "auto"


LayerSpec = Annotated[
    Union[ConvPoolLayer, FullyConnectedLayer, OutputLayer],
    Field(discriminator="kind"),
]


class LayerGeometry(BaseModel):
    """Derived sizes of one layer inside a network."""

    index: int
    in_shape: Shape3
    out_shape: Shape3
    n_inputs: int
    filters: int
    weight_shape: Shape3


class NetworkSpec(BaseModel):
    model_config = {"frozen": True}

    input_shape: Shape3 = (28, 28, 1)
    length: int = Field(1024, ge=1)
    segment: int = Field(16, ge=1)
    layers: tuple[LayerSpec, ...]

    @model_validator(mode="after")
    def consistent(self) -> "NetworkSpec":
        if not self.layers:
            raise ValueError("a network needs at least one layer")
        for index, layer in enumerate(self.layers):
            if isinstance(layer, OutputLayer) and index != len(self.layers) - 1:
                raise ValueError(f"layer {index}: the output layer must come last")
        self.geometry()
        for index, layer in enumerate(self.layers):
            if isinstance(layer, ConvPoolLayer):
                self.feb_config(index)
        return self

    def geometry(self) -> list[LayerGeometry]:
        shape = self.input_shape
        out: list[LayerGeometry] = []
        for index, layer in enumerate(self.layers):
            h, w, c = shape
            if isinstance(layer, ConvPoolLayer):
                conv_h, conv_w = h - layer.kernel + 1, w - layer.kernel + 1
                if conv_h < POOL_SIZE or conv_w < POOL_SIZE or conv_h % POOL_SIZE or conv_w % POOL_SIZE:
                    raise ValueError(
                        f"layer {index}: convolution output {conv_h}x{conv_w} cannot be 2x2 pooled"
                    )
                next_shape = (conv_h // POOL_SIZE, conv_w // POOL_SIZE, layer.filters)
                weight_shape = (layer.kernel, layer.kernel, c)
                filters = layer.filters
            else:
                units = layer.outputs if isinstance(layer, FullyConnectedLayer) else layer.classes
                next_shape = (1, 1, units)
                weight_shape = (1, 1, h * w * c)
                filters = units
            out.append(
                LayerGeometry(
                    index=index,
                    in_shape=shape,
                    out_shape=next_shape,
                    n_inputs=math.prod(weight_shape),
                    filters=filters,
                    weight_shape=weight_shape,
                )
            )
            shape = next_shape
        return out

    def weight_shapes(self) -> list[tuple[int, Shape3]]:
        return [(g.filters, g.weight_shape) for g in self.geometry()]

    def neuron_counts(self) -> list[int]:
        """Input size, then each layer's outputs; conv_pool layers report conv and pooled sizes."""
        counts = [math.prod(self.input_shape)]
        for layer, g in zip(self.layers, self.geometry()):
            if isinstance(layer, ConvPoolLayer):
                counts.append(math.prod(g.out_shape) * POOL_SIZE * POOL_SIZE)
            counts.append(math.prod(g.out_shape))
        return counts

    def feb_config(self, index: int, length: Optional[int] = None) -> FebConfig:
        layer = self.layers[index]
        if not isinstance(layer, ConvPoolLayer):
            raise ValueError(f"layer {index} is {layer.kind}, not conv_pool")
        g = self.geometry()[index]
        return FebConfig(
            ip_variant=layer.ip_variant,
            pool_variant=layer.pool_variant,
            act_variant=layer.act_variant,
            n_inputs=g.n_inputs,
            length=length or self.length,
            segment=self.segment,
            states=layer.states,
            apc_mode=layer.apc_mode,
        )

    def stages(self) -> list[list[int]]:
        groups: list[list[int]] = []
        tail: list[int] = []
        for index, layer in enumerate(self.layers):
            if isinstance(layer, ConvPoolLayer):
                groups.append([index])
            else:
                tail.append(index)
        if tail:
            groups.append(tail)
        return groups


def lenet5_spec(
    pooling: PoolVariant = "max",
    ip_variants: Iterable[FebIpVariant] = ("apc", "apc", "apc"),
    *,
    length: int = 1024,
    segment: int = 16,
) -> NetworkSpec:
    """784-11520-2880-3200-800-500-10 with one inner-product variant per stage."""
    stage0, stage1, stage2 = tuple(ip_variants)
    return NetworkSpec(
        input_shape=(28, 28, 1),
        length=length,
        segment=segment,
        layers=(
            ConvPoolLayer(filters=20, ip_variant=stage0, pool_variant=pooling),
            ConvPoolLayer(filters=50, ip_variant=stage1, pool_variant=pooling),
            FullyConnectedLayer(outputs=500, ip_variant=stage2),
            OutputLayer(classes=10, ip_variant=stage2),
        ),
    )


# ── Text form ──────────────────────────────────────────────────────────────

_LAYER_KEYS = {
    "conv_pool": {"filters", "kernel", "ip", "pool", "states", "apc"},
    "fc": {"outputs", "ip", "states", "apc"},
    "output": {"classes", "ip", "apc"},
}
_FIELD_NAMES = {"ip": "ip_variant", "pool": "pool_variant", "apc": "apc_mode"}


def parse_network_spec(text: str) -> NetworkSpec:
    """Parse ``key = value`` lines: ``input``, ``length``, ``segment`` and ``layerN.<key>``."""
    top: dict[str, str] = {}
    layers: dict[int, dict[str, str]] = {}
    for number, raw in enumerate(text.splitlines(), start=1):
        line = raw.split("#", 1)[0].strip()
        if not line:
            continue
        if "=" not in line:
            raise FormatError(f"line {number}: expected key = value, got {raw.strip()!r}")
        key, value = (part.strip() for part in line.split("=", 1))
        if key.startswith("layer"):
            head, _, attr = key.partition(".")
            if not head[5:].isdigit() or not attr:
                raise FormatError(f"line {number}: malformed layer key {key!r}")
            layers.setdefault(int(head[5:]), {})[attr] = value
        elif key in {"input", "length", "segment"}:
            top[key] = value
        else:
            raise FormatError(f"line {number}: unknown key {key!r}")

    if sorted(layers) != list(range(len(layers))):
        raise FormatError(f"layer indices must run 0..n-1, got {sorted(layers)}")

    built = []
    for index in range(len(layers)):
        fields = dict(layers[index])
        kind = fields.pop("kind", None)
        if kind not in _LAYER_KEYS:
            raise FormatError(f"layer {index}: kind must be one of {sorted(_LAYER_KEYS)}, got {kind!r}")
        unknown = set(fields) - _LAYER_KEYS[kind]
        if unknown:
            raise FormatError(f"layer {index}: unknown keys for {kind}: {sorted(unknown)}")
        built.append({"kind": kind, **{_FIELD_NAMES.get(k, k): v for k, v in fields.items()}})

    payload: dict[str, object] = {"layers": built}
    if "input" in top:
        try:
            payload["input_shape"] = tuple(int(v) for v in top["input"].lower().split("x"))
        except ValueError as exc:
            raise FormatError(f"input must look like 28x28x1, got {top['input']!r}") from exc
    for key in ("length", "segment"):
        if key in top:
            payload[key] = top[key]
    try:
        return NetworkSpec.model_validate(payload)
    except ValidationError as exc:
        raise FormatError(f"invalid network spec: {exc}") from exc


def format_network_spec(spec: NetworkSpec) -> str:
    lines = [
        f"input = {'x'.join(str(v) for v in spec.input_shape)}",
        f"length = {spec.length}",
        f"segment = {spec.segment}",
    ]
    for index, layer in enumerate(spec.layers):
        prefix = f"layer{index}"
        lines.append(f"{prefix}.kind = {layer.kind}")
        if isinstance(layer, ConvPoolLayer):
            lines += [
                f"{prefix}.filters = {layer.filters}",
                f"{prefix}.kernel = {layer.kernel}",
                f"{prefix}.pool = {layer.pool_variant}",
            ]
        elif isinstance(layer, FullyConnectedLayer):
            lines.append(f"{prefix}.outputs = {layer.outputs}")
        else:
            lines.append(f"{prefix}.classes = {layer.classes}")
        lines.append(f"{prefix}.ip = {layer.ip_variant}")
        if not isinstance(layer, OutputLayer) and layer.states is not None:
            lines.append(f"{prefix}.states = {layer.states}")
        lines.append(f"{prefix}.apc = {layer.apc_mode}")
    return "\n".join(lines) + "\n"


__all__ = [
    "POOL_SIZE",
    "ConvPoolLayer",
    "FullyConnectedLayer",
    "OutputLayer",
    "LayerSpec",
    "LayerGeometry",
    "NetworkSpec",
    "lenet5_spec",
    "parse_network_spec",
    "format_network_spec",
]
