"""Partially frozen graph-attention forecasting network.

The network embeds a lookback window of multi-channel station series into
token, spatial, and temporal components, fuses them to width 3D per node,
and runs the result through F frozen transformer blocks followed by U
graph-attention blocks whose attention is masked by the station adjacency.
In the partially frozen regime the attention bases of the graph blocks are
stored 4-bit quantized and only embeddings, graph-block layer norms,
low-rank adapters, and the regression head receive gradients.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field

import numpy as np

from .autodiff import Tensor, concat, softmax, take_rows
from .domain import StationGraph, WindowedSample
from .errors import ConfigError, DataError
from .quantize import NF4_CODEBOOK, QuantizedTensor, dequantize, quantize

__all__ = [
    "ModelConfig",
    "EmbeddingParams",
    "HeadAdapters",
    "PfgaBlockParams",
    "PfgaModel",
    "PositionalEncoding",
    "token_embedding",
    "temporal_embedding",
    "spatial_embedding",
    "fuse_embeddings",
    "frozen_block",
    "graph_attention_block",
    "lora_delta",
    "forward",
    "forward_batch",
    "mask_bias",
    "build_model",
    "freeze_and_adapt",
    "trainable_parameter_count",
    "save_checkpoint",
    "load_checkpoint",
]

MASK_FILL = -1e9

FREEZE_MODES = ("partial", "none", "all_graph")


@dataclass(frozen=True)
class ModelConfig:
    """Architecture sizes. Width of the fused representation is 3*d_embed."""

    d_embed: int = 32
    lookback: int = 12
    horizon: int = 3
    c_in: int = 1
    f_frozen: int = 2
    u_unfrozen: int = 2
    heads: int = 4
    rank: int = 4
    block_size_q: int = 64
    ln_eps: float = 1e-5

    def __post_init__(self):
        if self.d_embed < 1:
            raise ConfigError("d_embed must be >= 1")
        if self.lookback < 1 or self.horizon < 1 or self.c_in < 1:
            raise ConfigError("lookback, horizon, and c_in must be >= 1")
        if self.heads < 1 or self.width % self.heads != 0:
            raise ConfigError("heads must be >= 1 and divide 3*d_embed")
        if self.rank < 1 or self.rank >= self.d_k:
            raise ConfigError("rank must satisfy 1 <= rank < d_k")
        if self.f_frozen < 0:
            raise ConfigError("f_frozen must be >= 0")
        if self.u_unfrozen < 1:
            raise ConfigError("u_unfrozen must be >= 1")
        if self.block_size_q < 1:
            raise ConfigError("block_size_q must be >= 1")
        if not (np.isfinite(self.ln_eps) and self.ln_eps > 0):
            raise ConfigError("ln_eps must be positive")

    @property
    def width(self) -> int:
        return 3 * self.d_embed

    @property
    def d_k(self) -> int:
        return self.width // self.heads


class PositionalEncoding:
    """Sinusoidal table over node index, deterministic in (n_max, width)."""

    def __init__(self, n_max: int, width: int):
        position = np.arange(n_max, dtype=float)[:, None]
        dim = np.arange(width, dtype=float)[None, :]
        angle = position / np.power(10000.0, 2.0 * (dim // 2) / width)
        table = np.where(dim % 2 == 0, np.sin(angle), np.cos(angle))
        table.setflags(write=False)
        self.table = table

    def rows(self, n: int) -> np.ndarray:
        if n > self.table.shape[0]:
            return PositionalEncoding(n, self.table.shape[1]).table
        return self.table[:n]


@dataclass
class EmbeddingParams:
    theta_p_w: Tensor
    theta_p_b: Tensor
    w_d: Tensor
    w_w: Tensor
    w_s: Tensor
    b_s: Tensor
    theta_f_w: Tensor
    theta_f_b: Tensor

    def named(self):
        return [
            ("embed.theta_p_w", self.theta_p_w),
            ("embed.theta_p_b", self.theta_p_b),
            ("embed.w_d", self.w_d),
            ("embed.w_w", self.w_w),
            ("embed.w_s", self.w_s),
            ("embed.b_s", self.b_s),
            ("embed.theta_f_w", self.theta_f_w),
            ("embed.theta_f_b", self.theta_f_b),
        ]


@dataclass
class HeadAdapters:
    """Low-rank update factors for one attention head (query and value)."""

    l_q: Tensor
    m_q: Tensor
    l_v: Tensor
    m_v: Tensor


@dataclass
class PfgaBlockParams:
    ln1_gamma: Tensor
    ln1_beta: Tensor
    ln2_gamma: Tensor
    ln2_beta: Tensor
    w_q: Tensor
    w_k: Tensor
    w_v: Tensor
    w_o: Tensor
    w_1: Tensor
    b_1: Tensor
    w_2: Tensor
    b_2: Tensor
    masked: bool = False
    adapters: tuple = ()
    quant: dict = field(default_factory=dict)

    def named(self, prefix: str):
        pairs = [
            (f"{prefix}.ln1_gamma", self.ln1_gamma),
            (f"{prefix}.ln1_beta", self.ln1_beta),
            (f"{prefix}.ln2_gamma", self.ln2_gamma),
            (f"{prefix}.ln2_beta", self.ln2_beta),
            (f"{prefix}.w_q", self.w_q),
            (f"{prefix}.w_k", self.w_k),
            (f"{prefix}.w_v", self.w_v),
            (f"{prefix}.w_o", self.w_o),
            (f"{prefix}.w_1", self.w_1),
            (f"{prefix}.b_1", self.b_1),
            (f"{prefix}.w_2", self.w_2),
            (f"{prefix}.b_2", self.b_2),
        ]
        for h, a in enumerate(self.adapters):
            pairs.extend(
                [
                    (f"{prefix}.head{h}.l_q", a.l_q),
                    (f"{prefix}.head{h}.m_q", a.m_q),
                    (f"{prefix}.head{h}.l_v", a.l_v),
                    (f"{prefix}.head{h}.m_v", a.m_v),
                ]
            )
        return pairs


@dataclass
class PfgaModel:
    config: ModelConfig
    freeze_mode: str
    embed: EmbeddingParams
    blocks: tuple
    head_w: Tensor
    head_b: Tensor
    pe: PositionalEncoding

    def named_parameters(self):
        pairs = list(self.embed.named())
        for i, blk in enumerate(self.blocks):
            pairs.extend(blk.named(f"block{i}"))
        pairs.append(("head_w", self.head_w))
        pairs.append(("head_b", self.head_b))
        return pairs

    def trainable_parameters(self):
        return [(n, t) for n, t in self.named_parameters() if t.requires_grad]

    def trainable_count(self) -> int:
        return sum(t.data.size for _, t in self.trainable_parameters())


def trainable_parameter_count(cfg: ModelConfig, freeze_mode: str = "partial") -> int:
    """Closed-form trainable size for a model built under the given mode."""
    if freeze_mode not in FREEZE_MODES:
        raise ConfigError(f"unknown freeze_mode {freeze_mode!r}")
    w = cfg.width
    flat = cfg.lookback * cfg.c_in
    embeddings = (
        (flat * cfg.d_embed + cfg.d_embed)  # token projection
        + 24 * cfg.d_embed
        + 7 * cfg.d_embed
        + (flat * cfg.d_embed + cfg.d_embed)  # spatial projection
        + (w * w + w)  # fusion
    )
    head = w * cfg.horizon + cfg.horizon
    if freeze_mode == "partial":
        norms = cfg.u_unfrozen * 4 * w
        adapters = cfg.u_unfrozen * 2 * cfg.heads * cfg.rank * (w + cfg.d_k)
        return embeddings + head + norms + adapters
    per_block = 4 * w + 4 * w * w + (w * 4 * w + 4 * w) + (4 * w * w + w)
    return embeddings + head + (cfg.f_frozen + cfg.u_unfrozen) * per_block


# -- embedding operations -----------------------------------------------------


def _flatten_history(x_p: np.ndarray, cfg_like=None) -> np.ndarray:
    x_p = np.asarray(x_p, dtype=float)
    if x_p.ndim != 3:
        raise ConfigError("history must have shape (P, N, C)")
    p, n, c = x_p.shape
    return x_p.transpose(1, 0, 2).reshape(n, p * c)


def token_embedding(x_p: np.ndarray, theta_p_w: Tensor, theta_p_b: Tensor) -> Tensor:
    flat = _flatten_history(x_p)
    if flat.shape[1] != theta_p_w.data.shape[0]:
        raise ConfigError("history shape does not match token projection")
    return Tensor(flat) @ theta_p_w + theta_p_b


def temporal_embedding(hour: int, dow: int, w_d: Tensor, w_w: Tensor) -> Tensor:
    if not (0 <= int(hour) < 24):
        raise ConfigError(f"hour {hour} out of range [0, 24)")
    if not (0 <= int(dow) < 7):
        raise ConfigError(f"dow {dow} out of range [0, 7)")
    return w_d[int(hour)] + w_w[int(dow)]


def spatial_embedding(x_p: np.ndarray, w_s: Tensor, b_s: Tensor) -> Tensor:
    flat = _flatten_history(x_p)
    if flat.shape[1] != w_s.data.shape[0]:
        raise ConfigError("history shape does not match spatial projection")
    return (Tensor(flat) @ w_s + b_s).tanh()


def fuse_embeddings(e_p: Tensor, e_s: Tensor, e_t: Tensor, theta_f_w: Tensor, theta_f_b: Tensor) -> Tensor:
    if not (e_p.shape == e_s.shape):
        raise ConfigError("embedding widths do not match")
    if e_t.shape[-1] != e_p.shape[-1]:
        raise ConfigError("temporal embedding width mismatch")
    e_t_full = e_t.broadcast_to(e_p.shape)
    fused = concat([e_p, e_s, e_t_full], axis=-1)
    if fused.shape[-1] != theta_f_w.data.shape[0]:
        raise ConfigError("fusion projection width mismatch")
    return fused @ theta_f_w + theta_f_b


# -- transformer blocks -------------------------------------------------------


def _layer_norm(x: Tensor, gamma: Tensor, beta: Tensor, eps: float) -> Tensor:
    mu = x.mean(axis=-1, keepdims=True)
    centered = x - mu
    var = (centered * centered).mean(axis=-1, keepdims=True)
    return centered / (var + eps).sqrt() * gamma + beta


def lora_delta(l: Tensor, m: Tensor) -> Tensor:
    if l.shape[-1] != m.shape[0]:
        raise ConfigError("adapter factor shapes do not chain")
    return l @ m


def mask_bias(adjacency: np.ndarray) -> np.ndarray:
    """Additive pre-softmax bias: 0 where connected, a large negative fill where not."""
    return np.where(np.asarray(adjacency) == 0, MASK_FILL, 0.0)


def _attention(x: Tensor, blk: PfgaBlockParams, cfg: ModelConfig, bias: np.ndarray | None) -> Tensor:
    d_k = cfg.d_k
    base_q = x @ blk.w_q
    base_k = x @ blk.w_k
    base_v = x @ blk.w_v
    heads_out = []
    scale = 1.0 / np.sqrt(d_k)
    for h in range(cfg.heads):
        lo, hi = h * d_k, (h + 1) * d_k
        q = base_q[..., lo:hi]
        k = base_k[..., lo:hi]
        v = base_v[..., lo:hi]
        if blk.adapters:
            a = blk.adapters[h]
            q = q + (x @ a.l_q) @ a.m_q
            v = v + (x @ a.l_v) @ a.m_v
        axes = tuple(range(q.data.ndim - 2)) + (q.data.ndim - 1, q.data.ndim - 2)
        scores = (q @ k.transpose(axes)) * scale
        if bias is not None:
            scores = scores + Tensor(bias)
        heads_out.append(softmax(scores, axis=-1) @ v)
    return concat(heads_out, axis=-1) @ blk.w_o


def _block_apply(x: Tensor, blk: PfgaBlockParams, cfg: ModelConfig, bias: np.ndarray | None) -> Tensor:
    normed = _layer_norm(x, blk.ln1_gamma, blk.ln1_beta, cfg.ln_eps)
    x = x + _attention(normed, blk, cfg, bias)
    normed2 = _layer_norm(x, blk.ln2_gamma, blk.ln2_beta, cfg.ln_eps)
    ffn = (normed2 @ blk.w_1 + blk.b_1).relu() @ blk.w_2 + blk.b_2
    return x + ffn


def frozen_block(h: np.ndarray | Tensor, blk: PfgaBlockParams, cfg: ModelConfig) -> Tensor:
    x = h if isinstance(h, Tensor) else Tensor(np.asarray(h, dtype=float))
    if x.shape[-1] != cfg.width:
        raise ConfigError("block input width mismatch")
    return _block_apply(x, blk, cfg, None)


def graph_attention_block(
    h: np.ndarray | Tensor, adjacency: np.ndarray, blk: PfgaBlockParams, cfg: ModelConfig
) -> Tensor:
    x = h if isinstance(h, Tensor) else Tensor(np.asarray(h, dtype=float))
    if x.shape[-1] != cfg.width:
        raise ConfigError("block input width mismatch")
    adjacency = np.asarray(adjacency, dtype=float)
    n = x.shape[-2]
    if adjacency.shape != (n, n):
        raise ConfigError("adjacency shape does not match node count")
    if not np.all(np.diag(adjacency) == 1):
        raise ConfigError("adjacency must have a unit diagonal")
    return _block_apply(x, blk, cfg, mask_bias(adjacency))


# -- full forward -------------------------------------------------------------


def _embed_batch(model: PfgaModel, hist: np.ndarray, hours: np.ndarray, dows: np.ndarray) -> Tensor:
    cfg = model.config
    b, p, n, c = hist.shape
    flat = Tensor(hist.transpose(0, 2, 1, 3).reshape(b, n, p * c))
    e = model.embed
    e_p = flat @ e.theta_p_w + e.theta_p_b
    e_s = (flat @ e.w_s + e.b_s).tanh()
    e_t = take_rows(e.w_d, hours) + take_rows(e.w_w, dows)
    e_t = e_t.reshape(b, 1, cfg.d_embed).broadcast_to((b, n, cfg.d_embed))
    fused = concat([e_p, e_s, e_t], axis=-1) @ e.theta_f_w + e.theta_f_b
    return fused + Tensor(model.pe.rows(n))


def forward_batch(
    model: PfgaModel,
    hist: np.ndarray,
    hours: np.ndarray,
    dows: np.ndarray,
    adjacency: np.ndarray,
    use_graph_mask: bool = True,
) -> Tensor:
    """Predict (B, S, N, 1) from histories (B, P, N, C) and anchor clock fields."""
    cfg = model.config
    hist = np.asarray(hist, dtype=float)
    if hist.ndim != 4 or hist.shape[1] != cfg.lookback or hist.shape[3] != cfg.c_in:
        raise ConfigError("history batch must have shape (B, P, N, C_in)")
    b, _, n, _ = hist.shape
    hours = np.asarray(hours, dtype=int)
    dows = np.asarray(dows, dtype=int)
    if hours.shape != (b,) or dows.shape != (b,):
        raise ConfigError("anchor hour and day-of-week must be (B,) arrays")
    if np.any(hours < 0) or np.any(hours >= 24):
        raise ConfigError("anchor hour out of range [0, 24)")
    if np.any(dows < 0) or np.any(dows >= 7):
        raise ConfigError("anchor day-of-week out of range [0, 7)")
    adjacency = np.asarray(adjacency, dtype=float)
    if adjacency.shape != (n, n):
        raise ConfigError("adjacency shape does not match node count")
    bias = mask_bias(adjacency) if use_graph_mask else None

    x = _embed_batch(model, hist, hours, dows)
    for blk in model.blocks:
        x = _block_apply(x, blk, cfg, bias if blk.masked else None)
    out = x @ model.head_w + model.head_b  # (B, N, S)
    return out.transpose(0, 2, 1).reshape(b, cfg.horizon, n, 1)


def forward(model: PfgaModel, sample: WindowedSample, graph: StationGraph) -> np.ndarray:
    pred = forward_batch(
        model,
        sample.history[None],
        np.array([sample.anchor_hour]),
        np.array([sample.anchor_dow]),
        graph.adjacency,
    )
    return pred.data[0]


# -- construction -------------------------------------------------------------


def _tensor(data, trainable: bool) -> Tensor:
    return Tensor(np.asarray(data, dtype=float), requires_grad=trainable)


def build_model(cfg: ModelConfig, rng: np.random.Generator, n_max: int = 64) -> PfgaModel:
    """Full-precision stack with every parameter trainable (the pretraining form)."""
    w = cfg.width
    flat = cfg.lookback * cfg.c_in

    def weight(n_in, n_out):
        return rng.normal(0.0, n_in**-0.5, size=(n_in, n_out))

    embed = EmbeddingParams(
        theta_p_w=_tensor(weight(flat, cfg.d_embed), True),
        theta_p_b=_tensor(np.zeros(cfg.d_embed), True),
        w_d=_tensor(rng.normal(0.0, 0.02, size=(24, cfg.d_embed)), True),
        w_w=_tensor(rng.normal(0.0, 0.02, size=(7, cfg.d_embed)), True),
        w_s=_tensor(weight(flat, cfg.d_embed), True),
        b_s=_tensor(np.zeros(cfg.d_embed), True),
        theta_f_w=_tensor(weight(w, w), True),
        theta_f_b=_tensor(np.zeros(w), True),
    )
    blocks = []
    for i in range(cfg.f_frozen + cfg.u_unfrozen):
        blocks.append(
            PfgaBlockParams(
                ln1_gamma=_tensor(np.ones(w), True),
                ln1_beta=_tensor(np.zeros(w), True),
                ln2_gamma=_tensor(np.ones(w), True),
                ln2_beta=_tensor(np.zeros(w), True),
                w_q=_tensor(weight(w, w), True),
                w_k=_tensor(weight(w, w), True),
                w_v=_tensor(weight(w, w), True),
                w_o=_tensor(weight(w, w), True),
                w_1=_tensor(weight(w, 4 * w), True),
                b_1=_tensor(np.zeros(4 * w), True),
                w_2=_tensor(weight(4 * w, w), True),
                b_2=_tensor(np.zeros(w), True),
                masked=i >= cfg.f_frozen,
            )
        )
    return PfgaModel(
        config=cfg,
        freeze_mode="none",
        embed=embed,
        blocks=tuple(blocks),
        head_w=_tensor(weight(w, cfg.horizon), True),
        head_b=_tensor(np.zeros(cfg.horizon), True),
        pe=PositionalEncoding(n_max, w),
    )


def _set_trainable(tensor: Tensor, trainable: bool) -> None:
    tensor.requires_grad = trainable
    tensor.grad = None


def freeze_and_adapt(
    model: PfgaModel,
    rng: np.random.Generator,
    freeze_mode: str = "partial",
    use_graph_mask: bool = True,
) -> PfgaModel:
    """Convert a full-precision stack into the requested fine-tuning regime.

    partial: blocks 1..F fully frozen; graph-block attention bases quantized
    to 4 bits and frozen; their layer norms stay trainable and fresh low-rank
    adapters are attached. none: everything stays trainable in full precision.
    all_graph: every block becomes adjacency-masked, everything trainable.
    The input model is modified in place and returned.
    """
    cfg = model.config
    if freeze_mode not in FREEZE_MODES:
        raise ConfigError(f"unknown freeze_mode {freeze_mode!r}")
    model.freeze_mode = freeze_mode

    for i, blk in enumerate(model.blocks):
        is_graph = i >= cfg.f_frozen
        if freeze_mode == "all_graph":
            blk.masked = True
            continue
        blk.masked = is_graph and use_graph_mask
        if freeze_mode == "none":
            continue
        if not is_graph:
            for _, t in blk.named(""):
                _set_trainable(t, False)
            continue
        blk.quant = {}
        for name in ("w_q", "w_k", "w_v", "w_o"):
            t = getattr(blk, name)
            qt = quantize(t.data, block_size=cfg.block_size_q)
            t.data = dequantize(qt)
            _set_trainable(t, False)
            blk.quant[name] = qt
        for name in ("w_1", "b_1", "w_2", "b_2"):
            _set_trainable(getattr(blk, name), False)
        adapters = []
        for _ in range(cfg.heads):
            adapters.append(
                HeadAdapters(
                    l_q=_tensor(rng.normal(size=(cfg.width, cfg.rank)) * 0.01, True),
                    m_q=_tensor(np.zeros((cfg.rank, cfg.d_k)), True),
                    l_v=_tensor(rng.normal(size=(cfg.width, cfg.rank)) * 0.01, True),
                    m_v=_tensor(np.zeros((cfg.rank, cfg.d_k)), True),
                )
            )
        blk.adapters = tuple(adapters)
    return model


# -- checkpointing ------------------------------------------------------------

_CHECKPOINT_VERSION = 1


def save_checkpoint(model: PfgaModel, path: str) -> None:
    cfg = model.config
    meta = {
        "version": _CHECKPOINT_VERSION,
        "freeze_mode": model.freeze_mode,
        "n_max": int(model.pe.table.shape[0]),
        "config": {
            "d_embed": cfg.d_embed,
            "lookback": cfg.lookback,
            "horizon": cfg.horizon,
            "c_in": cfg.c_in,
            "f_frozen": cfg.f_frozen,
            "u_unfrozen": cfg.u_unfrozen,
            "heads": cfg.heads,
            "rank": cfg.rank,
            "block_size_q": cfg.block_size_q,
            "ln_eps": cfg.ln_eps,
        },
        "masked": [bool(b.masked) for b in model.blocks],
        "trainable": [],
        "quantized": [],
    }
    quantized_names = {
        f"block{i}.{wname}" for i, blk in enumerate(model.blocks) for wname in blk.quant
    }
    arrays = {"nf4_codebook": np.asarray(NF4_CODEBOOK)}
    for name, t in model.named_parameters():
        if t.requires_grad:
            meta["trainable"].append(name)
        if name in quantized_names:
            continue  # stored in quantized form below
        arrays[name.replace(".", "__")] = t.data
    for i, blk in enumerate(model.blocks):
        for wname, qt in blk.quant.items():
            tag = f"block{i}__{wname}"
            meta["quantized"].append(
                {
                    "name": f"block{i}.{wname}",
                    "shape": list(qt.shape),
                    "block_size": qt.block_size,
                    "superblock": qt.superblock,
                }
            )
            arrays[f"q_codes__{tag}"] = qt.codes
            arrays[f"q_scale_codes__{tag}"] = qt.scale_codes
            arrays[f"q_scale_min__{tag}"] = qt.scale_min
            arrays[f"q_scale_step__{tag}"] = qt.scale_step
    arrays["meta_json"] = np.frombuffer(json.dumps(meta).encode(), dtype=np.uint8)
    np.savez(path, **arrays)


def load_checkpoint(path: str) -> PfgaModel:
    try:
        with np.load(path) as data:
            arrays = {k: data[k] for k in data.files}
    except OSError as exc:
        raise DataError(f"cannot read checkpoint {path}: {exc}") from exc
    meta = json.loads(bytes(arrays.pop("meta_json")).decode())
    if meta.get("version") != _CHECKPOINT_VERSION:
        raise ConfigError(f"unsupported checkpoint version {meta.get('version')}")
    if not np.array_equal(arrays.pop("nf4_codebook"), NF4_CODEBOOK):
        raise ConfigError("checkpoint codebook does not match this build")
    cfg = ModelConfig(**meta["config"])
    model = build_model(cfg, np.random.default_rng(0), n_max=meta["n_max"])
    model.freeze_mode = meta["freeze_mode"]
    trainable = set(meta["trainable"])

    quant_info = {q["name"]: q for q in meta["quantized"]}
    for i, blk in enumerate(model.blocks):
        blk.masked = meta["masked"][i]
        blk.quant = {}
        if any(n.startswith(f"block{i}.head") for n in trainable):
            blk.adapters = tuple(
                HeadAdapters(
                    l_q=_tensor(np.zeros((cfg.width, cfg.rank)), True),
                    m_q=_tensor(np.zeros((cfg.rank, cfg.d_k)), True),
                    l_v=_tensor(np.zeros((cfg.width, cfg.rank)), True),
                    m_v=_tensor(np.zeros((cfg.rank, cfg.d_k)), True),
                )
                for _ in range(cfg.heads)
            )
        for wname in ("w_q", "w_k", "w_v", "w_o"):
            qname = f"block{i}.{wname}"
            if qname in quant_info:
                info = quant_info[qname]
                tag = f"block{i}__{wname}"
                qt = QuantizedTensor(
                    codes=arrays[f"q_codes__{tag}"],
                    scale_codes=arrays[f"q_scale_codes__{tag}"],
                    scale_min=arrays[f"q_scale_min__{tag}"],
                    scale_step=arrays[f"q_scale_step__{tag}"],
                    shape=tuple(info["shape"]),
                    block_size=info["block_size"],
                    superblock=info["superblock"],
                )
                blk.quant[wname] = qt

    for name, t in model.named_parameters():
        if name in quant_info:
            i, wname = name.split(".")
            t.data = dequantize(model.blocks[int(i[5:])].quant[wname])
            _set_trainable(t, False)
            continue
        key = name.replace(".", "__")
        if key not in arrays:
            raise ConfigError(f"checkpoint is missing tensor {name}")
        t.data = np.asarray(arrays[key], dtype=float)
        _set_trainable(t, name in trainable)
    return model
