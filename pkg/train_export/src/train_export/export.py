"""Export a trained checkpoint as a portable model bundle.

Bundle layout (the contract the inference pipeline consumes):

- ``graph.npz``     — flat weight archive with the documented key names
- ``graph.json``    — architecture config (num_layers, num_heads, ...)
- ``tokenizer.json``— serialized tokenizer spec
- ``manifest.txt``  — ``key = value`` lines incl. sha256 ``hash.<file>`` pins

Export is verified in-process: the written graph is reloaded and executed
with a reference numpy forward pass on probe inputs, and its logits must
match the framework model within a small tolerance.
"""

from __future__ import annotations

import hashlib
import json
from pathlib import Path

import numpy as np
import torch

from .tokenization import special_ids
from .train import Checkpoint

GRAPH_NAME = "graph.npz"
CONFIG_NAME = "graph.json"
TOKENIZER_NAME = "tokenizer.json"
MANIFEST_NAME = "manifest.txt"


class ExportVerificationError(RuntimeError):
    """Exported graph disagrees with the framework model."""


def _map_state_dict(model) -> dict[str, np.ndarray]:
    src = {k: v.detach().cpu().numpy() for k, v in model.state_dict().items()}
    out = {}
    ren = {
        "roberta.embeddings.word_embeddings.weight": "embeddings.word",
        "roberta.embeddings.position_embeddings.weight": "embeddings.position",
        "roberta.embeddings.token_type_embeddings.weight": "embeddings.token_type",
        "roberta.embeddings.LayerNorm.weight": "embeddings.ln.weight",
        "roberta.embeddings.LayerNorm.bias": "embeddings.ln.bias",
        "qa_outputs.weight": "qa.weight",
        "qa_outputs.bias": "qa.bias",
    }
    per_layer = {
        "attention.self.query": "attention.q",
        "attention.self.key": "attention.k",
        "attention.self.value": "attention.v",
        "attention.output.dense": "attention.out",
        "attention.output.LayerNorm": "attention.ln",
        "intermediate.dense": "ffn.in",
        "output.dense": "ffn.out",
        "output.LayerNorm": "ffn.ln",
    }
    for key, value in src.items():
        if key in ren:
            out[ren[key]] = value
            continue
        if key.startswith("roberta.encoder.layer."):
            rest = key[len("roberta.encoder.layer.") :]
            index, _, tail = rest.partition(".")
            stem, _, leaf = tail.rpartition(".")  # leaf: weight | bias
            if stem in per_layer:
                out[f"layers.{index}.{per_layer[stem]}.{leaf}"] = value
                continue
        # buffers (position_ids) and heads we don't export are dropped
    return out


def _sha256(path: Path) -> str:
    h = hashlib.sha256()
    with open(path, "rb") as fh:
        for block in iter(lambda: fh.read(65536), b""):
            h.update(block)
    return h.hexdigest()


# --- reference forward over the written graph -------------------------------
# Executes the exported format exactly as documented, so verification does
# not depend on the consumer package being installed.


def _layer_norm(x, w, b, eps):
    mu = x.mean(axis=-1, keepdims=True)
    var = ((x - mu) ** 2).mean(axis=-1, keepdims=True)
    return (x - mu) / np.sqrt(var + eps) * w + b


def _softmax(x):
    x = x - x.max(axis=-1, keepdims=True)
    e = np.exp(x)
    return e / e.sum(axis=-1, keepdims=True)


def _gelu(x):
    return 0.5 * x * (1.0 + torch.erf(torch.from_numpy(x / np.sqrt(2.0))).numpy())


def _reference_forward(w, cfg, token_ids):
    w = {k: np.asarray(v, dtype=np.float32) for k, v in w.items()}
    n = len(token_ids)
    heads, hidden = int(cfg["num_heads"]), int(cfg["hidden_size"])
    head_dim = hidden // heads
    eps = float(cfg["layer_norm_eps"])
    positions = np.arange(n) + int(cfg["pad_token_id"]) + 1
    x = (
        w["embeddings.word"][np.asarray(token_ids)]
        + w["embeddings.position"][positions]
        + w["embeddings.token_type"][0]
    )
    x = _layer_norm(x, w["embeddings.ln.weight"], w["embeddings.ln.bias"], eps)
    lin = lambda x, name: x @ w[f"{name}.weight"].T + w[f"{name}.bias"]
    for i in range(int(cfg["num_layers"])):
        p = f"layers.{i}"
        q, k, v = (
            lin(x, f"{p}.attention.{name}").reshape(n, heads, head_dim).transpose(1, 0, 2)
            for name in "qkv"
        )
        att = _softmax(q @ k.transpose(0, 2, 1) / np.sqrt(head_dim))
        ctx = (att @ v).transpose(1, 0, 2).reshape(n, hidden)
        x = _layer_norm(
            x + lin(ctx, f"{p}.attention.out"),
            w[f"{p}.attention.ln.weight"],
            w[f"{p}.attention.ln.bias"],
            eps,
        )
        h = _gelu(lin(x, f"{p}.ffn.in"))
        x = _layer_norm(
            x + lin(h, f"{p}.ffn.out"), w[f"{p}.ffn.ln.weight"], w[f"{p}.ffn.ln.bias"], eps
        )
    if "qa.weight" in w:
        return lin(x, "qa")
    return x


def _verify(checkpoint: Checkpoint, out_dir: Path, qa_head: bool, tolerance: float) -> None:
    with np.load(out_dir / GRAPH_NAME) as npz:
        weights = {k: npz[k] for k in npz.files}
    cfg = json.loads((out_dir / CONFIG_NAME).read_text(encoding="utf-8"))
    rng = np.random.default_rng(0)
    vocab = checkpoint.tokenizer.get_vocab_size()
    model = checkpoint.model.eval()
    for _ in range(3):
        # skip special ids: pad tokens shift the framework's position ids
        ids = rng.integers(4, vocab, size=int(rng.integers(4, 24))).tolist()
        got = _reference_forward(weights, cfg, ids)
        with torch.no_grad():
            t = torch.tensor([ids], dtype=torch.long)
            out = model(input_ids=t, attention_mask=torch.ones_like(t))
            if qa_head:
                want = torch.stack([out.start_logits[0], out.end_logits[0]], dim=-1).numpy()
            else:
                want = model.roberta(
                    input_ids=t, attention_mask=torch.ones_like(t)
                ).last_hidden_state[0].numpy()
        diff = float(np.abs(got - want).max())
        if diff > tolerance:
            raise ExportVerificationError(
                f"exported graph deviates by {diff:.2e} > {tolerance:.0e}"
            )


def export_bundle(
    checkpoint: Checkpoint,
    out_dir: str | Path,
    model_name: str = "fine-tuned",
    qa_head: bool = True,
    tolerance: float = 1e-3,
) -> Path:
    """Write and verify a bundle; ``qa_head=False`` exports the embedder."""
    out_dir = Path(out_dir)
    out_dir.mkdir(parents=True, exist_ok=True)
    model = checkpoint.model
    weights = _map_state_dict(model)
    if not qa_head:
        weights.pop("qa.weight", None)
        weights.pop("qa.bias", None)
    np.savez(out_dir / GRAPH_NAME, **weights)

    pad_id, _, _ = special_ids(checkpoint.tokenizer)
    graph_config = {
        "num_layers": model.config.num_hidden_layers,
        "num_heads": model.config.num_attention_heads,
        "hidden_size": model.config.hidden_size,
        "layer_norm_eps": model.config.layer_norm_eps,
        "pad_token_id": pad_id,
    }
    (out_dir / CONFIG_NAME).write_text(
        json.dumps(graph_config, indent=2, sort_keys=True) + "\n", encoding="utf-8"
    )
    checkpoint.tokenizer.save(str(out_dir / TOKENIZER_NAME))

    entries = {
        "kind": "numpy-encoder",
        "model_name": model_name,
        "graph": GRAPH_NAME,
        "tokenizer": TOKENIZER_NAME,
        "max_seq_len": str(checkpoint.config.max_seq_len),
        "stride": str(checkpoint.config.stride),
    }
    lines = [f"{k} = {v}" for k, v in entries.items()]
    for name in (GRAPH_NAME, CONFIG_NAME, TOKENIZER_NAME):
        lines.append(f"hash.{name} = {_sha256(out_dir / name)}")
    (out_dir / MANIFEST_NAME).write_text("\n".join(lines) + "\n", encoding="utf-8")

    _verify(checkpoint, out_dir, qa_head, tolerance)
    return out_dir
