"""Numpy execution of an exported transformer-encoder graph.

The portable bundle stores the encoder as a flat ``.npz`` weight archive
plus a JSON architecture config; this module runs the forward pass with
plain numpy so inference needs no ML framework.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np
from scipy.special import erf


def gelu(x: np.ndarray) -> np.ndarray:
    return 0.5 * x * (1.0 + erf(x / np.sqrt(2.0)))


def layer_norm(x: np.ndarray, weight: np.ndarray, bias: np.ndarray, eps: float) -> np.ndarray:
    mu = x.mean(axis=-1, keepdims=True)
    var = ((x - mu) ** 2).mean(axis=-1, keepdims=True)
    return (x - mu) / np.sqrt(var + eps) * weight + bias


def softmax(x: np.ndarray, axis: int = -1) -> np.ndarray:
    x = x - x.max(axis=axis, keepdims=True)
    e = np.exp(x)
    return e / e.sum(axis=axis, keepdims=True)


class NumpyEncoder:
    """RoBERTa-style encoder (+ optional span head) over npz weights."""

    def __init__(self, weights: dict[str, np.ndarray], config: dict):
        self.w = {k: np.asarray(v, dtype=np.float32) for k, v in weights.items()}
        self.cfg = config
        self.num_layers = int(config["num_layers"])
        self.num_heads = int(config["num_heads"])
        self.hidden = int(config["hidden_size"])
        self.head_dim = self.hidden // self.num_heads
        self.eps = float(config.get("layer_norm_eps", 1e-5))
        self.pad_token_id = int(config.get("pad_token_id", 1))
        self.has_qa_head = "qa.weight" in self.w

    @classmethod
    def load(cls, graph_path: str | Path, config_path: str | Path | None = None) -> "NumpyEncoder":
        graph_path = Path(graph_path)
        if config_path is None:
            config_path = graph_path.with_suffix(".json")
        with open(config_path, encoding="utf-8") as fh:
            config = json.load(fh)
        with np.load(graph_path) as npz:
            weights = {k: npz[k] for k in npz.files}
        return cls(weights, config)

    def _linear(self, x: np.ndarray, name: str) -> np.ndarray:
        return x @ self.w[f"{name}.weight"].T + self.w[f"{name}.bias"]

    def hidden_states(self, token_ids: list[int]) -> np.ndarray:
        """Final-layer hidden states, shape (seq_len, hidden)."""
        ids = np.asarray(token_ids, dtype=np.int64)
        n = ids.shape[0]
        # RoBERTa numbers positions from pad_token_id + 1
        positions = np.arange(n, dtype=np.int64) + self.pad_token_id + 1
        x = (
            self.w["embeddings.word"][ids]
            + self.w["embeddings.position"][positions]
            + self.w["embeddings.token_type"][0]
        )
        x = layer_norm(x, self.w["embeddings.ln.weight"], self.w["embeddings.ln.bias"], self.eps)
        for i in range(self.num_layers):
            p = f"layers.{i}"
            q = self._linear(x, f"{p}.attention.q")
            k = self._linear(x, f"{p}.attention.k")
            v = self._linear(x, f"{p}.attention.v")
            q = q.reshape(n, self.num_heads, self.head_dim).transpose(1, 0, 2)
            k = k.reshape(n, self.num_heads, self.head_dim).transpose(1, 0, 2)
            v = v.reshape(n, self.num_heads, self.head_dim).transpose(1, 0, 2)
            att = softmax(q @ k.transpose(0, 2, 1) / np.sqrt(self.head_dim))
            ctx = (att @ v).transpose(1, 0, 2).reshape(n, self.hidden)
            x = layer_norm(
                x + self._linear(ctx, f"{p}.attention.out"),
                self.w[f"{p}.attention.ln.weight"],
                self.w[f"{p}.attention.ln.bias"],
                self.eps,
            )
            h = gelu(self._linear(x, f"{p}.ffn.in"))
            x = layer_norm(
                x + self._linear(h, f"{p}.ffn.out"),
                self.w[f"{p}.ffn.ln.weight"],
                self.w[f"{p}.ffn.ln.bias"],
                self.eps,
            )
        return x

    def qa_logits(self, token_ids: list[int]) -> tuple[np.ndarray, np.ndarray]:
        """(start_logits, end_logits), one score per token position."""
        if not self.has_qa_head:
            raise ValueError("bundle has no span head (embedder-only graph)")
        h = self.hidden_states(token_ids)
        logits = self._linear(h, "qa")
        return logits[:, 0].astype(np.float64), logits[:, 1].astype(np.float64)
