"""Transformer encoding with per-token attention totals.

Wraps a Hugging Face checkpoint (local path or hub identifier) and turns
texts into token-embedding matrices:

- embeddings: the final hidden states, passed through the checkpoint's
  output projection when it ships one (a ``linear.weight`` tensor stored
  alongside the transformer weights, the convention used by late-interaction
  retrieval checkpoints).  Embeddings are exported unnormalized; the
  retrieval pipeline normalizes as its own explicit step.
- token ids: the tokenizer's ids for the same positions.
- attention totals: attention[j] = the total attention token j receives,
  summed over all heads and all source positions of the final transformer
  layer, with padding positions excluded on both axes.  Each valid source
  distribution sums to 1 per head, so a document's totals sum to
  num_heads x num_valid_tokens.

No query-expansion tokens are ever appended: inputs are encoded exactly as
the tokenizer produces them (marker/special tokens included), truncated to
the configured maximum length.  Row 0 of every matrix is the tokenizer's
sequence-start token, which the retrieval pipeline treats as the protected
marker row.
"""

from __future__ import annotations

from dataclasses import dataclass
from pathlib import Path
from typing import Iterable, Iterator, Sequence

import numpy as np
import torch
from transformers import AutoModel, AutoTokenizer


@dataclass
class EncodedText:
    """One encoded input: (length, dim) embeddings plus aligned metadata."""

    doc_id: str
    embeddings: np.ndarray
    token_ids: np.ndarray
    attention: np.ndarray | None = None

    @property
    def length(self) -> int:
        return int(self.embeddings.shape[0])


def _checkpoint_weight_file(model_id: str) -> Path | None:
    """Locate the checkpoint's weight file without downloading anything new."""
    names = ("model.safetensors", "pytorch_model.bin")
    local = Path(model_id)
    if local.is_dir():
        for name in names:
            if (local / name).is_file():
                return local / name
        return None
    try:
        from transformers.utils import cached_file

        for name in names:
            found = cached_file(
                model_id,
                name,
                _raise_exceptions_for_missing_entries=False,
                _raise_exceptions_for_connection_errors=False,
            )
            if found:
                return Path(found)
    except Exception:
        return None
    return None


def _load_projection(model_id: str) -> tuple[torch.Tensor | None, torch.Tensor | None]:
    """Fetch the optional output projection (linear.weight / linear.bias)."""
    weight_file = _checkpoint_weight_file(model_id)
    if weight_file is None:
        return None, None
    if weight_file.suffix == ".safetensors":
        from safetensors import safe_open

        with safe_open(str(weight_file), framework="pt") as f:
            keys = set(f.keys())
            if "linear.weight" not in keys:
                return None, None
            weight = f.get_tensor("linear.weight")
            bias = f.get_tensor("linear.bias") if "linear.bias" in keys else None
    else:
        state = torch.load(weight_file, map_location="cpu", weights_only=True)
        weight = state.get("linear.weight")
        bias = state.get("linear.bias")
        if weight is None:
            return None, None
    weight = weight.float()
    return weight, (bias.float() if bias is not None else None)


class Encoder:
    """Batched text encoder over a pretrained transformer checkpoint."""

    def __init__(self, model_id: str, *, device: str = "cpu",
                 deterministic: bool = True):
        self.model_id = model_id
        self.device = torch.device(device)
        if deterministic:
            torch.manual_seed(0)
            torch.use_deterministic_algorithms(True, warn_only=True)
        self.tokenizer = AutoTokenizer.from_pretrained(model_id)
        # eager attention: the sdpa/flash kernels cannot return per-head
        # attention weights, which the document export needs
        self.model = AutoModel.from_pretrained(model_id, attn_implementation="eager")
        self.model.to(self.device)
        self.model.eval()
        weight, bias = _load_projection(model_id)
        self.projection = None if weight is None else weight.to(self.device)
        self.projection_bias = None if bias is None else bias.to(self.device)

    @property
    def output_dim(self) -> int:
        """Width of exported embeddings (projection width when present)."""
        if self.projection is not None:
            return int(self.projection.shape[0])
        return int(self.model.config.hidden_size)

    @property
    def num_heads(self) -> int:
        return int(self.model.config.num_attention_heads)

    def encode_batch(self, ids: Sequence[str], texts: Sequence[str], *,
                     max_length: int, with_attention: bool) -> list[EncodedText]:
        enc = self.tokenizer(
            list(texts),
            padding=True,
            truncation=True,
            max_length=max_length,
            return_tensors="pt",
        )
        enc = {k: v.to(self.device) for k, v in enc.items()}
        with torch.no_grad():
            out = self.model(**enc, output_attentions=with_attention)

        hidden = out.last_hidden_state  # (B, L, hidden)
        if self.projection is not None:
            hidden = hidden @ self.projection.T
            if self.projection_bias is not None:
                hidden = hidden + self.projection_bias

        if with_attention:
            if not getattr(out, "attentions", None):
                raise RuntimeError(
                    f"model {self.model_id!r} did not return attention weights"
                )
            final_layer = out.attentions[-1]  # (B, heads, L, L)

        mask = enc["attention_mask"].bool()
        results: list[EncodedText] = []
        for i, doc_id in enumerate(ids):
            n = int(mask[i].sum().item())
            if not bool(mask[i, :n].all()):
                raise RuntimeError(
                    f"doc {doc_id!r}: non-contiguous padding mask is unsupported"
                )
            emb = hidden[i, :n].cpu().numpy().astype(np.float32, copy=False)
            tok = enc["input_ids"][i, :n].cpu().numpy().astype(np.uint32)
            att = None
            if with_attention:
                # heads x valid-sources x valid-targets, summed down to targets
                block = final_layer[i][:, :n, :n]
                att = block.sum(dim=(0, 1)).cpu().numpy().astype(np.float32)
            results.append(EncodedText(doc_id, emb, tok, att))
        return results

    def encode_all(self, items: Iterable[tuple[str, str]], *, max_length: int,
                   with_attention: bool, batch_size: int) -> Iterator[EncodedText]:
        """Encode (id, text) pairs in arrival order, batching internally."""
        ids: list[str] = []
        texts: list[str] = []
        for doc_id, text in items:
            ids.append(doc_id)
            texts.append(text)
            if len(ids) == batch_size:
                yield from self.encode_batch(
                    ids, texts, max_length=max_length, with_attention=with_attention
                )
                ids, texts = [], []
        if ids:
            yield from self.encode_batch(
                ids, texts, max_length=max_length, with_attention=with_attention
            )
