"""Incremental writer for token-embedding corpus directories.

Produces the same directory layout the retrieval pipeline consumes:

    manifest.json    {format_version, dim, doc_count, has_attention,
                     has_token_ids, docs: [{id, length, emb_offset,
                     tok_offset, att_offset}]}
    embeddings.bin   little-endian float32, row-major (length x dim) per doc
    tokens.bin       little-endian uint32, length per doc (optional)
    attention.bin    little-endian float32, length per doc (optional)

Binary files are headerless; the manifest carries all byte offsets.
Documents are appended one at a time in arrival order, so arbitrarily large
corpora stream through without being held in memory.
"""

from __future__ import annotations

import json
from pathlib import Path

import numpy as np

FORMAT_VERSION = 1


class CorpusWriter:
    """Append documents to a corpus directory; call close() to finalize.

    Usable as a context manager.  All documents must share one embedding
    dim; whether token ids and attention are present is fixed by the
    constructor flags and enforced per document.
    """

    def __init__(self, path: str | Path, *, dim: int,
                 has_token_ids: bool, has_attention: bool):
        if dim < 1:
            raise ValueError(f"dim must be >= 1, got {dim}")
        self.path = Path(path)
        self.path.mkdir(parents=True, exist_ok=True)
        self.dim = int(dim)
        self.has_token_ids = bool(has_token_ids)
        self.has_attention = bool(has_attention)
        self._entries: list[dict] = []
        self._seen: set[str] = set()
        self._emb_off = 0
        self._tok_off = 0
        self._att_off = 0
        self._emb_f = open(self.path / "embeddings.bin", "wb")
        self._tok_f = open(self.path / "tokens.bin", "wb") if has_token_ids else None
        self._att_f = open(self.path / "attention.bin", "wb") if has_attention else None
        self._closed = False

    def add(self, doc_id: str, embeddings: np.ndarray,
            token_ids: np.ndarray | None = None,
            attention: np.ndarray | None = None) -> None:
        if self._closed:
            raise ValueError("writer is closed")
        if doc_id in self._seen:
            raise ValueError(f"duplicate doc_id {doc_id!r}")
        emb = np.ascontiguousarray(embeddings, dtype=np.float32)
        if emb.ndim != 2 or emb.shape[0] < 1:
            raise ValueError(f"doc {doc_id!r}: embeddings must be a non-empty 2-D matrix")
        if emb.shape[1] != self.dim:
            raise ValueError(
                f"doc {doc_id!r}: dim {emb.shape[1]} != corpus dim {self.dim}"
            )
        length = emb.shape[0]

        entry = {"id": doc_id, "length": length, "emb_offset": self._emb_off,
                 "tok_offset": None, "att_offset": None}
        self._emb_f.write(emb.astype("<f4", copy=False).tobytes())
        self._emb_off += length * self.dim * 4

        if self.has_token_ids:
            if token_ids is None:
                raise ValueError(f"doc {doc_id!r}: token_ids required")
            tok = np.ascontiguousarray(token_ids, dtype=np.uint32)
            if tok.shape != (length,):
                raise ValueError(
                    f"doc {doc_id!r}: token_ids length {tok.shape} != row count {length}"
                )
            entry["tok_offset"] = self._tok_off
            self._tok_f.write(tok.astype("<u4", copy=False).tobytes())
            self._tok_off += length * 4

        if self.has_attention:
            if attention is None:
                raise ValueError(f"doc {doc_id!r}: attention required")
            att = np.ascontiguousarray(attention, dtype=np.float32)
            if att.shape != (length,):
                raise ValueError(
                    f"doc {doc_id!r}: attention length {att.shape} != row count {length}"
                )
            entry["att_offset"] = self._att_off
            self._att_f.write(att.astype("<f4", copy=False).tobytes())
            self._att_off += length * 4

        self._seen.add(doc_id)
        self._entries.append(entry)

    @property
    def doc_count(self) -> int:
        return len(self._entries)

    @property
    def token_count(self) -> int:
        return sum(e["length"] for e in self._entries)

    def abort(self) -> None:
        """Close file handles without writing a manifest (failed export)."""
        self._closed = True
        for f in (self._emb_f, self._tok_f, self._att_f):
            if f is not None and not f.closed:
                f.close()

    def close(self) -> None:
        if self._closed:
            return
        self._emb_f.close()
        if self._tok_f is not None:
            self._tok_f.close()
        if self._att_f is not None:
            self._att_f.close()
        if not self._entries:
            raise ValueError("empty corpus: no documents written")
        manifest = {
            "format_version": FORMAT_VERSION,
            "dim": self.dim,
            "doc_count": len(self._entries),
            "has_attention": self.has_attention,
            "has_token_ids": self.has_token_ids,
            "docs": self._entries,
        }
        (self.path / "manifest.json").write_text(
            json.dumps(manifest, indent=1), encoding="utf-8"
        )
        self._closed = True

    def __enter__(self) -> "CorpusWriter":
        return self

    def __exit__(self, exc_type, exc, tb) -> None:
        if exc_type is None:
            self.close()
        else:
            self.abort()
