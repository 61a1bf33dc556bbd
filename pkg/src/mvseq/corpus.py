"""On-disk container for token-level embedding corpora.

Layout of a corpus directory:

    manifest.json    UTF-8 JSON: {format_version, dim, doc_count,
                     has_attention, has_token_ids,
                     docs: [{id, length, emb_offset, tok_offset, att_offset}]}
    embeddings.bin   concatenated little-endian float32, row-major L x d per doc
    tokens.bin       concatenated little-endian uint32, L per doc (optional)
    attention.bin    concatenated little-endian float32, L per doc (optional)

The binaries are headerless; the manifest's byte offsets are the only index.
Embeddings are stored exactly as produced by the encoder (not normalized);
normalization is an explicit compression-pipeline step so that pooling can
average raw vectors.  Row 0 of each document is the protected marker token.

Read handles are immutable and safe to share across threads; a corpus
directory is never mutated in place.
"""

from __future__ import annotations

import json
from dataclasses import dataclass, field
from pathlib import Path
from typing import Iterator, Sequence

import numpy as np

FORMAT_VERSION = 1

MANIFEST_NAME = "manifest.json"
EMBEDDINGS_NAME = "embeddings.bin"
TOKENS_NAME = "tokens.bin"
ATTENTION_NAME = "attention.bin"

# A token matrix is an (L, d) float32 array, one row per token.
TokenMatrix = np.ndarray


class CorpusFormatError(Exception):
    """Raised when a corpus directory violates the on-disk contract."""


@dataclass
class DocumentRecord:
    """One document: embeddings plus optional token ids and attention totals.

    token_ids and attention, when present, are aligned row-for-row with the
    embedding matrix (attention[j] is the total attention received by token j).
    """

    doc_id: str
    embeddings: TokenMatrix
    token_ids: np.ndarray | None = None
    attention: np.ndarray | None = None

    def __post_init__(self):
        self.embeddings = np.ascontiguousarray(self.embeddings, dtype=np.float32)
        if self.embeddings.ndim != 2 or self.embeddings.shape[0] < 1:
            raise ValueError(
                f"doc {self.doc_id!r}: embeddings must be a non-empty 2-D matrix"
            )
        n = self.embeddings.shape[0]
        if self.token_ids is not None:
            self.token_ids = np.ascontiguousarray(self.token_ids, dtype=np.uint32)
            if self.token_ids.shape != (n,):
                raise ValueError(
                    f"doc {self.doc_id!r}: token_ids length {self.token_ids.shape} "
                    f"!= row count {n}"
                )
        if self.attention is not None:
            self.attention = np.ascontiguousarray(self.attention, dtype=np.float32)
            if self.attention.shape != (n,):
                raise ValueError(
                    f"doc {self.doc_id!r}: attention length {self.attention.shape} "
                    f"!= row count {n}"
                )

    @property
    def length(self) -> int:
        return int(self.embeddings.shape[0])

    @property
    def dim(self) -> int:
        return int(self.embeddings.shape[1])


@dataclass
class ManifestEntry:
    id: str
    length: int
    emb_offset: int
    tok_offset: int | None = None
    att_offset: int | None = None


@dataclass
class CorpusManifest:
    format_version: int
    dim: int
    doc_count: int
    has_attention: bool
    has_token_ids: bool
    docs: list[ManifestEntry] = field(default_factory=list)

    def to_json(self) -> str:
        payload = {
            "format_version": self.format_version,
            "dim": self.dim,
            "doc_count": self.doc_count,
            "has_attention": self.has_attention,
            "has_token_ids": self.has_token_ids,
            "docs": [
                {
                    "id": e.id,
                    "length": e.length,
                    "emb_offset": e.emb_offset,
                    "tok_offset": e.tok_offset,
                    "att_offset": e.att_offset,
                }
                for e in self.docs
            ],
        }
        return json.dumps(payload, indent=1)

    @classmethod
    def from_json(cls, text: str) -> "CorpusManifest":
        raw = json.loads(text)
        version = raw.get("format_version")
        if version != FORMAT_VERSION:
            raise CorpusFormatError(
                f"unsupported format_version {version!r} (expected {FORMAT_VERSION})"
            )
        docs = [
            ManifestEntry(
                id=d["id"],
                length=int(d["length"]),
                emb_offset=int(d["emb_offset"]),
                tok_offset=None if d.get("tok_offset") is None else int(d["tok_offset"]),
                att_offset=None if d.get("att_offset") is None else int(d["att_offset"]),
            )
            for d in raw["docs"]
        ]
        return cls(
            format_version=version,
            dim=int(raw["dim"]),
            doc_count=int(raw["doc_count"]),
            has_attention=bool(raw["has_attention"]),
            has_token_ids=bool(raw["has_token_ids"]),
            docs=docs,
        )


def write_corpus(records: Sequence[DocumentRecord], path: str | Path) -> CorpusManifest:
    """Write records to a corpus directory, returning the manifest.

    All records must share one embedding dim, doc ids must be unique, and
    token_ids/attention must be present for all records or for none.
    """
    if len(records) == 0:
        raise ValueError("empty corpus: no records to write")

    dim = records[0].dim
    has_tokens = records[0].token_ids is not None
    has_attention = records[0].attention is not None
    seen: set[str] = set()
    for rec in records:
        if rec.dim != dim:
            raise ValueError(
                f"mixed dims: doc {rec.doc_id!r} has dim {rec.dim}, expected {dim}"
            )
        if rec.doc_id in seen:
            raise ValueError(f"duplicate doc_id {rec.doc_id!r}")
        seen.add(rec.doc_id)
        if (rec.token_ids is not None) != has_tokens:
            raise ValueError(
                f"doc {rec.doc_id!r}: token_ids must be present for all records or none"
            )
        if (rec.attention is not None) != has_attention:
            raise ValueError(
                f"doc {rec.doc_id!r}: attention must be present for all records or none"
            )

    path = Path(path)
    path.mkdir(parents=True, exist_ok=True)

    manifest = CorpusManifest(
        format_version=FORMAT_VERSION,
        dim=dim,
        doc_count=len(records),
        has_attention=has_attention,
        has_token_ids=has_tokens,
    )

    emb_off = 0
    tok_off = 0
    att_off = 0
    with open(path / EMBEDDINGS_NAME, "wb") as emb_f:
        tok_f = open(path / TOKENS_NAME, "wb") if has_tokens else None
        att_f = open(path / ATTENTION_NAME, "wb") if has_attention else None
        try:
            for rec in records:
                entry = ManifestEntry(id=rec.doc_id, length=rec.length, emb_offset=emb_off)
                emb_f.write(rec.embeddings.astype("<f4", copy=False).tobytes())
                emb_off += rec.length * dim * 4
                if tok_f is not None:
                    entry.tok_offset = tok_off
                    tok_f.write(rec.token_ids.astype("<u4", copy=False).tobytes())
                    tok_off += rec.length * 4
                if att_f is not None:
                    entry.att_offset = att_off
                    att_f.write(rec.attention.astype("<f4", copy=False).tobytes())
                    att_off += rec.length * 4
                manifest.docs.append(entry)
        finally:
            if tok_f is not None:
                tok_f.close()
            if att_f is not None:
                att_f.close()

    (path / MANIFEST_NAME).write_text(manifest.to_json(), encoding="utf-8")
    return manifest


class CorpusReader:
    """Lazy read handle over a corpus directory.

    Records are fetched by id or by iteration in manifest order; bytes are
    read on demand so the handle is cheap to open on large corpora.
    """

    def __init__(self, path: str | Path):
        self.path = Path(path)
        manifest_path = self.path / MANIFEST_NAME
        if not manifest_path.is_file():
            raise CorpusFormatError(f"missing file: {manifest_path}")
        self.manifest = CorpusManifest.from_json(manifest_path.read_text(encoding="utf-8"))
        self._by_id = {e.id: e for e in self.manifest.docs}
        self._check_sizes()

    def _check_sizes(self):
        m = self.manifest
        expected = {
            EMBEDDINGS_NAME: sum(e.length for e in m.docs) * m.dim * 4,
        }
        if m.has_token_ids:
            expected[TOKENS_NAME] = sum(e.length for e in m.docs) * 4
        if m.has_attention:
            expected[ATTENTION_NAME] = sum(e.length for e in m.docs) * 4
        for name, size in expected.items():
            f = self.path / name
            if not f.is_file():
                raise CorpusFormatError(f"missing file: {f}")
            actual = f.stat().st_size
            if actual != size:
                raise CorpusFormatError(
                    f"size mismatch in {name}: manifest implies {size} bytes, "
                    f"file has {actual}"
                )

    @property
    def dim(self) -> int:
        return self.manifest.dim

    @property
    def has_attention(self) -> bool:
        return self.manifest.has_attention

    @property
    def has_token_ids(self) -> bool:
        return self.manifest.has_token_ids

    def doc_ids(self) -> list[str]:
        return [e.id for e in self.manifest.docs]

    def __len__(self) -> int:
        return self.manifest.doc_count

    def __contains__(self, doc_id: str) -> bool:
        return doc_id in self._by_id

    def _read(self, name: str, offset: int, count: int, dtype: str) -> np.ndarray:
        with open(self.path / name, "rb") as f:
            f.seek(offset)
            buf = f.read(count * 4)
        if len(buf) != count * 4:
            raise CorpusFormatError(
                f"size mismatch in {name}: short read at offset {offset}"
            )
        return np.frombuffer(buf, dtype=dtype).copy()

    def get(self, doc_id: str) -> DocumentRecord:
        entry = self._by_id.get(doc_id)
        if entry is None:
            raise KeyError(f"doc_id {doc_id!r} not in corpus")
        return self._read_entry(entry)

    def _read_entry(self, entry: ManifestEntry) -> DocumentRecord:
        m = self.manifest
        emb = self._read(EMBEDDINGS_NAME, entry.emb_offset, entry.length * m.dim, "<f4")
        emb = emb.reshape(entry.length, m.dim)
        tok = att = None
        if m.has_token_ids:
            tok = self._read(TOKENS_NAME, entry.tok_offset, entry.length, "<u4")
        if m.has_attention:
            att = self._read(ATTENTION_NAME, entry.att_offset, entry.length, "<f4")
        return DocumentRecord(entry.id, emb, token_ids=tok, attention=att)

    def __iter__(self) -> Iterator[DocumentRecord]:
        for entry in self.manifest.docs:
            yield self._read_entry(entry)


def read_corpus(path: str | Path) -> CorpusReader:
    """Open a lazy read handle over a corpus directory."""
    return CorpusReader(path)


def validate_corpus(path: str | Path) -> list[str]:
    """Check every corpus invariant; return a report of violations.

    An empty report means the corpus is valid.  Violations are reported, not
    raised, so a single pass surfaces all problems at once.
    """
    path = Path(path)
    report: list[str] = []

    manifest_path = path / MANIFEST_NAME
    if not manifest_path.is_file():
        return [f"missing file: {manifest_path}"]
    try:
        manifest = CorpusManifest.from_json(manifest_path.read_text(encoding="utf-8"))
    except (CorpusFormatError, json.JSONDecodeError, KeyError) as exc:
        return [f"unreadable manifest: {exc}"]

    if manifest.doc_count != len(manifest.docs):
        report.append(
            f"doc_count {manifest.doc_count} != number of manifest entries "
            f"{len(manifest.docs)}"
        )
    if manifest.dim < 1:
        report.append(f"dim must be >= 1, got {manifest.dim}")

    seen: set[str] = set()
    for e in manifest.docs:
        if e.id in seen:
            report.append(f"duplicate doc_id {e.id!r}")
        seen.add(e.id)
        if e.length < 1:
            report.append(f"doc {e.id!r}: length must be >= 1, got {e.length}")

    # Offset accounting: spans must be ascending, non-overlapping, and
    # consistent with each file's size.
    def check_offsets(name: str, offsets: list[tuple[str, int, int]], file_name: str):
        pos = 0
        for doc_id, off, span in offsets:
            if off != pos:
                report.append(
                    f"{file_name}: doc {doc_id!r} {name} offset {off}, expected {pos}"
                )
                pos = off
            pos += span
        f = path / file_name
        if not f.is_file():
            report.append(f"missing file: {f}")
        elif f.stat().st_size != pos:
            report.append(
                f"size mismatch in {file_name}: manifest implies {pos} bytes, "
                f"file has {f.stat().st_size}"
            )

    check_offsets(
        "embedding",
        [(e.id, e.emb_offset, e.length * manifest.dim * 4) for e in manifest.docs],
        EMBEDDINGS_NAME,
    )
    if manifest.has_token_ids:
        check_offsets(
            "token",
            [(e.id, e.tok_offset or 0, e.length * 4) for e in manifest.docs],
            TOKENS_NAME,
        )
    if manifest.has_attention:
        check_offsets(
            "attention",
            [(e.id, e.att_offset or 0, e.length * 4) for e in manifest.docs],
            ATTENTION_NAME,
        )

    if report:
        return report

    # Content-level checks need readable files of the declared sizes.
    reader = CorpusReader(path)
    for rec in reader:
        bad = ~np.isfinite(rec.embeddings)
        if bad.any():
            rows, cols = np.nonzero(bad)
            for r, c in zip(rows[:5], cols[:5]):
                report.append(
                    f"doc {rec.doc_id!r}: non-finite embedding at row {r}, column {c}"
                )
            if len(rows) > 5:
                report.append(
                    f"doc {rec.doc_id!r}: {len(rows)} non-finite embedding values total"
                )
        if rec.attention is not None:
            if not np.isfinite(rec.attention).all():
                report.append(f"doc {rec.doc_id!r}: non-finite attention value")
            elif (rec.attention < 0).any():
                pos = int(np.nonzero(rec.attention < 0)[0][0])
                report.append(
                    f"doc {rec.doc_id!r}: negative attention at position {pos}"
                )
    return report
