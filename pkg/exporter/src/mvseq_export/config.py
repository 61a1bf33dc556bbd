"""Export configuration."""

from __future__ import annotations

from dataclasses import dataclass, field
from pathlib import Path


@dataclass
class ExportConfig:
    """Settings for one export run.

    Exactly one input source must be given: ``dataset_dir`` (a local
    BEIR-layout directory with corpus.jsonl / queries.jsonl / qrels/*.tsv)
    or ``jsonl_paths`` (files of ``{"_id": ..., "text": ...}`` lines).

    Max lengths include the sequence-level marker row, so they must leave
    room for the marker plus at least one content token.
    """

    model: str
    output_dir: str | Path
    dataset_dir: str | Path | None = None
    jsonl_paths: tuple[str | Path, ...] = field(default_factory=tuple)
    doc_max_length: int = 300
    query_max_length: int = 32
    batch_size: int = 16
    device: str = "cpu"
    qrels_split: str = "test"
    deterministic: bool = True

    def __post_init__(self):
        if not self.model:
            raise ValueError("model identifier must be non-empty")
        if self.doc_max_length < 2:
            raise ValueError(
                f"doc_max_length must be >= 2, got {self.doc_max_length}"
            )
        if self.query_max_length < 2:
            raise ValueError(
                f"query_max_length must be >= 2, got {self.query_max_length}"
            )
        if self.batch_size < 1:
            raise ValueError(f"batch_size must be >= 1, got {self.batch_size}")
        sources = (self.dataset_dir is not None) + (len(self.jsonl_paths) > 0)
        if sources != 1:
            raise ValueError(
                "exactly one input source required: dataset_dir or jsonl_paths"
            )
        self.output_dir = Path(self.output_dir)
        if self.dataset_dir is not None:
            self.dataset_dir = Path(self.dataset_dir)
        self.jsonl_paths = tuple(Path(p) for p in self.jsonl_paths)
