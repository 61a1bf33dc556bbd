"""Shared fixtures: tiny offline transformer checkpoints and a small dataset.

Everything is constructed locally — no network. The checkpoints are
randomly initialized (quality is irrelevant; the contracts under test are
shapes, sums, determinism, and file-format interop).
"""

import json
import os

os.environ.setdefault("HF_HUB_OFFLINE", "1")
os.environ.setdefault("TRANSFORMERS_OFFLINE", "1")
os.environ.setdefault("HF_HUB_DISABLE_PROGRESS_BARS", "1")

import pytest
import torch
from transformers import BertConfig, BertModel, BertTokenizer
from transformers.utils import logging as hf_logging

hf_logging.set_verbosity_error()

VOCAB = (
    ["[PAD]", "[UNK]", "[CLS]", "[SEP]", "[MASK]"]
    + list("abcdefghij")
    + ["##" + c for c in "abcdefghij"]
)
HIDDEN = 16
HEADS = 2


def _base_config() -> BertConfig:
    return BertConfig(
        vocab_size=len(VOCAB),
        hidden_size=HIDDEN,
        num_hidden_layers=2,
        num_attention_heads=HEADS,
        intermediate_size=32,
        max_position_embeddings=64,
    )


def _write_tokenizer(path) -> None:
    (path / "vocab.txt").write_text("\n".join(VOCAB) + "\n", encoding="utf-8")
    BertTokenizer(str(path / "vocab.txt")).save_pretrained(path)


@pytest.fixture(scope="session")
def tiny_checkpoint(tmp_path_factory):
    """Plain encoder checkpoint: embeddings come out at hidden size 16."""
    path = tmp_path_factory.mktemp("checkpoint-plain")
    torch.manual_seed(0)
    BertModel(_base_config()).save_pretrained(path)
    _write_tokenizer(path)
    return str(path)


@pytest.fixture(scope="session")
def projected_checkpoint(tmp_path_factory):
    """Checkpoint shipping an output projection (linear.weight, 8 x 16)."""
    path = tmp_path_factory.mktemp("checkpoint-projected")
    config = _base_config()
    config.save_pretrained(path)
    torch.manual_seed(1)
    state = dict(BertModel(config).state_dict())
    state["linear.weight"] = torch.randn(8, HIDDEN)
    torch.save(state, path / "pytorch_model.bin")
    _write_tokenizer(path)
    return str(path)


@pytest.fixture(scope="session")
def encoder(tiny_checkpoint):
    from mvseq_export import Encoder

    return Encoder(tiny_checkpoint)


DOCS = [
    {"_id": "d1", "title": "abc def", "text": "ga hb ic"},
    {"_id": "d2", "title": "", "text": "be ad " * 30},  # long: gets truncated
    {"_id": "d3", "text": "cc dd ee ff"},
    {"_id": "d4", "title": "jj", "text": "ab"},
]
QUERIES = [
    {"_id": "q1", "text": "abc gd"},
    {"_id": "q2", "text": "be ad"},
    {"_id": "q3", "text": "ff"},
]
QRELS_TSV = (
    "query-id\tcorpus-id\tscore\n"
    "q1\td1\t1\n"
    "q2\td2\t2\n"
    "q2\td3\t0\n"
    "q3\td3\t1\n"
)


def _write_jsonl(path, rows):
    path.write_text("".join(json.dumps(r) + "\n" for r in rows), encoding="utf-8")


@pytest.fixture(scope="session")
def beir_dir(tmp_path_factory):
    """A miniature BEIR-layout dataset directory."""
    path = tmp_path_factory.mktemp("beir-tiny")
    _write_jsonl(path / "corpus.jsonl", DOCS)
    _write_jsonl(path / "queries.jsonl", QUERIES)
    (path / "qrels").mkdir()
    (path / "qrels" / "test.tsv").write_text(QRELS_TSV, encoding="utf-8")
    return path
