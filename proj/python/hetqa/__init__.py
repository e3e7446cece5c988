"""Python access to the hetqa core.

Records (relations, tables, passages) are plain dicts shaped like the JSONL
inputs of the command-line tool.
"""

import json

from . import _hetqa
from ._hetqa import (  # noqa: F401
    Bm25Index,
    DenseIndex,
    EmbeddingError,
    Error,
    HashingEmbedder,
    IoError,
    ParseError,
    RemoteError,
    ValidationError,
    count_tokens,
    has_answer,
    merge_quota,
    normalize_answer,
    read_baseline,
)


def linearize_relations(relations):
    """One sentence per relation dict."""
    return _hetqa.linearize_relations_json(json.dumps(list(relations)))


def two_hop(relations, seeds):
    """Returns (relation ids in the 2-hop neighborhood, number of unknown seeds)."""
    return _hetqa.two_hop_json(json.dumps(list(relations)), list(seeds))


def flatten_kb(relations, token_limit=100):
    return json.loads(_hetqa.flatten_kb_json(json.dumps(list(relations)), token_limit))


def flatten_tables(tables, token_limit=100, mode="simple"):
    return json.loads(_hetqa.flatten_tables_json(json.dumps(list(tables)), token_limit, mode))


def build_dense_index(passages, dim=256):
    """Dense index over passage dicts using the hashing embedder."""
    return DenseIndex.build_hashing_json(json.dumps(list(passages)), dim)


def build_bm25(passages, k1=0.9, b=0.4):
    return Bm25Index.build_json(json.dumps(list(passages)), k1, b)


def parse_config(text):
    """Validates config text and returns it in canonical form."""
    return _hetqa.parse_config(text)


def run_e2e(config):
    """Runs the hermetic pipeline. `config` maps config keys to values."""
    text = "".join(f"{k} = {v}\n" for k, v in config.items())
    return json.loads(_hetqa.run_e2e_json(text))
