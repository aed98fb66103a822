import sys
from pathlib import Path

import pytest

sys.path.insert(0, str(Path(__file__).parent))

from polyprune import toy


@pytest.fixture(scope="session")
def tiny_store():
    """Shared 2-layer random model; treat as read-only."""
    return toy.toy_model(seed=11)


@pytest.fixture()
def toy_corpus_file(tmp_path):
    """50-pair bilingual TSV on disk."""
    pairs = toy.toy_pairs(50, seed=3)
    path = tmp_path / "pairs.tsv"
    path.write_text(
        "# toy corpus\n" + "\n".join(f"{p.src_text}\t{p.tgt_text}" for p in pairs) + "\n",
        encoding="utf-8",
    )
    return path
