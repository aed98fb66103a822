"""Demonstration templates and calibration-set assembly."""

import numpy as np
import pytest

from polyprune import toy
from polyprune.demos import (
    BilingualPair,
    MonolingualKind,
    TranslationKind,
    assemble_calibration,
    build_monolingual_demo,
    build_translation_demo,
    build_translation_prompt,
    load_bilingual_tsv,
)
from polyprune.errors import CorpusError, DataError
from polyprune.tokenizer import ByteTokenizer


def test_one_shot_translation_rendering():
    demo = build_translation_demo([BilingualPair("hi", "salut")], "English", "French")
    assert demo.text == "English: hi\nFrench: salut\n[EOS]\n"
    assert demo.kind == TranslationKind("English", "French")


def test_empty_pair_list_rejected():
    with pytest.raises(CorpusError):
        build_translation_demo([], "English", "French")
    with pytest.raises(CorpusError):
        build_monolingual_demo([], "English")


def test_four_shot_demo_marker_and_prefix_counts():
    pairs = toy.toy_pairs(4, seed=1)
    demo = build_translation_demo(pairs, "English", "French")
    assert demo.text.count("[EOS]") == 4
    assert demo.text.count("English:") == 4
    assert demo.text.count("French:") == 4


def test_one_shot_monolingual_rendering():
    demo = build_monolingual_demo(["hi"], "English")
    assert demo.text == "English: hi\n[EOS]\n"
    assert demo.kind == MonolingualKind("English")


def test_monolingual_is_prefix_projection_of_translation():
    pairs = toy.toy_pairs(3, seed=2)
    trans = build_translation_demo(pairs, "English", "French")
    mono = build_monolingual_demo([p.src_text for p in pairs], "English")
    stripped = "".join(
        line + "\n" for line in trans.text.splitlines() if not line.startswith("French:")
    )
    assert stripped == mono.text
    assert mono.text.count("[EOS]") == 3


def test_translation_demo_never_shorter_than_monolingual():
    tok = ByteTokenizer()
    pairs = toy.toy_pairs(4, seed=7)
    trans = build_translation_demo(pairs, "English", "French")
    mono = build_monolingual_demo([p.src_text for p in pairs], "English")
    assert len(tok.encode(trans.text)) >= len(tok.encode(mono.text))


class TestAssemble:
    def test_default_sizes_consume_400_pairs(self):
        corpus = toy.toy_pairs(500, seed=0)
        calib = assemble_calibration(corpus, kind=TranslationKind("English", "French"), seed=1)
        assert len(calib.demos) == 100
        assert calib.n_shots == 4
        total_markers = sum(d.text.count("[EOS]") for d in calib.demos)
        assert total_markers == 400

    def test_degenerate_one_by_one(self):
        corpus = [BilingualPair("hi", "salut")]
        calib = assemble_calibration(corpus, N=1, n=1,
                                     kind=TranslationKind("English", "French"), seed=0)
        assert calib.demos[0].text == "English: hi\nFrench: salut\n[EOS]\n"

    def test_seed_reproduction_and_divergence(self):
        corpus = toy.toy_pairs(1000, seed=5)
        kind = TranslationKind("English", "French")
        a = assemble_calibration(corpus, N=10, n=4, kind=kind, seed=9)
        b = assemble_calibration(corpus, N=10, n=4, kind=kind, seed=9)
        assert a == b
        c = assemble_calibration(corpus, N=10, n=4, kind=kind, seed=10)
        assert a != c
        # Reproduce the draw with the same generator recipe.
        expected = np.random.default_rng(9).choice(1000, size=40, replace=False)
        first_pair = corpus[int(expected[0])]
        assert a.demos[0].text.startswith(f"English: {first_pair.src_text}\n")

    def test_no_pair_reuse_within_set(self):
        corpus = toy.toy_pairs(60, seed=2)
        calib = assemble_calibration(corpus, N=10, n=4,
                                     kind=MonolingualKind("English"), seed=3)
        sentences = []
        for demo in calib.demos:
            sentences += [
                line[len("English: "):]
                for line in demo.text.splitlines() if line.startswith("English: ")
            ]
        assert len(sentences) == 40
        assert len(set(sentences)) == 40

    def test_small_corpus_reports_counts(self):
        with pytest.raises(CorpusError, match=r"need 8.*have 5"):
            assemble_calibration(toy.toy_pairs(5, seed=0), N=4, n=2,
                                 kind=MonolingualKind("English"), seed=0)

    def test_monolingual_side_selection(self):
        corpus = toy.toy_pairs(4, seed=4)
        calib = assemble_calibration(corpus, N=2, n=2,
                                     kind=MonolingualKind("Cipher", side="tgt"), seed=0)
        tgt_texts = {p.tgt_text for p in corpus}
        for demo in calib.demos:
            for line in demo.text.splitlines():
                if line.startswith("Cipher: "):
                    assert line[len("Cipher: "):] in tgt_texts


class TestPrompt:
    def test_prompt_appends_test_source(self):
        demo = build_translation_demo([BilingualPair("hi", "salut")], "English", "French")
        prompt = build_translation_prompt(demo, "bye")
        assert prompt == "English: hi\nFrench: salut\n[EOS]\nEnglish: bye\nFrench:"

    def test_prompt_requires_translation_demo(self):
        mono = build_monolingual_demo(["hi"], "English")
        with pytest.raises(DataError):
            build_translation_prompt(mono, "bye")

    def test_empty_test_sentence_rejected(self):
        demo = build_translation_demo([BilingualPair("hi", "salut")], "English", "French")
        with pytest.raises(DataError):
            build_translation_prompt(demo, "  ")

    def test_prompt_always_ends_with_target_tag(self):
        rng = np.random.default_rng(0)
        corpus = toy.toy_pairs(40, seed=8)
        for trial in range(10):
            k = int(rng.integers(1, 5))
            sample = [corpus[int(j)] for j in rng.choice(len(corpus), size=k, replace=False)]
            demo = build_translation_demo(sample, "English", "Cipher")
            prompt = build_translation_prompt(demo, toy.toy_sentence(rng))
            assert prompt.endswith("Cipher:")


def test_bilingual_tsv_parsing(tmp_path):
    path = tmp_path / "pairs.tsv"
    path.write_text("# comment\nhi\tsalut\n\nbye\tau revoir\n", encoding="utf-8")
    pairs = load_bilingual_tsv(path)
    assert pairs == [BilingualPair("hi", "salut"), BilingualPair("bye", "au revoir")]


def test_bilingual_tsv_rejects_missing_tab(tmp_path):
    path = tmp_path / "pairs.tsv"
    path.write_text("hi salut\n", encoding="utf-8")
    with pytest.raises(DataError, match=":1:"):
        load_bilingual_tsv(path)
