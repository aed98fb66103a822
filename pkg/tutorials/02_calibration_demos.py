"""Render few-shot demonstrations and assemble a calibration set.

A translation demonstration stacks `src-name: sentence / tgt-name: sentence`
line pairs, one `[EOS]` marker per pair; the monolingual variant keeps only
one language's lines. A calibration set is N such demonstrations built from
N*n sentence pairs sampled without replacement under a fixed seed.
"""

from polyprune import (
    MonolingualKind,
    TranslationKind,
    assemble_calibration,
    build_monolingual_demo,
    build_translation_demo,
    build_translation_prompt,
)
from polyprune.toy import toy_pairs


def main():
    pairs = toy_pairs(500, seed=0)
    print(f"toy bilingual corpus: {len(pairs)} pairs")
    print(f"  e.g. {pairs[0].src_text!r} -> {pairs[0].tgt_text!r}\n")

    demo = build_translation_demo(pairs[:2], "English", "Cipher")
    print("2-shot translation demonstration:")
    print(demo.text)

    mono = build_monolingual_demo([p.src_text for p in pairs[:2]], "English")
    print("matching monolingual demonstration:")
    print(mono.text)

    prompt = build_translation_prompt(demo, "bade kilo mu")
    print("generation prompt (ends right where the translation starts):")
    print(repr(prompt[-60:]))

    calib = assemble_calibration(
        pairs, N=100, n=4, kind=TranslationKind("English", "Cipher"), seed=1,
    )
    print(f"\ncalibration set: {len(calib.demos)} demos x {calib.n_shots} shots "
          f"= {len(calib.demos) * calib.n_shots} pairs consumed")

    mono_calib = assemble_calibration(
        pairs, N=100, n=4, kind=MonolingualKind("Cipher", side="tgt"), seed=1,
    )
    print(f"monolingual set from the target side: {mono_calib.source}")
    rerun = assemble_calibration(
        pairs, N=100, n=4, kind=TranslationKind("English", "Cipher"), seed=1,
    )
    print(f"same seed reproduces the set exactly: {rerun == calib}")


if __name__ == "__main__":
    main()
