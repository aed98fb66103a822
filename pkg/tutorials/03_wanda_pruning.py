"""Collect activation statistics and prune by weights-times-activations.

Streams a calibration set through the model while accumulating per-feature
squared sums at every linear layer, scores each weight as |w| * feature
norm, and zeroes the lowest-scoring 30% of every output row. The
counter-calibrated variant additionally divides by the norms a second
stream produces, demoting weights that serve the counter stream.
"""

from pathlib import Path

import numpy as np

from polyprune import (
    TranslationKind,
    apply_mask,
    assemble_calibration,
    build_mask,
    forward_with_capture,
    merge_stats,
    ratio_scores,
    save_mask,
    wanda_scores,
    ByteTokenizer,
)
from polyprune.pruning import sparsity_rows
from polyprune.toy import toy_model, toy_pairs

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)


def stream_stats(store, texts):
    tok = ByteTokenizer()
    merged = None
    for text in texts:
        _, stats = forward_with_capture(store, tok.encode(text), capture=store.prunable_names())
        merged = stats if merged is None else merge_stats(merged, stats)
    return merged


def main():
    store = toy_model(seed=5)
    pairs = toy_pairs(200, seed=1)

    calib = assemble_calibration(
        pairs, N=20, n=4, kind=TranslationKind("English", "Cipher"), seed=2,
    )
    stats = stream_stats(store, [d.text for d in calib.demos])
    print(f"calibration tokens per layer: {stats.token_count('block.0.attn.q')}")
    norms = stats.norms("block.0.mlp.up")
    print(f"block.0.mlp.up feature norms: min {norms.min():.3f}, "
          f"max {norms.max():.3f} (outliers drive the scores)\n")

    scores = wanda_scores(store, stats)
    mask = build_mask(scores, alpha=0.3, provenance="tutorial translation demos")
    pruned = apply_mask(store, mask)
    save_mask(mask, OUT / "mask.nlm")
    print("per-layer sparsity after alpha=0.3:")
    for name, rows, cols, pruned_count, fraction in sparsity_rows(mask)[:4]:
        print(f"  {name:20s} {pruned_count:5d} / {rows * cols} zeroed ({fraction:.1%})")
    print("  ...")

    kept = pruned["block.0.attn.q"]
    print(f"\npruned matrix really is zeroed: "
          f"{np.count_nonzero(kept == 0.0)} zeros in block.0.attn.q")

    # Counter-calibration: pretend structured 'code' text is the capability
    # we want to remove; features loud on it get demoted.
    code = ["def f(x):\n    return x + 1\n" * 8] * 20
    stats_z = stream_stats(store, code)
    refined = ratio_scores(store, stats, stats_z)
    refined_mask = build_mask(refined, alpha=0.3, provenance="tutorial ratio")
    changed = sum(
        int((mask.masks[n] != refined_mask.masks[n]).sum()) for n in mask.masks
    )
    print(f"ratio refinement moved {changed} mask entries vs plain scoring")


if __name__ == "__main__":
    main()
