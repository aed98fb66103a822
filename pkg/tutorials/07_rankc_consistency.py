"""Cross-lingual prediction consistency with rank-weighted set precision.

Two label rankings are compared through P@j (top-j set agreement) combined
with softmax weights over j, so agreeing on the top label dominates the
score. The corpus value is the mean over aligned example pairs; identical
rankings everywhere give exactly 1.0.

Note on the toy setup: whole-prompt scoring has no length normalization, so
a near-uniform random model ranks labels almost entirely by verbalizer
length. The demo task below uses equal-length verbalizers so the prompt
content, not its length, decides the rankings being compared.
"""

import numpy as np

from polyprune import (
    ClozeTask,
    EvalExample,
    classify_zero_shot,
    consistency,
    precision_at_j,
    rank_weights,
    rankc,
)
from polyprune.toy import toy_model, toy_sentence


def main():
    print("rank weights by label-set size:")
    for y in (2, 3, 5):
        print(f"  |Y|={y}: {np.round(rank_weights(y), 4)}")

    a, b = ("A", "B", "C"), ("B", "A", "C")
    print(f"\nP@1/P@2/P@3 for {a} vs {b}: "
          f"{precision_at_j(a, b, 1):.2f} / {precision_at_j(a, b, 2):.2f} / "
          f"{precision_at_j(a, b, 3):.2f}")
    print(f"consistency: {consistency(a, b):.6f}")
    print(f"full reversal: {consistency(a, ('C', 'B', 'A')):.6f}")

    task = ClozeTask(
        name="mood", labels=("red", "dim", "hot"),
        verbalizer={"red": "red", "dim": "dim", "hot": "hot"},
        template="{text} looks [Mask] today",
    )
    model_a = toy_model(seed=13)
    model_b = toy_model(seed=99)
    rng = np.random.default_rng(8)
    pairs = []
    for _ in range(12):
        ex = EvalExample(fields={"text": toy_sentence(rng)}, gold="red")
        pairs.append((
            classify_zero_shot(model_a, task, ex).labels,
            classify_zero_shot(model_b, task, ex).labels,
        ))

    print(f"\nexample ranking pair: {pairs[0][0]} vs {pairs[0][1]}")
    print(f"rankc between two unrelated models: {rankc(pairs):.4f}")
    print(f"rankc of a model with itself: {rankc([(x, x) for x, _ in pairs]):.1f}")


if __name__ == "__main__":
    main()
