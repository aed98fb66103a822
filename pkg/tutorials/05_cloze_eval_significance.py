"""Zero-shot cloze classification, accuracy, and bootstrap significance.

Each candidate label is verbalized into the template's [Mask] slot and the
whole filled prompt is scored by the model; the argmax label wins. Two
systems (here: original vs pruned weights) are compared with a two-sided
paired bootstrap over example resamples.
"""

import numpy as np

from polyprune import (
    EvalExample,
    accuracy,
    apply_mask,
    build_mask,
    classify_zero_shot,
    forward_with_capture,
    marc_task,
    merge_stats,
    paired_bootstrap,
    render_prompt,
    wanda_scores,
    xnli_task,
    ByteTokenizer,
)
from polyprune.toy import toy_model, toy_sentence

N_EXAMPLES = 40


def main():
    store = toy_model(seed=21)
    task = marc_task()
    print("template        :", task.template)
    print("verbalizer      :", dict(task.verbalizer))
    ex = EvalExample(fields={"review": "Good."}, gold="positive")
    print("rendered prompt :", repr(render_prompt(task, ex, "positive")))
    xnli_ex = EvalExample(fields={"premise": "A", "hypothesis": "B"}, gold="entailment")
    print("xnli rendering  :", repr(render_prompt(xnli_task(), xnli_ex, "entailment")), "\n")

    rng = np.random.default_rng(2)
    examples = [
        EvalExample(
            fields={"review": toy_sentence(rng)},
            gold="positive" if rng.uniform() < 0.5 else "negative",
        )
        for _ in range(N_EXAMPLES)
    ]
    golds = [e.gold for e in examples]

    preds = [classify_zero_shot(store, task, e) for e in examples]
    print(f"original accuracy: {accuracy(preds, golds):.3f} "
          f"(a random model hovers near chance)")

    # Prune with quick self-calibration stats and evaluate again.
    tok = ByteTokenizer()
    merged = None
    for e in examples[:10]:
        ids = tok.encode(render_prompt(task, e, "positive"))
        _, stats = forward_with_capture(store, ids, capture=store.prunable_names())
        merged = stats if merged is None else merge_stats(merged, stats)
    pruned = apply_mask(store, build_mask(wanda_scores(store, merged), alpha=0.3))
    pruned_preds = [classify_zero_shot(pruned, task, e) for e in examples]
    print(f"pruned accuracy  : {accuracy(pruned_preds, golds):.3f}")

    p = paired_bootstrap(preds, pruned_preds, golds, resamples=1000, seed=0)
    print(f"paired bootstrap p-value: {p:.3f} "
          f"({'significant' if p < 0.1 else 'not significant'} at 0.1)")
    print(f"sanity: system vs itself -> p = "
          f"{paired_bootstrap(preds, preds, golds, seed=0):.1f}")


if __name__ == "__main__":
    main()
