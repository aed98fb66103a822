"""Command-line entry points for end-to-end runs.

Every subcommand is a pure function of its input files, flags, and seed:
rerunning writes byte-identical primary outputs. A ``manifest.json`` with
resolved flags, input digests, and the tool version is placed next to every
output; only its timestamp field varies between reruns.
"""

from __future__ import annotations

import argparse
import csv
import hashlib
import json
import sys
from dataclasses import replace
from datetime import datetime, timezone
from pathlib import Path

import numpy as np

from . import __version__
from .analysis import (
    MONO,
    TRANS,
    RankedFeatures,
    overlap_matrix,
    quadrant_averages,
    write_heatmap_svg,
    write_overlap_csv,
    write_quadrant_csv,
)
from .demos import (
    MonolingualKind,
    TranslationKind,
    assemble_calibration,
    build_translation_demo,
    build_translation_prompt,
    load_bilingual_tsv,
    load_monolingual_lines,
    load_program_corpus,
    BilingualPair,
)
from .errors import DataError, PolypruneError
from .evaluation import (
    accuracy,
    classify_zero_shot,
    corpus_bleu,
    load_marc_tsv,
    load_predictions_csv,
    load_translation_tsv,
    load_xnli_tsv,
    marc_task,
    paired_bootstrap,
    save_predictions_csv,
    xnli_task,
)
from .pruning import (
    apply_mask,
    build_mask,
    ratio_scores,
    save_mask,
    sparsity_rows,
    wanda_scores,
)
from .rankc import consistency, rankc
from .stats import ActivationStats, load_stats, merge_stats, save_stats
from .tokenizer import ByteTokenizer, VocabTokenizer
from .transformer import GenParams, forward_with_capture, generate
from .weights import load_weights, save_weights


def _sha256(path) -> str:
    digest = hashlib.sha256()
    path = Path(path)
    files = sorted(p for p in path.iterdir() if p.is_file()) if path.is_dir() else [path]
    for p in files:
        digest.update(p.name.encode("utf-8"))
        with open(p, "rb") as fh:
            for chunk in iter(lambda: fh.read(1 << 16), b""):
                digest.update(chunk)
    return digest.hexdigest()


def _make_tokenizer(args):
    if getattr(args, "vocab", None):
        return VocabTokenizer(args.vocab)
    return ByteTokenizer()


def _out_dir(args) -> Path:
    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    return out


def _write_manifest(args, out: Path, inputs: list, extra: dict | None = None) -> None:
    flags = {
        k: v for k, v in sorted(vars(args).items())
        if k != "func" and not k.startswith("_")
    }
    manifest = {
        "subcommand": args.command,
        "version": __version__,
        "seed": getattr(args, "seed", None),
        "flags": flags,
        "inputs": {str(p): _sha256(p) for p in inputs},
        "created": datetime.now(timezone.utc).isoformat(),
    }
    if extra:
        manifest.update(extra)
    with open(out / "manifest.json", "w", encoding="utf-8", newline="") as fh:
        json.dump(manifest, fh, indent=2, sort_keys=True)
        fh.write("\n")


def _csv_writer(fh):
    return csv.writer(fh, quoting=csv.QUOTE_ALL, lineterminator="\n")


def _write_results_csv(path, rows) -> None:
    with open(path, "w", encoding="utf-8", newline="") as fh:
        writer = _csv_writer(fh)
        writer.writerow(["weight_id", "task", "language", "score", "n", "p_value"])
        for row in rows:
            writer.writerow(row)


def _stream_stats(store, token_seqs, capture) -> ActivationStats:
    merged: ActivationStats | None = None
    for ids in token_seqs:
        _, stats = forward_with_capture(store, ids, capture=capture)
        merged = stats if merged is None else merge_stats(merged, stats)
    if merged is None:
        raise DataError("no calibration sequences to stream")
    return merged


def _chunked_ids(tokenizer, text: str, max_len: int):
    ids = tokenizer.encode(text, map_eos_marker=False)
    if not ids:
        raise DataError("counter-calibration corpus is empty after tokenization")
    return [ids[i:i + max_len] for i in range(0, len(ids), max_len)]


def _load_kind_and_demos(args, tokenizer):
    """Resolve --kind flags into rendered calibration token sequences."""
    if args.kind == "translation":
        if not args.src_lang or not args.tgt_lang:
            raise DataError("--kind translation requires --src-lang and --tgt-lang")
        corpus = load_bilingual_tsv(args.corpus)
        kind = TranslationKind(args.src_lang, args.tgt_lang)
    elif args.kind == "monolingual":
        if not args.lang:
            raise DataError("--kind monolingual requires --lang")
        corpus = _monolingual_corpus(args.corpus)
        kind = MonolingualKind(args.lang, side=args.side)
    else:
        raise DataError(f"unsupported calibration kind {args.kind!r}")
    calib = assemble_calibration(
        corpus, N=args.n_demos, n=args.n_shots, kind=kind, seed=args.seed,
        source=str(args.corpus),
    )
    return [tokenizer.encode(demo.text) for demo in calib.demos]


def _monolingual_corpus(path) -> list[BilingualPair]:
    # Bilingual TSVs and one-sentence-per-line files are both accepted; a
    # lines file maps each sentence onto both sides.
    with open(path, encoding="utf-8") as fh:
        has_tab = any(
            "\t" in line for line in fh
            if line.strip() and not line.startswith("#")
        )
    if has_tab:
        return load_bilingual_tsv(path)
    return [BilingualPair(s, s) for s in load_monolingual_lines(path)]


def cmd_calibrate(args) -> int:
    store = load_weights(args.model)
    tokenizer = _make_tokenizer(args)
    out = _out_dir(args)
    if args.kind == "program":
        text = load_program_corpus(args.corpus)
        seqs = _chunked_ids(tokenizer, text, store.config.max_seq_len)
    else:
        seqs = _load_kind_and_demos(args, tokenizer)
    stats = _stream_stats(store, seqs, capture=store.prunable_names())
    save_stats(stats, out / "stats.nls")
    inputs = [args.model, args.corpus] + ([args.vocab] if args.vocab else [])
    _write_manifest(args, out, inputs)
    total = stats.token_count(store.prunable_names()[0])
    print(f"calibrate: {len(seqs)} sequences, {total} tokens -> {out / 'stats.nls'}")
    return 0


def cmd_prune(args) -> int:
    store = load_weights(args.model)
    stats_x = load_stats(args.stats)
    out = _out_dir(args)
    inputs = [args.model, args.stats]
    if args.z_stats and args.z_corpus:
        raise DataError("--z-stats and --z-corpus are mutually exclusive")
    if args.z_stats:
        stats_z = load_stats(args.z_stats)
        inputs.append(args.z_stats)
        provenance = f"ratio:{Path(args.stats).name}/{Path(args.z_stats).name}"
        scores = ratio_scores(store, stats_x, stats_z, eps=args.eps)
    elif args.z_corpus:
        tokenizer = _make_tokenizer(args)
        text = load_program_corpus(args.z_corpus)
        seqs = _chunked_ids(tokenizer, text, store.config.max_seq_len)
        stats_z = _stream_stats(store, seqs, capture=store.prunable_names())
        inputs.append(args.z_corpus)
        provenance = f"ratio:{Path(args.stats).name}/{Path(args.z_corpus).name}"
        scores = ratio_scores(store, stats_x, stats_z, eps=args.eps)
    else:
        provenance = f"wanda:{Path(args.stats).name}"
        scores = wanda_scores(store, stats_x)
    mask = build_mask(scores, alpha=args.alpha, provenance=provenance)
    pruned = apply_mask(store, mask)
    save_mask(mask, out / "mask.nlm")
    save_weights(pruned, out / "pruned.nlw")
    with open(out / "sparsity.csv", "w", encoding="utf-8", newline="") as fh:
        writer = _csv_writer(fh)
        writer.writerow(["layer", "rows", "cols", "pruned", "fraction"])
        for row in sparsity_rows(mask):
            writer.writerow(row)
    _write_manifest(args, out, inputs)
    total = sum(r[3] for r in sparsity_rows(mask))
    print(f"prune: alpha={args.alpha} zeroed {total} weights -> {out / 'pruned.nlw'}")
    return 0


def _parse_source_spec(spec: str) -> dict:
    fields = {}
    for part in spec.split(","):
        if "=" not in part:
            raise DataError(f"source spec field {part!r} is not key=value")
        key, _, value = part.partition("=")
        fields[key.strip()] = value.strip()
    for required in ("label", "kind", "corpus"):
        if required not in fields:
            raise DataError(f"source spec {spec!r} lacks {required!r}")
    if fields["kind"] not in ("translation", "monolingual"):
        raise DataError("source spec kind must be translation or monolingual")
    return fields


def cmd_overlap(args) -> int:
    store = load_weights(args.model)
    tokenizer = _make_tokenizer(args)
    out = _out_dir(args)
    layers = sorted({int(x) for x in args.layers.split(",") if x.strip() != ""})
    if not layers:
        raise DataError("--layers must name at least one block index")
    specs = [_parse_source_spec(s) for s in args.source]
    labels = [s["label"] for s in specs]
    if len(set(labels)) != len(labels):
        raise DataError(f"duplicate source labels: {labels}")
    # Monolingual sources come first so the quadrant convention reads
    # top-left = mono x mono in the emitted matrices.
    specs.sort(key=lambda s: 0 if s["kind"] == "monolingual" else 1)

    kind_of: dict[str, str] = {}
    per_source_stats: list[tuple[str, ActivationStats]] = []
    inputs = [args.model]
    for spec in specs:
        if spec["kind"] == "translation":
            corpus = load_bilingual_tsv(spec["corpus"])
            kind = TranslationKind(spec.get("src", "English"), spec.get("tgt", "French"))
            kind_of[spec["label"]] = TRANS
        else:
            corpus = _monolingual_corpus(spec["corpus"])
            kind = MonolingualKind(spec.get("lang", "English"), side=spec.get("side", "src"))
            kind_of[spec["label"]] = MONO
        calib = assemble_calibration(
            corpus, N=args.n_demos, n=args.n_shots, kind=kind, seed=args.seed,
            source=spec["corpus"],
        )
        seqs = [tokenizer.encode(d.text) for d in calib.demos]
        per_source_stats.append((spec["label"], _stream_stats(store, seqs, layers)))
        inputs.append(spec["corpus"])

    summaries = []
    for layer in layers:
        features = [
            RankedFeatures.from_norms(label, layer, stats.norms(f"resid.{layer}"))
            for label, stats in per_source_stats
        ]
        matrix = overlap_matrix(features, beta=args.beta)
        write_overlap_csv(matrix, out / f"overlap_layer{layer}.csv")
        write_heatmap_svg(matrix, out / f"overlap_layer{layer}.svg")
        summaries.append(quadrant_averages(matrix, kind_of))
    write_quadrant_csv(summaries, out / "quadrants.csv")
    _write_manifest(args, out, inputs)
    print(f"overlap: {len(specs)} sources x {len(layers)} layers -> {out}")
    return 0


def cmd_eval(args) -> int:
    store = load_weights(args.model)
    tokenizer = _make_tokenizer(args)
    out = _out_dir(args)
    task = xnli_task() if args.task == "xnli" else marc_task()
    examples = (load_xnli_tsv if args.task == "xnli" else load_marc_tsv)(args.data)
    preds = [classify_zero_shot(store, task, ex, tokenizer) for ex in examples]
    golds = [ex.gold for ex in examples]
    acc = accuracy(preds, golds)
    save_predictions_csv(preds, out / "predictions.csv")
    inputs = [args.model, args.data]
    p_value = ""
    if args.baseline:
        baseline = load_predictions_csv(args.baseline)
        if len(baseline) != len(preds):
            raise DataError(
                f"baseline has {len(baseline)} predictions, expected {len(preds)}"
            )
        for i, (key, _) in enumerate(baseline):
            if key != str(i):
                raise DataError(f"baseline example id mismatch at {key!r}")
        p_value = repr(paired_bootstrap(
            preds, [r for _, r in baseline], golds,
            resamples=args.resamples, seed=args.seed,
        ))
        inputs.append(args.baseline)
    weight_id = Path(args.model).stem
    _write_results_csv(out / "results.csv", [
        [weight_id, task.name, args.language, repr(acc), len(examples), p_value],
    ])
    _write_manifest(args, out, inputs)
    print(f"eval: {task.name} accuracy {acc:.4f} on {len(examples)} examples -> {out}")
    return 0


def cmd_translate(args) -> int:
    store = load_weights(args.model)
    tokenizer = _make_tokenizer(args)
    out = _out_dir(args)
    pairs = load_bilingual_tsv(args.demo_corpus)
    rows = load_translation_tsv(args.test)
    if len(pairs) < args.n_shots:
        raise DataError(
            f"demo corpus has {len(pairs)} pairs, need at least {args.n_shots}"
        )
    params = GenParams(
        max_new_tokens=args.max_new_tokens,
        temperature=args.temperature,
        top_k=args.top_k,
        top_p=args.top_p,
        seed=args.seed,
    )
    rng = np.random.default_rng(args.seed)
    hypotheses: list[str] = []
    scored_hyps: list[list[str]] = []
    scored_refs: list[list[str]] = []
    skipped = 0
    for i, (src, ref) in enumerate(rows):
        drawn = rng.choice(len(pairs), size=args.n_shots, replace=False)
        row_seed = int(rng.integers(0, 2**63 - 1))
        demo = build_translation_demo(
            [pairs[int(j)] for j in drawn], args.src_lang, args.tgt_lang
        )
        prompt_ids = tokenizer.encode(build_translation_prompt(demo, src))
        if len(prompt_ids) >= store.config.max_seq_len:
            print(f"warning: row {i} prompt overflows context, skipped", file=sys.stderr)
            skipped += 1
            hypotheses.append("")
            continue
        out_ids = generate(store, prompt_ids, replace(params, seed=row_seed))
        decoded = tokenizer.decode(out_ids)
        # Keep only the first line; toy byte models can emit any byte, so
        # every line-break variant counts as the cut point.
        text = decoded.splitlines()[0] if decoded.splitlines() else ""
        hypotheses.append(text)
        scored_hyps.append(text.split())
        scored_refs.append(ref.split())
    bleu = corpus_bleu(scored_hyps, scored_refs) if scored_hyps else 0.0
    with open(out / "hypotheses.txt", "w", encoding="utf-8", newline="") as fh:
        for hyp in hypotheses:
            fh.write(hyp + "\n")
    _write_results_csv(out / "results.csv", [
        [Path(args.model).stem, "translation", args.tgt_lang, repr(bleu), len(scored_hyps), ""],
    ])
    _write_manifest(args, out, [args.model, args.demo_corpus, args.test],
                    extra={"skipped_rows": skipped})
    print(f"translate: BLEU {bleu:.4f} on {len(scored_hyps)} rows "
          f"({skipped} skipped) -> {out}")
    return 0


def cmd_rankc(args) -> int:
    out = _out_dir(args)
    preds_a = load_predictions_csv(args.pred_a)
    preds_b = load_predictions_csv(args.pred_b)
    if len(preds_a) != len(preds_b):
        raise DataError(
            f"prediction files differ in length: {len(preds_a)} vs {len(preds_b)}"
        )
    for (id_a, _), (id_b, _) in zip(preds_a, preds_b):
        if id_a != id_b:
            raise DataError(f"example id mismatch: {id_a!r} vs {id_b!r}")
    pairs = [(ra.labels, rb.labels) for (_, ra), (_, rb) in zip(preds_a, preds_b)]
    score = rankc(pairs)
    with open(out / "rankc.csv", "w", encoding="utf-8", newline="") as fh:
        writer = _csv_writer(fh)
        writer.writerow(["record", "example_id", "value"])
        writer.writerow(["rankc", "", repr(score)])
        for (key, ra), (_, rb) in zip(preds_a, preds_b):
            writer.writerow(["consistency", key, repr(consistency(ra.labels, rb.labels))])
    _write_manifest(args, out, [args.pred_a, args.pred_b])
    print(f"rankc: {score:.6f} over {len(pairs)} examples -> {out / 'rankc.csv'}")
    return 0


def _add_common(p, model=True, seed=True, vocab=False):
    if model:
        p.add_argument("--model", required=True, help="weight container (.nlw)")
    if seed:
        p.add_argument("--seed", type=int, default=0, help="single source of randomness")
    if vocab:
        p.add_argument("--vocab", default=None, help="external vocabulary file (default: byte-level)")
    p.add_argument("--out-dir", required=True, help="directory for outputs + manifest")


def build_parser() -> argparse.ArgumentParser:
    parser = argparse.ArgumentParser(
        prog="polyprune",
        description="Prune multilingual toy models with translation-demonstration "
                    "calibration, and analyze or evaluate the result.",
    )
    sub = parser.add_subparsers(dest="command", required=True)

    p = sub.add_parser("calibrate", help="stream demonstrations and collect activation stats")
    p.add_argument("--corpus", required=True, help="bilingual TSV, sentence lines, or program text")
    p.add_argument("--kind", choices=("translation", "monolingual", "program"),
                   default="translation")
    p.add_argument("--src-lang", default=None)
    p.add_argument("--tgt-lang", default=None)
    p.add_argument("--lang", default=None)
    p.add_argument("--side", choices=("src", "tgt"), default="src")
    p.add_argument("--n-demos", type=int, default=100)
    p.add_argument("--n-shots", type=int, default=4)
    _add_common(p, vocab=True)
    p.set_defaults(func=cmd_calibrate)

    p = sub.add_parser("prune", help="score, mask, and zero weights")
    p.add_argument("--stats", required=True, help="calibration stats (.nls)")
    p.add_argument("--z-stats", default=None, help="counter-calibration stats (.nls)")
    p.add_argument("--z-corpus", default=None,
                   help="counter-calibration text file/directory, calibrated on the fly")
    p.add_argument("--alpha", type=float, default=0.3, help="pruned fraction per row")
    p.add_argument("--eps", type=float, default=1e-8)
    _add_common(p, seed=False, vocab=True)
    p.set_defaults(func=cmd_prune)

    p = sub.add_parser("overlap", help="top/bottom feature-overlap matrices per layer")
    p.add_argument("--source", action="append", required=True,
                   help="label=..,kind=translation|monolingual,corpus=..[,src=..,tgt=..|,lang=..,side=..]"
                        " (repeatable)")
    p.add_argument("--layers", required=True, help="comma-separated block indices")
    p.add_argument("--beta", type=float, default=30.0)
    p.add_argument("--n-demos", type=int, default=100)
    p.add_argument("--n-shots", type=int, default=4)
    _add_common(p, vocab=True)
    p.set_defaults(func=cmd_overlap)

    p = sub.add_parser("eval", help="zero-shot cloze classification")
    p.add_argument("--task", choices=("xnli", "marc"), required=True)
    p.add_argument("--data", required=True, help="task TSV")
    p.add_argument("--baseline", default=None, help="baseline predictions.csv for significance")
    p.add_argument("--language", default="", help="language tag recorded in results")
    p.add_argument("--resamples", type=int, default=1000)
    _add_common(p, vocab=True)
    p.set_defaults(func=cmd_eval)

    p = sub.add_parser("translate", help="few-shot translation with BLEU scoring")
    p.add_argument("--demo-corpus", required=True, help="bilingual TSV for demonstrations")
    p.add_argument("--test", required=True, help="src<TAB>ref TSV")
    p.add_argument("--src-lang", required=True)
    p.add_argument("--tgt-lang", required=True)
    p.add_argument("--n-shots", type=int, default=4)
    p.add_argument("--max-new-tokens", type=int, default=64)
    p.add_argument("--temperature", type=float, default=0.8)
    p.add_argument("--top-k", type=int, default=100)
    p.add_argument("--top-p", type=float, default=0.75)
    _add_common(p, vocab=True)
    p.set_defaults(func=cmd_translate)

    p = sub.add_parser("rankc", help="cross-lingual ranking consistency of stored predictions")
    p.add_argument("--pred-a", required=True, help="predictions.csv for language A")
    p.add_argument("--pred-b", required=True, help="predictions.csv for language B")
    _add_common(p, model=False, seed=False)
    p.set_defaults(func=cmd_rankc)

    return parser


def main(argv=None) -> int:
    args = build_parser().parse_args(argv)
    try:
        return args.func(args)
    except (PolypruneError, ValueError, OSError) as exc:
        print(f"error: {exc}", file=sys.stderr)
        return 1


if __name__ == "__main__":
    sys.exit(main())
