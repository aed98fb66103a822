"""Compare which features are loud under different demonstration kinds.

For each demonstration source the residual-stream feature norms at a layer
are ranked; the overlap matrix reports how much of one source's top-30%
lands in another's bottom-30%. A nonzero entry means dimensions that are
loudest under one input kind go quiet under the other. A random toy model
keeps natural-language sources highly correlated (near-zero overlaps), so a
structurally different source (code-like text) is included to show the
matrix doing its job; trained models separate language sources on their own.
"""

from pathlib import Path

from polyprune import (
    ByteTokenizer,
    MonolingualKind,
    RankedFeatures,
    TranslationKind,
    assemble_calibration,
    forward_with_capture,
    merge_stats,
    overlap_matrix,
    quadrant_averages,
    topk_report,
    unique_dim_ratio,
)
from polyprune.analysis import MONO, TRANS, write_heatmap_svg, write_overlap_csv, write_quadrant_csv
from polyprune.toy import toy_model, toy_pairs

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)

LAYER = 1


def resid_norms(store, texts, layer):
    tok = ByteTokenizer()
    merged = None
    for text in texts:
        _, stats = forward_with_capture(store, tok.encode(text), capture=[layer])
        merged = stats if merged is None else merge_stats(merged, stats)
    return merged.norms(f"resid.{layer}")


def main():
    store = toy_model(seed=9)
    pairs = toy_pairs(300, seed=4)

    features = []
    for label, kind in (
        ("En", MonolingualKind("English", side="src")),
        ("Ci", MonolingualKind("Cipher", side="tgt")),
        ("En-Ci", TranslationKind("English", "Cipher")),
    ):
        calib = assemble_calibration(pairs, N=12, n=4, kind=kind, seed=3)
        norms = resid_norms(store, [d.text for d in calib.demos], LAYER)
        features.append(RankedFeatures.from_norms(label, LAYER, norms))
    code = ["def f(x):\n    return [x**2 for x in range(10)]\n"] * 12
    features.append(RankedFeatures.from_norms("Code", LAYER, resid_norms(store, code, LAYER)))
    kind_of = {"En": MONO, "Ci": MONO, "En-Ci": TRANS, "Code": TRANS}

    print(f"top-5 loudest dimensions at layer {LAYER}:")
    for rf in features:
        dims = ", ".join(f"{d}:{v:.1f}" for d, v in topk_report(rf, 5))
        print(f"  {rf.label:6s} {dims}")

    print(f"\nunique top-10 dims of Code vs En: "
          f"{unique_dim_ratio(features[3], features[0], 10):.0f}%")
    print(f"unique top-10 dims of En-Ci vs En: "
          f"{unique_dim_ratio(features[2], features[0], 10):.0f}%")

    m = overlap_matrix(features, beta=30)
    print("\noverlap matrix (rows=top source, cols=bottom source):")
    header = "        " + "  ".join(f"{l:5s}" for l in m.col_labels)
    print(header)
    for r, label in enumerate(m.row_labels):
        cells = "  ".join(f"{v:.3f}" for v in m.values[r])
        print(f"  {label:6s} {cells}")

    summary = quadrant_averages(m, kind_of)
    print(f"\nquadrant means: mono*mono {summary.mono_mono:.3f}, "
          f"mono*trans {summary.mono_trans:.3f}, "
          f"trans*mono {summary.trans_mono:.3f}, "
          f"trans*trans {summary.trans_trans:.3f}")

    write_overlap_csv(m, OUT / f"overlap_layer{LAYER}.csv")
    write_heatmap_svg(m, OUT / f"overlap_layer{LAYER}.svg")
    write_quadrant_csv([summary], OUT / "quadrants.csv")
    print(f"\nwrote CSV + SVG artifacts to {OUT}")


if __name__ == "__main__":
    main()
