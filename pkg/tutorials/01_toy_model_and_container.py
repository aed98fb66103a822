"""Build a toy model, round-trip it through the weight container, sample text.

The weight container is a single binary file: `NLW1` magic, a JSON header
with the configuration and matrix manifest, then raw float32 payloads.
Loading and re-saving reproduces the file byte for byte, which the pipeline
relies on for reproducibility checks.
"""

from pathlib import Path

from polyprune import GenParams, ByteTokenizer, generate, load_weights, save_weights
from polyprune.toy import toy_config, toy_model

OUT = Path(__file__).parent / "out"
OUT.mkdir(exist_ok=True)


def main():
    config = toy_config(n_layers=2, d_model=32)
    store = toy_model(config, seed=42)
    print(f"config: {config}")
    print(f"matrices: {len(store.matrices)}")
    for name in list(store.matrices)[:5]:
        print(f"  {name:20s} {store[name].shape}")
    print("  ...")

    path = OUT / "toy_model.nlw"
    save_weights(store, path)
    print(f"\nsaved {path} ({path.stat().st_size} bytes)")

    reloaded = load_weights(path)
    save_weights(reloaded, OUT / "toy_model_roundtrip.nlw")
    identical = path.read_bytes() == (OUT / "toy_model_roundtrip.nlw").read_bytes()
    print(f"round trip byte-identical: {identical}")

    tok = ByteTokenizer()
    prompt = tok.encode("English: hello\nFrench:")
    out = generate(reloaded, prompt, GenParams(max_new_tokens=24, seed=7))
    print(f"\nsampled continuation ({len(out)} tokens): {tok.decode(out)!r}")
    print("(an untrained random model babbles bytes; the point is the plumbing)")


if __name__ == "__main__":
    main()
