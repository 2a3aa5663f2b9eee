#!/usr/bin/env python3
"""Generate synthetic train/dev/test corpora plus a schema file."""

import argparse
from pathlib import Path

from relcascade.data import serialize_corpus
from relcascade.synthetic import SyntheticSpec, generate_synthetic_corpus


def main() -> None:
    parser = argparse.ArgumentParser(description=__doc__)
    parser.add_argument("--out-dir", required=True)
    parser.add_argument("--seed", type=int, default=42)
    parser.add_argument("--n-train", type=int, default=200)
    parser.add_argument("--n-dev", type=int, default=50)
    parser.add_argument("--n-test", type=int, default=50)
    parser.add_argument("--relations", type=int, default=6)
    parser.add_argument("--frac-normal", type=float, default=0.4)
    parser.add_argument("--frac-epo", type=float, default=0.3)
    parser.add_argument("--frac-seo", type=float, default=0.3)
    args = parser.parse_args()

    out = Path(args.out_dir)
    out.mkdir(parents=True, exist_ok=True)
    schema = None
    for split, n, seed in [
        ("train", args.n_train, args.seed),
        ("dev", args.n_dev, args.seed + 1),
        ("test", args.n_test, args.seed + 2),
    ]:
        spec = SyntheticSpec(
            n_sentences=n, n_relations=args.relations,
            frac_normal=args.frac_normal, frac_epo=args.frac_epo,
            frac_seo=args.frac_seo,
        )
        sentences, schema = generate_synthetic_corpus(spec, seed)
        serialize_corpus(sentences, out / f"{split}.jsonl")
        print(f"wrote {len(sentences)} sentences to {out / (split + '.jsonl')}")
    schema.save(out / "schema.txt")
    print(f"wrote schema ({len(schema)} relations) to {out / 'schema.txt'}")


if __name__ == "__main__":
    main()
