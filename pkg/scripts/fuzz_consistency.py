#!/usr/bin/env python3
"""
Fuzz the classifier on random closed subalgebras

For each subalgebra of the corpus:
- classify it
- conjugate it by exp(z) for a random z in 𝔫 and classify again (verdicts must agree)
- optionally cross-validate against a sampled μ-cloud

Run: python scripts/fuzz_consistency.py [--group SO2n --n 5] [--count 50] [--seed 0] [--verify]
"""

import argparse
import logging

import numpy as np

from capabilities.classification import classify
from capabilities.verification import cross_validate, fuzz_corpus
from services.errors import CartanKitError
from services.group import make_group
from services.linalg import expm
from services.liealg import adjoint_conjugate, coord_to_matrix, nilpotent_part


def main():
    parser = argparse.ArgumentParser(description="Classifier fuzzing")
    parser.add_argument("--group", choices=["SL3", "SO2n"], default="SO2n")
    parser.add_argument("--n", type=int, default=5)
    parser.add_argument("--count", type=int, default=50)
    parser.add_argument("--seed", type=int, default=0)
    parser.add_argument("--verify", action="store_true", help="also sample and run the two-wall test")
    args = parser.parse_args()
    logging.basicConfig(level=logging.WARNING)

    spec = make_group(args.group, args.n if args.group == "SO2n" else None)
    rng = np.random.default_rng(args.seed)
    corpus = fuzz_corpus(spec, args.count, args.seed)
    print(f"🎲 {len(corpus)} subalgebras of {spec.label}")
    print("=" * 60)

    failures = 0
    for i, h in enumerate(corpus):
        rows = h.matrix()
        try:
            verdict = classify(spec, rows, seed=args.seed)
            z = nilpotent_part(spec, rng.normal(scale=0.5, size=spec.coord_dim))
            if spec.kind == "SL3":
                z[:3] = 0.0
            conjugated = classify(spec, adjoint_conjugate(spec, rows, expm(coord_to_matrix(spec, z))), seed=args.seed)
        except CartanKitError as e:
            failures += 1
            print(f"❌ #{i} dim {h.dim}: {type(e).__name__}: {e}")
            continue
        same = verdict.is_cds == conjugated.is_cds
        failures += 0 if same else 1
        line = f"{'✅' if same else '❌'} #{i} dim {h.dim}: {verdict.rule}"
        if not same:
            line += f" vs {conjugated.rule} after conjugation"
        if args.verify and h.dim >= 2:
            try:
                result, _ = cross_validate(spec, rows, budget=1500, max_log_radius=20.0, seed=args.seed)
                line += f" | empirical CDS={result.empirical_cds} agreement={result.agreement}"
            except CartanKitError as e:
                line += f" | verify failed: {e}"
        print(line)

    print("\n" + "=" * 60)
    print("✅ No inconsistencies" if failures == 0 else f"❌ {failures} inconsistencies")


if __name__ == "__main__":
    main()
