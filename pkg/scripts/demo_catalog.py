#!/usr/bin/env python3
"""
Demo: classify the built-in catalogs

Classifies every catalog entry of SL(3,R) and SO(2,n) for n = 3, 4, 5, then drops each
basis vector in turn to show that every remaining closed subalgebra is not CDS.

Run: python scripts/demo_catalog.py
"""

from capabilities.catalog import catalog_minimal
from capabilities.classification import classify, explain
from services.group import make_group
from services.liealg import check_subalgebra


def show(spec) -> bool:
    print(f"\n📐 {spec.label}")
    print("-" * 60)
    ok = True
    for entry in catalog_minimal(spec):
        verdict = classify(spec, entry.basis)
        matches = verdict.is_cds == entry.expected.is_cds and verdict.rule == entry.expected.rule
        ok = ok and matches
        print(f"{'✅' if matches else '❌'} {entry.name:28s} {explain(verdict)}")
        for i in range(len(entry.basis)):
            rest = entry.basis[:i] + entry.basis[i + 1:]
            if not check_subalgebra(spec, rest).ok:
                print(f"   ⏭️  dropping vector {i} leaves a non-closed span")
                continue
            sub = classify(spec, rest)
            if sub.is_cds:
                ok = False
                print(f"   ❌ dropping vector {i} still gives CDS ({sub.rule})")
    return ok


def main():
    print("🧭 Minimal Cartan-decomposition subgroups")
    print("=" * 60)
    groups = [make_group("SL3")] + [make_group("SO2n", n) for n in (3, 4, 5)]
    results = [show(spec) for spec in groups]
    print("\n" + "=" * 60)
    print("✅ Catalog consistent" if all(results) else "❌ Catalog inconsistencies found")


if __name__ == "__main__":
    main()
