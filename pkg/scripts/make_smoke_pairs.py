#!/usr/bin/env python3
"""Generate the smoke-scale pair split the trainer tests train on.

72 synthetic base patents, 8 slots each.  Anticipating candidates restate
the base claims' distinctive vocabulary; merely-relevant candidates come
from other technology cores, so token overlap carries the label and a small
model can learn the relation in a few epochs.  Output goes through the
normal row -> pairwise -> stratified split path and lands in
trainer/fixtures/run_0/ as ordinary pair CSVs.
"""

from __future__ import annotations

import random
import sys
from pathlib import Path

REPO = Path(__file__).resolve().parent.parent
sys.path.insert(0, str(REPO / "src"))

from patpairs.builder import PositiveSample, build_row
from patpairs.records import (
    ApplicationNumber,
    ClaimSet,
    PatentRecord,
    PublicationNumber,
)
from patpairs.splits import stratified_group_split, to_pairwise, write_bundle

N_BASES = 72
K = 8
SEED = 424242

PREFIXES = ["ferro", "cryo", "nano", "poly", "thermo", "electro", "hydro", "photo",
            "piezo", "magneto", "micro", "sono"]
STEMS = ["silicate", "laminate", "hydride", "membrane", "gasket", "manifold",
         "catalyst", "winding", "resonator", "absorber", "emitter", "scaffold"]
DEVICES = ["battery module", "fuel cell stack", "electrolyzer", "heat pump",
           "desalination unit", "flywheel", "turbine blade", "sensor array"]
FILLER = ["housing", "controller", "coupling", "sleeve", "port", "bracket",
          "gland", "baffle", "liner", "shroud"]


def core_tokens(rng: random.Random) -> list[str]:
    return [rng.choice(PREFIXES) + rng.choice(STEMS) for _ in range(3)]


def base_claims(device: str, cores: list[str], rng: random.Random) -> str:
    a, b, c = cores
    f1, f2 = rng.sample(FILLER, 2)
    return (
        f"1. A {device} comprising a {a} layer bonded to a {b} support and a {c} "
        f"interface retained by a {f1}. 2. The {device} of claim 1, wherein the "
        f"{a} layer contacts the {f2}."
    )


def positive_claims(device: str, cores: list[str], rng: random.Random) -> str:
    a, b, c = cores
    f1 = rng.choice(FILLER)
    return (
        f"1. A {device} having a {a} layer on a {b} support, the {c} interface "
        f"secured by a {f1}. 2. The {device} of claim 1, wherein the {b} support "
        f"is annealed."
    )


def negative_claims(rng: random.Random) -> str:
    device = rng.choice(DEVICES)
    a, b = core_tokens(rng)[:2]
    f1, f2 = rng.sample(FILLER, 2)
    return (
        f"1. A {device} comprising a {a} element inside a {f1} and a {b} channel "
        f"through the {f2}. 2. The {device} of claim 1, further comprising a "
        f"relief valve."
    )


def main() -> None:
    rng = random.Random(SEED)
    rows = []
    for i in range(N_BASES):
        device = rng.choice(DEVICES)
        cores = core_tokens(rng)
        base = PatentRecord(
            application_number=ApplicationNumber(str(15500000 + i)),
            publication_number=PublicationNumber("US", str(20170000000 + i), "A1"),
            abstract=f"A {device} with a {cores[0]} layer.",
            claims=ClaimSet.from_text(base_claims(device, cores, rng)),
        )
        n_pos = 0
        if i % 9 in (0, 2, 4, 6):          # 4 of 9 bases have one positive
            n_pos = 1
        elif i % 9 == 8:                   # 1 of 9 has two
            n_pos = 2
        positives = [
            PositiveSample(
                pub=PublicationNumber("US", str(9500000 + i * 10 + j), "B2"),
                claims=ClaimSet.from_text(positive_claims(device, cores, rng)),
                rejection_text=f"anticipated by US {9500000 + i * 10 + j} B2",
            )
            for j in range(n_pos)
        ]
        negatives = [
            PatentRecord(
                application_number=ApplicationNumber(str(17500000 + i * 100 + j)),
                publication_number=PublicationNumber("US", str(20160000000 + i * 100 + j), "A1"),
                abstract="Unrelated art.",
                claims=ClaimSet.from_text(negative_claims(rng)),
            )
            for j in range(K - n_pos)
        ]
        rows.append(build_row(base, positives, negatives, k=K))

    pairs = to_pairwise(rows)
    bundle = stratified_group_split(pairs, seed=SEED)
    out = REPO / "trainer" / "fixtures" / "run_0"
    write_bundle(bundle, out, extra_manifest={"purpose": "trainer smoke split", "k": K})
    pos = sum(p.label for p in pairs)
    print(f"{len(pairs)} pairs ({pos} positive) -> {out}")


if __name__ == "__main__":
    main()
