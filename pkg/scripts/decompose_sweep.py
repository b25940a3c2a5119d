"""Sweep decompose_h1 over ranks, fields and characters; one JSON line per run."""
import argparse
import json
import time
from dataclasses import asdict, dataclass, field

from iwahori_h1.charfield import FieldParams, SmoothCharacter, generic_character, parse_character
from iwahori_h1.cohomology import DecomposeConfig, decompose_h1, expected_total_dim


@dataclass
class SweepConfig:
    ranks: list[int] = field(default_factory=lambda: [2, 3, 4])
    fields: list[tuple[int, int, int, bool]] = field(
        default_factory=lambda: [(3, 1, 1, False), (5, 1, 1, False), (3, 2, 1, False), (3, 1, 2, True)])
    chis: list[str] = field(default_factory=lambda: ["trivial", "generic", "generic:1"])
    check_relations: bool = False


def character(text: str, fp: FieldParams, n: int) -> SmoothCharacter:
    if text == "trivial":
        return SmoothCharacter.trivial(fp, n)
    if text.startswith("generic"):
        seed = int(text.split(":")[1]) if ":" in text else 0
        return generic_character(fp, n, seed)
    return parse_character(text, fp, n)


def summarize(rep: dict) -> dict:
    return {
        "total_dim": rep["total_dim"],
        "level_dims": [lv["dim"] for lv in rep["levels"]],
        "fil1_split": rep["levels"][1]["split"],
        "supersingular": [s["beta"] for lv in rep["levels"][1:] for s in lv["summands"]
                          if s["supersingular"]],
    }


def main():
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--ranks", type=int, nargs="+", default=None)
    ap.add_argument("--chi", nargs="+", default=None)
    ap.add_argument("--check-relations", action="store_true")
    args = ap.parse_args()
    cfg = SweepConfig(check_relations=args.check_relations)
    if args.ranks:
        cfg.ranks = args.ranks
    if args.chi:
        cfg.chis = args.chi
    for n in cfg.ranks:
        for p, f, e, zp in cfg.fields:
            fp = FieldParams(p, f, e, zp)
            for text in cfg.chis:
                chi = character(text, fp, n)
                t0 = time.perf_counter()
                rep = decompose_h1(DecomposeConfig(n, fp, chi, cfg.check_relations))
                row = {"n": n, "field": asdict(fp), "chi": text, **summarize(rep),
                       "expected_total": expected_total_dim(n, fp),
                       "seconds": round(time.perf_counter() - t0, 2)}
                print(json.dumps(row, sort_keys=True), flush=True)


if __name__ == "__main__":
    main()
