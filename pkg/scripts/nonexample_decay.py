"""Decay of |upsilon(J_n(x))|_p along the nested digit intervals of x."""
import argparse
from dataclasses import dataclass

from nadyn.pathology import DigitStream, decay_sequence


@dataclass
class Config:
    p: int = 3
    digits: str = ",period=012"
    n: int = 30


def main(cfg: Config) -> None:
    x = DigitStream.parse(cfg.digits, cfg.p)
    table = decay_sequence(x, cfg.n)
    print(f"x = 0.{x} in base {cfg.p}")
    for r in table.rows:
        print(f"  n={r.n:>3}  k_n={r.k_n:>3}  |upsilon(J_n)| = {r.norm}")
    print(f"skipped: {[n for n, _ in table.skipped]}")
    start = table.strictly_decreasing_from()
    print("strictly decreasing from row", start if start is not None else "- (norms repeat)")
    print("continuity violated:", "yes" if table.continuity_violated() else "no")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--p", type=int, default=Config.p)
    ap.add_argument("--digits", default=Config.digits)
    ap.add_argument("--n", type=int, default=Config.n)
    a = ap.parse_args()
    main(Config(a.p, a.digits, a.n))
