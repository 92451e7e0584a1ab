"""Search clopen sets for a change of norm under the shift preimage,
||sigma^-1 A|| != ||A||, for a family of Bernoulli measures."""
import argparse
import random
from dataclasses import dataclass
from fractions import Fraction

from nadyn.measure import BernoulliMeasure
from nadyn.shift import random_clopen
from nadyn.transform import Transformation


@dataclass
class Config:
    depth: int = 5
    samples: int = 2000
    seed: int = 20240601


MEASURES = [
    (2, 3, [-2, 3]),
    (3, 5, [-2, -2, 5]),
    (2, 5, [6, -5]),
    (3, 2, [Fraction(1, 3), Fraction(2, 3), 0]),
]


def main(cfg: Config) -> None:
    rng = random.Random(cfg.seed)
    for p, ell, q in MEASURES:
        m = BernoulliMeasure(p, ell, q)
        t = Transformation.shift(p)
        found = None
        for _ in range(cfg.samples):
            a = random_clopen(rng, p, cfg.depth)
            if m.norm(t.preimage(a)) != m.norm(a):
                found = a
                break
        print(f"p={p} l={ell} q={[str(x) for x in q]}: "
              + ("counterexample " + found.to_expr() if found else f"none in {cfg.samples} sets"))


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--samples", type=int, default=Config.samples)
    main(Config(samples=ap.parse_args().samples))
