"""Measure and topological entropy of the ternary Bernoulli example on the
generating partition and on the coarser two-cell partition."""
import argparse
from dataclasses import dataclass

from nadyn.entropy import (Cover, Partition, fekete_estimate, measure_entropy_sequence,
                           topological_entropy_sequence)
from nadyn.measure import BernoulliMeasure
from nadyn.shift import cylinder
from nadyn.transform import Transformation


@dataclass
class Config:
    n: int = 8
    weights: tuple = (-2, -2, 5)
    value_prime: int = 5


def main(cfg: Config) -> None:
    p = len(cfg.weights)
    m = BernoulliMeasure(p, cfg.value_prime, list(cfg.weights))
    shift = Transformation.shift(p)
    cells = [cylinder((s,), p) for s in range(p)]
    alpha = Partition(cells)
    rest = cells[1]
    for c in cells[2:]:
        rest = rest | c
    beta = Partition([cells[0], rest])
    for name, part in (("alpha", alpha), ("beta", beta)):
        seq = measure_entropy_sequence(m, shift, part, cfg.n)
        est = fekete_estimate(seq)
        print(f"h_mu(shift, {name}): {est.classification}, h = {est.h}, upper = {est.upper}")
        for row in seq.rows():
            print(f"  n={row['n']:>2}  e_n={row['e_n']}  M_n={row['M_n']}  a_n={row['a_n_decimal'][:24]}")
    top = fekete_estimate(topological_entropy_sequence(shift, Cover.from_partition(alpha), min(cfg.n, 6)))
    print(f"h_top(shift, alpha): {top.classification}, h = {top.h_exact}")


if __name__ == "__main__":
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--n", type=int, default=Config.n)
    main(Config(n=ap.parse_args().n))
