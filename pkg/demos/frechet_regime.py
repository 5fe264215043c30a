"""When alpha is small, the largest entry decides the spectral norm.

We draw symmetric matrices with Pareto(1) entries, compare the spectral
norm with the largest absolute entry, and check that the norm divided by
b_n follows the Frechet(1) law exp(-1/x).
"""
import numpy as np

from htlab import HeavyTailLaw, frechet_cdf, ks_distance, make_rng, quantile_b_n, sample_matrix
from htlab.norms import spectral_norm

N, TRIALS, ALPHA = 200, 200, 1.0


def main():
    law = HeavyTailLaw(ALPHA)
    b = quantile_b_n(law, N)
    ratios, scaled = [], []
    for t in range(TRIALS):
        a = sample_matrix(law, N, make_rng(2024, N, t)).dense()
        value = spectral_norm(a).value
        ratios.append(value / np.abs(a).max())
        scaled.append(value / b)
    ratios = np.array(ratios)
    print(f"n={N}, {TRIALS} matrices, entries Pareto({ALPHA}), b_n={b:.1f}")
    print(f"norm / largest entry: median {np.median(ratios):.4f}, "
          f"share within [1, 1.25]: {np.mean(ratios <= 1.25):.3f}")
    d = ks_distance(scaled, lambda x: frechet_cdf(ALPHA, x))
    print(f"KS distance of norm / b_n to Frechet({ALPHA}): {d:.4f}")


if __name__ == "__main__":
    main()
