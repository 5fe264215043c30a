"""The r->p norm of a heavy-tailed matrix is carried by a few paired entries.

For p < r the entries above n^((2 - zeta)/alpha) almost never share a row,
so after a permutation they form disjoint 2x2 blocks.  The norm of such a
paired matrix has the closed form (2 sum |w_k|^(1/gamma))^gamma with
gamma = 1/p - 1/r.  This script splits one sample into its three parts,
compacts the large part and compares the closed form with the ascent value
of the full matrix.  At this n the large part can be empty, so the script
uses the first draw with at least two large entries and reports how many
draws it skipped.
"""
from htlab import (HeavyTailLaw, NormProblem, compact_large, decompose, default_thresholds,
                   make_rng, operator_norm, paired_norm_closed_form, quantile_b_n, sample_matrix)

N, ALPHA, R, P = 300, 0.6, 4.0, 2.0


def main():
    law = HeavyTailLaw(ALPHA)
    prob = NormProblem(R, P)
    b = quantile_b_n(law, N)
    eta, zeta = default_thresholds("small_alpha", ALPHA, R, P)
    seed, empty = 0, 0
    while True:
        S = sample_matrix(law, N, make_rng(7, seed))
        dec = decompose(S, ALPHA, eta, zeta)
        empty += len(dec.large) == 0
        if len(dec.large) >= 2:
            break
        seed += 1
    print(f"n={N}, alpha={ALPHA}, (r, p)=({R:g}, {P:g}), gamma={prob.gamma:g}")
    print(f"draws tried: {seed + 1}, with an empty large part: {empty}")
    print(f"thresholds: t_low={dec.t_low:.3g}, t_high={dec.t_high:.3g}, b_n={b:.3g}")
    print(f"entries per part: intermediate {len(dec.inter)}, large {len(dec.large)}")
    paired = compact_large(dec.large)
    closed = paired_norm_closed_form(paired, prob).value
    full = operator_norm(S, prob, rng=make_rng(8))
    print(f"closed form on the large part / b_n: {closed / b:.5f}")
    print(f"{full.method} value on the full matrix / b_n: {full.value / b:.5f}")
    print(f"gap / b_n: {abs(full.value - closed) / b:.5f}")


if __name__ == "__main__":
    main()
