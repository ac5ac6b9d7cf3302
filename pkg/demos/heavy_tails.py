"""Heavy and light tails: how the tail decides the achievable order.

A Pareto-type law with tail x^-b only reaches order 1/rho - 1/b; the tail
functional x^b P(|X| > x) is what tells the orders apart. Exponential tails
lose only a log factor.
"""

import numpy as np

from wq1d import (classify_order, explicit_bound_constant, exp_power, gaussian, pareto, sweep,
                  tail_profile)

NS = [2 ** k for k in range(4, 13)]


def main():
    print("Pareto orders (optimal grids, N = 2^4..2^12):")
    for rho, b in ((1.0, 2.0), (2.0, 4.0), (2.0, 8.0)):
        rep = sweep(pareto(b), rho, NS)
        alpha = 1 / rho - 1 / b
        ceiling = explicit_bound_constant(pareto(b), rho, alpha) ** (1 / rho)
        worst = np.max(np.asarray(NS, dtype=float) ** alpha * rep.errors)
        print(f"  rho={rho:g} b={b:g}: fitted {rep.fitted_order:.4f}, expected {alpha:.4f}; "
              f"max N^alpha e_N {worst:.4f} <= {ceiling:.4f}")

    print("\nTail functional of pareto(4):")
    for beta in (3.0, 4.0, 5.0):
        tp = tail_profile(pareto(4), beta)
        print(f"  beta={beta:g}: sup_x={tp.sup_x:.4g} limit_x={tp.limit_x:.4g} finite={tp.finite_x}")

    print("\nWhat order can pareto(4) reach at rho=2?")
    for alpha in (0.2, 0.25, 0.3, 0.5):
        v = classify_order(pareto(4), 2.0, alpha)
        print(f"  alpha={alpha:g}: {v.conclusion:12s} {v.message}")

    print("\nExponential tails pay only a log factor:")
    n = np.asarray(NS, dtype=float)
    e1 = sweep(exp_power(1), 1.0, NS).errors
    print("  exp(1), rho=1: e_N N / ln N =", np.round(e1 * n / np.log(n), 4))
    v = classify_order(gaussian(), 2.0, 0.4)
    print(f"  gaussian, rho=2, alpha=0.4: {v.conclusion}")


if __name__ == "__main__":
    main()
