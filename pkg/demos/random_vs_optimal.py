"""Deterministic grids against i.i.d. samples, and optimal against midpoint grids.

An N-point sample has W1 error of order N^-1/2, while the optimal
deterministic grid reaches N^-1. Among deterministic grids, placing each
point at the cell quantile midpoint is close to optimal but not equal to it
when the law is skewed and rho > 1.
"""

from wq1d import error_quantile_form, exp_power, mc_baseline, midpoint_grid, optimal_grid, uniform


def main():
    print("U[0,1], rho=1: random sample vs optimal grid")
    for n in (64, 512, 4096):
        mc = mc_baseline(uniform(), 1.0, n, reps=50, seed=1)
        det = error_quantile_form(uniform(), optimal_grid(uniform(), n, 1.0), 1.0).value
        print(f"  N={n:5d}: random {mc.mean:.3e} +- {mc.std:.1e}, optimal {det:.3e}, "
              f"ratio {mc.mean / det:.1f}")

    print("\nexp(1), rho=3: optimal vs midpoint grids")
    d = exp_power(1)
    for n in (1, 2, 4, 8, 16, 32):
        opt = error_quantile_form(d, optimal_grid(d, n, 3.0), 3.0).value
        mid = error_quantile_form(d, midpoint_grid(d, n), 3.0).value
        print(f"  N={n:2d}: optimal {opt:.6f} midpoint {mid:.6f} gain {100 * (1 - opt / mid):5.2f}%")


if __name__ == "__main__":
    main()
