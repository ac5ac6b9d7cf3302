"""Compactly supported laws: exact rates, boundary singularities and the limiting constant.

For U[0,1] the optimal grid is the cell centres and e_N has a closed form.
For beta(b,1) (density b x^(b-1) on [0,1]) the density blows up or vanishes
at 0, which shows up as a slowly vanishing correction to N e_N when b is
large.
"""

from wq1d import beta_one, error_w1_closed, limit_constant, optimal_grid, sweep, uniform
from wq1d import error_quantile_form


def main():
    print("U[0,1], optimal grid equals the cell centres:")
    print("  N=4 points:", optimal_grid(uniform(), 4, 2.0).points)
    for rho in (1.0, 2.0, 3.0):
        n = 100
        e = error_quantile_form(uniform(), optimal_grid(uniform(), n, rho), rho).value
        ref = 1 / (2 * n * (rho + 1) ** (1 / rho))
        print(f"  rho={rho:g} N={n}: e_N={e:.15g}  closed form {ref:.15g}")

    print("\nbeta(b,1) at rho=1, N e_N against its limit 1/4:")
    for b in (0.5, 2.0, 5.0):
        row = [f"{n * error_w1_closed(beta_one(b), n).value:.5f}" for n in (2 ** 6, 2 ** 10, 2 ** 14)]
        print(f"  b={b:g}: N=2^6,2^10,2^14 -> {', '.join(row)}  (limit {limit_constant(beta_one(b), 1.0):.5f})")
    print("  the gap for b=5 shrinks like N^(-1/b), so 2^14 is still about 8% short")

    print("\nbeta(4,1) at rho=2: the integral of f^(1-rho) diverges, the order rises past 1/rho")
    rep = sweep(beta_one(4), 2.0, [2 ** k for k in range(6, 13)])
    print(f"  fitted order {rep.fitted_order:.4f} (1/rho + 1/b = 0.75)")
    print(f"  limit constant: {limit_constant(beta_one(4), 2.0)}")


if __name__ == "__main__":
    main()
