"""Per-cell LR characteristics by 40-digit summation against the first-order expansion.

For h(x) = x log(x / lam) under Poisson(lam) prints E h, 1 - gamma and the
conditioned variance next to 1/2 + 1/(12 lam), 1/(12 lam^2) and
1/2 + 1/(6 lam). The variance correction is positive.
"""

import argparse

import mpmath


def cell(lam, dps=40):
    with mpmath.workdps(dps):
        lam = mpmath.mpf(lam)
        top = int(lam + 40 * mpmath.sqrt(lam) + 60)
        pmf = [mpmath.exp(-lam + j * mpmath.log(lam) - mpmath.loggamma(j + 1)) for j in range(top)]
        h = [j * mpmath.log(j / lam) if j else mpmath.mpf(0) for j in range(top)]
        eh = mpmath.fsum(p * v for p, v in zip(pmf, h))
        var = mpmath.fsum(p * (v - eh) ** 2 for p, v in zip(pmf, h))
        cov = mpmath.fsum(p * (v - eh) * (j - lam) for j, (p, v) in enumerate(zip(pmf, h)))
        gamma = cov / lam
        return eh, 1 - gamma, var - lam * gamma ** 2


def main() -> None:
    ap = argparse.ArgumentParser(description=__doc__)
    ap.add_argument("--lambda", dest="lams", type=lambda s: [float(v) for v in s.split(",")],
                    default=[5, 10, 20, 50, 100])
    args = ap.parse_args()
    print("lambda,E_h,expansion,one_minus_gamma,expansion,sigma_sq,expansion_plus,expansion_minus")
    for lam in args.lams:
        eh, g, s = cell(lam)
        print(",".join(mpmath.nstr(v, 12) for v in (
            lam, eh, 0.5 + 1 / (12 * lam), g, 1 / (12 * lam ** 2), s, 0.5 + 1 / (6 * lam), 0.5 - 1 / (6 * lam))))


if __name__ == "__main__":
    main()
