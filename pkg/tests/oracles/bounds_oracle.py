"""Straight-line mpmath evaluation of the bound constants.

Typed directly from the printed formulas, sharing no code with the package.
Values are computed at 50 significant digits and returned as mpf.
"""

from mpmath import mp, mpf, sqrt, log, exp, gamma

mp.dps = 50


def evaluate(M, m, b, A, B, delta, beta, d, lam_J, lam_J0, nAJ, eps, n,
             C_zJ=1.0, C_tilde=1.0, lam_star=None):
    M, m, b, A, B, delta, beta = (mpf(v) for v in (M, m, b, A, B, delta, beta))
    lam_J, lam_J0, nAJ, eps = mpf(lam_J), mpf(lam_J0), mpf(nAJ), mpf(eps)
    d = mpf(d)
    ib = 1 / beta
    R = sqrt(b / m)
    out = {}

    out["C_c"] = ((3 * M * R**2 + 3 * B * R + 3 * B + 6 * A + 3 * b * log(3)) / (2 * m)
                  + 3 * b * (M + B) / m**2 + 6 * M * ib * d * (M + B) / m**3)
    out["C_d"] = ((3 * M * R**2 + 6 * B * R + 3 * B + 6 * A + 3 * b * log(3)) / (2 * m)
                  + 6 * delta * (2 * b * M**2 + B**2 * m) * (M + B) / m**4
                  + 12 * M * ib * d * (M + B) / m**3 + 3 * b * (M + B) / m**2)
    U = ((B + 2 * A) ** 2 / 2
         + 18 * (M + B) ** 2 / m**2 * (b + ib + 2 * (M + B) * ib / m**2) ** 2
         + 24 * ib * (2 * b * M**2 + m * B**2) * (M + B) ** 2 / m**4
         + 2 * b * B + 2 * A + b**2)
    out["U"] = U
    out["D_c"] = (9 / m**2 * (M / 2 * R**2 + B * R + A) ** 2
                  + (9 * U + 9 * b * (M + B) * out["C_c"]) / m**2
                  + 6 * M * (M + B) ** 2 / m**3 * (B + 2 * B * sqrt(2 * b / m) + 2 * b * M / m + 4 * A) * ib * d)

    out["L0"] = exp(M * R**2 / 2 + B * R + A + 3 * b / (2 * m) * log(3))
    out["L1"] = (((3 * m - 9 * ib) * (B / 2 + A) + 3 * b * (M + B)) / (2 * (M + B))
                 + (6 * ib * M * d - 9 * b * ib) / (2 * m)
                 * exp(3 / m * (B / 2 + A + (M + B) / (m - 3 * ib) * (b + ib * (2 * M * d - 3 * b) / m))))

    out["C0"] = 2 * beta * M**2 * (M**2 * out["C_d"] + B**2 + d * ib)
    out["C1"] = (1 + 2 * M**2) * beta * (M**2 * out["C_d"] + B**2)
    lg = log(out["L0"] + out["L1"])
    out["C0_hat"] = sqrt(16 * lg * (out["C0"] + sqrt(out["C0"])))
    out["C1_hat"] = sqrt(16 * lg * (out["C1"] + sqrt(out["C1"])))

    x = R
    num = 16 * gamma(d / 2 + 1) * exp(mpf(C_tilde) * mpf(2) ** (-3 * d) * (
        1 + beta + (sqrt(beta) + beta) * (nAJ / 4 * (M * x + M + B) + sqrt(ib * d))) ** 2)
    den = ((3 / (2 * m * beta)) ** (-d / 2) * exp(-beta * b * log(3) / 2)
           * exp(-beta * (M + B) * (x**2 + B / 2 + A + mpf(1) / 16)))
    g = exp(abs(lam_J) * mpf(27) / 64) * (num / den + 1)
    out["log_g_J_at_R"] = log(g)
    C_hat = mpf(C_zJ) * g
    out["I0"] = (((M + B) / 2 + B / 2 + A) * C_hat + (M + B) * out["D_c"]) * eps

    out["I1"] = ((M * sqrt(out["C_d"]) + B)
                 * (out["C0_hat"] * eps / sqrt(abs(lam_J0))
                    + out["C1_hat"] * delta ** (mpf(1) / 4) * sqrt(2 * log(1 / eps) / abs(lam_J)) * nAJ)
                 * sqrt(log(2 * log(1 / eps) / abs(lam_J))))
    out["I2"] = d / (2 * beta) * log(exp(1) * M / m * (b * beta / d + 1))
    ls = abs(lam_J0) if lam_star is None else mpf(lam_star)
    c_LS = (2 * m**2 + 8 * M**2) / (m**2 * M * beta) + 1 / ls * (6 * M * (d + beta) / m + 2)
    out["I3"] = 4 * (M**2 / m * (b + d / beta) + B**2) * beta * c_LS / n
    out["eta_max"] = min(mpf(1), m**2 / ((m**2 + 8 * M**2) * M * nAJ**2),
                         eps**4 / (4 * log(1 / eps) ** 2 * nAJ**4) * lam_J**2 / lam_J0**2)
    T = 2 / abs(lam_J) * log(1 / eps)
    out["horizon"] = T
    out["K_J"] = (sqrt(beta) * (beta + d) / (abs(lam_J) * eps**4) * log(1 / eps) ** 3
                  * nAJ**4 * lam_J0**2 / lam_J**2)
    out["K_tail"] = exp(abs(lam_J) * T / 4)
    return out
