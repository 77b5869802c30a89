"""Reference values for the numerical core, computed in high precision with mpmath.

Writes crates/core/tests/fixtures/oracle_<section>.csv with columns `name,args,value`.
Run with section names as arguments (default: all sections).
Args are `;`-separated decimals. Every value is computed twice at different working
precision (and, where both apply, by two independent methods) and the run aborts if
they disagree beyond 1e-20.
"""
import csv
import os
import sys

import mpmath as mp

OUT_DIR = os.path.join(os.path.dirname(__file__), "..", "crates", "core", "tests", "fixtures")


def series_ml3(alpha, beta, gamma, z, dps):
    """Sum of (gamma)_j z^j / (j! Gamma(alpha j + beta)) at `dps` digits."""
    with mp.workdps(dps):
        a, b, g, z = mp.mpf(alpha), mp.mpf(beta), mp.mpf(gamma), mp.mpf(z)
        total = mp.mpf(0)
        coef = mp.mpf(1)  # (gamma)_j / j!
        zj = mp.mpf(1)
        small = 0
        j = 0
        while True:
            term = coef * zj * mp.rgamma(a * j + b)
            total += term
            if total != 0 and abs(term) < mp.mpf(10) ** (-dps) * abs(total):
                small += 1
                if small > 5 and j > 200:
                    break
            else:
                small = 0
            coef *= (g + j) / (j + 1)
            zj *= z
            j += 1
            if j > 200000:
                raise RuntimeError("series did not converge")
        return +total


def digits_needed(alpha, beta, gamma, z):
    """Working digits so that cancellation in the series still leaves ~40 digits."""
    with mp.workdps(30):
        peak = mp.mpf(0)
        coef = mp.mpf(1)
        zj = mp.mpf(1)
        j = 0
        last = None
        while j < 200000:
            lt = mp.log(abs(coef * zj)) - mp.loggamma(alpha * j + beta) if coef * zj != 0 else -mp.inf
            if alpha * j + beta <= 0 and mp.isint(alpha * j + beta):
                lt = -mp.inf
            if lt > peak:
                peak = lt
            if j > 50 and last is not None and lt < peak - 200 and lt < last:
                break
            last = lt
            coef *= (gamma + j) / (j + 1)
            zj *= z
            j += 1
        return int(peak / mp.log(10)) + 60


def ml3(alpha, beta, gamma, z):
    d = digits_needed(alpha, beta, gamma, z)
    v1 = series_ml3(alpha, beta, gamma, z, d)
    v2 = series_ml3(alpha, beta, gamma, z, d + 20)
    if abs(v1 - v2) > mp.mpf(10) ** -25:
        raise RuntimeError(f"precision check failed for ml3{(alpha, beta, gamma, z)}")
    return v2


def talbot(fun, t, dps=60):
    with mp.workdps(dps):
        return mp.invertlaplace(fun, t, method="talbot")


def wright(lam, mu, z, dps=60):
    with mp.workdps(dps):
        return mp.nsum(lambda k: mp.mpf(z) ** k / (mp.factorial(k) * mp.gamma(mu + lam * k))
                       if not (mu + lam * k <= 0 and mp.isint(mu + lam * k)) else 0, [0, mp.inf])


rows = []


def emit(name, args, value):
    rows.append((name, ";".join(repr(float(a)) if not isinstance(a, int) else str(a) for a in args), mp.nstr(value, 25)))


def zolotarev_density(alpha, x, dps=50):
    """Stable density through Kanter's function A(u), integrated in high precision."""
    with mp.workdps(dps):
        a = mp.mpf(alpha)
        q = a / (1 - a)
        y = mp.mpf(x) ** (-q)

        def kanter(u):
            return mp.sin(a * u) ** (a / (1 - a)) * mp.sin((1 - a) * u) / mp.sin(u) ** (1 / (1 - a))

        integ = mp.quad(lambda u: kanter(u) * mp.exp(-kanter(u) * y), mp.linspace(0, mp.pi, 9))
        return q / mp.pi * mp.mpf(x) ** (-1 / (1 - a)) * integ


def density_value(alpha, x):
    v1 = zolotarev_density(alpha, x, 40)
    v2 = zolotarev_density(alpha, x, 60)
    if abs(v1 - v2) > mp.mpf(10) ** -25 * max(1, abs(v2)):
        raise RuntimeError(f"Zolotarev precision check failed at {(alpha, x)}")
    with mp.workdps(60):
        w = mp.invertlaplace(lambda s: mp.exp(-s ** alpha), x, method="talbot")
    with mp.workdps(90):
        w2 = mp.invertlaplace(lambda s: mp.exp(-s ** alpha), x, method="talbot")
    if abs(w - w2) < mp.mpf(10) ** -30 and abs(w - v2) > mp.mpf(10) ** -25:
        raise RuntimeError(f"Zolotarev/Talbot mismatch at {(alpha, x)}: {v2} {w}")
    return v2


def section_ml():
    # one-parameter and two-parameter Mittag-Leffler on a grid of arguments
    zs = [-50, -30, -20, -15, -12, -10, -8, -5, -3, -2, -1, -0.5, -0.1, 0, 0.3, 1, 2, 5]
    for alpha in [0.25, 0.5, 0.6, 0.75, 0.9, 1.0]:
        for beta in [1.0, 0.5, 1.5, 2.0]:
            for z in zs:
                x = abs(z)
                if z < 0 and x ** (1 / alpha) > 2600:
                    continue
                if z > 0 and z ** (1 / alpha) > 700:
                    continue
                v = ml3(alpha, beta, 1, z)
                if z < 0 and beta < 1 + alpha and alpha < 1 and x > 0 and x ** (1 / alpha) < 300:
                    # independent check through the Laplace transform s^(a-b)/(s^a + x) at t=1
                    w = talbot(lambda s: s ** (alpha - beta) / (s ** alpha + x), 1)
                    if abs(v - w) > mp.mpf(10) ** -20:
                        raise RuntimeError(f"series/talbot mismatch at {(alpha, beta, z)}: {v} {w}")
                emit("ml2", [alpha, beta, z], v)
    # large negative arguments where the series is out of reach: Laplace inversion only
    for alpha in [0.25, 0.5, 0.75, 0.9]:
        for z in [-50, -30, -20, -15, -12, -10, -8]:
            x = -z
            if x ** (1 / alpha) <= 2600:
                continue
            w1 = talbot(lambda s: s ** (alpha - 1) / (s ** alpha + x), 1, 60)
            w2 = talbot(lambda s: s ** (alpha - 1) / (s ** alpha + x), 1, 80)
            if abs(w1 - w2) > mp.mpf(10) ** -20:
                raise RuntimeError("talbot precision check failed")
            emit("ml2", [alpha, 1.0, z], w2)
    # closed forms for alpha=1/2: E(-x) = exp(x^2) erfc(x)
    for x in [0.25, 1, 4]:
        emit("ml_half_closed", [x], mp.exp(mp.mpf(x) ** 2) * mp.erfc(x))


def section_ml3():
    # three-parameter values of the fractional Poisson pmf shape
    for alpha in [0.5, 0.75, 0.9]:
        for x in [1, 2, 5]:
            for k in [0, 1, 2, 3, 5, 10, 30, 80, 120]:
                v = ml3(alpha, alpha * k + 1, k + 1, -x)
                emit("ml3", [alpha, alpha * k + 1, k + 1, -x], v)
    for k in range(0, 6):
        emit("ml3", [0.5, 0.5 * k + 1, k + 1, -1], ml3(0.5, 0.5 * k + 1, k + 1, -1))
    for (a, b, g, z) in [(0.8, 1.0, 1.0, -0.5), (0.4, 0.9, 2.0, -1.0), (0.4, 1.7, 3.0, 0.8), (0.7, 2.3, 1.5, -2.0)]:
        emit("ml3", [a, b, g, z], ml3(a, b, g, z))
    # fractional Poisson pmf values
    for (alpha, lam, t) in [(0.5, 1.0, 1.0), (0.75, 2.0, 1.5), (0.9, 5.0, 1.0)]:
        x = lam * t ** alpha
        for k in [0, 1, 2, 5, 10]:
            emit("fpp_pmf", [alpha, lam, t, k], mp.mpf(x) ** k * ml3(alpha, alpha * k + 1, k + 1, -x))


def section_density():
    for (lam, mu, z) in [(1, 2, 1), (-0.5, 0, -1), (0.5, 1, 0), (0.5, 1.5, -2), (-0.3, 0.5, -1.5), (1.2, 0.7, 3)]:
        emit("wright", [lam, mu, z], wright(lam, mu, z))
    for alpha in [0.3, 0.5, 0.7, 0.9]:
        for x in [0.05, 0.2, 0.5, 1, 3, 10]:
            emit("stable_density", [alpha, x], density_value(alpha, x))
    # inverse stable density f(t, x) = (t/a) x^(-1-1/a) g(t x^(-1/a))
    for alpha in [0.3, 0.7, 0.9]:
        for t in [0.5, 1, 2]:
            for x in [0.1, 0.5, 1, 2]:
                with mp.workdps(50):
                    arg = mp.mpf(t) * mp.mpf(x) ** (-1 / mp.mpf(alpha))
                    v = mp.mpf(t) / alpha * mp.mpf(x) ** (-1 - 1 / mp.mpf(alpha)) * density_value(alpha, arg)
                emit("inverse_stable_density", [alpha, t, x], v)


def section_mixed():
    for (a1, a2, c1) in [(0.5, 0.9, 0.5), (0.3, 0.7, 0.2)]:
        c2 = 1 - c1
        phi = lambda s: c1 * s ** a1 + c2 * s ** a2
        for t in [0.5, 1, 2]:
            for x in [0.1, 0.5, 1, 2]:
                v1 = talbot(lambda s: phi(s) / s * mp.exp(-x * phi(s)), t, 60)
                v2 = talbot(lambda s: phi(s) / s * mp.exp(-x * phi(s)), t, 90)
                if abs(v1 - v2) > mp.mpf(10) ** -20:
                    continue
                emit("mixed_inverse_density", [a1, a2, c1, t, x], v2)
            u = talbot(lambda s: 1 / (s * phi(s)), t, 60)
            emit("mixed_renewal", [a1, a2, c1, t], u)
            m2 = talbot(lambda s: 2 / (s * phi(s) ** 2), t, 60)
            emit("mixed_second_moment", [a1, a2, c1, t], m2)
    # mixed-fractional Poisson pmf through the Laplace transform of the count law
    for (a1, a2, c1, lam, t) in [(0.5, 0.9, 0.5, 1.0, 1.0), (0.3, 0.7, 0.2, 2.0, 0.5)]:
        c2 = 1 - c1
        phi = lambda s: c1 * s ** a1 + c2 * s ** a2
        for k in range(0, 11):
            v = talbot(lambda s: lam ** k * phi(s) / (s * (lam + phi(s)) ** (k + 1)), t, 60)
            emit("mfpp_pmf", [a1, a2, c1, lam, t, k], v)
    # covariance of the inverse stable subordinator by direct quadrature
    for (alpha, t, s) in [(0.5, 1, 1), (0.75, 1, 2), (0.6, 0.3, 5), (0.9, 2, 3)]:
        with mp.workdps(40):
            m = min(t, s)
            a = mp.mpf(alpha)
            integ = mp.quad(lambda tau: ((t - tau) ** a + (s - tau) ** a) * tau ** (a - 1), [0, m])
            v = integ / (mp.gamma(1 + a) * mp.gamma(a)) - (mp.mpf(s) * t) ** a / mp.gamma(1 + a) ** 2
        emit("inverse_cov", [alpha, t, s], v)


SECTIONS = {"ml": section_ml, "ml3": section_ml3, "density": section_density, "mixed": section_mixed}


def main():
    mp.mp.dps = 40
    names = sys.argv[1:] or list(SECTIONS)
    for name in names:
        rows.clear()
        SECTIONS[name]()
        path = os.path.join(OUT_DIR, f"oracle_{name}.csv")
        with open(path, "w", newline="") as fh:
            w = csv.writer(fh)
            w.writerow(["name", "args", "value"])
            for r in rows:
                w.writerow(r)
        print(f"wrote {len(rows)} rows to {path}", file=sys.stderr)


if __name__ == "__main__":
    main()
