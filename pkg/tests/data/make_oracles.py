"""Regenerate oracles.json from independent references (mpmath, numpy companion roots).

Run from the repository root: ``python tests/data/make_oracles.py``.
"""

import json
from pathlib import Path

import mpmath as mp
import numpy as np

mp.mp.dps = 40


def gamma_ratio(lam, l, n):
    """Closed-form ``eig(l) / eig(0)`` for the even kernel."""
    lam = mp.mpc(lam)
    return (-1) ** (l // 2) * mp.gamma((l - lam) / 2) * mp.gamma((lam + n + 1) / 2) / (
        mp.gamma(-lam / 2) * mp.gamma((l + lam + n + 1) / 2))


def direct_eigen(lam, l, n):
    """``int_{-1}^1 |s|^lam / Gamma((lam+1)/2) G_l(s) (1-s^2)^((n-2)/2) ds`` for Re lam > -1."""
    a = mp.mpf(n - 1) / 2
    g1 = mp.gegenbauer(l, a, 1)
    f = lambda s: 2 * s ** lam * mp.gegenbauer(l, a, s) / g1 * (1 - s * s) ** (mp.mpf(n - 2) / 2)
    return mp.quad(f, [0, mp.mpf(1) / 2, 1]) * mp.rgamma((mp.mpf(lam) + 1) / 2)


def companion_count(coef, tol=1e-7):
    """Distinct roots of a polynomial from companion-matrix eigenvalues, clustered by ``tol``."""
    roots = np.roots(coef[::-1])
    distinct = []
    for r in roots:
        if all(abs(r - d) > tol for d in distinct):
            distinct.append(r)
    return len(distinct)


def main():
    out = {"sphere_ratios": [], "sphere_direct": [], "crofton_numbers": {}}
    for lam, n in [(-1.5, 2), (-2.5, 3), (-1.2, 4), (-0.4, 5)]:
        for l in (2, 4, 8, 12):
            out["sphere_ratios"].append({"lam": lam, "n": n, "l": l,
                                         "value": float(gamma_ratio(lam, l, n).real)})
    for lam, n, l in [(-0.5, 2, 0), (-0.5, 3, 2), (0.3, 2, 6), (1.0, 4, 4)]:
        out["sphere_direct"].append({"lam": lam, "n": n, "l": l,
                                     "value": float(direct_eigen(lam, l, n))})
    rng = np.random.default_rng(7)
    curves = {"linear": [[0, 1.0], [0, 2.0]], "t,t^2": [[0, 1.0], [0, 0, 1.0]],
              "t^3,t": [[0, 0, 0, 1.0], [0, 1.0]]}
    for name, u in curves.items():
        counts = set()
        for _ in range(64):
            z = rng.standard_normal((3, 2)) @ np.array([1.0, 1j])
            m = max(len(c) for c in u)
            coef = np.zeros(m, complex)
            coef[0] += z[0]
            for xi, c in zip(z[1:], u):
                coef[:len(c)] += xi * np.array(c)
            counts.add(companion_count(coef))
        out["crofton_numbers"][name] = sorted(counts)
    path = Path(__file__).with_name("oracles.json")
    path.write_text(json.dumps(out, indent=1, sort_keys=True) + "\n")


if __name__ == "__main__":
    main()
