"""Regenerate the Taylor coefficients used by ``ahpairs._rs_coefficients``.

The Riemann-Siegel remainder terms C0..C4 are combinations of derivatives of

    psi(p) = cos(2 pi (p^2 - p - 1/16)) / cos(2 pi p)

which is entire.  We expand psi about p = 1/2 in u = p - 1/2 at high
precision and emit the polynomial coefficients of C0..C4 in u.

Run:  python3 scripts/gen_rs_coefficients.py > src/ahpairs/_rs_coefficients.py
"""
import mpmath as mp

mp.mp.dps = 80
DEG = 70
OUT = 40


def series_cos_poly(poly, n):
    # cos(poly(u)) via exp of i*poly, truncated power series arithmetic
    x = [mp.mpc(0)] * n
    for i, v in enumerate(poly):
        if i < n:
            x[i] = 1j * v
    # exp(x) with x[0] split off
    e0 = mp.exp(x[0])
    x[0] = 0
    out = [mp.mpc(0)] * n
    out[0] = mp.mpc(1)
    term = list(out)
    for k in range(1, n):
        nxt = [mp.mpc(0)] * n
        for i, a in enumerate(term):
            if a == 0:
                continue
            for j in range(1, n - i):
                if x[j] != 0:
                    nxt[i + j] += a * x[j]
        term = [v / k for v in nxt]
        out = [o + t for o, t in zip(out, term)]
    return [mp.re(e0 * v) for v in out]


def series_div(a, b, n):
    q = [mp.mpf(0)] * n
    for i in range(n):
        s = a[i] - sum(q[j] * b[i - j] for j in range(i))
        q[i] = s / b[0]
    return q


# psi(1/2 + u) = cos(2 pi (u^2 - 5/16)) / (-cos(2 pi u))
num = series_cos_poly([-2 * mp.pi * mp.mpf(5) / 16, 0, 2 * mp.pi], DEG + 1)
den = [-v for v in series_cos_poly([0, 2 * mp.pi], DEG + 1)]
c = series_div(num, den, DEG + 1)


def deriv(coeffs, k):
    out = list(coeffs)
    for _ in range(k):
        out = [i * out[i] for i in range(1, len(out))]
    return out


def combo(terms):
    n = max(len(deriv(c, k)) for k, _ in terms)
    acc = [mp.mpf(0)] * n
    for k, w in terms:
        d = deriv(c, k)
        for i, v in enumerate(d):
            acc[i] += w * v
    return acc[:OUT]


pi = mp.pi
C = [
    combo([(0, 1)]),
    combo([(3, -1 / (96 * pi**2))]),
    combo([(2, 1 / (64 * pi**2)), (6, 1 / (18432 * pi**4))]),
    combo([(1, -1 / (64 * pi**2)), (5, -1 / (3840 * pi**4)), (9, -1 / (5308416 * pi**6))]),
    combo([
        (0, 1 / (128 * pi**2)),
        (4, 19 / (24576 * pi**4)),
        (8, 11 / (5898240 * pi**6)),
        (12, 1 / (2038431744 * pi**8)),
    ]),
]

print('"""Riemann-Siegel remainder coefficients, generated by scripts/gen_rs_coefficients.py."""')
print()
print("# C_k(p) = sum_i RS_COEFFS[k][i] * (p - 1/2)**i")
print("RS_COEFFS = (")
for row in C:
    print("    (")
    for v in row:
        v = v if abs(v) > mp.mpf(10) ** -40 else mp.mpf(0)
        print(f"        {mp.nstr(v, 20, min_fixed=-1, max_fixed=-1)},")
    print("    ),")
print(")")
