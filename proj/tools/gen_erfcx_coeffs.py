"""Generate Chebyshev coefficients for erfcx(x) on [0, inf).

The variable map t = (x - K) / (x + K) takes [0, inf) onto [-1, 1).  The
coefficients are printed as a C++ initializer list for src/simd/erfcx_coeffs.hpp.
"""
import mpmath as mp

mp.mp.dps = 50
K = mp.mpf(3.75)
N = 48


def f(t):
    x = K * (1 + t) / (1 - t)
    return mp.erfc(x) * mp.exp(x * x)


def cheb_coeffs(n):
    # Gauss-Chebyshev nodes; f(1) is the x -> inf limit, avoided by the nodes.
    nodes = [mp.cos(mp.pi * (k + mp.mpf(1) / 2) / n) for k in range(n)]
    vals = [f(t) for t in nodes]
    out = []
    for j in range(n):
        s = mp.fsum(vals[k] * mp.cos(mp.pi * j * (k + mp.mpf(1) / 2) / n) for k in range(n))
        out.append(2 * s / n)
    out[0] /= 2
    return out


def clenshaw(c, t):
    b1 = b2 = mp.mpf(0)
    for cj in reversed(c[1:]):
        b1, b2 = 2 * t * b1 - b2 + cj, b1
    return t * b1 - b2 + c[0]


if __name__ == "__main__":
    c = cheb_coeffs(N)
    # Truncate where terms drop below 1e-18 relative to c0.
    keep = max(j for j in range(N) if abs(c[j]) > 1e-18 * abs(c[0])) + 1
    c = c[:keep]
    worst = 0
    for i in range(2001):
        x = mp.mpf(i) / 50  # [0, 40]
        t = (x - K) / (x + K)
        ref = mp.erfc(x) * mp.exp(x * x)
        err = abs(clenshaw([mp.mpf(float(v)) for v in c], t) / ref - 1)
        worst = max(worst, err)
    print(f"// K = {float(K)}, {len(c)} terms, max rel err on [0,40] = {float(worst):.3e}")
    for v in c:
        print(f"    {float(v):.17e},")
