"""Reference values of P_alpha(t) for the frac_driven unit tests.

P = lambda^alpha/(i alpha) int_0^tau E_{a,a}(-iu) E_a(i s^a) e^{-i r s} du,
s = omega t - u^{1/alpha}, tau = (omega t)^alpha, omega = 1, Omega = r omega.
Mittag-Leffler factors are summed from their power series at high precision and the
integral is done by mpmath tanh-sinh quadrature, split at tau/2.
"""
import mpmath as mp

mp.mp.dps = 40


def ml(a, b, z):
    a, b, z = mp.mpf(a), mp.mpf(b), mp.mpc(z)
    s, k = mp.mpc(0), 0
    while True:
        t = z**k / mp.gamma(a * k + b)
        s += t
        if k > 20 and abs(t) < mp.mpf(10) ** (-mp.mp.dps + 5) * max(1, abs(s)):
            return s
        k += 1


def p_alpha(a, lam, r, t):
    a, t = mp.mpf(a), mp.mpf(t)

    def f(u):
        s = t - u ** (1 / a)
        return ml(a, a, -1j * u) * ml(a, 1, 1j * s**a) * mp.exp(-1j * r * s) / a

    return lam**a / 1j * mp.quad(f, [0, t**a / 2, t**a])


if __name__ == "__main__":
    for a, r, t in [(0.8, 1, 3), (0.5, 2, 5), (0.6, 1, 5), (0.3, 2, 10), (0.9, 2, 10)]:
        p = p_alpha(a, mp.mpf("0.1"), r, t)
        print(f"({a}, {r:.1f}, {t:.1f}, {float(p.real)!r}, {float(p.imag)!r}),")
