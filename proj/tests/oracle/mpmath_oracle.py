"""Reference values for the unit tests, computed at 40 digits with mpmath.

Run from the repository root:  python3 tests/oracle/mpmath_oracle.py > tests/oracle/oracle_values.hpp
"""
import mpmath as mp

mp.mp.dps = 40
I = mp.mpc(0, 1)


def F(k, lam, a=1):
    ka = k * a
    return ka * mp.cos(ka) + (lam - I * ka) * mp.sin(ka)


def D(k, lam, a=1):
    return k * a + lam * mp.exp(I * k * a) * mp.sin(k * a)


def Dbar(k, lam, a=1):
    return k * a + lam * mp.exp(-I * k * a) * mp.sin(k * a)


def A(k, lam, a=1):
    return -2 * I * k * a / D(k, lam, a)


def Abar(k, lam, a=1):
    return 2 * I * k * a / Dbar(k, lam, a)


def B(k, lam, a=1):
    return -Dbar(k, lam, a) / D(k, lam, a)


def seed(n, lam, a=1):
    npi = n * mp.pi
    return (npi * lam / (1 + lam) - I * (npi / lam) ** 2) / a


def pole(n, lam):
    # Newton from the large-opacity seed; the winding count is checked below.
    return mp.findroot(lambda k: F(k, lam), seed(n, lam))


def winding(lam, re_max, im_max, n=20000):
    # Argument principle on the rectangle (traversed clockwise), origin indented.
    path = [mp.mpf('1e-6'), re_max, re_max - I * im_max, -I * im_max, -I * mp.mpf('1e-6')]
    total = mp.mpf(0)
    for s, e in zip(path, path[1:]):
        prev = F(s, lam)
        for j in range(1, n + 1):
            cur = F(s + (e - s) * j / n, lam)
            total += mp.im(mp.log(cur / prev))
            prev = cur
    # quarter circle back to the start
    prev = F(-I * mp.mpf('1e-6'), lam)
    for j in range(1, 65):
        th = -mp.pi / 2 + (mp.pi / 2) * j / 64
        cur = F(mp.mpf('1e-6') * mp.expj(th), lam)
        total += mp.im(mp.log(cur / prev))
        prev = cur
    return -int(mp.nint(total / (2 * mp.pi)))


def phi_box(n, k, a=1):
    return mp.quad(lambda x: mp.sqrt(2 / mp.mpf(a)) * mp.sin(n * mp.pi * x / a) * mp.sin(k * x), [0, a])


def f(k, x, lam, n=1):
    return phi_box(n, k) * A(k, lam) * Abar(k, lam) * mp.sin(k * x) / (2 * mp.pi)


def residue_prefactor(kn, lam, n=1):
    # C(k_n, x) = -oint f dk = prefactor sin(k_n x), from a contour quadrature.
    r = abs(mp.im(kn)) / 10
    x = mp.mpf('0.5')
    integral = mp.quad(lambda th: f(kn + r * mp.expj(th), x, lam, n) * I * r * mp.expj(th), [0, mp.pi, 2 * mp.pi])
    return -integral / mp.sin(kn * x)


def weight(pref, kn):
    return mp.quad(lambda x: abs(pref * mp.sin(kn * x)) ** 2, [0, 1])


def p_asym(t, lam, n=1):
    slope = mp.quad(lambda x: mp.sqrt(2) * mp.sin(n * mp.pi * x) * x, [0, 1])
    pref = slope * 4 / ((1 + lam) ** 2 * 2 * mp.pi)
    return pref ** 2 * mp.mpf(1) / 3 * mp.pi / (16 * t ** 3)


def emit(name, v):
    if isinstance(v, mp.mpc):
        print(f"inline const std::complex<double> {name}{{{mp.nstr(v.real, 17)}, {mp.nstr(v.imag, 17)}}};")
    elif isinstance(v, int):
        print(f"inline constexpr int {name} = {v};")
    else:
        print(f"inline constexpr double {name} = {mp.nstr(v, 17)};")


print("#pragma once")
print("// Generated by tests/oracle/mpmath_oracle.py (mpmath, 40 digits). Do not edit.")
print()
print("#include <complex>")
print()
print("namespace oracle {")
print()
for lam, count in ((100, 5), (10, 3), (30, 1)):
    for n in range(1, count + 1):
        emit(f"k{n}_lambda{lam}", pole(n, lam))
emit("k1_lambda0p5", mp.findroot(lambda k: F(k, mp.mpf('0.5')), mp.mpc(2.2, -1.1)))
emit("winding_lambda100_k16", winding(100, 16, 1))
emit("winding_lambda10_k10", winding(10, 10, 2))
emit("F3_lambda10", F(mp.mpf(3), 10))
emit("A1_lambda100", A(mp.mpf(1), 100))
emit("B2p5_lambda10", B(mp.mpf('2.5'), 10))
emit("A_near_k1_lambda100", A(pole(1, 100) + mp.mpf('1e-6'), 100))
emit("eigen_k2_x3_lambda10", (mp.expj(-6) + B(mp.mpf(2), 10) * mp.expj(6)) / mp.sqrt(2 * mp.pi))
emit("phi_box1_1m05i", phi_box(1, mp.mpc(1, -0.5)))
emit("f_rot_x05_lambda100", f(mp.expj(-mp.pi / 4), mp.mpf('0.5'), 100))
for lam in (100, 10, 30):
    kn = pole(1, lam)
    pref = residue_prefactor(kn, lam)
    emit(f"C1_prefactor_lambda{lam}", pref)
    emit(f"c1_lambda{lam}", weight(pref, kn))
k1 = pole(1, 10)
g1 = -2 * mp.im(k1 ** 2)
c1 = weight(residue_prefactor(k1, 10), k1)
emit("t_star_lambda10", mp.findroot(lambda t: c1 * mp.exp(-g1 * t) - p_asym(t, 10), 33))
emit("p_asym_t2000_lambda10", p_asym(2000, 10))
print()
print("} // namespace oracle")
