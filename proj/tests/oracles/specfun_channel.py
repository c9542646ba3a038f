"""Reference values for test_specfun / test_channel, computed with mpmath at 40 digits."""
import mpmath as mp

mp.mp.dps = 40


def euler(a, c, kernel):
    f = lambda u: u ** (a - 1) * (1 - u) ** (c - a - 1) * kernel(u)
    return mp.quad(f, [0, 0.5, 1]) / mp.beta(a, c - a)


def fd(a, b, c, x):
    return euler(a, c, lambda u: mp.fprod((1 - u * xi) ** (-bi) for bi, xi in zip(b, x)))


def phi1(a, b, c, x, xn):
    return euler(a, c, lambda u: mp.fprod((1 - u * xi) ** (-bi) for bi, xi in zip(b, x)) * mp.exp(u * xn))


def phi2(b1, b2, c, x1, x2, terms=400):
    s = mp.mpf(0)
    for m in range(terms):
        for n in range(terms - m):
            s += mp.rf(b1, m) * mp.rf(b2, n) / mp.rf(c, m + n) * mp.mpf(x1) ** m * mp.mpf(x2) ** n / (mp.factorial(m) * mp.factorial(n))
    return s


def etamu_pdf(eta, mu, g, gb):
    eta, mu = mp.mpf(eta), mp.mpf(mu)
    h = (2 + 1 / eta + eta) / 4
    H = (1 / eta - eta) / 4
    if H == 0:
        return (2 * mu / gb) ** (2 * mu) * g ** (2 * mu - 1) * mp.exp(-2 * mu * g / gb) / mp.gamma(2 * mu)
    return (2 * mp.sqrt(mp.pi) * mu ** (mu + 0.5) * h ** mu / (mp.gamma(mu) * abs(H) ** (mu - 0.5))
            * g ** (mu - 0.5) / gb ** (mu + 0.5) * mp.exp(-2 * mu * h * g / gb)
            * mp.besseli(mu - 0.5, 2 * mu * abs(H) * g / gb))


def kappamu_pdf(k, mu, g, gb):
    k, mu = mp.mpf(k), mp.mpf(mu)
    if k == 0:
        return (mu / gb) ** mu * g ** (mu - 1) * mp.exp(-mu * g / gb) / mp.gamma(mu)
    return (mu * (1 + k) ** ((mu + 1) / 2) / (k ** ((mu - 1) / 2) * mp.exp(mu * k))
            * g ** ((mu - 1) / 2) / gb ** ((mu + 1) / 2) * mp.exp(-mu * (1 + k) * g / gb)
            * mp.besseli(mu - 1, 2 * mu * mp.sqrt(k * (1 + k) * g / gb)))


def cdf(pdf, th):
    return mp.quad(pdf, [0, th / 4, th / 2, th])


def emit(label, v):
    print(f"{label} = {mp.nstr(v, 17)}")


if __name__ == "__main__":
    emit("fd2", fd(0.7, [1.3, 0.4], 2.9, [0.3, -1.7]))
    emit("fd3", fd(1.5, [0.5, 2.0, 1.25], 3.2, [0.9, 0.2, -3.0]))
    emit("fd3_near1", fd(0.4, [0.8, 0.3, 0.6], 1.1, [0.999, 0.5, -0.5]))
    emit("fd2_series", fd(2.0, [0.5, 1.5], 4.5, [0.5, -0.6]))
    emit("appellf1", mp.appellf1(0.7, 1.3, 0.4, 2.9, 0.3, -0.6))
    emit("phi1", phi1(1.2, [0.6, 1.1], 2.6, [0.4, -2.0], -1.5))
    emit("phi1_pos", phi1(0.5, [0.8], 1.7, [-0.3], 2.0))
    emit("phi2_a", phi2(0.75, 1.5, 2.5, -1.2, -0.4, 200))
    emit("phi2_b", phi2(1.0, 2.0, 3.5, 0.5, -2.0, 200))
    # Y_nu(a, b) = 1 - CDF(eta-mu) with a = H/h, b = sqrt(2 mu h g_th / gbar)
    for eta, mu, th, gb in [(0.3, 0.8, 1.0, 2.0), (2.5, 1.7, 3.0, 1.0), (0.05, 0.25, 0.5, 1.0), (1.0, 1.5, 4.0, 3.0)]:
        c = cdf(lambda g: etamu_pdf(eta, mu, g, gb), th)
        emit(f"etamu_cdf({eta},{mu},{th},{gb})", c)
    for k, mu, th, gb in [(2.0, 1.5, 1.0, 2.0), (0.0, 0.6, 0.3, 1.0), (5.0, 3.0, 2.0, 1.0), (0.8, 0.4, 1.0, 1.5)]:
        c = cdf(lambda g: kappamu_pdf(k, mu, g, gb), th)
        emit(f"kappamu_cdf({k},{mu},{th},{gb})", c)
    emit("etamu_pdf(0.3,0.8,0.7,2)", etamu_pdf(0.3, 0.8, 0.7, 2.0))
    emit("etamu_pdf(2.5,1.7,1.3,1)", etamu_pdf(2.5, 1.7, 1.3, 1.0))
    emit("kappamu_pdf(2,1.5,0.9,2)", kappamu_pdf(2.0, 1.5, 0.9, 2.0))
    emit("kappamu_pdf(5,3,40,10)", kappamu_pdf(5.0, 3.0, 40.0, 10.0))
    for nu, z in [(0.3, 2.5), (2.2, 40.0), (-0.5, 700.0), (1.0, 2e4)]:
        emit(f"log_ired({nu},{z})", mp.log(mp.besseli(nu, z) / (mp.mpf(z) / 2) ** nu))
    for x, phi in [(1.3, mp.pi / 4), (2.0, mp.atan(0.5)), (4.5, mp.acot(3.0)), (7.0, mp.pi / 4)]:
        emit(f"bounded_q({x},{mp.nstr(phi, 6)})", mp.quad(lambda t: mp.exp(-mp.mpf(x) ** 2 / (2 * mp.sin(t) ** 2)), mp.linspace(0, phi, 40)) / mp.pi)
