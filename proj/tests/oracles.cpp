#include "oracles.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>

namespace oracle {

double bessel_jprime(int m, double x) {
    if (m == 0) return -std::cyl_bessel_j(1.0, x);
    return 0.5 * (std::cyl_bessel_j(m - 1.0, x) - std::cyl_bessel_j(m + 1.0, x));
}

double bessel_jprime_zero(int m, int n) {
    const double step = 1e-3;
    double a = step;
    double fa = bessel_jprime(m, a);
    int found = 0;
    for (double b = a + step;; b += step) {
        const double fb = bessel_jprime(m, b);
        if ((fa < 0) != (fb < 0)) {
            if (++found == n) {
                double lo = a, hi = b, flo = fa;
                for (int it = 0; it < 200 && hi - lo > 1e-15 * hi; ++it) {
                    const double mid = 0.5 * (lo + hi);
                    const double fm = bessel_jprime(m, mid);
                    if ((fm < 0) == (flo < 0)) lo = mid, flo = fm;
                    else hi = mid;
                }
                return 0.5 * (lo + hi);
            }
        }
        a = b;
        fa = fb;
    }
}

namespace {

// Composite Simpson on [a, b].
template <class F>
double simpson(F f, double a, double b, int intervals) {
    const double h = (b - a) / intervals;
    double s = f(a) + f(b);
    for (int i = 1; i < intervals; ++i) s += (i % 2 ? 4.0 : 2.0) * f(a + i * h);
    return s * h / 3.0;
}

}  // namespace

double disc_mode_mass_fraction(int m, double r0) {
    const double k = bessel_jprime_zero(m, 1);
    auto f = [&](double r) {
        const double j = std::cyl_bessel_j(static_cast<double>(m), k * r);
        return j * j * r;
    };
    const double outer = simpson(f, r0, 1.0, 4000);
    const double total = simpson(f, 0.0, r0, 4000) + outer;
    return outer / total;
}

std::vector<double> square_neumann_spectrum(int count) {
    std::vector<double> all;
    for (int p = 0; p < 20; ++p)
        for (int q = 0; q < 20; ++q) all.push_back(std::numbers::pi * std::numbers::pi * (p * p + q * q));
    std::sort(all.begin(), all.end());
    all.resize(static_cast<std::size_t>(count));
    return all;
}

}  // namespace oracle
