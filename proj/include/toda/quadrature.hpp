#pragma once

// Shared one-dimensional numerics: Gauss-Legendre with square-root endpoint
// substitution, tanh-sinh for logarithmic endpoints, bracketed root finding.
//
// Integrands take (x, from_lo, from_hi) where from_lo = x - lo and
// from_hi = hi - x are supplied without cancellation, so factors such as
// sqrt(x - E) stay accurate next to a branch point.

#include <algorithm>
#include <cmath>
#include <complex>
#include <cstdint>
#include <optional>
#include <vector>

#include <boost/math/quadrature/tanh_sinh.hpp>
#include <boost/math/tools/roots.hpp>

namespace toda::quad {

struct NodeSet {
    std::vector<double> x; // abscissas on [-1, 1]
    std::vector<double> w;
};

// Cached Gauss-Legendre rule with n nodes.
const NodeSet& gauss_legendre(int n);

template <class T>
struct Estimate {
    T value{};
    double error = 0.0; // difference between the last two refinements
    int nodes = 0;
};

inline double magnitude(double v) { return std::abs(v); }
inline double magnitude(std::complex<double> v) { return std::abs(v); }

// Integral over [lo, hi] with x = lo + s^2 on the lower half and x = hi - s^2
// on the upper half. Inverse square-root endpoint behaviour becomes smooth.
template <class F>
auto sqrt_ends(const F& f, double lo, double hi, int n)
{
    using R = decltype(f(lo, 0.0, 0.0));
    const NodeSet& g = gauss_legendre(n);
    const double len = hi - lo;
    const double smax = std::sqrt(0.5 * len);
    R sum{};
    for (std::size_t i = 0; i < g.x.size(); ++i) {
        const double s = 0.5 * smax * (1.0 + g.x[i]);
        const double d = s * s;
        const double w = 0.5 * smax * g.w[i] * 2.0 * s;
        sum += w * (f(lo + d, d, len - d) + f(hi - d, len - d, d));
    }
    return sum;
}

// Node doubling from n0 until two successive values agree to tol (relative to
// max(1, |value|)). Returns the finest value reached.
template <class F>
auto sqrt_ends_adaptive(const F& f, double lo, double hi, double tol = 1e-12,
                        int n0 = 64, int nmax = 2048)
{
    using R = decltype(f(lo, 0.0, 0.0));
    Estimate<R> est;
    R prev = sqrt_ends(f, lo, hi, n0);
    est.value = prev;
    est.nodes = n0;
    est.error = INFINITY;
    for (int n = 2 * n0; n <= nmax; n *= 2) {
        R cur = sqrt_ends(f, lo, hi, n);
        est.value = cur;
        est.nodes = n;
        est.error = magnitude(cur - prev);
        if (est.error <= tol * std::max(1.0, magnitude(cur)))
            break;
        prev = cur;
    }
    return est;
}

// Integral over y in (0, inf) for integrands ~ y^(-1/2) at 0 and decaying at
// least like y^(-2). Uses y = w^2 / (1 - w^2).
template <class F>
double half_line(const F& f, int n)
{
    const NodeSet& g = gauss_legendre(n);
    double sum = 0.0;
    for (std::size_t i = 0; i < g.x.size(); ++i) {
        const double w = 0.5 * (1.0 + g.x[i]);
        const double q = 1.0 - w * w;
        const double y = w * w / q;
        sum += 0.5 * g.w[i] * f(y) * 2.0 * w / (q * q);
    }
    return sum;
}

template <class F>
Estimate<double> half_line_adaptive(const F& f, double tol = 1e-12, int n0 = 64,
                                    int nmax = 2048)
{
    Estimate<double> est;
    double prev = half_line(f, n0);
    est.value = prev;
    est.nodes = n0;
    est.error = INFINITY;
    for (int n = 2 * n0; n <= nmax; n *= 2) {
        double cur = half_line(f, n);
        est.value = cur;
        est.nodes = n;
        est.error = std::abs(cur - prev);
        if (est.error <= tol * std::max(1.0, std::abs(cur)))
            break;
        prev = cur;
    }
    return est;
}

// Double-exponential rule; tolerates logarithmic and algebraic endpoint
// singularities.
template <class F>
double tanh_sinh(const F& f, double lo, double hi, double tol = 1e-12)
{
    static thread_local boost::math::quadrature::tanh_sinh<double> rule;
    const double half = 0.5 * (hi - lo);
    auto g = [&](double, double uc) {
        // uc > 0 carries 1 - u, uc < 0 carries -(1 + u).
        if (uc > 0) {
            const double dhi = half * uc;
            return f(hi - dhi, 2.0 * half - dhi, dhi);
        }
        const double dlo = -half * uc;
        return f(lo + dlo, dlo, 2.0 * half - dlo);
    };
    return half * rule.integrate(g, tol);
}

// Bracketed root of a continuous scalar function. nullopt when the endpoint
// values do not differ in sign.
template <class F>
std::optional<double> find_root(const F& f, double lo, double hi, double xtol = 1e-14)
{
    double flo = f(lo);
    double fhi = f(hi);
    if (flo == 0.0)
        return lo;
    if (fhi == 0.0)
        return hi;
    if (std::signbit(flo) == std::signbit(fhi) || !std::isfinite(flo) || !std::isfinite(fhi))
        return std::nullopt;
    std::uintmax_t iters = 200;
    auto stop = [xtol](double a, double b) { return std::abs(b - a) <= xtol; };
    auto r = boost::math::tools::toms748_solve(f, lo, hi, flo, fhi, stop, iters);
    return 0.5 * (r.first + r.second);
}

} // namespace toda::quad
