#include "toda/riemann.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "toda/errors.hpp"

namespace toda {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

cplx upper_lip(cplx v) { return v.imag() == 0.0 ? cplx(v.real(), 0.0) : v; }

} // namespace

cplx reduce(cplx v, cplx tau)
{
    const double k = std::round(v.imag() / tau.imag());
    v -= k * tau;
    v -= std::round(v.real());
    return v;
}

double lattice_distance(cplx v, cplx u, cplx tau) { return std::abs(reduce(v - u, tau)); }

ThetaValues theta_all(cplx v, cplx tau)
{
    if (!(tau.imag() > 0.0))
        throw ValidationError("theta requires Im tau > 0");
    const double k = std::round(v.imag() / tau.imag());
    cplx u = v - k * tau;
    u -= std::round(u.real());

    cplx s0 = 1.0, s1 = 0.0, s2 = 0.0;
    for (int m = 1; m < 100000; ++m) {
        const double md = m;
        const cplx q = std::exp(I * pi * md * md * tau);
        const cplx e = std::exp(2.0 * pi * I * md * u);
        const cplx tp = q * e;
        const cplx tm = q / e;
        const cplx f = 2.0 * pi * I * md;
        s0 += tp + tm;
        s1 += f * (tp - tm);
        s2 += f * f * (tp + tm);
        if (std::abs(tp) + std::abs(tm) < 1e-17 * std::abs(s0) && md * md * tau.imag() > 1.0)
            break;
    }
    if (k == 0.0)
        return {s0, s1, s2};
    // theta(u + k tau) = exp(-pi i k^2 tau - 2 pi i k u) theta(u)
    const cplx g = -2.0 * pi * I * k;
    const cplx factor = std::exp(-pi * I * k * k * tau + g * u);
    return {factor * s0, factor * (s1 + g * s0), factor * (s2 + 2.0 * g * s1 + g * g * s0)};
}

cplx theta(cplx v, cplx tau) { return theta_all(v, tau).value; }

double TwoBandSurface::abs_r(double x, double lo, double from_lo, double hi, double from_hi) const
{
    double prod = 1.0;
    for (double e : E_) {
        if (e == lo)
            prod *= from_lo;
        else if (e == hi)
            prod *= from_hi;
        else
            prod *= std::abs(x - e);
    }
    return std::sqrt(prod);
}

cplx TwoBandSurface::P(cplx lambda) const
{
    const cplx l = upper_lip(lambda);
    cplx p = -1.0;
    for (double e : E_)
        p *= std::sqrt(l - e);
    return p;
}

cplx TwoBandSurface::time_slope() const { return omega0_b_ / (2.0 * pi * I); }

TwoBandSurface TwoBandSurface::build(const std::array<double, 4>& E, double tol)
{
    for (double e : E)
        if (!std::isfinite(e))
            throw ValidationError("branch points must be finite");
    if (!(E[0] < E[1] && E[1] < E[2] && E[2] < E[3]))
        throw ValidationError("branch points must be strictly increasing");
    const double scale = std::max(1.0, E[3] - E[0]);
    for (int k = 0; k < 3; ++k) {
        if (E[k + 1] - E[k] < 1e-8 * scale) {
            std::ostringstream msg;
            msg << "degenerate surface: E" << k + 2 << " - E" << k + 1 << " = " << E[k + 1] - E[k];
            throw DegenerateSurface(msg.str());
        }
    }

    TwoBandSurface s;
    s.E_ = E;
    s.tol_ = tol;
    auto one = [](double) { return 1.0; };
    auto lin = [](double x) { return x; };
    auto sq = [](double x) { return x * x; };

    s.j_band_ = s.segment_integral(E[0], E[1], one);
    s.j_gap_ = s.segment_integral(E[1], E[2], one);
    s.j_band2_ = s.segment_integral(E[2], E[3], one);
    auto left_tail = [&](double y) {
        return 1.0 / std::sqrt(y * (E[1] - E[0] + y) * (E[2] - E[0] + y) * (E[3] - E[0] + y));
    };
    s.j_left_ = quad::half_line_adaptive(left_tail, tol).value;

    s.c_ = I / (2.0 * s.j_band_);
    s.tau_ = I * s.j_gap_ / s.j_band_;

    const double m1 = s.segment_integral(E[0], E[1], lin);
    const double m2 = s.segment_integral(E[0], E[1], sq);
    const double g1 = s.segment_integral(E[1], E[2], lin);
    const double g2 = s.segment_integral(E[1], E[2], sq);
    s.c1_ = -0.5 * (E[0] + E[1] + E[2] + E[3]);
    s.c0_ = -(m2 + s.c1_ * m1) / s.j_band_;
    s.d_ = -m1 / s.j_band_;
    s.omega0_b_ = 2.0 * (g2 + s.c1_ * g1 + s.c0_ * s.j_gap_);
    s.abel_infty_ = 2.0 * (g1 + s.d_ * s.j_gap_) / (2.0 * pi * I);
    s.abel_inf_plus_ = I * s.j_left_ / (2.0 * s.j_band_);

    s.nodes_ = quad::sqrt_ends_adaptive(
                   [&](double x, double fl, double fh) { return 1.0 / s.abs_r(x, E[0], fl, E[1], fh); }, E[0],
                   E[1], tol)
                   .nodes;
    s.verify_riemann_constant();
    return s;
}

int TwoBandSurface::segment_of(double x) const
{
    if (x < E_[0])
        return 0;
    if (x <= E_[1])
        return 1;
    if (x <= E_[2])
        return 2;
    if (x <= E_[3])
        return 3;
    return 4;
}

double TwoBandSurface::partial(int seg, double x) const
{
    const double lo = E_[seg - 1];
    const double hi = E_[seg];
    const double full = seg == 1 ? j_band_ : seg == 2 ? j_gap_ : j_band2_;
    auto one = [](double) { return 1.0; };
    if (x <= lo)
        return 0.0;
    if (x >= hi)
        return full;
    if (x - lo <= hi - x)
        return segment_integral(lo, x, one);
    return full - segment_integral(x, hi, one);
}

double TwoBandSurface::outer_left(double x) const
{
    if (x >= E_[0])
        return 0.0;
    if (!std::isfinite(x))
        return j_left_;
    auto one = [](double) { return 1.0; };
    if (E_[0] - x <= E_[1] - E_[0])
        return segment_integral(x, E_[0], one);
    auto tail = [&](double y) {
        const double v = x - y;
        return 1.0 / std::sqrt(std::abs((v - E_[0]) * (v - E_[1]) * (v - E_[2]) * (v - E_[3])));
    };
    return j_left_ - quad::half_line_adaptive(tail, tol_).value;
}

double TwoBandSurface::outer_right(double x) const
{
    const double j_right = j_gap_ - j_left_;
    if (x <= E_[3])
        return 0.0;
    if (!std::isfinite(x))
        return j_right;
    auto one = [](double) { return 1.0; };
    if (x - E_[3] <= E_[3] - E_[2])
        return segment_integral(E_[3], x, one);
    auto tail = [&](double y) {
        const double v = x + y;
        return 1.0 / std::sqrt(std::abs((v - E_[0]) * (v - E_[1]) * (v - E_[2]) * (v - E_[3])));
    };
    return j_right - quad::half_line_adaptive(tail, tol_).value;
}

cplx TwoBandSurface::abel_real(double x) const
{
    const double k = 1.0 / (2.0 * j_band_);
    switch (segment_of(x)) {
    case 0:
        return I * k * outer_left(x);
    case 1:
        return k * partial(1, x);
    case 2:
        return 0.5 + I * k * partial(2, x);
    case 3:
        return 0.5 + tau_ / 2.0 - k * partial(3, x);
    default:
        return tau_ / 2.0 - I * k * outer_right(x);
    }
}

cplx TwoBandSurface::abel_vertical(double x0, double y) const
{
    // int_0^y zeta(x0 + i s) i ds, square-root behaviour at s = 0 when x0 is a
    // branch point.
    auto f = [&](double, double from_lo, double) { return zeta(cplx(x0, from_lo)) * I; };
    return quad::sqrt_ends_adaptive(f, 0.0, y, tol_).value;
}

JacobianPoint TwoBandSurface::abel_map(const SurfacePoint& p) const
{
    cplx v;
    if (p.at_infinity()) {
        v = abel_inf_plus_;
    } else {
        const double x0 = p.lambda.real();
        const double y = p.lambda.imag();
        if (y == 0.0)
            v = abel_real(x0);
        else if (y > 0.0)
            v = abel_real(x0) + abel_vertical(x0, y);
        else
            v = -std::conj(abel_real(x0) + abel_vertical(x0, -y));
    }
    if (p.sheet == Sheet::Lower)
        v = -v;
    return {reduce(v, tau_)};
}

SurfacePoint TwoBandSurface::invert_on_real_line(cplx w, bool& ok) const
{
    ok = true;
    const double T = tau_.imag();
    const double tol = 1e-9;
    const double two_j = 2.0 * j_band_;
    auto solve = [&](int seg, double target) {
        auto h = [&](double x) { return partial(seg, x) - target; };
        auto r = quad::find_root(h, E_[seg - 1], E_[seg], 1e-15 * std::max(1.0, std::abs(E_[seg])));
        return r.value_or(target <= 0.0 ? E_[seg - 1] : E_[seg]);
    };

    if (std::abs(w.imag()) <= tol) {
        const double r = w.real();
        return {cplx(solve(1, std::abs(r) * two_j), 0.0), r >= 0.0 ? Sheet::Upper : Sheet::Lower};
    }
    if (std::abs(std::abs(w.imag()) - T / 2.0) <= tol) {
        const double r = reduce(w - tau_ / 2.0, tau_).real();
        const double q = r >= 0.0 ? 0.5 - r : r + 0.5;
        return {cplx(solve(3, q * two_j), 0.0), r >= 0.0 ? Sheet::Upper : Sheet::Lower};
    }
    if (std::abs(std::abs(w.real()) - 0.5) <= tol) {
        const double y = reduce(w - 0.5, tau_).imag();
        return {cplx(solve(2, std::abs(y) * two_j), 0.0), y >= 0.0 ? Sheet::Upper : Sheet::Lower};
    }
    if (std::abs(w.real()) <= tol) {
        const double y = w.imag();
        const Sheet sheet = y >= 0.0 ? Sheet::Upper : Sheet::Lower;
        const double q = std::abs(y) * two_j;
        if (std::abs(q - j_left_) <= 1e-12 * std::max(1.0, j_left_))
            return SurfacePoint::infinity(sheet);
        if (q < j_left_) {
            double span = std::max(1.0, E_[1] - E_[0]);
            while (outer_left(E_[0] - span) < q && span < 1e12)
                span *= 2.0;
            auto h = [&](double x) { return outer_left(x) - q; };
            auto r = quad::find_root(h, E_[0] - span, E_[0], 1e-15 * std::max(1.0, span));
            return {cplx(r.value_or(E_[0] - span), 0.0), sheet};
        }
        const double target = j_gap_ - q; // int_{E4}^{x}
        double span = std::max(1.0, E_[3] - E_[2]);
        while (outer_right(E_[3] + span) < target && span < 1e12)
            span *= 2.0;
        auto h = [&](double x) { return outer_right(x) - target; };
        auto r = quad::find_root(h, E_[3], E_[3] + span, 1e-15 * std::max(1.0, span));
        return {cplx(r.value_or(E_[3] + span), 0.0), sheet};
    }
    ok = false;
    return {};
}

SurfacePoint TwoBandSurface::invert_by_theta(cplx w) const
{
    // lambda - E1 = K theta(w - Xi)^2 / (theta(w - A - Xi) theta(w + A - Xi)),
    // A = abel image of inf+: double zero at E1, simple poles at inf+-.
    const cplx xi = riemann_const();
    const cplx a = abel_inf_plus_;
    auto quotient = [&](cplx v, cplx& den) {
        const cplx num = theta(v - xi, tau_);
        den = theta(v - a - xi, tau_) * theta(v + a - xi, tau_);
        return num * num;
    };
    cplx den_half;
    const cplx q_half = quotient(0.5, den_half);
    const cplx K = (E_[1] - E_[0]) * den_half / q_half;
    cplx den;
    const cplx num = quotient(w, den);
    if (std::abs(den) < 1e-14 * std::abs(num)) {
        const Sheet sheet = lattice_distance(w, a, tau_) < lattice_distance(w, -a, tau_) ? Sheet::Upper : Sheet::Lower;
        return SurfacePoint::infinity(sheet);
    }
    cplx lambda = E_[0] + K * num / den;

    auto residual = [&](const SurfacePoint& p) { return reduce(abel_map(p).v - w, tau_); };
    SurfacePoint p{lambda, Sheet::Upper};
    if (std::abs(residual(p.flipped())) < std::abs(residual(p)))
        p = p.flipped();
    for (int it = 0; it < 8; ++it) {
        const cplx r = residual(p);
        if (std::abs(r) < 1e-13)
            break;
        const cplx slope = p.sheet == Sheet::Upper ? zeta(p.lambda) : -zeta(p.lambda);
        p.lambda -= r / slope;
    }
    return p;
}

SurfacePoint TwoBandSurface::jacobi_invert(const JacobianPoint& w) const
{
    const cplx v = reduce(w.v, tau_);
    bool ok = false;
    SurfacePoint p = invert_on_real_line(v, ok);
    if (ok)
        return p;
    return invert_by_theta(v);
}

void TwoBandSurface::verify_riemann_constant() const
{
    const cplx xi = riemann_const();
    const double scale = std::abs(theta(0.0, tau_));
    if (std::abs(theta(-xi, tau_)) > 1e-10 * scale)
        throw BasisConventionError("theta does not vanish at the Riemann constant");
    // Single-point divisor in the gap: the theta function pulled back to the
    // surface may vanish only at the divisor itself.
    const double mid = 0.5 * (E_[1] + E_[2]);
    const cplx d = abel_real(mid);
    const double probes[] = {0.5 * (E_[0] + E_[1]), 0.5 * (E_[2] + E_[3]), E_[3] + 1.0, E_[0] - 1.0,
                             E_[1] + 0.25 * (E_[2] - E_[1])};
    for (double x : probes) {
        for (Sheet sh : {Sheet::Upper, Sheet::Lower}) {
            const cplx v = abel_map({cplx(x, 0.0), sh}).v;
            if (std::abs(theta(v - d - xi, tau_)) < 1e-8 * scale)
                throw BasisConventionError("theta vanishes away from the divisor; homology basis mismatch");
        }
    }
    const cplx at_flip = abel_map({cplx(mid, 0.0), Sheet::Lower}).v;
    if (std::abs(theta(at_flip - d - xi, tau_)) < 1e-8 * scale)
        throw BasisConventionError("theta vanishes at the involution image of the divisor");
}

nlohmann::json TwoBandSurface::to_json() const
{
    auto c = [](cplx v) { return nlohmann::json::array({v.real(), v.imag()}); };
    return nlohmann::json{{"E", E_},
                          {"tau", c(tau_)},
                          {"band_integral", j_band_},
                          {"gap_integral", j_gap_},
                          {"zeta_constant", c(c_)},
                          {"omega0_c1", c1_},
                          {"omega0_c0", c0_},
                          {"omega0_b_period", c(omega0_b_)},
                          {"time_slope", c(time_slope())},
                          {"abel_infty", c(abel_infty_)},
                          {"abel_infinity_plus", c(abel_inf_plus_)},
                          {"riemann_const", c(riemann_const())},
                          {"trace_b", trace_b()}};
}

} // namespace toda
