#include "toda/whitham.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <sstream>

#include "toda/errors.hpp"
#include "toda/quadrature.hpp"

namespace toda {

namespace {

constexpr double quad_tol = 1e-13;

double inf_l(const Background& l) { return l.spectrum_lo(); }
double sup_l(const Background& l) { return l.spectrum_hi(); }

void require_shock_like(const Background& left, const char* what)
{
    validate(left);
    if (!(inf_l(left) < -1.0)) {
        std::ostringstream msg;
        msg << what << " requires inf I_l < -1 (got " << inf_l(left) << ")";
        throw ValidationError(msg.str());
    }
}

// Integrals over [E1, -1] of g(x) / sqrt(x^2 - 1).
template <class G>
double below_minus_one(double lo, const G& g)
{
    auto f = [&](double x, double, double from_hi) { return g(x) / std::sqrt((1.0 - x) * from_hi); };
    return quad::sqrt_ends_adaptive(f, lo, -1.0, quad_tol).value;
}

cplx p_whitham(cplx lambda, double e1, double gamma)
{
    const cplx l = lambda.imag() == 0.0 ? cplx(lambda.real(), 0.0) : lambda;
    return -std::sqrt(l - e1) * std::sqrt(l - gamma) * std::sqrt(l + 1.0) * std::sqrt(l - 1.0);
}

std::string ray_error(double xi, const char* zone)
{
    std::ostringstream msg;
    msg << "xi = " << xi << " lies outside the " << zone;
    return msg.str();
}

} // namespace

NormalizedProblem normalize_right(const Background& left, const Background& right)
{
    validate(left);
    validate(right);
    NormalizedProblem p;
    p.map.scale = 2.0 * right.a;
    p.map.shift = right.b;
    p.left = Background{left.a / p.map.scale, (left.b - right.b) / p.map.scale};
    return p;
}

Background mirror_background(const Background& left)
{
    validate(left);
    return Background{1.0 / (4.0 * left.a), left.b / (2.0 * left.a)};
}

std::string to_string(ScenarioKind k)
{
    switch (k) {
    case ScenarioKind::ShockNonOverlap:
        return "ShockNonOverlap";
    case ScenarioKind::ShockOverlap:
        return "ShockOverlap";
    case ScenarioKind::RarefactionNonOverlap:
        return "RarefactionNonOverlap";
    case ScenarioKind::RarefactionOverlap:
        return "RarefactionOverlap";
    case ScenarioKind::MixedRightInLeft:
        return "MixedRightInLeft";
    case ScenarioKind::MixedLeftInRight:
        return "MixedLeftInRight";
    case ScenarioKind::Flat:
        return "Flat";
    }
    return "Flat";
}

std::string to_string(ZoneKind k)
{
    switch (k) {
    case ZoneKind::LeftBackground:
        return "left_background";
    case ZoneKind::LeftWhitham:
        return "left_whitham";
    case ZoneKind::Gap:
        return "gap";
    case ZoneKind::RightWhitham:
        return "right_whitham";
    case ZoneKind::RightBackground:
        return "right_background";
    case ZoneKind::Constant:
        return "constant";
    case ZoneKind::SlopeLeft:
        return "slope_left";
    case ZoneKind::SlopeRight:
        return "slope_right";
    case ZoneKind::MixedTwoBand:
        return "mixed_two_band";
    }
    return "constant";
}

const Zone& Scenario::zone_at(double xi) const
{
    for (const Zone& z : zones)
        if (xi >= z.xi_lo && xi < z.xi_hi)
            return z;
    return zones.back();
}

nlohmann::json Scenario::to_json() const
{
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    nlohmann::json j;
    j["kind"] = to_string(kind);
    j["left"] = {{"a", left.a}, {"b", left.b}};
    j["rays"] = nlohmann::json::array();
    for (const Ray& r : rays)
        j["rays"].push_back({{"label", r.label}, {"xi", r.xi}});
    j["zones"] = nlohmann::json::array();
    for (const Zone& z : zones)
        j["zones"].push_back({{"kind", to_string(z.kind)}, {"xi_lo", num(z.xi_lo)}, {"xi_hi", num(z.xi_hi)}});
    return j;
}

Scenario classify(const Background& left)
{
    validate(left);
    const double a = left.a;
    const double b = left.b;
    const double lo = inf_l(left);
    const double hi = sup_l(left);
    Scenario s;
    s.left = left;
    std::vector<ZoneKind> inner;

    if (std::abs(lo + 1.0) < 1e-14 && std::abs(hi - 1.0) < 1e-14) {
        s.kind = ScenarioKind::Flat;
        s.zones.push_back({ZoneKind::RightBackground, -INFINITY, INFINITY});
        return s;
    }
    if (lo <= -1.0 && hi >= 1.0) {
        s.kind = ScenarioKind::MixedRightInLeft;
        s.rays = {{"left_edge", -2.0 * a},
                  {"slope_end", (b - 2.0 * a - 1.0) / 2.0},
                  {"whitham_start", (b - 2.0 * a + 3.0) / 2.0},
                  {"xi_r", xi_r(left)}};
        inner = {ZoneKind::SlopeLeft, ZoneKind::Constant, ZoneKind::RightWhitham};
    } else if (lo >= -1.0 && hi <= 1.0) {
        s.kind = ScenarioKind::MixedLeftInRight;
        s.rays = {{"xi_cr", xi_cr_closed_form(left)},
                  {"gap_opens", (1.0 - b) / 2.0 - 3.0 * a},
                  {"edge_crosses_inf_left", (1.0 - b) / 2.0 + a},
                  {"right_edge", 1.0}};
        inner = {ZoneKind::MixedTwoBand, ZoneKind::Constant, ZoneKind::SlopeRight};
    } else if (lo < -1.0) {
        if (hi < -1.0) {
            s.kind = ScenarioKind::ShockNonOverlap;
            s.rays = {{"xi_l", xi_l(left)},
                      {"xi_l_prime", xi_l_prime(left)},
                      {"xi_r_prime", xi_r_prime(left)},
                      {"xi_r", xi_r(left)}};
            inner = {ZoneKind::LeftWhitham, ZoneKind::Gap, ZoneKind::RightWhitham};
        } else {
            s.kind = ScenarioKind::ShockOverlap;
            s.rays = {{"xi_l", xi_l(left)},
                      {"constant_start", (1.0 - b - 6.0 * a) / 2.0},
                      {"constant_end", (b - 2.0 * a + 3.0) / 2.0},
                      {"xi_r", xi_r(left)}};
            inner = {ZoneKind::LeftWhitham, ZoneKind::Constant, ZoneKind::RightWhitham};
        }
    } else {
        if (lo >= 1.0) {
            s.kind = ScenarioKind::RarefactionNonOverlap;
            s.rays = {{"left_edge", -2.0 * a}, {"slope_split", 0.0}, {"right_edge", 1.0}};
            inner = {ZoneKind::SlopeLeft, ZoneKind::SlopeRight};
        } else {
            s.kind = ScenarioKind::RarefactionOverlap;
            s.rays = {{"left_edge", -2.0 * a},
                      {"slope_left_end", (b - 2.0 * a - 1.0) / 2.0},
                      {"slope_right_start", (1.0 - b + 2.0 * a) / 2.0},
                      {"right_edge", 1.0}};
            inner = {ZoneKind::SlopeLeft, ZoneKind::Constant, ZoneKind::SlopeRight};
        }
    }
    for (std::size_t k = 1; k < s.rays.size(); ++k) {
        if (!(s.rays[k].xi > s.rays[k - 1].xi)) {
            std::ostringstream msg;
            msg << "degenerate background: rays " << s.rays[k - 1].label << " and " << s.rays[k].label
                << " coincide";
            throw ValidationError(msg.str());
        }
    }
    s.zones.push_back({ZoneKind::LeftBackground, -INFINITY, s.rays.front().xi});
    for (std::size_t k = 0; k < inner.size(); ++k)
        s.zones.push_back({inner[k], s.rays[k].xi, s.rays[k + 1].xi});
    s.zones.push_back({ZoneKind::RightBackground, s.rays.back().xi, INFINITY});
    return s;
}

double xi_r(const Background& left)
{
    require_shock_like(left, "xi_r");
    const double u = -inf_l(left);
    const double r = std::sqrt((u - 1.0) * (u + 1.0));
    return r / std::log(u + r);
}

double xi_r_quadrature(const Background& left)
{
    require_shock_like(left, "xi_r");
    const double lo = inf_l(left);
    const double p1 = below_minus_one(lo, [](double x) { return x; });
    const double p0 = below_minus_one(lo, [](double) { return 1.0; });
    auto h = [&](double xi) { return p1 + xi * p0; };
    double top = 2.0;
    while (h(top) < 0.0 && top < 1e8)
        top *= 2.0;
    auto root = quad::find_root(h, 0.0, top, 1e-15);
    if (!root)
        throw NumericalError("no root bracketed for xi_r");
    return *root;
}

double gamma_mu_residual(double gamma, double mu, const Background& left)
{
    const double e1 = inf_l(left);
    const double shift = gamma - e1;
    auto f = [&](double x, double from_lo, double from_hi) {
        return (x - mu) * std::sqrt(from_lo) / std::sqrt((1.0 - x) * from_hi * (from_lo + shift));
    };
    return quad::sqrt_ends_adaptive(f, gamma, -1.0, quad_tol).value;
}

namespace {

double mu_of(double xi, double gamma, const Background& left)
{
    return (-2.0 * xi - 2.0 * left.a + left.b - gamma) / 2.0;
}

} // namespace

WhithamPoint gamma_mu(double xi, const Background& left)
{
    require_shock_like(left, "gamma_mu");
    const double lo = inf_l(left);
    const double top = std::min(sup_l(left), -1.0);
    const double hi = sup_l(left) < -1.0 ? top : top - 1e-12 * (top - lo);
    auto h = [&](double g) { return gamma_mu_residual(g, mu_of(xi, g, left), left); };
    auto root = quad::find_root(h, lo, hi, 1e-15 * std::max(1.0, std::abs(lo)));
    if (!root)
        throw OutsideZone(ray_error(xi, "right Whitham zone"));
    WhithamPoint w;
    w.xi = xi;
    w.edge = *root;
    w.mu = mu_of(xi, *root, left);
    w.zone = ZoneKind::RightWhitham;
    return w;
}

double xi_r_prime(const Background& left)
{
    require_shock_like(left, "xi_r_prime");
    const double e1 = inf_l(left);
    const double e2 = sup_l(left);
    if (!(e2 < -1.0))
        throw ValidationError("xi_r_prime requires sup I_l < -1");
    // At gamma = sup I_l the defining integral is linear in mu.
    const double shift = e2 - e1;
    auto moment = [&](int power) {
        auto f = [&](double x, double from_lo, double from_hi) {
            const double w = std::sqrt(from_lo) / std::sqrt((1.0 - x) * from_hi * (from_lo + shift));
            return power == 0 ? w : x * w;
        };
        return quad::sqrt_ends_adaptive(f, e2, -1.0, quad_tol).value;
    };
    const double mu = moment(1) / moment(0);
    return -(2.0 * left.a - left.b + e2 + 2.0 * mu) / 2.0;
}

double xi_r_prime_bisection(const Background& left)
{
    require_shock_like(left, "xi_r_prime");
    const double e2 = sup_l(left);
    if (!(e2 < -1.0))
        throw ValidationError("xi_r_prime requires sup I_l < -1");
    const double right = xi_r(left);
    auto h = [&](double xi) { return gamma_mu_residual(e2, mu_of(xi, e2, left), left); };
    double lo = right - 1.0;
    while (std::signbit(h(lo)) == std::signbit(h(right)) && right - lo < 1e6)
        lo = right - 2.0 * (right - lo);
    auto root = quad::find_root(h, lo, right, 1e-12);
    if (!root)
        throw NumericalError("no root bracketed for xi_r_prime");
    return *root;
}

double xi_l(const Background& left) { return -2.0 * left.a * xi_r(mirror_background(left)); }

double xi_l_prime(const Background& left) { return -2.0 * left.a * xi_r_prime(mirror_background(left)); }

WhithamPoint left_zone(double xi, const Background& left)
{
    const Background m = mirror_background(left);
    WhithamPoint w;
    try {
        w = gamma_mu(-xi / (2.0 * left.a), m);
    } catch (const OutsideZone&) {
        throw OutsideZone(ray_error(xi, "left Whitham zone"));
    }
    w.xi = xi;
    w.edge = left.b - 2.0 * left.a * w.edge;
    w.mu = left.b - 2.0 * left.a * *w.mu;
    w.zone = ZoneKind::LeftWhitham;
    return w;
}

double eta(double xi, const Scenario& scenario)
{
    const Background& l = scenario.left;
    for (const Zone& z : scenario.zones) {
        if (xi < z.xi_lo || xi > z.xi_hi)
            continue;
        switch (z.kind) {
        case ZoneKind::SlopeRight:
            return 1.0 - 2.0 * xi;
        case ZoneKind::SlopeLeft:
            return l.b - 2.0 * l.a - 2.0 * xi;
        case ZoneKind::MixedTwoBand:
            return mu_mixed(xi, l).edge;
        default:
            break;
        }
    }
    throw OutsideZone(ray_error(xi, "zones where eta is defined"));
}

double xi_cr_closed_form(const Background& left)
{
    validate(left);
    const double u = (1.0 - left.b) / (2.0 * left.a);
    if (!(u > 1.0))
        throw ValidationError("xi_cr requires sup I_l < 1");
    return -2.0 * left.a * std::sqrt((u - 1.0) * (u + 1.0)) / std::acosh(u);
}

double xi_cr_mixed(const Background& left)
{
    validate(left);
    const double lo = sup_l(left);
    if (!(lo < 1.0))
        throw ValidationError("xi_cr requires sup I_l < 1");
    const double a4 = 4.0 * left.a;
    auto moment = [&](int power) {
        auto f = [&](double x, double from_lo, double) {
            const double w = 1.0 / std::sqrt(from_lo * (from_lo + a4));
            return power == 0 ? w : (x - left.b) * w;
        };
        return quad::sqrt_ends_adaptive(f, lo, 1.0, quad_tol).value;
    };
    return -moment(1) / moment(0);
}

double mu_mixed_residual(double xi, double mu, const Background& left)
{
    const double e = 1.0 + 2.0 * left.b - 2.0 * xi - 2.0 * mu;
    const double lo = sup_l(left);
    const double a4 = 4.0 * left.a;
    const double gap_to_one = 1.0 - e;
    auto f = [&](double x, double from_lo, double from_hi) {
        return (x - mu) * std::sqrt(from_hi) / std::sqrt(from_lo * (from_lo + a4) * (gap_to_one + from_hi));
    };
    return quad::sqrt_ends_adaptive(f, lo, e, quad_tol).value;
}

WhithamPoint mu_mixed(double xi, const Background& left)
{
    validate(left);
    const double sup = sup_l(left);
    const double lo = std::max(sup, left.b - xi);
    const double hi = (1.0 + 2.0 * left.b - 2.0 * xi) / 3.0;
    if (!(lo < hi))
        throw OutsideZone(ray_error(xi, "mixed two-band zone"));
    auto h = [&](double mu) { return mu_mixed_residual(xi, mu, left); };
    const double pad = 1e-13 * (hi - lo);
    auto root = quad::find_root(h, lo + pad, hi - pad, 1e-15);
    if (!root)
        throw OutsideZone(ray_error(xi, "mixed two-band zone"));
    WhithamPoint w;
    w.xi = xi;
    w.mu = *root;
    w.edge = 1.0 + 2.0 * left.b - 2.0 * xi - 2.0 * *root;
    w.zone = ZoneKind::MixedTwoBand;
    return w;
}

namespace {

struct GData {
    double e1, gamma, mu;
};

GData g_data(double xi, const Background& left)
{
    const WhithamPoint w = gamma_mu(xi, left);
    return {inf_l(left), w.edge, *w.mu};
}

cplx g_prime(cplx l, const GData& d) { return (l - d.mu) * (l - d.gamma) / p_whitham(l, d.e1, d.gamma); }

// int_{from}^{to} g' along the real axis (upper lip); from and to bound one
// segment between consecutive branch points.
cplx g_real_segment(double from, double to, const GData& d)
{
    const double lo = std::min(from, to);
    const double hi = std::max(from, to);
    if (lo == hi)
        return 0.0;
    auto f = [&](double x, double, double) { return g_prime(cplx(x, 0.0), d); };
    const cplx v = quad::sqrt_ends_adaptive(f, lo, hi, quad_tol).value;
    return from <= to ? v : -v;
}

} // namespace

cplx g_function(const SurfacePoint& p, double xi, const Background& left)
{
    if (p.at_infinity())
        throw ValidationError("g-function diverges at infinity");
    const GData d = g_data(xi, left);
    cplx v;
    const double x = p.lambda.real();
    const double y = p.lambda.imag();
    if (y == 0.0) {
        const bool on_band = (x > -1.0 && x < 1.0) || (x > d.e1 && x < d.gamma);
        if (on_band)
            throw ValidationError("g-function is not provided on the bands");
        if (x >= 1.0) {
            v = g_real_segment(1.0, x, d);
        } else {
            v = g_real_segment(1.0, -1.0, d);
            if (x >= d.gamma) {
                v += g_real_segment(-1.0, x, d);
            } else {
                v += g_real_segment(-1.0, d.gamma, d) + g_real_segment(d.gamma, d.e1, d) +
                     g_real_segment(d.e1, x, d);
            }
        }
    } else {
        // Straight segment from the branch point 1; for Im < 0 use the
        // conjugate symmetry of the integrand.
        const cplx target(x, std::abs(y));
        const cplx dir = target - 1.0;
        auto f = [&](double s, double, double) { return g_prime(1.0 + s * dir, d) * dir; };
        v = quad::sqrt_ends_adaptive(f, 0.0, 1.0, quad_tol).value;
        if (y < 0.0)
            v = std::conj(v);
    }
    return p.sheet == Sheet::Upper ? v : -v;
}

cplx g_minus_phi_derivative(cplx lambda, double xi, const Background& left)
{
    const GData d = g_data(xi, left);
    const cplx z = joukovski(lambda, Background{0.5, 0.0});
    const cplx root = lambda - z; // sqrt(lambda^2 - 1) on the branch ~ lambda
    const cplx phi_prime = -(lambda + xi) / root;
    return g_prime(lambda, d) - phi_prime;
}

double front_speed_bound(const Background& left, const Background& right)
{
    const NormalizedProblem np = normalize_right(left, right);
    const Background& l = np.left;
    double v = std::max(1.0, 2.0 * l.a + std::abs(l.b) + 1.0);
    if (inf_l(l) < -1.0)
        v = std::max(v, std::abs(xi_r(l)));
    return v * np.map.scale;
}

int default_half_width(const Background& left, const Background& right, double t_end)
{
    if (!(t_end >= 0.0))
        throw ValidationError("t_end must be non-negative");
    return static_cast<int>(std::ceil(front_speed_bound(left, right) * t_end)) + 50;
}

} // namespace toda
