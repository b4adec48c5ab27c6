#include "toda/asymptotics.hpp"

#include <cmath>
#include <numbers>
#include <sstream>

#include "toda/errors.hpp"
#include "toda/quadrature.hpp"

namespace toda {

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

// Relative band or gap width below which the genus-0 limit is used.
constexpr double degenerate_width = 1e-7;

LatticeState normalize_state(const LatticeState& s, const Transform& m)
{
    LatticeState out = s;
    for (double& v : out.a)
        v = m.a_to(v);
    for (double& v : out.b)
        v = m.b_to(v);
    out.left = Background{m.a_to(s.left.a), m.b_to(s.left.b)};
    out.right = Background{m.a_to(s.right.a), m.b_to(s.right.b)};
    out.t = m.t_to(s.t);
    return out;
}

// Genus-1 evaluator on one ray with its genus-0 fallbacks.
struct RayEvaluator {
    std::optional<TwoBandModel> model;
    double a = 0.5;
    double b = 0.0;

    double a_at(int n, double t) const { return model ? std::sqrt(two_band(n, t, *model).a2) : a; }
    double b_at(int n, double t) const { return model ? two_band(n, t, *model).b : b; }
};

RayEvaluator ray_evaluator(const Background& left, const LatticeState& s0, double xi)
{
    const double e1 = left.spectrum_lo();
    WhithamPoint w;
    try {
        w = gamma_mu(xi, left);
    } catch (const OutsideZone&) {
        // On a bounding ray the root sits at an end of the bracket.
        auto near = [xi](double ray) { return std::abs(xi - ray) <= 1e-9 * std::max(1.0, std::abs(ray)); };
        if (near(xi_r(left)))
            w.edge = e1;
        else if (left.spectrum_hi() >= -1.0 && near((left.b - 2.0 * left.a + 3.0) / 2.0))
            w.edge = -1.0;
        else
            throw;
    }
    const double scale = 1.0 - e1;
    RayEvaluator ev;
    if (w.edge - e1 < degenerate_width * scale)
        return ev; // band collapsed: right background
    if (-1.0 - w.edge < degenerate_width * scale) {
        // gap closed: one band [E1, 1]
        ev.a = (1.0 - e1) / 4.0;
        ev.b = (1.0 + e1) / 2.0;
        return ev;
    }
    ev.model = build_two_band({e1, w.edge, -1.0, 1.0}, s0);
    return ev;
}

} // namespace

double log_chi_integral(const LatticeState& s0, const TwoBandSurface& surface)
{
    const auto& E = surface.E();
    const double sup = s0.left.spectrum_hi();
    if (E[0] != s0.left.spectrum_lo() || E[1] > sup)
        throw ValidationError("first band must start at inf I_l and stay inside I_l");
    const bool full = E[1] == sup;
    const double j_band = surface.band_integral();
    auto f = [&](double x, double from_lo, double from_hi) {
        const double to_sup = full ? from_hi : sup - x;
        const double r = std::sqrt(from_lo * from_hi * std::abs(x - E[2]) * std::abs(x - E[3]));
        return log_abs_chi(s0, x, from_lo, to_sup) / (2.0 * j_band * r);
    };
    return quad::tanh_sinh(f, E[0], E[1], 1e-11);
}

JacobianPoint divisor_whitham(const TwoBandSurface& surface, const LatticeState& s0)
{
    const double lint = log_chi_integral(s0, surface);
    const cplx v = surface.abel_real(surface.E()[1]) + I / pi * lint + surface.abel_infty();
    return {reduce(v, surface.tau())};
}

JacobianPoint divisor_gap(const TwoBandSurface& surface, const LatticeState& s0)
{
    if (surface.E()[1] != s0.left.spectrum_hi())
        throw ValidationError("gap divisor needs the surface (inf I_l, sup I_l, -1, 1)");
    return divisor_whitham(surface, s0);
}

JacobianPoint phase_vector(int n, double t, const TwoBandModel& m)
{
    const cplx v = m.surface.abel_infinity_plus() - m.divisor_image.v - static_cast<double>(n) * m.n_shift +
                   t * m.t_shift - m.riemann_const;
    return {reduce(v, m.surface.tau())};
}

TwoBandValue two_band(int n, double t, const TwoBandModel& m)
{
    const cplx tau = m.surface.tau();
    const cplx z = phase_vector(n, t, m).v;
    const ThetaValues here = theta_all(z, tau);
    if (std::abs(here.value) < 1e-13) {
        std::ostringstream msg;
        msg << "theta vanishes at the phase of (n, t) = (" << n << ", " << t << ")";
        throw ThetaZero(msg.str());
    }
    const ThetaValues prev = theta_all(z + m.n_shift, tau); // z(n - 1)
    const cplx next = theta(z - m.n_shift, tau);           // z(n + 1)
    TwoBandValue v;
    v.a2 = m.a_tilde2 * (prev.value * next / (here.value * here.value)).real();
    v.b = m.b_tilde + (1.0 / m.gamma_cal * (prev.d1 / prev.value - here.d1 / here.value)).real();
    return v;
}

void calibrate(TwoBandModel& m)
{
    const cplx tau = m.surface.tau();
    const cplx u = m.n_shift;
    // theta(z + u) theta(z - u) / theta(z)^2 = alpha (-(log theta)'') + beta.
    constexpr int samples = 20;
    std::vector<cplx> f(samples), g(samples);
    for (int k = 0; k < samples; ++k) {
        const double s = -0.2 + 0.4 * k / (samples - 1);
        const cplx z(0.3 * s + 0.05, tau.imag() * (0.25 * s - 0.03));
        const ThetaValues t = theta_all(z, tau);
        f[k] = theta(z + u, tau) * theta(z - u, tau) / (t.value * t.value);
        g[k] = -(t.d2 * t.value - t.d1 * t.d1) / (t.value * t.value);
    }
    // Least squares in (alpha, beta).
    cplx sg = 0.0, sf = 0.0, sgg = 0.0, sgf = 0.0;
    for (int k = 0; k < samples; ++k) {
        sg += g[k];
        sf += f[k];
        sgg += std::conj(g[k]) * g[k];
        sgf += std::conj(g[k]) * f[k];
    }
    cplx sgc = 0.0;
    for (int k = 0; k < samples; ++k)
        sgc += std::conj(g[k]);
    const double nd = samples;
    const cplx det = sgg * nd - sgc * sg;
    const cplx alpha = (sgf * nd - sgc * sf) / det;
    double spread = 0.0;
    for (int k = 0; k + 1 < samples; ++k) {
        const cplx pair_alpha = (f[k + 1] - f[k]) / (g[k + 1] - g[k]);
        spread = std::max(spread, std::abs(pair_alpha - alpha) / std::abs(alpha));
    }
    m.calibration_spread = spread;
    if (spread > 1e-4) {
        std::ostringstream msg;
        msg << "calibration depends on the sample point (spread " << spread << ")";
        throw CalibrationError(msg.str());
    }

    const cplx speed = -m.t_shift; // time slope of -z
    m.gamma_cal = 2.0 / speed;
    const cplx at2 = -speed * speed / (4.0 * alpha);
    if (!(at2.real() > 0.0) || std::abs(at2.imag()) > 1e-8 * std::abs(at2))
        throw CalibrationError("fitted a_tilde^2 is not a positive real number");
    m.a_tilde2 = at2.real();
    m.b_tilde = m.surface.trace_b();
}

TwoBandModel build_two_band(const std::array<double, 4>& E, const LatticeState& s0)
{
    TwoBandModel m{TwoBandSurface::build(E), {}, {}, {}, {}, 0.0, 0.0, {}, 0.0};
    m.divisor_image = divisor_whitham(m.surface, s0);
    m.n_shift = m.surface.abel_infty();
    m.t_shift = -m.surface.time_slope();
    m.riemann_const = m.surface.riemann_const();
    calibrate(m);
    return m;
}

double toda_residual(const TwoBandModel& m, const std::vector<std::pair<int, double>>& samples, double h)
{
    double worst = 0.0;
    for (const auto& [n, t] : samples) {
        const TwoBandValue c = two_band(n, t, m);
        const TwoBandValue up = two_band(n, t + h, m);
        const TwoBandValue dn = two_band(n, t - h, m);
        const TwoBandValue below = two_band(n - 1, t, m);
        const TwoBandValue above = two_band(n + 1, t, m);
        const double b_dot = (up.b - dn.b) / (2.0 * h);
        const double a2_dot = (up.a2 - dn.a2) / (2.0 * h);
        const double rhs_b = 2.0 * (c.a2 - below.a2);
        const double rhs_a2 = 2.0 * c.a2 * (above.b - c.b);
        worst = std::max(worst, std::abs(b_dot - rhs_b) / std::max(1.0, std::abs(rhs_b)));
        worst = std::max(worst, std::abs(a2_dot - rhs_a2) / std::max(1.0, std::abs(rhs_a2)));
    }
    return worst;
}

AsymptoticModel AsymptoticModel::build(const Background& left, const Background& right)
{
    AsymptoticModel m;
    m.left_ = left;
    m.right_ = right;
    m.np_ = normalize_right(left, right);
    m.scenario_ = classify(m.np_.left);
    if (m.scenario_.kind == ScenarioKind::Flat)
        throw FlatScenario("left and right backgrounds coincide; nothing to resolve");

    m.step_ = make_step_initial(m.np_.left, m.np_.right, -4, 4);
    const Background& l = m.np_.left;
    m.mirror_ = normalize_state(reflect(m.step_), Transform{2.0 * l.a, -l.b});
    m.mirror_left_ = m.mirror_.left;

    if (m.scenario_.kind == ScenarioKind::ShockNonOverlap)
        m.gap_ = build_two_band({l.spectrum_lo(), l.spectrum_hi(), -1.0, 1.0}, m.step_);
    return m;
}

std::vector<Ray> AsymptoticModel::rays() const
{
    std::vector<Ray> out = scenario_.rays;
    for (Ray& r : out)
        r.xi = np_.map.xi_from(r.xi);
    return out;
}

std::vector<Zone> AsymptoticModel::zones() const
{
    std::vector<Zone> out = scenario_.zones;
    for (Zone& z : out) {
        z.xi_lo = np_.map.xi_from(z.xi_lo);
        z.xi_hi = np_.map.xi_from(z.xi_hi);
    }
    return out;
}

ZoneKind AsymptoticModel::zone_at(double xi) const { return scenario_.zone_at(np_.map.xi_to(xi)).kind; }

std::optional<TwoBandModel> AsymptoticModel::whitham_model(double xi) const
{
    RayEvaluator ev = ray_evaluator(np_.left, step_, xi);
    return ev.model;
}

std::optional<TwoBandModel> AsymptoticModel::mirror_model(double xi) const
{
    return ray_evaluator(mirror_left_, mirror_, -xi / (2.0 * np_.left.a)).model;
}

std::pair<double, double> AsymptoticModel::whitham_value(const Background& left, const LatticeState& s0, int n,
                                                         double t) const
{
    const RayEvaluator ev = ray_evaluator(left, s0, n / t);
    return {ev.a_at(n, t), ev.b_at(n, t)};
}

std::pair<double, double> AsymptoticModel::mirrored_value(int n, double t) const
{
    const Background& l = np_.left;
    const double tm = 2.0 * l.a * t;
    const RayEvaluator ev = ray_evaluator(mirror_left_, mirror_, -n / tm);
    return {2.0 * l.a * ev.a_at(-n - 1, tm), l.b - 2.0 * l.a * ev.b_at(-n, tm)};
}

LeadingTerm AsymptoticModel::leading_term(int n, double t) const
{
    if (!(t > 0.0))
        throw ValidationError("leading_term requires t > 0");
    const Transform& map = np_.map;
    const double tn = map.t_to(t);
    const double xi = n / tn;
    const Background& l = np_.left;
    LeadingTerm out;
    out.zone = scenario_.zone_at(xi).kind;
    std::pair<double, double> v;
    switch (out.zone) {
    case ZoneKind::LeftBackground:
        out.a = left_.a;
        out.b = left_.b;
        return out;
    case ZoneKind::RightBackground:
        out.a = right_.a;
        out.b = right_.b;
        return out;
    case ZoneKind::SlopeRight:
        v = {std::abs(xi) / 2.0, 1.0 - xi};
        break;
    case ZoneKind::SlopeLeft:
        v = {std::abs(xi) / 2.0, l.b - 2.0 * l.a - xi};
        break;
    case ZoneKind::Constant: {
        const double a = (1.0 - l.b + 2.0 * l.a) / 4.0;
        v = {a, (1.0 + l.b) / 2.0 - l.a};
        break;
    }
    case ZoneKind::Gap: {
        const TwoBandValue g = two_band(n, tn, *gap_);
        v = {std::sqrt(g.a2), g.b};
        break;
    }
    case ZoneKind::RightWhitham:
        v = whitham_value(l, step_, n, tn);
        break;
    case ZoneKind::LeftWhitham:
    case ZoneKind::MixedTwoBand:
        v = mirrored_value(n, tn);
        break;
    }
    out.a = map.a_from(v.first);
    out.b = map.b_from(v.second);
    return out;
}

nlohmann::json AsymptoticModel::to_json() const
{
    auto num = [](double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); };
    nlohmann::json j;
    j["left"] = {{"a", left_.a}, {"b", left_.b}};
    j["right"] = {{"a", right_.a}, {"b", right_.b}};
    j["normalization"] = {{"scale", np_.map.scale}, {"shift", np_.map.shift}};
    j["normalized"] = scenario_.to_json();
    j["kind"] = to_string(scenario_.kind);
    j["rays"] = nlohmann::json::array();
    for (const Ray& r : rays())
        j["rays"].push_back({{"label", r.label}, {"xi", r.xi}});
    j["zones"] = nlohmann::json::array();
    for (const Zone& z : zones())
        j["zones"].push_back({{"kind", to_string(z.kind)}, {"xi_lo", num(z.xi_lo)}, {"xi_hi", num(z.xi_hi)}});
    return j;
}

} // namespace toda
