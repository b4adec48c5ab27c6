#include "toda/harness.hpp"

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <iomanip>
#include <map>
#include <numbers>
#include <sstream>

#include "toda/errors.hpp"
#include "toda/riemann.hpp"
#include "toda/spectral.hpp"

namespace toda {

namespace fs = std::filesystem;

void ExperimentConfig::validate() const
{
    toda::validate(left);
    toda::validate(right);
    if (times.empty())
        throw ValidationError("at least one time is required");
    double prev = 0.0;
    for (double t : times) {
        if (!(t > prev) || !std::isfinite(t))
            throw ValidationError("times must be positive and strictly increasing");
        prev = t;
    }
    if (window && *window < 4)
        throw ValidationError("window half width must be at least 4");
    if (!(rtol > 0.0) || !(atol > 0.0))
        throw ValidationError("rtol and atol must be positive");
    if (!(eps_zone > 0.0) || !std::isfinite(eps_zone))
        throw ValidationError("eps-zone must be positive");
    if (format != "csv" && format != "json")
        throw ValidationError("format must be csv or json");
}

int ExperimentConfig::half_width() const
{
    return window ? *window : default_half_width(left, right, times.back());
}

ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig c)
{
    if (!j.is_object())
        throw ValidationError("config must be a JSON object");
    try {
        for (const auto& [raw_key, v] : j.items()) {
            std::string key = raw_key;
            std::replace(key.begin(), key.end(), '-', '_');
            if (key == "a_left")
                c.left.a = v.get<double>();
            else if (key == "b_left")
                c.left.b = v.get<double>();
            else if (key == "a_right")
                c.right.a = v.get<double>();
            else if (key == "b_right")
                c.right.b = v.get<double>();
            else if (key == "t")
                c.times = v.is_array() ? v.get<std::vector<double>>() : std::vector<double>{v.get<double>()};
            else if (key == "window")
                c.window = v.get<int>();
            else if (key == "rtol")
                c.rtol = v.get<double>();
            else if (key == "atol")
                c.atol = v.get<double>();
            else if (key == "eps_zone")
                c.eps_zone = v.get<double>();
            else if (key == "out")
                c.out_dir = v.get<std::string>();
            else if (key == "format")
                c.format = v.get<std::string>();
            else if (key == "plots")
                c.plots = v.get<bool>();
            else
                throw ValidationError("unknown config key: " + raw_key);
        }
    } catch (const nlohmann::json::exception& e) {
        throw ValidationError(std::string("bad config value: ") + e.what());
    }
    return c;
}

nlohmann::json to_json(const ExperimentConfig& c)
{
    nlohmann::json j{{"a_left", c.left.a},   {"b_left", c.left.b}, {"a_right", c.right.a},
                     {"b_right", c.right.b}, {"t", c.times},       {"rtol", c.rtol},
                     {"atol", c.atol},       {"eps_zone", c.eps_zone}, {"format", c.format},
                     {"plots", c.plots}};
    j["window"] = c.window ? nlohmann::json(*c.window) : nlohmann::json(nullptr);
    if (!c.out_dir.empty())
        j["out"] = c.out_dir;
    return j;
}

double zone_margin(const Zone& z, double eps)
{
    if (std::isfinite(z.xi_lo) && std::isfinite(z.xi_hi))
        return std::min(eps, (z.xi_hi - z.xi_lo) / 4.0);
    return eps;
}

double fit_exponent(const std::vector<double>& t, const std::vector<double>& v)
{
    if (t.size() != v.size() || t.size() < 2)
        throw ValidationError("decay fit needs two or more points");
    double sx = 0.0, sy = 0.0, sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < t.size(); ++i) {
        if (!(t[i] > 0.0) || !(v[i] > 0.0))
            throw ValidationError("decay fit needs positive values");
        const double x = std::log(t[i]);
        const double y = std::log(v[i]);
        sx += x;
        sy += y;
        sxx += x * x;
        sxy += x * y;
    }
    const double n = static_cast<double>(t.size());
    return (n * sxy - sx * sy) / (n * sxx - sx * sx);
}

std::vector<LatticeState> simulate(const ExperimentConfig& c)
{
    c.validate();
    const int w = c.half_width();
    const LatticeState s0 = make_step_initial(c.left, c.right, -w, w);
    return evolve_to(s0, c.times, c.rtol, c.atol);
}

const ZoneError* ComparisonReport::find(double t, ZoneKind zone) const
{
    for (const TimeReport& tr : times) {
        if (tr.t != t)
            continue;
        for (const ZoneError& z : tr.zones)
            if (z.zone == zone)
                return &z;
    }
    return nullptr;
}

ComparisonReport compare(const ExperimentConfig& c, const std::vector<LatticeState>& snapshots,
                         const AsymptoticModel& model)
{
    ComparisonReport r;
    r.config = c;
    r.scenario = to_string(model.scenario().kind);
    r.rays = model.rays();
    r.zones = model.zones();
    r.half_width = c.half_width();

    for (const LatticeState& s : snapshots) {
        TimeReport tr;
        tr.t = s.t;
        // Two sites next to each clamped edge are left out.
        for (int n = s.n_min + 2; n <= s.n_max() - 2; ++n) {
            const LeadingTerm lt = model.leading_term(n, s.t);
            tr.profile.push_back({n, n / s.t, lt.zone, s.a_at(n), s.b_at(n), lt.a, lt.b});
        }
        for (const Zone& z : r.zones) {
            const double m = zone_margin(z, c.eps_zone);
            ZoneError e{z.kind};
            e.xi_lo = std::max(z.xi_lo + m, (s.n_min + 2) / s.t);
            e.xi_hi = std::min(z.xi_hi - m, (s.n_max() - 2) / s.t);
            double sa = 0.0, sb = 0.0, ma = 0.0, mb = 0.0;
            for (const ProfileRow& p : tr.profile) {
                if (p.xi <= e.xi_lo || p.xi >= e.xi_hi)
                    continue;
                const double da = std::abs(p.a_sim - p.a_asym);
                const double db = std::abs(p.b_sim - p.b_asym);
                e.sup_a = std::max(e.sup_a, da);
                e.sup_b = std::max(e.sup_b, db);
                e.sup_a2 = std::max(e.sup_a2, std::abs(p.a_sim * p.a_sim - p.a_asym * p.a_asym));
                sa += da * da;
                sb += db * db;
                ma += p.a_sim;
                mb += p.b_sim;
                ++e.samples;
            }
            if (e.samples > 0) {
                e.rms_a = std::sqrt(sa / e.samples);
                e.rms_b = std::sqrt(sb / e.samples);
                e.mean_a = ma / e.samples;
                e.mean_b = mb / e.samples;
            }
            tr.zones.push_back(e);
        }
        r.times.push_back(std::move(tr));
    }

    if (r.times.size() >= 2) {
        for (const Zone& z : r.zones) {
            for (const char* metric : {"rms_b", "sup_b", "sup_a"}) {
                std::vector<double> ts, vs;
                for (const TimeReport& tr : r.times) {
                    const ZoneError* e = r.find(tr.t, z.kind);
                    if (!e || e->samples == 0)
                        continue;
                    const std::string m = metric;
                    const double v = m == "rms_b" ? e->rms_b : m == "sup_b" ? e->sup_b : e->sup_a;
                    if (v > 0.0) {
                        ts.push_back(tr.t);
                        vs.push_back(v);
                    }
                }
                if (ts.size() == r.times.size())
                    r.fits.push_back({z.kind, metric, fit_exponent(ts, vs)});
            }
        }
    }
    return r;
}

ComparisonReport run_compare(const ExperimentConfig& c)
{
    c.validate();
    const AsymptoticModel model = AsymptoticModel::build(c.left, c.right);
    const std::vector<LatticeState> snaps = simulate(c);
    ComparisonReport r = compare(c, snaps, model);
    if (!c.out_dir.empty()) {
        write_report(r, c.out_dir, c.format);
        if (c.plots)
            emit_plots(r, c.out_dir);
    }
    return r;
}

namespace {

nlohmann::json finite_or_null(double v) { return std::isfinite(v) ? nlohmann::json(v) : nlohmann::json(nullptr); }

std::ofstream open_out(const fs::path& p)
{
    std::ofstream os(p);
    if (!os)
        throw std::runtime_error("cannot write " + p.string());
    os.precision(17);
    return os;
}

} // namespace

nlohmann::json ComparisonReport::to_json() const
{
    nlohmann::json j;
    j["config"] = toda::to_json(config);
    j["scenario"] = scenario;
    j["half_width"] = half_width;
    j["rays"] = nlohmann::json::array();
    for (const Ray& r : rays)
        j["rays"].push_back({{"label", r.label}, {"xi", r.xi}});
    j["zones"] = nlohmann::json::array();
    for (const Zone& z : zones)
        j["zones"].push_back(
            {{"kind", to_string(z.kind)}, {"xi_lo", finite_or_null(z.xi_lo)}, {"xi_hi", finite_or_null(z.xi_hi)}});
    j["times"] = nlohmann::json::array();
    for (const TimeReport& tr : times) {
        nlohmann::json jt{{"t", tr.t}, {"zones", nlohmann::json::array()}};
        for (const ZoneError& e : tr.zones)
            jt["zones"].push_back({{"zone", to_string(e.zone)},
                                   {"xi_lo", finite_or_null(e.xi_lo)},
                                   {"xi_hi", finite_or_null(e.xi_hi)},
                                   {"samples", e.samples},
                                   {"sup_a", e.sup_a},
                                   {"rms_a", e.rms_a},
                                   {"sup_a2", e.sup_a2},
                                   {"sup_b", e.sup_b},
                                   {"rms_b", e.rms_b},
                                   {"mean_a", e.mean_a},
                                   {"mean_b", e.mean_b}});
        j["times"].push_back(jt);
    }
    j["decay_fits"] = nlohmann::json::array();
    for (const DecayFit& f : fits)
        j["decay_fits"].push_back({{"zone", to_string(f.zone)}, {"metric", f.metric}, {"exponent", f.exponent}});
    return j;
}

std::string time_tag(double t)
{
    std::ostringstream os;
    os << std::setprecision(12) << t;
    return os.str();
}

void write_report(const ComparisonReport& r, const std::string& dir, const std::string& format)
{
    fs::create_directories(dir);
    if (format == "json") {
        std::ofstream os = open_out(fs::path(dir) / "compare_report.json");
        os << r.to_json().dump(2) << '\n';
        return;
    }
    {
        std::ofstream os = open_out(fs::path(dir) / "compare_summary.csv");
        os << "t,zone,xi_lo,xi_hi,samples,sup_a,rms_a,sup_a2,sup_b,rms_b,mean_a,mean_b\n";
        for (const TimeReport& tr : r.times)
            for (const ZoneError& e : tr.zones)
                os << tr.t << ',' << to_string(e.zone) << ',' << e.xi_lo << ',' << e.xi_hi << ',' << e.samples
                   << ',' << e.sup_a << ',' << e.rms_a << ',' << e.sup_a2 << ',' << e.sup_b << ',' << e.rms_b
                   << ',' << e.mean_a << ',' << e.mean_b << '\n';
    }
    for (const TimeReport& tr : r.times) {
        std::ofstream os = open_out(fs::path(dir) / ("profile_t" + time_tag(tr.t) + ".csv"));
        os << "n,xi,zone,a_sim,b_sim,a_asym,b_asym\n";
        for (const ProfileRow& p : tr.profile)
            os << p.n << ',' << p.xi << ',' << to_string(p.zone) << ',' << p.a_sim << ',' << p.b_sim << ','
               << p.a_asym << ',' << p.b_asym << '\n';
    }
}

namespace {

const char* zone_colour(ZoneKind k)
{
    switch (k) {
    case ZoneKind::LeftBackground:
    case ZoneKind::RightBackground:
        return "#1f77b4";
    case ZoneKind::LeftWhitham:
    case ZoneKind::RightWhitham:
    case ZoneKind::MixedTwoBand:
        return "#d62728";
    case ZoneKind::Gap:
        return "#ff7f0e";
    case ZoneKind::Constant:
        return "#2ca02c";
    case ZoneKind::SlopeLeft:
    case ZoneKind::SlopeRight:
        return "#9467bd";
    }
    return "#d62728";
}

} // namespace

std::string profile_svg(const TimeReport& tr, const std::vector<Ray>& rays, bool field_b, int half_width)
{
    constexpr double w = 900.0, h = 420.0, pad = 50.0;
    double lo = INFINITY, hi = -INFINITY;
    for (const ProfileRow& p : tr.profile) {
        for (double v : {field_b ? p.b_sim : p.a_sim, field_b ? p.b_asym : p.a_asym}) {
            lo = std::min(lo, v);
            hi = std::max(hi, v);
        }
    }
    if (!(hi > lo)) {
        lo = std::isfinite(lo) ? lo - 1.0 : -1.0;
        hi = std::isfinite(hi) ? hi + 1.0 : 1.0;
    }
    const double span = hi - lo;
    lo -= 0.05 * span;
    hi += 0.05 * span;
    const double n0 = -half_width, n1 = half_width;
    auto px = [&](double n) { return pad + (n - n0) / (n1 - n0) * (w - 2 * pad); };
    auto py = [&](double v) { return h - pad - (v - lo) / (hi - lo) * (h - 2 * pad); };

    std::ostringstream os;
    os << std::fixed << std::setprecision(2);
    os << "<svg xmlns=\"http://www.w3.org/2000/svg\" width=\"" << w << "\" height=\"" << h << "\">\n";
    os << "<rect width=\"100%\" height=\"100%\" fill=\"white\"/>\n";
    os << "<text x=\"" << pad << "\" y=\"25\" font-family=\"sans-serif\" font-size=\"14\">" << (field_b ? "b" : "a")
       << "(n, t), t = " << time_tag(tr.t) << "</text>\n";
    os << "<rect x=\"" << pad << "\" y=\"" << pad << "\" width=\"" << w - 2 * pad << "\" height=\"" << h - 2 * pad
       << "\" fill=\"none\" stroke=\"#888\"/>\n";
    for (const Ray& r : rays) {
        const double n = r.xi * tr.t;
        if (n < n0 || n > n1)
            continue;
        os << "<line x1=\"" << px(n) << "\" y1=\"" << pad << "\" x2=\"" << px(n) << "\" y2=\"" << h - pad
           << "\" stroke=\"#999\" stroke-dasharray=\"4 3\"/>\n";
        os << "<text x=\"" << px(n) + 2 << "\" y=\"" << pad + 12 << "\" font-family=\"sans-serif\" font-size=\"9\">"
           << r.label << "</text>\n";
    }
    if (!tr.profile.empty()) {
        os << "<polyline fill=\"none\" stroke=\"black\" stroke-width=\"1\" points=\"";
        for (const ProfileRow& p : tr.profile)
            os << px(p.n) << ',' << py(field_b ? p.b_sim : p.a_sim) << ' ';
        os << "\"/>\n";
        std::size_t i = 0;
        while (i < tr.profile.size()) {
            std::size_t j = i;
            while (j < tr.profile.size() && tr.profile[j].zone == tr.profile[i].zone)
                ++j;
            os << "<polyline fill=\"none\" stroke=\"" << zone_colour(tr.profile[i].zone)
               << "\" stroke-width=\"1.5\" points=\"";
            for (std::size_t k = i; k < j; ++k)
                os << px(tr.profile[k].n) << ',' << py(field_b ? tr.profile[k].b_asym : tr.profile[k].a_asym) << ' ';
            os << "\"/>\n";
            i = j;
        }
    }
    os << "<text x=\"" << pad << "\" y=\"" << h - 15 << "\" font-family=\"sans-serif\" font-size=\"11\">n from "
       << static_cast<int>(n0) << " to " << static_cast<int>(n1) << "; value range [" << lo << ", " << hi
       << "]</text>\n";
    os << "</svg>\n";
    return os.str();
}

std::vector<std::string> emit_plots(const ComparisonReport& r, const std::string& dir)
{
    fs::create_directories(dir);
    std::vector<std::string> written;
    for (const TimeReport& tr : r.times) {
        for (bool field_b : {false, true}) {
            const fs::path p = fs::path(dir) / ("plot_t" + time_tag(tr.t) + (field_b ? "_b.svg" : "_a.svg"));
            std::ofstream os = open_out(p);
            os << profile_svg(tr, r.rays, field_b, r.half_width);
            written.push_back(p.string());
        }
    }
    return written;
}

namespace {

std::string fmt(double v)
{
    std::ostringstream os;
    os << std::setprecision(3) << v;
    return os.str();
}

SelfTestResult check_theta()
{
    const TwoBandSurface s = TwoBandSurface::build({-2.8, -1.2, -1.0, 1.0});
    const cplx tau = s.tau();
    const cplx I(0.0, 1.0);
    double worst = 0.0;
    for (cplx v : {cplx(0.1, 0.05), cplx(-0.37, 0.2), cplx(0.45, -0.3), cplx(0.0, 0.0)}) {
        const cplx th = theta(v, tau);
        const cplx shifted = std::exp(-std::numbers::pi * I * tau - 2.0 * std::numbers::pi * I * v) * th;
        worst = std::max(worst, std::abs(theta(v + 1.0, tau) - th) / std::abs(th));
        worst = std::max(worst, std::abs(theta(v + tau, tau) - shifted) / std::abs(shifted));
        worst = std::max(worst, std::abs(theta(-v, tau) - th) / std::abs(th));
    }
    worst = std::max(worst, std::abs(theta(s.riemann_const(), tau)));
    return {"theta identities", worst < 1e-12, "max deviation " + fmt(worst)};
}

SelfTestResult check_abel_round_trip()
{
    const TwoBandSurface s = TwoBandSurface::build({-2.8, -1.2, -1.0, 1.0});
    double worst = 0.0;
    const std::vector<SurfacePoint> pts{{cplx(-2.0, 0.3), Sheet::Upper}, {cplx(0.4, -0.7), Sheet::Lower},
                                        {cplx(-1.1, 0.0), Sheet::Upper}, {cplx(-3.5, 0.0), Sheet::Lower},
                                        {cplx(2.0, 1.0), Sheet::Upper}};
    for (const SurfacePoint& p : pts) {
        const SurfacePoint q = s.jacobi_invert(s.abel_map(p));
        worst = std::max(worst, std::abs(q.lambda - p.lambda) + (q.sheet == p.sheet ? 0.0 : 1.0));
    }
    return {"abel round trip", worst < 1e-8, "max deviation " + fmt(worst)};
}

LatticeState perturbed_state()
{
    LatticeState s = make_step_initial({0.4, -2.0}, {0.5, 0.0}, -8, 8);
    for (int n = -2; n <= 2; ++n) {
        s.a[n - s.n_min] += 0.05 * (n + 3) / 5.0;
        s.b[n - s.n_min] -= 0.1 * std::cos(n);
    }
    return s;
}

SelfTestResult check_wronskian()
{
    const LatticeState s = perturbed_state();
    double worst = 0.0;
    for (double lambda : {-2.5, -1.7, -0.6, 0.3, 0.9})
        worst = std::max(worst, scattering_data(s, lambda).wronskian_spread);
    return {"wronskian constancy", worst < 1e-10, "max relative spread " + fmt(worst)};
}

SelfTestResult check_unitarity()
{
    const LatticeState step = make_step_initial({0.4, -2.0}, {0.5, 0.0}, -6, 6);
    const LatticeState bumped = perturbed_state();
    double worst = 0.0;
    for (const LatticeState* s : {&step, &bumped})
        for (double lambda : {-0.95, -0.5, 0.0, 0.5, 0.95})
            worst = std::max(worst, std::abs(std::abs(*scattering_data(*s, lambda).R) - 1.0));
    return {"|R| = 1 on the right-only spectrum", worst < 1e-10, "max | |R| - 1 | " + fmt(worst)};
}

SelfTestResult check_conservation()
{
    const double rtol = 1e-10;
    const LatticeState s0 = make_step_initial({1.0, -2.0}, {0.5, 0.0}, -60, 60);
    std::vector<double> times;
    for (int k = 1; k <= 10; ++k)
        times.push_back(1.0 * k);
    std::vector<LatticeState> traj{s0};
    for (LatticeState& s : evolve_to(s0, times, rtol, rtol))
        traj.push_back(std::move(s));
    const ConservationReport c = conservation_report(traj);
    const double bound = 10.0 * rtol * s0.size();
    const double worst = std::max(c.b_sum_drift, c.log_a_sum_drift);
    return {"telescoping conservation", worst <= bound, "drift " + fmt(worst) + ", bound " + fmt(bound)};
}

} // namespace

std::vector<SelfTestResult> run_selftest()
{
    std::vector<SelfTestResult> out;
    auto guarded = [&](const char* name, SelfTestResult (*fn)()) {
        try {
            out.push_back(fn());
        } catch (const std::exception& e) {
            out.push_back({name, false, std::string("exception: ") + e.what()});
        }
    };
    guarded("theta identities", check_theta);
    guarded("abel round trip", check_abel_round_trip);
    guarded("wronskian constancy", check_wronskian);
    guarded("|R| = 1 on the right-only spectrum", check_unitarity);
    guarded("telescoping conservation", check_conservation);
    return out;
}

} // namespace toda
