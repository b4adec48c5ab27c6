// End-to-end acceptance checks. One PASS/FAIL line per criterion; exit code 1
// if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "toda/asymptotics.hpp"
#include "toda/harness.hpp"
#include "toda/whitham.hpp"

using namespace toda;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

using Clock = std::chrono::steady_clock;

double seconds_since(Clock::time_point t0) { return std::chrono::duration<double>(Clock::now() - t0).count(); }

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

ExperimentConfig config(Background left, std::vector<double> times)
{
    ExperimentConfig c;
    c.left = left;
    c.right = {0.5, 0.0};
    c.times = std::move(times);
    c.rtol = 1e-10;
    c.atol = 1e-10;
    c.eps_zone = 0.05;
    return c;
}

const LatticeState& at_time(const std::vector<LatticeState>& snaps, double t)
{
    for (const LatticeState& s : snaps)
        if (s.t == t)
            return s;
    throw std::runtime_error("missing snapshot");
}

// Shared simulation of the separated-spectra shock used by two criteria.
struct GapRun {
    ExperimentConfig cfg = config({0.4, -2.0}, {135.0, 270.0});
    std::vector<LatticeState> snaps;
    double seconds = 0.0;

    const std::vector<LatticeState>& get()
    {
        if (snaps.empty()) {
            const auto t0 = Clock::now();
            snaps = simulate(cfg);
            seconds = seconds_since(t0);
        }
        return snaps;
    }
};

GapRun gap_run;

// Constant middle state of the overlapping shock (1, -2) at t = 90.
Outcome c1()
{
    constexpr double tol = 0.02, budget = 120.0;
    const auto t0 = Clock::now();
    const ComparisonReport r = run_compare(config({1.0, -2.0}, {90.0}));
    const double secs = seconds_since(t0);
    const ZoneError* z = r.find(90.0, ZoneKind::Constant);
    if (!z)
        return {false, "no middle zone"};
    const bool ok = std::abs(z->mean_a - 1.25) <= tol && std::abs(z->mean_b + 1.5) <= tol && secs <= budget;
    return {ok, fmt("mean a %.5f, mean b %.5f over %d sites, %.1f s", z->mean_a, z->mean_b, z->samples, secs)};
}

// Oscillation around the constants decays like t^(-1/2).
Outcome c2()
{
    const std::vector<double> times{40.0, 80.0, 160.0};
    const ComparisonReport r = run_compare(config({1.0, -2.0}, times));
    std::vector<double> rms;
    for (double t : times)
        rms.push_back(r.find(t, ZoneKind::Constant)->rms_b);
    const double p = fit_exponent(times, rms);
    const bool ok = std::abs(p + 0.5) <= 0.15;
    return {ok, fmt("rms b %.4g, %.4g, %.4g; exponent %.4f", rms[0], rms[1], rms[2], p)};
}

// Rarefaction slopes for (0.4, 2).
Outcome c3()
{
    const std::vector<LatticeState> snaps = simulate(config({0.4, 2.0}, {120.0, 240.0}));
    double err_b[2], err_a2[2];
    for (int k = 0; k < 2; ++k) {
        const LatticeState& s = snaps[k];
        const double t = s.t;
        err_b[k] = err_a2[k] = 0.0;
        for (int n = static_cast<int>(std::ceil(0.1 * t)); n <= static_cast<int>(std::floor(0.9 * t)); ++n) {
            const double xi = n / t;
            err_b[k] = std::max(err_b[k], std::abs(s.b_at(n) - (1.0 - xi)));
            err_a2[k] = std::max(err_a2[k], std::abs(s.a_at(n) * s.a_at(n) - xi * xi / 4.0));
        }
    }
    const bool ok = err_b[0] <= 0.05 && err_a2[0] <= 0.02 && err_b[1] < err_b[0] && err_a2[1] < err_a2[0];
    return {ok, fmt("sup |b - slope| %.4g -> %.4g, sup |a^2 - slope^2| %.4g -> %.4g", err_b[0], err_b[1], err_a2[0],
                    err_a2[1])};
}

// Fixed two-band solution on the gap zone of (0.4, -2).
Outcome c4()
{
    const std::vector<LatticeState>& snaps = gap_run.get();
    const AsymptoticModel model = AsymptoticModel::build(gap_run.cfg.left, gap_run.cfg.right);
    const ComparisonReport r = compare(gap_run.cfg, snaps, model);
    const ZoneError* early = r.find(135.0, ZoneKind::Gap);
    const ZoneError* late = r.find(270.0, ZoneKind::Gap);
    if (!early || !late)
        return {false, "gap zone not sampled"};
    const bool ok = late->sup_b <= 0.1 && late->sup_b < early->sup_b && gap_run.seconds <= 600.0;
    return {ok, fmt("sup |b - b_q| %.4g (t=135, %d sites) -> %.4g (t=270, %d sites), simulation %.1f s", early->sup_b,
                    early->samples, late->sup_b, late->samples, gap_run.seconds)};
}

// Modulated solution at five rays inside the right Whitham zone of (0.4, -2).
Outcome c5()
{
    const std::vector<LatticeState>& snaps = gap_run.get();
    const AsymptoticModel model = AsymptoticModel::build(gap_run.cfg.left, gap_run.cfg.right);
    const Background& l = model.scenario().left;
    const double lo = model.map().xi_from(xi_r_prime(l));
    const double hi = model.map().xi_from(xi_r(l));
    bool ok = true;
    std::ostringstream detail;
    for (int k = 1; k <= 5; ++k) {
        const double xi = lo + (hi - lo) * k / 6.0;
        double err[2] = {0.0, 0.0};
        for (int i = 0; i < 2; ++i) {
            const LatticeState& s = at_time(snaps, gap_run.cfg.times[i]);
            const int centre = static_cast<int>(std::lround(xi * s.t));
            for (int n = centre - 3; n <= centre + 3; ++n)
                err[i] = std::max(err[i], std::abs(s.b_at(n) - model.leading_term(n, s.t).b));
        }
        ok = ok && err[1] <= 0.1 && err[1] < err[0];
        detail << fmt("%sxi=%.3f: %.3g -> %.3g", k > 1 ? "; " : "", xi, err[0], err[1]);
    }
    return {ok, detail.str()};
}

// Period-two structure in the middle of the wide step (0.5, -3).
Outcome c6()
{
    const ExperimentConfig cfg = config({0.5, -3.0}, {110.0});
    const AsymptoticModel model = AsymptoticModel::build(cfg.left, cfg.right);
    Zone mid{};
    bool found = false;
    for (const Zone& z : model.zones())
        if (z.kind == ZoneKind::Gap) {
            mid = z;
            found = true;
        }
    if (!found)
        return {false, "no middle zone"};
    const double m = zone_margin(mid, cfg.eps_zone);
    const LatticeState s = simulate(cfg).front();
    const int n0 = static_cast<int>(std::ceil((mid.xi_lo + m) * s.t));
    const int n1 = static_cast<int>(std::floor((mid.xi_hi - m) * s.t));
    double da = 0.0, db = 0.0;
    for (int n = n0; n + 2 <= n1; ++n) {
        da = std::max(da, std::abs(s.a_at(n + 2) - s.a_at(n)));
        db = std::max(db, std::abs(s.b_at(n + 2) - s.b_at(n)));
    }
    const bool ok = n1 - n0 >= 2 && da <= 0.03 && db <= 0.03;
    return {ok, fmt("sites %d..%d, max |a(n+2)-a(n)| %.4g, max |b(n+2)-b(n)| %.4g", n0, n1, da, db)};
}

// Closed forms of the critical rays against their quadrature definitions.
Outcome c7()
{
    std::mt19937_64 rng(20240607);
    std::uniform_real_distribution<double> ua(0.1, 2.0), ub(-6.0, 0.5);
    const auto t0 = Clock::now();
    int shocks = 0, mixed = 0;
    double worst_r = 0.0, worst_cr = 0.0;
    while (shocks < 50) {
        const Background l{ua(rng), ub(rng)};
        const ScenarioKind k = classify(l).kind;
        if (k != ScenarioKind::ShockNonOverlap && k != ScenarioKind::ShockOverlap)
            continue;
        worst_r = std::max(worst_r, std::abs(xi_r(l) - xi_r_quadrature(l)));
        ++shocks;
    }
    std::uniform_real_distribution<double> ua2(0.02, 0.48), uu(-1.0, 1.0);
    while (mixed < 50) {
        const double a = ua2(rng);
        const Background l{a, uu(rng) * (1.0 - 2.0 * a)};
        if (classify(l).kind != ScenarioKind::MixedLeftInRight)
            continue;
        worst_cr = std::max(worst_cr, std::abs(xi_cr_closed_form(l) - xi_cr_mixed(l)));
        ++mixed;
    }
    const double secs = seconds_since(t0);
    const bool ok = worst_r < 1e-8 && worst_cr < 1e-8;
    return {ok, fmt("max |xi_r diff| %.3g over 50, max |xi_cr diff| %.3g over 50, %.2f s", worst_r, worst_cr, secs)};
}

// Every two-band model is an exact Toda solution with a sample-independent
// calibration, and the collapsing band reproduces the right background.
Outcome c8()
{
    std::vector<std::pair<int, double>> samples;
    for (int i = 0; i < 10; ++i)
        for (int j = 0; j < 10; ++j)
            samples.emplace_back(-20 + 4 * i, 5.0 + 7.5 * j);

    const std::vector<Background> lefts{{0.4, -2.0}, {0.5, -3.0}, {1.0, -2.0}, {0.8, -1.5},
                                        {1.0, -0.5}, {0.2, 0.3},  {0.3, -0.2}};
    int models = 0, skipped = 0;
    double worst_res = 0.0, worst_spread = 0.0, worst_limit = 0.0;
    auto check = [&](const std::optional<TwoBandModel>& m) {
        if (!m) {
            ++skipped;
            return;
        }
        ++models;
        worst_res = std::max(worst_res, toda_residual(*m, samples));
        worst_spread = std::max(worst_spread, m->calibration_spread);
    };
    for (const Background& left : lefts) {
        const AsymptoticModel am = AsymptoticModel::build(left, {0.5, 0.0});
        const Scenario& sc = am.scenario();
        check(am.gap_model());
        for (const Zone& z : sc.zones) {
            if (!std::isfinite(z.xi_lo) || !std::isfinite(z.xi_hi))
                continue;
            for (int k = 1; k <= 5; ++k) {
                const double xi = z.xi_lo + (z.xi_hi - z.xi_lo) * k / 6.0;
                if (z.kind == ZoneKind::RightWhitham)
                    check(am.whitham_model(xi));
                else if (z.kind == ZoneKind::LeftWhitham || z.kind == ZoneKind::MixedTwoBand)
                    check(am.mirror_model(xi));
            }
        }
        if (sc.left.spectrum_lo() < -1.0) {
            const std::optional<TwoBandModel> edge = am.whitham_model(xi_r(sc.left) - 1e-5);
            if (edge) {
                check(edge);
                worst_limit = std::max({worst_limit, std::abs(edge->a_tilde2 - 0.25), std::abs(edge->b_tilde)});
            }
        }
    }
    const bool ok = worst_res < 1e-6 && worst_spread < 1e-6 && worst_limit < 1e-3 && models > 0;
    return {ok, fmt("%d models (%d genus-0 fallbacks), residual %.3g, spread %.3g, collapsed-band constants off by "
                    "%.3g",
                    models, skipped, worst_res, worst_spread, worst_limit)};
}

Outcome c9()
{
    const auto t0 = Clock::now();
    const std::vector<SelfTestResult> results = run_selftest();
    const double secs = seconds_since(t0);
    bool ok = secs <= 60.0;
    std::string failed;
    for (const SelfTestResult& r : results)
        if (!r.passed) {
            ok = false;
            failed += " " + r.name;
        }
    return {ok, fmt("%zu suites, %.2f s%s%s", results.size(), secs, failed.empty() ? "" : ", failed:", failed.c_str())};
}

} // namespace

int main()
{
    const std::vector<std::pair<std::string, std::function<Outcome()>>> criteria{
        {"shock overlap middle constants", c1},
        {"middle-zone oscillation decay", c2},
        {"rarefaction slopes", c3},
        {"gap-zone two-band solution", c4},
        {"Whitham-zone modulated solution", c5},
        {"period-two middle region", c6},
        {"critical-ray closed forms", c7},
        {"exact two-band solutions", c8},
        {"invariant suites", c9},
    };
    int failures = 0;
    for (std::size_t i = 0; i < criteria.size(); ++i) {
        Outcome o;
        try {
            o = criteria[i].second();
        } catch (const std::exception& e) {
            o = {false, std::string("exception: ") + e.what()};
        }
        std::printf("%s C%zu %s: %s\n", o.pass ? "PASS" : "FAIL", i + 1, criteria[i].first.c_str(), o.detail.c_str());
        std::fflush(stdout);
        failures += o.pass ? 0 : 1;
    }
    return failures == 0 ? 0 : 1;
}
