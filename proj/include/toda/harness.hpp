#pragma once

// Experiment plumbing: configuration, simulation against the leading-order
// asymptotics, per-zone error tables, decay fits, CSV/JSON/SVG output.

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "toda/asymptotics.hpp"
#include "toda/lattice.hpp"
#include "toda/whitham.hpp"

namespace toda {

struct ExperimentConfig {
    Background left{1.0, -2.0};
    Background right{0.5, 0.0};
    std::vector<double> times{90.0};
    std::optional<int> window; // half width; default from the front speed bound
    double rtol = 1e-10;
    double atol = 1e-10;
    double eps_zone = 0.05;
    std::string out_dir;
    std::string format = "csv";
    bool plots = false;

    // Throws ValidationError.
    void validate() const;
    int half_width() const;
};

// Keys mirror the CLI flags with '-' or '_' ("a-left", "t", "eps_zone", ...).
// "t" may be a number or an array. Unknown keys are rejected.
ExperimentConfig config_from_json(const nlohmann::json& j, ExperimentConfig base = {});
nlohmann::json to_json(const ExperimentConfig& c);

struct ZoneError {
    ZoneKind zone;
    double xi_lo = 0.0; // sampled range after the margin
    double xi_hi = 0.0;
    int samples = 0;
    double sup_a = 0.0;
    double rms_a = 0.0;
    double sup_a2 = 0.0; // |a^2 - a_asym^2|
    double sup_b = 0.0;
    double rms_b = 0.0;
    double mean_a = 0.0; // simulation means over the sampled sites
    double mean_b = 0.0;
};

struct ProfileRow {
    int n;
    double xi;
    ZoneKind zone;
    double a_sim, b_sim, a_asym, b_asym;
};

struct TimeReport {
    double t = 0.0;
    std::vector<ZoneError> zones;
    std::vector<ProfileRow> profile;
};

struct DecayFit {
    ZoneKind zone;
    std::string metric; // "rms_b", "sup_b", "sup_a"
    double exponent = 0.0;
};

struct ComparisonReport {
    ExperimentConfig config;
    std::string scenario;
    std::vector<Ray> rays; // original xi
    std::vector<Zone> zones;
    int half_width = 0;
    std::vector<TimeReport> times;
    std::vector<DecayFit> fits;

    const ZoneError* find(double t, ZoneKind zone) const;
    nlohmann::json to_json() const;
};

// Effective margin min(eps, width / 4) for a finite zone, eps otherwise.
double zone_margin(const Zone& z, double eps);

// Least-squares slope of log(value) against log(t). Needs two or more
// positive values.
double fit_exponent(const std::vector<double>& t, const std::vector<double>& value);

// Simulates the pure step to each configured time.
std::vector<LatticeState> simulate(const ExperimentConfig& c);

// Per-zone comparison of simulated profiles with the leading-order terms.
// Throws FlatScenario for coinciding backgrounds.
ComparisonReport compare(const ExperimentConfig& c, const std::vector<LatticeState>& snapshots,
                         const AsymptoticModel& model);
ComparisonReport run_compare(const ExperimentConfig& c);

// Writes compare_summary.csv and profile_t<t>.csv (format csv) or
// compare_report.json (format json) into dir.
void write_report(const ComparisonReport& r, const std::string& dir, const std::string& format);

// One SVG per time and field: simulation in black, asymptotics in colour by
// zone, rays as dashed verticals.
std::vector<std::string> emit_plots(const ComparisonReport& r, const std::string& dir);
std::string profile_svg(const TimeReport& tr, const std::vector<Ray>& rays, bool field_b, int half_width);

struct SelfTestResult {
    std::string name;
    bool passed = false;
    std::string detail;
};

std::vector<SelfTestResult> run_selftest();

// Formats t for file names: 90 -> "90", 2.5 -> "2.5".
std::string time_tag(double t);

} // namespace toda
