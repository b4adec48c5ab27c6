// Command-line front end: simulate, asymptotic, compare, regions, scattering,
// selftest. Exit codes: 0 success, 2 validation error, 3 numerical failure.

#include <filesystem>
#include <fstream>
#include <iomanip>
#include <iostream>
#include <sstream>

#include "CLI11.hpp"
#include "json.hpp"
#include "toda/asymptotics.hpp"
#include "toda/errors.hpp"
#include "toda/harness.hpp"
#include "toda/spectral.hpp"

namespace fs = std::filesystem;
using namespace toda;

namespace {

constexpr int exit_validation = 2;
constexpr int exit_numerical = 3;

struct Flags {
    double a_left = 0, b_left = 0, a_right = 0, b_right = 0;
    std::vector<double> t;
    int window = 0;
    double rtol = 0, atol = 0, eps_zone = 0;
    std::string out, format, config;
    bool plots = false;
    std::vector<double> lambda;
};

struct Bound {
    CLI::Option *a_left, *b_left, *a_right, *b_right, *t, *window, *rtol, *atol, *eps, *out, *format, *plots;
};

Bound add_common(CLI::App* sub, Flags& f)
{
    Bound b{};
    sub->add_option("--config", f.config, "JSON config file mirroring the flags");
    b.a_left = sub->add_option("--a-left", f.a_left, "left background a (default 1)");
    b.b_left = sub->add_option("--b-left", f.b_left, "left background b (default -2)");
    b.a_right = sub->add_option("--a-right", f.a_right, "right background a (default 0.5)");
    b.b_right = sub->add_option("--b-right", f.b_right, "right background b (default 0)");
    b.t = sub->add_option("--t", f.t, "time or comma separated increasing times")->delimiter(',');
    b.window = sub->add_option("--window", f.window, "half width of the lattice window");
    b.rtol = sub->add_option("--rtol", f.rtol, "relative integrator tolerance");
    b.atol = sub->add_option("--atol", f.atol, "absolute integrator tolerance");
    b.eps = sub->add_option("--eps-zone", f.eps_zone, "zone margin in xi");
    b.out = sub->add_option("--out", f.out, "output directory");
    b.format = sub->add_option("--format", f.format, "csv or json");
    b.plots = sub->add_flag("--plots", f.plots, "write SVG plots (compare)");
    return b;
}

ExperimentConfig resolve(const Flags& f, const Bound& b)
{
    ExperimentConfig c;
    if (!f.config.empty()) {
        std::ifstream is(f.config);
        if (!is)
            throw ValidationError("cannot read config file " + f.config);
        nlohmann::json j;
        try {
            is >> j;
        } catch (const nlohmann::json::exception& e) {
            throw ValidationError(std::string("config is not valid JSON: ") + e.what());
        }
        c = config_from_json(j, c);
    }
    if (b.a_left->count())
        c.left.a = f.a_left;
    if (b.b_left->count())
        c.left.b = f.b_left;
    if (b.a_right->count())
        c.right.a = f.a_right;
    if (b.b_right->count())
        c.right.b = f.b_right;
    if (b.t->count())
        c.times = f.t;
    if (b.window->count())
        c.window = f.window;
    if (b.rtol->count())
        c.rtol = f.rtol;
    if (b.atol->count())
        c.atol = f.atol;
    if (b.eps->count())
        c.eps_zone = f.eps_zone;
    if (b.out->count())
        c.out_dir = f.out;
    if (b.format->count())
        c.format = f.format;
    if (b.plots->count())
        c.plots = f.plots;
    c.validate();
    return c;
}

// Writes to dir/name when an output directory is set, stdout otherwise.
void emit(const ExperimentConfig& c, const std::string& name, const std::string& text)
{
    if (c.out_dir.empty()) {
        std::cout << text;
        return;
    }
    fs::create_directories(c.out_dir);
    std::ofstream os(fs::path(c.out_dir) / name);
    if (!os)
        throw std::runtime_error("cannot write " + (fs::path(c.out_dir) / name).string());
    os << text;
    std::cerr << "wrote " << (fs::path(c.out_dir) / name).string() << '\n';
}

int cmd_simulate(const ExperimentConfig& c)
{
    const std::vector<LatticeState> snaps = simulate(c);
    for (const LatticeState& s : snaps) {
        const std::string tag = time_tag(s.t);
        if (c.format == "json") {
            nlohmann::json j = snapshot_sidecar(s, c.rtol, c.atol);
            j["n_min"] = s.n_min;
            j["a"] = s.a;
            j["b"] = s.b;
            emit(c, "snapshot_t" + tag + ".json", j.dump() + "\n");
        } else {
            std::ostringstream os;
            write_snapshot_csv(os, s);
            emit(c, "snapshot_t" + tag + ".csv", os.str());
            if (!c.out_dir.empty())
                emit(c, "snapshot_t" + tag + ".meta.json", snapshot_sidecar(s, c.rtol, c.atol).dump(2) + "\n");
        }
    }
    return 0;
}

int cmd_asymptotic(const ExperimentConfig& c)
{
    const AsymptoticModel model = AsymptoticModel::build(c.left, c.right);
    const int w = c.half_width();
    std::ostringstream os;
    os.precision(17);
    nlohmann::json rows = nlohmann::json::array();
    if (c.format == "csv")
        os << "n,t,xi,zone,a_asym,b_asym\n";
    for (double t : c.times) {
        for (int n = -w; n <= w; ++n) {
            const LeadingTerm lt = model.leading_term(n, t);
            if (c.format == "csv")
                os << n << ',' << t << ',' << n / t << ',' << to_string(lt.zone) << ',' << lt.a << ',' << lt.b
                   << '\n';
            else
                rows.push_back({{"n", n}, {"t", t}, {"xi", n / t}, {"zone", to_string(lt.zone)}, {"a_asym", lt.a},
                                {"b_asym", lt.b}});
        }
    }
    if (c.format == "json")
        emit(c, "asymptotic.json", rows.dump() + "\n");
    else
        emit(c, "asymptotic.csv", os.str());
    return 0;
}

int cmd_compare(const ExperimentConfig& c)
{
    const ComparisonReport r = run_compare(c);
    std::cout << "scenario " << r.scenario << ", window [-" << r.half_width << ", " << r.half_width << "]\n";
    std::cout << std::setw(8) << "t" << std::setw(18) << "zone" << std::setw(8) << "sites" << std::setw(12)
              << "sup_a" << std::setw(12) << "sup_b" << std::setw(12) << "rms_b" << std::setw(12) << "mean_a"
              << std::setw(12) << "mean_b" << '\n';
    std::cout << std::setprecision(4);
    for (const TimeReport& tr : r.times)
        for (const ZoneError& e : tr.zones)
            std::cout << std::setw(8) << tr.t << std::setw(18) << to_string(e.zone) << std::setw(8) << e.samples
                      << std::setw(12) << e.sup_a << std::setw(12) << e.sup_b << std::setw(12) << e.rms_b
                      << std::setw(12) << e.mean_a << std::setw(12) << e.mean_b << '\n';
    for (const DecayFit& f : r.fits)
        std::cout << "decay " << to_string(f.zone) << ' ' << f.metric << " exponent " << f.exponent << '\n';
    return 0;
}

int cmd_regions(const ExperimentConfig& c)
{
    const NormalizedProblem np = normalize_right(c.left, c.right);
    const Scenario s = classify(np.left);
    nlohmann::json j = s.kind == ScenarioKind::Flat ? s.to_json() : AsymptoticModel::build(c.left, c.right).to_json();
    emit(c, "regions.json", j.dump(2) + "\n");
    return 0;
}

int cmd_scattering(const ExperimentConfig& c, std::vector<double> lambdas)
{
    const LatticeState s0 = make_step_initial(c.left, c.right, -4, 4);
    if (lambdas.empty()) {
        const double lo = std::min(c.left.spectrum_lo(), c.right.spectrum_lo());
        const double hi = std::max(c.left.spectrum_hi(), c.right.spectrum_hi());
        constexpr int points = 81;
        for (int k = 0; k < points; ++k)
            lambdas.push_back(lo + (hi - lo) * (k + 0.5) / points);
    }
    std::ostringstream os;
    os.precision(17);
    nlohmann::json rows = nlohmann::json::array();
    if (c.format == "csv")
        os << "lambda,ReT,ImT,ReR,ImR,chi,multiplicity\n";
    for (double lambda : lambdas) {
        if (multiplicity(c.left, c.right, lambda) == Multiplicity::None)
            continue;
        const ScatteringData d = scattering_data(s0, lambda);
        if (c.format == "csv") {
            os << lambda << ',' << d.T.real() << ',' << d.T.imag() << ',';
            if (d.R)
                os << d.R->real() << ',' << d.R->imag();
            else
                os << ',';
            os << ',';
            if (d.chi)
                os << *d.chi;
            os << ',' << to_string(d.multiplicity) << '\n';
        } else {
            nlohmann::json r{{"lambda", lambda}, {"ReT", d.T.real()}, {"ImT", d.T.imag()},
                             {"multiplicity", to_string(d.multiplicity)}};
            r["ReR"] = d.R ? nlohmann::json(d.R->real()) : nlohmann::json(nullptr);
            r["ImR"] = d.R ? nlohmann::json(d.R->imag()) : nlohmann::json(nullptr);
            r["chi"] = d.chi ? nlohmann::json(*d.chi) : nlohmann::json(nullptr);
            rows.push_back(r);
        }
    }
    if (c.format == "json")
        emit(c, "scattering.json", rows.dump() + "\n");
    else
        emit(c, "scattering.csv", os.str());
    return 0;
}

int cmd_selftest()
{
    bool ok = true;
    for (const SelfTestResult& r : run_selftest()) {
        std::cout << (r.passed ? "PASS " : "FAIL ") << r.name << " (" << r.detail << ")\n";
        ok = ok && r.passed;
    }
    return ok ? 0 : exit_numerical;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Toda lattice step problem: simulation and long-time asymptotics"};
    app.require_subcommand(1);
    Flags f;
    auto* sim = app.add_subcommand("simulate", "evolve a step and write snapshots");
    auto* asym = app.add_subcommand("asymptotic", "tabulate the leading-order asymptotics");
    auto* cmp = app.add_subcommand("compare", "compare simulation with asymptotics per zone");
    auto* reg = app.add_subcommand("regions", "print the scenario and its rays as JSON");
    auto* sca = app.add_subcommand("scattering", "scattering data of the step");
    auto* st = app.add_subcommand("selftest", "run the invariant suites");
    const Bound b_sim = add_common(sim, f);
    const Bound b_asym = add_common(asym, f);
    const Bound b_cmp = add_common(cmp, f);
    const Bound b_reg = add_common(reg, f);
    const Bound b_sca = add_common(sca, f);
    sca->add_option("--lambda", f.lambda, "spectral points (comma separated)")->delimiter(',');

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? 0 : exit_validation;
    }

    try {
        if (sim->parsed())
            return cmd_simulate(resolve(f, b_sim));
        if (asym->parsed())
            return cmd_asymptotic(resolve(f, b_asym));
        if (cmp->parsed())
            return cmd_compare(resolve(f, b_cmp));
        if (reg->parsed())
            return cmd_regions(resolve(f, b_reg));
        if (sca->parsed())
            return cmd_scattering(resolve(f, b_sca), f.lambda);
        if (st->parsed())
            return cmd_selftest();
    } catch (const ValidationError& e) {
        std::cerr << "error: " << e.what() << '\n';
        return exit_validation;
    } catch (const NumericalError& e) {
        std::cerr << "numerical failure: " << e.what() << '\n';
        return exit_numerical;
    } catch (const std::exception& e) {
        std::cerr << "failure: " << e.what() << '\n';
        return exit_numerical;
    }
    return 0;
}
