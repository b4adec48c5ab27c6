#include "toda/lattice.hpp"

#include <algorithm>
#include <cmath>
#include <ostream>
#include <sstream>

#include <boost/numeric/odeint.hpp>

#include "toda/errors.hpp"

namespace toda {

namespace odeint = boost::numeric::odeint;

void validate(const Background& bg)
{
    if (!std::isfinite(bg.a) || !std::isfinite(bg.b))
        throw ValidationError("background values must be finite");
    if (!(bg.a > 0.0))
        throw ValidationError("background a must be positive");
}

double LatticeState::a_at(int n) const
{
    if (n < n_min)
        return left.a;
    if (n > n_max())
        return right.a;
    return a[n - n_min];
}

double LatticeState::b_at(int n) const
{
    if (n < n_min)
        return left.b;
    if (n > n_max())
        return right.b;
    return b[n - n_min];
}

LatticeState make_step_initial(const Background& left, const Background& right, int n_min, int n_max)
{
    validate(left);
    validate(right);
    if (n_max - n_min + 1 < 4)
        throw ValidationError("window must hold at least 4 sites");
    if (n_min > -2 || n_max < 2)
        throw ValidationError("window must contain n = 0 with a margin of 2 sites on each side");
    LatticeState s;
    s.n_min = n_min;
    s.left = left;
    s.right = right;
    for (int n = n_min; n <= n_max; ++n) {
        const Background& bg = n >= 0 ? right : left;
        s.a.push_back(bg.a);
        s.b.push_back(bg.b);
    }
    return s;
}

LatticeState make_flat(const Background& bg, int n_min, int n_max)
{
    return make_step_initial(bg, bg, n_min, n_max);
}

namespace {

// Packed state y = (a(n_min..n_max), b(n_min..n_max)).
void rhs_packed(const std::vector<double>& y, std::vector<double>& dy, const Background& left,
                const Background& right, bool clamp)
{
    const std::size_t m = y.size() / 2;
    const double* a = y.data();
    const double* b = y.data() + m;
    double* da = dy.data();
    double* db = dy.data() + m;
    for (std::size_t i = 0; i < m; ++i) {
        const double a_prev = i == 0 ? left.a : a[i - 1];
        const double b_next = i + 1 == m ? right.b : b[i + 1];
        db[i] = 2.0 * (a[i] * a[i] - a_prev * a_prev);
        da[i] = a[i] * (b_next - b[i]);
    }
    if (clamp) {
        da[0] = db[0] = 0.0;
        da[m - 1] = db[m - 1] = 0.0;
    }
}

std::vector<double> pack(const LatticeState& s)
{
    std::vector<double> y(s.a);
    y.insert(y.end(), s.b.begin(), s.b.end());
    return y;
}

void unpack(const std::vector<double>& y, LatticeState& s)
{
    const std::size_t m = y.size() / 2;
    std::copy(y.begin(), y.begin() + m, s.a.begin());
    std::copy(y.begin() + m, y.end(), s.b.begin());
}

struct EdgeMonitor {
    const LatticeState* shape;
    double limit;
    EvolveStats* stats;

    void operator()(const std::vector<double>& y, double t) const
    {
        const int m = static_cast<int>(y.size() / 2);
        const int depth = std::min(3, m / 2 - 1);
        double worst = 0.0;
        for (int k = 1; k <= depth; ++k) {
            worst = std::max(worst, std::abs(y[k] - shape->left.a));
            worst = std::max(worst, std::abs(y[m + k] - shape->left.b));
            worst = std::max(worst, std::abs(y[m - 1 - k] - shape->right.a));
            worst = std::max(worst, std::abs(y[2 * m - 1 - k] - shape->right.b));
        }
        if (stats) {
            ++stats->steps;
            stats->edge_deviation = std::max(stats->edge_deviation, worst);
        }
        if (worst > limit) {
            std::ostringstream msg;
            msg << "signal reached the window boundary at t = " << t << " (edge deviation " << worst
                << " > " << limit << "); enlarge the window";
            throw BoundaryReached(msg.str());
        }
    }
};

void advance(LatticeState& s, double t_end, double rtol, double atol, EvolveStats* stats)
{
    if (!(rtol > 0.0) || !(atol > 0.0))
        throw ValidationError("tolerances must be positive");
    if (t_end < s.t)
        throw ValidationError("t_end precedes the state time");
    if (s.size() < 4)
        throw ValidationError("window must hold at least 4 sites");
    if (t_end == s.t)
        return;
    std::vector<double> y = pack(s);
    const Background left = s.left;
    const Background right = s.right;
    auto system = [&](const std::vector<double>& x, std::vector<double>& dx, double) {
        rhs_packed(x, dx, left, right, true);
    };
    auto stepper = odeint::make_controlled(atol, rtol, odeint::runge_kutta_dopri5<std::vector<double>>());
    EdgeMonitor monitor{&s, 100.0 * atol, stats};
    try {
        odeint::integrate_adaptive(stepper, system, y, s.t, t_end, 1e-3, monitor);
    } catch (const NumericalError&) {
        throw;
    } catch (const std::exception& e) {
        throw StepUnderflow(std::string("integrator stalled: ") + e.what());
    }
    unpack(y, s);
    s.t = t_end;
    for (double v : s.a)
        if (!(v > 0.0) || !std::isfinite(v))
            throw NumericalError("lost positivity of a during integration");
}

} // namespace

Derivative toda_rhs(const LatticeState& s)
{
    std::vector<double> y = pack(s);
    std::vector<double> dy(y.size());
    rhs_packed(y, dy, s.left, s.right, false);
    Derivative d;
    const auto m = static_cast<std::ptrdiff_t>(s.a.size());
    d.da.assign(dy.begin(), dy.begin() + m);
    d.db.assign(dy.begin() + m, dy.end());
    return d;
}

LatticeState evolve(const LatticeState& s, double t_end, double rtol, double atol, EvolveStats* stats)
{
    LatticeState out = s;
    advance(out, t_end, rtol, atol, stats);
    return out;
}

std::vector<LatticeState> evolve_to(const LatticeState& s, const std::vector<double>& times, double rtol,
                                    double atol)
{
    std::vector<LatticeState> out;
    LatticeState cur = s;
    for (double t : times) {
        advance(cur, t, rtol, atol, nullptr);
        out.push_back(cur);
    }
    return out;
}

ConservationReport conservation_report(const std::vector<LatticeState>& trajectory)
{
    if (trajectory.size() < 2)
        throw ValidationError("conservation report needs at least two snapshots");
    const LatticeState& first = trajectory.front();
    ConservationReport r;
    r.b_sum_rate = 2.0 * (first.right.a * first.right.a - first.left.a * first.left.a);
    r.log_a_sum_rate = first.right.b - first.left.b;
    auto sums = [](const LatticeState& s) {
        double sb = 0.0, sl = 0.0;
        for (int i = 0; i < s.size(); ++i) {
            sb += s.b[i];
            sl += std::log(s.a[i]);
        }
        return std::pair{sb, sl};
    };
    auto prev = sums(first);
    for (std::size_t k = 1; k < trajectory.size(); ++k) {
        const LatticeState& s = trajectory[k];
        const LatticeState& p = trajectory[k - 1];
        if (s.n_min != p.n_min || s.size() != p.size())
            throw ValidationError("snapshots have mismatched windows");
        const double dt = s.t - p.t;
        if (!(dt > 0.0))
            throw ValidationError("snapshot times must increase");
        auto cur = sums(s);
        r.b_sum_drift = std::max(r.b_sum_drift, std::abs((cur.first - prev.first) / dt - r.b_sum_rate));
        r.log_a_sum_drift =
            std::max(r.log_a_sum_drift, std::abs((cur.second - prev.second) / dt - r.log_a_sum_rate));
        prev = cur;
    }
    return r;
}

LatticeState reflect(const LatticeState& s)
{
    LatticeState r;
    r.n_min = -s.n_max();
    r.t = s.t;
    r.left = Background{s.right.a, -s.right.b};
    r.right = Background{s.left.a, -s.left.b};
    for (int m = r.n_min; m <= -s.n_min; ++m) {
        r.a.push_back(s.a_at(-m - 1));
        r.b.push_back(-s.b_at(-m));
    }
    return r;
}

void write_snapshot_csv(std::ostream& os, const LatticeState& s)
{
    std::ostringstream buf;
    buf.precision(17);
    buf << "n,a,b\n";
    for (int i = 0; i < s.size(); ++i)
        buf << s.n_min + i << ',' << s.a[i] << ',' << s.b[i] << '\n';
    os << buf.str();
}

nlohmann::json snapshot_sidecar(const LatticeState& s, double rtol, double atol)
{
    return nlohmann::json{{"t", s.t},         {"a_left", s.left.a},   {"b_left", s.left.b},
                          {"a_right", s.right.a}, {"b_right", s.right.b}, {"rtol", rtol},
                          {"atol", atol}};
}

} // namespace toda
