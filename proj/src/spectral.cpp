#include "toda/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "toda/errors.hpp"

namespace toda {

namespace {

constexpr double edge_guard = 1e-10;
constexpr double overflow_guard = 1e250;

bool differs(double v, double ref) { return std::abs(v - ref) > 1e-14 * (1.0 + std::abs(ref)); }

bool inside(double x, const Background& bg) { return x >= bg.spectrum_lo() && x <= bg.spectrum_hi(); }

double edge_distance(double x, const Background& bg)
{
    return std::min(std::abs(x - bg.spectrum_lo()), std::abs(x - bg.spectrum_hi()));
}

void check_finite(cplx v)
{
    if (!std::isfinite(v.real()) || !std::isfinite(v.imag()) || std::abs(v) > overflow_guard)
        throw NumericalError("Jost recurrence overflow; the perturbation core is too long for this lambda");
}

} // namespace

cplx joukovski(cplx lambda, const Background& bg)
{
    cplx w = (lambda - bg.b) / (2.0 * bg.a);
    if (w.imag() == 0.0)
        w = cplx(w.real(), 0.0); // drop a negative zero so real input is the upper-lip limit
    const cplx s = std::sqrt(w - 1.0) * std::sqrt(w + 1.0);
    const cplx plus = w + s;
    const cplx minus = w - s;
    // z is the smaller root of z + 1/z = 2w; on the band both have modulus 1
    // and w + s gives the upper-lip value.
    return std::abs(plus) >= std::abs(minus) ? 1.0 / plus : 1.0 / minus;
}

cplx phase_phi(const SurfacePoint& p, double xi)
{
    if (p.at_infinity())
        throw ValidationError("phase function has a pole at infinity");
    const cplx z = joukovski(p.lambda, Background{0.5, 0.0});
    const cplx v = 0.5 * (z - 1.0 / z) + xi * std::log(z);
    return p.sheet == Sheet::Upper ? v : -v;
}

std::string to_string(Multiplicity m)
{
    switch (m) {
    case Multiplicity::Two:
        return "two";
    case Multiplicity::RightOnly:
        return "right";
    case Multiplicity::LeftOnly:
        return "left";
    case Multiplicity::None:
        return "none";
    }
    return "none";
}

Multiplicity multiplicity(const Background& left, const Background& right, double lambda)
{
    const bool in_l = inside(lambda, left);
    const bool in_r = inside(lambda, right);
    if (in_l && in_r)
        return Multiplicity::Two;
    if (in_r)
        return Multiplicity::RightOnly;
    if (in_l)
        return Multiplicity::LeftOnly;
    return Multiplicity::None;
}

Core perturbation_core(const LatticeState& s)
{
    Core c{0, -1};
    int hi = s.n_min - 1;
    for (int n = s.n_max(); n >= s.n_min; --n) {
        if (differs(s.a_at(n), s.right.a) || differs(s.b_at(n), s.right.b)) {
            hi = n;
            break;
        }
    }
    int lo = s.n_max() + 1;
    for (int n = s.n_min; n <= s.n_max(); ++n) {
        if (differs(s.a_at(n), s.left.a) || differs(s.b_at(n), s.left.b)) {
            lo = n;
            break;
        }
    }
    if (hi < s.n_min && lo > s.n_max())
        return c; // one background throughout
    c.lo = std::min(lo, hi + 1);
    c.hi = std::max(hi, lo - 1);
    return c;
}

namespace {

JostSolutions jost_impl(const LatticeState& s0, double lambda, int n_lo, int n_hi, std::optional<int> right_cutoff,
                        std::optional<int> left_cutoff, bool guard_edges)
{
    if (n_hi < n_lo)
        throw ValidationError("empty site range");
    if (guard_edges &&
        (edge_distance(lambda, s0.left) < edge_guard || edge_distance(lambda, s0.right) < edge_guard))
        throw BandEdge("lambda at a band edge; Jost recurrence degenerates");
    const Core core = perturbation_core(s0);
    const int nr_min = core.hi + 1;
    const int nl_max = core.lo - 1;
    const int nr = right_cutoff.value_or(nr_min);
    const int nl = left_cutoff.value_or(nl_max);
    if (nr < nr_min || nl > nl_max)
        throw ValidationError("Jost cutoff inside the perturbation core");

    const cplx zr = joukovski(lambda, s0.right);
    const cplx zl = joukovski(lambda, s0.left);
    const int lo = std::min(n_lo, nl - 1);
    const int hi = std::max(n_hi, nr + 1);
    const int len = hi - lo + 1;
    std::vector<cplx> psi(len), pl(len);

    for (int n = hi; n >= nr; --n)
        psi[n - lo] = std::pow(zr, n);
    for (int n = nr; n > lo; --n) {
        const cplx v = ((lambda - s0.b_at(n)) * psi[n - lo] - s0.a_at(n) * psi[n + 1 - lo]) / s0.a_at(n - 1);
        check_finite(v);
        psi[n - 1 - lo] = v;
    }
    for (int n = lo; n <= nl; ++n)
        pl[n - lo] = std::pow(zl, -n);
    for (int n = nl; n < hi; ++n) {
        const cplx v = ((lambda - s0.b_at(n)) * pl[n - lo] - s0.a_at(n - 1) * pl[n - 1 - lo]) / s0.a_at(n);
        check_finite(v);
        pl[n + 1 - lo] = v;
    }

    JostSolutions out;
    out.n_first = n_lo;
    out.right_cutoff = nr;
    out.left_cutoff = nl;
    out.psi.assign(psi.begin() + (n_lo - lo), psi.begin() + (n_hi - lo + 1));
    out.psi_left.assign(pl.begin() + (n_lo - lo), pl.begin() + (n_hi - lo + 1));
    return out;
}

} // namespace

JostSolutions jost_solutions(const LatticeState& s0, double lambda, int n_lo, int n_hi,
                             std::optional<int> right_cutoff, std::optional<int> left_cutoff)
{
    return jost_impl(s0, lambda, n_lo, n_hi, right_cutoff, left_cutoff, true);
}

cplx wronskian(const LatticeState& s0, const std::vector<cplx>& f, const std::vector<cplx>& g, int n_first, int n)
{
    const int i = n - n_first;
    return s0.a_at(n) * (f[i] * g[i + 1] - f[i + 1] * g[i]);
}

ScatteringData scattering_data(const LatticeState& s0, double lambda)
{
    ScatteringData d;
    d.lambda = lambda;
    d.multiplicity = multiplicity(s0.left, s0.right, lambda);
    if (d.multiplicity == Multiplicity::None) {
        std::ostringstream msg;
        msg << "lambda = " << lambda << " lies outside both background spectra";
        throw ValidationError(msg.str());
    }
    const Core core = perturbation_core(s0);
    const int lo = core.lo - 2;
    const int hi = core.hi + 2;
    const JostSolutions j = jost_solutions(s0, lambda, lo, hi);

    const cplx w0 = wronskian(s0, j.psi_left, j.psi, lo, lo);
    double spread = 0.0;
    for (int n = lo + 1; n < hi; ++n)
        spread = std::max(spread, std::abs(wronskian(s0, j.psi_left, j.psi, lo, n) - w0));
    d.wronskian_spread = spread / std::max(std::abs(w0), 1e-300);

    const cplx zr = joukovski(lambda, s0.right);
    const cplx num = s0.right.a * (zr - 1.0 / zr);
    if (std::abs(w0) < 1e-12 * std::max(1.0, std::abs(num)))
        throw NearResonance("W(psi_l, psi) vanishes: resonance at the band edge or an eigenvalue");
    d.T = num / w0;

    if (d.multiplicity != Multiplicity::LeftOnly) {
        std::vector<cplx> psi_bar(j.psi.size());
        std::transform(j.psi.begin(), j.psi.end(), psi_bar.begin(), [](cplx v) { return std::conj(v); });
        d.R = -wronskian(s0, j.psi_left, psi_bar, lo, lo) / w0;
    } else {
        d.chi = chi(s0, lambda);
    }
    return d;
}

double log_abs_chi(const LatticeState& s0, double x, double from_lo, double to_hi)
{
    const Background& r = s0.right;
    const double left_factor = from_lo * std::abs(to_hi);
    const double right_factor = std::abs((x - r.spectrum_lo()) * (x - r.spectrum_hi()));
    const Core core = perturbation_core(s0);
    const int lo = core.lo - 1;
    const int hi = core.hi + 1;
    // T is continuous up to the edges of I_l, so no edge guard here.
    const JostSolutions j = jost_impl(s0, x, lo, hi, std::nullopt, std::nullopt, false);
    const cplx w = wronskian(s0, j.psi_left, j.psi, lo, lo);
    const cplx zr = joukovski(x, r);
    const cplx t = r.a * (zr - 1.0 / zr) / w;
    return 0.5 * (std::log(left_factor) - std::log(right_factor)) + 2.0 * std::log(std::abs(t));
}

double chi(const LatticeState& s0, double x)
{
    if (multiplicity(s0.left, s0.right, x) != Multiplicity::LeftOnly || edge_distance(x, s0.left) < edge_guard ||
        edge_distance(x, s0.right) < edge_guard) {
        std::ostringstream msg;
        msg << "chi requires x in the interior of the left-only spectrum, got " << x;
        throw ValidationError(msg.str());
    }
    return -std::exp(log_abs_chi(s0, x, x - s0.left.spectrum_lo(), s0.left.spectrum_hi() - x));
}

ScatteringData step_scattering_closed_form(const Background& left, const Background& right, double lambda)
{
    ScatteringData d;
    d.lambda = lambda;
    d.multiplicity = multiplicity(left, right, lambda);
    if (d.multiplicity == Multiplicity::None)
        throw ValidationError("lambda lies outside both background spectra");
    const cplx zr = joukovski(lambda, right);
    const cplx zl = joukovski(lambda, left);
    // W(psi_l, psi) and W(psi_l, conj psi) at n = 0 with psi = z_r^n (n >= 0)
    // and psi_l = z_l^-n (n <= 0).
    const cplx w = left.a * zl - right.a / zr;
    const cplx w_bar = left.a * zl - right.a * zr;
    d.T = right.a * (zr - 1.0 / zr) / w;
    if (d.multiplicity != Multiplicity::LeftOnly) {
        d.R = -w_bar / w;
    } else {
        const double lf = std::abs((lambda - left.spectrum_lo()) * (lambda - left.spectrum_hi()));
        const double rf = std::abs((lambda - right.spectrum_lo()) * (lambda - right.spectrum_hi()));
        d.chi = -std::sqrt(lf / rf) * std::norm(d.T);
    }
    return d;
}

} // namespace toda
