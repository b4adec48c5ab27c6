#pragma once

// Leading-order asymptotics of the step problem in every zone of the ray
// variable xi = n / t: backgrounds, slopes, the constant middle state and
// (modulated or fixed) genus-1 theta-function solutions.

#include <array>
#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "json.hpp"
#include "toda/lattice.hpp"
#include "toda/riemann.hpp"
#include "toda/whitham.hpp"

namespace toda {

// Exact two-band Toda solution on the surface with branch points
// (E1, E2, -1, 1):
//   a^2(n, t) = a_tilde2 theta(z(n-1)) theta(z(n+1)) / theta(z(n))^2
//   b(n, t)   = b_tilde + (1 / gamma_cal) (L(z(n-1)) - L(z(n))),  L = theta'/theta
// with z(n, t) the phase vector below.
struct TwoBandModel {
    TwoBandSurface surface;
    JacobianPoint divisor_image; // int_{E1}^{rho} zeta, reduced
    cplx n_shift;                // int_{inf-}^{inf+} zeta
    cplx t_shift;                // (1 / pi i) int_{E1}^{E2} Omega0 = -time_slope
    cplx riemann_const;
    double a_tilde2 = 0.0;
    double b_tilde = 0.0;
    cplx gamma_cal;
    double calibration_spread = 0.0;
};

// int_{E1}^{E2} log|chi| zeta over the first band of the surface, with chi
// taken from the scattering data of s0.
double log_chi_integral(const LatticeState& s0, const TwoBandSurface& surface);

// Abel image of the divisor: int_{E1}^{E2} zeta + (i / pi) int log|chi| zeta
// + int_{inf-}^{inf+} zeta, on the surface (E1, gamma(xi), -1, 1).
JacobianPoint divisor_whitham(const TwoBandSurface& surface, const LatticeState& s0);

// Same construction on the xi-independent surface (inf I_l, sup I_l, -1, 1).
JacobianPoint divisor_gap(const TwoBandSurface& surface, const LatticeState& s0);

// z(n, t) = int_{E1}^{inf+} zeta - divisor - n n_shift + t t_shift - Xi, reduced.
JacobianPoint phase_vector(int n, double t, const TwoBandModel& model);

struct TwoBandValue {
    double a2 = 0.0;
    double b = 0.0;
};

// Throws ThetaZero if theta(z(n, t)) vanishes.
TwoBandValue two_band(int n, double t, const TwoBandModel& model);

// Fixes a_tilde2 and gamma_cal by requiring the Toda equations and b_tilde
// from the trace formula. The addition-theorem fit is evaluated on 20 fixed
// sample points; throws CalibrationError when the fitted coefficient varies by
// more than 1e-4 between samples.
void calibrate(TwoBandModel& model);

// Builds surface, divisor and calibration in one step.
TwoBandModel build_two_band(const std::array<double, 4>& E, const LatticeState& s0);

// Largest centred-difference residual of both Toda equations over the given
// (n, t) samples, relative to max(1, |rhs|).
double toda_residual(const TwoBandModel& model, const std::vector<std::pair<int, double>>& samples,
                     double h = 1e-4);

struct LeadingTerm {
    double a = 0.0;
    double b = 0.0;
    ZoneKind zone = ZoneKind::RightBackground;
};

// Zone dispatch for a pure step in original units. Immutable after build.
class AsymptoticModel {
public:
    // Throws FlatScenario when the two backgrounds coincide.
    static AsymptoticModel build(const Background& left, const Background& right);

    const Background& left() const { return left_; }
    const Background& right() const { return right_; }
    const Scenario& scenario() const { return scenario_; } // normalized units
    const Transform& map() const { return np_.map; }

    // Rays and zones in the original xi = n / t.
    std::vector<Ray> rays() const;
    std::vector<Zone> zones() const;
    ZoneKind zone_at(double xi) const;

    // t > 0.
    LeadingTerm leading_term(int n, double t) const;

    // Two-band model for a right Whitham ray (normalized xi), or nullopt when
    // the surface is too close to its genus-0 limit.
    std::optional<TwoBandModel> whitham_model(double xi_normalized) const;
    // Model on the mirrored problem behind the left Whitham and mixed zones,
    // for a normalized xi of this problem.
    std::optional<TwoBandModel> mirror_model(double xi_normalized) const;
    const std::optional<TwoBandModel>& gap_model() const { return gap_; }

    nlohmann::json to_json() const;

private:
    Background left_;
    Background right_;
    NormalizedProblem np_;
    Scenario scenario_;
    LatticeState step_;   // normalized pure step
    LatticeState mirror_; // its normalized mirror image
    Background mirror_left_;
    std::optional<TwoBandModel> gap_;

    // (a, b) in normalized units on the right Whitham zone of a normalized
    // problem with left background `left` and step data `s0`.
    std::pair<double, double> whitham_value(const Background& left, const LatticeState& s0, int n, double t) const;
    std::pair<double, double> mirrored_value(int n, double t) const;
};

} // namespace toda
