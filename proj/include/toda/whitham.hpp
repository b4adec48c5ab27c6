#pragma once

// Region structure of the long-time asymptotics in the ray variable xi = n/t.
// Unless stated otherwise, backgrounds here are normalized so that the right
// background is (1/2, 0) and I_r = [-1, 1].

#include <optional>
#include <string>
#include <vector>

#include "json.hpp"
#include "toda/lattice.hpp"
#include "toda/spectral.hpp"

namespace toda {

// lambda' = (lambda - shift) / scale with scale = 2 a_r, shift = b_r; time
// scales by `scale`, n is unchanged, so xi' = xi / scale.
struct Transform {
    double scale = 1.0;
    double shift = 0.0;

    double lambda_to(double lambda) const { return (lambda - shift) / scale; }
    double lambda_from(double lambda) const { return shift + scale * lambda; }
    double t_to(double t) const { return scale * t; }
    double xi_to(double xi) const { return xi / scale; }
    double xi_from(double xi) const { return xi * scale; }
    double a_to(double a) const { return a / scale; }
    double a_from(double a) const { return a * scale; }
    double b_to(double b) const { return (b - shift) / scale; }
    double b_from(double b) const { return shift + scale * b; }
};

struct NormalizedProblem {
    Background left;
    Background right{0.5, 0.0};
    Transform map;
};

NormalizedProblem normalize_right(const Background& left, const Background& right);

// Image of a normalized left background under n -> -n, b -> -b followed by
// renormalization: (1 / (4 a_l), b_l / (2 a_l)). xi maps to -xi / (2 a_l) and
// lambda to b_l - 2 a_l lambda.
Background mirror_background(const Background& left);

enum class ScenarioKind {
    ShockNonOverlap,
    ShockOverlap,
    RarefactionNonOverlap,
    RarefactionOverlap,
    MixedRightInLeft,
    MixedLeftInRight,
    Flat
};

enum class ZoneKind {
    LeftBackground,
    LeftWhitham,
    Gap,
    RightWhitham,
    RightBackground,
    Constant,
    SlopeLeft,
    SlopeRight,
    MixedTwoBand
};

std::string to_string(ScenarioKind k);
std::string to_string(ZoneKind k);

struct Ray {
    std::string label;
    double xi;
};

struct Zone {
    ZoneKind kind;
    double xi_lo; // -inf for the leftmost zone
    double xi_hi; // +inf for the rightmost zone
};

struct Scenario {
    ScenarioKind kind = ScenarioKind::Flat;
    Background left;
    std::vector<Ray> rays; // strictly increasing
    std::vector<Zone> zones;

    const Zone& zone_at(double xi) const;
    nlohmann::json to_json() const;
};

Scenario classify(const Background& left);

// Critical ray of the right Whitham zone, closed form. Requires inf I_l < -1.
double xi_r(const Background& left);
// Root of int_{inf I_l}^{-1} (x + xi) / sqrt(x^2 - 1) dx = 0 by bisection.
double xi_r_quadrature(const Background& left);

// Inner end of the right Whitham zone (shock without overlap): gamma = sup I_l.
double xi_r_prime(const Background& left);
// Same ray from bisection in xi of the gamma_mu residual at gamma = sup I_l.
double xi_r_prime_bisection(const Background& left);

// Left Whitham zone rays through the mirror map.
double xi_l(const Background& left);
double xi_l_prime(const Background& left);

struct WhithamPoint {
    double xi = 0.0;
    double edge = 0.0; // gamma, gamma_l or eta
    std::optional<double> mu;
    ZoneKind zone = ZoneKind::RightWhitham;
};

// Solves 2 a_l - b_l + gamma + 2 mu = -2 xi and
// int_gamma^{-1} (lambda - mu)(lambda - gamma) / P(lambda, gamma) dlambda = 0
// for gamma in (inf I_l, min(sup I_l, -1)). Throws OutsideZone when the
// residual does not change sign.
WhithamPoint gamma_mu(double xi, const Background& left);

// The integral equation of gamma_mu at a given (gamma, mu).
double gamma_mu_residual(double gamma, double mu, const Background& left);

// gamma_l(xi) in I_r on (xi_l, xi_l') or the overlap analogue.
WhithamPoint left_zone(double xi, const Background& left);

// Band-edge crossing eta(xi) in the slope zones and the mixed two-band zone.
double eta(double xi, const Scenario& scenario);

// Case I_l inside I_r: xi_cr from the linear quadrature pair, and its closed
// form -2 a_l sqrt(u^2 - 1) / acosh(u), u = (1 - b_l) / (2 a_l).
double xi_cr_mixed(const Background& left);
double xi_cr_closed_form(const Background& left);

// mu(xi) in (sup I_l, eta) with eta = 1 + 2 b_l - 2 xi - 2 mu, by bisection.
WhithamPoint mu_mixed(double xi, const Background& left);
double mu_mixed_residual(double xi, double mu, const Background& left);

// g(p) = int_1^p (lambda - mu)(lambda - gamma) / P(lambda, gamma) dlambda in
// the right Whitham zone, on the upper sheet off the bands, and its
// derivative together with that of the phase function.
cplx g_function(const SurfacePoint& p, double xi, const Background& left);
cplx g_minus_phi_derivative(cplx lambda, double xi, const Background& left);

// Front speed bound in original units and the default half window
// ceil(v t) + 50.
double front_speed_bound(const Background& left, const Background& right);
int default_half_width(const Background& left, const Background& right, double t_end);

} // namespace toda
