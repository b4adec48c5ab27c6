#pragma once

// Genus-1 hyperelliptic surface w^2 = prod (lambda - E_j) with four real
// branch points, P(lambda) = -prod sqrt(lambda - E_j) on the upper sheet.
//
// Homology: the a-cycle encircles [E1, E2]; the b-cycle leaves it through the
// gap (E2, E3) and returns on the lower sheet. zeta = c dlambda / P has unit
// a-period, so tau = int_b zeta = i J_gap / J_band with
// J_band = int_{E1}^{E2} dx / |R|, J_gap = int_{E2}^{E3} dx / |R|.

#include <array>
#include <complex>

#include "json.hpp"
#include "toda/quadrature.hpp"
#include "toda/spectral.hpp"

namespace toda {

struct JacobianPoint {
    cplx v;
};

// Representative with Im v in [-Im tau / 2, Im tau / 2] and Re v in [-1/2, 1/2].
cplx reduce(cplx v, cplx tau);

// |v - u| measured to the nearest lattice translate.
double lattice_distance(cplx v, cplx u, cplx tau);

struct ThetaValues {
    cplx value;
    cplx d1; // d/dv
    cplx d2;
};

// theta(v) = sum_m exp(pi i m^2 tau + 2 pi i m v). The argument is reduced
// first and the quasi-periodicity factor applied afterwards.
cplx theta(cplx v, cplx tau);
ThetaValues theta_all(cplx v, cplx tau);

class TwoBandSurface {
public:
    // Throws ValidationError unless E1 < E2 < E3 < E4, DegenerateSurface when
    // a band or gap is narrower than 1e-8, BasisConventionError when the
    // Riemann constant check fails.
    static TwoBandSurface build(const std::array<double, 4>& E, double tol = 1e-12);

    const std::array<double, 4>& E() const { return E_; }
    cplx tau() const { return tau_; }
    double band_integral() const { return j_band_; }      // int_{E1}^{E2} dx/|R|
    cplx raw_a_period() const { return cplx(0.0, -2.0 * j_band_); } // int_a dlambda / P
    cplx zeta_constant() const { return c_; }
    double omega0_c1() const { return c1_; }
    double omega0_c0() const { return c0_; }
    cplx omega0_b_period() const { return omega0_b_; }
    // t-slope of the theta argument: (1 / 2 pi i) int_b Omega0.
    cplx time_slope() const;
    // int_{inf-}^{inf+} zeta, as the b-period over 2 pi i of the normalized
    // third-kind differential (lambda + d) dlambda / P.
    cplx abel_infty() const { return abel_infty_; }
    cplx abel_infinity_plus() const { return abel_inf_plus_; } // int_{E1}^{inf+} zeta
    cplx riemann_const() const { return (1.0 + tau_) / 2.0; }
    // Genus-1 trace formula for the mean of b: 1/2 sum E + d.
    double trace_b() const { return -c1_ + d_; }
    int nodes_used() const { return nodes_; }

    // Upper-sheet square root, upper-lip limit on the real axis.
    cplx P(cplx lambda) const;
    // zeta / dlambda on the upper sheet.
    cplx zeta(cplx lambda) const { return c_ / P(lambda); }
    // Omega0 / dlambda on the upper sheet.
    cplx omega0(cplx lambda) const { return (lambda * lambda + c1_ * lambda + c0_) / P(lambda); }

    // int_{lo}^{hi} g(x) / |R(x)| dx for lo, hi in the closure of one real
    // segment between consecutive branch points.
    template <class G>
    double segment_integral(double lo, double hi, const G& g) const;

    // int_{E1}^{x} zeta along the upper lip of the upper sheet, not reduced.
    cplx abel_real(double x) const;
    JacobianPoint abel_map(const SurfacePoint& p) const;
    SurfacePoint jacobi_invert(const JacobianPoint& w) const;

    nlohmann::json to_json() const;

private:
    std::array<double, 4> E_{};
    double tol_ = 1e-12;
    double j_band_ = 0.0;
    double j_gap_ = 0.0;
    double j_left_ = 0.0; // int_{-inf}^{E1}
    double j_band2_ = 0.0;
    cplx c_;
    cplx tau_;
    double c1_ = 0.0;
    double c0_ = 0.0;
    double d_ = 0.0;
    cplx omega0_b_;
    cplx abel_infty_;
    cplx abel_inf_plus_;
    int nodes_ = 0;

    double abs_r(double x, double lo, double from_lo, double hi, double from_hi) const;
    int segment_of(double x) const; // 0: x < E1, 1..3 between, 4: x > E4
    double partial(int seg, double x) const; // int_{E_seg}^{x} for seg 1..3
    double outer_left(double x) const;       // int_x^{E1}
    double outer_right(double x) const;      // int_{E4}^{x}
    cplx abel_vertical(double x0, double y) const;
    SurfacePoint invert_on_real_line(cplx w, bool& ok) const;
    SurfacePoint invert_by_theta(cplx w) const;
    void verify_riemann_constant() const;
};

template <class G>
double TwoBandSurface::segment_integral(double lo, double hi, const G& g) const
{
    auto f = [&](double x, double from_lo, double from_hi) {
        return g(x) / abs_r(x, lo, from_lo, hi, from_hi);
    };
    return quad::sqrt_ends_adaptive(f, lo, hi, tol_).value;
}

} // namespace toda
