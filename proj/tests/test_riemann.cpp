#include "doctest.h"

#include <boost/math/special_functions/ellint_1.hpp>
#include <cmath>
#include <numbers>

#include "toda/errors.hpp"
#include "toda/riemann.hpp"

using namespace toda;

namespace {

constexpr double pi = std::numbers::pi;
const cplx I(0.0, 1.0);

// Period ratio from complete elliptic integrals (AGM based).
cplx tau_oracle(const std::array<double, 4>& E)
{
    const double m = (E[2] - E[1]) * (E[3] - E[0]) / ((E[3] - E[1]) * (E[2] - E[0]));
    return I * boost::math::ellint_1(std::sqrt(m)) / boost::math::ellint_1(std::sqrt(1.0 - m));
}

const std::array<double, 4> fig_surface{-2.8, -1.2, -1.0, 1.0};

} // namespace

TEST_CASE("lattice reduction")
{
    const cplx tau(0.0, 0.7);
    const cplx v(2.3, 1.5);
    const cplx r = reduce(v, tau);
    CHECK(std::abs(r.real()) <= 0.5);
    CHECK(std::abs(r.imag()) <= 0.35 + 1e-15);
    CHECK(lattice_distance(v, r, tau) < 1e-14);
    CHECK(lattice_distance(v + 3.0 - 2.0 * tau, v, tau) < 1e-14);
}

TEST_CASE("theta function identities")
{
    const cplx tau(0.0, 0.72741);
    for (cplx v : {cplx(0.1, 0.05), cplx(-0.37, 0.2), cplx(0.45, -0.9), cplx(1.7, 2.1)}) {
        const ThetaValues t = theta_all(v, tau);
        CHECK(std::abs(theta(v + 1.0, tau) - t.value) < 1e-12 * std::abs(t.value));
        const cplx shifted = std::exp(-pi * I * tau - 2.0 * pi * I * v) * t.value;
        CHECK(std::abs(theta(v + tau, tau) - shifted) < 1e-12 * std::abs(shifted));
        CHECK(std::abs(theta(-v, tau) - t.value) < 1e-12 * std::abs(t.value));
        // derivatives against centred differences
        const double h = 1e-5;
        const cplx d1 = (theta(v + h, tau) - theta(v - h, tau)) / (2.0 * h);
        const cplx d2 = (theta(v + h, tau) - 2.0 * t.value + theta(v - h, tau)) / (h * h);
        CHECK(std::abs(d1 - t.d1) < 1e-7 * (1.0 + std::abs(t.d1)));
        CHECK(std::abs(d2 - t.d2) < 1e-4 * (1.0 + std::abs(t.d2)));
        // heat equation: 4 pi i d theta / d tau = theta''
        const cplx dtau = (theta(v, tau + I * h) - theta(v, tau - I * h)) / (2.0 * I * h);
        CHECK(std::abs(4.0 * pi * I * dtau - t.d2) < 1e-4 * (1.0 + std::abs(t.d2)));
    }
    CHECK(std::abs(theta((1.0 + tau) / 2.0, tau)) < 1e-14);
    CHECK_THROWS_AS(theta(0.0, cplx(0.3, 0.0)), ValidationError);
}

TEST_CASE("period ratio matches the elliptic-integral oracle")
{
    for (const auto& E : {fig_surface, std::array<double, 4>{-2.5, -0.5, 0.5, 2.5},
                          std::array<double, 4>{-3.0, -2.0, -1.0, 1.0}, std::array<double, 4>{-1.9, -1.7, -1.0, 1.0},
                          std::array<double, 4>{0.1, 0.3, 0.31, 5.0}}) {
        const TwoBandSurface s = TwoBandSurface::build(E);
        CHECK(std::abs(s.tau() - tau_oracle(E)) < 1e-11 * std::abs(s.tau()));
        CHECK(std::abs(s.raw_a_period() * s.zeta_constant() - 1.0) < 1e-14);
    }
}

TEST_CASE("frozen surface constants")
{
    const TwoBandSurface s = TwoBandSurface::build(fig_surface);
    CHECK(s.tau().imag() == doctest::Approx(0.727414).epsilon(1e-6));
    CHECK(s.time_slope().imag() == doctest::Approx(0.437171).epsilon(1e-6));
    CHECK(std::abs(s.time_slope().real()) < 1e-14);
    CHECK(s.trace_b() == doctest::Approx(-0.259214).epsilon(1e-6));
    CHECK(s.omega0_c1() == doctest::Approx(2.0));
}

TEST_CASE("abel map at the branch points")
{
    const TwoBandSurface s = TwoBandSurface::build(fig_surface);
    const cplx tau = s.tau();
    auto at = [&](double x) { return s.abel_map({cplx(x, 0.0), Sheet::Upper}).v; };
    CHECK(lattice_distance(at(-2.8), 0.0, tau) < 1e-12);
    CHECK(lattice_distance(at(-1.2), 0.5, tau) < 1e-12);
    CHECK(lattice_distance(at(-1.0), 0.5 + tau / 2.0, tau) < 1e-11);
    CHECK(lattice_distance(at(1.0), tau / 2.0, tau) < 1e-11);
    CHECK(std::abs(s.abel_real(-1.2) - 0.5) < 1e-12);
}

TEST_CASE("shift vector representatives agree mod the lattice")
{
    for (const auto& E : {fig_surface, std::array<double, 4>{-2.5, -0.5, 0.5, 2.5}}) {
        const TwoBandSurface s = TwoBandSurface::build(E);
        CHECK(lattice_distance(2.0 * s.abel_infinity_plus(), s.abel_infty(), s.tau()) < 1e-10);
        CHECK(lattice_distance(s.abel_map(SurfacePoint::infinity(Sheet::Upper)).v, s.abel_infinity_plus(),
                               s.tau()) < 1e-10);
    }
}

TEST_CASE("symmetric surface has the half-period shift")
{
    const TwoBandSurface s = TwoBandSurface::build({-2.5, -0.5, 0.5, 2.5});
    CHECK(lattice_distance(s.abel_infty(), s.tau() / 2.0, s.tau()) < 1e-10);
}

TEST_CASE("abel map round trip")
{
    const TwoBandSurface s = TwoBandSurface::build(fig_surface);
    const SurfacePoint pts[] = {{cplx(-2.0, 0.3), Sheet::Upper}, {cplx(0.4, -0.7), Sheet::Lower},
                                {cplx(-1.1, 0.0), Sheet::Upper}, {cplx(-1.1, 0.0), Sheet::Lower},
                                {cplx(-3.5, 0.0), Sheet::Lower}, {cplx(2.0, 1.0), Sheet::Upper},
                                {cplx(5.0, 0.0), Sheet::Upper},  {cplx(-0.3, 0.2), Sheet::Lower}};
    for (const SurfacePoint& p : pts) {
        const SurfacePoint q = s.jacobi_invert(s.abel_map(p));
        CHECK(std::abs(q.lambda - p.lambda) < 1e-8);
        CHECK(q.sheet == p.sheet);
    }
}

TEST_CASE("abel map is odd under the sheet flip and agrees with quadrature of zeta")
{
    const TwoBandSurface s = TwoBandSurface::build(fig_surface);
    const SurfacePoint p{cplx(-0.6, 0.8), Sheet::Upper};
    CHECK(lattice_distance(s.abel_map(p).v, -s.abel_map(p.flipped()).v, s.tau()) < 1e-11);
    // d/dlambda of the Abel map equals zeta.
    const double h = 1e-6;
    const cplx d = (s.abel_map({p.lambda + h, Sheet::Upper}).v - s.abel_map({p.lambda - h, Sheet::Upper}).v) /
                   (2.0 * h);
    CHECK(std::abs(d - s.zeta(p.lambda)) < 1e-7);
}

TEST_CASE("omega0 normalization")
{
    const TwoBandSurface s = TwoBandSurface::build(fig_surface);
    // zero a-period: twice the band integral of the upper-lip value
    auto f = [&](double x) { return (x * x + s.omega0_c1() * x + s.omega0_c0()); };
    CHECK(std::abs(s.segment_integral(-2.8, -1.2, f)) < 1e-11);
}

TEST_CASE("surface validation")
{
    CHECK_THROWS_AS(TwoBandSurface::build({-1.0, -2.0, 0.0, 1.0}), ValidationError);
    CHECK_THROWS_AS(TwoBandSurface::build({-2.0, -2.0 + 1e-12, 0.0, 1.0}), DegenerateSurface);
    CHECK_THROWS_AS(TwoBandSurface::build({-2.0, NAN, 0.0, 1.0}), ValidationError);
    const auto j = TwoBandSurface::build(fig_surface).to_json();
    CHECK(j.contains("tau"));
}
