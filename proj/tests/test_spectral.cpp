#include "doctest.h"

#include <cmath>

#include "toda/errors.hpp"
#include "toda/spectral.hpp"

using namespace toda;

namespace {

const Background unit{0.5, 0.0};

LatticeState bumped()
{
    LatticeState s = make_step_initial({0.4, -2.0}, unit, -8, 8);
    s.a[8] = 0.9;  // n = 0
    s.b[7] = -1.1; // n = -1
    s.b[10] = 0.2; // n = 2
    return s;
}

} // namespace

TEST_CASE("joukovski variable")
{
    for (cplx l : {cplx(2.5, 0.0), cplx(-3.0, 0.0), cplx(0.3, 0.7), cplx(-0.2, -1.5)}) {
        const cplx z = joukovski(l, unit);
        CHECK(std::abs(z) < 1.0);
        CHECK(std::abs(0.5 * (z + 1.0 / z) - l) < 1e-13);
    }
    // On the band: unimodular, upper-lip value has Im z < 0 for z = w - i sqrt(1 - w^2).
    const cplx z = joukovski(cplx(0.3, 0.0), unit);
    CHECK(std::abs(z) == doctest::Approx(1.0).epsilon(1e-14));
    CHECK(z.real() == doctest::Approx(0.3));
    CHECK(std::abs(z - joukovski(cplx(0.3, 1e-12), unit)) < 1e-9);
    // Scaling with the background.
    const Background bg{0.4, -2.0};
    CHECK(std::abs(joukovski(cplx(-2.4, 0.3), bg) - joukovski(cplx(-0.5, 0.375), unit)) < 1e-14);
}

TEST_CASE("phase function is odd under the sheet flip")
{
    const SurfacePoint p{cplx(1.7, 0.4), Sheet::Upper};
    CHECK(std::abs(phase_phi(p, 0.3) + phase_phi(p.flipped(), 0.3)) < 1e-15);
    CHECK_THROWS_AS(phase_phi(SurfacePoint::infinity(Sheet::Upper), 0.0), ValidationError);
}

TEST_CASE("spectral multiplicity")
{
    const Background l{1.0, -2.0};
    CHECK(multiplicity(l, unit, -0.5) == Multiplicity::Two);
    CHECK(multiplicity(l, unit, 0.5) == Multiplicity::RightOnly);
    CHECK(multiplicity(l, unit, -3.0) == Multiplicity::LeftOnly);
    CHECK(multiplicity(l, unit, 1.5) == Multiplicity::None);
    CHECK(to_string(Multiplicity::LeftOnly) == "left");
}

TEST_CASE("perturbation core")
{
    const LatticeState step = make_step_initial({0.4, -2.0}, unit, -6, 6);
    const Core c = perturbation_core(step);
    CHECK(c.lo == 0);
    CHECK(c.hi == -1);
    const Core d = perturbation_core(bumped());
    CHECK(d.lo == -1);
    CHECK(d.hi == 2);
}

TEST_CASE("closed form matches the recurrence for a pure step")
{
    const Background l{1.0, -2.0};
    const LatticeState s = make_step_initial(l, unit, -6, 6);
    for (double lambda : {-0.5, -1.7, 0.4, -3.2}) {
        const ScatteringData rec = scattering_data(s, lambda);
        const ScatteringData cf = step_scattering_closed_form(l, unit, lambda);
        CHECK(rec.multiplicity == cf.multiplicity);
        CHECK(std::abs(rec.T - cf.T) < 1e-12);
        if (cf.R)
            CHECK(std::abs(*rec.R - *cf.R) < 1e-12);
        if (cf.chi)
            CHECK(*rec.chi == doctest::Approx(*cf.chi).epsilon(1e-12));
    }
}

TEST_CASE("frozen transmission coefficient")
{
    // (1, -2) at lambda = -0.5 from the closed form, frozen.
    const ScatteringData d = step_scattering_closed_form({1.0, -2.0}, unit, -0.5);
    const cplx zr = joukovski(-0.5, unit);
    const cplx zl = joukovski(-0.5, Background{1.0, -2.0});
    CHECK(std::abs(d.T - 0.5 * (zr - 1.0 / zr) / (zl - 0.5 / zr)) < 1e-15);
    CHECK(std::abs(std::norm(d.T) * std::abs(std::sin(std::arg(zl))) / std::abs(std::sin(std::arg(zr))) * 2.0 +
                   std::norm(*d.R) - 1.0) < 1e-12);
}

TEST_CASE("scattering relation T psi_l = conj(psi) + R psi")
{
    const LatticeState s = bumped();
    for (double lambda : {-0.95, -0.7, 0.2, 0.8}) {
        const JostSolutions j = jost_solutions(s, lambda, -6, 6);
        const ScatteringData d = scattering_data(s, lambda);
        REQUIRE(d.R);
        for (int n = -6; n <= 6; ++n) {
            const cplx lhs = d.T * j.psi_left_at(n);
            const cplx rhs = std::conj(j.psi_at(n)) + *d.R * j.psi_at(n);
            CHECK(std::abs(lhs - rhs) < 1e-10 * (1.0 + std::abs(lhs)));
        }
    }
}

TEST_CASE("reflection is unimodular on the right-only spectrum")
{
    for (const LatticeState& s : {make_step_initial({0.4, -2.0}, unit, -6, 6), bumped()})
        for (double lambda : {-0.99, -0.4, 0.0, 0.6, 0.99})
            CHECK(std::abs(*scattering_data(s, lambda).R) == doctest::Approx(1.0).epsilon(1e-12));
}

TEST_CASE("wronskian is constant in n")
{
    const LatticeState s = bumped();
    for (double lambda : {-2.6, -1.5, -0.3, 0.7})
        CHECK(scattering_data(s, lambda).wronskian_spread < 1e-12);
}

TEST_CASE("moving the Jost cutoffs outward changes nothing")
{
    const LatticeState s = bumped();
    const JostSolutions a = jost_solutions(s, -0.4, -5, 5);
    const JostSolutions b = jost_solutions(s, -0.4, -5, 5, 6, -4);
    for (int n = -5; n <= 5; ++n) {
        CHECK(std::abs(a.psi_at(n) - b.psi_at(n)) < 1e-12);
        CHECK(std::abs(a.psi_left_at(n) - b.psi_left_at(n)) < 1e-12);
    }
    CHECK_THROWS_AS(jost_solutions(s, -0.4, -5, 5, 1), ValidationError);
}

TEST_CASE("chi on the left-only spectrum")
{
    const LatticeState s = make_step_initial({0.4, -2.0}, unit, -6, 6);
    for (double x : {-2.7, -2.0, -1.3}) {
        const double c = chi(s, x);
        CHECK(c < 0.0);
        CHECK(std::log(-c) == doctest::Approx(log_abs_chi(s, x, x + 2.8, -1.2 - x)).epsilon(1e-12));
    }
    CHECK_THROWS_AS(chi(s, 0.0), ValidationError);
    CHECK_THROWS_AS(chi(s, -2.8), ValidationError);
    // log|chi| stays finite right next to the band edges.
    CHECK(std::isfinite(log_abs_chi(s, -2.8 + 1e-300, 1e-300, 1.6)));
}

TEST_CASE("domain errors")
{
    const LatticeState s = make_step_initial({0.4, -2.0}, unit, -6, 6);
    CHECK_THROWS_AS(scattering_data(s, 1.5), ValidationError);
    CHECK_THROWS_AS(scattering_data(s, -1.0), BandEdge);
    CHECK_THROWS_AS(scattering_data(s, -1.2), BandEdge);
}
