#include "doctest.h"

#include <cmath>
#include <sstream>

#include "toda/errors.hpp"
#include "toda/lattice.hpp"

using namespace toda;

namespace {

LatticeState bumped(int half)
{
    LatticeState s = make_step_initial({1.0, -2.0}, {0.5, 0.0}, -half, half);
    s.a[half - 1] = 0.8;
    s.b[half + 1] = 0.3;
    return s;
}

} // namespace

TEST_CASE("backgrounds are validated")
{
    CHECK_THROWS_AS(validate(Background{0.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(validate(Background{-1.0, 0.0}), ValidationError);
    CHECK_THROWS_AS(validate(Background{NAN, 0.0}), ValidationError);
    CHECK_NOTHROW(validate(Background{0.3, 4.0}));
    CHECK(Background{0.4, -2.0}.spectrum_lo() == doctest::Approx(-2.8));
    CHECK(Background{0.4, -2.0}.spectrum_hi() == doctest::Approx(-1.2));
}

TEST_CASE("step initial data")
{
    const LatticeState s = make_step_initial({1.0, -2.0}, {0.5, 0.0}, -5, 5);
    CHECK(s.size() == 11);
    CHECK(s.a_at(-1) == 1.0);
    CHECK(s.a_at(0) == 0.5);
    CHECK(s.b_at(-1) == -2.0);
    CHECK(s.b_at(0) == 0.0);
    CHECK(s.a_at(-100) == 1.0);
    CHECK(s.b_at(100) == 0.0);
    CHECK_THROWS_AS(make_step_initial({1.0, -2.0}, {0.5, 0.0}, -1, 5), ValidationError);
    CHECK_THROWS_AS(make_step_initial({1.0, -2.0}, {0.5, 0.0}, -5, 1), ValidationError);
}

TEST_CASE("right-hand side at the step")
{
    const LatticeState s = make_step_initial({1.0, -2.0}, {0.5, 0.0}, -4, 4);
    const Derivative d = toda_rhs(s);
    // b'(0) = 2 (a(0)^2 - a(-1)^2), a'(-1) = a(-1) (b(0) - b(-1))
    CHECK(d.db[4] == doctest::Approx(2.0 * (0.25 - 1.0)));
    CHECK(d.da[3] == doctest::Approx(1.0 * (0.0 + 2.0)));
    for (int i : {0, 1, 2, 6, 7, 8}) {
        CHECK(d.da[i] == 0.0);
        CHECK(d.db[i] == 0.0);
    }
}

TEST_CASE("flat lattice is stationary")
{
    const LatticeState s = make_flat({0.7, 0.2}, -10, 10);
    const LatticeState e = evolve(s, 5.0);
    for (int i = 0; i < e.size(); ++i) {
        CHECK(e.a[i] == doctest::Approx(0.7).epsilon(1e-14));
        CHECK(e.b[i] == doctest::Approx(0.2).epsilon(1e-14));
    }
}

TEST_CASE("evolution commutes with the reflection symmetry")
{
    const LatticeState s = bumped(40);
    const LatticeState direct = reflect(evolve(s, 6.0, 1e-12, 1e-12));
    const LatticeState mirrored = evolve(reflect(s), 6.0, 1e-12, 1e-12);
    REQUIRE(direct.n_min == mirrored.n_min);
    double worst = 0.0;
    for (int i = 0; i < direct.size(); ++i)
        worst = std::max({worst, std::abs(direct.a[i] - mirrored.a[i]), std::abs(direct.b[i] - mirrored.b[i])});
    CHECK(worst < 1e-9);
}

TEST_CASE("tolerance refinement converges")
{
    const LatticeState s = bumped(40);
    const LatticeState coarse = evolve(s, 5.0, 1e-8, 1e-8);
    const LatticeState fine = evolve(s, 5.0, 1e-12, 1e-12);
    double worst = 0.0;
    for (int i = 0; i < s.size(); ++i)
        worst = std::max({worst, std::abs(coarse.a[i] - fine.a[i]), std::abs(coarse.b[i] - fine.b[i])});
    CHECK(worst < 1e-6);
    CHECK(fine.t == 5.0);
}

TEST_CASE("window sums follow the telescoped rates")
{
    const double rtol = 1e-10;
    const LatticeState s0 = make_step_initial({1.0, -2.0}, {0.5, 0.0}, -50, 50);
    std::vector<LatticeState> traj{s0};
    for (LatticeState& s : evolve_to(s0, {1.0, 2.0, 4.0, 8.0}, rtol, rtol))
        traj.push_back(std::move(s));
    const ConservationReport c = conservation_report(traj);
    CHECK(c.b_sum_rate == doctest::Approx(2.0 * (0.25 - 1.0)));
    CHECK(c.log_a_sum_rate == doctest::Approx(2.0));
    CHECK(c.b_sum_drift <= 10.0 * rtol * s0.size());
    CHECK(c.log_a_sum_drift <= 10.0 * rtol * s0.size());
}

TEST_CASE("front reaching the clamped edge aborts")
{
    const LatticeState s = make_step_initial({1.0, -2.0}, {0.5, 0.0}, -8, 8);
    CHECK_THROWS_AS(evolve(s, 30.0), BoundaryReached);
}

TEST_CASE("positivity and monotone snapshot times are enforced")
{
    const LatticeState s = make_step_initial({1.0, -2.0}, {0.5, 0.0}, -20, 20);
    CHECK_THROWS_AS(evolve_to(s, {2.0, 1.0}), ValidationError);
}

TEST_CASE("reflection maps backgrounds and is an involution")
{
    const LatticeState s = bumped(6);
    const LatticeState r = reflect(s);
    CHECK(r.left.a == 0.5);
    CHECK(r.left.b == 0.0);
    CHECK(r.right.a == 1.0);
    CHECK(r.right.b == 2.0);
    CHECK(r.a_at(0) == s.a_at(-1));
    CHECK(r.b_at(3) == -s.b_at(-3));
    const LatticeState rr = reflect(r);
    CHECK(rr.n_min == s.n_min);
    CHECK(rr.a == s.a);
    for (int i = 0; i < s.size(); ++i)
        CHECK(rr.b[i] == doctest::Approx(s.b[i]));
}

TEST_CASE("snapshot export")
{
    const LatticeState s = make_step_initial({1.0, -2.0}, {0.5, 0.0}, -2, 2);
    std::ostringstream os;
    write_snapshot_csv(os, s);
    CHECK(os.str() == "n,a,b\n-2,1,-2\n-1,1,-2\n0,0.5,0\n1,0.5,0\n2,0.5,0\n");
    const auto j = snapshot_sidecar(s, 1e-10, 1e-11);
    CHECK(j.at("a_left") == 1.0);
    CHECK(j.at("b_left") == -2.0);
    CHECK(j.at("a_right") == 0.5);
    CHECK(j.at("b_right") == 0.0);
    CHECK(j.at("rtol") == 1e-10);
    CHECK(j.at("atol") == 1e-11);
    CHECK(j.contains("t"));
}
