#pragma once

// Toda lattice in Flaschka variables on a finite window:
//   b'(n) = 2 (a(n)^2 - a(n-1)^2),   a'(n) = a(n) (b(n+1) - b(n)).
// Outside the window the lattice is continued by the constant backgrounds.

#include <iosfwd>
#include <vector>

#include "json.hpp"

namespace toda {

struct Background {
    double a = 0.5;
    double b = 0.0;

    double spectrum_lo() const { return b - 2.0 * a; }
    double spectrum_hi() const { return b + 2.0 * a; }
};

// Throws ValidationError unless a > 0 and both values are finite.
void validate(const Background& bg);

struct LatticeState {
    int n_min = 0;
    std::vector<double> a; // a(n_min), ..., a(n_max)
    std::vector<double> b;
    double t = 0.0;
    Background left;
    Background right;

    int size() const { return static_cast<int>(a.size()); }
    int n_max() const { return n_min + size() - 1; }
    bool contains(int n) const { return n >= n_min && n <= n_max(); }
    double a_at(int n) const;
    double b_at(int n) const;
};

// a, b equal to right for n >= 0 and to left for n < 0.
LatticeState make_step_initial(const Background& left, const Background& right, int n_min, int n_max);

// Uniform lattice with a single background.
LatticeState make_flat(const Background& bg, int n_min, int n_max);

struct Derivative {
    std::vector<double> da;
    std::vector<double> db;
};

// Right-hand side with background ghosts a(n_min - 1) = a_left and
// b(n_max + 1) = b_right.
Derivative toda_rhs(const LatticeState& s);

struct EvolveStats {
    long steps = 0;
    double edge_deviation = 0.0; // largest deviation seen next to the clamped sites
};

// Adaptive Dormand-Prince 5(4) with local error <= rtol |y| + atol. The two
// outermost sites stay at their background values. Throws BoundaryReached
// when a site next to the clamp drifts more than 100 atol from its
// background, StepUnderflow when the controller stalls.
LatticeState evolve(const LatticeState& s, double t_end, double rtol = 1e-10, double atol = 1e-10,
                    EvolveStats* stats = nullptr);

// Snapshots at each of the increasing times, integrating continuously.
std::vector<LatticeState> evolve_to(const LatticeState& s, const std::vector<double>& times,
                                    double rtol = 1e-10, double atol = 1e-10);

struct ConservationReport {
    double b_sum_rate = 0.0;     // 2 (a_r^2 - a_l^2)
    double log_a_sum_rate = 0.0; // b_r - b_l
    double b_sum_drift = 0.0;    // worst |finite-difference rate - target|
    double log_a_sum_drift = 0.0;
};

// Finite differences of the window sums between consecutive snapshots.
ConservationReport conservation_report(const std::vector<LatticeState>& trajectory);

// Mirror image under n -> -n: a'(m) = a(-m-1), b'(m) = -b(-m); the
// backgrounds swap with their b negated. Exact symmetry of the flow.
LatticeState reflect(const LatticeState& s);

void write_snapshot_csv(std::ostream& os, const LatticeState& s);
nlohmann::json snapshot_sidecar(const LatticeState& s, double rtol, double atol);

} // namespace toda
