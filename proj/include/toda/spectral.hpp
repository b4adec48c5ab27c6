#pragma once

// Spectral data of the Jacobi operator at t = 0: Joukovski variable, phase
// function, Jost solutions, transmission/reflection coefficients and the
// left-spectrum weight chi.

#include <complex>
#include <optional>
#include <string>
#include <vector>

#include "toda/lattice.hpp"

namespace toda {

using cplx = std::complex<double>;

enum class Sheet { Upper, Lower };

struct SurfacePoint {
    cplx lambda;
    Sheet sheet = Sheet::Upper;

    SurfacePoint flipped() const { return {lambda, sheet == Sheet::Upper ? Sheet::Lower : Sheet::Upper}; }
    bool at_infinity() const { return !std::isfinite(lambda.real()) || !std::isfinite(lambda.imag()); }
    static SurfacePoint infinity(Sheet s) { return {cplx(INFINITY, 0.0), s}; }
};

// z = w - sqrt(w^2 - 1), w = (lambda - b) / (2a), with |z| <= 1 and real
// lambda on the band taken as the limit from the upper half-plane.
cplx joukovski(cplx lambda, const Background& bg);

// 1/2 (z - 1/z) + xi log z for the background (1/2, 0); odd under the sheet
// flip. Throws ValidationError at infinity.
cplx phase_phi(const SurfacePoint& p, double xi);

enum class Multiplicity { Two, RightOnly, LeftOnly, None };

std::string to_string(Multiplicity m);
Multiplicity multiplicity(const Background& left, const Background& right, double lambda);

struct ScatteringData {
    double lambda = 0.0;
    Multiplicity multiplicity = Multiplicity::None;
    cplx T;
    std::optional<cplx> R;     // on the right spectrum
    std::optional<double> chi; // on the left-only part
    double wronskian_spread = 0.0; // relative variation of W(psi_l, psi) over the core
};

// Sites where the state departs from its backgrounds, scanning inwards from
// both ends. For a pure step this is [0, -1] (lo = 0, hi = -1).
struct Core {
    int lo;
    int hi;
};
Core perturbation_core(const LatticeState& s);

struct JostSolutions {
    int n_first = 0;
    std::vector<cplx> psi;      // ~ z_r^n to the right
    std::vector<cplx> psi_left; // ~ z_l^-n to the left
    int right_cutoff = 0;
    int left_cutoff = 0;

    cplx psi_at(int n) const { return psi[n - n_first]; }
    cplx psi_left_at(int n) const { return psi_left[n - n_first]; }
};

// Both Jost solutions on [n_lo, n_hi]. psi equals z_r^n for n >= right cutoff
// and psi_left equals z_l^-n for n <= left cutoff; the recurrence fills the
// rest. Cutoffs default to the edges of the perturbation core and may be
// moved further out. Throws BandEdge at a band edge of either background.
JostSolutions jost_solutions(const LatticeState& s0, double lambda, int n_lo, int n_hi,
                             std::optional<int> right_cutoff = std::nullopt,
                             std::optional<int> left_cutoff = std::nullopt);

// W(f, g)(n) = a(n) (f(n) g(n+1) - f(n+1) g(n)).
cplx wronskian(const LatticeState& s0, const std::vector<cplx>& f, const std::vector<cplx>& g, int n_first,
               int n);

// T = a_r (z_r - 1/z_r) / W(psi_l, psi) and R = -W(psi_l, conj psi) / W(psi_l, psi).
// lambda must lie in I_l or I_r, at least 1e-10 from the band edges.
ScatteringData scattering_data(const LatticeState& s0, double lambda);

// chi(x) = -sqrt|((x-b_l)^2 - 4a_l^2) / ((x-b_r)^2 - 4a_r^2)| |T(x)|^2 on the
// interior of I_l \ I_r.
double chi(const LatticeState& s0, double x);

// log|chi| on the closed left-only set. from_lo = x - inf I_l and
// to_hi = sup I_l - x are taken as given so the value stays accurate next to
// either edge.
double log_abs_chi(const LatticeState& s0, double x, double from_lo, double to_hi);

// Pure step (right for n >= 0, left for n < 0) by matching the free solutions
// at n = 0.
ScatteringData step_scattering_closed_form(const Background& left, const Background& right, double lambda);

} // namespace toda
