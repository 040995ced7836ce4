// walk.hpp
// Coin, shift and phase-imprint operators; composition and propagation of
// two-photon states through a walk program with optional coupler-angle noise.
//
// One round trip applies U_m = S_m C_m: the per-bin coin first, then the
// shift that delays Long-loop amplitude by one bin.  The same single-photon
// unitary acts on signal and idler.

#pragma once

#include <cstdint>
#include <vector>

#include "tbcert/state.hpp"

namespace tbcert {

struct WalkProgram {
    int n_bins_in = 0;
    int depth = 0;          // number of round trips M
    int n_bins_total = 0;   // >= n_bins_in + depth, so shifts cannot overflow
    RealMatrix angles;      // depth x n_bins_total, theta in [0, pi/2]
    RealVector phase_imprint;  // pre-walk phases over input bins (may be empty)

    void validate() const;
    std::string to_json() const;
    static WalkProgram from_json(const std::string& text);
};

// Uniform coupler-angle noise: each realized angle is drawn from
// [theta - half_width, theta + half_width], clamped to [0, pi/2].
struct CouplerNoise {
    double half_width = 0.0;
    bool enabled = false;
    std::uint64_t seed = 0;
};

// [[cos t, i sin t], [i sin t, cos t]] on {Short, Long}.
Eigen::Matrix2cd coin_single(double theta);

// Per-(round, bin) angles after noise sampling; one draw per cell in
// row-major order, so a fixed seed gives a fixed realization.
RealMatrix realize_angles(const WalkProgram& program, const CouplerNoise& noise,
                          std::uint64_t rng_seed);

// Composed single-photon walk unitary on the 2*n_bins_total mode space.
// Throws OverflowError if the composition is not an isometry on the
// retained space (amplitude would shift past the last bin).
Matrix single_photon_unitary(const WalkProgram& program, const RealMatrix& angles);
Matrix single_photon_unitary(const WalkProgram& program);  // nominal angles

// Diagonal of the two-photon phase imprint V = sum e^{i(phi_i+phi_j)}|ij><ij|
// over a mode space with n_bins bins (loop labels untouched).
Vector phase_imprint_diag(const RealVector& phi, int n_bins);

// rho_out = (U (x) U) V rho V^dag (U (x) U)^dag with V the program's
// phase imprint.  The input state is embedded into the program's padded
// mode space first.  Trace is preserved within 1e-10.
TwoPhotonState propagate(const TwoPhotonState& state, const WalkProgram& program,
                         const CouplerNoise& noise = {}, std::uint64_t rng_seed = 0);

struct Outcome {
    PhotonMode signal;
    PhotonMode idler;
    double p;
};

// Diagonal readout p(m_s, m_i).  Small negatives (>= -1e-10) are clamped to
// zero and the map renormalized; worse deficits raise ValidationError.
std::vector<Outcome> outcome_distribution(const TwoPhotonState& state);

// Probability vector over joint output modes of the walk, computed from the
// state's spectral ensemble without materializing the output density matrix.
// Equals outcome_distribution(propagate(...)) up to numerical noise.
RealVector walk_output_distribution(const TwoPhotonState& state, const WalkProgram& program,
                                    const CouplerNoise& noise = {}, std::uint64_t rng_seed = 0);

// Observable U^dag P U restricted to the time-bin input subspace (both
// photons Short, bins 1..n_bins_in), with P the projector onto the given
// joint output modes.  Entry (ij, kl) multiplies <ij|rho|kl> in
// tr[P U rho U^dag]; indices are (i-1)*n_bins_in + (j-1).
Matrix backpropagated_observable(const WalkProgram& program, const RealMatrix& angles,
                                 const std::vector<std::pair<PhotonMode, PhotonMode>>& ports);

// Expectation tr[O rho] of a bin-subspace observable against a state.
double observable_expectation(const Matrix& obs, const TwoPhotonState& state);

}  // namespace tbcert
