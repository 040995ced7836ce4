// state.hpp
// Two-photon time-bin states, reference states, fidelity, and
// entanglement-dimension thresholds.
//
// Mode layout: single-photon flat index m = 2*(bin-1) + loop with
// loop Short = 0, Long = 1.  Joint index = m_signal * n_modes + m_idler.

#pragma once

#include <vector>

#include "tbcert/common.hpp"

namespace tbcert {

enum class Loop : int { Short = 0, Long = 1 };

struct PhotonMode {
    int bin = 1;  // 1-based time bin
    Loop loop = Loop::Short;

    bool operator==(const PhotonMode& o) const { return bin == o.bin && loop == o.loop; }
};

inline int mode_index(int bin, Loop loop) { return 2 * (bin - 1) + static_cast<int>(loop); }
inline int mode_index(const PhotonMode& m) { return mode_index(m.bin, m.loop); }
inline PhotonMode mode_from_index(int idx) {
    return PhotonMode{idx / 2 + 1, static_cast<Loop>(idx % 2)};
}

// Dense Hermitian density matrix over the joint (bin, loop) modes of the
// signal and idler photons.  Immutable after construction.
class TwoPhotonState {
  public:
    static constexpr double kDefaultTraceTol = 1e-10;

    // Takes ownership of rho; validates Hermiticity, unit trace and
    // positivity within trace_tol.
    TwoPhotonState(int n_bins, Matrix rho, double trace_tol = kDefaultTraceTol);

    int n_bins() const { return n_bins_; }
    int n_modes() const { return 2 * n_bins_; }      // single-photon modes
    int joint_dim() const { return n_modes() * n_modes(); }
    double trace_tol() const { return trace_tol_; }
    const Matrix& matrix() const { return rho_; }

    // <m1 m2| rho |m3 m4> over explicit photon modes.
    cxd element(const PhotonMode& m1, const PhotonMode& m2, const PhotonMode& m3,
                const PhotonMode& m4) const;
    // <ij| rho |kl> with all photons in the Short loop (time-bin basis).
    cxd bin_element(int i, int j, int k, int l) const;

    double purity() const;

    // Same state embedded in a larger bin space (amplitudes unchanged).
    TwoPhotonState embedded(int n_bins_total) const;

    // V rho V^dagger with V = sum_ij exp(i(phi_i + phi_j)) |ij><ij| acting on
    // bins; loop labels are untouched.  phi is indexed by bin and may be
    // shorter than n_bins (remaining bins get phase 0).
    TwoPhotonState with_phase_imprint(const RealVector& phi) const;

    // Convex mixture with the maximally mixed state on the two-photon bin
    // subspace (both photons Short), per the effective dephasing channel.
    TwoPhotonState dephased(double alpha_mix) const;

    // Spectral ensemble {weight, pure vector}; eigenvalues below tol dropped.
    std::vector<std::pair<double, Vector>> ensemble(double tol = 1e-13) const;

    std::string to_json() const;
    static TwoPhotonState from_json(const std::string& text);

  private:
    int n_bins_;
    double trace_tol_;
    Matrix rho_;
};

// |Psi(alpha, phi)> = sum_j alpha_j e^{2 i phi_j} |jj>, all modes Short,
// embedded in an n_bins-bins mode space (n_bins >= len(alpha)).
TwoPhotonState make_pure_state(const Vector& alpha, const RealVector& phi, int n_bins = 0);

// Smaller root x of (1-x)^2 + x(2-x)/dim = purity.
double alpha_for_purity(double purity, int dim);

// Reference state |Psi_ref(lambda)> = sum_i lambda_i |ii>.
class ReferenceState {
  public:
    explicit ReferenceState(Vector lambdas);

    static ReferenceState mes(int n);

    int size() const { return static_cast<int>(lambdas_.size()); }
    const Vector& lambdas() const { return lambdas_; }
    bool is_real(double tol = 1e-12) const;

    // b[k] = sum of the k largest |lambda_i|^2, k = 1..N.
    std::vector<double> schmidt_thresholds() const;

  private:
    Vector lambdas_;
};

// F = sum_ij conj(lambda_i) lambda_j <ii|rho|jj>.
double fidelity(const TwoPhotonState& state, const ReferenceState& ref);

// Largest d with fid_bound > B_{d-1} (B_0 = 0); clamped to [1, N].
int certified_dimension(double fid_bound, const ReferenceState& ref);

}  // namespace tbcert
