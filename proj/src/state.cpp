#include "tbcert/state.hpp"

#include <algorithm>
#include <cmath>

#include <Eigen/Eigenvalues>
#include <json.hpp>

namespace tbcert {

namespace {

void validate_density_matrix(const Matrix& rho, double tol) {
    if (rho.rows() != rho.cols()) throw DimensionError("density matrix must be square");
    double herm_defect = (rho - rho.adjoint()).cwiseAbs().maxCoeff();
    if (herm_defect > tol)
        throw ValidationError("density matrix not Hermitian (defect " +
                              std::to_string(herm_defect) + ")");
    double tr_defect = std::abs(rho.trace() - cxd(1.0, 0.0));
    if (tr_defect > tol)
        throw ValidationError("density matrix trace != 1 (defect " +
                              std::to_string(tr_defect) + ")");
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho, Eigen::EigenvaluesOnly);
    double min_ev = es.eigenvalues().minCoeff();
    if (min_ev < -tol)
        throw ValidationError("density matrix not PSD (min eigenvalue " +
                              std::to_string(min_ev) + ")");
}

}  // namespace

TwoPhotonState::TwoPhotonState(int n_bins, Matrix rho, double trace_tol)
    : n_bins_(n_bins), trace_tol_(trace_tol), rho_(std::move(rho)) {
    if (n_bins_ < 1) throw DimensionError("n_bins must be >= 1");
    const int d = joint_dim();
    if (rho_.rows() != d || rho_.cols() != d)
        throw DimensionError("density matrix dimension does not match mode space");
    validate_density_matrix(rho_, trace_tol_);
}

cxd TwoPhotonState::element(const PhotonMode& m1, const PhotonMode& m2, const PhotonMode& m3,
                            const PhotonMode& m4) const {
    const int m = n_modes();
    for (const auto& pm : {m1, m2, m3, m4})
        if (pm.bin < 1 || pm.bin > n_bins_) throw DimensionError("photon mode bin out of range");
    return rho_(mode_index(m1) * m + mode_index(m2), mode_index(m3) * m + mode_index(m4));
}

cxd TwoPhotonState::bin_element(int i, int j, int k, int l) const {
    return element({i, Loop::Short}, {j, Loop::Short}, {k, Loop::Short}, {l, Loop::Short});
}

double TwoPhotonState::purity() const { return (rho_ * rho_).trace().real(); }

TwoPhotonState TwoPhotonState::embedded(int n_bins_total) const {
    if (n_bins_total < n_bins_) throw DimensionError("cannot embed into a smaller bin space");
    if (n_bins_total == n_bins_) return *this;
    const int m_old = n_modes();
    const int m_new = 2 * n_bins_total;
    Matrix rho(m_new * m_new, m_new * m_new);
    rho.setZero();
    for (int a = 0; a < m_old; ++a)
        for (int b = 0; b < m_old; ++b)
            for (int c = 0; c < m_old; ++c)
                for (int d = 0; d < m_old; ++d)
                    rho(a * m_new + b, c * m_new + d) = rho_(a * m_old + b, c * m_old + d);
    return TwoPhotonState(n_bins_total, std::move(rho), trace_tol_);
}

TwoPhotonState TwoPhotonState::with_phase_imprint(const RealVector& phi) const {
    if (phi.size() > n_bins_) throw DimensionError("phase vector longer than bin space");
    const int m = n_modes();
    Vector diag(m * m);
    auto bin_phase = [&](int mode) {
        int bin = mode / 2;  // 0-based
        return bin < phi.size() ? phi[bin] : 0.0;
    };
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            diag[a * m + b] = std::exp(cxd(0.0, bin_phase(a) + bin_phase(b)));
    Matrix rho = diag.asDiagonal() * rho_ * diag.conjugate().asDiagonal();
    return TwoPhotonState(n_bins_, std::move(rho), trace_tol_);
}

TwoPhotonState TwoPhotonState::dephased(double alpha_mix) const {
    if (alpha_mix < 0.0 || alpha_mix > 1.0)
        throw ValidationError("dephasing mixture parameter must lie in [0, 1]");
    const int m = n_modes();
    Matrix rho = (1.0 - alpha_mix) * rho_;
    const double w = alpha_mix / static_cast<double>(n_bins_ * n_bins_);
    for (int i = 1; i <= n_bins_; ++i)
        for (int j = 1; j <= n_bins_; ++j) {
            int x = mode_index(i, Loop::Short) * m + mode_index(j, Loop::Short);
            rho(x, x) += w;
        }
    return TwoPhotonState(n_bins_, std::move(rho), trace_tol_);
}

std::vector<std::pair<double, Vector>> TwoPhotonState::ensemble(double tol) const {
    Eigen::SelfAdjointEigenSolver<Matrix> es(rho_);
    std::vector<std::pair<double, Vector>> out;
    for (int k = 0; k < es.eigenvalues().size(); ++k) {
        double w = es.eigenvalues()[k];
        if (w > tol) out.emplace_back(w, es.eigenvectors().col(k));
    }
    return out;
}

std::string TwoPhotonState::to_json() const {
    nlohmann::json j;
    j["n_bins"] = n_bins_;
    j["n_modes"] = n_modes();
    nlohmann::json rows = nlohmann::json::array();
    const int d = joint_dim();
    for (int r = 0; r < d; ++r) {
        nlohmann::json row = nlohmann::json::array();
        for (int c = 0; c < d; ++c)
            row.push_back({rho_(r, c).real(), rho_(r, c).imag()});
        rows.push_back(std::move(row));
    }
    j["matrix"] = std::move(rows);
    return j.dump();
}

TwoPhotonState TwoPhotonState::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    int n_bins = j.at("n_bins").get<int>();
    int n_modes = j.at("n_modes").get<int>();
    if (n_modes != 2 * n_bins) throw ValidationError("state JSON: n_modes != 2*n_bins");
    const int d = n_modes * n_modes;
    const auto& rows = j.at("matrix");
    if (static_cast<int>(rows.size()) != d)
        throw ValidationError("state JSON: matrix row count mismatch");
    Matrix rho(d, d);
    for (int r = 0; r < d; ++r) {
        const auto& row = rows.at(r);
        if (static_cast<int>(row.size()) != d)
            throw ValidationError("state JSON: matrix column count mismatch");
        for (int c = 0; c < d; ++c)
            rho(r, c) = cxd(row.at(c).at(0).get<double>(), row.at(c).at(1).get<double>());
    }
    return TwoPhotonState(n_bins, std::move(rho));
}

TwoPhotonState make_pure_state(const Vector& alpha, const RealVector& phi, int n_bins) {
    const int n = static_cast<int>(alpha.size());
    if (n < 1) throw DimensionError("alpha must be nonempty");
    if (phi.size() != n) throw DimensionError("phi length must match alpha length");
    if (n_bins == 0) n_bins = n;
    if (n > n_bins) throw DimensionError("alpha length exceeds declared mode space");
    if (std::abs(alpha.norm() - 1.0) > 1e-12)
        throw ValidationError("alpha must be normalized");

    const int m = 2 * n_bins;
    Vector psi(m * m);
    psi.setZero();
    for (int jbin = 1; jbin <= n; ++jbin) {
        int mi = mode_index(jbin, Loop::Short);
        psi[mi * m + mi] = alpha[jbin - 1] * std::exp(cxd(0.0, 2.0 * phi[jbin - 1]));
    }
    Matrix rho = psi * psi.adjoint();
    return TwoPhotonState(n_bins, std::move(rho));
}

double alpha_for_purity(double purity, int dim) {
    if (dim < 1) throw DimensionError("dim must be >= 1");
    const double floor = 1.0 / static_cast<double>(dim);
    if (purity > 1.0 + 1e-12 || purity < floor - 1e-12)
        throw ValidationError("purity outside achievable range [1/dim, 1]");
    if (dim == 1) return 0.0;
    // (1-x)^2 + x(2-x)/dim = p  <=>  x^2 - 2x + (1-p)/(1-1/dim) = 0
    const double q = (1.0 - purity) / (1.0 - floor);
    const double disc = std::max(0.0, 1.0 - q);
    return 1.0 - std::sqrt(disc);
}

ReferenceState::ReferenceState(Vector lambdas) : lambdas_(std::move(lambdas)) {
    if (lambdas_.size() < 1) throw DimensionError("reference state must be nonempty");
    if (std::abs(lambdas_.norm() - 1.0) > 1e-12)
        throw ValidationError("reference Schmidt vector must have unit norm");
}

ReferenceState ReferenceState::mes(int n) {
    Vector l(n);
    l.setConstant(cxd(1.0 / std::sqrt(static_cast<double>(n)), 0.0));
    return ReferenceState(std::move(l));
}

bool ReferenceState::is_real(double tol) const {
    for (int i = 0; i < lambdas_.size(); ++i)
        if (std::abs(lambdas_[i].imag()) > tol) return false;
    return true;
}

std::vector<double> ReferenceState::schmidt_thresholds() const {
    std::vector<double> sq(size());
    for (int i = 0; i < size(); ++i) sq[i] = std::norm(lambdas_[i]);
    std::sort(sq.begin(), sq.end(), std::greater<double>());
    std::vector<double> b(size());
    double acc = 0.0;
    for (int k = 0; k < size(); ++k) {
        acc += sq[k];
        b[k] = acc;
    }
    return b;
}

double fidelity(const TwoPhotonState& state, const ReferenceState& ref) {
    if (ref.size() > state.n_bins())
        throw DimensionError("reference state larger than the state's bin space");
    cxd f(0.0, 0.0);
    for (int i = 1; i <= ref.size(); ++i)
        for (int j = 1; j <= ref.size(); ++j)
            f += std::conj(ref.lambdas()[i - 1]) * ref.lambdas()[j - 1] *
                 state.bin_element(i, i, j, j);
    return f.real();
}

int certified_dimension(double fid_bound, const ReferenceState& ref) {
    if (!std::isfinite(fid_bound)) throw ValidationError("fidelity bound must be finite");
    auto b = ref.schmidt_thresholds();
    int d = 1;
    for (int k = 1; k < ref.size() + 1; ++k) {
        // dimension k+... : fid > B_k certifies dimension k+1
        if (k <= ref.size() - 1 && fid_bound > b[k - 1]) d = k + 1;
    }
    return std::min(std::max(d, 1), ref.size());
}

}  // namespace tbcert
