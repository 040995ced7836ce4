#include "tbcert/walk.hpp"

#include <algorithm>
#include <cmath>

#include <json.hpp>

namespace tbcert {

void WalkProgram::validate() const {
    if (n_bins_in < 1) throw ValidationError("walk program needs at least one input bin");
    if (depth < 0) throw ValidationError("walk depth must be >= 0");
    if (n_bins_total < n_bins_in)
        throw ValidationError("n_bins_total must cover the input bins");
    if (angles.rows() != depth || angles.cols() != n_bins_total)
        throw DimensionError("angle table must be depth x n_bins_total");
    if (depth > 0) {
        double lo = angles.minCoeff(), hi = angles.maxCoeff();
        if (lo < -1e-12 || hi > kPi / 2 + 1e-12)
            throw ValidationError("coupler angles must lie in [0, pi/2]");
    }
    if (phase_imprint.size() > n_bins_in)
        throw DimensionError("phase imprint longer than input bins");
}

std::string WalkProgram::to_json() const {
    nlohmann::json j;
    j["n_bins_in"] = n_bins_in;
    j["depth"] = depth;
    j["n_bins_total"] = n_bins_total;
    nlohmann::json a = nlohmann::json::array();
    for (int r = 0; r < angles.rows(); ++r)
        for (int c = 0; c < angles.cols(); ++c) a.push_back(angles(r, c));
    j["angles"] = std::move(a);
    nlohmann::json p = nlohmann::json::array();
    for (int i = 0; i < phase_imprint.size(); ++i) p.push_back(phase_imprint[i]);
    j["phase_imprint"] = std::move(p);
    return j.dump();
}

WalkProgram WalkProgram::from_json(const std::string& text) {
    nlohmann::json j = nlohmann::json::parse(text);
    WalkProgram prog;
    prog.n_bins_in = j.at("n_bins_in").get<int>();
    prog.depth = j.at("depth").get<int>();
    prog.n_bins_total = j.at("n_bins_total").get<int>();
    const auto& a = j.at("angles");
    if (static_cast<int>(a.size()) != prog.depth * prog.n_bins_total)
        throw ValidationError("program JSON: angle count mismatch");
    prog.angles.resize(prog.depth, prog.n_bins_total);
    for (int r = 0; r < prog.depth; ++r)
        for (int c = 0; c < prog.n_bins_total; ++c)
            prog.angles(r, c) = a.at(r * prog.n_bins_total + c).get<double>();
    const auto& p = j.at("phase_imprint");
    prog.phase_imprint.resize(p.size());
    for (std::size_t i = 0; i < p.size(); ++i) prog.phase_imprint[i] = p.at(i).get<double>();
    prog.validate();
    return prog;
}

Eigen::Matrix2cd coin_single(double theta) {
    Eigen::Matrix2cd c;
    const double ct = std::cos(theta), st = std::sin(theta);
    c << cxd(ct, 0.0), cxd(0.0, st), cxd(0.0, st), cxd(ct, 0.0);
    return c;
}

RealMatrix realize_angles(const WalkProgram& program, const CouplerNoise& noise,
                          std::uint64_t rng_seed) {
    program.validate();
    RealMatrix out = program.angles;
    if (!noise.enabled || noise.half_width <= 0.0) return out;
    Rng rng(derive_seed(noise.seed, 0x6e6f6973, rng_seed));
    for (int r = 0; r < out.rows(); ++r)
        for (int c = 0; c < out.cols(); ++c) {
            double t = out(r, c) + rng.uniform(-noise.half_width, noise.half_width);
            out(r, c) = std::clamp(t, 0.0, kPi / 2);
        }
    return out;
}

Matrix single_photon_unitary(const WalkProgram& program, const RealMatrix& angles) {
    program.validate();
    if (angles.rows() != program.depth || angles.cols() != program.n_bins_total)
        throw DimensionError("angle table must be depth x n_bins_total");
    const int nb = program.n_bins_total;
    const int m = 2 * nb;
    Matrix u = Matrix::Identity(m, m);
    Matrix next(m, m);
    for (int r = 0; r < program.depth; ++r) {
        // coin row: per-bin 2x2 blocks
        next = u;
        for (int b = 0; b < nb; ++b) {
            Eigen::Matrix2cd c = coin_single(angles(r, b));
            next.row(2 * b) = c(0, 0) * u.row(2 * b) + c(0, 1) * u.row(2 * b + 1);
            next.row(2 * b + 1) = c(1, 0) * u.row(2 * b) + c(1, 1) * u.row(2 * b + 1);
        }
        // shift: |n,L> -> |n+1,L>; amplitude on the last Long bin overflows
        u.setZero();
        for (int b = 0; b < nb; ++b) {
            u.row(2 * b) = next.row(2 * b);
            if (b + 1 < nb) u.row(2 * (b + 1) + 1) = next.row(2 * b + 1);
        }
        double lost = next.row(2 * (nb - 1) + 1).cwiseAbs().maxCoeff();
        if (lost > 1e-12)
            throw OverflowError("walk amplitude shifted past the last bin at round " +
                                std::to_string(r + 1));
    }
    double defect = (u.adjoint() * u - Matrix::Identity(m, m)).cwiseAbs().maxCoeff();
    if (defect > 1e-10)
        throw OverflowError("composed walk is not unitary on the retained space");
    return u;
}

Matrix single_photon_unitary(const WalkProgram& program) {
    return single_photon_unitary(program, program.angles);
}

Vector phase_imprint_diag(const RealVector& phi, int n_bins) {
    const int m = 2 * n_bins;
    Vector diag(m * m);
    auto bin_phase = [&](int mode) {
        int bin = mode / 2;
        return bin < phi.size() ? phi[bin] : 0.0;
    };
    for (int a = 0; a < m; ++a)
        for (int b = 0; b < m; ++b)
            diag[a * m + b] = std::exp(cxd(0.0, bin_phase(a) + bin_phase(b)));
    return diag;
}

namespace {

// (A (x) A) rho, computed column-by-column via the reshape trick.
Matrix apply_kron_left(const Matrix& a, const Matrix& rho) {
    const int m = static_cast<int>(a.rows());
    const int d = m * m;
    Matrix out(d, d);
    Matrix tmp(m, m);
    for (int col = 0; col < d; ++col) {
        // column as m x m (idler index fastest): M(i, s) = rho(s*m + i, col)
        Eigen::Map<const Matrix> block(rho.col(col).data(), m, m);
        tmp.noalias() = a * block * a.transpose();
        Eigen::Map<Matrix>(out.col(col).data(), m, m) = tmp;
    }
    return out;
}

}  // namespace

TwoPhotonState propagate(const TwoPhotonState& state, const WalkProgram& program,
                         const CouplerNoise& noise, std::uint64_t rng_seed) {
    program.validate();
    if (state.n_bins() > program.n_bins_total)
        throw DimensionError("state bin space exceeds the program's padded space");

    TwoPhotonState embedded = state.embedded(program.n_bins_total);
    if (program.phase_imprint.size() > 0)
        embedded = embedded.with_phase_imprint(program.phase_imprint);
    if (program.depth == 0) return embedded;

    RealMatrix angles = realize_angles(program, noise, rng_seed);
    Matrix u = single_photon_unitary(program, angles);

    Matrix half = apply_kron_left(u, embedded.matrix());
    Matrix rho = apply_kron_left(u, half.adjoint().eval()).adjoint();

    double tr_defect = std::abs(rho.trace() - cxd(1.0, 0.0));
    if (tr_defect > 1e-10) throw OverflowError("propagation did not preserve trace");
    rho = 0.5 * (rho + rho.adjoint().eval());
    return TwoPhotonState(program.n_bins_total, std::move(rho), state.trace_tol());
}

std::vector<Outcome> outcome_distribution(const TwoPhotonState& state) {
    const int m = state.n_modes();
    const Matrix& rho = state.matrix();
    double sum = 0.0;
    std::vector<Outcome> out;
    out.reserve(m * m);
    for (int s = 0; s < m; ++s)
        for (int i = 0; i < m; ++i) {
            double p = rho(s * m + i, s * m + i).real();
            if (p < -1e-10)
                throw ValidationError("outcome distribution has a negative probability");
            p = std::max(p, 0.0);
            out.push_back({mode_from_index(s), mode_from_index(i), p});
            sum += p;
        }
    if (std::abs(sum - 1.0) > 1e-10)
        throw ValidationError("outcome distribution trace deficit beyond tolerance");
    for (auto& o : out) o.p /= sum;
    return out;
}

RealVector walk_output_distribution(const TwoPhotonState& state, const WalkProgram& program,
                                    const CouplerNoise& noise, std::uint64_t rng_seed) {
    program.validate();
    if (state.n_bins() > program.n_bins_total)
        throw DimensionError("state bin space exceeds the program's padded space");
    RealMatrix angles = realize_angles(program, noise, rng_seed);
    Matrix u = single_photon_unitary(program, angles);
    const int m_out = 2 * program.n_bins_total;
    const int m_in = state.n_modes();

    Vector vdiag;
    if (program.phase_imprint.size() > 0)
        vdiag = phase_imprint_diag(program.phase_imprint, state.n_bins());

    RealVector dist(m_out * m_out);
    dist.setZero();
    Matrix psi_out(m_out, m_out);
    for (const auto& [w, psi] : state.ensemble()) {
        Vector v = psi;
        if (vdiag.size() > 0) v = vdiag.cwiseProduct(v);
        // reshape to (idler, signal) and conjugate by U on both photons
        Eigen::Map<const Matrix> block(v.data(), m_in, m_in);
        psi_out.noalias() =
            u.leftCols(m_in) * block * u.leftCols(m_in).transpose();
        // psi_out(i_out, s_out); embedding maps mode k -> mode k
        for (int s = 0; s < m_out; ++s)
            for (int i = 0; i < m_out; ++i)
                dist[s * m_out + i] += w * std::norm(psi_out(i, s));
    }
    double sum = dist.sum();
    if (std::abs(sum - 1.0) > 1e-9)
        throw ValidationError("walk output distribution lost probability");
    return dist / sum;
}

Matrix backpropagated_observable(const WalkProgram& program, const RealMatrix& angles,
                                 const std::vector<std::pair<PhotonMode, PhotonMode>>& ports) {
    program.validate();
    Matrix u = single_photon_unitary(program, angles);
    const int n = program.n_bins_in;

    // row p of U restricted to the Short-loop input-bin columns
    auto in_row = [&](int mode_out) {
        Vector row(n);
        for (int b = 0; b < n; ++b) row[b] = u(mode_out, mode_index(b + 1, Loop::Short));
        return row;
    };

    Matrix obs(n * n, n * n);
    obs.setZero();
    for (const auto& [ms, mi] : ports) {
        if (ms.bin < 1 || ms.bin > program.n_bins_total || mi.bin < 1 ||
            mi.bin > program.n_bins_total)
            throw DimensionError("port outside the program mode space");
        Vector rs = in_row(mode_index(ms));
        Vector ri = in_row(mode_index(mi));
        Vector v(n * n);
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j) v[i * n + j] = rs[i] * ri[j];
        // obs(x, y) = <p|U|x> conj(<p|U|y>) multiplies <x|rho|y>
        obs.noalias() += v * v.adjoint();
    }
    return obs;
}

double observable_expectation(const Matrix& obs, const TwoPhotonState& state) {
    const int n = state.n_bins();
    if (obs.rows() != n * n || obs.cols() != n * n)
        throw DimensionError("observable does not match the state's bin space");
    cxd acc(0.0, 0.0);
    for (int x = 0; x < n * n; ++x) {
        int i = x / n + 1, j = x % n + 1;
        for (int y = 0; y < n * n; ++y) {
            int k = y / n + 1, l = y % n + 1;
            acc += obs(x, y) * state.bin_element(i, j, k, l);
        }
    }
    return acc.real();
}

}  // namespace tbcert
