#pragma once

// Master-equation cross-check.  The gain/loss system embeds into a Hermitian
// three-level ladder { |0>, |1>, |2> } x Fock with one decay channel
// |1> -> |0> at rate gamma = 2 eps:
//
//   d rho/dt = -i (H_eff rho - rho H_eff')  [+ gamma |0><1| rho |1><0|]
//   H_eff    = H_full - i (gamma/2) |1><1| x Id
//
// where H_full carries the Hermitian rotated-frame Hamiltonian (eps = 0) on
// levels {1,2} and annihilates the sink level |0>.  Without the quantum-jump
// refill term the {1,2} block evolves exactly like the loss-only two-level
// system, so trace-renormalized observables reproduce the PT dynamics.
// Basis index: level * fock_dim + n (block-major).

#include "dynamics.hpp"
#include "model.hpp"
#include "spectral.hpp"

#include <Eigen/SparseCore>

#include <vector>

namespace ptqrm {

struct ThreeLevelSystem {
    FockTruncation trunc;
    Matrix h_full;  // 3 nf x 3 nf, Hermitian, zero on the sink level

    int fock_dim() const { return trunc.fock_dim(); }
    int dim() const { return 3 * trunc.fock_dim(); }
};

inline ThreeLevelSystem build_three_level_system(const ModelParams& p,
                                                 const FockTruncation& trunc) {
    p.validate();
    trunc.validate();
    ModelParams hermitian = p;
    hermitian.epsilon = 0.0;
    const Matrix h2 = build_hamiltonian(hermitian, Representation::RotatedX, trunc);
    const int nf = trunc.fock_dim();
    ThreeLevelSystem sys{trunc, Matrix::Zero(3 * nf, 3 * nf)};
    // Qubit q = 0,1 maps to levels 1,2; product index 2n + q to level*nf + n.
    for (int n1 = 0; n1 <= trunc.n_max; ++n1)
        for (int q1 = 0; q1 < 2; ++q1)
            for (int n2 = 0; n2 <= trunc.n_max; ++n2)
                for (int q2 = 0; q2 < 2; ++q2)
                    sys.h_full((q1 + 1) * nf + n1, (q2 + 1) * nf + n2) =
                        h2(2 * n1 + q1, 2 * n2 + q2);
    return sys;
}

// Jump operator |0><1| x Id on the Fock factor.
inline Matrix build_decay_jump(const FockTruncation& trunc) {
    trunc.validate();
    const int nf = trunc.fock_dim();
    Matrix L = Matrix::Zero(3 * nf, 3 * nf);
    for (int n = 0; n < nf; ++n) L(n, nf + n) = 1.0;
    return L;
}

// Lift a two-level product state (index 2n + q) onto levels {1,2}.
inline Vector embed_rotated_state(const Vector& psi, const FockTruncation& trunc) {
    trunc.validate();
    if (psi.size() != trunc.full_dim())
        throw std::invalid_argument("embed_rotated_state: dimension mismatch");
    const int nf = trunc.fock_dim();
    Vector out = Vector::Zero(3 * nf);
    for (int n = 0; n < nf; ++n)
        for (int q = 0; q < 2; ++q) out((q + 1) * nf + n) = psi(2 * n + q);
    return out;
}

struct LMESeries {
    std::vector<double> times;
    std::vector<double> traces;       // Tr rho, conserved only with the jump term
    std::vector<double> photons;      // Tr(rho a'a) / Tr rho
    std::vector<double> populations;  // level |2> weight relative to the trace
    std::vector<double> sinks;        // level |0> weight relative to the trace
    Matrix final_rho;
};

// RK4 integration of the master equation.  With include_jump = false the
// evolution is the pure non-Hermitian half of the Lindbladian and the trace
// decays; with the jump term the trace is conserved and population piles up
// in the sink.
inline LMESeries propagate_lme(const ThreeLevelSystem& sys, const Matrix& rho0, double gamma,
                               bool include_jump, double t_end, double dt = 1e-3,
                               int record_stride = 1) {
    const int nf = sys.fock_dim(), d = sys.dim();
    if (rho0.rows() != d || rho0.cols() != d)
        throw std::invalid_argument("propagate_lme: dimension mismatch");
    if (dt <= 0.0 || t_end < 0.0) throw std::invalid_argument("propagate_lme: bad time grid");
    if (record_stride < 1) throw std::invalid_argument("propagate_lme: record_stride must be >= 1");

    // H_eff = H_full - i gamma/2 on level |1>, assembled sparse since rho is
    // the dense factor in every product.
    std::vector<Eigen::Triplet<cxd>> trip;
    for (int i = 0; i < d; ++i)
        for (int j = 0; j < d; ++j)
            if (sys.h_full(i, j) != 0.0) trip.emplace_back(i, j, sys.h_full(i, j));
    for (int n = 0; n < nf; ++n) trip.emplace_back(nf + n, nf + n, cxd(0.0, -0.5 * gamma));
    Eigen::SparseMatrix<cxd> heff(d, d);
    heff.setFromTriplets(trip.begin(), trip.end());

    // rho stays Hermitian, so rho Heff' = (Heff rho)' and one sparse product
    // per stage suffices.
    Matrix m(d, d);
    auto rhs = [&](const Matrix& rho, Matrix& out) {
        m.noalias() = heff * rho;
        out = cxd(0.0, -1.0) * (m - m.adjoint());
        if (include_jump) out.block(0, 0, nf, nf) += gamma * rho.block(nf, nf, nf, nf);
    };

    const long long n_steps = std::llround(t_end / dt);
    Matrix rho = rho0, k1(d, d), k2(d, d), k3(d, d), k4(d, d), tmp(d, d);
    LMESeries ts;
    const auto record = [&](double t) {
        const double tr = rho.trace().real();
        double photon = 0.0, upper = 0.0, sink = 0.0;
        for (int lvl = 0; lvl < 3; ++lvl)
            for (int n = 0; n < nf; ++n) {
                const double w = rho(lvl * nf + n, lvl * nf + n).real();
                photon += n * w;
                if (lvl == 2) upper += w;
                if (lvl == 0) sink += w;
            }
        ts.times.push_back(t);
        ts.traces.push_back(tr);
        ts.photons.push_back(photon / tr);
        ts.populations.push_back(upper / tr);
        ts.sinks.push_back(sink / tr);
    };
    record(0.0);

    for (long long step = 1; step <= n_steps; ++step) {
        rhs(rho, k1);
        tmp = rho + (0.5 * dt) * k1;
        rhs(tmp, k2);
        tmp = rho + (0.5 * dt) * k2;
        rhs(tmp, k3);
        tmp = rho + dt * k3;
        rhs(tmp, k4);
        rho += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        if (step % 1024 == 0) rho = 0.5 * (rho + rho.adjoint()).eval();
        if (!std::isfinite(rho.trace().real()))
            throw IntegratorError("propagate_lme: non-finite density matrix, last valid t = " +
                                  std::to_string((step - 1) * dt));
        if (step % record_stride == 0 || step == n_steps) record(step * dt);
    }
    ts.final_rho = rho;
    return ts;
}

struct PostselectionReport {
    double max_photon_deviation = 0.0;      // jump-free LME vs loss-only Schrodinger
    double max_population_deviation = 0.0;  // same for the upper-level weight
    double max_jump_photon_divergence = 0.0;  // jump-on vs jump-off, the effect of refill
    double max_trace_error = 0.0;             // jump-on |Tr rho - 1|
    double final_sink_population = 0.0;
};

// Quantifies the postselection claim: without the jump term the master
// equation reproduces the non-Hermitian Schrodinger dynamics after trace
// renormalization, and the jump term only reroutes the lost weight into the
// sink.  psi0 lives in the two-level rotated frame (index 2n + q).
inline PostselectionReport compare_postselected(const ModelParams& p, const Vector& psi0,
                                                double t_max, double dt = 1e-3,
                                                int record_stride = 10) {
    p.validate();
    const FockTruncation trunc{int(psi0.size()) / 2 - 1};
    if (psi0.size() != trunc.full_dim())
        throw std::invalid_argument("compare_postselected: psi0 has odd length");
    const double gamma = 2.0 * p.epsilon;

    const Matrix h = build_hamiltonian(p, Representation::PassiveX, trunc);
    const TimeSeries tdse = propagate(h, psi0, t_max, dt, record_stride);

    const ThreeLevelSystem sys = build_three_level_system(p, trunc);
    const Vector embedded = embed_rotated_state(psi0, trunc);
    const Matrix rho0 = embedded * embedded.adjoint();
    const LMESeries off = propagate_lme(sys, rho0, gamma, false, t_max, dt, record_stride);
    const LMESeries on = propagate_lme(sys, rho0, gamma, true, t_max, dt, record_stride);

    PostselectionReport out;
    for (size_t i = 0; i < off.times.size(); ++i) {
        out.max_photon_deviation =
            std::max(out.max_photon_deviation, std::abs(off.photons[i] - tdse.photons[i]));
        out.max_population_deviation = std::max(
            out.max_population_deviation, std::abs(off.populations[i] - tdse.populations[i]));
        // The jump-on photon average runs over all levels including the sink.
        out.max_jump_photon_divergence =
            std::max(out.max_jump_photon_divergence, std::abs(on.photons[i] - off.photons[i]));
        out.max_trace_error = std::max(out.max_trace_error, std::abs(on.traces[i] - 1.0));
    }
    out.final_sink_population = on.sinks.back();
    return out;
}

}  // namespace ptqrm
