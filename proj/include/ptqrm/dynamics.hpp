#pragma once

// Non-unitary Schrodinger propagation i d/dt psi = H psi with a classical
// RK4 stepper.  Norm growth in the broken phase is absorbed into a running
// log scale so amplitudes stay inside double range over arbitrarily long
// runs; recorded norms and populations refer to the physical state.

#include "model.hpp"
#include "spectral.hpp"

#include <cmath>
#include <limits>
#include <string>
#include <vector>

namespace ptqrm {

// Product state |n> x |qubit>, qubit index 0 = |-z>, 1 = |+z>.
inline Vector bare_state(int n, int qubit, const FockTruncation& trunc) {
    trunc.validate();
    if (n < 0 || n > trunc.n_max) throw std::invalid_argument("bare_state: n outside truncation");
    if (qubit != 0 && qubit != 1) throw std::invalid_argument("bare_state: qubit must be 0 or 1");
    Vector psi = Vector::Zero(trunc.full_dim());
    psi(2 * n + qubit) = 1.0;
    return psi;
}

struct IntegratorError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct TimeSeries {
    std::vector<double> times;
    std::vector<double> norms;        // exp(log_norm); overflows to inf on long broken runs
    std::vector<double> log_norms;
    std::vector<double> photons;      // <a'a> of the renormalized state
    std::vector<double> populations;  // |+z> weight of the renormalized state
    Vector final_state;               // unit scaled state at the last step
    double final_log_scale = 0.0;
};

namespace detail {

// Compressed-row storage of the structural nonzeros; the Hamiltonians here
// have at most a handful of entries per row, so dense matvecs would waste
// almost all their work.
struct SparseMatvec {
    int dim = 0;
    std::vector<int> row_ptr, col;
    std::vector<cxd> val;

    explicit SparseMatvec(const Matrix& H) : dim(int(H.rows())) {
        row_ptr.reserve(dim + 1);
        row_ptr.push_back(0);
        for (int i = 0; i < dim; ++i) {
            for (int j = 0; j < dim; ++j) {
                if (H(i, j) != 0.0) {
                    col.push_back(j);
                    val.push_back(H(i, j));
                }
            }
            row_ptr.push_back(int(col.size()));
        }
    }

    // out = -i H x
    void apply(const Vector& x, Vector& out) const {
        const cxd minus_i(0.0, -1.0);
        for (int i = 0; i < dim; ++i) {
            cxd s = 0.0;
            for (int k = row_ptr[i]; k < row_ptr[i + 1]; ++k) s += val[k] * x(col[k]);
            out(i) = minus_i * s;
        }
    }
};

inline double photon_of(const Vector& psi, double n2) {
    double s = 0.0;
    for (int k = 0; k < psi.size(); ++k) s += (k / 2) * std::norm(psi(k));
    return s / n2;
}

inline double up_population_of(const Vector& psi, double n2) {
    double s = 0.0;
    for (int k = 1; k < psi.size(); k += 2) s += std::norm(psi(k));
    return s / n2;
}

}  // namespace detail

// Fixed-step RK4 over [0, t_end] (rounded to a whole number of steps).
// Scalars are recorded every record_stride steps plus the final step.  When
// the working norm leaves [1/guard, guard] the state is rescaled to unit norm
// and the factor accumulated in the log scale.  A non-finite norm aborts with
// the last valid time in the message.
inline TimeSeries propagate(const Matrix& H, const Vector& psi0, double t_end, double dt = 1e-3,
                            int record_stride = 1, double norm_guard = 1e6) {
    if (H.rows() != H.cols() || H.rows() != psi0.size())
        throw std::invalid_argument("propagate: dimension mismatch");
    if (dt <= 0.0 || t_end < 0.0) throw std::invalid_argument("propagate: bad time grid");
    if (record_stride < 1) throw std::invalid_argument("propagate: record_stride must be >= 1");
    if (verbose_diagnostics() && dt * H.norm() > 0.1)
        std::fprintf(stderr, "propagate: dt*|H| = %.3g, accuracy may suffer\n", dt * H.norm());

    const detail::SparseMatvec A(H);
    const long long n_steps = std::llround(t_end / dt);
    const int dim = int(psi0.size());
    Vector psi = psi0, k1(dim), k2(dim), k3(dim), k4(dim), tmp(dim);
    double log_scale = 0.0;
    TimeSeries ts;
    const auto record = [&](double t) {
        const double n2 = psi.squaredNorm();
        const double log_norm = log_scale + 0.5 * std::log(n2);
        ts.times.push_back(t);
        ts.norms.push_back(std::exp(log_norm));
        ts.log_norms.push_back(log_norm);
        ts.photons.push_back(detail::photon_of(psi, n2));
        ts.populations.push_back(detail::up_population_of(psi, n2));
    };
    record(0.0);

    double last_valid_t = 0.0;
    for (long long step = 1; step <= n_steps; ++step) {
        A.apply(psi, k1);
        tmp = psi + (0.5 * dt) * k1;
        A.apply(tmp, k2);
        tmp = psi + (0.5 * dt) * k2;
        A.apply(tmp, k3);
        tmp = psi + dt * k3;
        A.apply(tmp, k4);
        psi += (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);

        const double nrm = psi.norm();
        if (!std::isfinite(nrm))
            throw IntegratorError("propagate: non-finite state, last valid t = " +
                                  std::to_string(last_valid_t));
        last_valid_t = step * dt;
        if (nrm > norm_guard || nrm < 1.0 / norm_guard) {
            psi /= nrm;
            log_scale += std::log(nrm);
        }
        if (step % record_stride == 0 || step == n_steps) record(step * dt);
    }
    const double nrm = psi.norm();
    ts.final_state = psi / nrm;
    ts.final_log_scale = log_scale + std::log(nrm);
    return ts;
}

// Reference propagation through the eigenbasis, psi(t) = V exp(-i L t) V^-1 psi0.
// Exact up to the decomposition itself; used to validate the stepper.
inline Vector evolve_in_eigenbasis(const EigenDecomposition& d, const Vector& psi0, double t) {
    Vector c = d.vectors.partialPivLu().solve(psi0);
    for (int k = 0; k < c.size(); ++k) c(k) *= std::exp(cxd(0.0, -t) * d.values(k));
    return d.vectors * c;
}

// Time series via the eigenbasis instead of stepping.  Growth exponents are
// split off in log space before exponentiating, so runs deep into the broken
// phase stay finite no matter how large Im(E) t gets.  Unlike the stepper,
// accuracy is uniform in t: arbitrarily small eigenstate seeds keep growing
// at their exact rates, which is what carries the late-time escape toward
// the truncation ceiling.
inline TimeSeries propagate_eigenbasis(const Matrix& H, const Vector& psi0, double t_end,
                                       double record_dt) {
    if (H.rows() != H.cols() || H.rows() != psi0.size())
        throw std::invalid_argument("propagate_eigenbasis: dimension mismatch");
    if (record_dt <= 0.0 || t_end < 0.0)
        throw std::invalid_argument("propagate_eigenbasis: bad time grid");
    const EigenDecomposition d = eigendecompose(H);
    const Vector c = d.vectors.partialPivLu().solve(psi0);
    const int dim = int(psi0.size());
    const long long n_rec = std::llround(t_end / record_dt);

    TimeSeries ts;
    Vector w(dim), psi(dim);
    for (long long j = 0; j <= n_rec; ++j) {
        const double t = j * record_dt;
        double m = -std::numeric_limits<double>::infinity();
        for (int k = 0; k < dim; ++k) {
            const double a = std::abs(c(k));
            if (a > 0.0) m = std::max(m, d.values(k).imag() * t + std::log(a));
        }
        for (int k = 0; k < dim; ++k) {
            const double a = std::abs(c(k));
            if (a == 0.0) {
                w(k) = 0.0;
                continue;
            }
            const double expo = d.values(k).imag() * t + std::log(a) - m;
            w(k) = std::polar(std::exp(expo), std::arg(c(k)) - d.values(k).real() * t);
        }
        psi.noalias() = d.vectors * w;
        const double n2 = psi.squaredNorm();
        const double log_norm = m + 0.5 * std::log(n2);
        ts.times.push_back(t);
        ts.norms.push_back(std::exp(log_norm));
        ts.log_norms.push_back(log_norm);
        ts.photons.push_back(detail::photon_of(psi, n2));
        ts.populations.push_back(detail::up_population_of(psi, n2));
        if (j == n_rec) {
            ts.final_state = psi / std::sqrt(n2);
            ts.final_log_scale = log_norm;
        }
    }
    return ts;
}

// Overlap weights |<v_k|psi0>|^2 with the unit right eigenvectors.  The basis
// is not orthogonal away from the Hermitian limit; these are plain overlaps,
// not a biorthogonal resolution.
inline Eigen::VectorXd projection_probabilities(const Vector& psi0, const EigenDecomposition& d) {
    Eigen::VectorXd p(d.values.size());
    for (int k = 0; k < d.values.size(); ++k) p(k) = std::norm(d.vectors.col(k).dot(psi0));
    return p;
}

struct GrowthReport {
    int dominant_state = -1;   // max Im among states the initial state overlaps
    int dominant_pair = -1;    // dominant_state / 2 in canonical pairing
    double dominant_im = 0.0;
    double dominant_prob = 0.0;
    int max_prob_state = -1;
    double takeover_time = 0.0;  // ln(p_max/p_dom) / (2 (Im_dom - Im_pmax))
    double max_abs_im = 0.0;     // over the k lowest states, any overlap
    bool within_gain_bound = false;  // max_abs_im <= eps/2 + 1e-9
};

// Long-time growth bookkeeping over the k lowest canonical states.  States
// with overlap below prob_floor only seed growth at the noise level of the
// projection itself, so they are excluded from the dominant-state choice;
// the |Im| bound is taken over all k states regardless of overlap.
inline GrowthReport growth_analysis(const EigenDecomposition& d, const Eigen::VectorXd& probs,
                                    const ModelParams& p, int k, double prob_floor = 1e-9) {
    if (k > d.values.size() || k > probs.size())
        throw std::invalid_argument("growth_analysis: k exceeds spectrum size");
    GrowthReport out;
    for (int i = 0; i < k; ++i) {
        out.max_abs_im = std::max(out.max_abs_im, std::abs(d.values(i).imag()));
        if (probs(i) > prob_floor &&
            (out.dominant_state < 0 || d.values(i).imag() > out.dominant_im)) {
            out.dominant_state = i;
            out.dominant_im = d.values(i).imag();
        }
        if (out.max_prob_state < 0 || probs(i) > probs(out.max_prob_state)) out.max_prob_state = i;
    }
    if (out.dominant_state >= 0) {
        out.dominant_pair = out.dominant_state / 2;
        out.dominant_prob = probs(out.dominant_state);
        const double im_gap = out.dominant_im - d.values(out.max_prob_state).imag();
        if (im_gap > 0.0 && out.dominant_state != out.max_prob_state)
            out.takeover_time =
                std::log(probs(out.max_prob_state) / out.dominant_prob) / (2.0 * im_gap);
    }
    out.within_gain_bound = out.max_abs_im <= 0.5 * p.epsilon + 1e-9;
    return out;
}

// Dominant angular frequency of a uniformly sampled real series by windowed
// DFT with parabolic peak refinement.  Frequencies completing fewer than
// min_periods periods in the record are excluded, which keeps slow takeover
// envelopes from masking the oscillation of interest.  max_freq bounds the
// search (default: Nyquist).
inline double dominant_frequency(const std::vector<double>& times,
                                 const std::vector<double>& values, double min_periods = 8.0,
                                 double max_freq = -1.0) {
    const size_t n = times.size();
    if (n < 16 || values.size() != n)
        throw std::invalid_argument("dominant_frequency: series too short or mismatched");
    const double dt = times[1] - times[0];
    const double T = times[n - 1] - times[0];
    const double pi = 3.14159265358979323846;
    const double f_lo = 2.0 * pi * min_periods / T;
    double f_hi = pi / dt;
    if (max_freq > 0.0) f_hi = std::min(f_hi, max_freq);
    if (f_hi <= f_lo) throw std::invalid_argument("dominant_frequency: empty search band");

    double mean = 0.0;
    for (double v : values) mean += v;
    mean /= double(n);
    std::vector<double> x(n);
    for (size_t j = 0; j < n; ++j) {
        const double w = 0.5 * (1.0 - std::cos(2.0 * pi * j / double(n - 1)));
        x[j] = (values[j] - mean) * w;
    }

    const double df = (2.0 * pi / T) / 8.0;  // 8x finer than the natural bin
    const int nf = int((f_hi - f_lo) / df) + 1;
    std::vector<double> power(nf);
    int peak = 0;
    for (int i = 0; i < nf; ++i) {
        const double f = f_lo + i * df;
        const cxd rot = std::exp(cxd(0.0, -f * dt));
        cxd phase = std::exp(cxd(0.0, -f * times[0]));
        cxd acc = 0.0;
        for (size_t j = 0; j < n; ++j) {
            acc += x[j] * phase;
            phase *= rot;
        }
        power[i] = std::norm(acc);
        if (power[i] > power[peak]) peak = i;
    }
    double shift = 0.0;
    if (peak > 0 && peak + 1 < nf) {
        const double pm = power[peak - 1], p0 = power[peak], pp = power[peak + 1];
        const double denom = pm - 2.0 * p0 + pp;
        if (denom < 0.0) shift = 0.5 * (pm - pp) / denom;
    }
    return f_lo + (peak + shift) * df;
}

}  // namespace ptqrm
