#pragma once

// Dense non-Hermitian diagonalization plus the level bookkeeping built on it:
// canonical ordering of conjugate partners, pairing into parity doublets,
// phase classification, parameter sweeps with continuity tracking, bisection
// for exceptional points, and truncation convergence checks.

#include "model.hpp"

#include <Eigen/Eigenvalues>

#include <algorithm>
#include <atomic>
#include <cstdio>
#include <cstdlib>
#include <numeric>
#include <thread>
#include <vector>

namespace ptqrm {

inline bool verbose_diagnostics() {
    const char* v = std::getenv("PTQRM_VERBOSE");
    return v != nullptr && v[0] != '\0' && v[0] != '0';
}

// Failure classes, kept distinct so callers can map them to exit codes.
struct SolverError : std::runtime_error {
    using std::runtime_error::runtime_error;
};
struct SearchError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct EigenDecomposition {
    Vector values;       // sorted: Re ascending, conjugate partners as (-Im, +Im)
    Matrix vectors;      // unit-norm right eigenvectors, columns match values
    double matrix_norm = 0.0;  // Frobenius norm of the input
    double max_residual = 0.0;
};

namespace detail {

// Sort eigenpairs by (Re, Im), then walk adjacent entries and force every
// conjugate pair into (-Im, +Im) order.  Without this step the order of a
// pair's members follows last-bit noise in Re, which breaks comparisons
// across truncations and parameter steps.
inline void canonical_order(Vector& values, Matrix* vectors) {
    const int n = int(values.size());
    std::vector<int> idx(n);
    std::iota(idx.begin(), idx.end(), 0);
    std::sort(idx.begin(), idx.end(), [&](int a, int b) {
        if (values(a).real() != values(b).real()) return values(a).real() < values(b).real();
        return values(a).imag() < values(b).imag();
    });
    Vector sv(n);
    Matrix svec;
    if (vectors) svec.resize(vectors->rows(), n);
    for (int i = 0; i < n; ++i) {
        sv(i) = values(idx[i]);
        if (vectors) svec.col(i) = vectors->col(idx[i]);
    }
    for (int i = 0; i + 1 < n; ++i) {
        const cxd a = sv(i), b = sv(i + 1);
        const double scale = std::max(1.0, std::max(std::abs(a), std::abs(b)));
        const bool conjugate_pair = std::abs(a.real() - b.real()) <= 1e-6 * scale &&
                                    std::abs(a.imag() + b.imag()) <= 1e-6 * scale &&
                                    a.imag() != 0.0 && b.imag() != 0.0;
        if (!conjugate_pair) continue;
        if (a.imag() > b.imag()) {
            std::swap(sv(i), sv(i + 1));
            if (vectors) svec.col(i).swap(svec.col(i + 1));
        }
        ++i;
    }
    values = sv;
    if (vectors) *vectors = svec;
}

}  // namespace detail

// Full dense eigendecomposition.  Enforces the residual contract
// ||H v - lambda v|| <= tol ||H||_F per eigenpair.
inline EigenDecomposition eigendecompose(const Matrix& H, double tol = 1e-10) {
    if (H.rows() != H.cols()) throw std::invalid_argument("eigendecompose: matrix not square");
    Eigen::ComplexEigenSolver<Matrix> solver(H, true);
    if (solver.info() != Eigen::Success)
        throw SolverError("eigendecompose: iteration cap hit at dim " +
                          std::to_string(H.rows()));
    EigenDecomposition out;
    out.values = solver.eigenvalues();
    out.vectors = solver.eigenvectors();
    out.matrix_norm = H.norm();
    for (int i = 0; i < out.vectors.cols(); ++i) out.vectors.col(i).normalize();
    detail::canonical_order(out.values, &out.vectors);

    int worst = 0;
    for (int i = 0; i < out.values.size(); ++i) {
        const double r = (H * out.vectors.col(i) - out.values(i) * out.vectors.col(i)).norm();
        if (r > out.max_residual) {
            out.max_residual = r;
            worst = i;
        }
    }
    if (out.max_residual > tol * out.matrix_norm) {
        char buf[160];
        std::snprintf(buf, sizeof buf,
                      "eigendecompose: residual %.3e exceeds %.1e*|H| near eigenvalue (%g,%g)",
                      out.max_residual, tol, out.values(worst).real(), out.values(worst).imag());
        throw SolverError(buf);
    }
    return out;
}

enum class Phase { Symmetric, Broken };

struct LevelPair {
    int index = 0;          // position in the energy-ordered pairing
    cxd e_plus, e_minus;    // upper branch / growing branch first
    Phase phase = Phase::Symmetric;
    double fidelity = 0.0;  // |<v+|v->|^2 of the unit eigenvectors
    double photon_plus = 0.0, photon_minus = 0.0;
    double w_plus = 0.0, w_minus = 0.0;  // |+z> populations
    int state_plus = 0, state_minus = 0;  // column indices into the decomposition
};

namespace detail {

inline double photon_expectation(const Vector& v) {
    double s = 0.0;
    for (int k = 0; k < v.size(); ++k) s += (k / 2) * std::norm(v(k));
    return s;
}

inline double up_population(const Vector& v) {
    double s = 0.0;
    for (int k = 1; k < v.size(); k += 2) s += std::norm(v(k));
    return s;
}

}  // namespace detail

// Group the energy-ordered spectrum into consecutive doublets.  A pair is
// classified broken when either member's |Im| exceeds im_tol.  An odd state
// count drops the topmost level with a diagnostic.
inline std::vector<LevelPair> pair_levels(const EigenDecomposition& d, const ModelParams& p,
                                          double im_tol = -1.0) {
    if (im_tol < 0.0) im_tol = 1e-9 * p.omega;
    int count = int(d.values.size());
    if (count % 2 != 0) {
        if (verbose_diagnostics())
            std::fprintf(stderr, "pair_levels: odd state count %d, dropping top level\n", count);
        --count;
    }
    std::vector<LevelPair> pairs;
    pairs.reserve(count / 2);
    for (int i = 0; 2 * i + 1 < count; ++i) {
        const int lo = 2 * i, hi = 2 * i + 1;
        LevelPair lp;
        lp.index = i;
        const bool broken = std::abs(d.values(lo).imag()) > im_tol ||
                            std::abs(d.values(hi).imag()) > im_tol;
        lp.phase = broken ? Phase::Broken : Phase::Symmetric;
        // Canonical order puts (-Im, +Im) adjacent, so the growing branch, or
        // the upper real branch, is always the second member.
        lp.state_plus = hi;
        lp.state_minus = lo;
        lp.e_plus = d.values(hi);
        lp.e_minus = d.values(lo);
        lp.fidelity = std::norm(d.vectors.col(hi).dot(d.vectors.col(lo)));
        lp.photon_plus = detail::photon_expectation(d.vectors.col(hi));
        lp.photon_minus = detail::photon_expectation(d.vectors.col(lo));
        lp.w_plus = detail::up_population(d.vectors.col(hi));
        lp.w_minus = detail::up_population(d.vectors.col(lo));
        pairs.push_back(lp);
    }
    return pairs;
}

enum class SweepAxis { Coupling, GainLoss, Splitting };

inline ModelParams with_axis(ModelParams p, SweepAxis axis, double value) {
    switch (axis) {
        case SweepAxis::Coupling: p.g = value; break;
        case SweepAxis::GainLoss: p.epsilon = value; break;
        case SweepAxis::Splitting: p.delta = value; break;
    }
    return p;
}

struct SweepPoint {
    double axis_value = 0.0;
    std::vector<LevelPair> pairs;
};

// Diagonalize along a parameter grid.  Points are independent and fan out
// across workers; the continuity pass afterwards reorders each point's pairs
// to follow the previous point by nearest mean energy, so a pair keeps its
// index across crossings of unrelated levels.
inline std::vector<SweepPoint> sweep(const ModelParams& base, SweepAxis axis,
                                     const std::vector<double>& grid, Representation rep,
                                     const FockTruncation& trunc, int n_pairs,
                                     double im_tol = -1.0, int workers = 1) {
    std::vector<SweepPoint> points(grid.size());
    std::atomic<size_t> next{0};
    auto work = [&]() {
        for (size_t i = next.fetch_add(1); i < grid.size(); i = next.fetch_add(1)) {
            const ModelParams p = with_axis(base, axis, grid[i]);
            const EigenDecomposition d = eigendecompose(build_hamiltonian(p, rep, trunc));
            points[i].axis_value = grid[i];
            auto pairs = pair_levels(d, p, im_tol);
            if (n_pairs >= 0 && int(pairs.size()) > n_pairs) pairs.resize(n_pairs);
            points[i].pairs = std::move(pairs);
        }
    };
    if (workers <= 1 || grid.size() < 2) {
        work();
    } else {
        std::vector<std::thread> pool;
        const int nw = std::min<int>(workers, int(grid.size()));
        pool.reserve(nw);
        for (int w = 0; w < nw; ++w) pool.emplace_back(work);
        for (auto& t : pool) t.join();
    }
    for (size_t i = 1; i < points.size(); ++i) {
        auto& prev = points[i - 1].pairs;
        auto& cur = points[i].pairs;
        if (prev.size() != cur.size()) continue;
        std::vector<bool> taken(cur.size(), false);
        std::vector<LevelPair> reordered(cur.size());
        for (size_t j = 0; j < prev.size(); ++j) {
            const double target = 0.5 * (prev[j].e_plus.real() + prev[j].e_minus.real());
            int best = -1;
            double best_d = 0.0;
            for (size_t k = 0; k < cur.size(); ++k) {
                if (taken[k]) continue;
                const double mean = 0.5 * (cur[k].e_plus.real() + cur[k].e_minus.real());
                const double dist = std::abs(mean - target);
                if (best < 0 || dist < best_d) {
                    best = int(k);
                    best_d = dist;
                }
            }
            taken[best] = true;
            reordered[j] = cur[best];
            reordered[j].index = int(j);
        }
        cur = std::move(reordered);
    }
    return points;
}

struct EPResult {
    double location = 0.0;   // axis value of the phase boundary
    double fidelity = 0.0;   // pair fidelity at the located point
    int pair_index = 0;
};

// Bisect the symmetric/broken boundary of one pair along an axis.  The
// bracket endpoints must classify differently or there is nothing to find.
inline EPResult find_ep(const ModelParams& base, SweepAxis axis, double lo, double hi,
                        int pair_index, Representation rep, const FockTruncation& trunc,
                        double im_tol = -1.0, double xtol = 1e-6) {
    auto broken_at = [&](double x) {
        const ModelParams p = with_axis(base, axis, x);
        const EigenDecomposition d = eigendecompose(build_hamiltonian(p, rep, trunc));
        const auto pairs = pair_levels(d, p, im_tol);
        if (pair_index < 0 || pair_index >= int(pairs.size()))
            throw std::invalid_argument("find_ep: pair index outside spectrum");
        return pairs[pair_index].phase == Phase::Broken;
    };
    bool blo = broken_at(lo), bhi = broken_at(hi);
    if (blo == bhi) throw SearchError("find_ep: no exceptional point in bracket");
    while (hi - lo > xtol) {
        const double mid = 0.5 * (lo + hi);
        if (broken_at(mid) == blo)
            lo = mid;
        else
            hi = mid;
    }
    EPResult out;
    out.location = 0.5 * (lo + hi);
    out.pair_index = pair_index;
    const ModelParams p = with_axis(base, axis, out.location);
    const EigenDecomposition d = eigendecompose(build_hamiltonian(p, rep, trunc));
    out.fidelity = pair_levels(d, p, im_tol)[pair_index].fidelity;
    return out;
}

// Golden-section minimum of the real gap of one pair, used to pin level
// crossings at eps = 0 where the gap dips to zero in a V shape.
inline double find_crossing(const ModelParams& base, int pair_index, double lo, double hi,
                            Representation rep, const FockTruncation& trunc,
                            double xtol = 1e-9) {
    auto gap_at = [&](double g) {
        const ModelParams p = with_axis(base, SweepAxis::Coupling, g);
        const EigenDecomposition d = eigendecompose(build_hamiltonian(p, rep, trunc));
        const auto pairs = pair_levels(d, p);
        if (pair_index < 0 || pair_index >= int(pairs.size()))
            throw std::invalid_argument("find_crossing: pair index outside spectrum");
        return std::abs(pairs[pair_index].e_plus - pairs[pair_index].e_minus);
    };
    const double phi = 0.5 * (std::sqrt(5.0) - 1.0);
    double a = lo, b = hi;
    double x1 = b - phi * (b - a), x2 = a + phi * (b - a);
    double f1 = gap_at(x1), f2 = gap_at(x2);
    while (b - a > xtol) {
        if (f1 <= f2) {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - phi * (b - a);
            f1 = gap_at(x1);
        } else {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + phi * (b - a);
            f2 = gap_at(x2);
        }
    }
    return 0.5 * (a + b);
}

struct ConvergenceReport {
    std::vector<int> n_max_values;
    std::vector<double> drifts;  // max |delta lambda| between successive truncations
    double max_drift = 0.0;
    bool converged = false;
};

// Drift of the lowest k canonical eigenvalues between successive truncations.
inline ConvergenceReport convergence_check(const ModelParams& p, Representation rep,
                                           const std::vector<int>& n_max_values, int k,
                                           double drift_tol = -1.0) {
    if (drift_tol < 0.0) drift_tol = 1e-8 * p.omega;
    if (n_max_values.size() < 2)
        throw std::invalid_argument("convergence_check: need at least two truncations");
    ConvergenceReport rep_out;
    rep_out.n_max_values = n_max_values;
    Vector prev;
    for (int nm : n_max_values) {
        const FockTruncation trunc{nm};
        if (k > trunc.full_dim())
            throw std::invalid_argument("convergence_check: k exceeds smallest dimension");
        EigenDecomposition d = eigendecompose(build_hamiltonian(p, rep, trunc));
        Vector low = d.values.head(k);
        if (prev.size() > 0) {
            double drift = 0.0;
            for (int i = 0; i < k; ++i) drift = std::max(drift, std::abs(low(i) - prev(i)));
            rep_out.drifts.push_back(drift);
        }
        prev = low;
    }
    rep_out.max_drift = *std::max_element(rep_out.drifts.begin(), rep_out.drifts.end());
    rep_out.converged = rep_out.max_drift <= drift_tol;
    return rep_out;
}

}  // namespace ptqrm
