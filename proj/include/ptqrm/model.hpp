#pragma once

// Model parameters, basis conventions, Hamiltonian representations and the
// combined parity operator of a PT-symmetric two-level system coupled to a
// single cavity mode.
//
// Basis convention (single source of truth for the whole library):
//   product index k = 2n + q over Fock number n and qubit index q,
//   q = 0 <-> |-z>,  q = 1 <-> |+z>.
// In this ordering sigma_z = diag(-1,+1) and sigma_x = [[0,1],[1,0]].

#include <Eigen/Dense>
#include <complex>
#include <stdexcept>
#include <string>

namespace ptqrm {

using cxd = std::complex<double>;
using Matrix = Eigen::MatrixXcd;
using Vector = Eigen::VectorXcd;

inline constexpr cxd I{0.0, 1.0};

struct ModelParams {
    double delta = 0.5;    // qubit level splitting
    double epsilon = 0.0;  // gain/loss rate, >= 0
    double omega = 1.0;    // cavity frequency, > 0
    double g = 0.0;        // qubit-cavity coupling, >= 0

    void validate() const {
        if (omega <= 0.0) throw std::invalid_argument("omega must be positive");
        if (delta < 0.0 || epsilon < 0.0 || g < 0.0)
            throw std::invalid_argument("delta, epsilon, g must be non-negative");
    }
};

enum class Representation {
    BareZ,          // Delta/2 sz + i eps/2 sx + w a'a + g sx (a'+a)
    RotatedX,       // Delta/2 sx + i eps/2 sz + w a'a + g sz (a'+a)
    PassiveX,       // RotatedX + (i eps/2) Id   (loss-only frame, constant shift)
    QubitOnlyZ,     // Delta/2 sz + i eps/2 sx
    QubitOnlyX,     // Delta/2 sx + i eps/2 sz
    PassiveQubitX,  // QubitOnlyX + (i eps/2) Id
};

inline bool is_qubit_only(Representation r) {
    return r == Representation::QubitOnlyZ || r == Representation::QubitOnlyX ||
           r == Representation::PassiveQubitX;
}

struct FockTruncation {
    int n_max = 0;  // highest retained Fock state

    int fock_dim() const { return n_max + 1; }
    int full_dim() const { return 2 * (n_max + 1); }
    void validate() const {
        if (n_max < 0) throw std::invalid_argument("n_max must be >= 0");
    }
};

// Cavity-only annihilation operator, <n-1|a|n> = sqrt(n).
inline Matrix build_annihilation(const FockTruncation& trunc) {
    trunc.validate();
    const int d = trunc.fock_dim();
    Matrix a = Matrix::Zero(d, d);
    for (int n = 1; n < d; ++n) a(n - 1, n) = std::sqrt(double(n));
    return a;
}

namespace detail {

inline Matrix sigma_z() {
    Matrix s(2, 2);
    s << -1, 0, 0, 1;
    return s;
}
inline Matrix sigma_x() {
    Matrix s(2, 2);
    s << 0, 1, 1, 0;
    return s;
}

// Fock-major Kronecker product matching the k = 2n + q indexing.
inline Matrix kron_fq(const Matrix& F, const Matrix& Q) {
    const int df = int(F.rows()), dq = int(Q.rows());
    Matrix out(df * dq, df * dq);
    for (int i = 0; i < df; ++i)
        for (int j = 0; j < df; ++j)
            out.block(i * dq, j * dq, dq, dq) = F(i, j) * Q;
    return out;
}

}  // namespace detail

inline Matrix build_qubit_hamiltonian(const ModelParams& p, Representation rep) {
    p.validate();
    const Matrix sz = detail::sigma_z(), sx = detail::sigma_x();
    switch (rep) {
        case Representation::QubitOnlyZ:
            return 0.5 * p.delta * sz + 0.5 * I * p.epsilon * sx;
        case Representation::QubitOnlyX:
            return 0.5 * p.delta * sx + 0.5 * I * p.epsilon * sz;
        case Representation::PassiveQubitX:
            return 0.5 * p.delta * sx + 0.5 * I * p.epsilon * sz +
                   0.5 * I * p.epsilon * Matrix::Identity(2, 2);
        default:
            throw std::invalid_argument("full-system representation passed to build_qubit_hamiltonian");
    }
}

inline Matrix build_hamiltonian(const ModelParams& p, Representation rep,
                                const FockTruncation& trunc) {
    p.validate();
    trunc.validate();
    if (is_qubit_only(rep))
        throw std::invalid_argument("qubit-only representation passed to build_hamiltonian");

    const int df = trunc.fock_dim();
    const Matrix a = build_annihilation(trunc);
    const Matrix x = a + a.adjoint();          // a' + a
    const Matrix num = a.adjoint() * a;        // a' a
    const Matrix If = Matrix::Identity(df, df);
    const Matrix Iq = Matrix::Identity(2, 2);
    const Matrix sz = detail::sigma_z(), sx = detail::sigma_x();
    using detail::kron_fq;

    switch (rep) {
        case Representation::BareZ:
            return 0.5 * p.delta * kron_fq(If, sz) + 0.5 * I * p.epsilon * kron_fq(If, sx) +
                   p.omega * kron_fq(num, Iq) + p.g * kron_fq(x, sx);
        case Representation::RotatedX:
            return 0.5 * p.delta * kron_fq(If, sx) + 0.5 * I * p.epsilon * kron_fq(If, sz) +
                   p.omega * kron_fq(num, Iq) + p.g * kron_fq(x, sz);
        case Representation::PassiveX:
            return build_hamiltonian(p, Representation::RotatedX, trunc) +
                   0.5 * I * p.epsilon * Matrix::Identity(2 * df, 2 * df);
        default:
            throw std::invalid_argument("unhandled representation");
    }
}

// Combined parity sigma_z exp(i pi a'a): diagonal, (-1)^n on Fock, -/+ on q=0/1.
inline Matrix build_parity(const FockTruncation& trunc) {
    trunc.validate();
    const int d = trunc.full_dim();
    Matrix P = Matrix::Zero(d, d);
    for (int k = 0; k < d; ++k) {
        const int n = k / 2, q = k % 2;
        const double fock_sign = (n % 2 == 0) ? 1.0 : -1.0;
        P(k, k) = fock_sign * (q == 1 ? 1.0 : -1.0);
    }
    return P;
}

// Parity partner for the rotated representation: sigma_x exp(i pi a'a).
inline Matrix build_parity_rotated(const FockTruncation& trunc) {
    trunc.validate();
    const int df = trunc.fock_dim();
    Matrix Pf = Matrix::Zero(df, df);
    for (int n = 0; n < df; ++n) Pf(n, n) = (n % 2 == 0) ? 1.0 : -1.0;
    return detail::kron_fq(Pf, detail::sigma_x());
}

// Frobenius norm of P conj(H) P - H; zero certifies PT symmetry with T = complex
// conjugation in this basis.
inline double pt_symmetry_residual(const Matrix& H, const Matrix& P) {
    if (H.rows() != P.rows() || H.cols() != P.cols())
        throw std::invalid_argument("pt_symmetry_residual: dimension mismatch");
    return (P * H.conjugate() * P - H).norm();
}

}  // namespace ptqrm
