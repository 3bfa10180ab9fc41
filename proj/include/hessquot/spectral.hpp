#pragma once

// Small symmetric matrices (n <= 8): Jacobi eigendecomposition, the transform
// U = tau*tr(A)*I - A, and the matrix operator F(U) = f(lambda[U]) with its
// first derivatives F^{ij}, Q^{ij} and the off-diagonal second derivatives.

#include <array>
#include <cstddef>

#include "hessquot/symfun.hpp"

namespace hessquot {

class SymMatrix {
public:
    static constexpr int kMaxDim = 8;

    SymMatrix() = default;
    explicit SymMatrix(int n);

    static SymMatrix identity(int n);
    static SymMatrix diagonal(std::span<const double> diag);
    /// Row-major n*n input; throws InvalidArgument if it is not symmetric.
    static SymMatrix from_rows(int n, std::span<const double> rows);

    int dim() const noexcept { return n_; }
    double operator()(int i, int j) const { return a_[idx(i, j)]; }
    /// Writes both (i, j) and (j, i).
    void set(int i, int j, double v) {
        a_[idx(i, j)] = v;
        a_[idx(j, i)] = v;
    }

    double trace() const;
    /// max |a_ij|
    double max_abs() const;
    /// sum_ij a_ij b_ij
    double frobenius_dot(const SymMatrix& other) const;

    SymMatrix& operator+=(const SymMatrix& o);
    SymMatrix& operator-=(const SymMatrix& o);
    SymMatrix& operator*=(double s);
    friend SymMatrix operator+(SymMatrix a, const SymMatrix& b) { return a += b; }
    friend SymMatrix operator-(SymMatrix a, const SymMatrix& b) { return a -= b; }
    friend SymMatrix operator*(double s, SymMatrix a) { return a *= s; }

    friend bool operator==(const SymMatrix&, const SymMatrix&) = default;

private:
    static std::size_t idx(int i, int j) { return static_cast<std::size_t>(i * kMaxDim + j); }

    int n_ = 0;
    std::array<double, kMaxDim * kMaxDim> a_{};
};

/// Dense n x n matrix, row-major; used for eigenvector bases and rotations.
struct SquareMatrix {
    int n = 0;
    std::array<double, SymMatrix::kMaxDim * SymMatrix::kMaxDim> a{};

    double& operator()(int i, int j) { return a[static_cast<std::size_t>(i * SymMatrix::kMaxDim + j)]; }
    double operator()(int i, int j) const { return a[static_cast<std::size_t>(i * SymMatrix::kMaxDim + j)]; }
};

/// Eigenvalues ascending; column p of `vectors` belongs to eigenvalues[p].
struct EigenPair {
    std::vector<double> eigenvalues;
    SquareMatrix vectors;
};

/// tau * tr(A) * I - A
SymMatrix eta_transform(const SymMatrix& a, double tau);

/// Cyclic Jacobi. Converged when the off-diagonal Frobenius norm is <= 1e-14 * ||A||_F;
/// throws EigFailure after 100 sweeps.
EigenPair sym_eig(const SymMatrix& a);

/// R * A * R^T
SymMatrix conjugate(const SquareMatrix& r, const SymMatrix& a);

/// sum_p w_p v_p v_p^T, symmetrized.
SymMatrix spectral_compose(const EigenPair& eig, std::span<const double> weights);

double F_value(const SymMatrix& u, const QuotientSpec& spec);

/// F^{ij} = dF/dU_ij = sum_p f_p v_p v_p^T.
SymMatrix F_gradient(const SymMatrix& u, const QuotientSpec& spec);

/// Derivative of A -> F(tau*tr(A)*I - A): Q = tau*tr(G)*I - G with G = F_gradient(T(A)).
SymMatrix Q_gradient(const SymMatrix& a, const QuotientSpec& spec);

/// Value and derivative data of F at one matrix, computed from a single eigendecomposition.
struct OperatorLinearization {
    double value = 0.0;
    SymMatrix f_gradient;  // F^{ij} at U
    SymMatrix q_gradient;  // Q^{ij} at A
    std::vector<double> eigenvalues;
    double margin = 0.0;   // min_j sigma_j(lambda) / C(n, j)
};

/// Linearizes A -> F(T(A)) at A. Throws NotAdmissible (eigenvalues attached) outside Gamma_k.
OperatorLinearization linearize(const SymMatrix& a, const QuotientSpec& spec);

/// -F^{ij,ji}(U) for diagonal admissible U, i != j:
///   (f_i - f_j) / (lambda_j - lambda_i),
/// and its limit f_ij - f_ii when |lambda_i - lambda_j| <= 1e-8 * (1 + max|lambda|).
double F_second_offdiag(const SymMatrix& u, const QuotientSpec& spec, int i, int j);

}  // namespace hessquot
