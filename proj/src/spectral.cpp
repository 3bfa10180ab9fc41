#include "hessquot/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>
#include <string>

#include "hessquot/errors.hpp"

namespace hessquot {

SymMatrix::SymMatrix(int n) : n_(n) {
    if (n < 1 || n > kMaxDim) throw InvalidArgument("SymMatrix dimension must be in [1, 8], got " + std::to_string(n));
}

SymMatrix SymMatrix::identity(int n) {
    SymMatrix m(n);
    for (int i = 0; i < n; ++i) m.set(i, i, 1.0);
    return m;
}

SymMatrix SymMatrix::diagonal(std::span<const double> diag) {
    SymMatrix m(static_cast<int>(diag.size()));
    for (int i = 0; i < m.dim(); ++i) m.set(i, i, diag[static_cast<std::size_t>(i)]);
    return m;
}

SymMatrix SymMatrix::from_rows(int n, std::span<const double> rows) {
    if (rows.size() != static_cast<std::size_t>(n * n)) throw InvalidArgument("from_rows: expected n*n entries");
    SymMatrix m(n);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double upper = rows[static_cast<std::size_t>(i * n + j)];
            const double lower = rows[static_cast<std::size_t>(j * n + i)];
            if (upper != lower) throw InvalidArgument("from_rows: matrix is not symmetric");
            m.set(i, j, upper);
        }
    }
    return m;
}

double SymMatrix::trace() const {
    double t = 0.0;
    for (int i = 0; i < n_; ++i) t += (*this)(i, i);
    return t;
}

double SymMatrix::max_abs() const {
    double m = 0.0;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) m = std::max(m, std::abs((*this)(i, j)));
    return m;
}

double SymMatrix::frobenius_dot(const SymMatrix& other) const {
    double s = 0.0;
    for (int i = 0; i < n_; ++i)
        for (int j = 0; j < n_; ++j) s += (*this)(i, j) * other(i, j);
    return s;
}

SymMatrix& SymMatrix::operator+=(const SymMatrix& o) {
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] += o.a_[i];
    return *this;
}

SymMatrix& SymMatrix::operator-=(const SymMatrix& o) {
    for (std::size_t i = 0; i < a_.size(); ++i) a_[i] -= o.a_[i];
    return *this;
}

SymMatrix& SymMatrix::operator*=(double s) {
    for (double& v : a_) v *= s;
    return *this;
}

SymMatrix eta_transform(const SymMatrix& a, double tau) {
    if (!(tau >= 1.0)) throw InvalidArgument("eta_transform requires tau >= 1");
    SymMatrix u = -1.0 * a;
    const double shift = tau * a.trace();
    for (int i = 0; i < a.dim(); ++i) u.set(i, i, u(i, i) + shift);
    return u;
}

EigenPair sym_eig(const SymMatrix& input) {
    constexpr int kMaxSweeps = 100;
    const int n = input.dim();
    SquareMatrix a;
    SquareMatrix v;
    a.n = v.n = n;
    double norm2 = 0.0;
    for (int i = 0; i < n; ++i) {
        v(i, i) = 1.0;
        for (int j = 0; j < n; ++j) {
            a(i, j) = input(i, j);
            norm2 += a(i, j) * a(i, j);
        }
    }
    const double threshold = 1e-14 * std::sqrt(norm2);

    auto off_norm = [&] {
        double s = 0.0;
        for (int i = 0; i < n; ++i)
            for (int j = 0; j < n; ++j)
                if (i != j) s += a(i, j) * a(i, j);
        return std::sqrt(s);
    };

    int sweep = 0;
    while (off_norm() > threshold) {
        if (++sweep > kMaxSweeps)
            throw EigFailure("Jacobi eigensolver did not converge in " + std::to_string(kMaxSweeps) + " sweeps");
        for (int p = 0; p < n - 1; ++p) {
            for (int q = p + 1; q < n; ++q) {
                const double apq = a(p, q);
                if (apq == 0.0) continue;
                const double theta = (a(q, q) - a(p, p)) / (2.0 * apq);
                const double t = std::copysign(1.0, theta) / (std::abs(theta) + std::sqrt(theta * theta + 1.0));
                const double c = 1.0 / std::sqrt(t * t + 1.0);
                const double s = t * c;
                const double tau = s / (1.0 + c);

                a(p, p) -= t * apq;
                a(q, q) += t * apq;
                a(p, q) = a(q, p) = 0.0;
                for (int r = 0; r < n; ++r) {
                    if (r == p || r == q) continue;
                    const double arp = a(r, p);
                    const double arq = a(r, q);
                    a(r, p) = a(p, r) = arp - s * (arq + tau * arp);
                    a(r, q) = a(q, r) = arq + s * (arp - tau * arq);
                }
                for (int r = 0; r < n; ++r) {
                    const double vrp = v(r, p);
                    const double vrq = v(r, q);
                    v(r, p) = vrp - s * (vrq + tau * vrp);
                    v(r, q) = vrq + s * (vrp - tau * vrq);
                }
            }
        }
    }

    std::vector<int> order(static_cast<std::size_t>(n));
    std::iota(order.begin(), order.end(), 0);
    std::stable_sort(order.begin(), order.end(), [&](int x, int y) { return a(x, x) < a(y, y); });

    EigenPair out;
    out.eigenvalues.resize(static_cast<std::size_t>(n));
    out.vectors.n = n;
    for (int p = 0; p < n; ++p) {
        const int src = order[static_cast<std::size_t>(p)];
        out.eigenvalues[static_cast<std::size_t>(p)] = a(src, src);
        for (int r = 0; r < n; ++r) out.vectors(r, p) = v(r, src);
    }
    return out;
}

SymMatrix conjugate(const SquareMatrix& r, const SymMatrix& a) {
    const int n = a.dim();
    SquareMatrix ra;
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) {
            double s = 0.0;
            for (int m = 0; m < n; ++m) s += r(i, m) * a(m, j);
            ra(i, j) = s;
        }
    SymMatrix out(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double s = 0.0, t = 0.0;
            for (int m = 0; m < n; ++m) {
                s += ra(i, m) * r(j, m);
                t += ra(j, m) * r(i, m);
            }
            out.set(i, j, 0.5 * (s + t));
        }
    return out;
}

SymMatrix spectral_compose(const EigenPair& eig, std::span<const double> weights) {
    const int n = eig.vectors.n;
    SymMatrix out(n);
    for (int i = 0; i < n; ++i)
        for (int j = i; j < n; ++j) {
            double s = 0.0, t = 0.0;
            for (int p = 0; p < n; ++p) {
                s += weights[static_cast<std::size_t>(p)] * eig.vectors(i, p) * eig.vectors(j, p);
                t += weights[static_cast<std::size_t>(p)] * eig.vectors(j, p) * eig.vectors(i, p);
            }
            out.set(i, j, 0.5 * (s + t));
        }
    return out;
}

namespace {

void check_dim(const SymMatrix& m, const QuotientSpec& spec) {
    if (m.dim() != spec.n)
        throw InvalidArgument("matrix dimension " + std::to_string(m.dim()) + " does not match spec.n = " +
                              std::to_string(spec.n));
}

}  // namespace

double F_value(const SymMatrix& u, const QuotientSpec& spec) {
    check_dim(u, spec);
    const EigenPair eig = sym_eig(u);
    return quotient_derivatives(eig.eigenvalues, spec.k, spec.l, false).value;
}

SymMatrix F_gradient(const SymMatrix& u, const QuotientSpec& spec) {
    check_dim(u, spec);
    const EigenPair eig = sym_eig(u);
    const auto d = quotient_derivatives(eig.eigenvalues, spec.k, spec.l, false);
    return spectral_compose(eig, d.gradient);
}

SymMatrix Q_gradient(const SymMatrix& a, const QuotientSpec& spec) { return linearize(a, spec).q_gradient; }

OperatorLinearization linearize(const SymMatrix& a, const QuotientSpec& spec) {
    check_dim(a, spec);
    const SymMatrix u = eta_transform(a, spec.tau);
    const EigenPair eig = sym_eig(u);
    const auto d = quotient_derivatives(eig.eigenvalues, spec.k, spec.l, false);

    OperatorLinearization lin;
    lin.value = d.value;
    lin.f_gradient = spectral_compose(eig, d.gradient);
    lin.q_gradient = eta_transform(lin.f_gradient, spec.tau);
    lin.margin = admissibility_margin(sigma_all(eig.eigenvalues), spec.n, spec.k);
    lin.eigenvalues = eig.eigenvalues;
    return lin;
}

double F_second_offdiag(const SymMatrix& u, const QuotientSpec& spec, int i, int j) {
    check_dim(u, spec);
    const int n = u.dim();
    if (i < 0 || j < 0 || i >= n || j >= n) throw InvalidArgument("F_second_offdiag: index out of range");
    if (i == j) throw InvalidArgument("F_second_offdiag requires i != j");
    for (int r = 0; r < n; ++r)
        for (int c = 0; c < n; ++c)
            if (r != c && u(r, c) != 0.0) throw InvalidArgument("F_second_offdiag requires a diagonal matrix");

    std::vector<double> lam(static_cast<std::size_t>(n));
    double scale = 0.0;
    for (int r = 0; r < n; ++r) {
        lam[static_cast<std::size_t>(r)] = u(r, r);
        scale = std::max(scale, std::abs(u(r, r)));
    }
    const double li = lam[static_cast<std::size_t>(i)];
    const double lj = lam[static_cast<std::size_t>(j)];
    if (std::abs(li - lj) <= 1e-8 * (1.0 + scale)) {
        const auto d = quotient_derivatives(lam, spec.k, spec.l, true);
        return d.hessian(i, j) - d.hessian(i, i);
    }
    const auto d = quotient_derivatives(lam, spec.k, spec.l, false);
    return (d.gradient[static_cast<std::size_t>(i)] - d.gradient[static_cast<std::size_t>(j)]) / (lj - li);
}

}  // namespace hessquot
