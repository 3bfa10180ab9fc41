#pragma once

// Elementary symmetric polynomials sigma_k, their partial derivatives,
// Garding cone membership and the Hessian quotient f = (sigma_k/sigma_l)^(1/(k-l)).
//
// Indices into lambda are 0-based throughout.

#include <cstdint>
#include <optional>
#include <random>
#include <span>
#include <vector>

namespace hessquot {

/// Ordered list of n >= 2 finite reals (eigenvalues).
class Lambda {
public:
    /// Throws InvalidArgument when n < 2 or an entry is not finite.
    explicit Lambda(std::vector<double> values);
    Lambda(std::initializer_list<double> values) : Lambda(std::vector<double>(values)) {}

    int size() const noexcept { return static_cast<int>(values_.size()); }
    double operator[](int i) const { return values_[static_cast<std::size_t>(i)]; }
    std::span<const double> values() const noexcept { return values_; }

    friend bool operator==(const Lambda&, const Lambda&) = default;

private:
    std::vector<double> values_;
};

/// The operator (sigma_k/sigma_l)^(1/(k-l)) applied to lambda[tau*tr(A)*I - A].
struct QuotientSpec {
    int n = 3;
    int k = 3;
    int l = 1;
    double tau = 1.0;

    /// Validated construction: requires n >= 2, 0 <= l, l + 2 <= k <= n, tau >= 1.
    static QuotientSpec make(int n, int k, int l, double tau);

    friend bool operator==(const QuotientSpec&, const QuotientSpec&) = default;
};

/// Throws InvalidArgument unless the spec satisfies the solver hypotheses (see QuotientSpec::make).
void validate(const QuotientSpec& spec);

/// (C(n,k)/C(n,l))^(1/(k-l)): value of f at (1,...,1) and the lower bound of sum_i f_i on Gamma_k.
double quotient_constant(int n, int k, int l);

double binomial(int n, int k);

/// [sigma_0, sigma_1, ..., sigma_n]; out-of-range orders read as 0.
class SigmaTable {
public:
    explicit SigmaTable(std::vector<double> values) : values_(std::move(values)) {}

    int degree() const noexcept { return static_cast<int>(values_.size()) - 1; }
    double operator[](int j) const noexcept {
        return (j < 0 || j > degree()) ? 0.0 : values_[static_cast<std::size_t>(j)];
    }
    std::span<const double> values() const noexcept { return values_; }

private:
    std::vector<double> values_;
};

/// Coefficients of prod_i (1 + lambda_i t) via e_j <- e_j + lambda_m e_{j-1}.
SigmaTable sigma_all(std::span<const double> lam);
inline SigmaTable sigma_all(const Lambda& lam) { return sigma_all(lam.values()); }

/// sigma_{k-1}(lambda|i) = d sigma_k / d lambda_i. Requires 1 <= k <= n.
double sigma_partial(const Lambda& lam, int k, int i);

/// sigma_{k-2}(lambda|ij) = d^2 sigma_k / d lambda_i d lambda_j. Requires i != j, 2 <= k <= n.
double sigma_second_partial(const Lambda& lam, int k, int i, int j);

/// Smallest j in [1, k] with sigma_j(lambda) <= 0, or nullopt if lambda is in Gamma_k.
std::optional<int> first_cone_violation(const SigmaTable& sigma, int k);
std::optional<int> first_cone_violation(const Lambda& lam, int k);

/// Open cone test: sigma_j > 0 strictly for 1 <= j <= k.
bool in_gamma_k(const Lambda& lam, int k);

/// min_{1<=j<=k} sigma_j / C(n,j). Positive exactly on Gamma_k.
double admissibility_margin(const SigmaTable& sigma, int n, int k);

/// n x n symmetric matrix of second partials of f in lambda, row-major.
struct LambdaHessian {
    int n = 0;
    std::vector<double> entries;

    double operator()(int i, int j) const { return entries[static_cast<std::size_t>(i * n + j)]; }
};

/// Value and derivatives of f; the Hessian is filled only when requested.
struct QuotientDerivatives {
    double value = 0.0;
    std::vector<double> gradient;
    LambdaHessian hessian;
};

/// Requires 0 <= l < k <= n = lam.size() and lambda in Gamma_k (NotAdmissible otherwise).
/// Does not require the stricter l + 2 <= k of QuotientSpec::make.
QuotientDerivatives quotient_derivatives(std::span<const double> lam, int k, int l, bool with_hessian);

double quotient_value(const Lambda& lam, const QuotientSpec& spec);
Lambda quotient_gradient(const Lambda& lam, const QuotientSpec& spec);
LambdaHessian quotient_hessian(const Lambda& lam, const QuotientSpec& spec);

/// Generalized Newton-MacLaurin:
///   [(sigma_m/C(n,m)) / (sigma_l/C(n,l))]^(1/(m-l)) <= [(sigma_r/C(n,r)) / (sigma_s/C(n,s))]^(1/(r-s))
/// with slack 1e-12 * max(1, rhs). Requires lambda in Gamma_m, m > l >= 0, r > s >= 0, m >= r, l >= s.
bool newton_maclaurin_holds(const Lambda& lam, int m, int l, int r, int s);

/// Rejection sampler for Gamma_k: entries ~ N(1, 1), redrawn until sigma_1..sigma_k > 0.
class GammaSampler {
public:
    static constexpr int kMaxRejections = 100000;

    explicit GammaSampler(std::uint64_t seed) : engine_(seed) {}

    /// Throws SamplerExhausted after kMaxRejections rejected draws.
    Lambda draw(int n, int k);

private:
    std::mt19937_64 engine_;
    std::normal_distribution<double> normal_{1.0, 1.0};
};

/// One draw from a fresh GammaSampler(seed).
Lambda sample_gamma_k(int n, int k, std::uint64_t seed);

}  // namespace hessquot
