#include "hessquot/symfun.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "hessquot/errors.hpp"

namespace hessquot {

namespace {

// sigma_order of lam with entries skip_a and skip_b removed (pass -1 to keep all).
double sigma_without(std::span<const double> lam, int order, int skip_a, int skip_b) {
    if (order < 0) return 0.0;
    if (order == 0) return 1.0;
    std::vector<double> e(static_cast<std::size_t>(order) + 1, 0.0);
    e[0] = 1.0;
    int used = 0;
    for (int m = 0; m < static_cast<int>(lam.size()); ++m) {
        if (m == skip_a || m == skip_b) continue;
        ++used;
        for (int j = std::min(used, order); j >= 1; --j) e[j] += lam[m] * e[j - 1];
    }
    return e[static_cast<std::size_t>(order)];
}

void check_index(const Lambda& lam, int i, const char* what) {
    if (i < 0 || i >= lam.size())
        throw InvalidArgument(std::string(what) + ": index " + std::to_string(i) + " out of range for n = " +
                              std::to_string(lam.size()));
}

void check_orders(int n, int k, int l) {
    if (!(0 <= l && l < k && k <= n))
        throw InvalidArgument("quotient orders require 0 <= l < k <= n, got n=" + std::to_string(n) +
                              " k=" + std::to_string(k) + " l=" + std::to_string(l));
}

std::string format_lambda(std::span<const double> lam) {
    std::string out = "(";
    for (std::size_t i = 0; i < lam.size(); ++i) {
        if (i) out += ", ";
        out += std::to_string(lam[i]);
    }
    return out + ")";
}

}  // namespace

Lambda::Lambda(std::vector<double> values) : values_(std::move(values)) {
    if (values_.size() < 2) throw InvalidArgument("Lambda needs n >= 2 entries");
    for (double v : values_)
        if (!std::isfinite(v)) throw InvalidArgument("Lambda entries must be finite");
}

QuotientSpec QuotientSpec::make(int n, int k, int l, double tau) {
    QuotientSpec spec{n, k, l, tau};
    validate(spec);
    return spec;
}

void validate(const QuotientSpec& spec) {
    if (spec.n < 2) throw InvalidArgument("dimension n must be >= 2");
    if (spec.l < 0 || spec.l + 2 > spec.k || spec.k > spec.n)
        throw InvalidArgument("orders must satisfy 0 <= l and l + 2 <= k <= n (n=" + std::to_string(spec.n) +
                              ", k=" + std::to_string(spec.k) + ", l=" + std::to_string(spec.l) + ")");
    if (!(spec.tau >= 1.0) || !std::isfinite(spec.tau)) throw InvalidArgument("tau must be a finite real >= 1");
}

double binomial(int n, int k) {
    if (k < 0 || k > n) return 0.0;
    double c = 1.0;
    for (int j = 1; j <= k; ++j) c = c * (n - k + j) / j;
    return std::round(c);
}

double quotient_constant(int n, int k, int l) {
    return std::pow(binomial(n, k) / binomial(n, l), 1.0 / (k - l));
}

SigmaTable sigma_all(std::span<const double> lam) {
    const auto n = lam.size();
    std::vector<double> e(n + 1, 0.0);
    e[0] = 1.0;
    for (std::size_t m = 0; m < n; ++m)
        for (std::size_t j = m + 1; j >= 1; --j) e[j] += lam[m] * e[j - 1];
    return SigmaTable(std::move(e));
}

double sigma_partial(const Lambda& lam, int k, int i) {
    if (k < 1 || k > lam.size()) throw InvalidArgument("sigma_partial requires 1 <= k <= n");
    check_index(lam, i, "sigma_partial");
    return sigma_without(lam.values(), k - 1, i, -1);
}

double sigma_second_partial(const Lambda& lam, int k, int i, int j) {
    if (k < 2 || k > lam.size()) throw InvalidArgument("sigma_second_partial requires 2 <= k <= n");
    check_index(lam, i, "sigma_second_partial");
    check_index(lam, j, "sigma_second_partial");
    if (i == j) throw InvalidArgument("sigma_second_partial requires i != j (the diagonal second partial is 0)");
    return sigma_without(lam.values(), k - 2, i, j);
}

std::optional<int> first_cone_violation(const SigmaTable& sigma, int k) {
    for (int j = 1; j <= k; ++j)
        if (!(sigma[j] > 0.0)) return j;
    return std::nullopt;
}

std::optional<int> first_cone_violation(const Lambda& lam, int k) {
    if (k < 1 || k > lam.size()) throw InvalidArgument("cone order k must satisfy 1 <= k <= n");
    return first_cone_violation(sigma_all(lam), k);
}

bool in_gamma_k(const Lambda& lam, int k) { return !first_cone_violation(lam, k).has_value(); }

double admissibility_margin(const SigmaTable& sigma, int n, int k) {
    double margin = sigma[1] / binomial(n, 1);
    for (int j = 2; j <= k; ++j) margin = std::min(margin, sigma[j] / binomial(n, j));
    return margin;
}

QuotientDerivatives quotient_derivatives(std::span<const double> lam, int k, int l, bool with_hessian) {
    const int n = static_cast<int>(lam.size());
    check_orders(n, k, l);
    const SigmaTable sigma = sigma_all(lam);
    if (auto bad = first_cone_violation(sigma, k)) {
        throw NotAdmissible("lambda = " + format_lambda(lam) + " is outside Gamma_" + std::to_string(k) +
                                ": sigma_" + std::to_string(*bad) + " <= 0",
                            std::vector<double>(lam.begin(), lam.end()), *bad);
    }

    const double sk = sigma[k];
    const double sl = sigma[l];
    const double m = k - l;
    const double g = sk / sl;

    QuotientDerivatives out;
    out.value = std::pow(g, 1.0 / m);

    // a_i = sigma_{k-1}(lambda|i), b_i = sigma_{l-1}(lambda|i)
    std::vector<double> a(static_cast<std::size_t>(n)), b(static_cast<std::size_t>(n)), dg(static_cast<std::size_t>(n));
    out.gradient.resize(static_cast<std::size_t>(n));
    const double outer = std::pow(g, 1.0 / m - 1.0) / m;
    for (int i = 0; i < n; ++i) {
        a[i] = sigma_without(lam, k - 1, i, -1);
        b[i] = sigma_without(lam, l - 1, i, -1);
        dg[i] = (a[i] * sl - sk * b[i]) / (sl * sl);
        out.gradient[i] = outer * dg[i];
    }

    if (!with_hessian) return out;

    // f_ij = (1/m)(1/m - 1) g^(1/m - 2) g_i g_j + (1/m) g^(1/m - 1) g_ij, with
    // g_ij = (a_ij sl - sk b_ij - a_i b_j - a_j b_i) / sl^2 + 2 sk b_i b_j / sl^3.
    const double curv = (1.0 / m) * (1.0 / m - 1.0) * std::pow(g, 1.0 / m - 2.0);
    out.hessian.n = n;
    out.hessian.entries.assign(static_cast<std::size_t>(n * n), 0.0);
    for (int i = 0; i < n; ++i) {
        for (int j = i; j < n; ++j) {
            const double aij = (i == j) ? 0.0 : sigma_without(lam, k - 2, i, j);
            const double bij = (i == j) ? 0.0 : sigma_without(lam, l - 2, i, j);
            const double gij = (aij * sl - sk * bij - a[i] * b[j] - a[j] * b[i]) / (sl * sl) +
                               2.0 * sk * b[i] * b[j] / (sl * sl * sl);
            const double fij = curv * dg[i] * dg[j] + outer * gij;
            out.hessian.entries[static_cast<std::size_t>(i * n + j)] = fij;
            out.hessian.entries[static_cast<std::size_t>(j * n + i)] = fij;
        }
    }
    return out;
}

namespace {

void check_spec_matches(const Lambda& lam, const QuotientSpec& spec) {
    if (lam.size() != spec.n)
        throw InvalidArgument("lambda has " + std::to_string(lam.size()) + " entries but spec.n = " +
                              std::to_string(spec.n));
}

}  // namespace

double quotient_value(const Lambda& lam, const QuotientSpec& spec) {
    check_spec_matches(lam, spec);
    return quotient_derivatives(lam.values(), spec.k, spec.l, false).value;
}

Lambda quotient_gradient(const Lambda& lam, const QuotientSpec& spec) {
    check_spec_matches(lam, spec);
    return Lambda(quotient_derivatives(lam.values(), spec.k, spec.l, false).gradient);
}

LambdaHessian quotient_hessian(const Lambda& lam, const QuotientSpec& spec) {
    check_spec_matches(lam, spec);
    return quotient_derivatives(lam.values(), spec.k, spec.l, true).hessian;
}

bool newton_maclaurin_holds(const Lambda& lam, int m, int l, int r, int s) {
    const int n = lam.size();
    if (!(m > l && l >= 0 && r > s && s >= 0 && m >= r && l >= s && m <= n))
        throw InvalidArgument("Newton-MacLaurin requires m > l >= 0, r > s >= 0, m >= r, l >= s, m <= n");
    const SigmaTable sigma = sigma_all(lam);
    if (auto bad = first_cone_violation(sigma, m))
        throw InvalidArgument("Newton-MacLaurin requires lambda in Gamma_" + std::to_string(m) + " (sigma_" +
                              std::to_string(*bad) + " <= 0)");
    auto normalized = [&](int j) { return sigma[j] / binomial(n, j); };
    const double lhs = std::pow(normalized(m) / normalized(l), 1.0 / (m - l));
    const double rhs = std::pow(normalized(r) / normalized(s), 1.0 / (r - s));
    return lhs <= rhs + 1e-12 * std::max(1.0, rhs);
}

Lambda GammaSampler::draw(int n, int k) {
    if (n < 2 || k < 1 || k > n) throw InvalidArgument("sampler requires n >= 2 and 1 <= k <= n");
    std::vector<double> values(static_cast<std::size_t>(n));
    for (int attempt = 0; attempt < kMaxRejections; ++attempt) {
        for (double& v : values) v = normal_(engine_);
        if (!first_cone_violation(sigma_all(values), k)) return Lambda(values);
    }
    throw SamplerExhausted("no Gamma_" + std::to_string(k) + " sample in " + std::to_string(kMaxRejections) +
                           " draws (n = " + std::to_string(n) + ")");
}

Lambda sample_gamma_k(int n, int k, std::uint64_t seed) { return GammaSampler(seed).draw(n, k); }

}  // namespace hessquot
