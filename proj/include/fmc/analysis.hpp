#pragma once

// Symbol-side norms, Schatten quasi-norms, traces and Sobolev-type growth and
// decay profiles of invariant operators and coefficient sequences.

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <functional>
#include <limits>
#include <span>
#include <string>
#include <vector>

#include "fmc/core.hpp"

namespace fmc {

/// r in (0, inf]; infinity selects the operator norm.
class SchattenExponent {
public:
    explicit SchattenExponent(double r) : r_(r) {
        if (std::isnan(r) || !(r > 0.0)) {
            throw ExponentError("Schatten exponent must be positive, got " + std::to_string(r));
        }
    }

    static SchattenExponent infinity() { return SchattenExponent(std::numeric_limits<double>::infinity()); }

    double value() const noexcept { return r_; }
    bool is_infinite() const noexcept { return std::isinf(r_); }

private:
    double r_;
};

namespace detail {

/// Kahan-compensated running sum.
class CompensatedSum {
public:
    void add(double x) {
        const double y = x - carry_;
        const double t = sum_ + y;
        carry_ = (t - sum_) - y;
        sum_ = t;
    }
    double value() const noexcept { return sum_; }

private:
    double sum_ = 0.0;
    double carry_ = 0.0;
};

struct LineFit {
    double slope;
    double intercept;
};

inline LineFit least_squares_line(std::span<const double> x, std::span<const double> y) {
    const double n = static_cast<double>(x.size());
    double mx = 0.0, my = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        mx += x[i];
        my += y[i];
    }
    mx /= n;
    my /= n;
    double sxx = 0.0, sxy = 0.0;
    for (std::size_t i = 0; i < x.size(); ++i) {
        sxx += (x[i] - mx) * (x[i] - mx);
        sxy += (x[i] - mx) * (y[i] - my);
    }
    if (sxx == 0.0) throw InsufficientDataError("fit needs at least two distinct abscissae");
    const double slope = sxy / sxx;
    return {slope, my - slope * mx};
}

}  // namespace detail

/// One-sided (Hestenes) Jacobi: orthogonalise the columns of A by plane
/// rotations; the final column norms are the singular values.
inline std::vector<double> block_singular_values(const CMatrix& a) {
    if (!a.is_square()) throw ShapeError("singular values requested for " + a.shape_string() + " matrix");
    const std::size_t n = a.cols();
    CMatrix w = a;
    constexpr int max_sweeps = 100;
    const double eps = std::max(1e-15, static_cast<double>(n) * std::numeric_limits<double>::epsilon());

    for (int sweep = 0;; ++sweep) {
        if (sweep == max_sweeps) throw ConvergenceError("one-sided Jacobi SVD did not converge");
        bool rotated = false;
        for (std::size_t i = 0; i + 1 < n; ++i) {
            for (std::size_t j = i + 1; j < n; ++j) {
                double alpha = 0.0, beta = 0.0;
                Complex gamma{};
                for (std::size_t k = 0; k < n; ++k) {
                    alpha += std::norm(w(k, i));
                    beta += std::norm(w(k, j));
                    gamma += std::conj(w(k, i)) * w(k, j);
                }
                const double g = std::abs(gamma);
                if (g == 0.0 || g <= eps * std::sqrt(alpha * beta)) continue;
                rotated = true;
                const Complex phase = gamma / g;
                const double zeta = (beta - alpha) / (2.0 * g);
                const double t = (zeta >= 0 ? 1.0 : -1.0) / (std::abs(zeta) + std::sqrt(1.0 + zeta * zeta));
                const double c = 1.0 / std::sqrt(1.0 + t * t);
                const double s = c * t;
                for (std::size_t k = 0; k < n; ++k) {
                    const Complex xi = w(k, i);
                    const Complex xj = w(k, j) * std::conj(phase);
                    w(k, i) = c * xi - s * xj;
                    w(k, j) = s * xi + c * xj;
                }
            }
        }
        if (!rotated) break;
    }

    std::vector<double> sv(n);
    for (std::size_t k = 0; k < n; ++k) {
        double acc = 0.0;
        for (std::size_t i = 0; i < n; ++i) acc += std::norm(w(i, k));
        sv[k] = std::sqrt(acc);
    }
    std::sort(sv.begin(), sv.end(), std::greater<>());
    return sv;
}

/// sup_l ||sigma(l)||_op, the norm of the quantized operator.
inline double operator_norm_from_symbol(const MatrixSymbol& sigma) {
    if (sigma.empty()) throw EmptyInputError("operator norm of an empty symbol");
    double best = 0.0;
    for (const auto& b : sigma.blocks()) best = std::max(best, block_singular_values(b).front());
    return best;
}

/// (sum_l sum_k s_k(sigma(l))^r)^{1/r}; a quasi-norm when r < 1.
inline double schatten_norm(const MatrixSymbol& sigma, SchattenExponent r) {
    if (r.is_infinite()) return operator_norm_from_symbol(sigma);
    if (sigma.empty()) throw EmptyInputError("Schatten norm of an empty symbol");

    std::vector<std::vector<double>> singular;
    singular.reserve(sigma.block_count());
    double scale = 0.0;
    for (const auto& b : sigma.blocks()) {
        singular.push_back(block_singular_values(b));
        scale = std::max(scale, singular.back().front());
    }
    if (scale == 0.0) return 0.0;
    // Rescale by max(s) only when s^r could leave the double range.
    if (r.value() * std::abs(std::log2(scale)) < 900.0) scale = 1.0;

    detail::CompensatedSum sum;
    for (const auto& block : singular)
        for (double s : block) sum.add(std::pow(s / scale, r.value()));
    return scale * std::pow(sum.value(), 1.0 / r.value());
}

/// sum_l Tr sigma(l).
inline Complex trace_from_symbol(const MatrixSymbol& sigma) {
    detail::CompensatedSum re, im;
    for (const auto& b : sigma.blocks()) {
        for (std::size_t k = 0; k < b.rows(); ++k) {
            re.add(b(k, k).real());
            im.add(b(k, k).imag());
        }
    }
    return {re.value(), im.value()};
}

/// ||sigma(l)||_op <= C (1 + lambda_l)^{m / nu}, with m fitted by least squares
/// in log space and C the smallest constant making the bound hold.
struct SobolevFit {
    double nu;
    double m;
    double C;
    std::vector<double> residuals;  // slack C (1+lambda_l)^{m/nu} - ||sigma(l)||_op per block
};

inline SobolevFit sobolev_fit(const MatrixSymbol& sigma, std::span<const double> lambdas, double nu) {
    if (!(nu > 0.0) || !std::isfinite(nu)) throw ArgumentError("order nu must be a positive real");
    if (lambdas.size() != sigma.block_count()) {
        throw ShapeError("symbol has " + std::to_string(sigma.block_count()) + " blocks but " +
                         std::to_string(lambdas.size()) + " eigenvalues were given");
    }
    std::vector<double> norms;
    std::vector<double> x, y;
    for (std::size_t l = 0; l < sigma.block_count(); ++l) {
        if (!(1.0 + lambdas[l] > 0.0)) {
            throw ArgumentError("1 + lambda must be positive, block " + std::to_string(l) + " has lambda " +
                                std::to_string(lambdas[l]));
        }
        norms.push_back(block_singular_values(sigma.block(l)).front());
        if (norms.back() > 0.0) {
            x.push_back(std::log1p(lambdas[l]) / nu);
            y.push_back(std::log(norms.back()));
        }
    }
    if (x.size() < 2 || std::all_of(x.begin(), x.end(), [&](double v) { return v == x.front(); })) {
        throw InsufficientDataError("Sobolev fit needs at least two nonzero blocks with distinct eigenvalues");
    }
    const double m = detail::least_squares_line(x, y).slope;

    SobolevFit fit{nu, m, 0.0, {}};
    for (std::size_t l = 0; l < norms.size(); ++l) {
        if (norms[l] > 0.0) fit.C = std::max(fit.C, norms[l] / std::pow(1.0 + lambdas[l], m / nu));
    }
    for (std::size_t l = 0; l < norms.size(); ++l) {
        fit.residuals.push_back(fit.C * std::pow(1.0 + lambdas[l], m / nu) - norms[l]);
    }
    return fit;
}

inline SobolevFit sobolev_fit(const MatrixSymbol& sigma, const EigenPartition& p, double nu) {
    sigma.check_aligned(p);
    return sobolev_fit(sigma, p.lambdas(), nu);
}

/// Slope N of log |c(j)| against -log(1 + lambda_j); a finite-data profile of
/// how fast the coefficients decay, not a smoothness verdict.
inline double decay_order(const CoefficientVector& c, const EigenPartition& p) {
    c.check_aligned(p);
    std::vector<double> x, y;
    for (std::size_t j = 0; j < c.block_count(); ++j) {
        const double mag = norm(c.block(j));
        if (mag <= 1e-300) continue;
        if (!(1.0 + p.lambda(j) > 0.0)) {
            throw ArgumentError("1 + lambda must be positive at block " + std::to_string(j));
        }
        x.push_back(-std::log1p(p.lambda(j)));
        y.push_back(std::log(mag));
    }
    if (x.size() < 2) throw InsufficientDataError("decay order needs at least two nonzero blocks");
    return detail::least_squares_line(x, y).slope;
}

/// (sum_j (1 + lambda_j)^{2s/nu} ||c(j)||^2)^{1/2}.
inline double sobolev_norm(const CoefficientVector& c, const EigenPartition& p, double s, double nu) {
    c.check_aligned(p);
    if (!(nu > 0.0) || !std::isfinite(nu)) throw ArgumentError("order nu must be a positive real");
    detail::CompensatedSum sum;
    for (std::size_t j = 0; j < c.block_count(); ++j) {
        const double base = 1.0 + p.lambda(j);
        if (!(base > 0.0)) throw ArgumentError("1 + lambda must be positive at block " + std::to_string(j));
        sum.add(std::pow(base, 2.0 * s / nu) * norm_squared(c.block(j)));
    }
    return std::sqrt(sum.value());
}

}  // namespace fmc
