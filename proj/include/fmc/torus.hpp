#pragma once

// Truncated Fourier model of L^2(T^n), n <= 3, in frequency coordinates:
// coordinate alpha carries the exponential e^{2 pi i j_alpha . x}, so the
// Fourier basis is the standard basis and nothing is ever sampled.
//
// Two partitions live on the same space. The fine one has a block per
// frequency; the coarse one groups frequencies by |j|^2 (Laplacian
// eigenspaces, no 4 pi^2 factor).

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <functional>
#include <map>
#include <optional>
#include <type_traits>
#include <string>
#include <utility>
#include <vector>

#include "fmc/core.hpp"

namespace fmc::torus {

/// Lattice point in Z^n; unused trailing components stay zero.
using Frequency = std::array<int, 3>;

inline long long norm_squared(const Frequency& j) {
    long long s = 0;
    for (int c : j) s += static_cast<long long>(c) * c;
    return s;
}

inline std::string to_string(const Frequency& j, int n) {
    std::string s = "(";
    for (int i = 0; i < n; ++i) {
        if (i) s += ",";
        s += std::to_string(j[static_cast<std::size_t>(i)]);
    }
    return s + ")";
}

class TorusModel {
public:
    TorusModel(int n, int cutoff) : n_(n), cutoff_(cutoff) {
        if (n < 1 || n > 3) throw ArgumentError("torus dimension must be 1, 2 or 3, got " + std::to_string(n));
        if (cutoff < 1) throw ArgumentError("cutoff must be at least 1, got " + std::to_string(cutoff));
        const int lo2 = n >= 2 ? -cutoff : 0, hi2 = n >= 2 ? cutoff : 0;
        const int lo3 = n >= 3 ? -cutoff : 0, hi3 = n >= 3 ? cutoff : 0;
        for (int a = -cutoff; a <= cutoff; ++a)
            for (int b = lo2; b <= hi2; ++b)
                for (int c = lo3; c <= hi3; ++c) frequencies_.push_back({a, b, c});
        std::sort(frequencies_.begin(), frequencies_.end(), [](const Frequency& x, const Frequency& y) {
            const auto nx = torus::norm_squared(x), ny = torus::norm_squared(y);
            return nx != ny ? nx < ny : x < y;
        });
    }

    int n() const noexcept { return n_; }
    int cutoff() const noexcept { return cutoff_; }
    std::size_t dim() const noexcept { return frequencies_.size(); }
    const std::vector<Frequency>& frequencies() const noexcept { return frequencies_; }
    const Frequency& frequency(std::size_t alpha) const { return frequencies_.at(alpha); }

    /// Coordinate of frequency j, if it lies inside the cube.
    std::optional<std::size_t> index_of(const Frequency& j) const {
        const auto it = std::find(frequencies_.begin(), frequencies_.end(), j);
        if (it == frequencies_.end()) return std::nullopt;
        return static_cast<std::size_t>(it - frequencies_.begin());
    }

    AmbientSpace ambient() const {
        std::vector<std::string> labels;
        labels.reserve(frequencies_.size());
        for (const auto& j : frequencies_) labels.push_back(to_string(j, n_));
        return AmbientSpace(frequencies_.size(), std::move(labels));
    }

    /// Coarse blocks with |j|^2 > K^2 may miss lattice points outside the cube.
    bool possibly_truncated(long long ell) const {
        return ell > static_cast<long long>(cutoff_) * cutoff_;
    }

private:
    int n_;
    int cutoff_;
    std::vector<Frequency> frequencies_;
};

inline TorusModel build_torus_model(int n, int cutoff) { return TorusModel(n, cutoff); }

/// One singleton block per frequency. Block eigenvalues are the synthetic
/// indices 0, 1, 2, ... in frequency order, not Laplacian eigenvalues.
inline EigenPartition fine_partition(const TorusModel& model) {
    const std::size_t n = model.dim();
    std::vector<double> lambdas(n);
    for (std::size_t i = 0; i < n; ++i) lambdas[i] = static_cast<double>(i);
    return EigenPartition(model.ambient(), CMatrix::identity(n), std::move(lambdas),
                          std::vector<std::size_t>(n, 1));
}

/// Blocks span{e_j : |j|^2 = ell} for each realised ell, lambda = ell.
inline EigenPartition coarse_partition(const TorusModel& model) {
    std::vector<double> lambdas;
    std::vector<std::size_t> sizes;
    for (const auto& j : model.frequencies()) {
        const double ell = static_cast<double>(norm_squared(j));
        if (lambdas.empty() || lambdas.back() != ell) {
            lambdas.push_back(ell);
            sizes.push_back(0);
        }
        ++sizes.back();
    }
    return EigenPartition(model.ambient(), CMatrix::identity(model.dim()), std::move(lambdas), std::move(sizes));
}

/// #{j in Z^n : |j|_inf <= K, |j|^2 = ell}, by enumeration of the cube.
inline std::size_t multiplicity(long long ell, int n, int cutoff) {
    if (n < 1 || n > 3) throw ArgumentError("torus dimension must be 1, 2 or 3, got " + std::to_string(n));
    if (ell < 0 || cutoff < 0) return 0;
    const int k2 = n >= 2 ? cutoff : 0;
    const int k3 = n >= 3 ? cutoff : 0;
    std::size_t count = 0;
    for (long long a = -cutoff; a <= cutoff; ++a)
        for (long long b = -k2; b <= k2; ++b)
            for (long long c = -k3; c <= k3; ++c)
                if (a * a + b * b + c * c == ell) ++count;
    return count;
}

/// (ell, d_ell) for every realised ell, ascending.
inline std::vector<std::pair<long long, std::size_t>> multiplicity_table(const TorusModel& model) {
    std::vector<std::pair<long long, std::size_t>> table;
    for (const auto& j : model.frequencies()) {
        const long long ell = norm_squared(j);
        if (table.empty() || table.back().first != ell) table.emplace_back(ell, 0);
        ++table.back().second;
    }
    return table;
}

/// Frequency -> value; an empty optional marks a frequency where it is undefined.
class MultiplierFunction {
public:
    using Fn = std::function<std::optional<Complex>(const Frequency&)>;

    explicit MultiplierFunction(Fn fn) : fn_(std::move(fn)) {}

    /// Wraps a total function Frequency -> Complex.
    template <typename F>
        requires std::is_invocable_r_v<Complex, F, const Frequency&>
    static MultiplierFunction total(F f) {
        return MultiplierFunction([f = std::move(f)](const Frequency& j) -> std::optional<Complex> { return f(j); });
    }

    static MultiplierFunction from_table(std::map<Frequency, Complex> table) {
        return MultiplierFunction([t = std::move(table)](const Frequency& j) -> std::optional<Complex> {
            const auto it = t.find(j);
            if (it == t.end()) return std::nullopt;
            return it->second;
        });
    }

    std::optional<Complex> operator()(const Frequency& j) const { return fn_(j); }

private:
    Fn fn_;
};

/// Diagonal operator with entry a(j_alpha) at coordinate alpha.
inline DenseOperator translation_invariant_operator(const MultiplierFunction& a, const TorusModel& model) {
    CMatrix m(model.dim(), model.dim());
    for (std::size_t alpha = 0; alpha < model.dim(); ++alpha) {
        const auto v = a(model.frequency(alpha));
        if (!v || !std::isfinite(v->real()) || !std::isfinite(v->imag())) {
            throw EvaluationError("multiplier undefined at frequency " +
                                  to_string(model.frequency(alpha), model.n()));
        }
        m(alpha, alpha) = *v;
    }
    return DenseOperator(std::move(m));
}

/// Identity except for a plane rotation by `angle` mixing the coordinates of
/// frequencies j and k. With |j|^2 = |k|^2 the result preserves every coarse
/// block but is not translation invariant.
inline DenseOperator frequency_rotation(const TorusModel& model, const Frequency& j, const Frequency& k,
                                        double angle) {
    const auto a = model.index_of(j);
    const auto b = model.index_of(k);
    if (!a || !b) throw ArgumentError("rotation frequencies must lie inside the model");
    if (*a == *b) throw ArgumentError("rotation needs two distinct frequencies");
    CMatrix m = CMatrix::identity(model.dim());
    const double c = std::cos(angle), s = std::sin(angle);
    m(*a, *a) = c;
    m(*a, *b) = -s;
    m(*b, *a) = s;
    m(*b, *b) = c;
    return DenseOperator(std::move(m));
}

/// The Laplacian diag(|j|^2) in frequency coordinates.
inline DenseOperator laplacian(const TorusModel& model) {
    return translation_invariant_operator(
        MultiplierFunction::total([](const Frequency& j) { return Complex(static_cast<double>(norm_squared(j))); }),
        model);
}

}  // namespace fmc::torus
