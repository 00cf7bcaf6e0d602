#pragma once

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <string>
#include <utility>
#include <vector>

#include "altproj/errors.hpp"
#include "altproj/rational.hpp"

namespace altproj {

/// Univariate power series known through degree `order()`; coefficients of
/// higher degree are unknown and never reported.
template <typename T>
class Series {
public:
    Series() = default;

    /// Zero series known through degree `order`.
    explicit Series(std::size_t order) : coeffs_(order + 1, T(0)) {}

    /// Coefficients c[0..] with explicit truncation order. Entries past the
    /// order are dropped; missing ones are zero.
    Series(std::vector<T> coeffs, std::size_t order) : coeffs_(std::move(coeffs)) {
        coeffs_.resize(order + 1, T(0));
    }

    static Series monomial(std::size_t degree, T coeff, std::size_t order) {
        Series s(order);
        if (degree <= order) s.coeffs_[degree] = std::move(coeff);
        return s;
    }

    std::size_t order() const noexcept { return coeffs_.size() - 1; }
    const std::vector<T>& coeffs() const noexcept { return coeffs_; }

    const T& operator[](std::size_t k) const { return coeffs_.at(k); }
    T& operator[](std::size_t k) { return coeffs_.at(k); }

    /// Coefficient of t^k, or zero past the truncation order.
    T coeff(std::size_t k) const { return k < coeffs_.size() ? coeffs_[k] : T(0); }

    bool is_zero() const {
        return std::all_of(coeffs_.begin(), coeffs_.end(), [](const T& c) { return c == T(0); });
    }

    /// Same series, known through a lower order.
    Series truncated(std::size_t order) const {
        Series out(std::min(order, this->order()));
        std::copy_n(coeffs_.begin(), out.coeffs_.size(), out.coeffs_.begin());
        return out;
    }

    /// Lowest degree with |coefficient| > abs_tol and that coefficient.
    std::pair<std::size_t, T> lowest_term(double abs_tol = 0.0) const {
        for (std::size_t k = 0; k < coeffs_.size(); ++k) {
            using std::abs;
            if (coeffs_[k] != T(0) && to_double(abs(coeffs_[k])) > abs_tol) return {k, coeffs_[k]};
        }
        throw ZeroSeriesError("series vanishes through order " + std::to_string(order()));
    }

    Series& operator+=(const Series& o) {
        coeffs_.resize(std::min(coeffs_.size(), o.coeffs_.size()));
        for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] += o.coeffs_[k];
        return *this;
    }
    Series& operator-=(const Series& o) {
        coeffs_.resize(std::min(coeffs_.size(), o.coeffs_.size()));
        for (std::size_t k = 0; k < coeffs_.size(); ++k) coeffs_[k] -= o.coeffs_[k];
        return *this;
    }
    Series& operator*=(const T& s) {
        for (auto& c : coeffs_) c *= s;
        return *this;
    }

    friend Series operator+(Series a, const Series& b) { return a += b; }
    friend Series operator-(Series a, const Series& b) { return a -= b; }
    friend Series operator*(Series a, const T& s) { return a *= s; }
    friend Series operator*(const T& s, Series a) { return a *= s; }
    friend Series operator-(Series a) {
        for (auto& c : a.coeffs_) c = -c;
        return a;
    }

    /// Cauchy product. A factor with lowest degree v shifts the known range of
    /// the other by v, so the result is known through min(Ta + vb, Tb + va).
    friend Series operator*(const Series& a, const Series& b) {
        const std::size_t va = a.valuation_or(a.order() + 1);
        const std::size_t vb = b.valuation_or(b.order() + 1);
        const std::size_t order = std::min(a.order() + vb, b.order() + va);
        Series out(order);
        for (std::size_t i = va; i <= a.order() && i <= order; ++i) {
            if (a.coeffs_[i] == T(0)) continue;
            for (std::size_t j = vb; j <= b.order() && i + j <= order; ++j) {
                out.coeffs_[i + j] += a.coeffs_[i] * b.coeffs_[j];
            }
        }
        return out;
    }

    Series pow(unsigned e) const {
        Series result = Series::monomial(0, T(1), order());
        Series base = *this;
        while (e > 0) {
            if (e & 1U) result = result * base;
            e >>= 1U;
            if (e > 0) base = base * base;
        }
        return result;
    }

    /// this(inner(t)). Requires inner(0) = 0.
    Series compose(const Series& inner) const {
        if (inner.coeffs_[0] != T(0)) {
            throw PreconditionError("compose: inner series must vanish at 0");
        }
        const std::size_t v = inner.valuation_or(inner.order() + 1);
        // Unknown outer terms start at inner^(To+1) = O(t^(v(To+1))).
        const std::size_t order = std::min(v * (this->order() + 1) - 1, inner.order());
        Series result = Series::monomial(0, coeffs_.back(), order);
        for (std::size_t k = coeffs_.size() - 1; k-- > 0;) {
            result = (result * inner).truncated(order);
            result.coeffs_.resize(order + 1, T(0));
            result.coeffs_[0] += coeffs_[k];
        }
        result.coeffs_.resize(order + 1, T(0));
        return result;
    }

    Series derivative() const {
        if (order() == 0) return Series(0);
        Series out(order() - 1);
        for (std::size_t k = 1; k <= order(); ++k) out.coeffs_[k - 1] = coeffs_[k] * T(static_cast<long>(k));
        return out;
    }

    /// Horner evaluation of the known part.
    double evaluate(double t) const {
        double acc = 0.0;
        for (std::size_t k = coeffs_.size(); k-- > 0;) acc = acc * t + to_double(coeffs_[k]);
        return acc;
    }

private:
    std::size_t valuation_or(std::size_t fallback) const {
        for (std::size_t k = 0; k < coeffs_.size(); ++k) {
            if (coeffs_[k] != T(0)) return k;
        }
        return fallback;
    }

    std::vector<T> coeffs_{T(0)};
};

using UniSeries = Series<double>;
using ExactSeries = Series<Rational>;

template <typename T>
UniSeries to_double_series(const Series<T>& s) {
    std::vector<double> c;
    c.reserve(s.order() + 1);
    for (const auto& x : s.coeffs()) c.push_back(to_double(x));
    return UniSeries(std::move(c), s.order());
}

/// Square root of a series whose lowest term is c t^(2m) with c > 0.
/// The result c^(1/2) t^m (1 + ...) is known through order T - m.
template <typename T>
UniSeries sqrt_of_even_order_square(const Series<T>& s, double abs_tol = 0.0) {
    const auto [low, lead] = s.lowest_term(abs_tol);
    if (low % 2 != 0) {
        throw PreconditionError("sqrt: lowest degree " + std::to_string(low) + " is odd");
    }
    const double a0 = to_double(lead);
    if (!(a0 > 0.0)) throw PreconditionError("sqrt: leading coefficient is not positive");
    const std::size_t m = low / 2;
    const std::size_t n = s.order() - low;  // known terms of the normalized series
    std::vector<double> a(n + 1);
    for (std::size_t k = 0; k <= n; ++k) a[k] = to_double(s.coeff(low + k));
    std::vector<double> b(n + 1, 0.0);
    b[0] = std::sqrt(a0);
    for (std::size_t k = 1; k <= n; ++k) {
        double acc = a[k];
        for (std::size_t j = 1; j < k; ++j) acc -= b[j] * b[k - j];
        b[k] = acc / (2.0 * b[0]);
    }
    UniSeries out(m + n);
    for (std::size_t k = 0; k <= n; ++k) out[m + k] = b[k];
    return out;
}

}  // namespace altproj
