#pragma once

#include <cstddef>
#include <map>
#include <span>
#include <string>
#include <type_traits>
#include <vector>

#include "altproj/errors.hpp"
#include "altproj/rational.hpp"
#include "altproj/series.hpp"

namespace altproj {

using Exponent = std::vector<unsigned>;

/// Sparse multivariate polynomial with exact rational coefficients.
///
/// Terms are keyed by exponent vector in lexicographic order; zero
/// coefficients are never stored.
class MultiPoly {
public:
    using TermMap = std::map<Exponent, Rational>;

    explicit MultiPoly(std::size_t nvars = 1);

    static MultiPoly constant(std::size_t nvars, const Rational& c);
    static MultiPoly variable(std::size_t nvars, std::size_t index);
    static MultiPoly monomial(const Exponent& exps, const Rational& c);

    std::size_t nvars() const noexcept { return nvars_; }
    const TermMap& terms() const noexcept { return terms_; }
    bool is_zero() const noexcept { return terms_.empty(); }
    unsigned degree() const;
    Rational coeff(const Exponent& e) const;

    /// Adds c * x^e, merging with an existing term.
    void add_term(const Exponent& e, const Rational& c);

    MultiPoly& operator+=(const MultiPoly& o);
    MultiPoly& operator-=(const MultiPoly& o);
    MultiPoly& operator*=(const Rational& s);
    friend MultiPoly operator+(MultiPoly a, const MultiPoly& b) { return a += b; }
    friend MultiPoly operator-(MultiPoly a, const MultiPoly& b) { return a -= b; }
    friend MultiPoly operator-(MultiPoly a) { return a *= Rational(-1); }
    friend MultiPoly operator*(MultiPoly a, const Rational& s) { return a *= s; }
    friend MultiPoly operator*(const MultiPoly& a, const MultiPoly& b);
    friend bool operator==(const MultiPoly& a, const MultiPoly& b) = default;

    MultiPoly pow(unsigned e) const;

    /// Exact partial derivative with respect to variable i.
    MultiPoly derivative(std::size_t i) const;

    /// Drops terms of total degree above max_degree.
    MultiPoly truncated(unsigned max_degree) const;

    /// Sets every variable not listed in `keep` to zero and renumbers the
    /// kept ones in the given order.
    MultiPoly restrict_to(const std::vector<std::size_t>& keep) const;

    /// Substitutes x_i -> sum_j m(i,j) y_j for a rational matrix m given by
    /// rows (nvars() rows, each of length new_nvars).
    MultiPoly linear_substitute(const std::vector<std::vector<Rational>>& rows, std::size_t new_nvars) const;

    double eval(std::span<const double> x) const;
    Rational eval(std::span<const Rational> x) const;

    /// Evaluates with univariate series arguments.
    template <typename T>
    Series<T> eval_series(const std::vector<Series<T>>& args) const;

    /// Substitutes multivariate polynomials for the variables.
    MultiPoly compose(const std::vector<MultiPoly>& args) const;

private:
    void check_exponent(const Exponent& e) const;

    std::size_t nvars_;
    TermMap terms_;
};

/// Component i is the partial derivative with respect to x_i.
std::vector<MultiPoly> gradient(const MultiPoly& p);

/// Row-major Hessian (nvars x nvars) of exact second derivatives.
std::vector<std::vector<MultiPoly>> hessian(const MultiPoly& p);

/// Exact coefficients of t -> p(t * a / |a|).
///
/// Every finite double is an exact rational, so p(t a) is formed exactly;
/// the normalization |a|^-k is exact for even k and for rational |a|, and
/// falls back to one floating division by |a| otherwise. The truncation
/// order is deg p.
UniSeries restrict_line(const MultiPoly& p, std::span<const double> a);

/// Same as restrict_line when |a| is rational; returns false otherwise.
bool restrict_line_exact(const MultiPoly& p, std::span<const Rational> a, ExactSeries& out);

/// Lowest nonzero term (d, c0) of a univariate series, ignoring coefficients
/// with magnitude at most abs_tol. Zero series throw ZeroSeriesError.
template <typename T>
std::pair<std::size_t, T> lowest_term(const Series<T>& s, double abs_tol = 0.0) {
    return s.lowest_term(abs_tol);
}

/// Fast double evaluation of a fixed polynomial (used in inner loops).
class CompiledPoly {
public:
    CompiledPoly() = default;
    explicit CompiledPoly(const MultiPoly& p);

    std::size_t nvars() const noexcept { return nvars_; }
    double operator()(std::span<const double> x) const;

private:
    std::size_t nvars_ = 0;
    std::vector<double> coeffs_;
    std::vector<unsigned> exps_;  // term-major, nvars_ per term
    std::vector<unsigned> max_exp_;
};

template <typename T>
Series<T> MultiPoly::eval_series(const std::vector<Series<T>>& args) const {
    if (args.size() != nvars_) {
        throw DimensionError("eval_series: expected " + std::to_string(nvars_) + " arguments");
    }
    std::size_t order = args.front().order();
    for (const auto& a : args) order = std::min(order, a.order());
    // Power tables per variable.
    std::vector<std::vector<Series<T>>> powers(nvars_);
    for (std::size_t i = 0; i < nvars_; ++i) {
        unsigned maxe = 0;
        for (const auto& [e, c] : terms_) maxe = std::max(maxe, e[i]);
        powers[i].push_back(Series<T>::monomial(0, T(1), order));
        for (unsigned k = 1; k <= maxe; ++k) powers[i].push_back((powers[i].back() * args[i]).truncated(order));
    }
    Series<T> acc(order);
    for (const auto& [e, c] : terms_) {
        Series<T> term = Series<T>::monomial(0, T(1), order);
        for (std::size_t i = 0; i < nvars_; ++i) {
            if (e[i] > 0) term = (term * powers[i][e[i]]).truncated(order);
        }
        if constexpr (std::is_same_v<T, Rational>) {
            term *= c;
        } else {
            term *= static_cast<T>(to_double(c));
        }
        acc += Series<T>(term.coeffs(), order);
    }
    return acc;
}

}  // namespace altproj
