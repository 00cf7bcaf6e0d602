#include "altproj/multipoly.hpp"

#include <algorithm>
#include <cmath>
#include <numeric>

namespace altproj {

MultiPoly::MultiPoly(std::size_t nvars) : nvars_(nvars) {
    if (nvars == 0) throw DimensionError("MultiPoly needs at least one variable");
}

MultiPoly MultiPoly::constant(std::size_t nvars, const Rational& c) {
    MultiPoly p(nvars);
    p.add_term(Exponent(nvars, 0), c);
    return p;
}

MultiPoly MultiPoly::variable(std::size_t nvars, std::size_t index) {
    if (index >= nvars) throw DimensionError("variable index out of range");
    Exponent e(nvars, 0);
    e[index] = 1;
    return monomial(e, Rational(1));
}

MultiPoly MultiPoly::monomial(const Exponent& exps, const Rational& c) {
    MultiPoly p(exps.size());
    p.add_term(exps, c);
    return p;
}

void MultiPoly::check_exponent(const Exponent& e) const {
    if (e.size() != nvars_) {
        throw DimensionError("exponent of length " + std::to_string(e.size()) + " for a polynomial in " +
                             std::to_string(nvars_) + " variables");
    }
}

unsigned MultiPoly::degree() const {
    unsigned d = 0;
    for (const auto& [e, c] : terms_) d = std::max(d, std::accumulate(e.begin(), e.end(), 0U));
    return d;
}

Rational MultiPoly::coeff(const Exponent& e) const {
    check_exponent(e);
    auto it = terms_.find(e);
    return it == terms_.end() ? Rational(0) : it->second;
}

void MultiPoly::add_term(const Exponent& e, const Rational& c) {
    check_exponent(e);
    if (c == 0) return;
    auto [it, inserted] = terms_.try_emplace(e, c);
    if (!inserted) {
        it->second += c;
        if (it->second == 0) terms_.erase(it);
    }
}

MultiPoly& MultiPoly::operator+=(const MultiPoly& o) {
    if (o.nvars_ != nvars_) throw DimensionError("adding polynomials in different variable counts");
    for (const auto& [e, c] : o.terms_) add_term(e, c);
    return *this;
}

MultiPoly& MultiPoly::operator-=(const MultiPoly& o) {
    if (o.nvars_ != nvars_) throw DimensionError("subtracting polynomials in different variable counts");
    for (const auto& [e, c] : o.terms_) add_term(e, -c);
    return *this;
}

MultiPoly& MultiPoly::operator*=(const Rational& s) {
    if (s == 0) {
        terms_.clear();
        return *this;
    }
    for (auto& [e, c] : terms_) c *= s;
    return *this;
}

MultiPoly operator*(const MultiPoly& a, const MultiPoly& b) {
    if (a.nvars_ != b.nvars_) throw DimensionError("multiplying polynomials in different variable counts");
    MultiPoly out(a.nvars_);
    Exponent e(a.nvars_);
    for (const auto& [ea, ca] : a.terms_) {
        for (const auto& [eb, cb] : b.terms_) {
            for (std::size_t i = 0; i < e.size(); ++i) e[i] = ea[i] + eb[i];
            out.add_term(e, ca * cb);
        }
    }
    return out;
}

MultiPoly MultiPoly::pow(unsigned e) const {
    MultiPoly result = constant(nvars_, Rational(1));
    MultiPoly base = *this;
    while (e > 0) {
        if (e & 1U) result = result * base;
        e >>= 1U;
        if (e > 0) base = base * base;
    }
    return result;
}

MultiPoly MultiPoly::derivative(std::size_t i) const {
    if (i >= nvars_) throw DimensionError("derivative index out of range");
    MultiPoly out(nvars_);
    for (const auto& [e, c] : terms_) {
        if (e[i] == 0) continue;
        Exponent d = e;
        d[i] -= 1;
        out.add_term(d, c * e[i]);
    }
    return out;
}

MultiPoly MultiPoly::truncated(unsigned max_degree) const {
    MultiPoly out(nvars_);
    for (const auto& [e, c] : terms_) {
        if (std::accumulate(e.begin(), e.end(), 0U) <= max_degree) out.terms_.emplace(e, c);
    }
    return out;
}

MultiPoly MultiPoly::restrict_to(const std::vector<std::size_t>& keep) const {
    for (auto k : keep) {
        if (k >= nvars_) throw DimensionError("restrict_to: index out of range");
    }
    MultiPoly out(keep.size());
    for (const auto& [e, c] : terms_) {
        unsigned kept_degree = 0;
        Exponent r(keep.size());
        for (std::size_t j = 0; j < keep.size(); ++j) {
            r[j] = e[keep[j]];
            kept_degree += r[j];
        }
        const unsigned total = std::accumulate(e.begin(), e.end(), 0U);
        if (kept_degree == total) out.add_term(r, c);
    }
    return out;
}

MultiPoly MultiPoly::linear_substitute(const std::vector<std::vector<Rational>>& rows, std::size_t new_nvars) const {
    if (rows.size() != nvars_) throw DimensionError("linear_substitute: need one row per variable");
    std::vector<MultiPoly> args;
    args.reserve(nvars_);
    for (const auto& row : rows) {
        if (row.size() != new_nvars) throw DimensionError("linear_substitute: row length mismatch");
        MultiPoly lin(new_nvars);
        for (std::size_t j = 0; j < new_nvars; ++j) {
            Exponent e(new_nvars, 0);
            e[j] = 1;
            lin.add_term(e, row[j]);
        }
        args.push_back(std::move(lin));
    }
    return compose(args);
}

MultiPoly MultiPoly::compose(const std::vector<MultiPoly>& args) const {
    if (args.size() != nvars_) throw DimensionError("compose: expected one argument per variable");
    const std::size_t m = args.front().nvars();
    for (const auto& a : args) {
        if (a.nvars() != m) throw DimensionError("compose: arguments over different variable counts");
    }
    std::vector<std::vector<MultiPoly>> powers(nvars_);
    for (std::size_t i = 0; i < nvars_; ++i) {
        unsigned maxe = 0;
        for (const auto& [e, c] : terms_) maxe = std::max(maxe, e[i]);
        powers[i].push_back(constant(m, Rational(1)));
        for (unsigned k = 1; k <= maxe; ++k) powers[i].push_back(powers[i].back() * args[i]);
    }
    MultiPoly out(m);
    for (const auto& [e, c] : terms_) {
        MultiPoly term = constant(m, c);
        for (std::size_t i = 0; i < nvars_; ++i) {
            if (e[i] > 0) term = term * powers[i][e[i]];
        }
        out += term;
    }
    return out;
}

namespace {

template <typename T>
T eval_impl(const MultiPoly::TermMap& terms, std::size_t nvars, std::span<const T> x) {
    if (x.size() != nvars) {
        throw DimensionError("eval: point has " + std::to_string(x.size()) + " coordinates, polynomial has " +
                             std::to_string(nvars) + " variables");
    }
    T acc(0);
    for (const auto& [e, c] : terms) {
        T term;
        if constexpr (std::is_same_v<T, Rational>) {
            term = c;
        } else {
            term = to_double(c);
        }
        for (std::size_t i = 0; i < nvars; ++i) {
            for (unsigned k = 0; k < e[i]; ++k) term *= x[i];
        }
        acc += term;
    }
    return acc;
}

}  // namespace

double MultiPoly::eval(std::span<const double> x) const { return eval_impl<double>(terms_, nvars_, x); }

Rational MultiPoly::eval(std::span<const Rational> x) const { return eval_impl<Rational>(terms_, nvars_, x); }

std::vector<MultiPoly> gradient(const MultiPoly& p) {
    std::vector<MultiPoly> g;
    g.reserve(p.nvars());
    for (std::size_t i = 0; i < p.nvars(); ++i) g.push_back(p.derivative(i));
    return g;
}

std::vector<std::vector<MultiPoly>> hessian(const MultiPoly& p) {
    std::vector<std::vector<MultiPoly>> h;
    for (const auto& gi : gradient(p)) h.push_back(gradient(gi));
    return h;
}

namespace {

// Exact coefficients of t -> p(t a).
ExactSeries unnormalized_line(const MultiPoly& p, std::span<const Rational> a) {
    const std::size_t order = p.degree();
    std::vector<ExactSeries> args;
    for (const auto& ai : a) args.push_back(ExactSeries::monomial(1, ai, order));
    return p.eval_series(args);
}

Rational norm_squared(std::span<const Rational> a) {
    Rational n2(0);
    for (const auto& ai : a) n2 += ai * ai;
    return n2;
}

}  // namespace

bool restrict_line_exact(const MultiPoly& p, std::span<const Rational> a, ExactSeries& out) {
    if (a.size() != p.nvars()) throw DimensionError("restrict_line: direction length mismatch");
    const Rational n2 = norm_squared(a);
    if (n2 == 0) throw PreconditionError("restrict_line: zero direction vector");
    Rational norm;
    if (!exact_sqrt(n2, norm)) return false;
    ExactSeries s = unnormalized_line(p, a);
    Rational scale(1);
    for (std::size_t k = 0; k <= s.order(); ++k) {
        s[k] /= scale;
        scale *= norm;
    }
    out = std::move(s);
    return true;
}

UniSeries restrict_line(const MultiPoly& p, std::span<const double> a) {
    if (a.size() != p.nvars()) throw DimensionError("restrict_line: direction length mismatch");
    std::vector<Rational> ar;
    ar.reserve(a.size());
    for (double v : a) ar.push_back(rational_from_double(v));
    const Rational n2 = norm_squared(ar);
    if (n2 == 0) throw PreconditionError("restrict_line: zero direction vector");
    ExactSeries exact;
    if (restrict_line_exact(p, ar, exact)) return to_double_series(exact);
    // |a| irrational: c_k / |a|^k = (c_k / (|a|^2)^floor(k/2)) / |a|^(k mod 2).
    const ExactSeries s = unnormalized_line(p, ar);
    const double norm = std::sqrt(to_double(n2));
    UniSeries out(s.order());
    Rational even_scale(1);
    for (std::size_t k = 0; k <= s.order(); ++k) {
        if (k % 2 == 0 && k > 0) even_scale *= n2;
        const Rational reduced = s[k] / even_scale;
        out[k] = (k % 2 == 1) ? to_double(reduced) / norm : to_double(reduced);
    }
    return out;
}

CompiledPoly::CompiledPoly(const MultiPoly& p) : nvars_(p.nvars()), max_exp_(p.nvars(), 0) {
    for (const auto& [e, c] : p.terms()) {
        coeffs_.push_back(to_double(c));
        for (std::size_t i = 0; i < nvars_; ++i) {
            exps_.push_back(e[i]);
            max_exp_[i] = std::max(max_exp_[i], e[i]);
        }
    }
}

double CompiledPoly::operator()(std::span<const double> x) const {
    // Small fixed power tables; polynomials here have low degree.
    constexpr std::size_t kMaxDeg = 32;
    double acc = 0.0;
    double pw[8][kMaxDeg + 1];
    const bool tabled = nvars_ <= 8 && std::all_of(max_exp_.begin(), max_exp_.end(), [](unsigned m) { return m <= kMaxDeg; });
    if (tabled) {
        for (std::size_t i = 0; i < nvars_; ++i) {
            pw[i][0] = 1.0;
            for (unsigned k = 1; k <= max_exp_[i]; ++k) pw[i][k] = pw[i][k - 1] * x[i];
        }
    }
    for (std::size_t t = 0; t < coeffs_.size(); ++t) {
        double term = coeffs_[t];
        const unsigned* e = &exps_[t * nvars_];
        for (std::size_t i = 0; i < nvars_; ++i) {
            if (tabled) {
                term *= pw[i][e[i]];
            } else {
                term *= std::pow(x[i], static_cast<double>(e[i]));
            }
        }
        acc += term;
    }
    return acc;
}

}  // namespace altproj
