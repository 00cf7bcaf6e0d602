#include "altproj/rates.hpp"

#include <cmath>
#include <map>
#include <random>
#include <sstream>

#include "altproj/newton.hpp"

namespace altproj {

std::string to_string(RateKind k) {
    switch (k) {
        case RateKind::Exact: return "Exact";
        case RateKind::UpperBound: return "UpperBound";
        case RateKind::Linear: return "Linear";
    }
    return "?";
}

std::string to_string(RateSource s) {
    switch (s) {
        case RateSource::HypersurfaceLine: return "HypersurfaceLine";
        case RateSource::CurveRate: return "CurveRate";
        case RateSource::HshpBound: return "HshpBound";
        case RateSource::LojaSubspaceBound: return "LojaSubspaceBound";
    }
    return "?";
}

std::string to_string(CurveVerdict v) {
    switch (v) {
        case CurveVerdict::ProjectsToCurve: return "ProjectsToCurve";
        case CurveVerdict::LeavesCurve: return "LeavesCurve";
        case CurveVerdict::Inconclusive: return "Inconclusive";
    }
    return "?";
}

namespace {

std::string fmt_double(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

double parse_double(const std::string& s, const std::string& key) {
    try {
        std::size_t used = 0;
        const double v = std::stod(s, &used);
        if (used != s.size()) throw std::invalid_argument(s);
        return v;
    } catch (const std::exception&) {
        throw ParseError("prediction: bad number for '" + key + "': " + s);
    }
}

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

}  // namespace

std::string serialize(const RatePrediction& p) {
    std::ostringstream os;
    os << "kind = " << to_string(p.kind) << '\n';
    os << "lambda = " << (p.lambda ? format_rational(*p.lambda) : "none") << '\n';
    os << "limit_constant = " << (p.limit_constant ? fmt_double(*p.limit_constant) : "none") << '\n';
    os << "constant_estimated = " << (p.constant_estimated ? "true" : "false") << '\n';
    os << "d = " << p.d << '\n';
    os << "c0 = " << (p.c0 ? fmt_double(*p.c0) : "none") << '\n';
    os << "source = " << to_string(p.source) << '\n';
    return os.str();
}

RatePrediction parse_prediction(const std::string& text) {
    std::map<std::string, std::string> kv;
    std::istringstream is(text);
    std::string line;
    while (std::getline(is, line)) {
        line = trim(line);
        if (line.empty() || line[0] == '#') continue;
        const auto eq = line.find('=');
        if (eq == std::string::npos) throw ParseError("prediction: expected 'key = value', got: " + line);
        kv[trim(line.substr(0, eq))] = trim(line.substr(eq + 1));
    }
    auto need = [&](const std::string& key) -> const std::string& {
        auto it = kv.find(key);
        if (it == kv.end()) throw ParseError("prediction: missing key '" + key + "'");
        return it->second;
    };
    RatePrediction p;
    const std::string& kind = need("kind");
    if (kind == "Exact") {
        p.kind = RateKind::Exact;
    } else if (kind == "UpperBound") {
        p.kind = RateKind::UpperBound;
    } else if (kind == "Linear") {
        p.kind = RateKind::Linear;
    } else {
        throw ParseError("prediction: unknown kind '" + kind + "'");
    }
    if (const auto& l = need("lambda"); l != "none") p.lambda = parse_rational(l);
    if (const auto& c = need("limit_constant"); c != "none") p.limit_constant = parse_double(c, "limit_constant");
    if (auto it = kv.find("constant_estimated"); it != kv.end()) p.constant_estimated = it->second == "true";
    p.d = static_cast<unsigned>(parse_double(need("d"), "d"));
    if (const auto& c = need("c0"); c != "none") p.c0 = parse_double(c, "c0");
    const std::string& src = need("source");
    if (src == "HypersurfaceLine") {
        p.source = RateSource::HypersurfaceLine;
    } else if (src == "CurveRate") {
        p.source = RateSource::CurveRate;
    } else if (src == "HshpBound") {
        p.source = RateSource::HshpBound;
    } else if (src == "LojaSubspaceBound") {
        p.source = RateSource::LojaSubspaceBound;
    } else {
        throw ParseError("prediction: unknown source '" + src + "'");
    }
    return p;
}

namespace {

// Fills lambda and limit constant from (d, c0^2) and a normalizing divisor.
RatePrediction from_multiplicity(unsigned d, double c0_squared, double divisor, RateSource source) {
    RatePrediction p;
    p.source = source;
    p.d = d;
    p.c0 = std::sqrt(c0_squared);
    if (d == 1) {
        p.kind = RateKind::Linear;
        return p;
    }
    p.kind = RateKind::Exact;
    const double q = 2.0 * d - 2.0;
    p.lambda = Rational(1) / Rational(2 * d - 2);
    p.limit_constant = std::pow(q * d * c0_squared / divisor, 1.0 / q);
    return p;
}

}  // namespace

RatePrediction predict_hypersurface_rate(const MultiPoly& g, std::span<const double> a) {
    const UniSeries s = restrict_line(g, a);
    std::size_t d = 0;
    double c0 = 0.0;
    try {
        std::tie(d, c0) = lowest_term(s);
    } catch (const ZeroSeriesError&) {
        throw ZeroSeriesError("hypersurface rate: g vanishes identically along the line");
    }
    if (d == 0) throw PreconditionError("hypersurface rate: g(0) != 0, the line does not meet A at the origin");
    // A tilted tangent plane z = w.x containing B scales the normal gap by
    // 1 / sqrt(1 + |w|^2) at leading order.
    double w2 = 0.0;
    const std::vector<double> zero(g.nvars(), 0.0);
    for (const auto& gi : gradient(g)) w2 += std::pow(gi.eval(std::span<const double>(zero)), 2);
    return from_multiplicity(static_cast<unsigned>(d), c0 * c0, 1.0 + w2, RateSource::HypersurfaceLine);
}

std::array<UniSeries, 3> CurveSeries::phi_double() const {
    return {to_double_series(phi[0]), to_double_series(phi[1]), to_double_series(phi[2])};
}

namespace {

Rational value_at_origin(const MultiPoly& p) { return p.coeff(Exponent(p.nvars(), 0)); }

Rational partial_at_origin(const MultiPoly& p, std::size_t i) {
    Exponent e(p.nvars(), 0);
    e[i] = 1;
    return p.coeff(e);
}

}  // namespace

CurveSeries solve_curve_series(const MultiPoly& f1, const MultiPoly& f2, unsigned order) {
    if (f1.nvars() != 2 || f2.nvars() != 2) throw DimensionError("curve series: f1, f2 must be in two variables");
    if (order < 2) throw PreconditionError("curve series: order must be at least 2");
    if (value_at_origin(f1) != 0 || value_at_origin(f2) != 0) {
        throw PreconditionError("curve series: C does not pass through the origin (f1(0) or f2(0) != 0)");
    }
    const Rational f1x = partial_at_origin(f1, 0), f1y = partial_at_origin(f1, 1);
    const Rational f2x = partial_at_origin(f2, 0), f2y = partial_at_origin(f2, 1);
    // Cross product of the gradients (-f_ix, -f_iy, 1) of z - f_i at 0.
    std::array<Rational, 3> alpha{f2y - f1y, f1x - f2x, f1x * f2y - f1y * f2x};
    if (alpha[0] == 0 && alpha[1] == 0 && alpha[2] == 0) {
        throw PreconditionError("curve series: gradients of z - f1 and z - f2 at 0 are dependent (kernel not 1-dimensional)");
    }
    if (alpha[2] != 0) throw PreconditionError("curve series: the tangent of C at 0 leaves the xy-plane");
    CurveSeries cs;
    cs.param_index = alpha[1] != 0 ? 1 : 0;
    const int p = cs.param_index;
    const int o = 1 - p;
    const Rational scale = alpha[static_cast<std::size_t>(p)];
    for (auto& a : alpha) a /= scale;
    const Rational a1 = o == 0 ? f1x : f1y;
    const Rational a2 = o == 0 ? f2x : f2y;

    std::array<ExactSeries, 3> phi{ExactSeries(order), ExactSeries(order), ExactSeries(order)};
    phi[static_cast<std::size_t>(p)][1] = 1;
    for (unsigned k = 1; k <= order; ++k) {
        const std::vector<ExactSeries> args{phi[0].truncated(k), phi[1].truncated(k)};
        const ExactSeries z = phi[2].truncated(k);
        const Rational r1 = (z - f1.eval_series(args)).coeff(k);
        const Rational r2 = (z - f2.eval_series(args)).coeff(k);
        // z_k - a1 u = -r1, z_k - a2 u = -r2.
        const Rational u = (r2 - r1) / (a2 - a1);
        phi[static_cast<std::size_t>(o)][k] = u;
        phi[2][k] = -r1 + a1 * u;
    }
    cs.phi = phi;
    cs.alpha = alpha;
    for (std::size_t i = 0; i < 3; ++i) cs.beta[i] = phi[i].coeff(2);
    return cs;
}

Cond2PolyResult cond2poly_check(const MultiPoly& f1, const MultiPoly& f2, const std::array<Rational, 2>& a_dir,
                                unsigned order) {
    const CurveSeries cs = solve_curve_series(f1, f2, order);
    const Rational& a = a_dir[0];
    const Rational& b = a_dir[1];
    if (a == 0 && b == 0) throw PreconditionError("cond2poly: zero direction");
    Cond2PolyResult res;
    res.parallel = a * cs.alpha[1] - b * cs.alpha[0] == 0;
    if (!res.parallel) {
        res.verdict = CurveVerdict::LeavesCurve;
        return res;
    }
    // Columns (-f1x, -f1y, 1), (-f2x, -f2y, 1), (a, b, 0); Cramer's rule.
    const std::array<std::array<Rational, 3>, 3> cols{{
        {-partial_at_origin(f1, 0), -partial_at_origin(f1, 1), Rational(1)},
        {-partial_at_origin(f2, 0), -partial_at_origin(f2, 1), Rational(1)},
        {a, b, Rational(0)},
    }};
    auto det3 = [](const std::array<std::array<Rational, 3>, 3>& c) {
        return c[0][0] * (c[1][1] * c[2][2] - c[1][2] * c[2][1]) - c[1][0] * (c[0][1] * c[2][2] - c[0][2] * c[2][1]) +
               c[2][0] * (c[0][1] * c[1][2] - c[0][2] * c[1][1]);
    };
    const Rational det = det3(cols);
    if (det == 0) throw PreconditionError("cond2poly: (a, b, 0) and the two gradients are linearly dependent");
    std::array<Rational, 3> sol;
    for (std::size_t j = 0; j < 3; ++j) {
        auto cj = cols;
        cj[j] = cs.beta;
        sol[j] = det3(cj) / det;
    }
    res.lambda_mu = sol;
    const double l1 = to_double(sol[0]), l2 = to_double(sol[1]);
    constexpr double kBand = 1e-10;
    if (std::abs(l1 * l2) <= kBand) {
        res.verdict = CurveVerdict::Inconclusive;
    } else if (l1 > 0 && l2 > 0) {
        res.verdict = CurveVerdict::ProjectsToCurve;
    } else if (l1 * l2 < 0) {
        res.verdict = CurveVerdict::LeavesCurve;
    } else {
        res.verdict = CurveVerdict::Inconclusive;
    }
    return res;
}

ExactSeries curve_distance_squared(const CurveSeries& cs) {
    const Rational& a1 = cs.alpha[0];
    const Rational& a2 = cs.alpha[1];
    const Rational n2 = a1 * a1 + a2 * a2;
    const ExactSeries w = cs.phi[0] * a2 - cs.phi[1] * a1;
    ExactSeries s = w * w + cs.phi[2] * cs.phi[2] * n2;
    s *= Rational(1) / n2;
    return s;
}

RatePrediction predict_curve_rate(const MultiPoly& f1, const MultiPoly& f2, unsigned order) {
    const CurveSeries cs = solve_curve_series(f1, f2, order);
    const ExactSeries s = curve_distance_squared(cs);
    std::size_t low = 0;
    Rational lead;
    try {
        std::tie(low, lead) = s.lowest_term();
    } catch (const ZeroSeriesError&) {
        throw ZeroSeriesError("curve rate: distance from C to B vanishes through order " + std::to_string(s.order()));
    }
    if (low % 2 != 0) throw PreconditionError("curve rate: squared distance has odd lowest degree");
    const auto d = static_cast<unsigned>(low / 2);
    const Rational n2 = cs.alpha[0] * cs.alpha[0] + cs.alpha[1] * cs.alpha[1];
    Rational divisor(1);
    for (unsigned i = 0; i < d; ++i) divisor *= n2;
    return from_multiplicity(d, to_double(lead), to_double(divisor), RateSource::CurveRate);
}

MultiPoly compose_truncated(const MultiPoly& p, const std::vector<MultiPoly>& args, unsigned order) {
    if (args.size() != p.nvars()) throw DimensionError("compose_truncated: one argument per variable expected");
    const std::size_t m = args.front().nvars();
    std::vector<std::vector<MultiPoly>> powers(p.nvars());
    for (std::size_t i = 0; i < p.nvars(); ++i) {
        unsigned maxe = 0;
        for (const auto& [e, c] : p.terms()) maxe = std::max(maxe, e[i]);
        powers[i].push_back(MultiPoly::constant(m, Rational(1)));
        for (unsigned k = 1; k <= maxe; ++k) powers[i].push_back((powers[i].back() * args[i]).truncated(order));
    }
    MultiPoly out(m);
    for (const auto& [e, c] : p.terms()) {
        MultiPoly term = MultiPoly::constant(m, c);
        for (std::size_t i = 0; i < p.nvars() && !term.is_zero(); ++i) {
            if (e[i] > 0) term = (term * powers[i][e[i]]).truncated(order);
        }
        out += term;
    }
    return out;
}

std::optional<unsigned> ImplicitSeries::lowest_degree(std::size_t i) const {
    std::optional<unsigned> low;
    for (const auto& [e, c] : phi.at(i).terms()) {
        unsigned deg = 0;
        for (unsigned v : e) deg += v;
        if (!low || deg < *low) low = deg;
    }
    return low;
}

ExactSeries ImplicitSeries::univariate(std::size_t i) const {
    const MultiPoly& p = phi.at(i);
    if (p.nvars() != 1) throw DimensionError("implicit series: univariate view needs one free variable");
    ExactSeries s(order);
    for (const auto& [e, c] : p.terms()) s[e[0]] = c;
    return s;
}

ImplicitSeries solve_implicit_series(const MultiPoly& g, std::size_t m, unsigned order) {
    const std::size_t n = g.nvars();
    if (m == 0 || m >= n) throw PreconditionError("implicit series: need 1 <= m < n dependent variables");
    if (value_at_origin(g) != 0) throw PreconditionError("implicit series: g(0) != 0");
    for (std::size_t i = 0; i < m; ++i) {
        if (partial_at_origin(g, i) != 0) throw PreconditionError("implicit series: g_x(0) != 0");
    }
    std::vector<std::size_t> free_vars;
    for (std::size_t j = m; j < n; ++j) free_vars.push_back(j);
    const MultiPoly restriction = g.restrict_to(free_vars);
    if (restriction.is_zero() || !newton_diagram(restriction).convenient) {
        throw PreconditionError("implicit series: the Newton diagram of g(0, y) does not meet every axis");
    }
    ImplicitSeries out;
    out.order = order;
    out.restriction_order = std::numeric_limits<unsigned>::max();
    for (const auto& [e, c] : restriction.terms()) {
        unsigned deg = 0;
        for (unsigned v : e) deg += v;
        out.restriction_order = std::min(out.restriction_order, deg);
    }
    const std::size_t k = n - m;
    std::vector<MultiPoly> args;
    for (std::size_t i = 0; i < m; ++i) args.emplace_back(k);
    for (std::size_t j = 0; j < k; ++j) args.push_back(MultiPoly::variable(k, j));
    const auto grad = gradient(g);
    // The right-hand side -g_x g has zero derivative at the origin, so each
    // sweep fixes at least one more degree.
    for (unsigned sweep = 0; sweep <= order + 1; ++sweep) {
        const MultiPoly gv = compose_truncated(g, args, order);
        bool changed = false;
        std::vector<MultiPoly> next;
        for (std::size_t i = 0; i < m; ++i) {
            MultiPoly v = -(compose_truncated(grad[i], args, order) * gv).truncated(order);
            changed = changed || !(v == args[i]);
            next.push_back(std::move(v));
        }
        for (std::size_t i = 0; i < m; ++i) args[i] = std::move(next[i]);
        if (!changed) break;
    }
    out.phi.assign(args.begin(), args.begin() + static_cast<long>(m));
    return out;
}

double sample_bound_constant(const MultiPoly& g, unsigned d, int samples, std::uint64_t seed) {
    const std::size_t n = g.nvars();
    const CompiledPoly cg(g);
    std::mt19937_64 rng(seed);
    std::normal_distribution<double> normal;
    const double radii[] = {1e-1, 1e-2, 1e-3};
    double best = std::numeric_limits<double>::infinity();
    std::vector<double> x(n);
    for (int s = 0; s < samples; ++s) {
        const double r = radii[s % 3];
        double n2 = 0.0;
        for (auto& xi : x) {
            xi = normal(rng);
            n2 += xi * xi;
        }
        const double scale = r / std::sqrt(n2);
        for (auto& xi : x) xi *= scale;
        const double v = cg(x);
        best = std::min(best, v * v / std::pow(r, 2.0 * d));
    }
    return best;
}

namespace {

RatePrediction bound_prediction(const MultiPoly& g, bool assert_nondegenerate, RateSource source) {
    const Rational L = loja_exponent_convenient(g, assert_nondegenerate);
    const auto d = static_cast<unsigned>(L.convert_to<double>());
    RatePrediction p;
    p.source = source;
    p.d = d;
    if (d <= 1) {
        p.kind = RateKind::Linear;
        return p;
    }
    p.kind = RateKind::UpperBound;
    p.lambda = Rational(1) / Rational(2 * d - 2);
    const double C = sample_bound_constant(g, d);
    p.limit_constant = std::pow((d - 1.0) * C, 1.0 / (2.0 * d - 2.0));
    p.constant_estimated = true;
    return p;
}

}  // namespace

RatePrediction predict_upper_bound_hyperplane(const MultiPoly& g, bool assert_nondegenerate) {
    return bound_prediction(g, assert_nondegenerate, RateSource::HshpBound);
}

RatePrediction predict_upper_bound_subspace(const MultiPoly& g, const LinearSubspace& b0, bool assert_nondegenerate) {
    if (static_cast<std::size_t>(b0.ambient_dim()) != g.nvars()) {
        throw DimensionError("subspace bound: B0 must live in the x-space of g");
    }
    std::vector<std::size_t> keep;
    for (Eigen::Index j = 0; j < b0.dim(); ++j) {
        const Vec col = b0.basis().col(j);
        Eigen::Index idx = 0;
        const double top = col.cwiseAbs().maxCoeff(&idx);
        if (std::abs(top - 1.0) > 1e-12 || (col.cwiseAbs().sum() - top) > 1e-12) {
            throw PreconditionError("subspace bound: B0 is not spanned by coordinate axes; rotate first");
        }
        keep.push_back(static_cast<std::size_t>(idx));
    }
    std::sort(keep.begin(), keep.end());
    const MultiPoly restriction = g.restrict_to(keep);
    if (restriction.is_zero()) throw PreconditionError("subspace bound: g vanishes on B0");
    return bound_prediction(restriction, assert_nondegenerate, RateSource::LojaSubspaceBound);
}

}  // namespace altproj
