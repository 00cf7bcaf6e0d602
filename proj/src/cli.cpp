#include "altproj/cli.hpp"

#include <atomic>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <map>
#include <mutex>
#include <sstream>
#include <thread>

#include "altproj/poly_text.hpp"
#include "altproj/region.hpp"

namespace altproj {

namespace {

std::string num(double v) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g", v + 0.0);
    return buf;
}

std::string vec_text(const Vec& v) {
    std::string s = "(";
    for (Eigen::Index i = 0; i < v.size(); ++i) s += (i ? ", " : "") + num(v[i]);
    return s + ")";
}

void write_file(const std::filesystem::path& path, const std::string& content) {
    std::filesystem::create_directories(path.parent_path().empty() ? std::filesystem::path(".") : path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write '" + path.string() + "'");
    out << content;
}

// x-part of a vector in R^n x R; throws when the last coordinate is nonzero.
std::vector<double> x_part(const Vec& v, const char* what) {
    const Eigen::Index n = v.size() - 1;
    if (std::abs(v[n]) > 1e-12 * v.norm()) {
        throw InapplicableError(std::string(what) + ": B is not contained in the plane z = 0");
    }
    return {v.data(), v.data() + n};
}

bool even_in(const MultiPoly& g, std::size_t i) {
    for (const auto& [e, c] : g.terms()) {
        if (e[i] % 2 != 0) return false;
    }
    return true;
}

// Largest coordinate-reflection-invariant piece of B that contains u0.
LinearSubspace invariant_reduction(const MultiPoly& g, const LinearSubspace& b, const Vec& u0,
                                   std::vector<std::size_t>& fixed) {
    const Eigen::Index n = static_cast<Eigen::Index>(g.nvars());
    for (Eigen::Index i = 0; i < n; ++i) {
        if (u0[i] != 0.0 || !even_in(g, static_cast<std::size_t>(i))) continue;
        bool invariant = true;
        for (Eigen::Index j = 0; j < b.dim() && invariant; ++j) {
            Vec r = b.basis().col(j);
            r[i] = -r[i];
            invariant = b.distance(r) <= 1e-12;
        }
        if (invariant) fixed.push_back(static_cast<std::size_t>(i));
    }
    if (fixed.empty()) return b;
    std::vector<std::vector<double>> span;
    for (Eigen::Index j = 0; j < b.dim(); ++j) {
        Vec col = b.basis().col(j);
        for (auto i : fixed) col[static_cast<Eigen::Index>(i)] = 0.0;
        span.emplace_back(col.data(), col.data() + col.size());
    }
    bool any = false;
    for (const auto& v : span) {
        for (double x : v) any = any || x != 0.0;
    }
    if (!any) throw InapplicableError("predict: u0 = 0 lies in no invariant line");
    return LinearSubspace::from_span(span);
}

PredictionReport predict_two_poly_line(const Config& c, const TwoPolySet& a, const std::vector<double>& dir) {
    PredictionReport rep;
    std::array<Rational, 2> ad{rational_from_double(dir[0]), rational_from_double(dir[1])};
    const Cond2PolyResult cr = cond2poly_check(a.f1(), a.f2(), ad);
    rep.notes.push_back("direction = (" + num(dir[0]) + ", " + num(dir[1]) + ")");
    rep.notes.push_back("curve_verdict = " + to_string(cr.verdict));
    rep.notes.push_back(std::string("tangent_to_curve = ") + (cr.parallel ? "true" : "false"));
    if (cr.lambda_mu) {
        const auto& lm = *cr.lambda_mu;
        rep.notes.push_back("lambda_mu = " + format_rational(lm[0]) + ", " + format_rational(lm[1]) + ", " +
                            format_rational(lm[2]));
    }
    switch (cr.verdict) {
        case CurveVerdict::Inconclusive:
            throw InapplicableError("predict: sign test inconclusive along the line; no rate rule applies");
        case CurveVerdict::ProjectsToCurve:
            if (!cr.parallel) {
                throw InapplicableError("predict: projections land on C but the line is not tangent to C");
            }
            rep.prediction = predict_curve_rate(a.f1(), a.f2());
            return rep;
        case CurveVerdict::LeavesCurve: break;
    }
    const double n = std::hypot(dir[0], dir[1]);
    RegionLabel label = RegionLabel::Undetermined;
    for (double t : {1e-2, 1e-3}) {
        Vec p(2);
        p << t * dir[0] / n, t * dir[1] / n;
        const RegionLabel l = classify_point(a, p, c.solver());
        if (label != RegionLabel::Undetermined && l != label) {
            throw InapplicableError("predict: region label of the line direction is not stable near 0");
        }
        label = l;
    }
    rep.notes.push_back("active_surface = " + to_string(label));
    if (label == RegionLabel::Surface1) {
        rep.prediction = predict_hypersurface_rate(a.f1(), dir);
    } else if (label == RegionLabel::Surface2) {
        rep.prediction = predict_hypersurface_rate(a.f2(), dir);
    } else {
        throw InapplicableError("predict: line direction classified as " + to_string(label) +
                                " although the sign test says the projections leave C");
    }
    return rep;
}

}  // namespace

PredictionReport predict_scenario(const Config& c) {
    const Scenario s = build_scenario(c);
    const LinearSubspace& b = s.subspace;
    if (const auto* a = std::get_if<TwoPolySet>(&s.set)) {
        if (b.dim() != 1) throw InapplicableError("predict: two-polynomial sets are only predicted for a line B");
        // The configured spanning vector keeps the sign test in exact small rationals.
        Vec v = b.basis().col(0);
        for (const auto& sv : c.span) {
            const Vec w = Eigen::Map<const Vec>(sv.data(), static_cast<Eigen::Index>(sv.size()));
            if (w.norm() > 0.0) {
                v = w;
                break;
            }
        }
        if (v.dot(s.u0) < 0.0) v = -v;
        return predict_two_poly_line(c, *a, x_part(v, "predict"));
    }
    const auto& h = std::get<HypographSet>(s.set);
    PredictionReport rep;
    std::vector<std::size_t> fixed;
    const LinearSubspace red = b.dim() > 1 ? invariant_reduction(h.g(), b, s.u0, fixed) : b;
    if (!fixed.empty() && red.dim() < b.dim()) {
        std::string vars;
        for (auto i : fixed) vars += (vars.empty() ? "" : ", ") + c.set->vars[i];
        rep.notes.push_back("reflection_invariant = " + vars);
        rep.notes.push_back("reduced_dim = " + std::to_string(red.dim()));
    }
    if (red.dim() == 1) {
        Vec v = red.basis().col(0);
        if (v.dot(s.u0) < 0.0) v = -v;
        const auto dir = x_part(v, "predict");
        rep.notes.push_back("direction = " + vec_text(Eigen::Map<const Vec>(dir.data(), Eigen::Index(dir.size()))));
        rep.prediction = predict_hypersurface_rate(h.g(), dir);
        return rep;
    }
    const auto nx = static_cast<Eigen::Index>(h.g().nvars());
    std::vector<std::vector<double>> span0;
    for (Eigen::Index j = 0; j < red.dim(); ++j) span0.push_back(x_part(red.basis().col(j), "predict"));
    if (red.dim() == nx) {
        rep.prediction = predict_upper_bound_hyperplane(h.g(), c.assert_nondegenerate);
    } else {
        try {
            rep.prediction =
                predict_upper_bound_subspace(h.g(), LinearSubspace::from_span(span0), c.assert_nondegenerate);
        } catch (const PreconditionError& e) {
            throw InapplicableError(std::string("predict: ") + e.what());
        }
    }
    return rep;
}

VerifyOutcome verify_scenario(const Config& c, double tol_exponent, double tol_product, Trace* trace_out) {
    VerifyOutcome out;
    out.prediction = predict_scenario(c);
    RatePrediction& p = out.prediction.prediction;
    if (p.limit_constant && c.verify.constant_scale != 1.0) {
        p.limit_constant = *p.limit_constant * c.verify.constant_scale;
        out.lines.push_back("constant_scale = " + num(c.verify.constant_scale));
    }
    const Trace t = run_apm(build_scenario(c));
    auto check = [&](const std::string& what, bool ok) {
        out.lines.push_back((ok ? "PASS " : "FAIL ") + what);
        return ok;
    };
    RateEstimate est;
    const auto rho = detect_linear(t);
    if (p.kind == RateKind::Linear) {
        est.linear_ratio = rho;
        out.estimate = est;
        out.pass = check(rho ? "linear ratio " + num(*rho) + " < 1" : "linear ratio not detected", rho.has_value());
        if (trace_out) *trace_out = t;
        return out;
    }
    try {
        est = c.verify.fit_k_min ? fit_rate_window(t, *c.verify.fit_k_min, *c.verify.fit_k_max)
                                 : fit_rate(t, c.verify.tail_fraction);
    } catch (const InsufficientDataError& e) {
        out.pass = check(std::string("rate fit: ") + e.what(), false);
        if (trace_out) *trace_out = t;
        return out;
    }
    est.linear_ratio = rho;
    const double lambda = to_double(*p.lambda);
    const double lhat = est.fitted_exponent;
    bool ok = true;
    ok &= check("exponent " + num(lhat) + " within " + num(tol_exponent) + " of " + num(lambda),
                std::abs(lhat - lambda) <= tol_exponent);
    if (p.limit_constant) {
        const auto prod = check_limit_product(t, p);
        if (!prod.empty()) {
            est.product_at_end = prod.back().value;
            const double v = prod.back().value;
            const std::string what = "limit product " + num(v) + " at k = " + std::to_string(prod.back().k);
            if (p.kind == RateKind::Exact) {
                ok &= check(what + " within " + num(tol_product) + " of 1", std::abs(v - 1.0) <= tol_product);
            } else {
                out.lines.push_back("INFO " + what + " (bound constant is sampled, not checked)");
            }
        } else if (p.kind == RateKind::Exact) {
            ok &= check("limit product: no recorded step", false);
        }
    }
    out.estimate = est;
    out.pass = ok;
    if (trace_out) *trace_out = t;
    return out;
}

namespace {

std::string prediction_text(const Config& c, const PredictionReport& r) {
    std::string s = "scenario = " + c.name + "\n" + serialize(r.prediction);
    for (const auto& n : r.notes) s += n + "\n";
    return s;
}

std::string trace_text(const Trace& t) {
    std::ostringstream os;
    write_trace_csv(os, t);
    return os.str();
}

}  // namespace

ExitCode cmd_simulate(const Config& c, const CliOptions& opt, std::ostream& log) {
    const Trace t = run_apm(build_scenario(c));
    write_file(opt.out_dir / c.output.trace, trace_text(t));
    const auto& last = t.records.back();
    log << c.name << ": " << t.records.size() << " records, last k = " << last.k
        << ", norm_u = " << num(last.norm_u) << (t.stop == StopReason::BelowFloor ? " (below floor)" : "") << '\n';
    return ExitCode::Pass;
}

ExitCode cmd_predict(const Config& c, const CliOptions& opt, std::ostream& log) {
    const PredictionReport r = predict_scenario(c);
    const std::string text = prediction_text(c, r);
    write_file(opt.out_dir / c.output.prediction, text);
    log << text;
    return ExitCode::Pass;
}

ExitCode cmd_verify(const Config& c, const CliOptions& opt, std::ostream& log) {
    const double te = opt.tol_exponent.value_or(c.verify.tol_exponent.value_or(kDefaultTolExponent));
    const double tp = opt.tol_product.value_or(c.verify.tol_product.value_or(kDefaultTolProduct));
    Trace t;
    const VerifyOutcome v = verify_scenario(c, te, tp, &t);
    write_file(opt.out_dir / c.output.prediction, prediction_text(c, v.prediction));
    write_file(opt.out_dir / c.output.trace, trace_text(t));
    if (v.estimate) write_file(opt.out_dir / c.output.estimate, serialize(*v.estimate));
    std::string report = "scenario = " + c.name + "\n";
    for (const auto& l : v.lines) report += l + "\n";
    report += std::string("result = ") + (v.pass ? "pass" : "fail") + "\n";
    write_file(opt.out_dir / c.output.report, report);
    log << report;
    return v.pass ? ExitCode::Pass : ExitCode::VerifyFailed;
}

namespace {

const TwoPolySet& two_poly_of(const ConvexSet& s, const char* cmd) {
    const auto* a = std::get_if<TwoPolySet>(&s);
    if (!a) throw ConfigError(std::string(cmd) + ": needs a two_poly set");
    return *a;
}

}  // namespace

ExitCode cmd_classify(const Config& c, const CliOptions& opt, std::ostream& log) {
    const ConvexSet set = build_set(c);
    const TwoPolySet& a = two_poly_of(set, "classify");
    const RegionConfig rc = c.region.value_or(RegionConfig{});
    std::ostringstream os;
    if (!rc.points.empty()) {
        os << "x,y,label\n";
        for (const auto& pt : rc.points) {
            Vec p(2);
            p << pt[0], pt[1];
            os << num(pt[0]) << ',' << num(pt[1]) << ',' << to_string(classify_point(a, p, c.solver())) << '\n';
        }
        log << c.name << ": classified " << rc.points.size() << " points\n";
    } else {
        const auto labels = classify_scan(a, rc.grid(), opt.jobs, c.solver());
        write_grid_csv(os, rc.grid(), labels);
        log << c.name << ": classified " << labels.size() << " grid nodes\n";
    }
    write_file(opt.out_dir / c.output.labels, os.str());
    return ExitCode::Pass;
}

ExitCode cmd_partition(const Config& c, const CliOptions& opt, std::ostream& log) {
    const ConvexSet set = build_set(c);
    const TwoPolySet& a = two_poly_of(set, "partition");
    const RegionConfig rc = c.region.value_or(RegionConfig{});
    for (int which : {1, 2}) {
        const Polyline line = trace_partition_boundary(a, which, rc.t_min, rc.t_max, rc.samples);
        std::ostringstream os;
        write_polyline_csv(os, line);
        write_file(opt.out_dir / (which == 1 ? c.output.boundary1 : c.output.boundary2), os.str());
        log << c.name << ": boundary " << which << " has " << line.points.size() << " points, "
            << line.skipped.size() << " skipped\n";
    }
    std::ostringstream os;
    write_grid_csv(os, rc.grid(), classify_scan(a, rc.grid(), opt.jobs, c.solver()));
    write_file(opt.out_dir / c.output.labels, os.str());
    return ExitCode::Pass;
}

ExitCode cmd_oracle(const Config& c, const CliOptions& opt, std::ostream& log) {
    if (!c.oracle) throw ConfigError("oracle: config has no oracle section");
    const OracleConfig& o = *c.oracle;
    RecursionSpec r;
    r.C = o.C;
    r.q = o.q;
    r.x0 = o.x0;
    r.K = o.K;
    if (!o.h.empty()) r.h = UniSeries(o.h, o.h.size() - 1);
    std::vector<double> xs;
    try {
        xs = run_recursion_oracle(r);
    } catch (const PreconditionError& e) {
        throw ConfigError(e.what());
    }
    const double scale = std::pow(o.q * o.C, 1.0 / o.q);
    std::ostringstream os;
    os << "k,x_k,scaled\n";
    for (long k : record_schedule(o.K, c.records_per_octave)) {
        const double x = xs[static_cast<std::size_t>(k)];
        os << k << ',' << num(x) << ',' << num(scale * std::pow(static_cast<double>(k), 1.0 / o.q) * x) << '\n';
    }
    write_file(opt.out_dir / c.output.oracle, os.str());
    const double last = scale * std::pow(static_cast<double>(o.K), 1.0 / o.q) * xs.back();
    log << c.name << ": (qC)^(1/q) k^(1/q) x_k = " << num(last) << " at k = " << o.K << '\n';
    return ExitCode::Pass;
}

ExitCode run_command(const std::string& command, const std::vector<std::string>& config_paths,
                     const CliOptions& opt, std::ostream& log) {
    using Cmd = ExitCode (*)(const Config&, const CliOptions&, std::ostream&);
    static const std::map<std::string, Cmd> table{{"simulate", cmd_simulate},   {"predict", cmd_predict},
                                                  {"verify", cmd_verify},       {"classify", cmd_classify},
                                                  {"partition", cmd_partition}, {"oracle", cmd_oracle}};
    const auto it = table.find(command);
    if (it == table.end()) {
        log << "error: unknown command '" << command << "'\n";
        return ExitCode::ConfigError;
    }
    if (config_paths.empty()) {
        log << "error: no --config given\n";
        return ExitCode::ConfigError;
    }
    const bool batch = config_paths.size() > 1;
    std::vector<ExitCode> codes(config_paths.size(), ExitCode::Pass);
    std::vector<std::string> logs(config_paths.size());

    auto run_one = [&](std::size_t i) {
        std::ostringstream os;
        ExitCode code = ExitCode::Pass;
        try {
            const Config c = load_config(config_paths[i]);
            CliOptions o = opt;
            if (batch) {
                o.out_dir = opt.out_dir / c.name;
                o.jobs = 1;
            }
            code = it->second(c, o, os);
        } catch (const ConfigError& e) {
            os << "config error: " << e.what() << '\n';
            code = ExitCode::ConfigError;
        } catch (const ParseError& e) {
            os << "parse error: " << e.what() << '\n';
            code = ExitCode::ConfigError;
        } catch (const DimensionError& e) {
            os << "config error: " << e.what() << '\n';
            code = ExitCode::ConfigError;
        } catch (const SolverFailure& e) {
            os << "solver failure: " << e.what() << " (residual " << num(e.residual()) << ", step " << e.step()
               << ")\n";
            code = ExitCode::SolverFailure;
        } catch (const InapplicableError& e) {
            os << "inapplicable: " << e.what() << '\n';
            code = ExitCode::Inapplicable;
        } catch (const ZeroSeriesError& e) {
            os << "inapplicable: " << e.what() << '\n';
            code = ExitCode::Inapplicable;
        } catch (const PreconditionError& e) {
            os << "inapplicable: " << e.what() << '\n';
            code = ExitCode::Inapplicable;
        } catch (const std::exception& e) {
            os << "error: " << e.what() << '\n';
            code = ExitCode::ConfigError;
        }
        codes[i] = code;
        logs[i] = os.str();
    };

    const int jobs = std::max(1, std::min<int>(opt.jobs, static_cast<int>(config_paths.size())));
    if (!batch || jobs == 1) {
        for (std::size_t i = 0; i < config_paths.size(); ++i) run_one(i);
    } else {
        std::atomic<std::size_t> next{0};
        std::vector<std::jthread> pool;
        for (int w = 0; w < jobs; ++w) {
            pool.emplace_back([&] {
                for (std::size_t i = next++; i < config_paths.size(); i = next++) run_one(i);
            });
        }
    }
    ExitCode result = ExitCode::Pass;
    for (std::size_t i = 0; i < config_paths.size(); ++i) {
        if (batch) log << "[" << config_paths[i] << "] exit " << static_cast<int>(codes[i]) << '\n';
        log << logs[i];
        if (result == ExitCode::Pass) result = codes[i];
    }
    return result;
}

}  // namespace altproj
