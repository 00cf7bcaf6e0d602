#include "altproj/config.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <yaml-cpp/yaml.h>

#include "altproj/poly_text.hpp"

namespace altproj {

namespace {

void allow_keys(const YAML::Node& n, const std::string& where, std::initializer_list<const char*> keys) {
    if (!n.IsMap()) throw ConfigError(where + ": expected a mapping");
    const std::set<std::string> ok(keys.begin(), keys.end());
    for (const auto& kv : n) {
        const auto key = kv.first.as<std::string>();
        if (!ok.contains(key)) throw ConfigError(where + ": unknown key '" + key + "'");
    }
}

template <typename T>
void read(const YAML::Node& n, const char* key, T& out, const std::string& where) {
    const YAML::Node v = n[key];
    if (!v) return;
    try {
        out = v.as<T>();
    } catch (const YAML::Exception& e) {
        throw ConfigError(where + "." + key + ": " + e.msg);
    }
}

template <typename T>
void read_opt(const YAML::Node& n, const char* key, std::optional<T>& out, const std::string& where) {
    if (!n[key]) return;
    T v{};
    read(n, key, v, where);
    out = v;
}

// Integer counts may be written as 1e6 in scenario files.
void read_count(const YAML::Node& n, const char* key, long& out, const std::string& where) {
    if (!n[key]) return;
    double v = 0.0;
    read(n, key, v, where);
    if (v < 0 || v != std::floor(v) || v > 9e15) throw ConfigError(where + "." + key + ": not a nonnegative integer");
    out = static_cast<long>(v);
}

std::string canonical_poly(const std::string& text, const std::vector<std::string>& names, const std::string& where) {
    try {
        return format_poly(parse_poly(text, names), names);
    } catch (const ParseError& e) {
        throw ParseError(where + ": " + e.what());
    }
}

SetConfig read_set(const YAML::Node& n, std::size_t u0_dim) {
    allow_keys(n, "set", {"kind", "vars", "g", "f1", "f2"});
    SetConfig s;
    std::string kind;
    read(n, "kind", kind, "set");
    if (kind == "hypograph") {
        s.kind = SetKind::Hypograph;
    } else if (kind == "two_poly") {
        s.kind = SetKind::TwoPoly;
    } else {
        throw ConfigError("set.kind: expected 'hypograph' or 'two_poly', got '" + kind + "'");
    }
    read(n, "vars", s.vars, "set");
    if (s.vars.empty()) {
        const std::size_t nx = s.kind == SetKind::TwoPoly ? 2 : (u0_dim > 1 ? u0_dim - 1 : 1);
        s.vars = default_var_names(nx);
    }
    if (s.kind == SetKind::Hypograph) {
        if (!n["g"] || n["f1"] || n["f2"]) throw ConfigError("set: hypograph needs g and no f1/f2");
        read(n, "g", s.g, "set");
        s.g = canonical_poly(s.g, s.vars, "set.g");
    } else {
        if (s.vars.size() != 2) throw ConfigError("set: two_poly polynomials live in two variables");
        if (!n["f1"] || !n["f2"] || n["g"]) throw ConfigError("set: two_poly needs f1 and f2 and no g");
        read(n, "f1", s.f1, "set");
        read(n, "f2", s.f2, "set");
        s.f1 = canonical_poly(s.f1, s.vars, "set.f1");
        s.f2 = canonical_poly(s.f2, s.vars, "set.f2");
    }
    return s;
}

}  // namespace

Config parse_config(const std::string& text) {
    YAML::Node root;
    try {
        root = YAML::Load(text);
    } catch (const YAML::Exception& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    if (!root || root.IsNull()) throw ConfigError("config: empty document");
    allow_keys(root, "config",
               {"name", "set", "subspace", "u0", "max_iter", "records_per_octave", "solver", "assert", "verify",
                "oracle", "region", "output"});
    Config c;
    read(root, "name", c.name, "config");
    if (c.name.empty()) throw ConfigError("config: name is required");
    read(root, "u0", c.u0, "config");
    if (const auto sub = root["subspace"]) {
        allow_keys(sub, "subspace", {"span"});
        read(sub, "span", c.span, "subspace");
    }
    read_count(root, "max_iter", c.max_iter, "config");
    read(root, "records_per_octave", c.records_per_octave, "config");
    if (const auto s = root["solver"]) {
        allow_keys(s, "solver", {"tol", "max_iter", "max_halvings"});
        read(s, "tol", c.solver_tol, "solver");
        read(s, "max_iter", c.solver_max_iter, "solver");
        read(s, "max_halvings", c.solver_max_halvings, "solver");
    }
    if (const auto a = root["assert"]) {
        allow_keys(a, "assert", {"convex", "nondegenerate"});
        read(a, "convex", c.assert_convex, "assert");
        read(a, "nondegenerate", c.assert_nondegenerate, "assert");
    }
    if (const auto v = root["verify"]) {
        allow_keys(v, "verify", {"tail_fraction", "fit_k_min", "fit_k_max", "tol_exponent", "tol_product",
                                 "constant_scale"});
        read(v, "tail_fraction", c.verify.tail_fraction, "verify");
        if (v["fit_k_min"]) read_count(v, "fit_k_min", c.verify.fit_k_min.emplace(), "verify");
        if (v["fit_k_max"]) read_count(v, "fit_k_max", c.verify.fit_k_max.emplace(), "verify");
        read_opt(v, "tol_exponent", c.verify.tol_exponent, "verify");
        read_opt(v, "tol_product", c.verify.tol_product, "verify");
        read(v, "constant_scale", c.verify.constant_scale, "verify");
        if (c.verify.fit_k_min.has_value() != c.verify.fit_k_max.has_value()) {
            throw ConfigError("verify: fit_k_min and fit_k_max go together");
        }
    }
    if (const auto o = root["oracle"]) {
        allow_keys(o, "oracle", {"C", "q", "h", "x0", "K"});
        OracleConfig oc;
        read(o, "C", oc.C, "oracle");
        read(o, "q", oc.q, "oracle");
        read(o, "h", oc.h, "oracle");
        read(o, "x0", oc.x0, "oracle");
        read_count(o, "K", oc.K, "oracle");
        c.oracle = oc;
    }
    if (const auto r = root["region"]) {
        allow_keys(r, "region",
                   {"x_min", "x_max", "y_min", "y_max", "nx", "ny", "t_min", "t_max", "samples", "points"});
        RegionConfig rc;
        read(r, "x_min", rc.x_min, "region");
        read(r, "x_max", rc.x_max, "region");
        read(r, "y_min", rc.y_min, "region");
        read(r, "y_max", rc.y_max, "region");
        read(r, "nx", rc.nx, "region");
        read(r, "ny", rc.ny, "region");
        read(r, "t_min", rc.t_min, "region");
        read(r, "t_max", rc.t_max, "region");
        read(r, "samples", rc.samples, "region");
        std::vector<std::vector<double>> pts;
        read(r, "points", pts, "region");
        for (const auto& p : pts) {
            if (p.size() != 2) throw ConfigError("region.points: each point has two coordinates");
            rc.points.push_back({p[0], p[1]});
        }
        if (rc.nx < 1 || rc.ny < 1 || rc.samples < 2) throw ConfigError("region: grid and sample counts too small");
        c.region = rc;
    }
    if (const auto o = root["output"]) {
        allow_keys(o, "output",
                   {"trace", "prediction", "estimate", "report", "oracle", "labels", "boundary1", "boundary2"});
        read(o, "trace", c.output.trace, "output");
        read(o, "prediction", c.output.prediction, "output");
        read(o, "estimate", c.output.estimate, "output");
        read(o, "report", c.output.report, "output");
        read(o, "oracle", c.output.oracle, "output");
        read(o, "labels", c.output.labels, "output");
        read(o, "boundary1", c.output.boundary1, "output");
        read(o, "boundary2", c.output.boundary2, "output");
    }
    if (const auto s = root["set"]) c.set = read_set(s, c.u0.size());
    if (c.max_iter < 1) throw ConfigError("config: max_iter must be at least 1");
    if (c.records_per_octave < 1) throw ConfigError("config: records_per_octave must be positive");
    if (!(c.verify.tail_fraction > 0.0 && c.verify.tail_fraction <= 1.0)) {
        throw ConfigError("verify.tail_fraction: must lie in (0, 1]");
    }
    return c;
}

Config load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return parse_config(ss.str());
}

namespace {

YAML::Emitter& flow_doubles(YAML::Emitter& e, const std::vector<double>& v) {
    e << YAML::Flow << YAML::BeginSeq;
    for (double x : v) e << x;
    return e << YAML::EndSeq;
}

}  // namespace

std::string emit_config(const Config& c) {
    YAML::Emitter e;
    e.SetDoublePrecision(17);
    e << YAML::BeginMap;
    e << YAML::Key << "name" << YAML::Value << c.name;
    if (c.set) {
        const SetConfig& s = *c.set;
        e << YAML::Key << "set" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "kind" << YAML::Value << (s.kind == SetKind::Hypograph ? "hypograph" : "two_poly");
        e << YAML::Key << "vars" << YAML::Value << YAML::Flow << s.vars;
        if (s.kind == SetKind::Hypograph) {
            e << YAML::Key << "g" << YAML::Value << YAML::DoubleQuoted << s.g;
        } else {
            e << YAML::Key << "f1" << YAML::Value << YAML::DoubleQuoted << s.f1;
            e << YAML::Key << "f2" << YAML::Value << YAML::DoubleQuoted << s.f2;
        }
        e << YAML::EndMap;
    }
    if (!c.span.empty()) {
        e << YAML::Key << "subspace" << YAML::Value << YAML::BeginMap << YAML::Key << "span" << YAML::Value
          << YAML::BeginSeq;
        for (const auto& v : c.span) flow_doubles(e, v);
        e << YAML::EndSeq << YAML::EndMap;
    }
    if (!c.u0.empty()) {
        e << YAML::Key << "u0" << YAML::Value;
        flow_doubles(e, c.u0);
    }
    e << YAML::Key << "max_iter" << YAML::Value << c.max_iter;
    e << YAML::Key << "records_per_octave" << YAML::Value << c.records_per_octave;
    e << YAML::Key << "solver" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "tol" << YAML::Value << c.solver_tol;
    e << YAML::Key << "max_iter" << YAML::Value << c.solver_max_iter;
    e << YAML::Key << "max_halvings" << YAML::Value << c.solver_max_halvings;
    e << YAML::EndMap;
    e << YAML::Key << "assert" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "convex" << YAML::Value << c.assert_convex;
    e << YAML::Key << "nondegenerate" << YAML::Value << c.assert_nondegenerate;
    e << YAML::EndMap;
    e << YAML::Key << "verify" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "tail_fraction" << YAML::Value << c.verify.tail_fraction;
    if (c.verify.fit_k_min) e << YAML::Key << "fit_k_min" << YAML::Value << *c.verify.fit_k_min;
    if (c.verify.fit_k_max) e << YAML::Key << "fit_k_max" << YAML::Value << *c.verify.fit_k_max;
    if (c.verify.tol_exponent) e << YAML::Key << "tol_exponent" << YAML::Value << *c.verify.tol_exponent;
    if (c.verify.tol_product) e << YAML::Key << "tol_product" << YAML::Value << *c.verify.tol_product;
    e << YAML::Key << "constant_scale" << YAML::Value << c.verify.constant_scale;
    e << YAML::EndMap;
    if (c.oracle) {
        const OracleConfig& o = *c.oracle;
        e << YAML::Key << "oracle" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "C" << YAML::Value << o.C;
        e << YAML::Key << "q" << YAML::Value << o.q;
        e << YAML::Key << "h" << YAML::Value;
        flow_doubles(e, o.h);
        e << YAML::Key << "x0" << YAML::Value << o.x0;
        e << YAML::Key << "K" << YAML::Value << o.K;
        e << YAML::EndMap;
    }
    if (c.region) {
        const RegionConfig& r = *c.region;
        e << YAML::Key << "region" << YAML::Value << YAML::BeginMap;
        e << YAML::Key << "x_min" << YAML::Value << r.x_min;
        e << YAML::Key << "x_max" << YAML::Value << r.x_max;
        e << YAML::Key << "y_min" << YAML::Value << r.y_min;
        e << YAML::Key << "y_max" << YAML::Value << r.y_max;
        e << YAML::Key << "nx" << YAML::Value << r.nx;
        e << YAML::Key << "ny" << YAML::Value << r.ny;
        e << YAML::Key << "t_min" << YAML::Value << r.t_min;
        e << YAML::Key << "t_max" << YAML::Value << r.t_max;
        e << YAML::Key << "samples" << YAML::Value << r.samples;
        if (!r.points.empty()) {
            e << YAML::Key << "points" << YAML::Value << YAML::BeginSeq;
            for (const auto& p : r.points) flow_doubles(e, {p[0], p[1]});
            e << YAML::EndSeq;
        }
        e << YAML::EndMap;
    }
    e << YAML::Key << "output" << YAML::Value << YAML::BeginMap;
    e << YAML::Key << "trace" << YAML::Value << c.output.trace;
    e << YAML::Key << "prediction" << YAML::Value << c.output.prediction;
    e << YAML::Key << "estimate" << YAML::Value << c.output.estimate;
    e << YAML::Key << "report" << YAML::Value << c.output.report;
    e << YAML::Key << "oracle" << YAML::Value << c.output.oracle;
    e << YAML::Key << "labels" << YAML::Value << c.output.labels;
    e << YAML::Key << "boundary1" << YAML::Value << c.output.boundary1;
    e << YAML::Key << "boundary2" << YAML::Value << c.output.boundary2;
    e << YAML::EndMap;
    e << YAML::EndMap;
    return std::string(e.c_str()) + "\n";
}

std::vector<MultiPoly> set_polynomials(const Config& c) {
    if (!c.set) throw ConfigError("config: no set section");
    const SetConfig& s = *c.set;
    if (s.kind == SetKind::Hypograph) return {parse_poly(s.g, s.vars)};
    return {parse_poly(s.f1, s.vars), parse_poly(s.f2, s.vars)};
}

ConvexSet build_set(const Config& c) {
    auto polys = set_polynomials(c);
    try {
        if (c.set->kind == SetKind::Hypograph) return HypographSet(std::move(polys[0]), c.assert_convex);
        return TwoPolySet(std::move(polys[0]), std::move(polys[1]), c.assert_convex);
    } catch (const PreconditionError& e) {
        throw ConfigError(std::string("set assertion failed: ") + e.what());
    }
}

Scenario build_scenario(const Config& c) {
    if (c.span.empty()) throw ConfigError("config: subspace.span is required");
    if (c.u0.empty()) throw ConfigError("config: u0 is required");
    ConvexSet set = build_set(c);
    const auto m = static_cast<std::size_t>(ambient_dim(set));
    if (c.u0.size() != m) {
        throw ConfigError("config: u0 has " + std::to_string(c.u0.size()) + " coordinates, the set lives in R^" +
                          std::to_string(m));
    }
    for (const auto& v : c.span) {
        if (v.size() != m) throw ConfigError("config: subspace spanning vector of the wrong length");
    }
    LinearSubspace b = [&] {
        try {
            return LinearSubspace::from_span(c.span);
        } catch (const Error& e) {
            throw ConfigError(std::string("subspace: ") + e.what());
        }
    }();
    const Vec u0 = Eigen::Map<const Vec>(c.u0.data(), static_cast<Eigen::Index>(m));
    if (b.distance(u0) > 1e-12 * std::max(1.0, u0.norm())) throw ConfigError("config: u0 is not in the subspace");
    return Scenario{.name = c.name,
                    .set = std::move(set),
                    .subspace = std::move(b),
                    .u0 = u0,
                    .max_iter = c.max_iter,
                    .records_per_octave = c.records_per_octave,
                    .solver = c.solver(),
                    .assert_convex = c.assert_convex,
                    .assert_nondegenerate = c.assert_nondegenerate};
}

}  // namespace altproj
