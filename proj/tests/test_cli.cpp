#include <filesystem>
#include <fstream>
#include <sstream>

#include "doctest.h"

#include "altproj/cli.hpp"
#include "altproj/poly_text.hpp"

using namespace altproj;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    explicit TempDir(const std::string& tag) : path(fs::temp_directory_path() / ("altproj_test_" + tag)) {
        fs::remove_all(path);
        fs::create_directories(path);
    }
    ~TempDir() { fs::remove_all(path); }
    std::string write(const std::string& name, const std::string& text) const {
        std::ofstream(path / name) << text;
        return (path / name).string();
    }
};

std::string slurp(const fs::path& p) {
    std::ifstream in(p, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

const char* kBasic = R"(name: basic
set:
  kind: hypograph
  vars: [x, y]
  g: "x^2 + y^4"
subspace:
  span: [[3, 4, 0]]
u0: [0.06, 0.08, 0]
max_iter: 2000
)";

ExitCode run(const std::string& cmd, const std::vector<std::string>& cfgs, const fs::path& out, std::string* log = nullptr,
             int jobs = 1) {
    CliOptions opt;
    opt.out_dir = out;
    opt.jobs = jobs;
    std::ostringstream os;
    const ExitCode code = run_command(cmd, cfgs, opt, os);
    if (log) *log = os.str();
    return code;
}

}  // namespace

TEST_CASE("every shipped scenario parses and round-trips") {
    int n = 0;
    for (const auto& entry : fs::directory_iterator(ALTPROJ_SCENARIO_DIR)) {
        if (entry.path().extension() != ".yaml") continue;
        CAPTURE(entry.path().string());
        const Config c = load_config(entry.path().string());
        const std::string text = emit_config(c);
        const Config back = parse_config(text);
        CHECK(back == c);
        CHECK(emit_config(back) == text);
        ++n;
    }
    CHECK(n >= 15);
}

TEST_CASE("config canonicalizes polynomials and rejects bad input") {
    const Config c = parse_config(std::string(kBasic) + "verify:\n  tol_product: 0.1\n");
    REQUIRE(c.set.has_value());
    CHECK(c.set->g == "x^2 + y^4");
    CHECK(c.max_iter == 2000);
    CHECK(c.verify.tol_product == 0.1);
    const Config d = parse_config("name: t\nset:\n  kind: two_poly\n  f1: \"x1*x1 + 0*x2\"\n  f2: \"(x1 - x2)^2\"\n");
    CHECK(d.set->vars == default_var_names(2));
    CHECK(d.set->f1 == "x1^2");
    CHECK(d.set->f2 == format_poly(parse_poly("x1^2 - 2*x1*x2 + x2^2", d.set->vars), d.set->vars));

    CHECK_THROWS_AS(parse_config(""), ConfigError);
    CHECK_THROWS_AS(parse_config("name: t\nmax_iters: 3\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("name: t\nmax_iter: 2.5\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("name: t\nset:\n  kind: cone\n  g: x\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("name: t\nset:\n  kind: hypograph\n  vars: [x, y]\n  g: \"x^2 +* y\"\n"), ParseError);
    CHECK_THROWS_AS(parse_config("name: t\nset:\n  kind: two_poly\n  vars: [x, y]\n  f1: x^2\n"), ConfigError);
    CHECK_THROWS_AS(parse_config("name: t\nverify:\n  fit_k_min: 10\n"), ConfigError);
}

TEST_CASE("scenario assembly checks shapes") {
    CHECK_NOTHROW(build_scenario(parse_config(kBasic)));
    std::string off_b = kBasic;
    off_b.replace(off_b.find("0.06, 0.08"), 10, "0.08, 0.06");
    CHECK_THROWS_AS(build_scenario(parse_config(off_b)), ConfigError);
    std::string short_u0 = kBasic;
    short_u0.replace(short_u0.find("[0.06, 0.08, 0]"), 15, "[0.06, 0.08]");
    CHECK_THROWS_AS(build_scenario(parse_config(short_u0)), ConfigError);
    std::string nonconvex = kBasic;
    nonconvex.replace(nonconvex.find("x^2 + y^4"), 9, "x^2 - y^2");
    CHECK_THROWS_AS(build_scenario(parse_config(nonconvex)), ConfigError);
}

TEST_CASE("simulate writes a monotone, deterministic trace") {
    TempDir dir("simulate");
    const std::string cfg = dir.write("basic.yaml", kBasic);
    REQUIRE(run("simulate", {cfg}, dir.path / "a") == ExitCode::Pass);
    REQUIRE(run("simulate", {cfg}, dir.path / "b") == ExitCode::Pass);
    const std::string a = slurp(dir.path / "a" / "trace.csv");
    CHECK(a == slurp(dir.path / "b" / "trace.csv"));

    std::istringstream in(a);
    std::string line;
    std::getline(in, line);
    CHECK(line == "k,norm_u,u_1,u_2,u_3,active,dist_a_to_B");
    double prev = 1e300;
    int rows = 0;
    while (std::getline(in, line)) {
        const double norm = std::stod(line.substr(line.find(',') + 1));
        CHECK(norm <= prev);
        prev = norm;
        ++rows;
    }
    CHECK(rows > 100);
}

TEST_CASE("zero start gives a single row") {
    TempDir dir("zero");
    std::string text = kBasic;
    text.replace(text.find("[0.06, 0.08, 0]"), 15, "[0, 0, 0]");
    REQUIRE(run("simulate", {dir.write("z.yaml", text)}, dir.path) == ExitCode::Pass);
    const std::string csv = slurp(dir.path / "trace.csv");
    CHECK(std::count(csv.begin(), csv.end(), '\n') == 2);
}

TEST_CASE("exit codes") {
    TempDir dir("codes");
    std::string log;
    std::string bad = kBasic;
    bad.replace(bad.find("x^2 + y^4"), 9, "x^2 + (y^4");
    CHECK(run("simulate", {dir.write("bad.yaml", bad)}, dir.path, &log) == ExitCode::ConfigError);
    CHECK(log.find("parse error") != std::string::npos);
    CHECK(run("simulate", {(dir.path / "missing.yaml").string()}, dir.path) == ExitCode::ConfigError);
    CHECK(run("bogus", {dir.write("ok.yaml", kBasic)}, dir.path) == ExitCode::ConfigError);

    std::string starved = kBasic;
    starved += "solver:\n  max_iter: 1\n  max_halvings: 0\n";
    CHECK(run("simulate", {dir.write("starved.yaml", starved)}, dir.path, &log) == ExitCode::SolverFailure);
    CHECK(log.find("step 0") != std::string::npos);

    const char* plane_two_poly = R"(name: plane
set:
  kind: two_poly
  vars: [x, y]
  f1: "x^2 + y^4"
  f2: "(x - 1)^2 + (y - 1)^4 - 2"
subspace:
  span: [[1, 0, 0], [0, 1, 0]]
u0: [0.1, 0.1, 0]
)";
    CHECK(run("predict", {dir.write("plane.yaml", plane_two_poly)}, dir.path, &log) == ExitCode::Inapplicable);

    std::string tilted = kBasic;
    tilted.replace(tilted.find("[[3, 4, 0]]"), 11, "[[3, 4, 1]]");
    tilted.replace(tilted.find("[0.06, 0.08, 0]"), 15, "[0.06, 0.08, 0.02]");
    CHECK(run("predict", {dir.write("tilted.yaml", tilted)}, dir.path) == ExitCode::Inapplicable);
}

TEST_CASE("predict dispatch") {
    const PredictionReport r = predict_scenario(parse_config(kBasic));
    CHECK(r.prediction.kind == RateKind::Exact);
    CHECK(*r.prediction.lambda == Rational(1, 2));
    CHECK(*r.prediction.limit_constant == doctest::Approx(18.0 / 25.0).epsilon(1e-14));

    const Config region1 = load_config(std::string(ALTPROJ_SCENARIO_DIR) + "/region1.yaml");
    const PredictionReport r1 = predict_scenario(region1);
    CHECK(r1.prediction.source == RateSource::CurveRate);
    CHECK(*r1.prediction.limit_constant == doctest::Approx(std::sqrt(356.0 / 125.0)).epsilon(1e-12));

    const PredictionReport r13 = predict_scenario(load_config(std::string(ALTPROJ_SCENARIO_DIR) + "/ridge_leaves_f1.yaml"));
    CHECK(std::find(r13.notes.begin(), r13.notes.end(), "active_surface = Surface1") != r13.notes.end());
    CHECK(*r13.prediction.lambda == Rational(1, 2));

    const PredictionReport plane = predict_scenario(load_config(std::string(ALTPROJ_SCENARIO_DIR) + "/special_generic.yaml"));
    CHECK(plane.prediction.kind == RateKind::UpperBound);
    CHECK(*plane.prediction.lambda == Rational(1, 6));

    const PredictionReport xaxis = predict_scenario(load_config(std::string(ALTPROJ_SCENARIO_DIR) + "/special_x_axis.yaml"));
    CHECK(xaxis.prediction.kind == RateKind::Exact);
    CHECK(*xaxis.prediction.limit_constant == doctest::Approx(2.0));

    const PredictionReport minus = predict_scenario(load_config(std::string(ALTPROJ_SCENARIO_DIR) + "/axis_minus.yaml"));
    CHECK(minus.prediction.kind == RateKind::Linear);
    const PredictionReport plus = predict_scenario(load_config(std::string(ALTPROJ_SCENARIO_DIR) + "/axis_plus.yaml"));
    CHECK(*plus.prediction.lambda == Rational(1, 6));
}

TEST_CASE("verify passes and a wrong constant fails") {
    TempDir dir("verify");
    std::string text = kBasic;
    text.replace(text.find("max_iter: 2000"), 14, "max_iter: 1e5");
    const std::string good = dir.write("good.yaml", text);
    std::string log;
    CHECK(run("verify", {good}, dir.path / "good", &log) == ExitCode::Pass);
    CHECK(log.find("result = pass") != std::string::npos);
    const RatePrediction p = parse_prediction(slurp(dir.path / "good" / "prediction.txt"));
    CHECK(*p.lambda == Rational(1, 2));
    CHECK(slurp(dir.path / "good" / "estimate.txt").find("product_at_end = 0.99") != std::string::npos);

    const std::string wrong = dir.write("wrong.yaml", text + "verify:\n  constant_scale: 2\n");
    CHECK(run("verify", {wrong}, dir.path / "wrong", &log) == ExitCode::VerifyFailed);
    CHECK(log.find("FAIL limit product") != std::string::npos);

    CliOptions strict;
    strict.out_dir = dir.path / "strict";
    strict.tol_exponent = 1e-4;
    std::ostringstream os;
    CHECK(run_command("verify", {good}, strict, os) == ExitCode::VerifyFailed);
}

TEST_CASE("batch verify over several configs") {
    TempDir dir("batch");
    std::string a = kBasic;
    a.replace(a.find("max_iter: 2000"), 14, "max_iter: 1e5");
    std::string b = a;
    b.replace(b.find("name: basic"), 11, "name: other");
    b += "verify:\n  constant_scale: 3\n";
    const std::vector<std::string> cfgs{dir.write("a.yaml", a), dir.write("b.yaml", b)};
    std::string log;
    CHECK(run("verify", cfgs, dir.path, &log, 2) == ExitCode::VerifyFailed);
    CHECK(fs::exists(dir.path / "basic" / "report.txt"));
    CHECK(fs::exists(dir.path / "other" / "report.txt"));
    CHECK(slurp(dir.path / "basic" / "report.txt").find("result = pass") != std::string::npos);
    CHECK(run("verify", {cfgs[0], cfgs[0]}, dir.path / "same", nullptr, 2) == ExitCode::Pass);
}

TEST_CASE("oracle, classify and partition outputs") {
    TempDir dir("outputs");
    const std::string oracle = dir.write("o.yaml", "name: o\noracle:\n  C: 1\n  q: 1\n  x0: 0.1\n  K: 1e5\n");
    REQUIRE(run("oracle", {oracle}, dir.path) == ExitCode::Pass);
    const std::string csv = slurp(dir.path / "oracle.csv");
    CHECK(csv.rfind("k,x_k,scaled\n", 0) == 0);
    const auto last = csv.substr(csv.rfind('\n', csv.size() - 2) + 1);
    CHECK(last.rfind("100000,", 0) == 0);
    CHECK(std::stod(last.substr(last.rfind(',') + 1)) == doctest::Approx(1.0).epsilon(1e-3));
    CHECK(run("oracle", {dir.write("n.yaml", "name: n\n")}, dir.path) == ExitCode::ConfigError);

    const std::string pts = std::string(ALTPROJ_SCENARIO_DIR) + "/ridge_points.yaml";
    REQUIRE(run("classify", {pts}, dir.path / "pts") == ExitCode::Pass);
    CHECK(slurp(dir.path / "pts" / "labels.csv") == "x,y,label\n-0.02,0.01,Curve\n");
    CHECK(run("classify", {dir.write("h.yaml", kBasic)}, dir.path) == ExitCode::ConfigError);

    const char* part = R"(name: part
set:
  kind: two_poly
  vars: [x, y]
  f1: "x^2 + y^4"
  f2: "(x - 1)^2 + (y - 1)^4 - 2"
region:
  nx: 9
  ny: 7
  samples: 11
  t_min: -0.1
  t_max: 0.1
)";
    const std::string pc = dir.write("part.yaml", part);
    REQUIRE(run("partition", {pc}, dir.path / "p1") == ExitCode::Pass);
    CliOptions opt;
    opt.out_dir = dir.path / "p2";
    opt.jobs = 3;
    std::ostringstream os;
    REQUIRE(run_command("partition", {pc}, opt, os) == ExitCode::Pass);
    for (const char* f : {"boundary1.csv", "boundary2.csv", "labels.csv"}) {
        CAPTURE(f);
        CHECK(slurp(dir.path / "p1" / f) == slurp(dir.path / "p2" / f));
    }
    const std::string labels = slurp(dir.path / "p1" / "labels.csv");
    CHECK(std::count(labels.begin(), labels.end(), '\n') == 1 + 9 * 7);
    const std::string b1 = slurp(dir.path / "p1" / "boundary1.csv");
    CHECK(std::count(b1.begin(), b1.end(), '\n') == 1 + 11);
}
