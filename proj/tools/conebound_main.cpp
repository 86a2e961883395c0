// conebound command-line front end: certification runs, cone fitting,
// stochastic-completeness heuristics, and plot-ready data emission.

#include "conebound/bounds.hpp"
#include "conebound/cone.hpp"
#include "conebound/models.hpp"
#include "conebound/report.hpp"
#include "conebound/sampling.hpp"
#include "conebound/series.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <string>
#include <vector>

namespace {

using namespace conebound;
using Vec = VectorX<double>;
using Mat = MatrixX<double>;

struct Output {
    std::string path;     // empty: payload goes to stdout
    bool quiet = false;
};

void emit(const Output& out, const std::string& payload, const std::string& summary) {
    if (!out.quiet && !summary.empty()) std::cerr << summary;
    if (out.path.empty()) {
        std::cout << payload;
    } else {
        std::ofstream f(out.path, std::ios::binary);
        if (!f) throw Error("cannot open output file: " + out.path);
        f << payload;
    }
}

int emit_finding(const Output& out, const std::string& kind, const std::string& message,
                 const ConfigEmitter& config) {
    JsonWriter w;
    w.begin_object();
    w.key("finding").value(kind);
    w.key("message").value(message);
    w.key("satisfied").value(false);
    if (config) {
        w.key("config").begin_object();
        config(w);
        w.end_object();
    }
    w.end_object();
    emit(out, w.str() + "\n", kind + ": " + message + "\n");
    return 2;
}

Vec parse_point(const std::vector<double>& raw, Index expected, const char* what) {
    if (raw.empty()) return Vec::Zero(expected);
    if (static_cast<Index>(raw.size()) != expected)
        throw InvalidParams(std::string(what) + " must have " + std::to_string(expected) +
                            " components");
    Vec v(expected);
    for (Index i = 0; i < expected; ++i) v(i) = raw[static_cast<std::size_t>(i)];
    return v;
}

struct FamilyOptions {
    std::string family = "paraboloid";
    Index m = 2;
    double d = 0.25;
    double radius = 1.0;
    double box = 10.0;
    double r_min = 1e-3;
    double r_max = 3.0;
    Index samples = 10000;
    std::uint64_t seed = 0;

    void attach(CLI::App* cmd) {
        cmd->add_option("--family", family, "built-in family id")->capture_default_str();
        cmd->add_option("--m", m, "chart dimension")->capture_default_str();
        cmd->add_option("--d", d, "paraboloid offset")->capture_default_str();
        cmd->add_option("--radius", radius, "sphere radius")->capture_default_str();
        cmd->add_option("--box", box, "chart box half-width")->capture_default_str();
        cmd->add_option("--r-min", r_min, "flat-cone inner radius")->capture_default_str();
        cmd->add_option("--r-max", r_max, "flat-cone outer radius")->capture_default_str();
        cmd->add_option("--samples", samples, "sample count")->capture_default_str();
        cmd->add_option("--seed", seed, "deterministic seed")->capture_default_str();
    }

    FamilyParams<double> params() const {
        FamilyParams<double> p;
        p.m = m;
        p.d = d;
        p.radius = radius;
        p.box_radius = box;
        p.r_min = r_min;
        p.r_max = r_max;
        return p;
    }

    SampleSpec spec() const { return SampleSpec{default_sample_mode(family), samples, seed, 1e-3}; }

    void describe(VerificationReport<double>& report) const {
        report.family = family;
        if (family == "paraboloid") {
            report.parameters.emplace_back("m", static_cast<double>(m));
            report.parameters.emplace_back("d", d);
        } else if (family == "sphere") {
            report.parameters.emplace_back("radius", radius);
        } else if (family == "flat-cone") {
            report.parameters.emplace_back("r_min", r_min);
            report.parameters.emplace_back("r_max", r_max);
        }
        report.parameters.emplace_back("box", box);
    }

    void echo(JsonWriter& w) const {
        w.key("family").value(family);
        w.key("m").value(m);
        w.key("d").value(d);
        w.key("radius").value(radius);
        w.key("box").value(box);
        w.key("samples").value(samples);
        w.key("seed").value(static_cast<long long>(seed));
    }
};

std::string summary_line(const VerificationReport<double>& report, const char* what) {
    char buf[160];
    std::snprintf(buf, sizeof buf,
                  "%s: lhs=%.6g rhs=%.6g margin=%.6g -> %s\n", what, report.lhs,
                  report.rhs_bound, report.margin, report.satisfied ? "satisfied" : "VIOLATED");
    return buf;
}

int run_theorem(bool second_theorem, const FamilyOptions& fam, double chi, bool general,
                const std::vector<double>& vertex_raw, const std::vector<double>& axis_raw,
                const Output& out) {
    const std::string command = second_theorem ? "verify theorem2" : "verify theorem1";
    ConfigEmitter config = [&](JsonWriter& w) {
        w.key("command").value(command);
        fam.echo(w);
        if (second_theorem) w.key("chi").value(chi);
        w.key("general").value(general);
    };
    try {
        const ChartedMap<double> map = make_family_map<double>(fam.family, fam.params());
        const Vec o = parse_point(vertex_raw, map.dim_ambient(), "--vertex");
        std::optional<Vec> axis;
        if (!axis_raw.empty()) axis = parse_point(axis_raw, map.dim_ambient(), "--axis");

        VerificationReport<double> report =
            second_theorem ? certify_theorem2(map, o, chi, fam.spec(), axis)
                           : certify_theorem1(map, o, fam.spec(), !general, axis);
        fam.describe(report);
        emit(out, verification_report_json(report, config) + "\n",
             summary_line(report, command.c_str()));
        return report.satisfied ? 0 : 2;
    } catch (const DegenerateCone& e) {
        return emit_finding(out, "DegenerateCone", e.what(), config);
    } catch (const HypothesisViolated& e) {
        return emit_finding(out, "HypothesisViolated", e.what(), config);
    }
}

int run_proof_identities(const FamilyOptions& fam, double xi, double alpha, double b_flag,
                         const std::vector<double>& vertex_raw, const Output& out) {
    ConfigEmitter config = [&](JsonWriter& w) {
        w.key("command").value(std::string("verify proof-identities"));
        fam.echo(w);
        w.key("xi").value(xi);
        w.key("alpha").value(alpha);
        w.key("b").value(b_flag);
    };
    try {
        const ChartedMap<double> map = make_family_map<double>(fam.family, fam.params());
        const Vec o = parse_point(vertex_raw, map.dim_ambient(), "--vertex");
        std::optional<double> b_override;
        if (b_flag > 0) b_override = b_flag;

        const ProofIdentitySummary<double> s =
            run_proof_identities(map, o, fam.spec(), xi, alpha, b_override);
        const bool passed = s.base_positive && s.limitato_violations == 0 &&
                            s.upperbound_violations == 0 && s.richiestachi_violations == 0 &&
                            s.lu_positive && s.max_rel_delta_u < 1e-3 && s.max_rel_hess < 1e-3;

        JsonWriter w;
        w.begin_object();
        w.key("family").value(fam.family);
        w.key("sample_count").value(s.sample_count);
        w.key("params").begin_object();
        w.key("T").value(s.params.t_ref());
        w.key("b").value(s.params.b());
        w.key("xi").value(s.params.xi());
        w.key("alpha").value(s.params.alpha());
        w.key("a").value(s.params.a());
        w.end_object();
        w.key("u_base").value(s.u_base);
        w.key("base_positive").value(s.base_positive);
        w.key("omega_count").value(s.omega_count);
        w.key("limitato_violations").value(s.limitato_violations);
        w.key("upperbound_violations").value(s.upperbound_violations);
        w.key("richiestachi_violations").value(s.richiestachi_violations);
        w.key("max_rel_delta_u").value(s.max_rel_delta_u);
        w.key("max_rel_hess").value(s.max_rel_hess);
        w.key("min_lu").value(s.min_lu);
        w.key("delta_floor").value(s.delta_floor);
        w.key("lu_positive").value(s.lu_positive);
        w.key("passed").value(passed);
        w.key("config").begin_object();
        config(w);
        w.end_object();
        w.end_object();

        char line[160];
        std::snprintf(line, sizeof line,
                      "proof-identities: omega=%lld min_lu=%.6g floor=%.6g -> %s\n",
                      static_cast<long long>(s.omega_count), s.min_lu, s.delta_floor,
                      passed ? "passed" : "FINDING");
        emit(out, w.str() + "\n", line);
        return passed ? 0 : 2;
    } catch (const DegenerateCone& e) {
        return emit_finding(out, "DegenerateCone", e.what(), config);
    } catch (const HypothesisViolated& e) {
        return emit_finding(out, "HypothesisViolated", e.what(), config);
    }
}

int run_fit_cone(const std::string& points_path, const std::vector<double>& vertex_raw,
                 std::uint64_t seed, const Output& out) {
    ConfigEmitter config = [&](JsonWriter& w) {
        w.key("command").value(std::string("fit-cone"));
        w.key("points").value(points_path);
        w.key("seed").value(static_cast<long long>(seed));
    };
    const Mat points = read_point_cloud_file(points_path);
    const Vec o = parse_point(vertex_raw, points.rows(), "--vertex");
    try {
        const Cone<double> cone = min_enclosing_cone(points, o, seed);
        const double dist = plane_distance(points, o, cone.axis);
        JsonWriter w;
        w.begin_object();
        w.key("sample_count").value(points.cols());
        w.key("cone");
        write_cone_fields(w, cone);
        w.key("plane_distance").value(dist);
        w.key("config").begin_object();
        config(w);
        w.end_object();
        w.end_object();
        char line[120];
        std::snprintf(line, sizeof line, "fit-cone: width=%.12g plane_distance=%.12g\n",
                      cone.width, dist);
        emit(out, w.str() + "\n", line);
        return 0;
    } catch (const DegenerateCone& e) {
        return emit_finding(out, "DegenerateCone", e.what(), config);
    }
}

int run_corner_test(const std::string& points_path, const std::vector<double>& vertex_raw,
                    std::uint64_t seed, const Output& out) {
    ConfigEmitter config = [&](JsonWriter& w) {
        w.key("command").value(std::string("corner-test"));
        w.key("points").value(points_path);
        w.key("seed").value(static_cast<long long>(seed));
    };
    const Mat points = read_point_cloud_file(points_path);
    if (vertex_raw.empty()) throw InvalidParams("--vertex is required for corner-test");
    const Vec p = parse_point(vertex_raw, points.rows(), "--vertex");
    const CornerResult<double> res = corner_test(points, p, seed);

    JsonWriter w;
    w.begin_object();
    w.key("sample_count").value(points.cols());
    w.key("is_corner").value(res.is_corner);
    w.key("dropped").value(res.dropped);
    w.key("witness");
    if (res.witness)
        write_cone_fields(w, *res.witness);
    else
        w.begin_object().end_object();
    w.key("config").begin_object();
    config(w);
    w.end_object();
    w.end_object();
    emit(out, w.str() + "\n",
         std::string("corner-test: ") + (res.is_corner ? "corner\n" : "not a corner\n"));
    return res.is_corner ? 0 : 2;
}

int run_aeta(double eta, std::uint64_t seed, const Output& out) {
    const AetaResult<double> a = compute_A(eta, seed);
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.17g\n", a.value);
    std::cout << buf;   // the value itself is the machine payload
    if (!out.path.empty()) {
        JsonWriter w;
        w.begin_object();
        w.key("eta").value(a.eta);
        w.key("value").value(a.value);
        w.key("argmax").begin_object();
        w.key("xi").value(a.xi);
        w.key("alpha").value(a.alpha);
        w.end_object();
        w.key("resolution").value(a.resolution);
        w.key("config").begin_object();
        w.key("command").value(std::string("a-eta"));
        w.key("eta").value(eta);
        w.key("seed").value(static_cast<long long>(seed));
        w.end_object();
        w.end_object();
        std::ofstream f(out.path, std::ios::binary);
        if (!f) throw Error("cannot open output file: " + out.path);
        f << w.str() << "\n";
    }
    return 0;
}

int run_models_stochastic(const std::string& model_id, Index m, double r_start, double r_max,
                          const Output& out) {
    const RotationalModel<double> model = make_family_model<double>(model_id, m);
    auto ratio = [&model](double r) { return volume_ratio(model, r); };
    const IntegrabilityResult<double> res = integrability_test<double>(ratio, r_start, r_max);

    JsonWriter w;
    w.begin_object();
    w.key("model").value(model_id);
    w.key("m").value(m);
    w.key("classification").value(std::string(to_string(res.classification)));
    w.key("scope").value(std::string("model-only sufficient evidence"));
    w.key("radii").begin_array();
    for (double r : res.radii) w.value(r);
    w.end_array();
    w.key("increments").begin_array();
    for (double v : res.increments) w.value(v);
    w.end_array();
    w.key("median_increment").value(res.median_increment);
    w.key("config").begin_object();
    w.key("command").value(std::string("models stochastic"));
    w.key("model").value(model_id);
    w.key("m").value(m);
    w.key("r_start").value(r_start);
    w.key("r_max").value(r_max);
    w.end_object();
    w.end_object();
    emit(out, w.str() + "\n",
         std::string("models stochastic: ") + to_string(res.classification) + "\n");
    return 0;
}

Series load_series(const std::string& path, const std::string& name) {
    std::ifstream f(path);
    if (!f) throw Error("cannot open report file: " + path);
    nlohmann::json j;
    try {
        f >> j;
    } catch (const std::exception& e) {
        throw ParseError(path + ": " + e.what());
    }
    if (!j.contains("series") || !j["series"].contains(name))
        throw MissingSeries("report " + path + " has no series '" + name + "'");
    const auto& s = j["series"][name];
    Series series{name, s.value("x_label", "x"), s.value("y_label", "y"), {}, {}};
    for (const auto& v : s["x"]) series.x.push_back(v.get<double>());
    for (const auto& v : s["y"]) series.y.push_back(v.get<double>());
    if (series.x.size() != series.y.size())
        throw ParseError(path + ": series columns differ in length");
    return series;
}

int run_plot(const std::string& name, const std::string& from, double lo, double hi, Index count,
             Index samples, std::uint64_t seed, const std::string& format, const Output& out) {
    Series series;
    if (!from.empty()) {
        series = load_series(from, name);
    } else if (name == "sharpness") {
        if (lo <= 0) lo = 1e-3;
        if (hi <= 0) hi = 1.0;
        series = sharpness_series(count, lo, hi, samples, seed);
    } else if (name == "a-eta") {
        if (lo <= 0) lo = 0.1;
        if (hi <= 0) hi = 10.0;
        series = aeta_series(count, lo, hi, seed);
    } else {
        throw MissingSeries("unknown series '" + name + "' (expected sharpness or a-eta)");
    }

    std::string payload;
    if (format == "json") {
        JsonWriter w;
        w.begin_object();
        w.key("series").begin_object();
        w.key(series.name).begin_object();
        w.key("x_label").value(series.x_label);
        w.key("y_label").value(series.y_label);
        w.key("x").begin_array();
        for (double v : series.x) w.value(v);
        w.end_array();
        w.key("y").begin_array();
        for (double v : series.y) w.value(v);
        w.end_array();
        w.end_object();
        w.end_object();
        w.key("config").begin_object();
        w.key("command").value(std::string("plot"));
        w.key("series").value(name);
        w.key("count").value(count);
        w.key("samples").value(samples);
        w.key("seed").value(static_cast<long long>(seed));
        w.end_object();
        w.end_object();
        payload = w.str() + "\n";
    } else {
        payload = series_csv(series.name, series.x_label, series.y_label, series.x, series.y);
    }
    emit(out, payload,
         "plot: " + name + " (" + std::to_string(series.x.size()) + " rows)\n");
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"conebound: numerical verification of cone-width bounds for charted maps"};
    app.require_subcommand(1);

    // verify
    auto* verify = app.add_subcommand("verify", "run a certification");
    verify->require_subcommand(1);

    FamilyOptions fam_t1, fam_t2, fam_pi;
    std::vector<double> vertex_t1, axis_t1, vertex_t2, axis_t2, vertex_pi;
    Output out_t1, out_t2, out_pi;
    bool general_t1 = false;
    double chi_t2 = 0.0;
    double xi_pi = 0.5, alpha_pi = 0.5, b_pi = 0.0;

    auto* t1 = verify->add_subcommand("theorem1", "sampled width bound for smooth maps");
    fam_t1.attach(t1);
    t1->add_option("--vertex", vertex_t1, "cone vertex")->delimiter(',');
    t1->add_option("--axis", axis_t1, "fixed axis (default: fitted)")->delimiter(',');
    t1->add_flag("--general", general_t1, "use A_1 even for isometric families");
    t1->add_option("--out", out_t1.path, "report path (default stdout)");
    t1->add_flag("--quiet", out_t1.quiet, "suppress the stderr summary");

    auto* t2 = verify->add_subcommand("theorem2", "curvature-based width bound");
    fam_t2.attach(t2);
    t2->add_option("--chi", chi_t2, "sectional curvature bound sqrt")->required();
    t2->add_option("--vertex", vertex_t2, "cone vertex")->delimiter(',');
    t2->add_option("--axis", axis_t2, "fixed axis (default: fitted)")->delimiter(',');
    t2->add_option("--out", out_t2.path, "report path (default stdout)");
    t2->add_flag("--quiet", out_t2.quiet, "suppress the stderr summary");

    auto* pi = verify->add_subcommand("proof-identities",
                                      "consistency checks for the auxiliary-function identities");
    fam_pi.family = "plane";
    fam_pi.box = 1.0;
    fam_pi.samples = 2000;
    fam_pi.attach(pi);
    pi->add_option("--xi", xi_pi, "xi parameter")->capture_default_str();
    pi->add_option("--alpha", alpha_pi, "alpha parameter")->capture_default_str();
    pi->add_option("--b", b_pi, "override cos(theta) (default: fitted cone)");
    pi->add_option("--vertex", vertex_pi, "cone vertex")->delimiter(',');
    pi->add_option("--out", out_pi.path, "report path (default stdout)");
    pi->add_flag("--quiet", out_pi.quiet, "suppress the stderr summary");

    // fit-cone
    std::string points_fc;
    std::vector<double> vertex_fc;
    std::uint64_t seed_fc = 0;
    Output out_fc;
    auto* fc = app.add_subcommand("fit-cone", "minimal enclosing cone of a point cloud");
    fc->add_option("--points", points_fc, "CSV point cloud")->required();
    fc->add_option("--vertex", vertex_fc, "cone vertex (default origin)")->delimiter(',');
    fc->add_option("--seed", seed_fc, "deterministic seed")->capture_default_str();
    fc->add_option("--out", out_fc.path, "report path (default stdout)");
    fc->add_flag("--quiet", out_fc.quiet, "suppress the stderr summary");

    // corner-test
    std::string points_ct;
    std::vector<double> vertex_ct;
    std::uint64_t seed_ct = 0;
    Output out_ct;
    auto* ct = app.add_subcommand("corner-test", "is p the vertex of a containing cone?");
    ct->add_option("--points", points_ct, "CSV point cloud")->required();
    ct->add_option("--vertex", vertex_ct, "candidate vertex")->required()->delimiter(',');
    ct->add_option("--seed", seed_ct, "deterministic seed")->capture_default_str();
    ct->add_option("--out", out_ct.path, "report path (default stdout)");
    ct->add_flag("--quiet", out_ct.quiet, "suppress the stderr summary");

    // a-eta
    double eta_ae = 1.0;
    std::uint64_t seed_ae = 0;
    Output out_ae;
    auto* ae = app.add_subcommand("a-eta", "evaluate the variational constant A_eta");
    ae->add_option("--eta", eta_ae, "eta > 0")->required();
    ae->add_option("--seed", seed_ae, "deterministic seed")->capture_default_str();
    ae->add_option("--out", out_ae.path, "also write a JSON report");

    // models stochastic
    std::string model_ms = "rotational:euclidean";
    Index m_ms = 2;
    double r_start_ms = 1.0, r_max_ms = 1e6;
    Output out_ms;
    auto* models_cmd = app.add_subcommand("models", "model-family diagnostics");
    models_cmd->require_subcommand(1);
    auto* ms = models_cmd->add_subcommand("stochastic",
                                          "volume-ratio integrability heuristic at infinity");
    ms->add_option("--model", model_ms, "rotational:<preset>")->capture_default_str();
    ms->add_option("--m", m_ms, "model dimension")->capture_default_str();
    ms->add_option("--r-start", r_start_ms, "first doubling radius")->capture_default_str();
    ms->add_option("--r-max", r_max_ms, "largest radius probed")->capture_default_str();
    ms->add_option("--out", out_ms.path, "report path (default stdout)");
    ms->add_flag("--quiet", out_ms.quiet, "suppress the stderr summary");

    // plot
    std::string series_pl = "sharpness", from_pl, format_pl = "csv";
    double lo_pl = 0.0, hi_pl = 0.0;
    Index count_pl = 25, samples_pl = 4000;
    std::uint64_t seed_pl = 0;
    Output out_pl;
    auto* pl = app.add_subcommand("plot", "emit plot-ready series data");
    pl->add_option("--series", series_pl, "sharpness | a-eta")->required();
    pl->add_option("--from", from_pl, "extract the series from an existing JSON report");
    pl->add_option("--min", lo_pl, "series lower endpoint");
    pl->add_option("--max", hi_pl, "series upper endpoint");
    pl->add_option("--count", count_pl, "number of rows")->capture_default_str();
    pl->add_option("--samples", samples_pl, "samples per cone fit")->capture_default_str();
    pl->add_option("--seed", seed_pl, "deterministic seed")->capture_default_str();
    pl->add_option("--format", format_pl, "csv | json")->capture_default_str();
    pl->add_option("--out", out_pl.path, "output path (default stdout)");
    pl->add_flag("--quiet", out_pl.quiet, "suppress the stderr summary");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 1;
    }

    try {
        if (t1->parsed()) return run_theorem(false, fam_t1, 0.0, general_t1, vertex_t1, axis_t1, out_t1);
        if (t2->parsed()) return run_theorem(true, fam_t2, chi_t2, false, vertex_t2, axis_t2, out_t2);
        if (pi->parsed()) return run_proof_identities(fam_pi, xi_pi, alpha_pi, b_pi, vertex_pi, out_pi);
        if (fc->parsed()) return run_fit_cone(points_fc, vertex_fc, seed_fc, out_fc);
        if (ct->parsed()) return run_corner_test(points_ct, vertex_ct, seed_ct, out_ct);
        if (ae->parsed()) return run_aeta(eta_ae, seed_ae, out_ae);
        if (ms->parsed()) return run_models_stochastic(model_ms, m_ms, r_start_ms, r_max_ms, out_ms);
        if (pl->parsed())
            return run_plot(series_pl, from_pl, lo_pl, hi_pl, count_pl, samples_pl, seed_pl,
                            format_pl, out_pl);
    } catch (const MissingSeries& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const Error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
