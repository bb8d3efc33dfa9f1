#include "varhorse/io.hpp"

#include <fstream>
#include <sstream>

namespace varhorse {

json to_json(const Vec2& v) { return json::array({v.x, v.y}); }

json to_json(const Point& p) {
    return json{{"xy", to_json(p.xy)}, {"space", p.space == Space::torus2 ? "torus2" : "planar"}};
}

static Point point_from_json(const json& j) {
    Point p;
    p.xy = {j.at("xy")[0].get<double>(), j.at("xy")[1].get<double>()};
    p.space = j.at("space").get<std::string>() == "torus2" ? Space::torus2 : Space::planar;
    return p;
}

json to_json(const Graph1D& g) {
    json j;
    j["affine"] = g.affine;
    if (g.affine) {
        j["c0"] = g.c0;
        j["c1"] = g.c1;
    } else {
        j["samples"] = g.samples;
    }
    return j;
}

Graph1D graph_from_json(const json& j) {
    Graph1D g;
    g.affine = j.at("affine").get<bool>();
    if (g.affine) {
        g.c0 = j.at("c0").get<double>();
        g.c1 = j.at("c1").get<double>();
    } else {
        g.samples = j.at("samples").get<std::vector<double>>();
    }
    return g;
}

json to_json(const Cylinder& c) {
    return json{{"kind", c.kind == CylKind::stable ? "stable" : "unstable"},
                {"h", c.h},
                {"lo", to_json(c.lo)},
                {"hi", to_json(c.hi)}};
}

Cylinder cylinder_from_json(const json& j) {
    Cylinder c;
    c.kind = j.at("kind").get<std::string>() == "stable" ? CylKind::stable : CylKind::unstable;
    c.h = j.at("h").get<double>();
    c.lo = graph_from_json(j.at("lo"));
    c.hi = graph_from_json(j.at("hi"));
    return c;
}

json to_json(const Rectangle& r) {
    return json{{"center", to_json(r.center)}, {"half_width", r.half_width},
                {"frame_s", to_json(r.frame_s)}, {"frame_u", to_json(r.frame_u)},
                {"scale", r.scale},             {"cert_ell", r.cert_ell}};
}

Rectangle rectangle_from_json(const json& j) {
    Rectangle r;
    r.center = point_from_json(j.at("center"));
    r.half_width = j.at("half_width").get<double>();
    r.frame_s = {j.at("frame_s")[0].get<double>(), j.at("frame_s")[1].get<double>()};
    r.frame_u = {j.at("frame_u")[0].get<double>(), j.at("frame_u")[1].get<double>()};
    r.scale = j.at("scale").get<double>();
    r.cert_ell = j.at("cert_ell").get<double>();
    return r;
}

json to_json(const ConeCheck& c) {
    return json{{"pass", c.pass},
                {"margin", c.margin},
                {"min_expansion_u", c.min_expansion_u},
                {"min_expansion_s", c.min_expansion_s},
                {"samples", c.samples},
                {"gamma", c.gamma}};
}

ConeCheck cone_check_from_json(const json& j) {
    ConeCheck c;
    c.pass = j.at("pass").get<bool>();
    c.margin = j.at("margin").get<double>();
    c.min_expansion_u = j.at("min_expansion_u").get<double>();
    c.min_expansion_s = j.at("min_expansion_s").get<double>();
    c.samples = j.at("samples").get<int>();
    c.gamma = j.at("gamma").get<double>();
    return c;
}

json to_json(const PesinCertificate& c) {
    return json{{"base_point", to_json(c.base_point)},
                {"horizon", c.horizon},
                {"chi", c.chi},
                {"ell", c.ell},
                {"e_s", to_json(c.e_s)},
                {"e_u", to_json(c.e_u)},
                {"angle", c.angle}};
}

json to_json(const HyperbolicBranch& b) {
    return json{{"return_time", b.return_time},
                {"base_point", to_json(b.base_point)},
                {"source", to_json(b.source)},
                {"target", to_json(b.target)},
                {"cone_certificate", to_json(b.cone_certificate)},
                {"diameter_profile", b.diameter_profile},
                {"qg", json{{"rho", b.qg_certificate.rho},
                            {"s", b.qg_certificate.s},
                            {"base_residual", b.qg_certificate.base_residual},
                            {"delta", b.qg_certificate.delta},
                            {"max_diameter", b.qg_certificate.max_diameter}}},
                {"rep_residual", b.rep_residual},
                {"word", b.word}};
}

HyperbolicBranch branch_from_json(const json& j) {
    HyperbolicBranch b;
    b.return_time = j.at("return_time").get<int>();
    b.base_point = point_from_json(j.at("base_point"));
    b.source = cylinder_from_json(j.at("source"));
    b.target = cylinder_from_json(j.at("target"));
    b.cone_certificate = cone_check_from_json(j.at("cone_certificate"));
    b.diameter_profile = j.at("diameter_profile").get<std::vector<double>>();
    const json& q = j.at("qg");
    b.qg_certificate = {q.at("rho").get<double>(), q.at("s").get<int>(),
                        q.at("base_residual").get<double>(), q.at("delta").get<double>(),
                        q.at("max_diameter").get<double>()};
    b.rep_residual = j.at("rep_residual").get<double>();
    b.word = j.at("word").get<std::vector<int>>();
    return b;
}

json to_json(const ReferenceMeasure& mu) {
    return json{{"name", mu.name},
                {"integrals", mu.integrals},
                {"integral_error", mu.integral_error},
                {"provenance", mu.provenance == Provenance::analytic ? "analytic" : "long-orbit"},
                {"seed", mu.seed},
                {"orbit_length", mu.orbit_length}};
}

ReferenceMeasure reference_from_json(const json& j) {
    ReferenceMeasure mu;
    mu.name = j.at("name").get<std::string>();
    mu.integrals = j.at("integrals").get<std::vector<double>>();
    mu.integral_error = j.at("integral_error").get<double>();
    mu.provenance = j.at("provenance").get<std::string>() == "analytic" ? Provenance::analytic
                                                                        : Provenance::long_orbit;
    mu.seed = j.at("seed").get<std::uint64_t>();
    mu.orbit_length = j.at("orbit_length").get<std::int64_t>();
    return mu;
}

json branch_set_to_json(const std::vector<HyperbolicBranch>& branches, double rho, int s,
                        double delta, double gamma) {
    json arr = json::array();
    for (const auto& b : branches) arr.push_back(to_json(b));
    return json{{"rho", rho}, {"s", s}, {"delta", delta}, {"gamma", gamma}, {"branches", arr}};
}

std::string format_word(const std::vector<int>& letters) {
    std::ostringstream os;
    for (size_t i = 0; i < letters.size(); ++i) {
        if (i) os << '-';
        os << letters[i] + 1;
    }
    return os.str();
}

namespace {
std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}
}  // namespace

std::string refinement_to_csv(const CylinderRefinement& ref) {
    std::ostringstream os;
    os << "kind,word,depth,extent_lo,extent_hi,width\n";
    for (const auto& [w, c] : ref.stable_cylinders) {
        auto e = c.pinched_extent();
        os << "stable," << format_word(w) << ',' << ref.depth << ',' << fmt(e[0]) << ','
           << fmt(e[1]) << ',' << fmt(c.max_width()) << '\n';
    }
    for (const auto& [w, c] : ref.unstable_cylinders) {
        auto e = c.pinched_extent();
        os << "unstable," << format_word(w) << ',' << ref.depth << ',' << fmt(e[0]) << ','
           << fmt(e[1]) << ',' << fmt(c.max_width()) << '\n';
    }
    return os.str();
}

std::string measure_report_to_csv(const StageReport& rep) {
    std::ostringstream os;
    os << "word,period,distance,slack,pass\n";
    for (const auto& row : rep.rows)
        os << format_word(row.word) << ',' << row.period << ',' << fmt(row.distance) << ','
           << fmt(row.slack) << ',' << (row.pass ? 1 : 0) << '\n';
    return os.str();
}

json stage_report_to_json(const StageReport& rep) {
    json j{{"rho", rep.rho},   {"s", rep.s},         {"built", rep.built},
           {"d_n", rep.d_n},   {"slack", rep.slack}, {"pass", rep.pass},
           {"return_times", rep.return_times}};
    if (!rep.error.empty()) j["error"] = rep.error;
    return j;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream f(path, std::ios::binary);
    if (!f) throw DynError("cannot open for writing: " + path);
    f << content;
}

std::string read_text_file(const std::string& path) {
    std::ifstream f(path, std::ios::binary);
    if (!f) throw DynError("cannot open for reading: " + path);
    std::ostringstream os;
    os << f.rdbuf();
    return os.str();
}

}  // namespace varhorse
