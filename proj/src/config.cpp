#include "igafc/config.hpp"

#include <fstream>
#include <sstream>

#include <json.hpp>

#include "igafc/spline.hpp"

namespace igafc {

using nlohmann::json;
using nlohmann::ordered_json;

double ProfileTable::eval(double t) const {
    for (std::size_t k = 0; k + 1 < breaks.size(); ++k)
        if (t >= breaks[k] && (t < breaks[k + 1] || k + 2 == breaks.size())) return values[k];
    return values.empty() ? 0.0 : values.back();
}

double ProblemConfig::boundary_profile(double xi, double eta) const {
    if (boundary.kind == BoundaryConfig::Kind::paper_step)
        return eta <= (1.0 - xi) / 5.0 ? 1.0 : 0.0;

    if (eta == 0.0) return boundary.edges[0].eval(xi);   // bottom
    if (eta == 1.0) return boundary.edges[2].eval(xi);   // top
    if (xi == 0.0) return boundary.edges[3].eval(eta);   // left
    if (xi == 1.0) return boundary.edges[1].eval(eta);   // right
    throw std::domain_error("boundary profile queried at an interior point");
}

namespace {

class Validator {
public:
    std::vector<std::string> problems;

    void fail(const std::string& path, const std::string& what) {
        problems.push_back(path + ": " + what);
    }

    const json* object(const json& j, const std::string& path,
                       const std::vector<std::string>& keys) {
        if (!j.is_object()) {
            fail(path, "expected an object");
            return nullptr;
        }
        for (const auto& item : j.items()) {
            bool known = false;
            for (const auto& k : keys) known = known || k == item.key();
            if (!known) fail(path + "." + item.key(), "unknown field");
        }
        return &j;
    }

    const json* field(const json& j, const std::string& path, const std::string& key) {
        if (!j.contains(key)) {
            fail(path + "." + key, "missing field");
            return nullptr;
        }
        return &j.at(key);
    }

    bool number(const json& j, const std::string& path, double& out) {
        if (!j.is_number()) {
            fail(path, "expected a number");
            return false;
        }
        out = j.get<double>();
        return true;
    }

    bool integer(const json& j, const std::string& path, int& out) {
        if (!j.is_number_integer()) {
            fail(path, "expected an integer");
            return false;
        }
        out = j.get<int>();
        return true;
    }

    bool boolean(const json& j, const std::string& path, bool& out) {
        if (!j.is_boolean()) {
            fail(path, "expected a boolean");
            return false;
        }
        out = j.get<bool>();
        return true;
    }

    bool number_list(const json& j, const std::string& path, std::vector<double>& out) {
        if (!j.is_array()) {
            fail(path, "expected an array of numbers");
            return false;
        }
        out.clear();
        for (const auto& v : j) {
            if (!v.is_number()) {
                fail(path, "expected an array of numbers");
                return false;
            }
            out.push_back(v.get<double>());
        }
        return true;
    }
};

void parse_geometry(Validator& v, const json& j, GeometryConfig& g) {
    const json* obj = v.object(j, "geometry", {"degree", "knots_xi", "knots_eta", "control_net"});
    if (!obj) return;

    if (const json* f = v.field(*obj, "geometry", "degree")) {
        if (v.integer(*f, "geometry.degree", g.degree) && g.degree < 1)
            v.fail("geometry.degree", "must be at least 1");
    }
    if (const json* f = v.field(*obj, "geometry", "knots_xi"))
        v.number_list(*f, "geometry.knots_xi", g.knots_xi);
    if (const json* f = v.field(*obj, "geometry", "knots_eta"))
        v.number_list(*f, "geometry.knots_eta", g.knots_eta);
    if (const json* f = v.field(*obj, "geometry", "control_net")) {
        if (!f->is_array()) {
            v.fail("geometry.control_net", "expected an array of [x, y] pairs");
        } else {
            for (const auto& p : *f) {
                if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
                    v.fail("geometry.control_net", "expected an array of [x, y] pairs");
                    g.control_net.clear();
                    break;
                }
                g.control_net.push_back({p[0].get<double>(), p[1].get<double>()});
            }
        }
    }

    // Cross-field consistency: the knot vectors must form valid open spline
    // spaces and the net must match their DOF count.
    int n_xi = -1, n_eta = -1;
    if (!g.knots_xi.empty()) {
        try {
            n_xi = KnotVector(g.knots_xi, g.degree).num_basis();
        } catch (const std::exception& e) {
            v.fail("geometry.knots_xi", e.what());
        }
    }
    if (!g.knots_eta.empty()) {
        try {
            n_eta = KnotVector(g.knots_eta, g.degree).num_basis();
        } catch (const std::exception& e) {
            v.fail("geometry.knots_eta", e.what());
        }
    }
    if (n_xi > 0 && n_eta > 0 && !g.control_net.empty() &&
        g.control_net.size() != static_cast<std::size_t>(n_xi * n_eta)) {
        std::ostringstream os;
        os << "expected " << n_xi * n_eta << " control points for a " << n_xi << "x" << n_eta
           << " space, got " << g.control_net.size();
        v.fail("geometry.control_net", os.str());
    }
}

void parse_refinement(Validator& v, const json& j, RefinementConfig& r) {
    const json* obj = v.object(j, "refinement", {"target_basis_xi", "target_basis_eta"});
    if (!obj) return;
    if (const json* f = v.field(*obj, "refinement", "target_basis_xi")) {
        if (v.integer(*f, "refinement.target_basis_xi", r.target_basis_xi) &&
            r.target_basis_xi < 2)
            v.fail("refinement.target_basis_xi", "must be at least 2");
    }
    if (const json* f = v.field(*obj, "refinement", "target_basis_eta")) {
        if (v.integer(*f, "refinement.target_basis_eta", r.target_basis_eta) &&
            r.target_basis_eta < 2)
            v.fail("refinement.target_basis_eta", "must be at least 2");
    }
}

void parse_physics(Validator& v, const json& j, PhysicsConfig& p) {
    const json* obj = v.object(j, "physics", {"diffusion", "velocity", "source"});
    if (!obj) return;
    if (const json* f = v.field(*obj, "physics", "diffusion")) {
        if (v.number(*f, "physics.diffusion", p.diffusion) && p.diffusion < 0.0)
            v.fail("physics.diffusion", "must be nonnegative");
    }
    if (const json* f = v.field(*obj, "physics", "velocity")) {
        std::vector<double> vel;
        if (v.number_list(*f, "physics.velocity", vel)) {
            if (vel.size() != 2)
                v.fail("physics.velocity", "expected exactly [vx, vy]");
            else
                p.velocity = {vel[0], vel[1]};
        }
    }
    if (const json* f = v.field(*obj, "physics", "source")) {
        if (f->is_string()) {
            if (f->get<std::string>() == "zero")
                p.source_constant = 0.0;
            else
                v.fail("physics.source", "expected \"zero\" or a constant number");
        } else if (!v.number(*f, "physics.source", p.source_constant)) {
            // problem already recorded
        }
    }
}

void parse_profile_table(Validator& v, const json& j, const std::string& path, ProfileTable& t) {
    const json* obj = v.object(j, path, {"breaks", "values"});
    if (!obj) return;
    if (const json* f = v.field(*obj, path, "breaks")) v.number_list(*f, path + ".breaks", t.breaks);
    if (const json* f = v.field(*obj, path, "values")) v.number_list(*f, path + ".values", t.values);
    if (t.breaks.size() < 2 || t.values.size() + 1 != t.breaks.size()) {
        v.fail(path, "breaks must have one more entry than values");
        return;
    }
    if (t.breaks.front() != 0.0 || t.breaks.back() != 1.0) v.fail(path, "breaks must cover [0, 1]");
    for (std::size_t k = 0; k + 1 < t.breaks.size(); ++k)
        if (!(t.breaks[k] < t.breaks[k + 1])) v.fail(path, "breaks must be strictly increasing");
}

void parse_boundary(Validator& v, const json& j, BoundaryConfig& b) {
    if (!j.is_object() || !j.contains("profile")) {
        v.fail("boundary.profile", "missing field");
        return;
    }
    const json& prof = j.at("profile");
    if (!prof.is_string()) {
        v.fail("boundary.profile", "expected \"paper-step\" or \"table\"");
        return;
    }
    const std::string kind = prof.get<std::string>();
    if (kind == "paper-step") {
        b.kind = BoundaryConfig::Kind::paper_step;
        v.object(j, "boundary", {"profile"});
        return;
    }
    if (kind != "table") {
        v.fail("boundary.profile", "expected \"paper-step\" or \"table\"");
        return;
    }
    b.kind = BoundaryConfig::Kind::table;
    const json* obj = v.object(j, "boundary", {"profile", "edges"});
    if (!obj) return;
    const json* edges = v.field(*obj, "boundary", "edges");
    if (!edges) return;
    const char* names[4] = {"bottom", "right", "top", "left"};
    v.object(*edges, "boundary.edges", {"bottom", "right", "top", "left"});
    for (int e = 0; e < 4; ++e) {
        if (!edges->contains(names[e])) {
            v.fail(std::string("boundary.edges.") + names[e], "missing field");
            continue;
        }
        parse_profile_table(v, edges->at(names[e]), std::string("boundary.edges.") + names[e],
                            b.edges[e]);
    }
}

void parse_solver(Validator& v, const json& j, SolverConfig& s) {
    const json* obj = v.object(j, "solver", {"tolerance", "max_iterations", "relaxation",
                                             "quadrature", "limiter", "force_alpha"});
    if (!obj) return;
    if (const json* f = v.field(*obj, "solver", "tolerance")) {
        if (v.number(*f, "solver.tolerance", s.tolerance) && !(s.tolerance > 0.0))
            v.fail("solver.tolerance", "must be positive");
    }
    if (const json* f = v.field(*obj, "solver", "max_iterations")) {
        if (v.integer(*f, "solver.max_iterations", s.max_iterations) && s.max_iterations < 1)
            v.fail("solver.max_iterations", "must be at least 1");
    }
    if (const json* f = v.field(*obj, "solver", "relaxation")) {
        if (v.number(*f, "solver.relaxation", s.relaxation) && !(s.relaxation > 0.0))
            v.fail("solver.relaxation", "must be positive");
    }
    if (const json* f = v.field(*obj, "solver", "quadrature")) {
        if (v.integer(*f, "solver.quadrature", s.quadrature) && s.quadrature < 1)
            v.fail("solver.quadrature", "must be at least 1");
    }
    if (const json* f = v.field(*obj, "solver", "limiter")) v.boolean(*f, "solver.limiter", s.limiter);
    if (obj->contains("force_alpha")) {
        double fa = 0.0;
        if (v.number(obj->at("force_alpha"), "solver.force_alpha", fa)) {
            if (fa != 0.0 && fa != 1.0)
                v.fail("solver.force_alpha", "must be 0 or 1");
            else
                s.force_alpha = fa;
        }
    }
}

void parse_output(Validator& v, const json& j, OutputConfig& o) {
    const json* obj = v.object(j, "output", {"resolution", "formats"});
    if (!obj) return;
    if (const json* f = v.field(*obj, "output", "resolution")) {
        if (v.integer(*f, "output.resolution", o.resolution) && o.resolution < 2)
            v.fail("output.resolution", "must be at least 2");
    }
    if (const json* f = v.field(*obj, "output", "formats")) {
        if (!f->is_array()) {
            v.fail("output.formats", "expected an array of format names");
            return;
        }
        o.vtk = o.csv = o.report = false;
        for (const auto& fmt : *f) {
            const std::string name = fmt.is_string() ? fmt.get<std::string>() : "";
            if (name == "vtk")
                o.vtk = true;
            else if (name == "csv")
                o.csv = true;
            else if (name == "report")
                o.report = true;
            else
                v.fail("output.formats", "unknown format \"" + name + "\"");
        }
    }
}

} // namespace

ProblemConfig parse_config_text(const std::string& text) {
    json j;
    try {
        j = json::parse(text, nullptr, true, /*ignore_comments=*/true);
    } catch (const json::parse_error& e) {
        throw config_error({std::string("malformed case file: ") + e.what()});
    }

    Validator v;
    ProblemConfig cfg;
    const json* root = v.object(
        j, "case", {"geometry", "refinement", "physics", "boundary", "solver", "output"});
    if (root) {
        if (const json* f = v.field(j, "case", "geometry")) parse_geometry(v, *f, cfg.geometry);
        if (const json* f = v.field(j, "case", "refinement")) parse_refinement(v, *f, cfg.refinement);
        if (const json* f = v.field(j, "case", "physics")) parse_physics(v, *f, cfg.physics);
        if (const json* f = v.field(j, "case", "boundary")) parse_boundary(v, *f, cfg.boundary);
        if (const json* f = v.field(j, "case", "solver")) parse_solver(v, *f, cfg.solver);
        if (const json* f = v.field(j, "case", "output")) parse_output(v, *f, cfg.output);
    }

    if (!v.problems.empty()) throw config_error(std::move(v.problems));
    return cfg;
}

ProblemConfig parse_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw config_error({"cannot open case file: " + path});
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_config_text(buffer.str());
}

std::string write_config(const ProblemConfig& c) {
    ordered_json j;
    j["geometry"]["degree"] = c.geometry.degree;
    j["geometry"]["knots_xi"] = c.geometry.knots_xi;
    j["geometry"]["knots_eta"] = c.geometry.knots_eta;
    auto& net = j["geometry"]["control_net"];
    net = ordered_json::array();
    for (const Vec2& p : c.geometry.control_net) net.push_back({p.x, p.y});

    j["refinement"]["target_basis_xi"] = c.refinement.target_basis_xi;
    j["refinement"]["target_basis_eta"] = c.refinement.target_basis_eta;

    j["physics"]["diffusion"] = c.physics.diffusion;
    j["physics"]["velocity"] = {c.physics.velocity.x, c.physics.velocity.y};
    if (c.physics.source_constant == 0.0)
        j["physics"]["source"] = "zero";
    else
        j["physics"]["source"] = c.physics.source_constant;

    if (c.boundary.kind == BoundaryConfig::Kind::paper_step) {
        j["boundary"]["profile"] = "paper-step";
    } else {
        j["boundary"]["profile"] = "table";
        const char* names[4] = {"bottom", "right", "top", "left"};
        for (int e = 0; e < 4; ++e) {
            j["boundary"]["edges"][names[e]]["breaks"] = c.boundary.edges[e].breaks;
            j["boundary"]["edges"][names[e]]["values"] = c.boundary.edges[e].values;
        }
    }

    j["solver"]["tolerance"] = c.solver.tolerance;
    j["solver"]["max_iterations"] = c.solver.max_iterations;
    j["solver"]["relaxation"] = c.solver.relaxation;
    j["solver"]["quadrature"] = c.solver.quadrature;
    j["solver"]["limiter"] = c.solver.limiter;
    if (c.solver.force_alpha) j["solver"]["force_alpha"] = *c.solver.force_alpha;

    j["output"]["resolution"] = c.output.resolution;
    auto& formats = j["output"]["formats"];
    formats = ordered_json::array();
    if (c.output.vtk) formats.push_back("vtk");
    if (c.output.csv) formats.push_back("csv");
    if (c.output.report) formats.push_back("report");

    return j.dump(2) + "\n";
}

} // namespace igafc
