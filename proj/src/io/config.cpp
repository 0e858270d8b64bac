#include "bohmsemi/io/config.hpp"

#include <cmath>
#include <fstream>
#include <set>

#include "bohmsemi/io/errors.hpp"

namespace bohmsemi::io {

using nlohmann::json;

namespace {

/// Typed access to one JSON object; remembers which keys were read so that
/// leftovers can be reported as unknown.
class Reader {
public:
    Reader(const json& j, std::string path) : j_(j), path_(std::move(path)) {
        if (!j_.is_object()) throw ConfigError(where() + " must be an object");
    }

    std::string field(const std::string& key) const { return path_.empty() ? key : path_ + "." + key; }

    bool has(const std::string& key) {
        seen_.insert(key);
        return j_.contains(key) && !j_.at(key).is_null();
    }

    const json& at(const std::string& key) {
        if (!has(key)) throw ConfigError(field(key) + " is required");
        return j_.at(key);
    }

    double number(const std::string& key, std::optional<double> fallback = std::nullopt) {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ConfigError(field(key) + " is required");
        }
        const auto& v = j_.at(key);
        if (!v.is_number()) throw ConfigError(field(key) + " must be a number");
        const double x = v.get<double>();
        if (!std::isfinite(x)) throw ConfigError(field(key) + " must be finite");
        return x;
    }

    double positive(const std::string& key, std::optional<double> fallback = std::nullopt) {
        const double x = number(key, fallback);
        if (!(x > 0.0)) throw ConfigError(field(key) + " must be positive (got " + std::to_string(x) + ")");
        return x;
    }

    std::size_t count(const std::string& key, std::optional<std::size_t> fallback = std::nullopt) {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ConfigError(field(key) + " is required");
        }
        const auto& v = j_.at(key);
        if (!v.is_number_integer() || v.get<long long>() < 0)
            throw ConfigError(field(key) + " must be a non-negative integer");
        return v.get<std::size_t>();
    }

    std::string text(const std::string& key, std::optional<std::string> fallback = std::nullopt) {
        if (!has(key)) {
            if (fallback) return *fallback;
            throw ConfigError(field(key) + " is required");
        }
        const auto& v = j_.at(key);
        if (!v.is_string()) throw ConfigError(field(key) + " must be a string");
        return v.get<std::string>();
    }

    std::string choice(const std::string& key, const std::string& fallback, std::initializer_list<const char*> allowed) {
        const auto s = text(key, fallback);
        for (const char* a : allowed)
            if (s == a) return s;
        std::string list;
        for (const char* a : allowed) list += (list.empty() ? "" : ", ") + std::string(a);
        throw ConfigError(field(key) + " must be one of " + list + " (got '" + s + "')");
    }

    bool flag(const std::string& key, bool fallback) {
        if (!has(key)) return fallback;
        const auto& v = j_.at(key);
        if (!v.is_boolean()) throw ConfigError(field(key) + " must be true or false");
        return v.get<bool>();
    }

    std::vector<double> numbers(const std::string& key, std::size_t expected = 0) {
        const auto& v = at(key);
        if (!v.is_array()) throw ConfigError(field(key) + " must be an array of numbers");
        if (expected && v.size() != expected)
            throw ConfigError(field(key) + " must have " + std::to_string(expected) + " entries");
        std::vector<double> out;
        for (const auto& e : v) {
            if (!e.is_number()) throw ConfigError(field(key) + " must be an array of numbers");
            out.push_back(e.get<double>());
        }
        return out;
    }

    Reader child(const std::string& key) { return Reader(at(key), field(key)); }

    void done() const {
        for (auto it = j_.begin(); it != j_.end(); ++it)
            if (!seen_.count(it.key())) throw ConfigError("unknown key " + field(it.key()));
    }

private:
    std::string where() const { return path_.empty() ? "the configuration" : path_; }

    const json& j_;
    std::string path_;
    std::set<std::string> seen_;
};

GridSpec read_grid(Reader r) {
    GridSpec g;
    g.min = r.number("min");
    g.max = r.number("max");
    g.n = r.count("n");
    r.done();
    if (!(g.max > g.min)) throw ConfigError(r.field("max") + " must exceed " + r.field("min"));
    if (g.n < 8) throw ConfigError(r.field("n") + " must be at least 8");
    return g;
}

PacketSpec read_packet(Reader r) {
    PacketSpec p;
    p.center = r.number("center", 0.0);
    p.sigma = r.positive("sigma");
    p.momentum = r.number("momentum", 0.0);
    r.done();
    return p;
}

std::vector<PacketSpec> read_packets(Reader& parent, const std::string& key) {
    const auto& arr = parent.at(key);
    if (!arr.is_array() || arr.empty()) throw ConfigError(parent.field(key) + " must be a non-empty array");
    std::vector<PacketSpec> out;
    for (std::size_t i = 0; i < arr.size(); ++i)
        out.push_back(read_packet(Reader(arr[i], parent.field(key) + "[" + std::to_string(i) + "]")));
    return out;
}

NodePolicy read_policy(Reader& parent) {
    NodePolicy p;
    if (!parent.has("node_policy")) return p;
    Reader r = parent.child("node_policy");
    p.eps_node = r.positive("eps_node", p.eps_node);
    p.v_max = r.positive("v_max", p.v_max);
    r.done();
    return p;
}

MiniConfig read_mini(Reader r) {
    MiniConfig c;
    c.task = r.choice("task", "trajectories", {"trajectories", "compare", "sc-ensemble"});
    {
        Reader p = r.child("packet");
        c.packet.u = p.number("u");
        c.packet.v = p.number("v", 5.0);
        c.packet.sigma = p.positive("sigma");
        c.packet.mode = mini::mode_from_string(p.choice("mode", "superposition", {"R", "L", "superposition"}));
        p.done();
    }
    c.dtau = r.positive("dtau", 0.01);
    if (r.has("tau_span")) {
        const auto s = r.numbers("tau_span", 2);
        if (!(s[1] > s[0])) throw ConfigError(r.field("tau_span") + " must be increasing");
        c.span = {s[0], s[1]};
    }
    if (r.has("step")) {
        Reader s = r.child("step");
        c.step.tol = s.positive("tol", c.step.tol);
        c.step.floor_fraction = s.positive("floor_fraction", c.step.floor_fraction);
        c.step.alpha_stop = s.number("alpha_stop", 0.0);
        if (c.step.alpha_stop < 0.0) throw ConfigError(s.field("alpha_stop") + " must be non-negative");
        s.done();
    }
    if (r.has("seeds")) {
        const auto& arr = r.at("seeds");
        if (!arr.is_array()) throw ConfigError(r.field("seeds") + " must be an array");
        for (std::size_t i = 0; i < arr.size(); ++i) {
            Reader s(arr[i], r.field("seeds") + "[" + std::to_string(i) + "]");
            SeedPoint p;
            p.phi = s.number("phi");
            p.alpha = s.number("alpha");
            p.tau = s.number("tau", 0.0);
            p.highlight = s.flag("highlight", false);
            s.done();
            c.seeds.push_back(p);
        }
    }
    if (r.has("fan")) {
        Reader f = r.child("fan");
        const auto phi = f.numbers("phi", 2);
        const double alpha = f.number("alpha");
        const std::size_t n = f.count("count");
        f.done();
        if (n < 1) throw ConfigError(f.field("count") + " must be at least 1");
        for (std::size_t i = 0; i < n; ++i) {
            const double w = n == 1 ? 0.0 : static_cast<double>(i) / static_cast<double>(n - 1);
            c.seeds.push_back({phi[0] + w * (phi[1] - phi[0]), alpha, 0.0, false});
        }
    }
    if (r.has("classify")) {
        Reader k = r.child("classify");
        c.classify.alpha_asym = k.positive("alpha_asym", 10.0 * c.packet.sigma);
        c.classify.delta_cycle = k.positive("delta_cycle", c.classify.delta_cycle);
        c.classify.cos_min = k.number("cos_min", c.classify.cos_min);
        k.done();
    } else {
        c.classify.alpha_asym = 10.0 * c.packet.sigma;
    }
    c.phi0 = r.number("phi0", c.phi0);
    c.alpha0 = r.number("alpha0", c.alpha0);
    c.tau0 = r.number("tau0", c.tau0);
    c.window = r.positive("window", c.window);
    c.sample_count = r.count("sample_count", c.sample_count);
    if (r.has("view")) {
        const auto v = r.numbers("view", 4);
        if (!(v[1] > v[0] && v[3] > v[2])) throw ConfigError(r.field("view") + " must be [phi_min, phi_max, alpha_min, alpha_max]");
        c.view = std::array<double, 4>{v[0], v[1], v[2], v[3]};
    }
    c.title = r.text("title", "");
    r.done();
    if (c.task == "trajectories" && c.seeds.empty())
        throw ConfigError(r.field("seeds") + " must list at least one initial point");
    if (c.task == "sc-ensemble" && c.sample_count == 0) throw ConfigError(r.field("sample_count") + " must be positive");
    for (const auto& s : c.seeds)
        if (!(c.span.begin <= s.tau && s.tau <= c.span.end))
            throw ConfigError(r.field("seeds") + ": tau must lie inside tau_span");
    return c;
}

TwoParticleConfig read_two_particle(Reader r) {
    TwoParticleConfig c;
    {
        Reader g = r.child("grid");
        c.x1 = read_grid(g.child("x1"));
        c.x2 = read_grid(g.child("x2"));
        g.done();
    }
    c.m1 = r.positive("m1", c.m1);
    c.m2 = r.positive("m2", c.m2);
    {
        Reader k = r.child("coupling");
        c.coupling = k.choice("type", "bilinear", {"bilinear", "harmonic"});
        c.strength = k.number("strength");
        k.done();
    }
    c.chi0 = read_packets(r, "chi0");
    c.env0 = read_packet(r.child("env0"));
    c.X1 = r.number("X1");
    c.X2 = r.number("X2", c.env0.center);
    c.dt = r.positive("dt");
    c.steps = r.count("steps");
    c.snapshot_stride = r.count("snapshot_stride", 0);
    c.policy = read_policy(r);
    if (r.has("ratio_sweep")) {
        c.ratio_sweep = r.numbers("ratio_sweep");
        for (double m : c.ratio_sweep)
            if (!(m > 0.0)) throw ConfigError(r.field("ratio_sweep") + " entries must be positive masses");
    }
    r.done();
    if (!(c.X1 >= c.x1.min && c.X1 <= c.x1.max)) throw ConfigError(r.field("X1") + " lies outside grid.x1");
    if (!(c.X2 >= c.x2.min && c.X2 <= c.x2.max)) throw ConfigError(r.field("X2") + " lies outside grid.x2");
    return c;
}

SNConfig read_sn(Reader r) {
    SNConfig c;
    c.grid = read_grid(r.child("grid"));
    c.G = r.number("G", c.G);
    c.m = r.positive("m", c.m);
    if (r.has("eps_soft")) c.eps_soft = r.positive("eps_soft");
    c.packets = read_packets(r, "packets");
    c.X = r.number("X", c.packets.front().center);
    c.scheme = r.choice("scheme", "both", {"meanfield", "bohmian", "both"});
    c.dt = r.positive("dt");
    c.steps = r.count("steps");
    c.snapshot_stride = r.count("snapshot_stride", 0);
    c.policy = read_policy(r);
    r.done();
    if (!(c.X >= c.grid.min && c.X <= c.grid.max)) throw ConfigError(r.field("X") + " lies outside the grid");
    return c;
}

EquivarianceConfig read_equivariance(Reader r) {
    EquivarianceConfig c;
    c.grid = read_grid(r.child("grid"));
    c.packet = read_packet(r.child("packet"));
    c.mass = r.positive("mass", c.mass);
    c.potential = r.choice("potential", "free", {"free", "harmonic"});
    c.omega = r.positive("omega", c.omega);
    c.count = r.count("count");
    if (c.count == 0) throw ConfigError(r.field("count") + " must be positive");
    c.T = r.positive("T");
    c.dt = r.number("dt", 0.0);
    if (c.dt < 0.0) throw ConfigError(r.field("dt") + " must be non-negative");
    c.policy = read_policy(r);
    r.done();
    return c;
}

}  // namespace

ScenarioConfig parse_config(const json& doc) {
    Reader r(doc, "");
    ScenarioConfig c;
    c.raw = doc;
    c.kind = r.choice("kind", "", {"two-particle", "schroedinger-newton", "minisuperspace", "equivariance"});
    if (r.has("seed")) {
        const auto& s = r.at("seed");
        if (!s.is_number_integer() || s.get<long long>() < 0) throw ConfigError("seed must be a non-negative integer");
        c.seed = s.get<std::uint64_t>();
    }
    c.output = r.text("output", "");
    c.max_flagged_steps = r.count("max_flagged_steps", c.max_flagged_steps);
    try {
        if (c.kind == "minisuperspace") c.minisuperspace = read_mini(r.child("minisuperspace"));
        if (c.kind == "two-particle") c.two_particle = read_two_particle(r.child("two_particle"));
        if (c.kind == "schroedinger-newton") c.schroedinger_newton = read_sn(r.child("schroedinger_newton"));
        if (c.kind == "equivariance") c.equivariance = read_equivariance(r.child("equivariance"));
    } catch (const ConfigError&) {
        throw;
    } catch (const Error& e) {
        throw ConfigError(e.what());
    }
    r.done();
    return c;
}

ScenarioConfig load_config(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read configuration " + path);
    json doc;
    try {
        doc = json::parse(in);
    } catch (const json::parse_error& e) {
        throw ConfigError(path + ": " + e.what());
    }
    return parse_config(doc);
}

}  // namespace bohmsemi::io
