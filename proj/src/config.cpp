#include "swemed1/config.hpp"

#include <json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdlib>
#include <limits>
#include <set>
#include <thread>
#include <utility>
#include <vector>

#include "swemed1/errors.hpp"

namespace swemed1 {

using nlohmann::json;

namespace {

constexpr const char* kPaperPreset = "paper-relaxation";

template <typename E>
using Names = std::vector<std::pair<E, const char*>>;

const Names<Boundary> kBoundaries{{Boundary::Open, "open"}, {Boundary::Periodic, "periodic"}};
const Names<Splitting> kSplittings{{Splitting::Lie, "lie"}, {Splitting::Strang, "strang"}};
const Names<SourceTreatment> kTreatments{{SourceTreatment::Full, "full"}, {SourceTreatment::FastSlow, "fast-slow"}};
const Names<InitialCondition> kInitials{{InitialCondition::PaperRelaxation, "paper-relaxation"},
                                        {InitialCondition::LakeAtRest, "lake-at-rest"}};

template <typename E>
const char* name_of(const Names<E>& names, E v) {
    for (const auto& [e, n] : names)
        if (e == v) return n;
    return "?";
}

[[noreturn]] void fail(const std::string& key, const std::string& what) {
    throw ValidationError("config key '" + key + "' " + what);
}

/// View of one JSON object that remembers which keys were consumed.
class Section {
public:
    Section(const json& j, std::string path, bool required)
        : j_(j), path_(std::move(path)), required_(required) {
        if (!j_.is_object()) fail(path_.empty() ? "<root>" : path_, "must be an object");
    }

    std::string key(const std::string& k) const { return path_.empty() ? k : path_ + "." + k; }

    const json* find(const std::string& k) {
        seen_.insert(k);
        const auto it = j_.find(k);
        if (it == j_.end()) {
            if (required_) fail(key(k), "is required when no preset is given");
            return nullptr;
        }
        return &*it;
    }

    void number(const std::string& k, double& out) {
        if (const json* v = find(k)) {
            if (!v->is_number()) fail(key(k), "must be a number");
            out = v->get<double>();
            if (!std::isfinite(out)) fail(key(k), "must be finite");
        }
    }

    void integer(const std::string& k, int& out) {
        if (const json* v = find(k)) {
            if (!v->is_number_integer()) fail(key(k), "must be an integer");
            const auto x = v->get<long long>();
            if (x < std::numeric_limits<int>::min() || x > std::numeric_limits<int>::max())
                fail(key(k), "is out of range");
            out = static_cast<int>(x);
        }
    }

    void string(const std::string& k, std::string& out) {
        if (const json* v = find(k)) {
            if (!v->is_string()) fail(key(k), "must be a string");
            out = v->get<std::string>();
        }
    }

    template <typename E>
    void choice(const std::string& k, const Names<E>& names, E& out) {
        std::string s;
        if (!j_.contains(k)) {
            (void)find(k);
            return;
        }
        string(k, s);
        for (const auto& [e, n] : names) {
            if (s == n) {
                out = e;
                return;
            }
        }
        std::string allowed;
        for (const auto& [e, n] : names) allowed += (allowed.empty() ? "" : ", ") + std::string(n);
        fail(key(k), "must be one of: " + allowed);
    }

    /// Optional in every mode; null clears the value.
    void optional_number(const std::string& k, std::optional<double>& out) {
        seen_.insert(k);
        const auto it = j_.find(k);
        if (it == j_.end()) return;
        if (it->is_null()) {
            out.reset();
            return;
        }
        if (!it->is_number()) fail(key(k), "must be a number or null");
        out = it->get<double>();
    }

    void reject_unknown() const {
        for (const auto& [k, v] : j_.items())
            if (!seen_.count(k)) fail(key(k), "is not recognised");
    }

private:
    const json& j_;
    std::string path_;
    bool required_;
    std::set<std::string> seen_;
};

void read_parameters(Section s, Parameters& p) {
    s.number("g", p.g);
    s.number("rho_w", p.rho_w);
    s.number("rho_s", p.rho_s);
    s.number("d_s", p.d_s);
    s.number("D_sg", p.D_sg);
    s.number("nu_w", p.nu_w);
    s.number("epsilon", p.epsilon);
    s.number("nu", p.nu);
    s.number("psi", p.psi);
    s.number("theta_c", p.theta_c);
    s.number("c_D", p.c_D);
    s.number("delta", p.delta);
    s.number("h_min", p.h_min);
    s.optional_number("mu", p.mu);
    s.reject_unknown();
}

void validate_run(const RunSettings& r) {
    try {
        r.grid.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("config key 'grid' is invalid: ") + e.what());
    }
    if (!(r.cfl > 0.0 && r.cfl <= 1.0)) fail("cfl", "must satisfy 0 < cfl <= 1");
    if (!(r.series_interval > 0.0)) fail("series_interval", "must be positive");
    if (!(r.step.newton.tol > 0.0)) fail("newton.tol", "must be positive");
    if (r.step.newton.max_iter < 1) fail("newton.max_iter", "must be at least 1");
    if (r.step.threads < 0) fail("threads", "must be >= 0");
    if (r.max_steps && *r.max_steps < 1) fail("max_steps", "must be at least 1");
    if (r.snapshot_times.empty()) fail("snapshot_times", "must not be empty");
    for (double t : r.snapshot_times)
        if (!(t >= 0.0)) fail("snapshot_times", "must contain non-negative times");
    std::vector<double> sorted = r.snapshot_times;
    std::sort(sorted.begin(), sorted.end());
    if (std::adjacent_find(sorted.begin(), sorted.end()) != sorted.end())
        fail("snapshot_times", "must not contain duplicates");
}

}  // namespace

SimulationConfig paper_relaxation_preset() {
    SimulationConfig c;
    c.preset = kPaperPreset;
    c.parameters.epsilon = 15.0;
    c.parameters.nu = 10.0;
    c.run.grid = Grid{};
    c.run.grid.x_left = -1.0;
    c.run.grid.x_right = 2.0;
    c.run.grid.n_cells = 300;
    c.run.grid.boundary = Boundary::Open;
    c.run.initial = InitialCondition::PaperRelaxation;
    c.run.snapshot_times = {0.0, 1.0, 5.0, 10.0, 30.0, 60.0, 100.0};
    c.run.step.threads = 0;
    c.output_dir = "output";
    return c;
}

SimulationConfig parse_config(const std::string& text) {
    json root;
    try {
        root = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ValidationError(std::string("config is not valid JSON: ") + e.what());
    }
    if (!root.is_object()) throw ValidationError("config must be a JSON object");
    if (root.empty()) throw ValidationError("config: preset or full spec required");

    SimulationConfig c;
    bool full = true;
    if (root.contains("preset")) {
        if (!root["preset"].is_string()) fail("preset", "must be a string");
        const std::string name = root["preset"].get<std::string>();
        if (name != kPaperPreset) fail("preset", "names an unknown preset '" + name + "'");
        c = paper_relaxation_preset();
        full = false;
    } else {
        c.run.step.threads = 0;
    }
    const bool required = full;

    Section top(root, "", required);
    if (const json* p = top.find("parameters")) read_parameters(Section(*p, "parameters", required), c.parameters);
    if (const json* g = top.find("grid")) {
        Section s(*g, "grid", required);
        s.number("x_left", c.run.grid.x_left);
        s.number("x_right", c.run.grid.x_right);
        s.integer("n_cells", c.run.grid.n_cells);
        s.reject_unknown();
    }
    top.choice("boundary", kBoundaries, c.run.grid.boundary);
    top.choice("initial", kInitials, c.run.initial);
    top.choice("splitting", kSplittings, c.run.step.splitting);
    top.choice("source_treatment", kTreatments, c.run.step.source);
    top.number("cfl", c.run.cfl);
    if (const json* n = top.find("newton")) {
        Section s(*n, "newton", required);
        s.number("tol", c.run.step.newton.tol);
        s.integer("max_iter", c.run.step.newton.max_iter);
        s.reject_unknown();
    }
    if (const json* t = top.find("snapshot_times")) {
        if (!t->is_array()) fail("snapshot_times", "must be an array of numbers");
        c.run.snapshot_times.clear();
        for (const auto& v : *t) {
            if (!v.is_number()) fail("snapshot_times", "must be an array of numbers");
            c.run.snapshot_times.push_back(v.get<double>());
        }
    }
    top.number("series_interval", c.run.series_interval);

    // optional in both modes
    Section opt(root, "", false);
    if (const json* v = opt.find("threads")) {
        if (!v->is_number_integer()) fail("threads", "must be an integer");
        c.run.step.threads = v->get<int>();
    }
    if (const json* v = opt.find("max_steps")) {
        if (v->is_null()) {
            c.run.max_steps.reset();
        } else {
            if (!v->is_number_integer()) fail("max_steps", "must be an integer or null");
            c.run.max_steps = v->get<long long>();
        }
    }
    if (const json* v = opt.find("output_dir")) {
        if (!v->is_string()) fail("output_dir", "must be a string");
        c.output_dir = v->get<std::string>();
    }
    for (const auto& [k, v] : root.items()) {
        static const std::set<std::string> known{"preset", "parameters", "grid", "boundary", "initial",
                                                 "splitting", "source_treatment", "cfl", "newton",
                                                 "snapshot_times", "series_interval", "threads",
                                                 "max_steps", "output_dir"};
        if (!known.count(k)) fail(k, "is not recognised");
    }

    try {
        c.parameters.validate();
    } catch (const ValidationError& e) {
        throw ValidationError(std::string("config: ") + e.what());
    }
    validate_run(c.run);
    return c;
}

std::string to_json(const SimulationConfig& c) {
    const Parameters& p = c.parameters;
    const RunSettings& r = c.run;
    json j;
    if (c.preset) j["preset"] = *c.preset;
    j["parameters"] = {{"g", p.g},           {"rho_w", p.rho_w},     {"rho_s", p.rho_s}, {"d_s", p.d_s},
                       {"D_sg", p.D_sg},     {"nu_w", p.nu_w},       {"epsilon", p.epsilon},
                       {"nu", p.nu},         {"psi", p.psi},         {"theta_c", p.theta_c},
                       {"c_D", p.c_D},       {"delta", p.delta},     {"h_min", p.h_min}};
    j["parameters"]["mu"] = p.mu ? json(*p.mu) : json(nullptr);
    j["grid"] = {{"x_left", r.grid.x_left}, {"x_right", r.grid.x_right}, {"n_cells", r.grid.n_cells}};
    j["boundary"] = name_of(kBoundaries, r.grid.boundary);
    j["initial"] = name_of(kInitials, r.initial);
    j["splitting"] = name_of(kSplittings, r.step.splitting);
    j["source_treatment"] = name_of(kTreatments, r.step.source);
    j["cfl"] = r.cfl;
    j["newton"] = {{"tol", r.step.newton.tol}, {"max_iter", r.step.newton.max_iter}};
    j["snapshot_times"] = r.snapshot_times;
    j["series_interval"] = r.series_interval;
    j["threads"] = r.step.threads;
    j["max_steps"] = r.max_steps ? json(*r.max_steps) : json(nullptr);
    j["output_dir"] = c.output_dir;
    return j.dump(2);
}

int effective_threads(int configured) {
    int n = configured > 0 ? configured : static_cast<int>(std::max(1u, std::thread::hardware_concurrency()));
    if (const char* env = std::getenv("SWEMED1_THREADS")) {
        char* end = nullptr;
        const long cap = std::strtol(env, &end, 10);
        if (end == env || *end != '\0' || cap < 1) {
            throw ValidationError("SWEMED1_THREADS must be a positive integer");
        }
        n = std::min<long>(n, cap);
    }
    return n;
}

}  // namespace swemed1
