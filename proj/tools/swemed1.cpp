// Command-line front end: simulate, stability, spectrum, verify.

#include <CLI11.hpp>

#include <cstdio>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "swemed1/config.hpp"
#include "swemed1/errors.hpp"
#include "swemed1/io.hpp"
#include "swemed1/solver.hpp"
#include "swemed1/stability.hpp"
#include "swemed1/verify.hpp"

using namespace swemed1;

namespace {

enum Exit { kOk = 0, kValidation = 1, kNumerical = 2 };

std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ValidationError("cannot read config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

SimulationConfig load_config(const std::string& path) {
    if (path.empty()) return paper_relaxation_preset();
    return parse_config(read_file(path));
}

std::vector<double> parse_list(const std::string& text, const char* what) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        std::size_t used = 0;
        double v = 0.0;
        try {
            v = std::stod(item, &used);
        } catch (const std::exception&) {
            used = 0;
        }
        while (used < item.size() && std::isspace(static_cast<unsigned char>(item[used]))) ++used;
        if (item.empty() || used != item.size()) {
            throw ValidationError(std::string(what) + ": cannot parse '" + item + "' as a number");
        }
        out.push_back(v);
    }
    if (out.empty()) throw ValidationError(std::string(what) + ": empty list");
    return out;
}

State parse_state(const std::string& text, const Parameters& p) {
    const auto v = parse_list(text, "--state");
    if (v.size() != 5) throw ValidationError("--state expects h,um,a1,cm,hb (5 values)");
    const State s = State::from_primitive(v[0], v[1], v[2], v[3], v[4]);
    check_admissible(s, p);
    return s;
}

int cmd_simulate(const std::string& config_path, const std::string& out_dir) {
    SimulationConfig c = load_config(config_path);
    if (!out_dir.empty()) c.output_dir = out_dir;
    RunSettings rs = c.run;
    rs.step.threads = effective_threads(c.run.step.threads);

    const RunResult r = run(c.parameters, rs);
    const auto files = write_run_outputs(c.output_dir, c, r);
    const Diagnostics& last = r.series.back();
    std::fprintf(stderr, "simulate: %lld steps to t = %g, EQ1_max = %.6e, max c_m = %.6e, %lld clamp events\n",
                 r.steps, last.t, last.eq1_max, last.max_c_m, r.source_stats.clamp_events);
    for (const auto& f : files) std::printf("%s\n", f.string().c_str());
    return kOk;
}

int cmd_stability(const std::string& state_text, const std::string& config_path, const std::string& xi_text) {
    const SimulationConfig c = load_config(config_path);
    const State s = parse_state(state_text, c.parameters);
    const auto xi = parse_list(xi_text, "--xi");
    const StabilityReport r = on_suspended_rest_manifold(s) ? fast_manifold_report(s, c.parameters)
                                                            : stability_report(s, c.parameters, xi);
    std::cout << report_to_json(r) << '\n';
    return kOk;
}

int cmd_spectrum(const std::string& state_text, const std::string& config_path, const std::string& xi_text) {
    const SimulationConfig c = load_config(config_path);
    const State s = parse_state(state_text, c.parameters);
    write_spectrum_csv(std::cout, spectral_scan(s, c.parameters, parse_list(xi_text, "--xi")));
    return kOk;
}

int cmd_verify(const std::string& config_path) {
    const SimulationConfig c = load_config(config_path);
    bool all = true;
    for (const auto& r : run_builtin_checks(c.parameters)) {
        std::printf("%s  %s (%s)\n", r.passed ? "PASS" : "FAIL", r.name.c_str(), r.detail.c_str());
        all = all && r.passed;
    }
    std::printf("%s\n", all ? "all checks passed" : "some checks failed");
    return all ? kOk : kNumerical;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Shallow water Exner moment model lab with entrainment and deposition"};
    app.require_subcommand(1);

    std::string config, out, state, xi = "0,0.5,1,2,10";

    auto* sim = app.add_subcommand("simulate", "run a configured simulation and write CSV output");
    sim->add_option("--config", config, "JSON configuration file")->required();
    sim->add_option("--out", out, "output directory (overrides output_dir)");

    auto* stab = app.add_subcommand("stability", "stability report for one state as JSON");
    stab->add_option("--state", state, "h,um,a1,cm,hb")->required();
    stab->add_option("--config", config, "JSON configuration file (parameters)");
    stab->add_option("--xi", xi, "wave numbers for the spectral scan");

    auto* spec = app.add_subcommand("spectrum", "eigenvalues of S_W - i xi A as CSV");
    spec->add_option("--state", state, "h,um,a1,cm,hb")->required();
    spec->add_option("--xi", xi, "comma-separated wave numbers");
    spec->add_option("--config", config, "JSON configuration file (parameters)");

    auto* ver = app.add_subcommand("verify", "run the built-in structural checks");
    ver->add_option("--config", config, "JSON configuration file (parameters)");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e);
        return code == 0 ? kOk : kValidation;
    }

    try {
        if (*sim) return cmd_simulate(config, out);
        if (*stab) return cmd_stability(state, config, xi);
        if (*spec) return cmd_spectrum(state, config, xi);
        if (*ver) return cmd_verify(config);
    } catch (const ValidationError& e) {
        std::fprintf(stderr, "error: %s\n", e.what());
        return kValidation;
    } catch (const NumericalError& e) {
        std::fprintf(stderr, "numerical failure: %s\n", e.what());
        return kNumerical;
    }
    return kValidation;
}
