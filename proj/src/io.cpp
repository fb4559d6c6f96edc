#include "swemed1/io.hpp"

#include <json.hpp>

#include <cmath>
#include <cstdio>
#include <fstream>
#include <system_error>

#include "swemed1/errors.hpp"

namespace swemed1 {

using nlohmann::json;
namespace fs = std::filesystem;

namespace {

std::string fmt(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12e", v + 0.0);  // no "-0"
    return buf;
}

json complex_json(Complex z) { return {{"re", z.real()}, {"im", z.imag()}}; }

json complex_list(const std::vector<Complex>& v) {
    json a = json::array();
    for (Complex z : v) a.push_back(complex_json(z));
    return a;
}

json vec_json(const Vector5& v) { return json(std::vector<double>(v.begin(), v.end())); }

template <std::size_t N>
json mat_json(const linalg::Mat<double, N>& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < N; ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < N; ++j) row.push_back(m(i, j));
        rows.push_back(row);
    }
    return rows;
}

json state_json(const State& s) {
    const Primitive q = s.primitive();
    return {{"h", q.h}, {"u_m", q.u_m}, {"alpha_1", q.alpha_1}, {"c_m", q.c_m}, {"h_b", q.h_b}};
}

json diagnostics_json(const Diagnostics& d) {
    return {{"t", d.t},
            {"EQ1_max", d.eq1_max},
            {"total_surface", d.total_surface},
            {"total_sediment", d.total_sediment},
            {"total_momentum", d.total_momentum},
            {"max_abs_u_m", d.max_abs_u_m},
            {"max_abs_alpha_1", d.max_abs_alpha_1},
            {"max_c_m", d.max_c_m},
            {"min_h", d.min_h}};
}

std::ofstream open_for_writing(const fs::path& path) {
    std::ofstream os(path, std::ios::binary | std::ios::trunc);
    if (!os) throw ValidationError("cannot open '" + path.string() + "' for writing");
    return os;
}

void finish(std::ofstream& os, const fs::path& path) {
    os.flush();
    if (!os) throw ValidationError("failed writing '" + path.string() + "'");
}

}  // namespace

void write_snapshot_csv(std::ostream& os, const Snapshot& s) {
    os << "x,h,u_m,alpha_1,c_m,h_b,EQ1\n";
    for (std::size_t i = 0; i < s.cells.size(); ++i) {
        const Primitive& q = s.cells[i];
        os << fmt(s.x[i]) << ',' << fmt(q.h) << ',' << fmt(q.u_m) << ',' << fmt(q.alpha_1) << ','
           << fmt(q.c_m) << ',' << fmt(q.h_b) << ',' << fmt(std::abs(q.u_m) + std::abs(q.alpha_1)) << '\n';
    }
}

void write_timeseries_csv(std::ostream& os, const std::vector<Diagnostics>& series) {
    os << "t,EQ1_max,total_surface,total_sediment,total_momentum\n";
    for (const auto& d : series) {
        os << fmt(d.t) << ',' << fmt(d.eq1_max) << ',' << fmt(d.total_surface) << ',' << fmt(d.total_sediment)
           << ',' << fmt(d.total_momentum) << '\n';
    }
}

void write_spectrum_csv(std::ostream& os, const SpectralScan& scan) {
    os << "xi,Re,Im\n";
    for (const auto& p : scan.points)
        for (Complex z : p.eigenvalues) os << fmt(p.xi) << ',' << fmt(z.real()) << ',' << fmt(z.imag()) << '\n';
}

std::string snapshot_file_name(double t) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "snapshot_t%g.csv", t);
    return buf;
}

std::string report_to_json(const StabilityReport& r) {
    json j;
    j["state"] = state_json(r.state);
    j["equilibrium"] = {{"kind", to_string(r.equilibrium.kind)},
                        {"full_residual", r.equilibrium.full_residual},
                        {"fast_residual", r.equilibrium.fast_residual}};

    if (r.condition_I) {
        const auto& c = *r.condition_I;
        j["condition_I"] = {{"holds", c.holds},
                            {"block", mat_json(c.block)},
                            {"block_determinant", c.block_determinant},
                            {"zero_block_residual", c.zero_block_residual},
                            {"source_rank", c.source_rank},
                            {"transformed", mat_json(c.transformed)}};
    } else {
        j["condition_I"] = nullptr;
    }

    const auto& c2 = r.condition_II;
    json clusters = json::array();
    for (std::size_t k = 0; k < c2.clusters.size(); ++k) {
        json cl = {{"center", complex_json(c2.clusters[k].center)}, {"algebraic", c2.clusters[k].algebraic}};
        cl["geometric"] = k < c2.geometric.size() ? json(c2.geometric[k]) : json(nullptr);
        clusters.push_back(cl);
    }
    j["condition_II"] = {{"holds", c2.holds},
                         {"class", to_string(c2.cls)},
                         {"eigenvalues", complex_list(c2.eigenvalues)},
                         {"clusters", clusters}};
    j["condition_II"]["symmetrizer"] = c2.symmetrizer ? mat_json(*c2.symmetrizer) : json(nullptr);
    if (c2.witness) {
        const auto& w = *c2.witness;
        json ev = json::array();
        for (const auto& v : w.eigenvectors) ev.push_back(vec_json(v));
        j["condition_II"]["witness"] = {{"lambda", w.lambda},
                                        {"algebraic", w.algebraic},
                                        {"geometric", w.geometric},
                                        {"eigenvectors", ev},
                                        {"generalized", vec_json(w.generalized)},
                                        {"chain_image", vec_json(w.chain_image)}};
    } else {
        j["condition_II"]["witness"] = nullptr;
    }

    j["condition_III"] = {{"status", to_string(r.condition_III.status)},
                          {"max_eigenvalue", r.condition_III.max_eigenvalue}};

    if (r.spectral) {
        json pts = json::array();
        for (const auto& p : r.spectral->points) {
            json q = {{"xi", p.xi}, {"eigenvalues", complex_list(p.eigenvalues)}, {"max_real", p.max_real}};
            q["closed_form_error"] = p.closed_form_error ? json(*p.closed_form_error) : json(nullptr);
            pts.push_back(q);
        }
        j["spectral"] = {{"max_real", r.spectral->max_real},
                         {"closed_form_available", r.spectral->closed_form_available},
                         {"points", pts}};
    } else {
        j["spectral"] = nullptr;
    }

    if (r.fast) {
        const auto& f = *r.fast;
        json kernel = json::array();
        for (const auto& v : f.kernel) kernel.push_back(vec_json(v));
        j["fast"] = {{"beta", f.beta},
                     {"transport_y", mat_json(f.transport_y)},
                     {"structure_residual", f.structure_residual},
                     {"char_poly", f.char_poly},
                     {"char_poly_residual", f.char_poly_residual},
                     {"kernel", kernel},
                     {"kernel_residual", f.kernel_residual}};
    } else {
        j["fast"] = nullptr;
    }
    j["notes"] = r.notes;
    return j.dump(2);
}

std::string run_summary_json(const SimulationConfig& c, const RunResult& r) {
    json j;
    j["config"] = json::parse(to_json(c));
    j["steps"] = r.steps;
    j["newton"] = {{"cells", r.source_stats.cells},
                   {"iterations", r.source_stats.newton_iterations},
                   {"max_iterations", r.source_stats.max_iterations},
                   {"clamp_events", r.source_stats.clamp_events},
                   {"max_clamped", r.source_stats.max_clamped}};
    json snaps = json::array();
    for (const auto& s : r.snapshots) {
        json zeta = json::array();
        const std::size_t n = s.profile.size();
        for (std::size_t k = 0; k < n; ++k) zeta.push_back(n > 1 ? static_cast<double>(k) / (n - 1) : 0.0);
        snaps.push_back({{"t", s.t},
                         {"file", snapshot_file_name(s.t)},
                         {"diagnostics", diagnostics_json(s.diagnostics)},
                         {"probe_x", s.x.empty() ? 0.0 : s.x[static_cast<std::size_t>(probe_cell(c.run.grid, 0.0))]},
                         {"profile", {{"zeta", zeta}, {"u", s.profile}}}});
    }
    j["snapshots"] = snaps;
    return j.dump(2);
}

std::vector<fs::path> write_run_outputs(const fs::path& dir, const SimulationConfig& c, const RunResult& r) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) throw ValidationError("cannot create directory '" + dir.string() + "': " + ec.message());

    std::vector<fs::path> written;
    for (const auto& s : r.snapshots) {
        const fs::path path = dir / snapshot_file_name(s.t);
        auto os = open_for_writing(path);
        write_snapshot_csv(os, s);
        finish(os, path);
        written.push_back(path);
    }
    {
        const fs::path path = dir / "timeseries.csv";
        auto os = open_for_writing(path);
        write_timeseries_csv(os, r.series);
        finish(os, path);
        written.push_back(path);
    }
    {
        const fs::path path = dir / "summary.json";
        auto os = open_for_writing(path);
        os << run_summary_json(c, r) << '\n';
        finish(os, path);
        written.push_back(path);
    }
    return written;
}

}  // namespace swemed1
