/**
 * @file solver.hpp
 * @brief Operator-split finite-volume solver: path-conservative Rusanov
 *        transport with SSP Runge-Kutta, implicit Euler sources with a
 *        per-cell Newton iteration.
 */
#pragma once

#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "swemed1/model.hpp"
#include "swemed1/parameters.hpp"
#include "swemed1/state.hpp"

namespace swemed1 {

enum class Boundary { Open, Periodic };
enum class Splitting { Lie, Strang };

/// Source used in the implicit step: the complete one, or S_fast + delta S_slow.
enum class SourceTreatment { Full, FastSlow };

struct Grid {
    static constexpr int kGhost = 2;

    double x_left = -1.0;
    double x_right = 2.0;
    int n_cells = 300;
    Boundary boundary = Boundary::Open;

    double dx() const { return (x_right - x_left) / n_cells; }
    double center(int i) const { return x_left + (i + 0.5) * dx(); }
    void validate() const;

    bool operator==(const Grid&) const = default;
};

struct NewtonSettings {
    double tol = 1e-12;
    int max_iter = 50;

    bool operator==(const NewtonSettings&) const = default;
};

/// Cell states with ghost layers; index -kGhost .. n_cells + kGhost - 1.
struct Field {
    Grid grid;
    double t = 0.0;
    std::vector<State> cells;

    Field() = default;
    explicit Field(const Grid& g) : grid(g), cells(static_cast<std::size_t>(g.n_cells + 2 * Grid::kGhost)) {}

    int size() const { return grid.n_cells; }
    State& operator[](int i) { return cells[static_cast<std::size_t>(i + Grid::kGhost)]; }
    const State& operator[](int i) const { return cells[static_cast<std::size_t>(i + Grid::kGhost)]; }
};

/// Copies interior states into the ghost layers according to the boundary policy.
void fill_ghosts(Field& f);

/// Step in water height and concentration at x = 0 with a uniform sheared flow.
Field init_paper_scenario(const Grid& g);
Field init_paper_scenario(int n_cells);

/// Still water with surface elevation `surface` over the bed profile `bed(x)`.
Field init_lake_at_rest(const Grid& g, double surface, const std::function<double(double)>& bed);

/// Spectral radius of A(W) in every interior cell.
std::vector<double> spectral_radii(const Field& f, const Model& m);

/// cfl * dx / max spectral radius. Throws ValidationError if cfl <= 0 and
/// NumericalError on a dry cell.
double cfl_dt(const Field& f, const Parameters& p, double cfl);

Field transport_step(const Field& f, const Parameters& p, double dt);

struct SourceStats {
    long long cells = 0;
    long long newton_iterations = 0;
    int max_iterations = 0;
    long long clamp_events = 0;
    double max_clamped = 0.0;  ///< largest |c_m| removed by clamping

    void merge(const SourceStats& o);
};

Field source_step(const Field& f, const Parameters& p, double dt, const NewtonSettings& newton,
                  SourceStats* stats = nullptr, SourceTreatment treatment = SourceTreatment::Full);

/// Solves W = w_old + dt S(W) for one cell; throws NumericalError on failure.
Vector5 implicit_source_update(const Model& m, const Vector5& w_old, double dt, const NewtonSettings& newton,
                               SourceTreatment treatment, int* iterations = nullptr);

struct StepOptions {
    Splitting splitting = Splitting::Lie;
    SourceTreatment source = SourceTreatment::Full;
    NewtonSettings newton;
    bool transport_enabled = true;  ///< test hook: false freezes A to zero
    bool source_enabled = true;     ///< test hook: false drops the source
    int threads = 1;

    bool operator==(const StepOptions&) const = default;
};

/// Lie: transport then source. Strang: half source, transport, half source.
template <typename S, typename T, typename R>
S compose_split(const S& s, double dt, Splitting splitting, T&& transport, R&& source) {
    if (splitting == Splitting::Lie) return source(transport(s, dt), dt);
    return source(transport(source(s, 0.5 * dt), dt), 0.5 * dt);
}

Field step(const Field& f, const Parameters& p, double dt, const StepOptions& opt, SourceStats* stats = nullptr);

// ---------------------------------------------------------------------------
// diagnostics and driver

struct Diagnostics {
    double t = 0.0;
    double eq1_max = 0.0;
    double total_surface = 0.0;   ///< integral of h + h_b
    double total_sediment = 0.0;  ///< integral of hc_m + (1 - psi) h_b
    double total_momentum = 0.0;  ///< integral of hu_m
    double max_abs_u_m = 0.0;
    double max_abs_alpha_1 = 0.0;
    double max_c_m = 0.0;
    double min_h = 0.0;
};

Diagnostics diagnose(const Field& f, const Parameters& p);

/// Index of the interior cell whose center is nearest x0 (ties go left).
int probe_cell(const Grid& g, double x0);

/// u(zeta_k) = u_m + alpha_1 (1 - 2 zeta_k) at zeta_k = k / samples, k = 0..samples.
std::vector<double> velocity_probe(const State& s, int samples = 50);

enum class InitialCondition { PaperRelaxation, LakeAtRest };

struct RunSettings {
    Grid grid;
    InitialCondition initial = InitialCondition::PaperRelaxation;
    StepOptions step;
    double cfl = 0.45;
    std::vector<double> snapshot_times{0.0, 1.0, 5.0, 10.0, 30.0, 60.0, 100.0};
    double series_interval = 0.1;
    std::optional<long long> max_steps;  ///< stop after this many steps (conservation studies)

    bool operator==(const RunSettings&) const = default;
};

struct Snapshot {
    double t = 0.0;
    std::vector<double> x;
    std::vector<Primitive> cells;
    Diagnostics diagnostics;
    std::vector<double> profile;  ///< velocity probe at the cell nearest x = 0
};

struct RunResult {
    std::vector<Snapshot> snapshots;
    std::vector<Diagnostics> series;
    Field final_field;
    long long steps = 0;
    SourceStats source_stats;
};

Snapshot take_snapshot(const Field& f, const Parameters& p);

Field initial_field(const RunSettings& s);

/// Integrates to the last snapshot time (or max_steps), hitting snapshot and
/// series times exactly. Failures are rethrown with the current time attached.
RunResult run(const Parameters& p, const RunSettings& s);

}  // namespace swemed1
