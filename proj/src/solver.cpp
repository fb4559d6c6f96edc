#include "swemed1/solver.hpp"

#include <algorithm>
#include <cmath>
#include <exception>
#include <limits>
#include <sstream>
#include <thread>

#include "swemed1/errors.hpp"

namespace swemed1 {

namespace {

/// Runs body(i) for i in [0, n). Every index is independent, so the result
/// does not depend on the worker count.
template <typename F>
void parallel_for(int n, int threads, F&& body) {
    if (threads <= 1 || n < 2 * threads) {
        for (int i = 0; i < n; ++i) body(i);
        return;
    }
    const int workers = std::min(threads, n);
    std::vector<std::exception_ptr> errors(static_cast<std::size_t>(workers));
    {
        std::vector<std::jthread> pool;
        pool.reserve(static_cast<std::size_t>(workers));
        for (int w = 0; w < workers; ++w) {
            pool.emplace_back([&, w] {
                const int lo = static_cast<int>(static_cast<long long>(n) * w / workers);
                const int hi = static_cast<int>(static_cast<long long>(n) * (w + 1) / workers);
                try {
                    for (int i = lo; i < hi; ++i) body(i);
                } catch (...) {
                    errors[static_cast<std::size_t>(w)] = std::current_exception();
                }
            });
        }
    }
    // report the failure of the leftmost chunk, as the sequential loop would
    for (const auto& e : errors)
        if (e) std::rethrow_exception(e);
}

int source_index(const Grid& g, int i) {
    const int n = g.n_cells;
    if (i >= 0 && i < n) return i;
    if (g.boundary == Boundary::Periodic) return ((i % n) + n) % n;
    return i < 0 ? 0 : n - 1;
}

std::string cell_message(const char* stage, int i, const std::string& what) {
    std::ostringstream os;
    os << stage << ": cell " << i << ": " << what;
    return os.str();
}

void check_stage(const Field& f, const Parameters& p) {
    for (int i = 0; i < f.size(); ++i) {
        const State& s = f[i];
        bool finite = true;
        for (double v : s.w) finite = finite && std::isfinite(v);
        if (!finite) throw NumericalError(cell_message("transport", i, "non-finite state"));
        if (!(s.h() >= p.h_min)) {
            std::ostringstream os;
            os << "h = " << s.h() << " below h_min = " << p.h_min;
            throw NumericalError(cell_message("transport", i, os.str()));
        }
    }
}

struct CellFlux {
    double sediment = 0.0;  ///< hc_m u_m
    double bed = 0.0;       ///< Q_b / (1 - psi)
    bool bed_active = false;
};

/**
 * Semi-discrete transport operator -(1/dx)(D+_{i-1/2} + D-_{i+1/2}).
 *
 * Rows 1, 4 and 5 of A(W) are exact gradients (of hu_m, hc_m u_m and
 * Q_b/(1 - psi)), so their path integral is the flux difference for any path.
 * Rows 2 and 3 are genuinely nonconservative and use A at the segment midpoint.
 * The viscous part acts on the free surface h + h_b instead of h where the bed
 * is still, which keeps water at rest over an uneven bed exactly at rest; the
 * bed itself is only smoothed where bedload is active.
 */
class TransportOperator {
public:
    TransportOperator(const Model& m, std::vector<double> radii, int threads)
        : m_(m), radii_(std::move(radii)), threads_(threads) {}

    void operator()(Field& f, std::vector<Vector5>& rhs) {
        fill_ghosts(f);
        const int n = f.size();
        const double inv_dx = 1.0 / f.grid.dx();
        flux_.resize(static_cast<std::size_t>(n + 2));
        dminus_.resize(static_cast<std::size_t>(n + 1));
        dplus_.resize(static_cast<std::size_t>(n + 1));
        rhs.resize(static_cast<std::size_t>(n));

        parallel_for(n + 2, threads_, [&](int k) {
            const Vector5& w = f[k - 1].w;
            CellFlux& c = flux_[static_cast<std::size_t>(k)];
            c.sediment = w[kHc] * w[kHu] / w[kH];
            c.bed = m_.bed_flux(w);
            c.bed_active = c.bed != 0.0;
        });

        parallel_for(n + 1, threads_, [&](int j) { interface(f, j); });

        parallel_for(n, threads_, [&](int i) {
            const auto& left = dplus_[static_cast<std::size_t>(i)];
            const auto& right = dminus_[static_cast<std::size_t>(i + 1)];
            Vector5& r = rhs[static_cast<std::size_t>(i)];
            for (std::size_t k = 0; k < 5; ++k) r[k] = -(left[k] + right[k]) * inv_dx;
        });
    }

private:
    void interface(const Field& f, int j) {
        const Vector5& wl = f[j - 1].w;
        const Vector5& wr = f[j].w;
        const CellFlux& fl = flux_[static_cast<std::size_t>(j)];
        const CellFlux& fr = flux_[static_cast<std::size_t>(j + 1)];
        const Parameters& p = m_.parameters();

        Vector5 dw{};
        for (std::size_t k = 0; k < 5; ++k) dw[k] = wr[k] - wl[k];

        const double h = 0.5 * (wl[kH] + wr[kH]);
        const double u = 0.5 * (wl[kHu] + wr[kHu]) / h;
        const double a = 0.5 * (wl[kHa] + wr[kHa]) / h;
        const double c = 0.5 * (wl[kHc] + wr[kHc]) / h;
        const double gh = p.g * h;
        const double beta = gh * (p.rho_s - p.rho_w) / (2.0 * mixture_density(c, p));

        Vector5 fluct;
        fluct[kH] = dw[kHu];
        fluct[kHu] = (gh - u * u - a * a / 3.0 - c * beta) * dw[kH] + 2.0 * u * dw[kHu] +
                     (2.0 * a / 3.0) * dw[kHa] + beta * dw[kHc] + gh * dw[kHb];
        fluct[kHa] = (-2.0 * a * u - c * beta) * dw[kH] + 2.0 * a * dw[kHu] + u * dw[kHa] + beta * dw[kHc];
        fluct[kHc] = fr.sediment - fl.sediment;
        fluct[kHb] = fr.bed - fl.bed;

        const Grid& g = f.grid;
        const double alpha = std::max(radii_[static_cast<std::size_t>(source_index(g, j - 1))],
                                      radii_[static_cast<std::size_t>(source_index(g, j))]);
        Vector5 visc;
        // The surface h + h_b always receives alpha * d(h + h_b): through the
        // water column over a still bed, split between water and bed otherwise.
        const bool active = fl.bed_active || fr.bed_active;
        visc[kH] = alpha * (active ? dw[kH] : dw[kH] + dw[kHb]);
        visc[kHu] = alpha * dw[kHu];
        visc[kHa] = alpha * dw[kHa];
        visc[kHc] = alpha * dw[kHc];
        visc[kHb] = active ? alpha * dw[kHb] : 0.0;

        Vector5& dm = dminus_[static_cast<std::size_t>(j)];
        Vector5& dp = dplus_[static_cast<std::size_t>(j)];
        for (std::size_t k = 0; k < 5; ++k) {
            dm[k] = 0.5 * (fluct[k] - visc[k]);
            dp[k] = 0.5 * (fluct[k] + visc[k]);
        }
    }

    const Model& m_;
    std::vector<double> radii_;
    int threads_;
    std::vector<CellFlux> flux_;
    std::vector<Vector5> dminus_;
    std::vector<Vector5> dplus_;
};

// Four-stage, third-order SSP Runge-Kutta (CFL coefficient 2). The third
// stage 2/3 u0 + 1/3 u2 is evaluated as u0 + (u2 - u0)/3 so that a steady
// state is reproduced bit for bit.
struct Ssprk43 {
    static constexpr double kHalf = 0.5;
    static constexpr double kMix = 1.0 / 3.0;
    static constexpr double kSixth = 1.0 / 6.0;
};

void axpy(Field& out, const Field& base, double dt, const std::vector<Vector5>& rhs) {
    for (int i = 0; i < out.size(); ++i)
        for (std::size_t k = 0; k < 5; ++k) out[i].w[k] = base[i].w[k] + dt * rhs[static_cast<std::size_t>(i)][k];
}

Field transport_impl(const Field& f, const Model& m, double dt, std::vector<double> radii, int threads) {
    const Parameters& p = m.parameters();
    TransportOperator op(m, std::move(radii), threads);
    std::vector<Vector5> rhs;

    Field u0 = f;
    Field u1 = f;
    op(u0, rhs);
    axpy(u1, u0, Ssprk43::kHalf * dt, rhs);
    check_stage(u1, p);

    Field u2 = u1;
    op(u1, rhs);
    axpy(u2, u1, Ssprk43::kHalf * dt, rhs);
    check_stage(u2, p);

    Field u3 = u2;
    op(u2, rhs);
    for (int i = 0; i < u3.size(); ++i)
        for (std::size_t k = 0; k < 5; ++k)
            u3[i].w[k] = u0[i].w[k] + Ssprk43::kMix * (u2[i].w[k] - u0[i].w[k]) +
                         Ssprk43::kSixth * dt * rhs[static_cast<std::size_t>(i)][k];
    check_stage(u3, p);

    Field out = u3;
    op(u3, rhs);
    axpy(out, u3, Ssprk43::kHalf * dt, rhs);
    check_stage(out, p);
    fill_ghosts(out);
    return out;
}

Vector5 evaluate_source(const Model& m, const Vector5& w, SourceTreatment treatment) {
    if (treatment == SourceTreatment::Full) return m.source_unchecked(w, SourceMode::Full);
    Vector5 s = m.source_unchecked(w, SourceMode::Fast);
    const Vector5 slow = m.source_unchecked(w, SourceMode::Slow);
    for (std::size_t k = 0; k < 5; ++k) s[k] += m.parameters().delta * slow[k];
    return s;
}

Field source_impl(const Field& f, const Model& m, double dt, const NewtonSettings& newton,
                  SourceTreatment treatment, int threads, SourceStats* stats) {
    Field out = f;
    const int n = f.size();
    std::vector<int> iterations(static_cast<std::size_t>(n), 0);
    std::vector<double> clamped(static_cast<std::size_t>(n), 0.0);
    constexpr double kCmax = 1.0 - 1e-12;

    parallel_for(n, threads, [&](int i) {
        int it = 0;
        Vector5 w;
        try {
            w = implicit_source_update(m, f[i].w, dt, newton, treatment, &it);
        } catch (const NumericalError& e) {
            throw NumericalError(cell_message("source", i, e.what()));
        }
        const double c = w[kHc] / w[kH];
        if (c < 0.0) {
            clamped[static_cast<std::size_t>(i)] = -c;
            w[kHc] = 0.0;
        } else if (c > kCmax) {
            clamped[static_cast<std::size_t>(i)] = c - kCmax;
            w[kHc] = kCmax * w[kH];
        }
        out[i].w = w;
        iterations[static_cast<std::size_t>(i)] = it;
    });

    if (stats) {
        for (int i = 0; i < n; ++i) {
            const auto k = static_cast<std::size_t>(i);
            ++stats->cells;
            stats->newton_iterations += iterations[k];
            stats->max_iterations = std::max(stats->max_iterations, iterations[k]);
            if (clamped[k] > 0.0) {
                ++stats->clamp_events;
                stats->max_clamped = std::max(stats->max_clamped, clamped[k]);
            }
        }
    }
    fill_ghosts(out);
    return out;
}

Field step_impl(const Field& f, const Model& m, double dt, const StepOptions& opt, SourceStats* stats,
                const std::vector<double>* radii_hint) {
    bool hint_valid = radii_hint != nullptr && opt.splitting == Splitting::Lie;
    auto transport = [&](const Field& x, double d) {
        if (!opt.transport_enabled) return x;
        std::vector<double> radii = hint_valid ? *radii_hint : spectral_radii(x, m);
        hint_valid = false;
        return transport_impl(x, m, d, std::move(radii), opt.threads);
    };
    auto source = [&](const Field& x, double d) {
        if (!opt.source_enabled) return x;
        return source_impl(x, m, d, opt.newton, opt.source, opt.threads, stats);
    };
    Field out = compose_split(f, dt, opt.splitting, transport, source);
    out.t = f.t + dt;
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

void Grid::validate() const {
    if (!(std::isfinite(x_left) && std::isfinite(x_right) && x_right > x_left)) {
        throw ValidationError("grid: x_right must exceed x_left");
    }
    if (n_cells < 4) throw ValidationError("grid: n_cells must be at least 4");
}

void fill_ghosts(Field& f) {
    const int n = f.size();
    for (int g = 1; g <= Grid::kGhost; ++g) {
        f[-g] = f[source_index(f.grid, -g)];
        f[n - 1 + g] = f[source_index(f.grid, n - 1 + g)];
    }
}

Field init_paper_scenario(const Grid& g) {
    g.validate();
    Field f(g);
    for (int i = 0; i < g.n_cells; ++i) {
        const bool left = g.center(i) < 0.0;
        f[i] = State::from_primitive(left ? 1.5 : 1.0, 0.05, -0.01, left ? 0.01 : 0.0, 0.0);
    }
    fill_ghosts(f);
    return f;
}

Field init_paper_scenario(int n_cells) {
    Grid g;
    g.n_cells = n_cells;
    return init_paper_scenario(g);
}

Field init_lake_at_rest(const Grid& g, double surface, const std::function<double(double)>& bed) {
    g.validate();
    Field f(g);
    for (int i = 0; i < g.n_cells; ++i) {
        const double b = bed(g.center(i));
        f[i] = State::from_primitive(surface - b, 0.0, 0.0, 0.0, b);
    }
    fill_ghosts(f);
    return f;
}

std::vector<double> spectral_radii(const Field& f, const Model& m) {
    std::vector<double> r(static_cast<std::size_t>(f.size()));
    for (int i = 0; i < f.size(); ++i) {
        if (!(f[i].h() >= m.parameters().h_min)) {
            throw NumericalError(cell_message("cfl", i, "dry cell"));
        }
        r[static_cast<std::size_t>(i)] = linalg::spectral_radius(m.transport_matrix_unchecked(f[i].w));
    }
    return r;
}

double cfl_dt(const Field& f, const Parameters& p, double cfl) {
    if (!(cfl > 0.0)) throw ValidationError("cfl must be positive");
    const Model m(p);
    const auto r = spectral_radii(f, m);
    const double speed = *std::max_element(r.begin(), r.end());
    if (!(speed > 0.0)) throw NumericalError("cfl: zero wave speed");
    return cfl * f.grid.dx() / speed;
}

Field transport_step(const Field& f, const Parameters& p, double dt) {
    const Model m(p);
    return transport_impl(f, m, dt, spectral_radii(f, m), 1);
}

void SourceStats::merge(const SourceStats& o) {
    cells += o.cells;
    newton_iterations += o.newton_iterations;
    max_iterations = std::max(max_iterations, o.max_iterations);
    clamp_events += o.clamp_events;
    max_clamped = std::max(max_clamped, o.max_clamped);
}

Vector5 implicit_source_update(const Model& m, const Vector5& w_old, double dt, const NewtonSettings& newton,
                               SourceTreatment treatment, int* iterations) {
    const double h_min = m.parameters().h_min;
    const double threshold = newton.tol * (1.0 + linalg::max_abs(w_old));
    auto residual = [&](const Vector5& w) {
        const Vector5 s = evaluate_source(m, w, treatment);
        Vector5 r;
        for (std::size_t k = 0; k < 5; ++k) r[k] = w[k] - w_old[k] - dt * s[k];
        return r;
    };

    Vector5 w = w_old;
    Vector5 r = residual(w);
    int it = 0;
    while (linalg::max_abs(r) > threshold) {
        if (it == newton.max_iter) {
            std::ostringstream os;
            os << "Newton did not converge in " << newton.max_iter << " iterations (residual "
               << linalg::max_abs(r) << ")";
            throw NumericalError(os.str());
        }
        ++it;
        Matrix5 jac = linalg::fd_jacobian(
            [&](const Vector5& x) { return evaluate_source(m, x, treatment); }, w, 1e-7);
        jac = Matrix5::identity() - dt * jac;
        Vector5 delta = r;
        for (auto& v : delta) v = -v;
        if (!linalg::solve_in_place(jac, delta)) throw NumericalError("singular Newton matrix");

        double lambda = 1.0;
        Vector5 trial;
        for (int back = 0; back < 40; ++back) {
            for (std::size_t k = 0; k < 5; ++k) trial[k] = w[k] + lambda * delta[k];
            if (trial[kH] >= h_min) break;
            lambda *= 0.5;
        }
        if (!(trial[kH] >= h_min)) throw NumericalError("Newton iterate left the admissible set");
        w = trial;
        r = residual(w);
    }
    if (iterations) *iterations = it;
    return w;
}

Field source_step(const Field& f, const Parameters& p, double dt, const NewtonSettings& newton,
                  SourceStats* stats, SourceTreatment treatment) {
    const Model m(p);
    return source_impl(f, m, dt, newton, treatment, 1, stats);
}

Field step(const Field& f, const Parameters& p, double dt, const StepOptions& opt, SourceStats* stats) {
    const Model m(p);
    return step_impl(f, m, dt, opt, stats, nullptr);
}

// ---------------------------------------------------------------------------

Diagnostics diagnose(const Field& f, const Parameters& p) {
    Diagnostics d;
    d.t = f.t;
    d.min_h = std::numeric_limits<double>::infinity();
    const double dx = f.grid.dx();
    for (int i = 0; i < f.size(); ++i) {
        const Primitive q = f[i].primitive();
        d.eq1_max = std::max(d.eq1_max, std::abs(q.u_m) + std::abs(q.alpha_1));
        d.max_abs_u_m = std::max(d.max_abs_u_m, std::abs(q.u_m));
        d.max_abs_alpha_1 = std::max(d.max_abs_alpha_1, std::abs(q.alpha_1));
        d.max_c_m = std::max(d.max_c_m, q.c_m);
        d.min_h = std::min(d.min_h, q.h);
        d.total_surface += (f[i].h() + f[i].h_b()) * dx;
        d.total_sediment += (f[i].hc() + (1.0 - p.psi) * f[i].h_b()) * dx;
        d.total_momentum += f[i].hu() * dx;
    }
    return d;
}

int probe_cell(const Grid& g, double x0) {
    int best = 0;
    for (int i = 1; i < g.n_cells; ++i)
        if (std::abs(g.center(i) - x0) < std::abs(g.center(best) - x0)) best = i;
    return best;
}

std::vector<double> velocity_probe(const State& s, int samples) {
    const Primitive q = s.primitive();
    std::vector<double> u(static_cast<std::size_t>(samples + 1));
    for (int k = 0; k <= samples; ++k)
        u[static_cast<std::size_t>(k)] = velocity_profile(q.u_m, q.alpha_1, static_cast<double>(k) / samples);
    return u;
}

Snapshot take_snapshot(const Field& f, const Parameters& p) {
    Snapshot s;
    s.t = f.t;
    s.diagnostics = diagnose(f, p);
    for (int i = 0; i < f.size(); ++i) {
        s.x.push_back(f.grid.center(i));
        s.cells.push_back(f[i].primitive());
    }
    s.profile = velocity_probe(f[probe_cell(f.grid, 0.0)]);
    return s;
}

Field initial_field(const RunSettings& s) {
    switch (s.initial) {
        case InitialCondition::PaperRelaxation: return init_paper_scenario(s.grid);
        case InitialCondition::LakeAtRest: {
            // surface 1 over a bed ramp rising to 0.5 across the middle third
            const double a = s.grid.x_left, b = s.grid.x_right;
            const double l = b - a;
            return init_lake_at_rest(s.grid, 1.0, [=](double x) {
                const double z = (x - a) / l;
                return 0.5 * std::clamp(3.0 * z - 1.0, 0.0, 1.0);
            });
        }
    }
    throw ValidationError("unknown initial condition");
}

RunResult run(const Parameters& p, const RunSettings& s) {
    p.validate();
    s.grid.validate();
    if (!(s.cfl > 0.0)) throw ValidationError("cfl must be positive");
    if (s.snapshot_times.empty()) throw ValidationError("snapshot_times must not be empty");
    if (!(s.series_interval > 0.0)) throw ValidationError("series_interval must be positive");

    std::vector<double> snaps = s.snapshot_times;
    std::sort(snaps.begin(), snaps.end());
    const double t_final = snaps.back();
    const double eps_t = 1e-12 * std::max(1.0, t_final);

    const Model m(p);
    RunResult out;
    Field f = initial_field(s);
    f.t = 0.0;

    std::size_t next_snap = 0;
    long long next_series = 0;
    auto series_time = [&](long long k) { return std::min(t_final, static_cast<double>(k) * s.series_interval); };
    auto record = [&] {
        if (next_snap < snaps.size() && std::abs(f.t - snaps[next_snap]) <= eps_t) {
            out.snapshots.push_back(take_snapshot(f, p));
            ++next_snap;
        }
        if (std::abs(f.t - series_time(next_series)) <= eps_t) {
            out.series.push_back(diagnose(f, p));
            ++next_series;
        }
    };
    record();

    try {
        while (f.t < t_final - eps_t) {
            if (s.max_steps && out.steps >= *s.max_steps) break;
            const auto radii = spectral_radii(f, m);
            const double speed = *std::max_element(radii.begin(), radii.end());
            if (!(speed > 0.0)) throw NumericalError("zero wave speed");
            double dt = s.cfl * f.grid.dx() / speed;

            double target = t_final;
            if (next_snap < snaps.size()) target = std::min(target, snaps[next_snap]);
            target = std::min(target, series_time(next_series));
            bool lands = false;
            if (f.t + dt >= target - eps_t) {
                dt = target - f.t;
                lands = true;
            }

            f = step_impl(f, m, dt, s.step, &out.source_stats, &radii);
            if (lands) f.t = target;
            ++out.steps;
            record();
        }
    } catch (const NumericalError& e) {
        std::ostringstream os;
        os << "t = " << f.t << ": " << e.what();
        throw NumericalError(os.str());
    }
    if (out.series.empty() || out.series.back().t != f.t) out.series.push_back(diagnose(f, p));
    out.final_field = f;
    return out;
}

}  // namespace swemed1
