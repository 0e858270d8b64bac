#include "bohmsemi/io/runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <thread>

#include "bohmsemi/bohmian.hpp"
#include "bohmsemi/errors.hpp"
#include "bohmsemi/io/csv.hpp"
#include "bohmsemi/io/errors.hpp"
#include "bohmsemi/io/svg.hpp"
#include "bohmsemi/minisuperspace.hpp"
#include "bohmsemi/observables.hpp"
#include "bohmsemi/packets.hpp"
#include "bohmsemi/parallel.hpp"
#include "bohmsemi/propagator.hpp"
#include "bohmsemi/schroedinger_newton.hpp"
#include "bohmsemi/semiclassical.hpp"

namespace bohmsemi::io {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr double kEdgeWarn = 1e-6;  // boundary density relative to the peak

std::string fmt(double x) { return format_double(x); }

std::string padded(std::size_t i, int width) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%0*zu", width, i);
    return buf;
}

/// Collects artifacts, checks and event counts for one run.
struct Context {
    fs::path dir;
    unsigned threads = 1;
    std::uint64_t seed = 0;
    RunReport report;
    std::uint64_t counts[4]{};

    std::string file(const std::string& rel) {
        const fs::path p = dir / rel;
        fs::create_directories(p.parent_path());
        report.artifacts.push_back(rel);
        return p.string();
    }

    void check(const std::string& name, bool passed, double value, double threshold) {
        report.checks.push_back({{"name", name}, {"passed", passed}, {"value", value}, {"threshold", threshold}});
    }
    void info(const std::string& name, double value) {
        report.checks.push_back({{"name", name}, {"value", value}});
    }

    void warn(const std::string& msg) { report.warnings.push_back(msg); }

    void tally(const TrajectoryRecord& tr) {
        for (auto f : tr.flags) tally(f);
    }
    void tally(std::uint32_t f) {
        if (!f) return;
        ++report.flagged_steps;
        for (int b = 0; b < 4; ++b)
            if (f & (1u << b)) ++counts[b];
    }
};

void write_mini_trajectory(const std::string& path, const TrajectoryRecord& tr) {
    CsvWriter w(path, {"tau", "phi", "alpha", "phi_prime", "alpha_prime", "alpha_minus_phi", "alpha_plus_phi", "flags"});
    for (std::size_t k = 0; k < tr.size(); ++k) {
        const double phi = tr.position(k, 0), alpha = tr.position(k, 1);
        w.row({fmt(tr.times[k]), fmt(phi), fmt(alpha), fmt(tr.velocity(k, 0)), fmt(tr.velocity(k, 1)),
               fmt(alpha - phi), fmt(alpha + phi), std::to_string(tr.flags[k])});
    }
    w.close();
}

void write_figure_meta(Context& ctx, const MiniConfig& m, const std::vector<std::size_t>& highlight) {
    json meta = {{"plot", "phi-alpha"}, {"title", m.title}, {"highlight", highlight}};
    if (m.view) meta["view"] = *m.view;
    std::ofstream out(ctx.file("figure.json"), std::ios::binary);
    out << meta.dump(2) << '\n';
}

// ---------------------------------------------------------------- minisuperspace

void run_mini_trajectories(Context& ctx, const MiniConfig& m) {
    const std::size_t n = m.seeds.size();
    std::vector<TrajectoryRecord> recs(n);
    parallel_for(n, ctx.threads, [&](std::size_t i) {
        const auto& s = m.seeds[i];
        try {
            recs[i] = mini::integrate_wdw(m.packet, {s.alpha, s.phi, s.tau}, m.span, m.dtau, m.step);
        } catch (const NodePoint& e) {
            throw ConfigError("minisuperspace.seeds[" + std::to_string(i) + "] starts on a node: " + e.what());
        }
    });

    CsvWriter cls(ctx.file("classification.csv"),
                  {"index", "phi0", "alpha0", "tau0", "highlight", "label", "samples", "flags"});
    std::size_t label_counts[6]{};
    double drift_minus = 0.0, drift_plus = 0.0;
    std::vector<std::size_t> highlight;
    for (std::size_t i = 0; i < n; ++i) {
        const auto& tr = recs[i];
        write_mini_trajectory(ctx.file("trajectories/traj_" + padded(i, 3) + ".csv"), tr);
        ctx.tally(tr);
        const auto label = mini::classify_trajectory(tr, m.classify);
        ++label_counts[static_cast<int>(label)];
        if (m.seeds[i].highlight) highlight.push_back(i);
        cls.row({std::to_string(i), fmt(m.seeds[i].phi), fmt(m.seeds[i].alpha), fmt(m.seeds[i].tau),
                 m.seeds[i].highlight ? "1" : "0", mini::to_string(label), std::to_string(tr.size()),
                 std::to_string(tr.all_flags())});
        const double c_minus = tr.position(0, 1) - tr.position(0, 0);
        const double c_plus = tr.position(0, 1) + tr.position(0, 0);
        const double len = std::max(tr.times.back() - tr.times.front(), 1e-300);
        for (std::size_t k = 0; k < tr.size(); ++k) {
            drift_minus = std::max(drift_minus, std::abs(tr.position(k, 1) - tr.position(k, 0) - c_minus) / len);
            drift_plus = std::max(drift_plus, std::abs(tr.position(k, 1) + tr.position(k, 0) - c_plus) / len);
        }
    }
    cls.close();
    write_figure_meta(ctx, m, highlight);

    if (m.packet.mode == mini::Mode::R) ctx.check("alpha_minus_phi_drift_per_tau", drift_minus < 1e-9, drift_minus, 1e-9);
    if (m.packet.mode == mini::Mode::L) ctx.check("alpha_plus_phi_drift_per_tau", drift_plus < 1e-9, drift_plus, 1e-9);
    for (int l = 0; l < 6; ++l)
        ctx.info(std::string("count:") + mini::to_string(static_cast<mini::Label>(l)),
                 static_cast<double>(label_counts[l]));
    for (const auto& w : m.packet.regime_warnings()) ctx.warn(w);
}

void run_mini_compare(Context& ctx, const MiniConfig& m) {
    const auto c = mini::compare_schemes(m.packet, m.phi0, m.alpha0, m.tau0, m.span, m.dtau, m.window);
    CsvWriter w(ctx.file("comparison.csv"), {"tau", "phi_full", "alpha_full", "alpha_prime_full", "alpha_usual",
                                             "alpha_prime_usual", "phi_bsc", "alpha_bsc", "alpha_prime_bsc"});
    for (std::size_t k = 0; k < c.tau.size(); ++k)
        w.row(std::vector<double>{c.tau[k], c.phi_full[k], c.alpha_full[k], c.alpha_prime_full[k], c.alpha_usual[k],
                                  c.alpha_prime_usual[k], c.phi_bsc[k], c.alpha_bsc[k], c.alpha_prime_bsc[k]});
    w.close();

    const double two_h = mini::two_h_closed_form(m.packet);
    const double two_h_grid = mini::two_h_quadrature(m.packet, m.alpha0);
    CsvWriter s(ctx.file("summary.csv"), {"metric", "value"});
    const std::vector<std::pair<std::string, double>> rows = {
        {"two_h_closed", two_h},
        {"two_h_grid", two_h_grid},
        {"alpha_prime_usual", std::sqrt(two_h)},
        {"mean_alpha_prime_full_early", c.mean_alpha_prime_full_early},
        {"mean_alpha_prime_full_late", c.mean_alpha_prime_full_late},
        {"mean_alpha_prime_bsc_early", c.mean_alpha_prime_bsc_early},
        {"mean_alpha_prime_bsc_late", c.mean_alpha_prime_bsc_late},
        {"rms_usual_early", c.rms_usual_early},
        {"rms_usual_late", c.rms_usual_late},
        {"rms_bsc_early", c.rms_bsc_early},
        {"rms_bsc_late", c.rms_bsc_late},
        {"slope_early_full", c.slope_early_full},
        {"slope_late_full", c.slope_late_full},
        {"slope_early_bsc", c.slope_early_bsc},
        {"slope_late_bsc", c.slope_late_bsc},
    };
    for (const auto& [k, v] : rows) s.row({k, fmt(v)});
    s.close();

    ctx.check("bsc_beats_usual_early", c.rms_bsc_early < c.rms_usual_early, c.rms_bsc_early, c.rms_usual_early);
    ctx.check("bsc_beats_usual_late", c.rms_bsc_late < c.rms_usual_late, c.rms_bsc_late, c.rms_usual_late);
    // Only the union of flags is kept by the comparison.
    ctx.tally(c.flags);
    for (const auto& w : m.packet.regime_warnings()) ctx.warn(w);
}

void run_mini_ensemble(Context& ctx, const MiniConfig& m) {
    const double sigma = m.packet.sigma;
    const double reach = std::abs(m.alpha0) + 10.0 * sigma;
    const Grid1D g = Grid1D::with_spacing(-reach, reach, sigma / 40.0);
    const auto chi = normalize(WaveFunction1D::sample(
        g, [&](double x) { return mini::chi_state(m.packet, m.alpha0, m.tau0, x, m.tau0); }));
    const auto phis = sample_density(chi, m.sample_count, ctx.seed);

    std::vector<TrajectoryRecord> recs(phis.size());
    parallel_for(phis.size(), ctx.threads, [&](std::size_t i) {
        mini::SCMiniState s;
        s.phi = phis[i];
        s.alpha = m.alpha0;
        s.tau = m.tau0;
        s.packet = m.packet;
        s.tau0 = m.tau0;
        s.alpha0 = m.alpha0;
        recs[i] = mini::bohmian_sc_run(s, m.span, m.dtau, m.step);
    });

    CsvWriter e(ctx.file("ensemble.csv"),
                {"index", "phi_start", "phi_end", "phi_prime_start", "phi_prime_end", "side_start", "side_end"});
    std::size_t changes = 0;
    for (std::size_t i = 0; i < recs.size(); ++i) {
        const auto& tr = recs[i];
        write_mini_trajectory(ctx.file("trajectories/traj_" + padded(i, 3) + ".csv"), tr);
        ctx.tally(tr);
        const std::size_t k0 = static_cast<std::size_t>(
            std::lower_bound(tr.times.begin(), tr.times.end(), m.tau0 - 1e-12) - tr.times.begin());
        const std::size_t k1 = tr.size() - 1;
        // Packet centres drift as alpha0 + u tau_bar and -alpha0 - v tau_bar; sides are
        // taken about their midpoint.
        auto side = [&](double phi, double tau) {
            const double mid = 0.5 * (m.packet.u - m.packet.v) * (tau - m.tau0);
            return phi < mid ? "left" : "right";
        };
        const std::string s0 = side(tr.position(k0, 0), tr.times[k0]);
        const std::string s1 = side(tr.position(k1, 0), tr.times[k1]);
        if (s0 != s1) ++changes;
        e.row({std::to_string(i), fmt(tr.position(k0, 0)), fmt(tr.position(k1, 0)), fmt(tr.velocity(k0, 0)),
               fmt(tr.velocity(k1, 0)), s0, s1});
    }
    e.close();
    write_figure_meta(ctx, m, {});
    ctx.check("side_changes", changes == 0, static_cast<double>(changes), 0.0);
}

void run_minisuperspace(Context& ctx, const MiniConfig& m) {
    if (m.task == "trajectories") run_mini_trajectories(ctx, m);
    else if (m.task == "compare") run_mini_compare(ctx, m);
    else run_mini_ensemble(ctx, m);
}

// ---------------------------------------------------------------- two-particle

Grid1D make_grid(const GridSpec& g) { return Grid1D(g.min, g.max, g.n); }

void write_series(const std::string& path, const SchemeSeries& s) {
    CsvWriter w(path, {"t", "X1", "X2", "P2", "norm", "ratio"});
    for (std::size_t k = 0; k < s.t.size(); ++k)
        w.row(std::vector<double>{s.t[k], s.X1[k], s.X2[k], s.P2[k], s.norm[k], s.ratio[k]});
    w.close();
}

void write_wave(const std::string& path, const WaveFunction1D& wf) {
    CsvWriter w(path, {"x", "re", "im"});
    for (std::size_t i = 0; i < wf.psi.size(); ++i)
        w.row(std::vector<double>{wf.grid.x(i), wf.psi[i].real(), wf.psi[i].imag()});
    w.close();
}

void write_wave(const std::string& path, const WaveFunction2D& wf) {
    CsvWriter w(path, {"x1", "x2", "re", "im"});
    const auto& a1 = wf.grid.axis1();
    const auto& a2 = wf.grid.axis2();
    for (std::size_t i = 0; i < a1.size(); ++i)
        for (std::size_t j = 0; j < a2.size(); ++j)
            w.row(std::vector<double>{a1.x(i), a2.x(j), wf.at(i, j).real(), wf.at(i, j).imag()});
    w.close();
}

double edge_ratio(const WaveFunction1D& wf) {
    const double peak = wf.peak_density();
    if (!(peak > 0.0)) return 0.0;
    const std::size_t n = wf.psi.size();
    return std::max({wf.density(1), wf.density(n - 2)}) / peak;
}

void run_two_particle(Context& ctx, const TwoParticleConfig& c) {
    TwoParticleSetup setup{.grid = Grid2D(make_grid(c.x1), make_grid(c.x2)),
                           .V = c.coupling == "harmonic" ? CouplingPotential::harmonic(c.strength)
                                                         : CouplingPotential::bilinear(c.strength),
                           .m1 = c.m1,
                           .m2 = c.m2,
                           .X1 = c.X1,
                           .X2 = c.X2,
                           .dt = c.dt,
                           .steps = c.steps,
                           .policy = c.policy};
    const auto chi0 = c.chi0;
    const auto env0 = c.env0;
    setup.psi0 = [chi0, env0](double x1, double x2) {
        Complex a{};
        for (const auto& p : chi0) a += free_packet({p.center, p.sigma, p.momentum, 1.0}, x1);
        return a * free_packet({env0.center, env0.sigma, env0.momentum, 1.0}, x2);
    };
    if (c.snapshot_stride) {
        // Register every snapshot path up front so the artifact list does not depend on thread timing.
        const std::size_t last = c.steps / c.snapshot_stride * c.snapshot_stride;
        for (const char* scheme : {"full", "meanfield", "bohmian"})
            for (std::size_t k = 0; k <= last; k += c.snapshot_stride)
                ctx.file(std::string("snapshots/") + scheme + "_" + padded(k, 6) + ".csv");
        const fs::path dir = ctx.dir;
        setup.snapshot_stride = c.snapshot_stride;
        setup.snapshot = [dir](const std::string& scheme, std::size_t k, const WaveFunction1D* chi,
                               const WaveFunction2D* psi) {
            const std::string path = (dir / "snapshots" / (scheme + "_" + padded(k, 6) + ".csv")).string();
            if (psi) write_wave(path, *psi);
            else write_wave(path, *chi);
        };
    }

    const auto r = compare_two_particle(setup, ctx.threads);
    write_series(ctx.file("full.csv"), r.full);
    write_series(ctx.file("meanfield.csv"), r.meanfield);
    write_series(ctx.file("bohmian.csv"), r.bohmian);
    for (std::size_t k = 0; k < r.full.flagged_steps; ++k) ctx.tally(kNodeRegularized);
    for (std::size_t k = 0; k < r.bohmian.flagged_steps; ++k) ctx.tally(kNodeRegularized);

    CsvWriter s(ctx.file("summary.csv"), {"metric", "value"});
    s.row({"err_meanfield", fmt(r.err_meanfield)});
    s.row({"err_bohmian", fmt(r.err_bohmian)});
    s.row({"edge_density", fmt(r.edge_density)});
    double mean_ratio = 0.0;
    for (double x : r.full.ratio) mean_ratio += x;
    mean_ratio /= static_cast<double>(std::max<std::size_t>(r.full.ratio.size(), 1));
    s.row({"mean_interaction_ratio", fmt(mean_ratio)});
    s.close();
    ctx.info("err_meanfield", r.err_meanfield);
    ctx.info("err_bohmian", r.err_bohmian);
    ctx.check("bohmian_closer_than_meanfield", r.err_bohmian < r.err_meanfield, r.err_bohmian, r.err_meanfield);
    ctx.info("mean_interaction_ratio", mean_ratio);
    const double peak0 = 1.0 / (2.0 * M_PI * c.env0.sigma * c.chi0.front().sigma);
    if (r.edge_density > kEdgeWarn * peak0)
        ctx.warn("two_particle: |psi|^2 reaches " + fmt(r.edge_density) + " on the grid boundary; enlarge grid");

    if (!c.ratio_sweep.empty()) {
        // Mean interaction ratio of the full evolution for each environment mass.
        std::vector<double> ratios(c.ratio_sweep.size());
        const auto psi0 = normalize(WaveFunction2D::sample(setup.grid, setup.psi0));
        const auto V2 = setup.V.sample(setup.grid);
        parallel_for(ratios.size(), ctx.threads, [&](std::size_t i) {
            const double m2 = c.ratio_sweep[i];
            FullQuantumState st{psi0, c.X1, c.X2, 0.0, 0};
            double acc = interaction_term(st.psi, st.X1, st.X2, c.m1, m2, setup.V, c.policy).ratio;
            for (std::size_t k = 0; k < c.steps; ++k) {
                st = full_step(st, V2, c.m1, m2, c.dt, c.policy);
                acc += interaction_term(st.psi, st.X1, st.X2, c.m1, m2, setup.V, c.policy).ratio;
            }
            ratios[i] = acc / static_cast<double>(c.steps + 1);
        });
        CsvWriter w(ctx.file("ratio_sweep.csv"), {"m2", "m2_over_m1", "mean_ratio"});
        bool monotone = true;
        for (std::size_t i = 0; i < ratios.size(); ++i) {
            w.row(std::vector<double>{c.ratio_sweep[i], c.ratio_sweep[i] / c.m1, ratios[i]});
            if (i && c.ratio_sweep[i] > c.ratio_sweep[i - 1] && !(ratios[i] < ratios[i - 1])) monotone = false;
        }
        w.close();
        ctx.check("ratio_decreases_with_mass", monotone, ratios.back(), ratios.front());
    }
}

// ---------------------------------------------------------------- Schroedinger-Newton

void run_sn(Context& ctx, const SNConfig& c) {
    const Grid1D g = make_grid(c.grid);
    std::vector<Complex> acc(g.size());
    for (const auto& p : c.packets) {
        const auto w = gaussian_wave(g, {p.center, p.sigma, p.momentum, c.m});
        for (std::size_t i = 0; i < g.size(); ++i) acc[i] += w.psi[i];
    }
    const auto psi0 = normalize(WaveFunction1D(g, acc));
    const double eps = c.eps_soft.value_or(c.packets.front().sigma / 10.0);
    const SNState s0{psi0, c.X, 0.0, c.G, c.m, eps, 0};
    s0.validate();

    const auto Vmf = sn_meanfield_potential(psi0, c.G, c.m, eps);
    const auto Vbo = sn_bohmian_potential(g, c.X, c.G, c.m, eps);
    {
        CsvWriter w(ctx.file("potentials.csv"), {"x", "V_meanfield", "V_bohmian"});
        for (std::size_t i = 0; i < g.size(); ++i) w.row(std::vector<double>{g.x(i), Vmf.values[i], Vbo.values[i]});
        w.close();
        CsvWriter m(ctx.file("minima.csv"), {"scheme", "index", "x", "V"});
        for (auto i : local_minima(Vmf)) m.row({"meanfield", std::to_string(i), fmt(g.x(i)), fmt(Vmf.values[i])});
        for (auto i : local_minima(Vbo)) m.row({"bohmian", std::to_string(i), fmt(g.x(i)), fmt(Vbo.values[i])});
        m.close();
    }

    std::vector<std::string> schemes;
    if (c.scheme != "bohmian") schemes.push_back("meanfield");
    if (c.scheme != "meanfield") schemes.push_back("bohmian");

    struct Out {
        std::vector<double> t, X, norm, energy;
        std::vector<std::uint32_t> flags;
        double max_norm_step = 0.0;
        double edge = 0.0;
    };
    std::vector<Out> outs(schemes.size());
    if (c.snapshot_stride)
        for (const auto& name : schemes)
            for (std::size_t k = 0; k <= c.steps; k += c.snapshot_stride)
                ctx.file("snapshots/sn_" + name + "_" + padded(k, 6) + ".csv");
    const fs::path dir = ctx.dir;
    parallel_for(schemes.size(), ctx.threads, [&](std::size_t i) {
        const bool mf = schemes[i] == "meanfield";
        auto& o = outs[i];
        SNState s = s0;
        auto rec = [&](const SNState& st) {
            o.t.push_back(st.t);
            o.X.push_back(st.X);
            o.norm.push_back(std::sqrt(norm_squared(st.psi)));
            o.energy.push_back(sn_energy(st.psi, st.G, st.m, st.eps_soft));
            o.flags.push_back(st.flags);
        };
        auto snap = [&](std::size_t k, const SNState& st) {
            if (c.snapshot_stride && k % c.snapshot_stride == 0)
                write_wave((dir / "snapshots" / ("sn_" + schemes[i] + "_" + padded(k, 6) + ".csv")).string(), st.psi);
        };
        rec(s);
        snap(0, s);
        for (std::size_t k = 0; k < c.steps; ++k) {
            const double n_before = o.norm.back();
            s = mf ? sn_meanfield_step(s, c.dt) : sn_bohmian_step(s, c.dt, c.policy);
            rec(s);
            snap(k + 1, s);
            o.max_norm_step = std::max(o.max_norm_step, std::abs(o.norm.back() - n_before));
        }
        o.edge = edge_ratio(s.psi);
    });

    for (std::size_t i = 0; i < schemes.size(); ++i) {
        const auto& o = outs[i];
        CsvWriter w(ctx.file("sn_" + schemes[i] + ".csv"), {"t", "X", "norm", "energy", "flags"});
        for (std::size_t k = 0; k < o.t.size(); ++k) {
            w.row({fmt(o.t[k]), fmt(o.X[k]), fmt(o.norm[k]), fmt(o.energy[k]), std::to_string(o.flags[k])});
            ctx.tally(o.flags[k]);
        }
        w.close();
        ctx.check(schemes[i] + "_norm_drift_per_step", o.max_norm_step < 1e-10, o.max_norm_step, 1e-10);
        if (schemes[i] == "meanfield") {
            const double e0 = o.energy.front();
            double drift = 0.0;
            for (double e : o.energy) drift = std::max(drift, std::abs(e - e0));
            drift /= std::max(std::abs(e0), 1e-300);
            ctx.check("meanfield_energy_drift", drift < 0.01, drift, 0.01);
        }
        if (o.edge > kEdgeWarn)
            ctx.warn("schroedinger_newton: " + schemes[i] + " density reaches " + fmt(o.edge) +
                     " of its peak next to the walls; enlarge grid");
    }
}

// ---------------------------------------------------------------- equivariance

void run_equivariance(Context& ctx, const EquivarianceConfig& c) {
    const Grid1D g = make_grid(c.grid);
    const auto wf0 = gaussian_wave(g, {c.packet.center, c.packet.sigma, c.packet.momentum, c.mass});
    const PotentialField V = c.potential == "harmonic"
                                 ? PotentialField::sample(g, [&](double x) { return 0.5 * c.mass * c.omega * c.omega * x * x; }, "harmonic")
                                 : PotentialField::zero(g.size(), "free");
    EquivarianceOptions opt;
    opt.dt = c.dt;
    opt.threads = ctx.threads;
    opt.policy = c.policy;
    const auto r = equivariance_test(wf0, V, c.mass, c.count, c.T, ctx.seed, opt);

    CsvWriter w(ctx.file("positions.csv"), {"index", "x0", "xT"});
    for (std::size_t i = 0; i < r.initial_positions.size(); ++i)
        w.row({std::to_string(i), fmt(r.initial_positions[i]), fmt(r.final_positions[i])});
    w.close();
    CsvWriter s(ctx.file("summary.csv"), {"metric", "value"});
    s.row({"ks_initial", fmt(r.ks_initial)});
    s.row({"ks_final", fmt(r.ks_final)});
    s.row({"flagged_steps", std::to_string(r.flagged_steps)});
    s.close();
    ctx.report.flagged_steps += r.flagged_steps;
    ctx.check("ks_final", r.ks_final < 0.02, r.ks_final, 0.02);
    if (r.final_state && edge_ratio(*r.final_state) > kEdgeWarn)
        ctx.warn("equivariance: final density reaches the grid walls; enlarge grid");
}

void write_manifest(const Context& ctx, const ScenarioConfig& cfg, double wall) {
    json flags = {{"node_regularized", ctx.counts[0]},
                  {"boundary_clamped", ctx.counts[1]},
                  {"classically_forbidden", ctx.counts[2]},
                  {"step_floor", ctx.counts[3]},
                  {"flagged_steps", ctx.report.flagged_steps},
                  {"max_flagged_steps", cfg.max_flagged_steps}};
    json m = {{"tool", "bohmsemi"},
              {"version", kToolVersion},
              {"kind", cfg.kind},
              {"seed", ctx.seed},
              {"threads", ctx.threads},
              {"config", cfg.raw},
              {"wall_time_s", wall},
              {"checks", ctx.report.checks},
              {"event_flags", flags},
              {"budget_exceeded", ctx.report.budget_exceeded},
              {"warnings", ctx.report.warnings},
              {"artifacts", ctx.report.artifacts}};
    const fs::path final_path = ctx.dir / "manifest.json";
    const fs::path tmp = ctx.dir / "manifest.json.tmp";
    {
        std::ofstream out(tmp, std::ios::binary | std::ios::trunc);
        if (!out) throw IoError("cannot write " + tmp.string());
        out << m.dump(2) << '\n';
        out.flush();
        if (!out) throw IoError("failed writing " + tmp.string());
    }
    fs::rename(tmp, final_path);
}

std::string default_output(const std::string& config_path) {
    return (fs::path("runs") / fs::path(config_path).stem()).string();
}

// ---------------------------------------------------------------- figures

bool has_file(const fs::path& p) { return fs::is_regular_file(p); }

std::string phi_alpha_figure(const fs::path& dir) {
    const fs::path tdir = dir / "trajectories";
    std::vector<fs::path> files;
    if (fs::is_directory(tdir))
        for (const auto& e : fs::directory_iterator(tdir))
            if (e.path().extension() == ".csv") files.push_back(e.path());
    if (files.empty()) throw MissingData("no trajectory CSVs in " + tdir.string());
    std::sort(files.begin(), files.end());

    SvgPlot plot;
    plot.x_label = "φ";
    plot.y_label = "α";
    std::vector<std::size_t> highlight;
    std::optional<std::array<double, 4>> view;
    if (has_file(dir / "figure.json")) {
        std::ifstream in(dir / "figure.json");
        const json meta = json::parse(in);
        plot.title = meta.value("title", "");
        if (meta.contains("highlight")) highlight = meta["highlight"].get<std::vector<std::size_t>>();
        if (meta.contains("view")) view = meta["view"].get<std::array<double, 4>>();
    }
    for (std::size_t i = 0; i < files.size(); ++i) {
        const auto t = read_csv(files[i].string());
        Series s;
        s.x = t.numbers("phi");
        s.y = t.numbers("alpha");
        s.label = files[i].stem().string();
        s.highlight = std::find(highlight.begin(), highlight.end(), i) != highlight.end();
        plot.series.push_back(std::move(s));
    }
    if (view) {
        plot.x_min = (*view)[0];
        plot.x_max = (*view)[1];
        plot.y_min = (*view)[2];
        plot.y_max = (*view)[3];
    } else {
        plot.fit();
    }
    fs::create_directories(dir / "figures");
    const auto out = (dir / "figures" / "phi_alpha.svg").string();
    plot.write(out);
    return out;
}

std::string series_figure(const fs::path& dir, const std::string& out_name, const std::string& title,
                          const std::string& x_col, const std::string& y_label,
                          const std::vector<std::pair<std::string, std::string>>& sources) {
    SvgPlot plot;
    plot.title = title;
    plot.x_label = x_col;
    plot.y_label = y_label;
    for (const auto& [file, col] : sources) {
        const auto t = read_csv((dir / file).string());
        plot.series.push_back({t.numbers(x_col), t.numbers(col), true, file + ":" + col});
    }
    plot.fit();
    fs::create_directories(dir / "figures");
    const auto out = (dir / "figures" / out_name).string();
    plot.write(out);
    return out;
}

}  // namespace

unsigned resolve_threads(std::optional<unsigned> flag) {
    if (flag) {
        if (*flag == 0) throw ConfigError("--threads must be at least 1");
        return *flag;
    }
    if (const char* env = std::getenv("BOHMSEMI_THREADS"); env && *env) {
        char* end = nullptr;
        const long v = std::strtol(env, &end, 10);
        if (*end != '\0' || v < 1 || v > 4096) throw ConfigError("BOHMSEMI_THREADS must be a positive integer");
        return static_cast<unsigned>(v);
    }
    return std::max(1u, std::thread::hardware_concurrency());
}

RunReport run_scenario(const ScenarioConfig& cfg, const std::string& dir, unsigned threads, bool plots) {
    const auto start = std::chrono::steady_clock::now();
    Context ctx;
    ctx.dir = dir;
    ctx.threads = std::max(1u, threads);
    ctx.seed = cfg.seed;
    fs::create_directories(ctx.dir);
    fs::remove(ctx.dir / "manifest.json");

    if (cfg.kind == "minisuperspace") run_minisuperspace(ctx, *cfg.minisuperspace);
    else if (cfg.kind == "two-particle") run_two_particle(ctx, *cfg.two_particle);
    else if (cfg.kind == "schroedinger-newton") run_sn(ctx, *cfg.schroedinger_newton);
    else run_equivariance(ctx, *cfg.equivariance);

    if (plots)
        for (const auto& p : emit_figures(dir)) ctx.report.artifacts.push_back(fs::relative(p, ctx.dir).string());

    ctx.report.budget_exceeded = ctx.report.flagged_steps > cfg.max_flagged_steps;
    ctx.report.directory = dir;
    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    write_manifest(ctx, cfg, wall);
    for (int b = 0; b < 4; ++b) ctx.report.flag_counts[std::to_string(1u << b)] = ctx.counts[b];
    return ctx.report;
}

std::vector<std::string> emit_figures(const std::string& run_dir) {
    const fs::path dir(run_dir);
    if (!fs::is_directory(dir)) throw MissingData("run directory " + run_dir + " does not exist");
    std::vector<std::string> out;
    if (fs::is_directory(dir / "trajectories") || has_file(dir / "figure.json")) out.push_back(phi_alpha_figure(dir));
    if (has_file(dir / "comparison.csv"))
        out.push_back(series_figure(dir, "alpha_prime.svg", "α′ by scheme", "tau", "α′",
                                    {{"comparison.csv", "alpha_prime_full"},
                                     {"comparison.csv", "alpha_prime_usual"},
                                     {"comparison.csv", "alpha_prime_bsc"}}));
    if (has_file(dir / "full.csv"))
        out.push_back(series_figure(dir, "x2.svg", "environment position", "t", "X2",
                                    {{"full.csv", "X2"}, {"meanfield.csv", "X2"}, {"bohmian.csv", "X2"}}));
    if (has_file(dir / "potentials.csv"))
        out.push_back(series_figure(dir, "potentials.svg", "initial potentials", "x", "V",
                                    {{"potentials.csv", "V_meanfield"}, {"potentials.csv", "V_bohmian"}}));
    if (has_file(dir / "positions.csv")) {
        const auto t = read_csv((dir / "positions.csv").string());
        SvgPlot plot;
        plot.title = "ensemble distribution";
        plot.x_label = "x";
        plot.y_label = "empirical CDF";
        for (const char* col : {"x0", "xT"}) {
            auto xs = t.numbers(col);
            std::sort(xs.begin(), xs.end());
            Series s;
            s.label = col;
            s.highlight = true;
            for (std::size_t i = 0; i < xs.size(); ++i) {
                s.x.push_back(xs[i]);
                s.y.push_back(static_cast<double>(i + 1) / static_cast<double>(xs.size()));
            }
            plot.series.push_back(std::move(s));
        }
        plot.fit();
        fs::create_directories(dir / "figures");
        out.push_back((dir / "figures" / "ecdf.svg").string());
        plot.write(out.back());
    }
    if (out.empty()) throw MissingData("nothing to plot in " + run_dir);
    return out;
}

int cli_run(const std::string& config_path, const RunOptions& options, std::ostream& out, std::ostream& err) {
    try {
        auto cfg = load_config(config_path);
        if (options.seed) {
            cfg.seed = *options.seed;
            cfg.raw["seed"] = *options.seed;
        }
        const unsigned threads = resolve_threads(options.threads);
        const std::string dir =
            options.out ? *options.out : (cfg.output.empty() ? default_output(config_path) : cfg.output);
        const auto report = run_scenario(cfg, dir, threads, options.plots);
        for (const auto& w : report.warnings) err << "warning: " << w << '\n';
        for (const auto& c : report.checks) {
            out << c["name"].get<std::string>() << ": ";
            if (c.contains("passed")) out << (c["passed"].get<bool>() ? "pass" : "FAIL") << " ";
            out << format_double(c["value"].get<double>()) << '\n';
        }
        out << "wrote " << report.artifacts.size() << " artifacts to " << dir << '\n';
        if (report.budget_exceeded) {
            err << "error: " << report.flagged_steps << " flagged steps exceed max_flagged_steps = "
                << cfg.max_flagged_steps << '\n';
            return kExitBudget;
        }
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "invalid configuration: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const MissingData& e) {
        err << "missing data: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

int cli_check(const std::string& config_path, std::ostream& out, std::ostream& err) {
    try {
        const auto cfg = load_config(config_path);
        if (cfg.minisuperspace)
            for (const auto& w : cfg.minisuperspace->packet.regime_warnings()) err << "warning: " << w << '\n';
        out << config_path << ": valid " << cfg.kind << " configuration\n";
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "invalid configuration: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

int cli_figures(const std::string& run_dir, std::ostream& out, std::ostream& err) {
    try {
        for (const auto& p : emit_figures(run_dir)) out << "wrote " << p << '\n';
        return kExitOk;
    } catch (const MissingData& e) {
        err << "missing data: " << e.what() << '\n';
        return kExitInvalid;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << '\n';
        return kExitFailure;
    }
}

}  // namespace bohmsemi::io
