// Acceptance checks 1-10 on the reference parameter set.
// Prints one PASS/FAIL line per criterion (plus NOTE lines with context) and
// exits non-zero if any criterion fails.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <string>
#include <vector>

#include "epx/analysis.hpp"
#include "epx/error.hpp"
#include "epx/tracking.hpp"

using namespace epx;

namespace {

struct Outcome {
    bool pass = false;
    std::string detail;
};

int failures = 0;

void criterion(int id, const char* title, double budget_s, const std::function<Outcome()>& body)
{
    const auto t0 = std::chrono::steady_clock::now();
    Outcome o;
    try {
        o = body();
    } catch (const std::exception& e) {
        o = {false, std::string("exception: ") + e.what()};
    }
    const double dt = std::chrono::duration<double>(std::chrono::steady_clock::now() - t0).count();
    if (dt > budget_s) {
        o.pass = false;
        o.detail += " (over time budget)";
    }
    if (!o.pass)
        ++failures;
    std::printf("%s criterion %d: %s | %s [%.2f s, budget %.0f s]\n", o.pass ? "PASS" : "FAIL", id, title,
                o.detail.c_str(), dt, budget_s);
    std::fflush(stdout);
}

void note(const std::string& text)
{
    std::printf("NOTE %s\n", text.c_str());
    std::fflush(stdout);
}

std::string fmt(const char* f, auto... args)
{
    char buf[512];
    std::snprintf(buf, sizeof buf, f, args...);
    return buf;
}

// The encircling loop used throughout: centered on the EP, start on the
// omega axis at the right-hand vertex.
constexpr double kLoopT = 800.0;

LoopSpec encircling(Direction d, double T = kLoopT)
{
    LoopSpec loop;
    loop.center = {1.0, 0.2};
    loop.semi_axis_omega = 0.05;
    loop.semi_axis_eps = 0.05;
    loop.direction = d;
    loop.duration_T = T;
    loop.start_phase = 0.0;
    return loop;
}

LoopSpec non_encircling(Direction d, double T = kLoopT)
{
    LoopSpec loop = encircling(d, T);
    loop.center.omega = 1.15;
    return loop;
}

std::vector<std::pair<std::string, StateVector>> initial_states(unsigned seed, int n_random)
{
    std::vector<std::pair<std::string, StateVector>> out{{"state1", {1.0, 0.0}}, {"state2", {0.0, 1.0}}};
    std::mt19937 rng(seed);
    std::normal_distribution<double> g;
    for (int k = 0; k < n_random; ++k)
        out.push_back({fmt("random%d", k), {cplx(g(rng), g(rng)), cplx(g(rng), g(rng))}});
    return out;
}

const char* name(const std::optional<BareState>& s)
{
    return s ? (*s == BareState::State1 ? "state1" : "state2") : "none";
}

// Runs every initial state in both directions; returns per-direction reports.
struct DiodeRuns {
    std::vector<AsymmetryReport> cw, ccw;
};

DiodeRuns diode_runs(const SystemParams& p, const std::function<LoopSpec(Direction)>& make,
                     const std::vector<std::pair<std::string, StateVector>>& inits, Basis basis)
{
    DiodeRuns r;
    for (Direction d : {Direction::CW, Direction::CCW}) {
        const LoopSpec loop = make(d);
        for (const auto& [label, s] : inits) {
            const TrajectoryRecord traj = propagate_direct(p, loop, s, {});
            (d == Direction::CW ? r.cw : r.ccw).push_back(final_state_report(traj, d, label, basis));
        }
    }
    return r;
}

struct DiodeVerdict {
    bool cw_uniform = true, ccw_uniform = true, opposite = false;
    double min_ratio = kRatioCap;
    std::optional<BareState> cw_state, ccw_state;
};

DiodeVerdict judge(const DiodeRuns& r)
{
    DiodeVerdict v;
    v.cw_state = r.cw.front().dominant_state;
    v.ccw_state = r.ccw.front().dominant_state;
    for (const auto& a : r.cw) {
        v.cw_uniform = v.cw_uniform && a.dominant_state == v.cw_state;
        v.min_ratio = std::min(v.min_ratio, a.ratio);
    }
    for (const auto& a : r.ccw) {
        v.ccw_uniform = v.ccw_uniform && a.dominant_state == v.ccw_state;
        v.min_ratio = std::min(v.min_ratio, a.ratio);
    }
    v.opposite = v.cw_state && v.ccw_state && *v.cw_state != *v.ccw_state;
    return v;
}

double relative_state_error(const TrajectoryRecord& a, const TrajectoryRecord& ref)
{
    const std::size_t ka = a.size() - 1, kr = ref.size() - 1;
    const double s = std::exp(0.5 * (a.log_scale[ka] - ref.log_scale[kr]));
    const StateVector& x = a.states[ka];
    const StateVector& y = ref.states[kr];
    const double diff = std::sqrt(std::norm(x.c1 * s - y.c1) + std::norm(x.c2 * s - y.c2));
    return diff / std::sqrt(y.norm_sq());
}

// Tolerance-halving study. Steps are left to the error controller (one
// output interval, no step cap) so the tolerance, not the output grid, sets
// the step sizes.
constexpr double kHalvingT = 200.0;

std::vector<double> halving_errors(const SystemParams& p, const LoopSpec& loop, const StateVector& s)
{
    auto run = [&](double tol) {
        IntegratorConfig c;
        c.rel_tol = tol;
        c.max_step = loop.duration_T;
        c.output_intervals = 1;
        return propagate_direct(p, loop, s, c);
    };
    const TrajectoryRecord oracle = run(1e-13);
    std::vector<double> errs;
    for (double tol : {1e-10, 5e-11, 2.5e-11, 1.25e-11})
        errs.push_back(relative_state_error(run(tol), oracle));
    return errs;
}

}  // namespace

int main()
{
    const SystemParams ref = SystemParams::reference();

    criterion(1, "EP location", 1.0, [&] {
        const EPLocation ep = locate_ep(ref);
        const double eps_closed = ref.delta_gamma() / ref.d12.real();
        const double omega_closed = ref.e2 - ref.e1 - ref.d12.imag() * eps_closed;
        const bool exact = ep.field.omega == omega_closed && ep.field.eps0 == eps_closed &&
                           std::abs(ep.field.omega - 1.0) <= 1e-15 && std::abs(ep.field.eps0 - 0.2) <= 1e-15;
        const double disc = std::abs(discriminant(build_hamiltonian(ref, ep.field)));

        // Newton on (Re, Im) of the discriminant from a seed 10% away, finite-difference Jacobian.
        double w = 1.1, e = 0.22;
        auto f = [&](double ww, double ee) { return discriminant(build_hamiltonian(ref, {ww, ee})); };
        for (int it = 0; it < 50; ++it) {
            const cplx d = f(w, e);
            const double h = 1e-7;
            const cplx dw = (f(w + h, e) - f(w - h, e)) / (2 * h);
            const cplx de = (f(w, e + h) - f(w, e - h)) / (2 * h);
            const double det = dw.real() * de.imag() - de.real() * dw.imag();
            const double sw = (d.real() * de.imag() - de.real() * d.imag()) / det;
            const double se = (dw.real() * d.imag() - d.real() * dw.imag()) / det;
            w -= sw;
            e -= se;
            if (std::hypot(sw, se) < 1e-15)
                break;
        }
        const double dist = std::hypot(w - ep.field.omega, e - ep.field.eps0);
        return Outcome{exact && disc < 1e-12 && dist < 1e-10,
                       fmt("omega=%.17g eps0=%.17g |disc|=%.2e newton_dist=%.2e", ep.field.omega, ep.field.eps0,
                           disc, dist)};
    });

    criterion(2, "eigenvalue swap", 5.0, [&] {
        const LoopSpec loop = encircling(Direction::CCW);
        const AdiabaticFrame f = track_branches(ref, loop);
        const auto [ep0, em0] = eigenvalues(build_hamiltonian(ref, field_at(loop, 0.0)));
        const double gap = std::abs(f.frames.back().e_plus - em0);
        const AdiabaticFrame g = track_branches(ref, non_encircling(Direction::CCW));
        return Outcome{f.swapped && gap < 1e-8 && !g.swapped,
                       fmt("encircling swapped=%d |E_A(T)-E-(0)|=%.2e; control swapped=%d", f.swapped, gap,
                           g.swapped)};
    });

    criterion(3, "winding equivalence", 30.0, [&] {
        std::mt19937 rng(12345);
        std::uniform_real_distribution<double> cw(0.8, 1.2), ce(0.05, 0.4), ax(0.01, 0.2), ph(0.0, 2 * std::numbers::pi);
        const EPLocation ep = locate_ep(ref);
        int tested = 0, bad = 0, inside = 0;
        while (tested < 100) {
            LoopSpec loop;
            loop.center = {cw(rng), ce(rng)};
            loop.semi_axis_omega = ax(rng);
            loop.semi_axis_eps = std::min(ax(rng), loop.center.eps0);
            loop.start_phase = ph(rng);
            loop.direction = rng() % 2 ? Direction::CW : Direction::CCW;
            const double r = rho(loop, ep).rho;
            if (std::abs(r) <= 0.005)
                continue;
            ++tested;
            inside += r > 0;
            if ((std::abs(winding_number(loop, ref)) == 1) != (r > 0))
                ++bad;
        }
        return Outcome{bad == 0, fmt("%d loops (%d enclosing), %d exceptions", tested, inside, bad)};
    });

    const auto inits = initial_states(777, 8);

    criterion(4, "diode asymmetry (bare states, ratio >= 1e3)", 120.0, [&] {
        const double im_phi = std::abs(accumulated_phase(ref, encircling(Direction::CCW), kLoopT).imag());
        const DiodeVerdict v = judge(diode_runs(ref, [](Direction d) { return encircling(d); }, inits,
                                                Basis::Bare));
        const bool ok = im_phi >= 15.0 && v.cw_uniform && v.ccw_uniform && v.opposite && v.min_ratio >= 1e3;
        return Outcome{ok, fmt("|Im Phi(T)|=%.1f T=%g cw->%s(uniform=%d) ccw->%s(uniform=%d) min ratio=%.3g",
                               im_phi, kLoopT, name(v.cw_state), v.cw_uniform, name(v.ccw_state), v.ccw_uniform,
                               v.min_ratio)};
    });
    {
        const DiodeVerdict v = judge(diode_runs(ref, [](Direction d) { return encircling(d); }, inits,
                                                Basis::Endpoint));
        note(fmt("criterion 4 in the end-point eigenbasis: cw->%s(uniform=%d) ccw->%s(uniform=%d) min ratio=%.3g",
                 name(v.cw_state), v.cw_uniform, name(v.ccw_state), v.ccw_uniform, v.min_ratio));
    }

    criterion(5, "adiabatic prediction fails in exactly 2 of 4 rows", 120.0, [&] {
        const Table1 t = table1(ref, encircling(Direction::CCW), {});
        std::string rows;
        for (const Table1Row& r : t.rows)
            rows += fmt("%s/%s:%s->%s ", to_string(r.direction).data(), to_string(r.initial).data(),
                        to_string(r.adiabatic_final).data(), name(r.exact.dominant_state));
        return Outcome{t.disagreements() == 2, fmt("swapped=%d disagreements=%d rows: %s", t.swapped,
                                                   t.disagreements(), rows.c_str())};
    });

    criterion(6, "Hermitian control", 60.0, [&] {
        SystemParams h = ref;
        h.gamma1 = h.gamma2 = 0.0;
        const IntegratorConfig cfg;
        double worst_norm = 0.0;
        std::vector<double> p_na;
        for (double T : {25.0, 50.0, 100.0, 200.0}) {
            const LoopSpec loop = encircling(Direction::CCW, T);
            const TrajectoryRecord r = propagate_direct(h, loop, adiabatic_state(h, loop, Branch::Plus), cfg);
            for (std::size_t k = 0; k < r.size(); ++k)
                worst_norm = std::max(worst_norm, std::abs(std::exp(r.log_norm_sq(k)) - 1.0));
            const auto& a = r.adiabatic_coeffs.back();
            p_na.push_back(std::norm(a[1]) / (std::norm(a[0]) + std::norm(a[1])));
        }
        bool decreasing = true;
        for (std::size_t k = 1; k < p_na.size(); ++k)
            decreasing = decreasing && p_na[k] < p_na[k - 1];
        // Direction symmetry is checked for the two bare initial states, the
        // runs a Table-1 row is made of.
        double worst_dir = 0.0;
        for (const StateVector& s : {StateVector{1.0, 0.0}, StateVector{0.0, 1.0}}) {
            for (double T : {25.0, 100.0}) {
                const auto cw = project_normalized(propagate_direct(h, encircling(Direction::CW, T), s, cfg));
                const auto ccw = project_normalized(propagate_direct(h, encircling(Direction::CCW, T), s, cfg));
                worst_dir = std::max(worst_dir, std::abs(cw.w1.back() - ccw.w1.back()));
            }
        }
        const bool ok = worst_norm <= 10 * cfg.rel_tol && decreasing && worst_dir < 1e-6;
        return Outcome{ok, fmt("max|norm-1|=%.2e P_na(25,50,100,200)=%.2e,%.2e,%.2e,%.2e max|W1cw-W1ccw|=%.2e",
                               worst_norm, p_na[0], p_na[1], p_na[2], p_na[3], worst_dir)};
    });
    {
        SystemParams h = ref;
        h.gamma1 = h.gamma2 = 0.0;
        double worst = 0.0;
        for (const auto& [label, s] : initial_states(99, 8)) {
            const auto cw = project_normalized(propagate_direct(h, encircling(Direction::CW, 100.0), s, {}));
            const auto ccw = project_normalized(propagate_direct(h, encircling(Direction::CCW, 100.0), s, {}));
            worst = std::max(worst, std::abs(cw.w1.back() - ccw.w1.back()));
        }
        note(fmt("criterion 6 with superposed initial states (T=100): max|W1cw-W1ccw|=%.2e", worst));
    }

    criterion(7, "non-encircling control", 120.0, [&] {
        const double r = rho(non_encircling(Direction::CCW), locate_ep(ref)).rho;
        const DiodeRuns runs = diode_runs(ref, [](Direction d) { return non_encircling(d); }, inits,
                                          Basis::Bare);
        int same = 0;
        for (std::size_t k = 0; k < runs.cw.size(); ++k)
            same += runs.cw[k].dominant_state == runs.ccw[k].dominant_state;
        const int n = static_cast<int>(runs.cw.size());
        return Outcome{r < 0 && same == n, fmt("rho=%.3f T=%g same dominant state in %d/%d initial states (%s)", r,
                                               kLoopT, same, n, name(runs.cw.front().dominant_state))};
    });

    criterion(8, "propagator cross-validation", 120.0, [&] {
        const LoopSpec loop = encircling(Direction::CW);
        const StateVector s{cplx(0.3, 0.2), cplx(0.9, -0.1)};
        IntegratorConfig cfg;
        cfg.rel_tol = 1e-10;
        const TrajectoryRecord d = propagate_direct(ref, loop, s, cfg);
        const TrajectoryRecord a = propagate_adiabatic(ref, loop, s, cfg);
        const StateVector& x = d.states.back();
        const StateVector& y = a.states.back();
        const double fid = std::norm(std::conj(x.c1) * y.c1 + std::conj(x.c2) * y.c2) / (x.norm_sq() * y.norm_sq());

        const std::vector<double> errs = halving_errors(ref, encircling(Direction::CW, kHalvingT), s);
        bool monotone = true;
        for (std::size_t k = 1; k < errs.size(); ++k)
            monotone = monotone && errs[k] < errs[k - 1];
        return Outcome{fid > 1.0 - 1e-6 && monotone,
                       fmt("T=%g 1-fidelity=%.2e; halving at T=%g vs 1e-13 oracle: %.2e %.2e %.2e %.2e", kLoopT,
                           1.0 - fid, kHalvingT, errs[0], errs[1], errs[2], errs[3])};
    });
    {
        const std::vector<double> errs =
            halving_errors(ref, encircling(Direction::CW), {cplx(0.3, 0.2), cplx(0.9, -0.1)});
        note(fmt("criterion 8 halving at T=%g (conditioning floor): %.2e %.2e %.2e %.2e", kLoopT, errs[0], errs[1],
                 errs[2], errs[3]));
    }

    SweepSpec spec;
    spec.durations = {25, 50, 100, 200, 400, 800, 1600, 3200};
    spec.amp_scales = {0.55, 0.7, 0.85, 1.0, 1.15, 1.3, 1.45, 1.6};
    spec.loop_template = encircling(Direction::CCW, 1.0);

    criterion(9, "sweep: ratio-passing cells at rho > 0, survival falls with T", 600.0, [&] {
        const SweepResult res = sweep(spec, ref, {});
        int passing = 0, passing_inside = 0, failed = 0;
        bool monotone = true;
        for (const SweepCell& c : res.cells) {
            failed += c.failed();
            if (c.pass_ratio) {
                ++passing;
                passing_inside += c.rho > 0;
            }
        }
        for (std::size_t j = 0; j < res.n_amp_scales; ++j)
            for (std::size_t i = 1; i < res.n_durations; ++i)
                monotone = monotone && res.at(i, j).log_survival < res.at(i - 1, j).log_survival;
        const double share = passing ? static_cast<double>(passing_inside) / passing : 0.0;
        return Outcome{passing > 0 && share >= 0.95 && monotone && failed == 0,
                       fmt("%d/64 cells pass ratio>=1e3, %d of them at rho>0 (share %.2f); survival monotone=%d; "
                           "failed cells=%d",
                           passing, passing_inside, share, monotone, failed)};
    });
    {
        SweepSpec eig = spec;
        eig.basis = Basis::Endpoint;
        const SweepResult res = sweep(eig, ref, {});
        int passing = 0, inside = 0;
        for (const SweepCell& c : res.cells)
            if (c.pass_ratio) {
                ++passing;
                inside += c.rho > 0;
            }
        note(fmt("criterion 9 in the end-point eigenbasis: %d/64 cells pass, %d of them at rho>0", passing, inside));
    }

    criterion(10, "reciprocal coupling exponents", 30.0, [&] {
        const LoopSpec loop = encircling(Direction::CCW);
        const BranchTracker tr(ref, loop);
        double worst = 0.0;
        for (int k = 1; k <= 16; ++k) {
            const double t = kLoopT * k / 16.0;
            // The reverse exponent comes from an independent quadrature on a finer grid.
            const cplx forward = std::exp(cplx(0.0, 1.0) * tr.phase_integral(t));
            const cplx backward = std::exp(cplx(0.0, 1.0) * accumulated_phase(ref, loop, t, Branch::Minus, 8192));
            worst = std::max(worst, std::abs(forward * backward - 1.0));
        }
        const double ccw = accumulated_phase(ref, loop, kLoopT).imag();
        const double cw = accumulated_phase(ref, encircling(Direction::CW), kLoopT).imag();
        const bool flips = std::abs(ccw) > 1.0 && std::abs(cw + ccw) <= 1e-8 * std::abs(ccw);
        return Outcome{worst < 1e-8 && flips,
                       fmt("max|e^{i Phi} e^{-i Phi} - 1|=%.2e Im Phi ccw=%.6f cw=%.6f", worst, ccw, cw)};
    });

    std::printf("%s: %d criterion(s) failed\n", failures ? "FAILED" : "ALL PASSED", failures);
    return failures ? 1 : 0;
}
