#include "epx/analysis.hpp"

#include <algorithm>
#include <atomic>
#include <cmath>
#include <limits>
#include <mutex>
#include <numbers>
#include <thread>

#include "epx/error.hpp"
#include "epx/tracking.hpp"

namespace epx {

namespace {

std::array<double, 2> bare_weights(const StateVector& s)
{
    const double p1 = std::norm(s.c1);
    const double p2 = std::norm(s.c2);
    const double total = p1 + p2;
    if (total == 0.0)
        throw Error(ErrorKind::ZeroNorm, "both amplitudes are zero");
    return {p1 / total, p2 / total};
}

// Weights along the end-point eigenvectors, ordered (state1-like, state2-like).
std::array<double, 2> endpoint_weights(const TrajectoryRecord& traj)
{
    const LoopSpec& loop = traj.meta.loop;
    const EigenFrame f = eigenframe(build_hamiltonian(traj.meta.params, field_at(loop, loop.duration_T)));
    const Vec2 c = traj.states.back().as_vec();
    double p[2];
    double lean[2];  // share of |1> in each eigenvector
    for (Branch b : {Branch::Plus, Branch::Minus}) {
        const Vec2& v = f.vector(b);
        const double vn = euclidean_norm(v);
        p[index(b)] = std::norm(c_product(v, c)) * vn * vn;
        lean[index(b)] = std::norm(v[0]) / (vn * vn);
    }
    const double total = p[0] + p[1];
    if (total == 0.0)
        throw Error(ErrorKind::ZeroNorm, "both adiabatic weights are zero");
    if (lean[0] >= lean[1])
        return {p[0] / total, p[1] / total};
    return {p[1] / total, p[0] / total};
}

double capped_ratio(double hi, double lo)
{
    if (lo == 0.0 || hi / lo > kRatioCap)
        return kRatioCap;
    return hi / lo;
}

}  // namespace

std::string_view to_string(BareState s)
{
    return s == BareState::State1 ? "state1" : "state2";
}

std::string_view to_string(Direction d)
{
    return d == Direction::CW ? "cw" : "ccw";
}

std::string_view to_string(Basis b)
{
    return b == Basis::Bare ? "bare" : "endpoint";
}

ProjectionSeries project_normalized(const TrajectoryRecord& traj)
{
    if (traj.empty())
        throw Error(ErrorKind::InvalidArgument, "trajectory is empty");
    ProjectionSeries out;
    out.times = traj.times;
    out.w1.reserve(traj.size());
    out.w2.reserve(traj.size());
    for (const StateVector& s : traj.states) {
        const auto w = bare_weights(s);
        out.w1.push_back(w[0]);
        out.w2.push_back(1.0 - w[0]);
    }
    return out;
}

AsymmetryReport final_state_report(const TrajectoryRecord& traj, Direction direction, std::string initial_label,
                                   Basis basis)
{
    if (traj.empty())
        throw Error(ErrorKind::InvalidArgument, "trajectory is empty");
    AsymmetryReport r;
    r.direction = direction;
    r.initial_label = std::move(initial_label);
    r.weights = basis == Basis::Bare ? bare_weights(traj.states.back()) : endpoint_weights(traj);
    const auto [w1, w2] = r.weights;
    if (w1 > w2) {
        r.dominant_state = BareState::State1;
        r.ratio = capped_ratio(w1, w2);
    } else if (w2 > w1) {
        r.dominant_state = BareState::State2;
        r.ratio = capped_ratio(w2, w1);
    }
    r.log_survival = log_survival_fraction(traj);
    r.survival = std::exp(r.log_survival);
    return r;
}

bool asymmetry_criterion(const AsymmetryReport& report, double threshold)
{
    return report.ratio >= threshold;
}

double log_survival_fraction(const TrajectoryRecord& traj)
{
    if (traj.empty())
        throw Error(ErrorKind::InvalidArgument, "trajectory is empty");
    return traj.log_norm_sq(traj.size() - 1) - traj.log_norm_sq(0);
}

double survival_fraction(const TrajectoryRecord& traj)
{
    return std::exp(log_survival_fraction(traj));
}

int Table1::disagreements() const
{
    return static_cast<int>(std::count_if(rows.begin(), rows.end(), [](const Table1Row& r) {
        return !r.adiabatic_agrees();
    }));
}

Table1 table1(const SystemParams& params, const LoopSpec& loop, const IntegratorConfig& config, Basis basis)
{
    Table1 table;
    table.basis = basis;
    table.swapped = track_branches(params, loop).swapped;
    std::size_t k = 0;
    for (Direction d : {Direction::CW, Direction::CCW}) {
        const LoopSpec run = loop.with_direction(d);
        for (BareState s : {BareState::State1, BareState::State2}) {
            const StateVector init = s == BareState::State1 ? StateVector{1.0, 0.0} : StateVector{0.0, 1.0};
            const TrajectoryRecord traj = propagate_direct(params, run, init, config);
            Table1Row& row = table.rows[k++];
            row.direction = d;
            row.initial = s;
            row.adiabatic_final = table.swapped ? other(s) : s;
            row.exact = final_state_report(traj, d, std::string(to_string(s)), basis);
        }
    }
    return table;
}

LoopSpec scaled_loop(const LoopSpec& templ, double duration_T, double amp_scale)
{
    LoopSpec loop = templ;
    loop.duration_T = duration_T;
    loop.center.eps0 *= amp_scale;
    loop.semi_axis_eps *= amp_scale;
    return loop;
}

StateVector equal_superposition(double relative_phase)
{
    const double a = 1.0 / std::numbers::sqrt2;
    return {a, a * std::polar(1.0, relative_phase)};
}

void SweepSpec::validate() const
{
    auto fail = [](const char* field, const char* what) {
        throw Error(ErrorKind::InvalidArgument, std::string(field) + " " + what);
    };
    if (durations.empty())
        fail("durations", "must not be empty");
    if (amp_scales.empty())
        fail("amp_scales", "must not be empty");
    for (double T : durations)
        if (!(std::isfinite(T) && T > 0.0))
            fail("durations", "must be finite and > 0");
    for (double s : amp_scales)
        if (!(std::isfinite(s) && s > 0.0))
            fail("amp_scales", "must be finite and > 0");
    if (!(std::isfinite(ratio_min) && ratio_min > 0.0))
        fail("ratio_min", "must be > 0");
    if (survival_levels.empty())
        fail("survival_levels", "must not be empty");
    for (double s : survival_levels)
        if (!(std::isfinite(s) && s > 0.0))
            fail("survival_levels", "must be > 0");
    loop_template.validate();
    initial.validate();
}

std::size_t SweepResult::failed_count() const
{
    return static_cast<std::size_t>(std::count_if(cells.begin(), cells.end(), [](const SweepCell& c) {
        return c.failed();
    }));
}

SweepCell evaluate_cell(const SweepSpec& spec, const SystemParams& params, const IntegratorConfig& config,
                        std::size_t i, std::size_t j)
{
    SweepCell cell;
    cell.i = i;
    cell.j = j;
    cell.duration_T = spec.durations.at(i);
    cell.amp_scale = spec.amp_scales.at(j);
    cell.rho = std::numeric_limits<double>::quiet_NaN();
    cell.survival = std::numeric_limits<double>::quiet_NaN();
    cell.ratio = std::numeric_limits<double>::quiet_NaN();
    cell.log_survival = std::numeric_limits<double>::quiet_NaN();
    try {
        const LoopSpec loop = scaled_loop(spec.loop_template, cell.duration_T, cell.amp_scale);
        cell.rho = rho(loop, locate_ep(params)).rho;
        const TrajectoryRecord traj = propagate_direct(params, loop, spec.initial, config);
        const AsymmetryReport r = final_state_report(traj, loop.direction, "sweep", spec.basis);
        cell.ratio = r.ratio;
        cell.dominant = r.dominant_state;
        cell.survival = r.survival;
        cell.log_survival = r.log_survival;
        cell.pass_ratio = asymmetry_criterion(r, spec.ratio_min);
        for (double level : spec.survival_levels)
            cell.survival_passes.push_back(cell.survival >= level);
        const double loosest = *std::min_element(spec.survival_levels.begin(), spec.survival_levels.end());
        cell.pass_survival = cell.survival >= loosest;
    } catch (const std::exception& e) {
        cell.error = e.what();
    }
    return cell;
}

SweepResult sweep(const SweepSpec& spec, const SystemParams& params, const IntegratorConfig& config, unsigned jobs,
                  const std::function<void(const SweepCell&)>& on_cell)
{
    spec.validate();
    params.validate();
    config.validate();

    SweepResult result;
    result.n_durations = spec.durations.size();
    result.n_amp_scales = spec.amp_scales.size();
    const std::size_t n = result.n_durations * result.n_amp_scales;
    result.cells.resize(n);

    if (jobs == 0)
        jobs = std::max(1u, std::thread::hardware_concurrency());
    jobs = static_cast<unsigned>(std::min<std::size_t>(jobs, n));

    std::atomic<std::size_t> next{0};
    std::mutex mu;
    std::vector<bool> done(n, false);
    std::size_t emitted = 0;

    auto worker = [&] {
        for (std::size_t k = next++; k < n; k = next++) {
            SweepCell cell = evaluate_cell(spec, params, config, k / result.n_amp_scales, k % result.n_amp_scales);
            std::lock_guard lock(mu);
            result.cells[k] = std::move(cell);
            done[k] = true;
            while (emitted < n && done[emitted]) {
                if (on_cell)
                    on_cell(result.cells[emitted]);
                ++emitted;
            }
        }
    };
    std::vector<std::jthread> pool;
    for (unsigned w = 1; w < jobs; ++w)
        pool.emplace_back(worker);
    worker();
    pool.clear();
    return result;
}

}  // namespace epx
