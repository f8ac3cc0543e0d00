#pragma once

#include <array>
#include <cstddef>
#include <functional>
#include <optional>
#include <string>
#include <vector>

#include "epx/loop.hpp"
#include "epx/model.hpp"
#include "epx/propagator.hpp"

namespace epx {

struct ProjectionSeries {
    std::vector<double> times;
    std::vector<double> w1;
    std::vector<double> w2;
};

enum class BareState { State1, State2 };

constexpr BareState other(BareState s) noexcept
{
    return s == BareState::State1 ? BareState::State2 : BareState::State1;
}

std::string_view to_string(BareState s);
std::string_view to_string(Direction d);

/// Basis in which final populations are compared. Bare compares |c1|^2 with
/// |c2|^2. Endpoint compares the weights along the two instantaneous
/// eigenvectors at the loop's end point, each named after the bare state it
/// overlaps most.
enum class Basis { Bare, Endpoint };

std::string_view to_string(Basis b);

inline constexpr double kRatioCap = 1e12;

struct AsymmetryReport {
    // Empty when the two weights are exactly equal.
    std::optional<BareState> dominant_state;
    double ratio = 1.0;
    double survival = 1.0;
    double log_survival = 0.0;  // ln(survival), finite where survival underflows
    Direction direction = Direction::CCW;
    std::string initial_label;
    std::array<double, 2> weights{0.5, 0.5};
};

/// Normalized bare-state weights at every recorded time. Throws ZeroNorm.
ProjectionSeries project_normalized(const TrajectoryRecord& traj);

AsymmetryReport final_state_report(const TrajectoryRecord& traj, Direction direction, std::string initial_label,
                                   Basis basis = Basis::Bare);

bool asymmetry_criterion(const AsymmetryReport& report, double threshold = 1000.0);

/// Physical squared norm at t = T over that at t = 0.
double survival_fraction(const TrajectoryRecord& traj);
double log_survival_fraction(const TrajectoryRecord& traj);

struct Table1Row {
    Direction direction = Direction::CW;
    BareState initial = BareState::State1;
    BareState adiabatic_final = BareState::State1;
    AsymmetryReport exact;

    bool adiabatic_agrees() const { return exact.dominant_state == adiabatic_final; }
};

struct Table1 {
    bool swapped = false;
    Basis basis = Basis::Bare;
    std::array<Table1Row, 4> rows;  // CW/1, CW/2, CCW/1, CCW/2

    int disagreements() const;
};

/// Runs both directions from both bare states with propagate_direct.
/// The adiabatic column follows the initial label through the branch swap.
Table1 table1(const SystemParams& params, const LoopSpec& loop, const IntegratorConfig& config,
              Basis basis = Basis::Bare);

/// Loop of `templ` with the field strength scaled: center eps0 and the eps0
/// semi-axis are both multiplied by `amp_scale`.
LoopSpec scaled_loop(const LoopSpec& templ, double duration_T, double amp_scale);

/// (|1> + e^{i phase} |2>) / sqrt(2).
StateVector equal_superposition(double relative_phase = 0.0);

struct SweepSpec {
    std::vector<double> durations;   // axis i
    std::vector<double> amp_scales;  // axis j
    LoopSpec loop_template;          // its direction is used for every cell
    StateVector initial = equal_superposition();
    double ratio_min = 1000.0;
    std::vector<double> survival_levels{0.1, 0.01, 0.001};
    Basis basis = Basis::Bare;

    void validate() const;
};

struct SweepCell {
    std::size_t i = 0;
    std::size_t j = 0;
    double duration_T = 0.0;
    double amp_scale = 0.0;
    double rho = 0.0;
    double ratio = 1.0;
    std::optional<BareState> dominant;
    double survival = 0.0;
    double log_survival = 0.0;
    bool pass_ratio = false;
    bool pass_survival = false;  // survival >= the loosest level
    std::vector<bool> survival_passes;  // one per survival level
    std::string error;  // non-empty when the cell failed

    bool failed() const { return !error.empty(); }
};

struct SweepResult {
    std::size_t n_durations = 0;
    std::size_t n_amp_scales = 0;
    std::vector<SweepCell> cells;  // row-major: index = i * n_amp_scales + j

    const SweepCell& at(std::size_t i, std::size_t j) const { return cells.at(i * n_amp_scales + j); }
    std::size_t failed_count() const;
};

SweepCell evaluate_cell(const SweepSpec& spec, const SystemParams& params, const IntegratorConfig& config,
                        std::size_t i, std::size_t j);

/// Evaluates every cell on up to `jobs` worker threads (0 = hardware
/// concurrency). `on_cell` is called once per cell in row-major index order,
/// as soon as all earlier cells are complete.
SweepResult sweep(const SweepSpec& spec, const SystemParams& params, const IntegratorConfig& config,
                  unsigned jobs = 0, const std::function<void(const SweepCell&)>& on_cell = {});

}  // namespace epx
