#pragma once

#include <vector>

#include "epx/loop.hpp"
#include "epx/model.hpp"

namespace epx {

/// Per-sample instantaneous frames along a loop with branch continuity
/// applied. In each stored frame the "plus" slot holds tracked branch A (the
/// branch that is "+" at t = 0) and the "minus" slot tracked branch B;
/// `label_of_a[k]` says which instantaneous root branch A sits on at sample k.
/// Tracked eigenvectors carry a continuous sign instead of the gauge sign.
struct AdiabaticFrame {
    std::vector<double> times;
    std::vector<EigenFrame> frames;
    std::vector<Branch> label_of_a;
    bool swapped = false;
};

inline constexpr int kDefaultTrackingSamples = 4096;

/// Follows both eigenvalue branches continuously around a loop and serves
/// branch-consistent frames, couplings and phase integrals at arbitrary times.
///
/// Construction samples the loop on a uniform grid and matches adjacent
/// samples by maximal c-product overlap. Throws EPOnContour when the loop
/// meets the EP and AmbiguousTracking when two overlaps are within 10%.
class BranchTracker {
public:
    BranchTracker(const SystemParams& params, const LoopSpec& loop, int n_samples = kDefaultTrackingSamples);

    const SystemParams& params() const noexcept { return params_; }
    const LoopSpec& loop() const noexcept { return loop_; }
    const AdiabaticFrame& grid() const noexcept { return grid_; }
    bool swapped() const noexcept { return grid_.swapped; }

    /// Square root of the discriminant continued along branch A.
    cplx tracked_root(double t) const;

    /// Frame at time t: plus slot = branch A, minus slot = branch B, vector
    /// signs continued from the nearest grid sample.
    EigenFrame frame_at(double t) const;

    /// Which instantaneous root branch A occupies at time t.
    Branch label_of_a(double t) const;

    /// Integral over [0, t] of E_A - E_B.
    cplx phase_integral(double t) const;

    /// Integral over [0, t] of E_A + E_B (the trace), in closed form.
    cplx trace_integral(double t) const;

private:
    std::size_t nearest_sample(double t) const;
    double panel_width() const noexcept;

    SystemParams params_;
    LoopSpec loop_;
    AdiabaticFrame grid_;
    std::vector<cplx> roots_;          // tracked root per sample
    std::vector<cplx> phase_prefix_;   // phase_integral at each sample
};

/// Continuous branch tracking around the loop; reports whether the branches
/// are exchanged after one traversal.
AdiabaticFrame track_branches(const SystemParams& params, const LoopSpec& loop,
                              int n_samples = kDefaultTrackingSamples);

/// Non-adiabatic couplings (V_{+/-}, V_{-/+}) along a path: c-product of one
/// eigenvector with the velocity-weighted derivative of the other.
struct NaCoupling {
    cplx plus_minus;
    cplx minus_plus;
};

/// Finite-difference form from two branch-matched frames taken a time `dt`
/// apart along the path (frame_a at t - dt/2, frame_b at t + dt/2). The
/// velocity only gates the result: zero velocity means zero coupling.
NaCoupling na_coupling(const EigenFrame& frame_a, const EigenFrame& frame_b, double dt,
                       const FieldVelocity& velocity);

/// Central-difference derivative in parameter space at `field`, with step
/// 1e-6 * max(|omega|, |eps0|, 1), branches matched to `reference` (the frame
/// at `field` whose plus/minus slots define the labels). Throws EPProximity
/// near the EP.
NaCoupling na_coupling(const SystemParams& params, const FieldPoint& field, const FieldVelocity& velocity,
                       const EigenFrame& reference);

/// Integral over [0, t] of E_first - E_second along tracked branches, where
/// `first` names the tracked branch (Plus = A, Minus = B). Its imaginary part
/// is minus the integrated width difference.
cplx accumulated_phase(const SystemParams& params, const LoopSpec& loop, double t, Branch first = Branch::Plus,
                       int n_samples = kDefaultTrackingSamples);

/// Time average of Gamma = -Im E over `cycles` traversals of the loop for
/// tracked branch `branch` (Plus = A, Minus = B).
double average_decay_rate(const SystemParams& params, const LoopSpec& loop, Branch branch, int cycles = 1,
                          int n_samples = kDefaultTrackingSamples);

}  // namespace epx
