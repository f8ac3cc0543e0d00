#pragma once

#include <array>
#include <string>
#include <vector>

#include "epx/loop.hpp"
#include "epx/model.hpp"
#include "epx/ode.hpp"
#include "epx/tracking.hpp"

namespace epx {

/// Amplitudes on the bare basis: |1> (lower level + photon), |2> (upper level).
struct StateVector {
    cplx c1;
    cplx c2;

    Vec2 as_vec() const noexcept { return {c1, c2}; }
    static StateVector from_vec(const Vec2& v) noexcept { return {v[0], v[1]}; }
    double norm_sq() const noexcept { return std::norm(c1) + std::norm(c2); }

    void validate() const;
};

struct IntegratorConfig {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    double max_step = 1.0;
    double initial_step = 1e-3;
    // Not part of the serialized config.
    int output_intervals = 512;
    bool record_internal_steps = false;

    /// Throws Error(InvalidArgument) naming the offending field.
    void validate() const;
    OdeSettings ode_settings() const { return {rel_tol, abs_tol, max_step, initial_step}; }
};

enum class Method { Direct, Adiabatic };

std::string_view to_string(Method m);

struct TrajectoryMeta {
    SystemParams params;
    LoopSpec loop;
    IntegratorConfig config;
    Method method = Method::Direct;
    StateVector initial;
    std::size_t accepted_steps = 0;
    std::size_t rejected_steps = 0;
    std::size_t rhs_evaluations = 0;
};

/// Time series of one propagation.
///
/// The physical state at times[k] is states[k] * exp(log_scale[k] / 2), so the
/// physical squared norm is norms_sq[k] * exp(log_scale[k]). The common decay
/// -i(G1+G2)/2 of the diagonal is applied in closed form and lives entirely
/// in log_scale, together with any renormalization of the integrated state.
struct TrajectoryRecord {
    std::vector<double> times;
    std::vector<StateVector> states;
    std::vector<double> norms_sq;
    std::vector<double> log_scale;
    // Projections c_product(v_b, c) onto the tracked frame (A, B); empty when
    // the loop meets the EP.
    std::vector<std::array<cplx, 2>> adiabatic_coeffs;
    // Instantaneous root branch occupied by tracked branch A; empty likewise.
    std::vector<Branch> branch_labels;
    TrajectoryMeta meta;

    std::size_t size() const noexcept { return times.size(); }
    bool empty() const noexcept { return times.empty(); }
    /// ln of the physical squared norm at sample k.
    double log_norm_sq(std::size_t k) const;
};

inline constexpr double kRenormalizeLow = 1e-150;
inline constexpr double kRenormalizeHigh = 1e150;

/// Integrates i dc/dt = H(field_at(loop, t)) c on the bare basis.
TrajectoryRecord propagate_direct(const SystemParams& params, const LoopSpec& loop, const StateVector& initial,
                                  const IntegratorConfig& config);

/// Integrates the coefficients a_A, a_B of c = sum_b a_b v_b exp(-i int E_b)
/// on the tracked instantaneous frame, coupled through the non-adiabatic
/// terms V_{+/-} exp(+i Phi) and V_{-/+} exp(-i Phi) with Phi = int (E_A - E_B).
TrajectoryRecord propagate_adiabatic(const SystemParams& params, const LoopSpec& loop, const StateVector& initial,
                                     const IntegratorConfig& config);

TrajectoryRecord propagate(Method method, const SystemParams& params, const LoopSpec& loop,
                           const StateVector& initial, const IntegratorConfig& config);

/// Instantaneous eigenvector of tracked branch (Plus = A, Minus = B) at t = 0.
StateVector adiabatic_state(const SystemParams& params, const LoopSpec& loop, Branch branch);

}  // namespace epx
