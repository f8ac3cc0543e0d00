#pragma once

#include <cstddef>
#include <functional>
#include <span>
#include <vector>

#include "epx/model.hpp"

namespace epx {

struct OdeSettings {
    double rel_tol = 1e-10;
    double abs_tol = 1e-14;
    double max_step = 1.0;
    double initial_step = 1e-3;
};

/// Dormand-Prince 8(5,3) embedded Runge-Kutta integrator over complex state
/// vectors, with PI step-size control.
///
/// The local error is measured against the Euclidean norm of the whole state
/// (abs_tol + rel_tol * |y|), so small components of a dominated state are
/// resolved relative to the state as a whole. This is the natural error model
/// for amplitude vectors whose overall scale drifts with decay.
class Dop853 {
public:
    using Rhs = std::function<void(double t, std::span<const cplx> y, std::span<cplx> dydt)>;
    /// Per-component multipliers applied before measuring errors and norms,
    /// for states whose components carry different physical scales.
    using Weights = std::function<void(double t, std::span<double> w)>;

    Dop853(Rhs rhs, std::size_t dimension, OdeSettings settings);

    void set_error_weights(Weights weights) { weights_ = std::move(weights); }

    void reset(double t, std::span<const cplx> y);

    /// Advances by one accepted step without passing `t_limit` (landing on it
    /// exactly when within reach). Returns the accepted step size.
    /// Throws StepSizeUnderflow or NonFinite.
    double step(double t_limit);

    /// Multiplies the state by a real factor; exact for linear systems.
    void rescale(double factor);

    double time() const noexcept { return t_; }
    std::span<const cplx> state() const noexcept { return y_; }

    std::size_t accepted_steps() const noexcept { return accepted_; }
    std::size_t rejected_steps() const noexcept { return rejected_; }
    std::size_t rhs_evaluations() const noexcept { return evals_; }

private:
    void eval(double t, std::span<const cplx> y, std::vector<cplx>& out);
    double initial_step_guess();
    double weighted_norm(double t, std::span<const cplx> y);

    Rhs rhs_;
    Weights weights_;
    std::vector<double> w_;
    std::size_t n_;
    OdeSettings settings_;

    double t_ = 0.0;
    double h_ = 0.0;
    double err_old_ = 1e-4;
    std::vector<cplx> y_;
    std::vector<cplx> ytmp_, ynew_;
    std::vector<cplx> k1_, k2_, k3_, k4_, k5_, k6_, k7_, k8_, k9_, k10_, k11_, k12_;

    std::size_t accepted_ = 0;
    std::size_t rejected_ = 0;
    std::size_t evals_ = 0;
};

}  // namespace epx
