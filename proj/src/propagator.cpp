#include "epx/propagator.hpp"

#include <cmath>
#include <limits>
#include <optional>
#include <sstream>

#include "epx/error.hpp"

namespace epx {

namespace {

constexpr cplx kI{0.0, 1.0};

// Integral of (h11 + h22) / 2 over [0, t]; the common part of the spectrum.
cplx half_trace_integral(const SystemParams& p, const LoopSpec& loop, double t)
{
    return 0.5 * cplx((p.e1 + p.e2) * t + omega_integral(loop, t), -(p.gamma1 + p.gamma2) * t);
}

std::optional<BranchTracker> try_tracker(const SystemParams& params, const LoopSpec& loop)
{
    try {
        return BranchTracker(params, loop);
    } catch (const Error& e) {
        if (e.kind() == ErrorKind::EPOnContour || e.kind() == ErrorKind::AmbiguousTracking)
            return std::nullopt;
        throw;
    }
}

double squared(std::span<const cplx> y)
{
    double s = 0.0;
    for (const cplx& v : y)
        s += std::norm(v);
    return s;
}

/// Drives an integrator across the uniform output grid. `record(t)` stores a
/// sample from the integrator state; `norm_sq()` reports the scale that the
/// renormalization rule watches.
template <class Record, class NormSq>
void run_schedule(Dop853& integrator, const LoopSpec& loop, const IntegratorConfig& config, double& renorm_log,
                  Record&& record, NormSq&& norm_sq)
{
    const double T = loop.duration_T;
    const int n_out = config.output_intervals;
    record(0.0);
    for (int j = 1; j <= n_out; ++j) {
        const double target = j == n_out ? T : T * static_cast<double>(j) / n_out;
        while (integrator.time() < target) {
            integrator.step(target);
            const double ns = norm_sq();
            if (!std::isfinite(ns))
                throw Error(ErrorKind::NonFinite, "state norm is not finite");
            if (ns == 0.0)
                throw Error(ErrorKind::NonFinite, "state norm underflowed to zero");
            if (ns < kRenormalizeLow || ns > kRenormalizeHigh) {
                integrator.rescale(1.0 / std::sqrt(ns));
                renorm_log += std::log(ns);
            }
            if (config.record_internal_steps && integrator.time() < target)
                record(integrator.time());
        }
        record(target);
    }
}

void validate_inputs(const SystemParams& params, const LoopSpec& loop, const StateVector& initial,
                     const IntegratorConfig& config)
{
    params.validate();
    loop.validate();
    initial.validate();
    config.validate();
}

}  // namespace

void StateVector::validate() const
{
    const double parts[4] = {c1.real(), c1.imag(), c2.real(), c2.imag()};
    const char* names[4] = {"c1_re", "c1_im", "c2_re", "c2_im"};
    for (int k = 0; k < 4; ++k)
        if (!std::isfinite(parts[k]))
            throw Error(ErrorKind::InvalidArgument, std::string(names[k]) + " must be finite");
    if (c1 == 0.0 && c2 == 0.0)
        throw Error(ErrorKind::InvalidArgument, "c1 and c2 must not both be zero");
}

void IntegratorConfig::validate() const
{
    auto require = [](bool ok, const char* field, const char* what) {
        if (!ok)
            throw Error(ErrorKind::InvalidArgument, std::string(field) + " " + what);
    };
    const double eps = std::numeric_limits<double>::epsilon();
    require(std::isfinite(rel_tol) && rel_tol >= 100.0 * eps, "rel_tol", "must be >= 100 * machine epsilon");
    require(std::isfinite(abs_tol) && abs_tol > 0.0, "abs_tol", "must be > 0");
    require(std::isfinite(max_step) && max_step > 0.0, "max_step", "must be > 0");
    require(std::isfinite(initial_step) && initial_step > 0.0, "initial_step", "must be > 0");
    require(output_intervals >= 1, "output_intervals", "must be >= 1");
}

std::string_view to_string(Method m)
{
    return m == Method::Direct ? "direct" : "adiabatic";
}

double TrajectoryRecord::log_norm_sq(std::size_t k) const
{
    return std::log(norms_sq.at(k)) + log_scale.at(k);
}

TrajectoryRecord propagate_direct(const SystemParams& params, const LoopSpec& loop, const StateVector& initial,
                                  const IntegratorConfig& config)
{
    validate_inputs(params, loop, initial, config);
    const std::optional<BranchTracker> tracker = try_tracker(params, loop);

    // The scalar part tr(H)/2 commutes with everything and is applied in closed form.
    auto rhs = [&](double t, std::span<const cplx> y, std::span<cplx> dy) {
        const HamiltonianMatrix h = build_hamiltonian(params, field_at(loop, t));
        const cplx half_tr = 0.5 * h.trace();
        dy[0] = -kI * ((h.h11 - half_tr) * y[0] + h.h12 * y[1]);
        dy[1] = -kI * (h.h21 * y[0] + (h.h22 - half_tr) * y[1]);
    };
    Dop853 integrator(rhs, 2, config.ode_settings());
    const std::array<cplx, 2> y0{initial.c1, initial.c2};
    integrator.reset(0.0, y0);

    TrajectoryRecord rec;
    rec.meta = {params, loop, config, Method::Direct, initial, 0, 0, 0};
    double renorm_log = 0.0;

    auto record = [&](double t) {
        const auto y = integrator.state();
        const cplx common = half_trace_integral(params, loop, t);
        const cplx phase = std::exp(-kI * common.real());
        const StateVector s{phase * y[0], phase * y[1]};
        rec.times.push_back(t);
        rec.states.push_back(s);
        rec.norms_sq.push_back(s.norm_sq());
        rec.log_scale.push_back(renorm_log + 2.0 * common.imag());
        if (tracker) {
            const EigenFrame f = tracker->frame_at(t);
            rec.adiabatic_coeffs.push_back({c_product(f.v_plus, s.as_vec()), c_product(f.v_minus, s.as_vec())});
            rec.branch_labels.push_back(tracker->label_of_a(t));
        }
    };
    run_schedule(integrator, loop, config, renorm_log, record, [&] { return squared(integrator.state()); });

    rec.meta.accepted_steps = integrator.accepted_steps();
    rec.meta.rejected_steps = integrator.rejected_steps();
    rec.meta.rhs_evaluations = integrator.rhs_evaluations();
    return rec;
}

TrajectoryRecord propagate_adiabatic(const SystemParams& params, const LoopSpec& loop, const StateVector& initial,
                                     const IntegratorConfig& config)
{
    validate_inputs(params, loop, initial, config);
    const BranchTracker tracker(params, loop);

    auto rhs = [&](double t, std::span<const cplx> a, std::span<cplx> da) {
        const EigenFrame f = tracker.frame_at(t);
        const NaCoupling v = na_coupling(params, field_at(loop, t), field_velocity(loop, t), f);
        const cplx forward = std::exp(kI * tracker.phase_integral(t));
        da[0] = -v.plus_minus * forward * a[1];
        da[1] = -v.minus_plus / forward * a[0];
    };
    // Errors are weighted by each coefficient's physical size |exp(-+i Phi/2)|.
    auto weights = [&](double t, std::span<double> w) {
        const double half_im = 0.5 * tracker.phase_integral(t).imag();
        w[0] = std::exp(half_im);
        w[1] = std::exp(-half_im);
    };

    Dop853 integrator(rhs, 2, config.ode_settings());
    integrator.set_error_weights(weights);
    const EigenFrame f0 = tracker.frame_at(0.0);
    const Vec2 c0 = initial.as_vec();
    const std::array<cplx, 2> a0{c_product(f0.v_plus, c0), c_product(f0.v_minus, c0)};
    integrator.reset(0.0, a0);

    TrajectoryRecord rec;
    rec.meta = {params, loop, config, Method::Adiabatic, initial, 0, 0, 0};
    double renorm_log = 0.0;

    auto bare_state = [&](double t) {
        const auto a = integrator.state();
        const EigenFrame f = tracker.frame_at(t);
        const cplx half_phase = 0.5 * tracker.phase_integral(t);
        const cplx wa = a[0] * std::exp(-kI * half_phase);
        const cplx wb = a[1] * std::exp(kI * half_phase);
        return Vec2{wa * f.v_plus[0] + wb * f.v_minus[0], wa * f.v_plus[1] + wb * f.v_minus[1]};
    };
    auto record = [&](double t) {
        const Vec2 c = bare_state(t);
        const cplx common = half_trace_integral(params, loop, t);
        const cplx phase = std::exp(-kI * common.real());
        const StateVector s{phase * c[0], phase * c[1]};
        const EigenFrame f = tracker.frame_at(t);
        rec.times.push_back(t);
        rec.states.push_back(s);
        rec.norms_sq.push_back(s.norm_sq());
        rec.log_scale.push_back(renorm_log + 2.0 * common.imag());
        rec.adiabatic_coeffs.push_back({c_product(f.v_plus, s.as_vec()), c_product(f.v_minus, s.as_vec())});
        rec.branch_labels.push_back(tracker.label_of_a(t));
    };
    run_schedule(integrator, loop, config, renorm_log, record, [&] {
        const Vec2 c = bare_state(integrator.time());
        return std::norm(c[0]) + std::norm(c[1]);
    });

    rec.meta.accepted_steps = integrator.accepted_steps();
    rec.meta.rejected_steps = integrator.rejected_steps();
    rec.meta.rhs_evaluations = integrator.rhs_evaluations();
    return rec;
}

TrajectoryRecord propagate(Method method, const SystemParams& params, const LoopSpec& loop,
                           const StateVector& initial, const IntegratorConfig& config)
{
    return method == Method::Direct ? propagate_direct(params, loop, initial, config)
                                    : propagate_adiabatic(params, loop, initial, config);
}

StateVector adiabatic_state(const SystemParams& params, const LoopSpec& loop, Branch branch)
{
    const EigenFrame f = eigenframe(build_hamiltonian(params, field_at(loop, 0.0)));
    return StateVector::from_vec(f.vector(branch));
}

}  // namespace epx
