#pragma once

#include "epx/model.hpp"

namespace epx {

/// Traversal sense in the (omega, eps0) plane, omega on the horizontal axis.
/// A positively chirped pulse corresponds to CCW, a negatively chirped one to CW.
enum class Direction { CW, CCW };

constexpr Direction reversed(Direction d) noexcept { return d == Direction::CW ? Direction::CCW : Direction::CW; }

/// Elliptical contour traversed once at uniform angular speed over [0, T].
///
/// Both semi-axes zero is accepted as a static-field path (the field sits at
/// `center` for the whole duration); otherwise both must be positive.
struct LoopSpec {
    FieldPoint center;
    double semi_axis_omega = 0.05;
    double semi_axis_eps = 0.05;
    Direction direction = Direction::CCW;
    double duration_T = 1.0;
    double start_phase = 0.0;

    bool is_static() const noexcept { return semi_axis_omega == 0.0 && semi_axis_eps == 0.0; }

    /// Throws Error(InvalidArgument) naming the offending field.
    void validate() const;

    LoopSpec with_direction(Direction d) const
    {
        LoopSpec copy = *this;
        copy.direction = d;
        return copy;
    }
    LoopSpec with_duration(double T) const
    {
        LoopSpec copy = *this;
        copy.duration_T = T;
        return copy;
    }

    static LoopSpec static_field(const FieldPoint& field, double duration_T);
};

struct FieldVelocity {
    double d_omega = 0.0;
    double d_eps0 = 0.0;
};

/// Signed proximity of the EP to the contour: positive inside, zero on it,
/// negative outside.
struct RhoMetric {
    double rho = 0.0;
};

/// Contour angle at time t (unwrapped, in radians).
double loop_angle(const LoopSpec& loop, double t);

FieldPoint field_at(const LoopSpec& loop, double t);
FieldVelocity field_velocity(const LoopSpec& loop, double t);

/// Integral of omega(t') over [0, t], in closed form.
double omega_integral(const LoopSpec& loop, double t);

inline constexpr int kMinWindingSamples = 64;

/// Winding of the discriminant around the origin along the loop.
/// For the reference parameters a CCW loop around the EP gives -1 (the
/// discriminant turns opposite to the contour), a CW loop +1.
int winding_number(const LoopSpec& loop, const SystemParams& params, int n_samples = 1024,
                   double tol = kDefaultEPTolerance * kDefaultEPTolerance);

RhoMetric rho(const LoopSpec& loop, const EPLocation& ep);

bool contains_ep(const LoopSpec& loop, const SystemParams& params);

}  // namespace epx
