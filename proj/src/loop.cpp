#include "epx/loop.hpp"

#include <algorithm>
#include <cmath>
#include <numbers>
#include <sstream>

#include "epx/error.hpp"

namespace epx {

namespace {

double sense(Direction d) { return d == Direction::CCW ? 1.0 : -1.0; }

void check_time(const LoopSpec& loop, double t)
{
    if (!(t >= 0.0 && t <= loop.duration_T)) {
        std::ostringstream os;
        os << "t = " << t << " outside [0, " << loop.duration_T << "]";
        throw Error(ErrorKind::OutOfRange, os.str());
    }
}

// Fraction of the period, with t = T mapped onto t = 0 so the contour closes exactly.
double period_fraction(const LoopSpec& loop, double t)
{
    const double u = t / loop.duration_T;
    return u >= 1.0 ? 0.0 : u;
}

}  // namespace

void LoopSpec::validate() const
{
    auto fail = [](const char* field, const std::string& what) {
        throw Error(ErrorKind::InvalidArgument, std::string(field) + " " + what);
    };
    if (!std::isfinite(center.omega))
        fail("center_omega", "must be finite");
    if (!std::isfinite(center.eps0) || center.eps0 < 0.0)
        fail("center_eps0", "must be finite and >= 0");
    if (!(std::isfinite(duration_T) && duration_T > 0.0))
        fail("duration_T", "must be finite and > 0");
    if (!std::isfinite(start_phase))
        fail("start_phase", "must be finite");
    if (is_static())
        return;
    if (!(std::isfinite(semi_axis_omega) && semi_axis_omega > 0.0))
        fail("semi_axis_omega", "must be finite and > 0");
    if (!(std::isfinite(semi_axis_eps) && semi_axis_eps > 0.0))
        fail("semi_axis_eps", "must be finite and > 0");
    if (center.eps0 < semi_axis_eps)
        fail("semi_axis_eps", "must not exceed center_eps0 (field amplitude would go negative)");
}

LoopSpec LoopSpec::static_field(const FieldPoint& field, double duration_T)
{
    LoopSpec loop;
    loop.center = field;
    loop.semi_axis_omega = 0.0;
    loop.semi_axis_eps = 0.0;
    loop.duration_T = duration_T;
    return loop;
}

double loop_angle(const LoopSpec& loop, double t)
{
    return loop.start_phase + sense(loop.direction) * 2.0 * std::numbers::pi * (t / loop.duration_T);
}

FieldPoint field_at(const LoopSpec& loop, double t)
{
    check_time(loop, t);
    const double theta =
        loop.start_phase + sense(loop.direction) * 2.0 * std::numbers::pi * period_fraction(loop, t);
    // Clamp guards the tangent point eps0 = 0 against a -1 ulp excursion.
    return {loop.center.omega + loop.semi_axis_omega * std::cos(theta),
            std::max(0.0, loop.center.eps0 + loop.semi_axis_eps * std::sin(theta))};
}

FieldVelocity field_velocity(const LoopSpec& loop, double t)
{
    check_time(loop, t);
    const double rate = sense(loop.direction) * 2.0 * std::numbers::pi / loop.duration_T;
    const double theta = loop_angle(loop, t);
    return {-loop.semi_axis_omega * std::sin(theta) * rate, loop.semi_axis_eps * std::cos(theta) * rate};
}

double omega_integral(const LoopSpec& loop, double t)
{
    const double base = loop.center.omega * t;
    if (loop.semi_axis_omega == 0.0)
        return base;
    const double rate = sense(loop.direction) * 2.0 * std::numbers::pi / loop.duration_T;
    return base + loop.semi_axis_omega * (std::sin(loop_angle(loop, t)) - std::sin(loop.start_phase)) / rate;
}

int winding_number(const LoopSpec& loop, const SystemParams& params, int n_samples, double tol)
{
    loop.validate();
    if (loop.is_static())
        throw Error(ErrorKind::InvalidArgument, "winding number of a static-field path is undefined");
    if (n_samples < kMinWindingSamples)
        throw Error(ErrorKind::InvalidArgument, "n_samples must be >= 64");

    const double T = loop.duration_T;
    auto delta_at = [&](int k) {
        const double t = T * static_cast<double>(k) / n_samples;
        const cplx d = discriminant(build_hamiltonian(params, field_at(loop, t)));
        if (std::abs(d) < tol) {
            std::ostringstream os;
            os << "|discriminant| = " << std::abs(d) << " at t = " << t;
            throw Error(ErrorKind::EPOnContour, os.str());
        }
        return d;
    };

    cplx prev = delta_at(0);
    const cplx first = prev;
    double total = 0.0;
    for (int k = 1; k <= n_samples; ++k) {
        const cplx next = k == n_samples ? first : delta_at(k);
        const double step = std::arg(next / prev);
        if (std::abs(step) > 0.5 * std::numbers::pi) {
            std::ostringstream os;
            os << "argument jump " << step << " rad between samples " << k - 1 << " and " << k;
            throw Error(ErrorKind::Undersampled, os.str());
        }
        total += step;
        prev = next;
    }
    return static_cast<int>(std::lround(total / (2.0 * std::numbers::pi)));
}

RhoMetric rho(const LoopSpec& loop, const EPLocation& ep)
{
    if (loop.is_static())
        throw Error(ErrorKind::InvalidArgument, "rho of a static-field path is undefined");
    const double x = (ep.field.omega - loop.center.omega) / loop.semi_axis_omega;
    const double y = (ep.field.eps0 - loop.center.eps0) / loop.semi_axis_eps;
    const double r = std::hypot(x, y);
    return {(1.0 - r) * std::min(loop.semi_axis_omega, loop.semi_axis_eps)};
}

bool contains_ep(const LoopSpec& loop, const SystemParams& params)
{
    if (loop.is_static())
        return false;
    return rho(loop, locate_ep(params)).rho > 0.0;
}

}  // namespace epx
