#include <doctest.h>

#include <numbers>
#include <random>

#include "epx/loop.hpp"
#include "helpers.hpp"

using namespace epx;
using testing::kind_of;
using testing::ref_loop;

TEST_SUITE("loop") {

TEST_CASE("contour geometry and closure")
{
    const LoopSpec ccw = ref_loop(40.0, Direction::CCW);
    const FieldPoint p0 = field_at(ccw, 0.0);
    CHECK(p0.omega == doctest::Approx(1.05));
    CHECK(p0.eps0 == doctest::Approx(0.2));
    const FieldPoint quarter = field_at(ccw, 10.0);
    CHECK(quarter.omega == doctest::Approx(1.0));
    CHECK(quarter.eps0 == doctest::Approx(0.25));
    const FieldPoint cw_quarter = field_at(ref_loop(40.0, Direction::CW), 10.0);
    CHECK(cw_quarter.eps0 == doctest::Approx(0.15));

    const FieldPoint end = field_at(ccw, 40.0);
    CHECK(end.omega == p0.omega);
    CHECK(end.eps0 == p0.eps0);
    CHECK(kind_of([&] { field_at(ccw, 40.0 + 1e-9); }) == ErrorKind::OutOfRange);
    CHECK(kind_of([&] { field_at(ccw, -1e-9); }) == ErrorKind::OutOfRange);
}

TEST_CASE("velocity matches a finite difference of the position")
{
    const LoopSpec loop = ref_loop(30.0, Direction::CW, 0.4);
    for (double t : {1.0, 7.5, 18.0, 29.0}) {
        const double h = 1e-5;
        const FieldPoint a = field_at(loop, t - h), b = field_at(loop, t + h);
        const FieldVelocity v = field_velocity(loop, t);
        CHECK(v.d_omega == doctest::Approx((b.omega - a.omega) / (2 * h)).epsilon(1e-7));
        CHECK(v.d_eps0 == doctest::Approx((b.eps0 - a.eps0) / (2 * h)).epsilon(1e-7));
    }
}

TEST_CASE("omega_integral against the trapezoid rule")
{
    for (Direction d : {Direction::CW, Direction::CCW}) {
        const LoopSpec loop = ref_loop(12.0, d, 1.3);
        const int n = 20000;
        double sum = 0.0;
        const double t_end = 9.0;
        for (int k = 0; k <= n; ++k) {
            const double w = (k == 0 || k == n) ? 0.5 : 1.0;
            sum += w * field_at(loop, t_end * k / n).omega;
        }
        CHECK(omega_integral(loop, t_end) == doctest::Approx(sum * t_end / n).epsilon(1e-9));
    }
}

TEST_CASE("winding number sign convention")
{
    const SystemParams p = SystemParams::reference();
    CHECK(winding_number(ref_loop(1.0, Direction::CCW), p) == -1);
    CHECK(winding_number(ref_loop(1.0, Direction::CW), p) == 1);
    CHECK(winding_number(testing::outside_loop(1.0), p) == 0);
}

TEST_CASE("winding number error paths")
{
    const SystemParams p = SystemParams::reference();
    LoopSpec through = ref_loop();
    through.center.omega = 1.05;
    through.start_phase = std::numbers::pi;  // starts on the EP
    CHECK(kind_of([&] { winding_number(through, p); }) == ErrorKind::EPOnContour);
    CHECK(kind_of([&] { winding_number(ref_loop(), p, 16); }) == ErrorKind::InvalidArgument);
    CHECK(kind_of([&] { winding_number(LoopSpec::static_field({1.0, 0.2}, 1.0), p); }) ==
          ErrorKind::InvalidArgument);
}

TEST_CASE("rho sign and value")
{
    const EPLocation ep = locate_ep(SystemParams::reference());
    CHECK(rho(ref_loop(), ep).rho == doctest::Approx(0.05));
    CHECK(rho(testing::outside_loop(), ep).rho == doctest::Approx(-0.1));
    LoopSpec touching = ref_loop();
    touching.center.omega = 1.05;
    CHECK(std::abs(rho(touching, ep).rho) < 1e-15);
    CHECK(contains_ep(ref_loop(), SystemParams::reference()));
    CHECK_FALSE(contains_ep(testing::outside_loop(), SystemParams::reference()));
    CHECK_FALSE(contains_ep(LoopSpec::static_field({1.0, 0.2}, 1.0), SystemParams::reference()));
}

TEST_CASE("winding agrees with rho on random ellipses")
{
    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> cw(0.85, 1.15), ce(0.1, 0.3), ax(0.02, 0.15), ph(0.0, 6.28);
    const SystemParams p = SystemParams::reference();
    const EPLocation ep = locate_ep(p);
    int tested = 0;
    while (tested < 40) {
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
        CHECK((std::abs(winding_number(loop, p)) == 1) == (r > 0));
    }
}

TEST_CASE("validation names the field")
{
    LoopSpec loop = ref_loop();
    loop.semi_axis_eps = 0.3;
    CHECK(testing::message_of([&] { loop.validate(); }).find("semi_axis_eps") != std::string::npos);
    loop = ref_loop();
    loop.duration_T = 0.0;
    CHECK(testing::message_of([&] { loop.validate(); }).find("duration_T") != std::string::npos);
    loop = ref_loop();
    loop.semi_axis_omega = 0.0;
    CHECK(testing::message_of([&] { loop.validate(); }).find("semi_axis_omega") != std::string::npos);
    CHECK_NOTHROW(LoopSpec::static_field({1.0, 0.0}, 5.0).validate());
}

}  // TEST_SUITE
