#pragma once

#include <cmath>
#include <complex>
#include <random>
#include <string>

#include <doctest.h>

#include "epx/error.hpp"
#include "epx/loop.hpp"
#include "epx/model.hpp"

namespace testing {

inline epx::LoopSpec ref_loop(double T = 50.0, epx::Direction d = epx::Direction::CCW, double start_phase = 0.0)
{
    epx::LoopSpec loop;
    loop.center = {1.0, 0.2};
    loop.semi_axis_omega = 0.05;
    loop.semi_axis_eps = 0.05;
    loop.direction = d;
    loop.duration_T = T;
    loop.start_phase = start_phase;
    return loop;
}

// Same size, shifted so the EP lies outside.
inline epx::LoopSpec outside_loop(double T = 50.0, epx::Direction d = epx::Direction::CCW)
{
    epx::LoopSpec loop = ref_loop(T, d);
    loop.center.omega = 1.15;
    return loop;
}

template <class F>
epx::ErrorKind kind_of(F&& f)
{
    try {
        f();
    } catch (const epx::Error& e) {
        return e.kind();
    }
    FAIL("expected epx::Error");
    return epx::ErrorKind::InvalidArgument;
}

template <class F>
std::string message_of(F&& f)
{
    try {
        f();
    } catch (const std::exception& e) {
        return e.what();
    }
    FAIL("expected an exception");
    return {};
}

}  // namespace testing
