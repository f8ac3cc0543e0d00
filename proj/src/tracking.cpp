#include "epx/tracking.hpp"

#include <algorithm>
#include <array>
#include <cmath>
#include <sstream>

#include "epx/error.hpp"

namespace epx {

namespace {

// 8-point Gauss-Legendre rule on [-1, 1].
constexpr std::array<double, 8> kGaussNodes = {
    -0.9602898564975363, -0.7966664774136267, -0.5255324099163290, -0.1834346424956498,
    0.1834346424956498,  0.5255324099163290,  0.7966664774136267,  0.9602898564975363};
constexpr std::array<double, 8> kGaussWeights = {
    0.1012285362903763, 0.2223810344533745, 0.3137066458778873, 0.3626837833783620,
    0.3626837833783620, 0.3137066458778873, 0.2223810344533745, 0.1012285362903763};

Vec2 negated(const Vec2& v) { return {-v[0], -v[1]}; }

// Flips v so that its c-product with the reference has non-negative real part.
Vec2 aligned(const Vec2& v, const Vec2& reference)
{
    return c_product(reference, v).real() < 0.0 ? negated(v) : v;
}

cplx discriminant_at(const SystemParams& params, const LoopSpec& loop, double t)
{
    return discriminant(build_hamiltonian(params, field_at(loop, t)));
}

}  // namespace

BranchTracker::BranchTracker(const SystemParams& params, const LoopSpec& loop, int n_samples)
    : params_(params), loop_(loop)
{
    params_.validate();
    loop_.validate();
    if (n_samples < 16)
        throw Error(ErrorKind::InvalidArgument, "n_samples must be >= 16");

    const std::size_t n = static_cast<std::size_t>(n_samples);
    grid_.times.resize(n + 1);
    grid_.frames.resize(n + 1);
    grid_.label_of_a.resize(n + 1);
    roots_.resize(n + 1);

    for (std::size_t k = 0; k <= n; ++k) {
        const double t = k == n ? loop_.duration_T : loop_.duration_T * static_cast<double>(k) / n_samples;
        grid_.times[k] = t;
        const HamiltonianMatrix h = build_hamiltonian(params_, field_at(loop_, t));
        EigenFrame inst;
        try {
            inst = eigenframe(h);
        } catch (const Error& e) {
            if (e.kind() != ErrorKind::EPProximity)
                throw;
            std::ostringstream os;
            os << "loop meets the exceptional point near t = " << t;
            throw Error(ErrorKind::EPOnContour, os.str());
        }
        EigenFrame tracked = inst;
        Branch label = Branch::Plus;
        if (k > 0) {
            const EigenFrame& prev = grid_.frames[k - 1];
            const double o_same = std::abs(c_product(prev.v_plus, inst.v_plus));
            const double o_cross = std::abs(c_product(prev.v_plus, inst.v_minus));
            if (std::abs(o_same - o_cross) <= 0.1 * std::max(o_same, o_cross)) {
                std::ostringstream os;
                os << "overlaps " << o_same << " and " << o_cross << " are within 10% at t = " << t;
                throw Error(ErrorKind::AmbiguousTracking, os.str());
            }
            label = o_same > o_cross ? Branch::Plus : Branch::Minus;
            if (label == Branch::Minus) {
                std::swap(tracked.e_plus, tracked.e_minus);
                std::swap(tracked.v_plus, tracked.v_minus);
                std::swap(tracked.cnorm_plus, tracked.cnorm_minus);
            }
            tracked.v_plus = aligned(tracked.v_plus, prev.v_plus);
            tracked.v_minus = aligned(tracked.v_minus, prev.v_minus);
            tracked.gauge_tag = "tracked: sign continued from the previous sample";
        }
        grid_.frames[k] = tracked;
        grid_.label_of_a[k] = label;
        roots_[k] = tracked.e_plus - tracked.e_minus;
    }
    grid_.swapped = grid_.label_of_a[n] == Branch::Minus;

    phase_prefix_.assign(n + 1, cplx{});
    for (std::size_t k = 0; k < n; ++k) {
        const double a = grid_.times[k];
        const double b = grid_.times[k + 1];
        const double half = 0.5 * (b - a);
        const double mid = 0.5 * (a + b);
        cplx sum{};
        for (std::size_t g = 0; g < kGaussNodes.size(); ++g)
            sum += kGaussWeights[g] * tracked_root(mid + half * kGaussNodes[g]);
        phase_prefix_[k + 1] = phase_prefix_[k] + half * sum;
    }
}

double BranchTracker::panel_width() const noexcept
{
    return loop_.duration_T / static_cast<double>(grid_.times.size() - 1);
}

std::size_t BranchTracker::nearest_sample(double t) const
{
    const double pos = t / panel_width();
    const auto last = grid_.times.size() - 1;
    if (!(pos > 0.0))
        return 0;
    return std::min(static_cast<std::size_t>(std::lround(pos)), last);
}

cplx BranchTracker::tracked_root(double t) const
{
    const cplx s = plus_root(discriminant_at(params_, loop_, t));
    const cplx& ref = roots_[nearest_sample(t)];
    return std::abs(s - ref) <= std::abs(s + ref) ? s : -s;
}

Branch BranchTracker::label_of_a(double t) const
{
    const cplx delta = discriminant_at(params_, loop_, t);
    const cplx s = plus_root(delta);
    return tracked_root(t) == s ? Branch::Plus : Branch::Minus;
}

EigenFrame BranchTracker::frame_at(double t) const
{
    const HamiltonianMatrix h = build_hamiltonian(params_, field_at(loop_, t));
    const cplx delta = discriminant(h);
    if (std::abs(delta) <= kDefaultEPTolerance * kDefaultEPTolerance)
        throw Error(ErrorKind::EPProximity, "frame requested at the exceptional point");
    const std::size_t k = nearest_sample(t);
    const cplx plus = plus_root(delta);
    const cplx s = std::abs(plus - roots_[k]) <= std::abs(plus + roots_[k]) ? plus : -plus;
    const cplx tr = h.trace();

    EigenFrame f;
    f.e_plus = 0.5 * (tr + s);
    f.e_minus = 0.5 * (tr - s);
    f.v_plus = aligned(c_normalized_eigenvector(h, f.e_plus, &f.cnorm_plus), grid_.frames[k].v_plus);
    f.v_minus = aligned(c_normalized_eigenvector(h, f.e_minus, &f.cnorm_minus), grid_.frames[k].v_minus);
    f.gauge_tag = "tracked: sign continued from the nearest grid sample";
    return f;
}

cplx BranchTracker::phase_integral(double t) const
{
    if (!(t >= 0.0 && t <= loop_.duration_T))
        throw Error(ErrorKind::OutOfRange, "phase_integral time outside [0, T]");
    const double w = panel_width();
    std::size_t k = static_cast<std::size_t>(std::floor(t / w));
    k = std::min(k, grid_.times.size() - 1);
    const double a = grid_.times[k];
    if (t <= a)
        return phase_prefix_[k];
    const double half = 0.5 * (t - a);
    const double mid = 0.5 * (t + a);
    cplx sum{};
    for (std::size_t g = 0; g < kGaussNodes.size(); ++g)
        sum += kGaussWeights[g] * tracked_root(mid + half * kGaussNodes[g]);
    return phase_prefix_[k] + half * sum;
}

cplx BranchTracker::trace_integral(double t) const
{
    const double re = (params_.e1 + params_.e2) * t + omega_integral(loop_, t);
    const double im = -(params_.gamma1 + params_.gamma2) * t;
    return {re, im};
}

AdiabaticFrame track_branches(const SystemParams& params, const LoopSpec& loop, int n_samples)
{
    return BranchTracker(params, loop, n_samples).grid();
}

NaCoupling na_coupling(const EigenFrame& frame_a, const EigenFrame& frame_b, double dt,
                       const FieldVelocity& velocity)
{
    if (!(dt > 0.0))
        throw Error(ErrorKind::InvalidArgument, "dt must be positive");
    if (velocity.d_omega == 0.0 && velocity.d_eps0 == 0.0)
        return {};
    const Vec2 bp = aligned(frame_b.v_plus, frame_a.v_plus);
    const Vec2 bm = aligned(frame_b.v_minus, frame_a.v_minus);
    const Vec2 mid_plus{0.5 * (frame_a.v_plus[0] + bp[0]), 0.5 * (frame_a.v_plus[1] + bp[1])};
    const Vec2 mid_minus{0.5 * (frame_a.v_minus[0] + bm[0]), 0.5 * (frame_a.v_minus[1] + bm[1])};
    const Vec2 d_plus{(bp[0] - frame_a.v_plus[0]) / dt, (bp[1] - frame_a.v_plus[1]) / dt};
    const Vec2 d_minus{(bm[0] - frame_a.v_minus[0]) / dt, (bm[1] - frame_a.v_minus[1]) / dt};
    return {c_product(mid_plus, d_minus), c_product(mid_minus, d_plus)};
}

NaCoupling na_coupling(const SystemParams& params, const FieldPoint& field, const FieldVelocity& velocity,
                       const EigenFrame& reference)
{
    if (velocity.d_omega == 0.0 && velocity.d_eps0 == 0.0)
        return {};
    const double step = 1e-6 * std::max({std::abs(field.omega), std::abs(field.eps0), 1.0});

    // Eigenvectors at a displaced point, labelled by proximity to the reference energies.
    auto displaced = [&](double d_omega, double d_eps0) {
        const HamiltonianMatrix h = build_hamiltonian(params, {field.omega + d_omega, field.eps0 + d_eps0});
        const cplx delta = discriminant(h);
        if (std::abs(delta) <= kDefaultEPTolerance * kDefaultEPTolerance)
            throw Error(ErrorKind::EPProximity, "derivative stencil touches the exceptional point");
        auto [e1, e2] = eigenvalues(h);
        if (std::abs(e1 - reference.e_plus) > std::abs(e2 - reference.e_plus))
            std::swap(e1, e2);
        return std::array<Vec2, 2>{aligned(c_normalized_eigenvector(h, e1), reference.v_plus),
                                   aligned(c_normalized_eigenvector(h, e2), reference.v_minus)};
    };
    auto derivative = [&](const std::array<Vec2, 2>& hi, const std::array<Vec2, 2>& lo, std::size_t b) {
        return Vec2{(hi[b][0] - lo[b][0]) / (2.0 * step), (hi[b][1] - lo[b][1]) / (2.0 * step)};
    };

    Vec2 d_plus{};
    Vec2 d_minus{};
    if (velocity.d_omega != 0.0) {
        const auto hi = displaced(step, 0.0);
        const auto lo = displaced(-step, 0.0);
        const Vec2 dp = derivative(hi, lo, 0);
        const Vec2 dm = derivative(hi, lo, 1);
        for (int i = 0; i < 2; ++i) {
            d_plus[i] += velocity.d_omega * dp[i];
            d_minus[i] += velocity.d_omega * dm[i];
        }
    }
    if (velocity.d_eps0 != 0.0) {
        const auto hi = displaced(0.0, step);
        const auto lo = displaced(0.0, -step);
        const Vec2 dp = derivative(hi, lo, 0);
        const Vec2 dm = derivative(hi, lo, 1);
        for (int i = 0; i < 2; ++i) {
            d_plus[i] += velocity.d_eps0 * dp[i];
            d_minus[i] += velocity.d_eps0 * dm[i];
        }
    }
    return {c_product(reference.v_plus, d_minus), c_product(reference.v_minus, d_plus)};
}

cplx accumulated_phase(const SystemParams& params, const LoopSpec& loop, double t, Branch first, int n_samples)
{
    const cplx phase = BranchTracker(params, loop, n_samples).phase_integral(t);
    return first == Branch::Plus ? phase : -phase;
}

double average_decay_rate(const SystemParams& params, const LoopSpec& loop, Branch branch, int cycles,
                          int n_samples)
{
    if (cycles < 1)
        throw Error(ErrorKind::InvalidArgument, "cycles must be >= 1");
    const BranchTracker tracker(params, loop, n_samples);
    const double T = loop.duration_T;
    const cplx trace = tracker.trace_integral(T);
    const cplx phase = tracker.phase_integral(T);
    // Over cycle c the followed branch is A or B depending on how many
    // exchanges have happened so far.
    cplx sum{};
    bool on_a = branch == Branch::Plus;
    for (int c = 0; c < cycles; ++c) {
        sum += 0.5 * (trace + (on_a ? phase : -phase));
        if (tracker.swapped())
            on_a = !on_a;
    }
    return -sum.imag() / (T * cycles);
}

}  // namespace epx
