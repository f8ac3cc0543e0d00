#include "epx/ode.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "epx/error.hpp"

namespace epx {

namespace {

// Hairer & Wanner DOP853 tableau.
constexpr double c2 = 0.05260015195876773187856, c3 = 0.07890022793815159781784,
                 c4 = 0.11835034190722739672676, c5 = 0.28164965809277260327324,
                 c6 = 0.33333333333333333333333, c7 = 0.25, c8 = 0.30769230769230769230769,
                 c9 = 0.65128205128205128205128, c10 = 0.6, c11 = 0.85714285714285714285714;

constexpr double b1 = 0.05429373411656876223805, b6 = 4.45031289275240888144114,
                 b7 = 1.89151789931450038304282, b8 = -5.80120396001058478146721,
                 b9 = 0.31116436695781989440892, b10 = -0.15216094966251607855618,
                 b11 = 0.20136540080403034837478, b12 = 0.04471061572777259051769;

constexpr double bhh1 = 0.24409448818897637795276, bhh2 = 0.73384668828161185734136,
                 bhh3 = 0.02205882352941176470588;

constexpr double er1 = 0.01312004499419488073250, er6 = -1.22515644637620444072057,
                 er7 = -0.49575894965725019152141, er8 = 1.66437718245498653696153,
                 er9 = -0.35032884874997368168865, er10 = 0.33417911871301747902973,
                 er11 = 0.08192320648511571246571, er12 = -0.02235530786388629525884;

constexpr double a21 = 0.05260015195876773187856;
constexpr double a31 = 0.01972505698453789945446, a32 = 0.05917517095361369836338;
constexpr double a41 = 0.02958758547680684918169, a43 = 0.08876275643042054754507;
constexpr double a51 = 0.24136513415926668550237, a53 = -0.88454947932828608534486,
                 a54 = 0.92483400326179200311574;
constexpr double a61 = 0.03703703703703703703704, a64 = 0.17082860872947387127960,
                 a65 = 0.12546768756682242501669;
constexpr double a71 = 0.037109375, a74 = 0.17025221101954403931498, a75 = 0.06021653898045596068502,
                 a76 = -0.017578125;
constexpr double a81 = 0.03709200011850479271088, a84 = 0.17038392571223999381021,
                 a85 = 0.10726203044637328465181, a86 = -0.01531943774862440175279,
                 a87 = 0.00827378916381402288758;
constexpr double a91 = 0.62411095871607571711443, a94 = -3.36089262944694129406857,
                 a95 = -0.86821934684172600681819, a96 = 27.5920996994467083049416,
                 a97 = 20.1540675504778934086187, a98 = -43.4898841810699588477366;
constexpr double a101 = 0.47766253643826436589043, a104 = -2.48811461997166764192642,
                 a105 = -0.59029082683684299637145, a106 = 21.2300514481811942347289,
                 a107 = 15.2792336328824235832597, a108 = -33.2882109689848629194453,
                 a109 = -0.02033120170850862613582;
constexpr double a111 = -0.93714243008598732571704, a114 = 5.18637242884406370830024,
                 a115 = 1.09143734899672957818500, a116 = -8.14978701074692612513997,
                 a117 = -18.5200656599969598641566, a118 = 22.7394870993505042818970,
                 a119 = 2.49360555267965238987089, a1110 = -3.04676447189821950038237;
constexpr double a121 = 2.27331014751653820792360, a124 = -10.5344954667372501984067,
                 a125 = -2.00087205822486249909676, a126 = -17.9589318631187989172766,
                 a127 = 27.9488845294199600508500, a128 = -2.85899827713502369474066,
                 a129 = -8.87285693353062954433549, a1210 = 12.3605671757943030647266,
                 a1211 = 0.64339274601576353035597;

constexpr double kSafety = 0.9;
constexpr double kMinShrink = 0.333;  // hnew/h >= 1/6 .. 3
constexpr double kMaxGrow = 6.0;
constexpr double kBeta = 0.04;  // PI (Lund) stabilization
constexpr double kExpo = 1.0 / 8.0 - kBeta * 0.2;

double state_norm(std::span<const cplx> y)
{
    double s = 0.0;
    for (const cplx& v : y)
        s += std::norm(v);
    return std::sqrt(s);
}

bool all_finite(std::span<const cplx> y)
{
    return std::all_of(y.begin(), y.end(),
                       [](const cplx& v) { return std::isfinite(v.real()) && std::isfinite(v.imag()); });
}

}  // namespace

Dop853::Dop853(Rhs rhs, std::size_t dimension, OdeSettings settings)
    : rhs_(std::move(rhs)), n_(dimension), settings_(settings)
{
    if (!(settings_.rel_tol > 0.0 && settings_.abs_tol >= 0.0 && settings_.max_step > 0.0))
        throw Error(ErrorKind::InvalidArgument, "integrator tolerances and max_step must be positive");
    for (auto* v : {&y_, &ytmp_, &ynew_, &k1_, &k2_, &k3_, &k4_, &k5_, &k6_, &k7_, &k8_, &k9_, &k10_,
                    &k11_, &k12_})
        v->assign(n_, cplx{});
    w_.assign(n_, 1.0);
}

double Dop853::weighted_norm(double t, std::span<const cplx> y)
{
    if (!weights_)
        return state_norm(y);
    weights_(t, w_);
    double s = 0.0;
    for (std::size_t i = 0; i < n_; ++i)
        s += w_[i] * w_[i] * std::norm(y[i]);
    return std::sqrt(s);
}

void Dop853::eval(double t, std::span<const cplx> y, std::vector<cplx>& out)
{
    ++evals_;
    rhs_(t, y, out);
}

void Dop853::reset(double t, std::span<const cplx> y)
{
    if (y.size() != n_)
        throw Error(ErrorKind::InvalidArgument, "state dimension mismatch");
    if (!all_finite(y))
        throw Error(ErrorKind::NonFinite, "initial state is not finite");
    t_ = t;
    std::copy(y.begin(), y.end(), y_.begin());
    eval(t_, y_, k1_);
    err_old_ = 1e-4;
    h_ = settings_.initial_step > 0.0 ? std::min(settings_.initial_step, settings_.max_step)
                                      : initial_step_guess();
}

double Dop853::initial_step_guess()
{
    // Hairer's starting-step heuristic with the norm-wise error weight.
    const double sk = settings_.abs_tol + settings_.rel_tol * weighted_norm(t_, y_);
    const double dnf = weighted_norm(t_, k1_) / sk;
    const double dny = weighted_norm(t_, y_) / sk;
    double h = (dnf <= 1e-10 || dny <= 1e-10) ? 1e-6 : 0.01 * dny / dnf;
    h = std::min(h, settings_.max_step);
    for (std::size_t i = 0; i < n_; ++i)
        ytmp_[i] = y_[i] + h * k1_[i];
    eval(t_ + h, ytmp_, k2_);
    for (std::size_t i = 0; i < n_; ++i)
        ytmp_[i] = k2_[i] - k1_[i];
    const double der2 = weighted_norm(t_, ytmp_) / sk / h;
    const double der12 = std::max(der2, dnf);
    const double h1 = der12 > 1e-15 ? std::pow(0.01 / der12, 1.0 / 8.0) : std::max(1e-6, h * 1e-3);
    return std::min({100.0 * h, h1, settings_.max_step});
}

void Dop853::rescale(double factor)
{
    for (std::size_t i = 0; i < n_; ++i) {
        y_[i] *= factor;
        k1_[i] *= factor;
    }
}

double Dop853::step(double t_limit)
{
    const double remaining = t_limit - t_;
    if (!(remaining > 0.0))
        throw Error(ErrorKind::InvalidArgument, "step target must lie ahead of the current time");

    double h = std::min(h_, settings_.max_step);
    for (;;) {
        bool last = false;
        if (h >= remaining * (1.0 - 1e-12)) {
            h = remaining;
            last = true;
        }
        if (!(h > 1e-14 * std::max(1.0, std::abs(t_)))) {
            std::ostringstream os;
            os << "step size " << h << " underflowed at t = " << t_;
            throw Error(ErrorKind::StepSizeUnderflow, os.str());
        }

        const auto& y = y_;
        for (std::size_t i = 0; i < n_; ++i)
            ytmp_[i] = y[i] + h * a21 * k1_[i];
        eval(t_ + c2 * h, ytmp_, k2_);
        for (std::size_t i = 0; i < n_; ++i)
            ytmp_[i] = y[i] + h * (a31 * k1_[i] + a32 * k2_[i]);
        eval(t_ + c3 * h, ytmp_, k3_);
        for (std::size_t i = 0; i < n_; ++i)
            ytmp_[i] = y[i] + h * (a41 * k1_[i] + a43 * k3_[i]);
        eval(t_ + c4 * h, ytmp_, k4_);
        for (std::size_t i = 0; i < n_; ++i)
            ytmp_[i] = y[i] + h * (a51 * k1_[i] + a53 * k3_[i] + a54 * k4_[i]);
        eval(t_ + c5 * h, ytmp_, k5_);
        for (std::size_t i = 0; i < n_; ++i)
            ytmp_[i] = y[i] + h * (a61 * k1_[i] + a64 * k4_[i] + a65 * k5_[i]);
        eval(t_ + c6 * h, ytmp_, k6_);
        for (std::size_t i = 0; i < n_; ++i)
            ytmp_[i] = y[i] + h * (a71 * k1_[i] + a74 * k4_[i] + a75 * k5_[i] + a76 * k6_[i]);
        eval(t_ + c7 * h, ytmp_, k7_);
        for (std::size_t i = 0; i < n_; ++i)
            ytmp_[i] = y[i] + h * (a81 * k1_[i] + a84 * k4_[i] + a85 * k5_[i] + a86 * k6_[i] + a87 * k7_[i]);
        eval(t_ + c8 * h, ytmp_, k8_);
        for (std::size_t i = 0; i < n_; ++i)
            ytmp_[i] = y[i] + h * (a91 * k1_[i] + a94 * k4_[i] + a95 * k5_[i] + a96 * k6_[i] + a97 * k7_[i] +
                                   a98 * k8_[i]);
        eval(t_ + c9 * h, ytmp_, k9_);
        for (std::size_t i = 0; i < n_; ++i)
            ytmp_[i] = y[i] + h * (a101 * k1_[i] + a104 * k4_[i] + a105 * k5_[i] + a106 * k6_[i] +
                                   a107 * k7_[i] + a108 * k8_[i] + a109 * k9_[i]);
        eval(t_ + c10 * h, ytmp_, k10_);
        for (std::size_t i = 0; i < n_; ++i)
            ytmp_[i] = y[i] + h * (a111 * k1_[i] + a114 * k4_[i] + a115 * k5_[i] + a116 * k6_[i] +
                                   a117 * k7_[i] + a118 * k8_[i] + a119 * k9_[i] + a1110 * k10_[i]);
        eval(t_ + c11 * h, ytmp_, k11_);
        for (std::size_t i = 0; i < n_; ++i)
            ytmp_[i] = y[i] + h * (a121 * k1_[i] + a124 * k4_[i] + a125 * k5_[i] + a126 * k6_[i] +
                                   a127 * k7_[i] + a128 * k8_[i] + a129 * k9_[i] + a1210 * k10_[i] +
                                   a1211 * k11_[i]);
        const double t_new = last ? t_limit : t_ + h;
        eval(t_new, ytmp_, k12_);

        if (weights_)
            weights_(t_new, w_);
        double err5 = 0.0;
        double err3 = 0.0;
        for (std::size_t i = 0; i < n_; ++i) {
            const double wi = weights_ ? w_[i] * w_[i] : 1.0;
            const cplx incr = b1 * k1_[i] + b6 * k6_[i] + b7 * k7_[i] + b8 * k8_[i] + b9 * k9_[i] +
                              b10 * k10_[i] + b11 * k11_[i] + b12 * k12_[i];
            ynew_[i] = y[i] + h * incr;
            err3 += wi * std::norm(incr - bhh1 * k1_[i] - bhh2 * k9_[i] - bhh3 * k12_[i]);
            err5 += wi * std::norm(er1 * k1_[i] + er6 * k6_[i] + er7 * k7_[i] + er8 * k8_[i] + er9 * k9_[i] +
                              er10 * k10_[i] + er11 * k11_[i] + er12 * k12_[i]);
        }
        const double sk = settings_.abs_tol +
                          settings_.rel_tol * std::max(weighted_norm(t_, y_), weighted_norm(t_new, ynew_));
        err5 /= sk * sk;
        err3 /= sk * sk;
        double deno = err5 + 0.01 * err3;
        if (deno <= 0.0)
            deno = 1.0;
        double err = h * err5 / std::sqrt(deno * static_cast<double>(n_));

        if (!std::isfinite(err)) {
            ++rejected_;
            h *= 0.1;
            continue;
        }

        double fac = std::pow(err, kExpo);
        if (err <= 1.0) {
            if (!all_finite(ynew_))
                throw Error(ErrorKind::NonFinite, "state left the representable range");
            fac /= std::pow(err_old_, kBeta);
            fac = std::clamp(fac / kSafety, 1.0 / kMaxGrow, 1.0 / kMinShrink);
            err_old_ = std::max(err, 1e-4);
            const double taken = h;
            std::swap(y_, ynew_);
            t_ = t_new;
            eval(t_, y_, k1_);
            ++accepted_;
            // A step clipped to land on t_limit keeps the controller's proposal.
            const double proposal = taken / fac;
            h_ = last ? std::max(h_, proposal) : proposal;
            h_ = std::min(h_, settings_.max_step);
            return taken;
        }
        ++rejected_;
        h /= std::min(1.0 / kMinShrink, fac / kSafety);
    }
}

}  // namespace epx
