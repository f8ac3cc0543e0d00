#include "epx/model.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

#include "epx/error.hpp"

namespace epx {

namespace {

constexpr std::string_view kGaugeTag = "c-normalized; larger component has positive real part";

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void SystemParams::validate() const
{
    auto require = [](bool ok, const char* field, const char* what) {
        if (!ok)
            throw Error(ErrorKind::InvalidArgument, std::string(field) + " " + what);
    };
    require(finite(e1), "e1", "must be finite");
    require(finite(e2), "e2", "must be finite");
    require(finite(gamma1) && gamma1 >= 0.0, "gamma1", "must be finite and >= 0");
    require(finite(gamma2) && gamma2 >= 0.0, "gamma2", "must be finite and >= 0");
    require(finite(d12.real()), "d12_re", "must be finite");
    require(finite(d12.imag()), "d12_im", "must be finite");
}

void FieldPoint::validate() const
{
    if (!finite(omega))
        throw Error(ErrorKind::InvalidArgument, "omega must be finite");
    if (!finite(eps0) || eps0 < 0.0)
        throw Error(ErrorKind::InvalidArgument, "eps0 must be finite and >= 0");
}

double HamiltonianMatrix::frobenius_norm() const noexcept
{
    return std::sqrt(std::norm(h11) + std::norm(h12) + std::norm(h21) + std::norm(h22));
}

HamiltonianMatrix build_hamiltonian(const SystemParams& p, const FieldPoint& f)
{
    // Gain/loss form: shifted diagonal +-i*dGamma/2 plus the common -i*(G1+G2)/2.
    const double mean_width = 0.5 * (p.gamma1 + p.gamma2);
    const double half_dg = 0.5 * p.delta_gamma();
    const cplx coupling = 0.5 * f.eps0 * p.d12;
    HamiltonianMatrix h;
    h.h11 = cplx(p.e1 + f.omega, half_dg - mean_width);
    h.h22 = cplx(p.e2, -half_dg - mean_width);
    h.h12 = coupling;
    h.h21 = coupling;
    return h;
}

cplx discriminant(const HamiltonianMatrix& h) noexcept
{
    const cplx d = h.h11 - h.h22;
    return d * d + 4.0 * h.h12 * h.h21;
}

cplx plus_root(cplx delta) noexcept
{
    cplx s = std::sqrt(delta);
    if (s.real() < 0.0 || (s.real() == 0.0 && s.imag() < 0.0))
        s = -s;
    return s;
}

std::pair<cplx, cplx> eigenvalues(const HamiltonianMatrix& h) noexcept
{
    const cplx tr = h.trace();
    const cplx s = plus_root(discriminant(h));
    return {0.5 * (tr + s), 0.5 * (tr - s)};
}

double euclidean_norm(const Vec2& v) noexcept
{
    return std::sqrt(std::norm(v[0]) + std::norm(v[1]));
}

Vec2 c_normalized_eigenvector(const HamiltonianMatrix& h, cplx energy, cplx* cnorm)
{
    // Both rows of (H - E) annihilate the eigenvector; take the better conditioned one.
    Vec2 a{h.h12, energy - h.h11};
    Vec2 b{energy - h.h22, h.h21};
    Vec2 v = euclidean_norm(a) >= euclidean_norm(b) ? a : b;
    const double len = euclidean_norm(v);
    if (!(len > 0.0)) {
        // h is a multiple of the identity on this eigenvalue: any vector works.
        v = {1.0, 0.0};
    } else {
        v[0] /= len;
        v[1] /= len;
    }
    const cplx cn = c_product(v, v);
    if (cnorm)
        *cnorm = cn;
    const cplx scale = std::sqrt(cn);
    if (std::abs(scale) == 0.0)
        throw Error(ErrorKind::EPProximity, "eigenvector is self-orthogonal");
    v[0] /= scale;
    v[1] /= scale;

    const std::size_t lead = std::abs(v[1]) > std::abs(v[0]) * (1.0 + 1e-12) ? 1 : 0;
    const bool flip = v[lead].real() < 0.0 || (v[lead].real() == 0.0 && v[lead].imag() < 0.0);
    if (flip) {
        v[0] = -v[0];
        v[1] = -v[1];
    }
    return v;
}

EigenFrame eigenframe(const HamiltonianMatrix& h, double tol)
{
    const cplx delta = discriminant(h);
    if (std::abs(delta) <= tol * tol) {
        std::ostringstream os;
        os << "|discriminant| = " << std::abs(delta) << " <= tol^2 = " << tol * tol;
        throw Error(ErrorKind::EPProximity, os.str());
    }
    const auto [ep, em] = eigenvalues(h);
    EigenFrame frame;
    frame.e_plus = ep;
    frame.e_minus = em;
    frame.v_plus = c_normalized_eigenvector(h, ep, &frame.cnorm_plus);
    frame.v_minus = c_normalized_eigenvector(h, em, &frame.cnorm_minus);
    frame.gauge_tag = kGaugeTag;
    return frame;
}

EPLocation locate_ep(const SystemParams& params)
{
    params.validate();
    const double re_d = params.d12.real();
    if (re_d == 0.0)
        throw Error(ErrorKind::NoFiniteEP, "Re[d12] = 0: coupling cannot balance the width difference");
    const double eps0 = params.delta_gamma() / re_d;
    if (eps0 < 0.0) {
        std::ostringstream os;
        os << "required field amplitude " << eps0 << " is negative";
        throw Error(ErrorKind::NegativeAmplitude, os.str());
    }
    EPLocation ep;
    ep.field.eps0 = eps0;
    ep.field.omega = params.e2 - params.e1 - params.d12.imag() * eps0;
    ep.residual = std::abs(discriminant(build_hamiltonian(params, ep.field)));
    return ep;
}

double verify_ep(const SystemParams& params, const FieldPoint& field)
{
    const HamiltonianMatrix h = build_hamiltonian(params, field);
    const cplx diff = h.h11 - h.h22;
    const cplx q = std::sqrt(h.h12 * h.h21);
    const cplx two_i_q = cplx(0.0, 2.0) * q;
    // Upper and lower sign choices of the paired real conditions, written as
    // one complex residual each.
    return std::min(std::abs(diff - two_i_q), std::abs(diff + two_i_q));
}

}  // namespace epx
