#pragma once

#include <array>
#include <complex>
#include <string_view>
#include <utility>

namespace epx {

using cplx = std::complex<double>;
using Vec2 = std::array<cplx, 2>;

/// Constants of the driven two-resonance model in dimensionless units (hbar = 1).
///
/// State 1 is the lower level dressed by one photon, state 2 the excited
/// resonance. Decay rates enter the diagonal as -i*gamma.
struct SystemParams {
    double e1 = 0.0;
    double e2 = 1.0;
    double gamma1 = 0.1;
    double gamma2 = 0.3;
    cplx d12 = 1.0;

    double delta_gamma() const noexcept { return gamma2 - gamma1; }

    /// Throws Error(InvalidArgument) naming the offending field.
    void validate() const;

    /// Reference parameter set used throughout the tests and as CLI default.
    static SystemParams reference() noexcept { return {}; }
};

/// A point (omega, eps0) of the drive-parameter plane.
struct FieldPoint {
    double omega = 0.0;
    double eps0 = 0.0;

    void validate() const;
};

struct HamiltonianMatrix {
    cplx h11, h12, h21, h22;

    cplx trace() const noexcept { return h11 + h22; }
    Vec2 apply(const Vec2& v) const noexcept
    {
        return {h11 * v[0] + h12 * v[1], h21 * v[0] + h22 * v[1]};
    }
    double frobenius_norm() const noexcept;
};

enum class Branch { Plus, Minus };

constexpr Branch other(Branch b) noexcept { return b == Branch::Plus ? Branch::Minus : Branch::Plus; }
constexpr std::size_t index(Branch b) noexcept { return b == Branch::Plus ? 0 : 1; }

/// Instantaneous eigen-decomposition under the c-product. For the
/// complex-symmetric model the left eigenvectors coincide with the right ones,
/// so a single pair of vectors spans the biorthonormal frame.
struct EigenFrame {
    cplx e_plus;
    cplx e_minus;
    Vec2 v_plus;
    Vec2 v_minus;
    // c-norm of the unit (Euclidean) eigenvector before c-normalization;
    // vanishes at the exceptional point.
    cplx cnorm_plus;
    cplx cnorm_minus;
    std::string_view gauge_tag;

    const cplx& energy(Branch b) const noexcept { return b == Branch::Plus ? e_plus : e_minus; }
    const Vec2& vector(Branch b) const noexcept { return b == Branch::Plus ? v_plus : v_minus; }
};

struct EPLocation {
    FieldPoint field;
    double residual = 0.0;
};

HamiltonianMatrix build_hamiltonian(const SystemParams& params, const FieldPoint& field);

cplx discriminant(const HamiltonianMatrix& h) noexcept;

/// Square root of the discriminant on the "+" branch: non-negative real part,
/// non-negative imaginary part on the cut.
cplx plus_root(cplx delta) noexcept;

/// Returns (E+, E-) with E+ = (tr + plus_root(delta)) / 2.
std::pair<cplx, cplx> eigenvalues(const HamiltonianMatrix& h) noexcept;

/// Bilinear product u1*v1 + u2*v2 (no conjugation).
constexpr cplx c_product(const Vec2& u, const Vec2& v) noexcept { return u[0] * v[0] + u[1] * v[1]; }

double euclidean_norm(const Vec2& v) noexcept;

/// c-normalized right eigenvector of h for the eigenvalue `energy`, sign
/// fixed so the larger component has positive real part. Writes the c-norm
/// of the unit eigenvector to `cnorm` when non-null.
Vec2 c_normalized_eigenvector(const HamiltonianMatrix& h, cplx energy, cplx* cnorm = nullptr);

inline constexpr double kDefaultEPTolerance = 1e-6;

/// Throws Error(EPProximity) when |discriminant| <= tol^2.
EigenFrame eigenframe(const HamiltonianMatrix& h, double tol = kDefaultEPTolerance);

/// Closed-form EP of the model. Throws NoFiniteEP when Re d12 = 0 and
/// NegativeAmplitude when the required amplitude is negative.
EPLocation locate_ep(const SystemParams& params);

/// Residual of the two real coalescence conditions, minimized over the paired
/// sign choice. Zero exactly at an EP.
double verify_ep(const SystemParams& params, const FieldPoint& field);

}  // namespace epx
