#pragma once

// Ground-state van der Waals potential U(z) of an atom in a planar
// multilayer and its special geometries.
//
// All geometries share one form,
//
//   U = 1/(8 pi^2) int_0^inf du int_u^inf db  h(u, b),
//
// where b is the vacuum axial wavenumber and q^2 = b^2 - u^2. A kernel supplies
// h for one geometry; the driver picks integration variables.
// Kernels return four components: {left, right, left without multiple
// reflections, right without multiple reflections}. "Left" is the term
// carrying e^{-2bz} (reflection from the layers on the left of the atom).

#include <array>
#include <cmath>
#include <numbers>
#include <string>
#include <utility>
#include <vector>

#include "vdw/materials.hpp"
#include "vdw/quadrature.hpp"
#include "vdw/stack.hpp"

namespace vdw {

using Components = std::array<double, 4>;

struct PotentialResult {
    double U = 0.0;
    double error = 0.0;
    double U_left = 0.0;
    double U_right = 0.0;
    /// U with every cavity denominator set to 1 (sum of single-wall terms).
    double U_nomr = 0.0;
    double tolerance = 0.0;
    long evaluations = 0;
    bool converged = true;
    Substitution mode = Substitution::automatic;
    std::vector<std::string> warnings;
};

inline constexpr double kPotentialPrefactor = 1.0 / (8.0 * std::numbers::pi * std::numbers::pi);

namespace detail {

inline double decay(double b, double z) noexcept
{
    const double x = 2.0 * b * z;
    return x > 745.0 ? 0.0 : std::exp(-x);
}

/// (X b - b_M) / (X b + b_M) for a vacuum/medium interface, X = 1 + chi,
/// written so that small chi keeps relative precision.
inline double fresnel(double chi, double a, double u, double b, double bm) noexcept
{
    const double x = 1.0 + chi;
    const double den = x * b + bm;
    return (b * b * chi * (2.0 + chi) - u * u * a) / (den * den);
}

inline double lowest_frequency(const AtomModel& atom, double material_min)
{
    const double wa = atom.min_frequency();
    return material_min > 0.0 ? std::min(wa, material_min) : wa;
}

} // namespace detail

namespace kernels {

/// Single interface: atom in vacuum at distance z from a semi-infinite medium.
class Halfspace {
public:
    Halfspace(AtomModel atom, MaterialModel m, double z) : atom_(std::move(atom)), m_(std::move(m)), z_(z) {}

    [[nodiscard]] double decay_length() const noexcept { return z_; }
    [[nodiscard]] double frequency_scale() const { return detail::lowest_frequency(atom_, m_.min_resonance()); }

    [[nodiscard]] auto slice(double u) const
    {
        const double alpha = atom_.alpha(u);
        const double ce = m_.chi_e(u), cm = m_.chi_m(u);
        const double a = ce + cm + ce * cm;
        const MirrorKind mk = m_.mirror();
        const double z = z_;
        return [=](double b, double q2) {
            double rs, rp;
            if (mk == MirrorKind::conducting) {
                rs = -1.0;
                rp = 1.0;
            } else if (mk == MirrorKind::permeable) {
                rs = 1.0;
                rp = -1.0;
            } else {
                const double bm = std::sqrt(b * b + u * u * a);
                rs = detail::fresnel(cm, a, u, b, bm);
                rp = detail::fresnel(ce, a, u, b, bm);
            }
            const double h = alpha * detail::decay(b, z) * (u * u * rs - (u * u + 2.0 * q2) * rp);
            return Components{h, 0.0, h, 0.0};
        };
    }

private:
    AtomModel atom_;
    MaterialModel m_;
    double z_;
};

/// Plate of thickness d with vacuum on both sides.
class Plate {
public:
    Plate(AtomModel atom, MaterialModel m, double d, double z)
        : atom_(std::move(atom)), m_(std::move(m)), d_(d), z_(z) {}

    [[nodiscard]] double decay_length() const noexcept { return z_; }
    [[nodiscard]] double frequency_scale() const { return detail::lowest_frequency(atom_, m_.min_resonance()); }

    [[nodiscard]] auto slice(double u) const
    {
        const double alpha = atom_.alpha(u);
        const double ce = m_.chi_e(u), cm = m_.chi_m(u);
        const double a = ce + cm + ce * cm;
        const double z = z_, d = d_;
        return [=](double b, double q2) {
            const double bm = std::sqrt(b * b + u * u * a);
            const double t = std::tanh(bm * d);
            auto r = [&](double chi) {
                const double x = 1.0 + chi;
                const double diff = b * b * chi * (2.0 + chi) - u * u * a; // X^2 b^2 - b_M^2
                const double sum = x * x * b * b + bm * bm;
                return diff * t / (2.0 * x * b * bm + sum * t);
            };
            const double h = alpha * detail::decay(b, z) * (u * u * r(cm) - (u * u + 2.0 * q2) * r(ce));
            return Components{h, 0.0, h, 0.0};
        };
    }

private:
    AtomModel atom_;
    MaterialModel m_;
    double d_, z_;
};

/// Plate linearised in its thickness (valid for n(0) d << z).
class ThinPlate {
public:
    ThinPlate(AtomModel atom, MaterialModel m, double d, double z)
        : atom_(std::move(atom)), m_(std::move(m)), d_(d), z_(z) {}

    [[nodiscard]] double decay_length() const noexcept { return z_; }
    [[nodiscard]] double frequency_scale() const { return detail::lowest_frequency(atom_, m_.min_resonance()); }

    [[nodiscard]] auto slice(double u) const
    {
        const double alpha = atom_.alpha(u);
        const double ce = m_.chi_e(u), cm = m_.chi_m(u);
        const double a = ce + cm + ce * cm;
        const double z = z_, d = d_;
        return [=](double b, double q2) {
            auto g = [&](double chi) {
                return (b * b * chi * (2.0 + chi) - u * u * a) / (2.0 * (1.0 + chi) * b);
            };
            const double h = alpha * d * detail::decay(b, z) * (u * u * g(cm) - (u * u + 2.0 * q2) * g(ce));
            return Components{h, 0.0, h, 0.0};
        };
    }

private:
    AtomModel atom_;
    MaterialModel m_;
    double d_, z_;
};

/// Atom in a vacuum gap of width s between two identical semi-infinite media.
class TwoPlates {
public:
    TwoPlates(AtomModel atom, MaterialModel m, double s, double z)
        : atom_(std::move(atom)), m_(std::move(m)), s_(s), z_(z) {}

    [[nodiscard]] double decay_length() const noexcept { return std::min(z_, s_ - z_); }
    [[nodiscard]] double frequency_scale() const { return detail::lowest_frequency(atom_, m_.min_resonance()); }

    [[nodiscard]] auto slice(double u) const
    {
        const double alpha = atom_.alpha(u);
        const double ce = m_.chi_e(u), cm = m_.chi_m(u);
        const double a = ce + cm + ce * cm;
        const MirrorKind mk = m_.mirror();
        const double z = z_, s = s_;
        return [=](double b, double q2) {
            // r and the cavity denominator 1 - r^2 e^{-2bs}; near-perfect
            // reflectors need D = (1-r)(1+r) + r^2 (1 - e^{-2bs}).
            const double g = -std::expm1(-2.0 * b * s);
            auto channel = [&](double chi, double mirror_r, double& r, double& D) {
                if (mk != MirrorKind::none) {
                    r = mirror_r;
                    D = g;
                    return;
                }
                const double bm = std::sqrt(b * b + u * u * a);
                const double x = 1.0 + chi;
                const double den = x * b + bm;
                r = detail::fresnel(chi, a, u, b, bm);
                D = (2.0 * bm / den) * (2.0 * x * b / den) + r * r * g;
            };
            double rs, Ds, rp, Dp;
            channel(cm, mk == MirrorKind::conducting ? -1.0 : 1.0, rs, Ds);
            channel(ce, mk == MirrorKind::conducting ? 1.0 : -1.0, rp, Dp);
            const double w = u * u + 2.0 * q2;
            const double el = alpha * detail::decay(b, z);
            const double er = alpha * detail::decay(b, s - z);
            const double full = u * u * rs / Ds - w * rp / Dp;
            const double single = u * u * rs - w * rp;
            return Components{el * full, er * full, el * single, er * single};
        };
    }

private:
    AtomModel atom_;
    MaterialModel m_;
    double s_, z_;
};

/// General stack through the reflection recursion.
class Multilayer {
public:
    Multilayer(AtomModel atom, LayerStack stack, double z)
        : atom_(std::move(atom)), stack_(std::move(stack)), z_(z) {}

    [[nodiscard]] double decay_length() const noexcept
    {
        return stack_.atom_in_interior() ? std::min(z_, stack_.atom_layer_thickness() - z_) : z_;
    }
    [[nodiscard]] double frequency_scale() const
    {
        return detail::lowest_frequency(atom_, stack_.min_resonance());
    }

    [[nodiscard]] auto slice(double u) const
    {
        const double alpha = atom_.alpha(u);
        const double z = z_;
        const bool interior = stack_.atom_in_interior();
        const double dj = interior ? stack_.atom_layer_thickness() : 0.0;
        return [=, sl = detail::StackSlice(stack_, u)](double b, double q2) {
            const ReflectionSet r = sl.at(b);
            const double w = u * u + 2.0 * q2;
            const double el = alpha * detail::decay(b, z);
            const double left = u * u * r.r_s_minus - w * r.r_p_minus;
            Components c{el * (u * u * r.r_s_minus / r.D_s - w * r.r_p_minus / r.D_p), 0.0, el * left, 0.0};
            if (interior) {
                const double er = alpha * detail::decay(b, dj - z);
                c[1] = er * (u * u * r.r_s_plus / r.D_s - w * r.r_p_plus / r.D_p);
                c[3] = er * (u * u * r.r_s_plus - w * r.r_p_plus);
            }
            return c;
        };
    }

private:
    AtomModel atom_;
    LayerStack stack_;
    double z_;
};

} // namespace kernels

inline Substitution resolve_mode(Substitution requested, double decay_length) noexcept
{
    if (requested != Substitution::automatic) return requested;
    return decay_length < 1.0 ? Substitution::nonretarded : Substitution::retarded;
}

/// Default settings for potential integrals: the outer integral accepts an
/// absolute floor of 1e-3 of the integrated magnitude, so that potentials
/// passing through zero still converge.
inline QuadratureSpec potential_quadrature(QuadratureSpec spec)
{
    if (spec.cancellation_floor == 0.0) spec.cancellation_floor = 1e-3;
    return spec;
}

/// Integrates h(u, b) of a kernel over the (u, b) domain in the requested
/// variables and returns the raw (unscaled) components.
template <class Kernel>
IntegralResultN<4> integrate_kernel(const Kernel& k, const QuadratureSpec& spec, Substitution mode)
{
    const double L = k.decay_length();
    const double wc = k.frequency_scale();
    const double inner_scale = 1.0 / (2.0 * L);
    const double u_scale = std::min(wc, inner_scale);

    switch (mode) {
    case Substitution::direct: {
        auto make = [&](double u) {
            auto g = [u, sl = k.slice(u)](double q) {
                const double b = std::hypot(u, q);
                Components c = sl(b, q * q);
                const double jac = q / b;
                for (auto& x : c) x *= jac;
                return c;
            };
            return std::pair{Range{0.0, inner_scale}, std::move(g)};
        };
        return integrate_nested<4>(make, Range{0.0, u_scale}, spec);
    }
    case Substitution::retarded: {
        const double v_scale = std::max(1.0, 1.0 / (2.0 * L * wc));
        auto make = [&](double v) {
            auto g = [&k, v](double u) {
                const double q2 = u * u * (v - 1.0) * (v + 1.0);
                Components c = k.slice(u)(u * v, q2);
                for (auto& x : c) x *= u;
                return c;
            };
            return std::pair{Range{0.0, std::min(wc, 1.0 / (2.0 * L * v))}, std::move(g)};
        };
        return integrate_nested<4>(make, Range{1.0, v_scale}, spec);
    }
    case Substitution::nonretarded:
    case Substitution::automatic: {
        auto make = [&](double u) {
            auto g = [u, sl = k.slice(u)](double b) { return sl(b, (b - u) * (b + u)); };
            return std::pair{Range{u, inner_scale}, std::move(g)};
        };
        return integrate_nested<4>(make, Range{0.0, u_scale}, spec);
    }
    }
    return {};
}

template <class Kernel>
PotentialResult evaluate_kernel(const Kernel& k, const QuadratureSpec& spec_in)
{
    const QuadratureSpec spec = potential_quadrature(spec_in);
    const Substitution mode = resolve_mode(spec.mode, k.decay_length());
    const auto r = integrate_kernel(k, spec, mode);

    PotentialResult out;
    out.U_left = kPotentialPrefactor * r.value[0];
    out.U_right = kPotentialPrefactor * r.value[1];
    out.U = out.U_left + out.U_right;
    out.U_nomr = kPotentialPrefactor * (r.value[2] + r.value[3]);
    out.error = kPotentialPrefactor * (r.error[0] + r.error[1]);
    out.tolerance = kPotentialPrefactor * r.tolerance;
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    out.mode = mode;
    if (!r.converged) out.warnings.emplace_back("quadrature did not reach the requested tolerance");
    return out;
}

inline void require_distance(double z, const char* what)
{
    if (!(z > 0.0) || !std::isfinite(z))
        throw InvalidStack(std::string(what) + ": atom distance must be positive and finite");
}

/// Potential in a general stack. For an atom in the leftmost layer the
/// stack is mirrored and z is measured from that layer's right boundary.
inline PotentialResult potential_multilayer(const LayerStack& stack, const AtomModel& atom, double z,
                                            const QuadratureSpec& spec = {})
{
    atom.require_valid();
    stack.check_position(z);
    if (stack.atom_layer() == 0) return potential_multilayer(stack.mirrored(), atom, z, spec);
    if (stack.all_vacuum()) {
        PotentialResult r;
        r.mode = resolve_mode(spec.mode, z);
        return r;
    }
    return evaluate_kernel(kernels::Multilayer(atom, stack, z), spec);
}

/// Atom at distance z from a perfect mirror. The permeable result is the
/// exact negative of the conducting one.
inline PotentialResult potential_mirror(const AtomModel& atom, double z, MirrorKind kind,
                                        const QuadratureSpec& spec = {})
{
    atom.require_valid();
    require_distance(z, "potential_mirror");
    if (kind == MirrorKind::none) throw std::invalid_argument("potential_mirror: mirror kind required");

    auto f = [&](double u) {
        const double x = u * z;
        return atom.alpha(u) * detail::decay(u, z) * (1.0 + 2.0 * x + 2.0 * x * x);
    };
    const double scale = std::min(atom.min_frequency(), 1.0 / (2.0 * z));
    const auto r = integrate_semi_infinite(f, 0.0, spec, scale);
    const double pre = -1.0 / (16.0 * std::numbers::pi * std::numbers::pi * z * z * z);

    PotentialResult out;
    out.U = pre * r.value;
    out.error = std::abs(pre) * r.error_estimate;
    out.tolerance = std::abs(pre) * r.tolerance;
    out.evaluations = r.evaluations;
    out.converged = r.converged;
    out.mode = Substitution::nonretarded;
    if (kind == MirrorKind::permeable) out.U = -out.U;
    out.U_left = out.U;
    out.U_nomr = out.U;
    if (!r.converged) out.warnings.emplace_back("quadrature did not reach the requested tolerance");
    return out;
}

inline PotentialResult potential_halfspace(const AtomModel& atom, const MaterialModel& material, double z,
                                           const QuadratureSpec& spec = {})
{
    atom.require_valid();
    require_distance(z, "potential_halfspace");
    if (material.is_mirror()) return potential_mirror(atom, z, material.mirror(), spec);
    if (material.is_vacuum()) return PotentialResult{};
    return evaluate_kernel(kernels::Halfspace(atom, material, z), spec);
}

inline PotentialResult potential_plate(const AtomModel& atom, const MaterialModel& material, double d,
                                       double z, const QuadratureSpec& spec = {})
{
    atom.require_valid();
    require_distance(z, "potential_plate");
    if (!(d > 0.0)) throw InvalidStack("potential_plate: thickness must be positive");
    if (material.is_mirror()) return potential_mirror(atom, z, material.mirror(), spec);
    if (material.is_vacuum()) return PotentialResult{};
    if (std::isinf(d)) return potential_halfspace(atom, material, z, spec);
    return evaluate_kernel(kernels::Plate(atom, material, d, z), spec);
}

/// Thin-plate potential, exactly linear in d. Warns when n(0) d / z > 0.1.
inline PotentialResult potential_thin_linearized(const AtomModel& atom, const MaterialModel& material,
                                                 double d, double z, const QuadratureSpec& spec = {})
{
    atom.require_valid();
    require_distance(z, "potential_thin_linearized");
    if (!(d > 0.0) || !std::isfinite(d)) throw InvalidStack("potential_thin_linearized: thickness must be positive");
    if (material.is_mirror()) throw InvalidModel("potential_thin_linearized: not defined for perfect mirrors");
    if (material.is_vacuum()) return PotentialResult{};
    // evaluated at unit thickness and scaled, so U(2d) = 2 U(d) holds exactly
    PotentialResult r = evaluate_kernel(kernels::ThinPlate(atom, material, 1.0, z), spec);
    for (double* v : {&r.U, &r.error, &r.U_left, &r.U_right, &r.U_nomr, &r.tolerance}) *v *= d;
    const double ratio = static_summary(material).n0 * d / z;
    if (ratio > 0.1)
        r.warnings.push_back("thin-plate linearization outside its range: n(0) d / z = " + std::to_string(ratio));
    return r;
}

/// Atom between two identical semi-infinite media separated by s.
inline PotentialResult potential_two_plates(const AtomModel& atom, const MaterialModel& material, double s,
                                            double z, const QuadratureSpec& spec = {})
{
    atom.require_valid();
    if (!(s > 0.0) || !std::isfinite(s)) throw InvalidStack("potential_two_plates: separation must be positive");
    if (!(z > 0.0 && z < s)) throw InvalidStack("potential_two_plates: atom must lie strictly between the plates");
    if (material.is_vacuum()) {
        PotentialResult r;
        r.mode = resolve_mode(spec.mode, std::min(z, s - z));
        return r;
    }
    return evaluate_kernel(kernels::TwoPlates(atom, material, s, z), spec);
}

} // namespace vdw
