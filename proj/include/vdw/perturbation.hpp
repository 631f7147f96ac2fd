#pragma once

// Expansions of the single-plate potentials in powers of the susceptibilities
// chi_e(iu), chi_m(iu), the additivity identities relating thick and thin
// plates, and the expanded reflection coefficient of two thin plates.
//
// Channel weights are polynomials in x = (u/b)^2 with an extra 1/x term:
//   w(x) = c[0]/x + c[1] + c[2] x + c[3] x^2,
// always used as u^2 w = c[0] b^2 + u^2 (c[1] + c[2] x + c[3] x^2).

#include <array>
#include <cmath>
#include <stdexcept>
#include <string_view>

#include "vdw/materials.hpp"
#include "vdw/potential.hpp"
#include "vdw/quadrature.hpp"

namespace vdw {

enum class ExpansionGeometry { thick, thin, two_thin_plates };

inline std::string_view to_string(ExpansionGeometry g)
{
    switch (g) {
    case ExpansionGeometry::thick: return "thick";
    case ExpansionGeometry::thin: return "thin";
    case ExpansionGeometry::two_thin_plates: return "two-thin-plates";
    }
    return "?";
}

struct WeightPolynomial {
    std::array<double, 4> c{};

    [[nodiscard]] double times_u2(double u, double b) const noexcept
    {
        const double x = (u / b) * (u / b);
        return c[0] * b * b + u * u * (c[1] + x * (c[2] + x * c[3]));
    }
    [[nodiscard]] bool is_zero() const noexcept { return c == std::array<double, 4>{}; }
};

/// Weights of the chi_e, chi_m and chi_e chi_m channels. At first order the
/// first two multiply chi_e and chi_m; at second order chi_e^2 and chi_m^2.
struct ChannelWeights {
    WeightPolynomial e, m, em;
};

namespace weights {

inline constexpr ChannelWeights order1{{{1.0, -1.0, 0.5, 0.0}}, {{0.0, -1.0, 0.5, 0.0}}, {}};

inline constexpr ChannelWeights order2_thick{{{-0.5, 0.25, 0.25, -0.25}},
                                             {{0.0, 0.25, 0.25, -0.25}},
                                             {{0.0, -0.5, 1.0, -0.5}}};

inline constexpr ChannelWeights order2_thin{{{-0.5, 0.75, -0.25, 0.0}}, {{0.0, 0.25, -0.25, 0.0}}, {}};

inline constexpr ChannelWeights order2_pair{{{0.0, -0.5, 0.5, -0.25}},
                                            {{0.0, 0.0, 0.5, -0.25}},
                                            {{0.0, -0.5, 1.0, -0.5}}};

} // namespace weights

inline const ChannelWeights& channel_weights(int order, ExpansionGeometry g)
{
    if (order == 1) {
        if (g == ExpansionGeometry::two_thin_plates)
            throw std::invalid_argument("channel_weights: no first-order two-plate term");
        return weights::order1;
    }
    if (order == 2) {
        switch (g) {
        case ExpansionGeometry::thick: return weights::order2_thick;
        case ExpansionGeometry::thin: return weights::order2_thin;
        case ExpansionGeometry::two_thin_plates: return weights::order2_pair;
        }
    }
    throw std::invalid_argument("channel_weights: order must be 1 or 2");
}

struct ExpansionTerm {
    int order = 1;
    ExpansionGeometry geometry = ExpansionGeometry::thick;
    double value = 0.0;
    double error = 0.0;
    /// Contributions of the (e, m, em) channels; they sum to value.
    std::array<double, 3> channels{};
    ChannelWeights weights;
    bool converged = true;
};

namespace kernels {

/// h(u, b) = -alpha e^{-2b(z+s)} G(b) sum_k u^2 w_k chi-product_k, with
/// G = 1 (thick), 2 d b (thin), 4 d^2 b^2 (two thin plates).
class Expansion {
public:
    Expansion(AtomModel atom, MaterialModel m, int order, ExpansionGeometry g, double z, double d, double s)
        : atom_(std::move(atom)), m_(std::move(m)), order_(order), g_(g), w_(channel_weights(order, g)),
          z_(g == ExpansionGeometry::two_thin_plates ? z + s : z), d_(d) {}

    [[nodiscard]] double decay_length() const noexcept { return z_; }
    [[nodiscard]] double frequency_scale() const { return detail::lowest_frequency(atom_, m_.min_resonance()); }

    [[nodiscard]] auto slice(double u) const
    {
        const double alpha = atom_.alpha(u);
        const double ce = m_.chi_e(u), cm = m_.chi_m(u);
        const double pe = order_ == 1 ? ce : ce * ce;
        const double pm = order_ == 1 ? cm : cm * cm;
        const double pem = order_ == 1 ? 0.0 : ce * cm;
        const ChannelWeights w = w_;
        const ExpansionGeometry g = g_;
        const double z = z_, d = d_;
        return [=](double b, double) {
            double shape = -alpha * detail::decay(b, z);
            if (g == ExpansionGeometry::thin) shape *= 2.0 * d * b;
            else if (g == ExpansionGeometry::two_thin_plates) shape *= 4.0 * d * d * b * b;
            return Components{shape * pe * w.e.times_u2(u, b), shape * pm * w.m.times_u2(u, b),
                              shape * pem * w.em.times_u2(u, b), 0.0};
        };
    }

private:
    AtomModel atom_;
    MaterialModel m_;
    int order_;
    ExpansionGeometry g_;
    ChannelWeights w_;
    double z_, d_;
};

} // namespace kernels

namespace detail {

inline ExpansionTerm expansion_term(const AtomModel& atom, const MaterialModel& m, int order, ExpansionGeometry g,
                                    double z, double d, double s, const QuadratureSpec& spec_in)
{
    atom.require_valid();
    if (!(z > 0.0) || !std::isfinite(z)) throw InvalidStack("expansion: atom distance must be positive");
    if (g != ExpansionGeometry::thick && (!(d > 0.0) || !std::isfinite(d)))
        throw InvalidStack("expansion: thickness must be positive");
    if (g == ExpansionGeometry::two_thin_plates && (!(s >= 0.0) || !std::isfinite(s)))
        throw InvalidStack("expansion: separation must be non-negative");
    if (m.is_mirror()) throw InvalidModel("expansion: not defined for perfect mirrors");

    ExpansionTerm t;
    t.order = order;
    t.geometry = g;
    t.weights = channel_weights(order, g);
    if (m.is_vacuum()) return t;

    const QuadratureSpec spec = potential_quadrature(spec_in);
    const kernels::Expansion k(atom, m, order, g, z, d, s);
    const auto r = integrate_kernel(k, spec, resolve_mode(spec.mode, k.decay_length()));
    for (int c = 0; c < 3; ++c) t.channels[c] = kPotentialPrefactor * r.value[c];
    t.value = t.channels[0] + t.channels[1] + t.channels[2];
    t.error = kPotentialPrefactor * (r.error[0] + r.error[1] + r.error[2]);
    t.converged = r.converged;
    return t;
}

} // namespace detail

/// First-order term of the thick or thin plate potential.
inline ExpansionTerm expansion_order1(ExpansionGeometry g, const AtomModel& atom, const MaterialModel& m, double z,
                                      double d = 1.0, const QuadratureSpec& spec = {})
{
    if (g == ExpansionGeometry::two_thin_plates)
        throw std::invalid_argument("expansion_order1: the two-plate term starts at second order");
    return detail::expansion_term(atom, m, 1, g, z, d, 0.0, spec);
}

/// Second-order term: thick plate, thin plate, or the two-thin-plate
/// correlation correction at back-plate separation s.
inline ExpansionTerm expansion_order2(ExpansionGeometry g, const AtomModel& atom, const MaterialModel& m, double z,
                                      double d = 1.0, double s = 0.0, const QuadratureSpec& spec = {})
{
    return detail::expansion_term(atom, m, 2, g, z, d, s, spec);
}

struct IdentitySides {
    double lhs = 0.0;
    double rhs = 0.0;
    double lhs_error = 0.0;
    double rhs_error = 0.0;
    double residual = 0.0; ///< |lhs - rhs| / max(|lhs|, |rhs|); 0 when both vanish
    bool converged = true;
};

struct AdditivityReport {
    IdentitySides first;
    IdentitySides second;
    double second_thin_part = 0.0;        ///< stacked thin plates
    double second_correlation_part = 0.0; ///< two-plate correlation term
    double rel_tol = 0.0;
    double inner_rel_tol = 0.0;
};

namespace detail {

inline double relative_residual(double a, double b)
{
    const double scale = std::max(std::abs(a), std::abs(b));
    return scale == 0.0 ? 0.0 : std::abs(a - b) / scale;
}

} // namespace detail

/// Checks that the thick-plate expansion terms equal stacks of thin plates:
///   first order:  D1(z) = int_z^inf dz'/d D1_thin(z')
///   second order: D2(z) = int_z^inf dz'/d D2_thin(z')
///                         + int_z^inf dz'/d int_0^inf ds/d D2_pair(z', s)
/// Both right-hand sides are evaluated by outer quadrature over z' (and s).
inline AdditivityReport additivity_check(const AtomModel& atom, const MaterialModel& m, double z,
                                         const QuadratureSpec& spec = {})
{
    atom.require_valid();
    if (!(z > 0.0) || !std::isfinite(z)) throw InvalidStack("additivity_check: atom distance must be positive");
    AdditivityReport rep;
    rep.rel_tol = spec.rel_tol;
    rep.inner_rel_tol = spec.inner_rel_tol;
    if (m.is_vacuum()) return rep;

    constexpr double d = 1.0; // the thin terms are linear in d and divided by it
    using G = ExpansionGeometry;

    auto fill = [&](IdentitySides& side, const ExpansionTerm& lhs, double rhs, double rhs_err, bool ok) {
        side.lhs = lhs.value;
        side.lhs_error = lhs.error;
        side.rhs = rhs;
        side.rhs_error = rhs_err;
        side.converged = lhs.converged && ok;
        side.residual = detail::relative_residual(side.lhs, side.rhs);
    };

    // first order
    {
        bool ok = true;
        auto f = [&](double zp) {
            const auto t = expansion_order1(G::thin, atom, m, zp, d, spec);
            ok = ok && t.converged;
            return t.value / d;
        };
        const auto r = integrate_semi_infinite(f, z, spec, z);
        fill(rep.first, expansion_order1(G::thick, atom, m, z, d, spec), r.value, r.error_estimate,
             ok && r.converged);
    }
    // second order
    {
        bool ok = true;
        auto f = [&](double zp) {
            const auto t = expansion_order2(G::thin, atom, m, zp, d, 0.0, spec);
            ok = ok && t.converged;
            return t.value / d;
        };
        const auto thin = integrate_semi_infinite(f, z, spec, z);

        auto make = [&](double zp) {
            auto g = [&, zp](double s) {
                const auto t = expansion_order2(G::two_thin_plates, atom, m, zp, d, s, spec);
                ok = ok && t.converged;
                return std::array<double, 1>{t.value / (d * d)};
            };
            return std::pair{Range{0.0, zp}, std::move(g)};
        };
        const auto corr = integrate_nested<1>(make, Range{z, z}, spec);

        rep.second_thin_part = thin.value;
        rep.second_correlation_part = corr.value[0];
        fill(rep.second, expansion_order2(G::thick, atom, m, z, d, 0.0, spec), thin.value + corr.value[0],
             thin.error_estimate + corr.error[0], ok && thin.converged && corr.converged);
    }
    return rep;
}

// ---------------------------------------------------------------------------
// Two asymptotically thin plates (thickness d, back plate at separation s
// behind the front plate), as seen from the vacuum in front.

struct ThinPairReflection {
    /// Thin-plate forms linear in each thickness (front term plus back
    /// term with transmission bracket).
    double r_s = 0.0;
    double r_p = 0.0;
    /// Correlation part: linear in both thicknesses, second order in chi.
    double r_s_correlation = 0.0;
    double r_p_correlation = 0.0;
    /// Transmission brackets 1 - (X^2 b^2 + b_M^2) d / (X b) and the exact
    /// phase factor e^{-2 b_M d} they approximate.
    double bracket_s = 1.0;
    double bracket_p = 1.0;
    double phase = 1.0;
};

inline ThinPairReflection thin_pair_reflection_expansion(const MaterialModel& m, double d, double s, double u,
                                                         double q)
{
    if (!(d > 0.0) || !(s >= 0.0)) throw InvalidStack("thin_pair_reflection_expansion: invalid geometry");
    if (m.is_mirror()) throw InvalidModel("thin_pair_reflection_expansion: not defined for perfect mirrors");
    if (!(u >= 0.0) || !(q >= 0.0)) throw std::domain_error("thin_pair_reflection_expansion: negative argument");
    if (u == 0.0 && q == 0.0) throw DegeneratePoint("thin_pair_reflection_expansion: (u, q) = (0, 0)");

    const double ce = m.chi_e(u), cm = m.chi_m(u);
    const double a = ce + cm + ce * cm;
    const double b = std::hypot(u, q);
    const double bm2 = b * b + u * u * a;
    const double e2 = std::exp(-2.0 * b * s);

    auto single = [&](double chi) { // (X^2 b^2 - b_M^2) / (2 X b)
        return (b * b * chi * (2.0 + chi) - u * u * a) / (2.0 * (1.0 + chi) * b);
    };
    auto bracket = [&](double chi) {
        const double x = 1.0 + chi;
        return 1.0 - (x * x * b * b + bm2) * d / (x * b);
    };

    ThinPairReflection r;
    r.bracket_s = bracket(cm);
    r.bracket_p = bracket(ce);
    r.phase = std::exp(-2.0 * std::sqrt(bm2) * d);
    r.r_s = single(cm) * d + single(cm) * e2 * d * r.bracket_s;
    r.r_p = single(ce) * d + single(ce) * e2 * d * r.bracket_p;

    const double x = (u / b) * (u / b);
    const double pre = b * b * d * d * e2;
    r.r_s_correlation = pre * (0.5 * x * x * ce * ce - (x - 0.5 * x * x) * cm * cm - (x - x * x) * ce * cm);
    r.r_p_correlation = pre * (-(x - 0.5 * x * x) * ce * ce + 0.5 * x * x * cm * cm - (x - x * x) * ce * cm);
    return r;
}

} // namespace vdw
