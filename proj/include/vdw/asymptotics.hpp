#pragma once

// Asymptotic power-law coefficients of the single-plate potentials, the
// attraction/repulsion border in the (eps(0), mu(0)) plane, and estimates of
// the repulsive potential wall.
//
//   thick plate:  U ~ C4/z^4 (far),   U ~ -C3/z^3 + C1/z (near)
//   thin plate:   U ~ D5/z^5 (far),   U ~ -D4/z^4 + D2/z^2 (near)

#include <cmath>
#include <functional>
#include <limits>
#include <numbers>
#include <optional>
#include <stdexcept>
#include <string>
#include <string_view>
#include <utility>
#include <vector>

#include <boost/math/tools/minima.hpp>
#include <boost/math/tools/roots.hpp>

#include "vdw/materials.hpp"
#include "vdw/potential.hpp"
#include "vdw/quadrature.hpp"

namespace vdw {

enum class Regime { exact_integral, closed_form, weak_limit, strong_limit, not_applicable };

inline std::string_view to_string(Regime r)
{
    switch (r) {
    case Regime::exact_integral: return "exact-integral";
    case Regime::closed_form: return "closed-form";
    case Regime::weak_limit: return "weak-limit";
    case Regime::strong_limit: return "strong-limit";
    case Regime::not_applicable: return "not-applicable";
    }
    return "?";
}

struct Coefficient {
    double value = 0.0;
    double error = 0.0;
    Regime regime = Regime::exact_integral;
};

struct ThickCoeffs {
    Coefficient C4, C3, C1;
};

/// Thin-plate coefficients; each is proportional to the thickness d.
struct ThinCoeffs {
    Coefficient D5, D4, D2;
};

enum class PlateKind { thick, thin };

inline std::string_view to_string(PlateKind k) { return k == PlateKind::thick ? "thick" : "thin"; }

class NoWallScale : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

namespace detail {

inline constexpr double kPi2 = std::numbers::pi * std::numbers::pi;

/// int_1^inf dv [(2/v^2 - 1/v^4) r_p(v) - r_s(v)/v^4] from static eps, mu.
/// Equals 2 for a perfect conductor and 0 in vacuum.
inline IntegralResult c4_v_integral(double eps0, double mu0, const QuadratureSpec& spec)
{
    const double ce = eps0 - 1.0, cm = mu0 - 1.0;
    const double a = ce + cm + ce * cm;
    // v = 1/t turns the tail into a bounded integrand on (0, 1]
    auto f = [=](double t) {
        if (t <= 0.0) return 0.0;
        const double v = 1.0 / t;
        const double root = std::sqrt(a + v * v);
        auto r = [&](double chi) {
            const double den = (1.0 + chi) * v + root;
            return (v * v * chi * (2.0 + chi) - a) / (den * den);
        };
        const double t2 = t * t;
        return (2.0 - t2) * r(ce) - t2 * r(cm);
    };
    return integrate_finite(f, 0.0, 1.0, spec);
}

inline double frequency_scale(const AtomModel& atom, const MaterialModel& m)
{
    return lowest_frequency(atom, m.min_resonance());
}

template <class F>
IntegralResult u_integral(const F& f, const AtomModel& atom, const MaterialModel& m, const QuadratureSpec& spec)
{
    return integrate_semi_infinite(f, 0.0, spec, frequency_scale(atom, m));
}

} // namespace detail

/// C4, C3 and C1 for an atom in front of a semi-infinite medium.
inline ThickCoeffs coeff_thick(const AtomModel& atom, const MaterialModel& m, const QuadratureSpec& spec = {})
{
    atom.require_valid();
    using detail::kPi2;
    ThickCoeffs c;
    const double alpha0 = atom.alpha(0.0);
    const double c4pre = -3.0 * alpha0 / (64.0 * kPi2);

    if (m.is_mirror()) {
        const bool conducting = m.mirror() == MirrorKind::conducting;
        c.C4 = {c4pre * (conducting ? 2.0 : -2.0), 0.0, Regime::closed_form};
        if (conducting) {
            auto f = [&](double u) { return atom.alpha(u); };
            const auto r = detail::u_integral(f, atom, m, spec);
            c.C3 = {r.value / (16.0 * kPi2), r.error_estimate / (16.0 * kPi2), Regime::exact_integral};
        } else {
            c.C3 = {0.0, 0.0, Regime::not_applicable};
        }
        c.C1 = {0.0, 0.0, Regime::not_applicable};
        return c;
    }
    if (m.is_vacuum()) return c;

    const auto s = static_summary(m);
    const auto v = detail::c4_v_integral(s.eps0, s.mu0, spec);
    c.C4 = {c4pre * v.value, std::abs(c4pre) * v.error_estimate, Regime::exact_integral};

    auto f3 = [&](double u) {
        const double ce = m.chi_e(u);
        return atom.alpha(u) * ce / (2.0 + ce);
    };
    const auto r3 = detail::u_integral(f3, atom, m, spec);
    c.C3 = {r3.value / (16.0 * kPi2), r3.error_estimate / (16.0 * kPi2), Regime::exact_integral};

    auto f1 = [&](double u) {
        const double ce = m.chi_e(u), cm = m.chi_m(u);
        const double eps = 1.0 + ce;
        const double a = ce + cm + ce * cm;
        return u * u * atom.alpha(u) *
               (ce / (2.0 + ce) + cm / (2.0 + cm) + 2.0 * eps * a / ((eps + 1.0) * (eps + 1.0)));
    };
    const auto r1 = detail::u_integral(f1, atom, m, spec);
    c.C1 = {r1.value / (16.0 * kPi2), r1.error_estimate / (16.0 * kPi2), Regime::exact_integral};
    return c;
}

/// Bracket of the strong-response long-distance form as a function of the
/// static impedance Z; C4 = -3 alpha(0)/(64 pi^2) F(Z), F(0) = 2, F(inf) = -2.
inline double strong_limit_bracket(double Z)
{
    if (!(Z > 0.0)) throw std::domain_error("strong_limit_bracket: Z must be positive");
    const double l1 = std::log1p(Z), l2 = std::log1p(1.0 / Z);
    const double Z2 = Z * Z, Z3 = Z2 * Z;
    return -2.0 / Z3 * l1 + 2.0 / Z2 + 4.0 / Z * l1 - 1.0 / Z - 4.0 / 3.0 - Z + 2.0 * Z2 - 2.0 * Z3 * l2;
}

struct C4Limits {
    double weak = 0.0;   ///< linear in the static susceptibilities
    double strong = 0.0; ///< eps(0), mu(0) >> 1, function of Z only
};

inline C4Limits coeff_thick_limits(double eps0, double mu0, double alpha0)
{
    if (!(eps0 >= 1.0) || !(mu0 >= 1.0)) throw InvalidModel("coeff_thick_limits: eps0, mu0 must be >= 1");
    using detail::kPi2;
    C4Limits l;
    l.weak = -alpha0 / (640.0 * kPi2) * (23.0 * (eps0 - 1.0) - 7.0 * (mu0 - 1.0));
    l.strong = -3.0 * alpha0 / (64.0 * kPi2) * strong_limit_bracket(std::sqrt(mu0 / eps0));
    return l;
}

/// Static impedance at which the strong-response long-distance coefficient
/// changes sign.
inline double strong_limit_impedance()
{
    boost::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(
        [](double Z) { return strong_limit_bracket(Z); }, 0.5, 10.0,
        boost::math::tools::eps_tolerance<double>(50), iters);
    return 0.5 * (r.first + r.second);
}

/// D5 in closed form from the static response.
inline double coeff_d5(double eps0, double mu0, double alpha0, double d)
{
    return -alpha0 * d / (160.0 * detail::kPi2) * ((14.0 * eps0 * eps0 - 9.0) / eps0 - (6.0 * mu0 * mu0 - 1.0) / mu0);
}

/// D5, D4 and D2 for a plate of thickness d in the thin limit.
inline ThinCoeffs coeff_thin(const AtomModel& atom, const MaterialModel& m, double d, const QuadratureSpec& spec = {})
{
    atom.require_valid();
    if (!(d > 0.0) || !std::isfinite(d)) throw InvalidStack("coeff_thin: thickness must be positive");
    if (m.is_mirror()) throw InvalidModel("coeff_thin: not defined for perfect mirrors");
    using detail::kPi2;
    ThinCoeffs c;
    if (m.is_vacuum()) return c;

    const auto s = static_summary(m);
    c.D5 = {coeff_d5(s.eps0, s.mu0, atom.alpha(0.0), d), 0.0, Regime::closed_form};

    // (X^2 - 1)/X = chi (2 + chi)/(1 + chi)
    auto g = [](double chi) { return chi * (2.0 + chi) / (1.0 + chi); };
    auto f4 = [&](double u) { return atom.alpha(u) * g(m.chi_e(u)); };
    const auto r4 = detail::u_integral(f4, atom, m, spec);
    const double p4 = 3.0 * d / (64.0 * kPi2);
    c.D4 = {p4 * r4.value, p4 * r4.error_estimate, Regime::exact_integral};

    auto f2 = [&](double u) {
        const double ce = m.chi_e(u), cm = m.chi_m(u);
        const double a = ce + cm + ce * cm;
        return u * u * atom.alpha(u) * (g(ce) + g(cm) + 2.0 * a / (1.0 + ce));
    };
    const auto r2 = detail::u_integral(f2, atom, m, spec);
    const double p2 = d / (64.0 * kPi2);
    c.D2 = {p2 * r2.value, p2 * r2.error_estimate, Regime::exact_integral};
    return c;
}

// ---------------------------------------------------------------------------
// Border curve

struct BorderPoint {
    double eps0 = 1.0;
    std::optional<double> mu0; ///< empty when no root exists below 1e6
    Regime regime = Regime::exact_integral;
};

/// mu(0) on the thin-plate border, D5 = 0, for a given eps(0).
inline double thin_border_mu(double eps0)
{
    const double e2 = eps0 * eps0;
    return (14.0 * e2 - 9.0 + std::sqrt(196.0 * e2 * e2 - 228.0 * e2 + 81.0)) / (12.0 * eps0);
}

/// mu(0) with C4(eps0, mu0) = 0 for a thick plate, by bracketing and
/// toms748 refinement. Empty if the root is not bracketed below 1e6.
inline std::optional<double> thick_border_mu(double eps0, const QuadratureSpec& spec_in = {})
{
    if (!(eps0 >= 1.0) || !std::isfinite(eps0)) throw InvalidModel("border: eps(0) must be >= 1");
    QuadratureSpec spec = spec_in;
    spec.rel_tol = std::min(spec.rel_tol, 1e-12);
    spec.abs_tol = std::max(spec.abs_tol, 1e-15);
    // C4 is proportional to minus the v-integral
    auto g = [&](double mu) { return detail::c4_v_integral(eps0, mu, spec).value; };

    double lo = 1.0;
    const double glo = g(lo);
    if (glo == 0.0) return lo;
    if (glo < 0.0) return std::nullopt;
    double hi = 10.0 * std::max(eps0, 10.0);
    double ghi = g(hi);
    while (ghi > 0.0) {
        if (hi >= 1e6) return std::nullopt;
        lo = hi;
        hi = std::min(hi * 10.0, 1e6);
        ghi = g(hi);
    }
    boost::uintmax_t iters = 200;
    const auto r = boost::math::tools::toms748_solve(g, lo, hi, boost::math::tools::eps_tolerance<double>(44),
                                                     iters);
    return 0.5 * (r.first + r.second);
}

inline std::vector<BorderPoint> border_curve(PlateKind kind, const std::vector<double>& eps_grid,
                                             const QuadratureSpec& spec = {})
{
    std::vector<BorderPoint> out;
    out.reserve(eps_grid.size());
    for (double e : eps_grid) {
        if (!(e >= 1.0) || !std::isfinite(e)) throw InvalidModel("border: eps(0) grid values must be >= 1");
        if (kind == PlateKind::thin) out.push_back({e, thin_border_mu(e), Regime::closed_form});
        else out.push_back({e, thick_border_mu(e, spec), Regime::exact_integral});
    }
    return out;
}

/// Approximate border forms: weak response (slope 23/7 through the vacuum
/// point, common to both plate kinds) and strong response (mu/eps = Z^2 for
/// thick plates, 7/3 for thin ones).
inline double border_weak_mu(double eps0) { return 1.0 + 23.0 / 7.0 * (eps0 - 1.0); }

inline double border_strong_mu(PlateKind kind, double eps0)
{
    if (kind == PlateKind::thin) return 7.0 / 3.0 * eps0;
    const double Z = strong_limit_impedance();
    return Z * Z * eps0;
}

// ---------------------------------------------------------------------------
// Potential wall

enum class WallMethod { generic, two_level_closed_form, numeric };

inline std::string_view to_string(WallMethod m)
{
    switch (m) {
    case WallMethod::generic: return "generic";
    case WallMethod::two_level_closed_form: return "two-level-closed-form";
    case WallMethod::numeric: return "numeric";
    }
    return "?";
}

struct WallEstimate {
    bool exists = false;
    double z_max = 0.0;
    double U_max = 0.0;
    double error = 0.0;
    WallMethod method = WallMethod::generic;
    /// Two-level lossless closed forms, when the models allow them.
    std::optional<double> z_max_closed;
    std::optional<double> U_max_closed;
    /// Thin plates only: upper scale of the wall height for a thin plate.
    std::optional<double> U_max_bound;
    /// z_max times the highest material resonance; must be << 1.
    double short_distance_ratio = 0.0;
    std::vector<std::string> warnings;
};

struct TwoLevelWallForms {
    double z_max = 0.0;
    double U_max = 0.0;
    double U_bound = 0.0; // thin only
};

/// Closed forms for a two-level atom (w10, |d|^2) and a lossless single
/// resonance medium (wPe, wTe; wPm, wTm) with weak electric response.
inline TwoLevelWallForms two_level_wall(PlateKind kind, double w10, double dsq, double wPe, double wTe,
                                        double wPm, double wTm, double d = 1.0)
{
    const double pi = std::numbers::pi;
    const double common = (1.0 / wPm) * (wPe / wTe) * std::sqrt(wTe * (w10 + wTm) / (w10 * (w10 + wTe)));
    TwoLevelWallForms f;
    if (kind == PlateKind::thick) {
        const double wS = std::sqrt(wTm * wTm + 0.5 * wPm * wPm);
        f.z_max = common * std::sqrt(3.0 * (w10 + wS) / (2.0 * w10 + wS + wTm));
        const double br = w10 * (2.0 * w10 + wS + wTm) / (3.0 * (w10 + wS) * (w10 + wTm));
        f.U_max = dsq * wPm * wPm * wPm / (48.0 * pi) * (wTe / wPe) * std::sqrt((w10 + wTe) / wTe) *
                  std::pow(br, 1.5);
    } else {
        const double wL = std::sqrt(wTm * wTm + wPm * wPm);
        f.z_max = common * std::sqrt(12.0 * (w10 + wL) / (4.0 * w10 + 3.0 * wL + wTm));
        const double br = w10 * (4.0 * w10 + 3.0 * wL + wTm) / (2.0 * (w10 + wL) * (w10 + wTm));
        f.U_max = d * dsq * std::pow(wPm, 4) / (1152.0 * pi) * (wTe * wTe / (wPe * wPe)) * ((w10 + wTe) / wTe) *
                  br * br;
        const double br3 = w10 * (4.0 * w10 + 3.0 * wL + wTm) / (3.0 * (w10 + wL) * (w10 + wTm));
        f.U_bound = 3.0 * dsq * wPm * wPm * wPm / (768.0 * pi) * (wTe / wPe) * std::sqrt((w10 + wTe) / wTe) *
                    std::pow(br3, 1.5);
    }
    return f;
}

/// Wall position and height from the short-distance coefficients, with the
/// two-level closed forms alongside when applicable.
inline WallEstimate wall_estimate(PlateKind kind, const AtomModel& atom, const MaterialModel& m, double d = 1.0,
                                  const QuadratureSpec& spec = {})
{
    atom.require_valid();
    if (m.is_mirror()) throw NoWallScale("wall_estimate: perfect mirrors have no wall");
    WallEstimate w;
    w.method = WallMethod::generic;
    if (kind == PlateKind::thick) {
        const auto c = coeff_thick(atom, m, spec);
        if (!(c.C3.value > 0.0)) throw NoWallScale("wall_estimate: C3 = 0, no electric response");
        if (!(c.C1.value > 0.0)) throw NoWallScale("wall_estimate: C1 = 0, no repulsive short-range term");
        w.z_max = std::sqrt(3.0 * c.C3.value / c.C1.value);
        w.U_max = 2.0 / 3.0 * std::sqrt(c.C1.value * c.C1.value * c.C1.value / (3.0 * c.C3.value));
        w.exists = c.C4.value > 0.0;
    } else {
        const auto c = coeff_thin(atom, m, d, spec);
        if (!(c.D4.value > 0.0)) throw NoWallScale("wall_estimate: D4 = 0, no electric response");
        if (!(c.D2.value > 0.0)) throw NoWallScale("wall_estimate: D2 = 0, no repulsive short-range term");
        w.z_max = std::sqrt(2.0 * c.D4.value / c.D2.value);
        w.U_max = c.D2.value * c.D2.value / (4.0 * c.D4.value);
        w.exists = c.D5.value > 0.0;
    }
    if (!w.exists) w.warnings.emplace_back("long-range potential is attractive; no wall from the estimate");
    w.short_distance_ratio = w.z_max * m.max_resonance();
    if (w.short_distance_ratio > 0.1)
        w.warnings.emplace_back("wall is not at short distance compared with c/omega_M+");

    const auto& ts = atom.transitions();
    const auto& er = m.electric_resonances();
    const auto& mr = m.magnetic_resonances();
    if (ts.size() == 1 && er.size() == 1 && mr.size() == 1 && er[0].plasma_frequency > 0.0 &&
        mr[0].plasma_frequency > 0.0) {
        const auto f = two_level_wall(kind, ts[0].frequency, ts[0].dipole_sq, er[0].plasma_frequency,
                                      er[0].transverse_frequency, mr[0].plasma_frequency,
                                      mr[0].transverse_frequency, d);
        w.z_max_closed = f.z_max;
        w.U_max_closed = f.U_max;
        if (kind == PlateKind::thin) w.U_max_bound = f.U_bound;
        if (er[0].plasma_frequency > 0.1 * er[0].transverse_frequency ||
            er[0].plasma_frequency > 0.1 * mr[0].plasma_frequency)
            w.warnings.emplace_back("closed forms assume weak electric response");
        if (er[0].damping > 0.01 * er[0].transverse_frequency || mr[0].damping > 0.01 * mr[0].transverse_frequency)
            w.warnings.emplace_back("closed forms assume negligible absorption");
    }
    return w;
}

struct WallSearchOptions {
    double z_lo = 1e-3;
    double z_hi = 1e2;
    int points = 81;            ///< log-spaced scan points
    double rel_position_tol = 1e-4;
};

/// Global maximum of U on a log-spaced scan, refined by a bracketed
/// golden-section/parabolic search in log z. A wall exists when the maximum
/// exceeds ten times its quadrature error estimate.
inline WallEstimate wall_locate_numeric(const std::function<PotentialResult(double)>& potential,
                                        const WallSearchOptions& opt = {})
{
    if (!(opt.z_lo > 0.0) || !(opt.z_hi > opt.z_lo) || opt.points < 3)
        throw std::invalid_argument("wall_locate_numeric: invalid scan range");
    WallEstimate w;
    w.method = WallMethod::numeric;

    const double llo = std::log(opt.z_lo), lhi = std::log(opt.z_hi);
    std::vector<double> xs(opt.points);
    std::vector<std::optional<PotentialResult>> us(opt.points);
    int best = -1, valid = 0;
    for (int i = 0; i < opt.points; ++i) {
        xs[i] = llo + (lhi - llo) * i / (opt.points - 1);
        PotentialResult r = potential(std::exp(xs[i]));
        if (!r.converged) {
            w.warnings.push_back("scan point z = " + std::to_string(std::exp(xs[i])) + " skipped (not converged)");
            continue;
        }
        ++valid;
        if (best < 0 || r.U > us[best]->U) best = i;
        us[i] = std::move(r);
    }
    if (valid == 0) throw std::runtime_error("wall_locate_numeric: no scan point converged");

    const PotentialResult& top = *us[best];
    if (!(top.U > 0.0) || !(top.U > 10.0 * top.error)) {
        w.exists = false;
        w.z_max = std::exp(xs[best]);
        w.U_max = top.U;
        w.error = top.error;
        return w;
    }
    w.exists = true;
    if (best == 0 || best == opt.points - 1) {
        w.warnings.emplace_back("maximum lies on the scan boundary");
        w.z_max = std::exp(xs[best]);
        w.U_max = top.U;
        w.error = top.error;
        return w;
    }

    const double a = xs[best - 1], b = xs[best + 1];
    const int bits = static_cast<int>(std::ceil(-std::log2(opt.rel_position_tol))) + 1;
    boost::uintmax_t iters = 200;
    auto neg = [&](double x) { return -potential(std::exp(x)).U; };
    const auto [xmin, fmin] = boost::math::tools::brent_find_minima(neg, a, b, bits, iters);
    if (-fmin >= top.U) {
        w.z_max = std::exp(xmin);
        w.U_max = -fmin;
        w.error = potential(w.z_max).error;
    } else {
        w.z_max = std::exp(xs[best]);
        w.U_max = top.U;
        w.error = top.error;
    }
    return w;
}

} // namespace vdw
