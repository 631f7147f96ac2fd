#pragma once

// Adaptive Gauss-Kronrod (7/15) quadrature for finite and semi-infinite
// intervals, plus a nested driver for the two-dimensional (frequency,
// wavenumber) integrals.
//
// Integrands may be vector valued (std::array<double, N>); every component is
// integrated on the same panels, and the error control acts on the first
// `controlled` components.

#include <algorithm>
#include <array>
#include <cmath>
#include <cstddef>
#include <limits>
#include <queue>
#include <stdexcept>
#include <string>
#include <string_view>
#include <vector>

namespace vdw {

/// Integration variables used for the (u, q) plane.
enum class Substitution {
    automatic,   ///< nonretarded below z = 1, retarded above
    direct,      ///< (u, q)
    retarded,    ///< (v, u) with v = b/u
    nonretarded, ///< (u, b) with b >= u
};

inline std::string_view to_string(Substitution s)
{
    switch (s) {
    case Substitution::automatic: return "auto";
    case Substitution::direct: return "direct";
    case Substitution::retarded: return "retarded";
    case Substitution::nonretarded: return "nonretarded";
    }
    return "?";
}

inline Substitution substitution_from_string(std::string_view s)
{
    if (s == "auto") return Substitution::automatic;
    if (s == "direct") return Substitution::direct;
    if (s == "retarded") return Substitution::retarded;
    if (s == "nonretarded") return Substitution::nonretarded;
    throw std::invalid_argument("unknown quadrature mode '" + std::string(s) + "'");
}

struct QuadratureSpec {
    double rel_tol = 1e-7;       ///< outer (or single) integral
    double inner_rel_tol = 1e-8; ///< inner integral of a nested pair
    double abs_tol = 0.0;
    /// Absolute floor expressed as a fraction of the integral of |f| (times
    /// rel_tol). Stops cancelling integrands from chasing a relative target
    /// around a zero of the result.
    double cancellation_floor = 0.0;
    int max_subdivisions = 400;
    Substitution mode = Substitution::automatic;

    void validate() const
    {
        if (!(rel_tol > 0.0) || !(inner_rel_tol > 0.0))
            throw std::invalid_argument("quadrature: tolerances must be positive");
        if (!(abs_tol >= 0.0) || !(cancellation_floor >= 0.0))
            throw std::invalid_argument("quadrature: absolute tolerances must be non-negative");
        if (max_subdivisions < 1) throw std::invalid_argument("quadrature: max_subdivisions < 1");
    }
};

struct IntegralResult {
    double value = 0.0;
    double error_estimate = 0.0;
    long evaluations = 0;
    bool converged = true;
    /// Absolute error target that was in force, max(rel*|value|, floors).
    double tolerance = 0.0;
};

template <std::size_t N>
struct IntegralResultN {
    std::array<double, N> value{};
    std::array<double, N> error{};
    std::array<double, N> l1{};
    long evaluations = 0;
    bool converged = true;
    double tolerance = 0.0;

    [[nodiscard]] double max_error(std::size_t controlled = N) const noexcept
    {
        double e = 0.0;
        for (std::size_t k = 0; k < controlled; ++k) e = std::max(e, error[k]);
        return e;
    }
};

namespace detail {

// Kronrod abscissae (positive half) and weights, QUADPACK qk15.
inline constexpr std::array<double, 8> kXgk = {
    0.991455371120812639206854697526329, 0.949107912342758524526189684047851,
    0.864864423359769072789712788640926, 0.741531185599394439863864773280788,
    0.586087235467691130294144845693013, 0.405845151377397166906606412076961,
    0.207784955007898467600689403773245, 0.000000000000000000000000000000000};
inline constexpr std::array<double, 8> kWgk = {
    0.022935322010529224963732008058970, 0.063092092629978553290700663189204,
    0.104790010322250183839876322541518, 0.140653259715525918745189590510238,
    0.169004726639267902826583426598550, 0.190350578064785409913256402421014,
    0.204432940075298892414161999234649, 0.209482141084727828012999174891714};
inline constexpr std::array<double, 4> kWg = {
    0.129484966168869693270611432679082, 0.279705391489276667901467771423780,
    0.381830050505118944950369775488975, 0.417959183673469387755102040816327};

template <std::size_t N>
struct Panel {
    double a = 0.0;
    double b = 0.0;
    std::array<double, N> value{};
    std::array<double, N> error{};
    std::array<double, N> l1{};
    double norm = 0.0; // max error over controlled components
    long order = 0;    // creation order, tie breaker
};

template <std::size_t N, class F>
Panel<N> gk15(const F& f, double a, double b, std::size_t controlled)
{
    using V = std::array<double, N>;
    constexpr double epmach = std::numeric_limits<double>::epsilon();
    constexpr double uflow = std::numeric_limits<double>::min();

    const double centr = 0.5 * (a + b);
    const double hlgth = 0.5 * (b - a);
    const double dhlgth = std::abs(hlgth);

    std::array<V, 15> fv;
    fv[0] = f(centr);
    for (int j = 0; j < 7; ++j) {
        const double dx = hlgth * kXgk[j];
        fv[1 + 2 * j] = f(centr - dx);
        fv[2 + 2 * j] = f(centr + dx);
    }

    Panel<N> p;
    p.a = a;
    p.b = b;
    for (std::size_t k = 0; k < N; ++k) {
        const double fc = fv[0][k];
        double resg = fc * kWg[3];
        double resk = fc * kWgk[7];
        double resabs = std::abs(resk);
        for (int j = 0; j < 7; ++j) {
            const double f1 = fv[1 + 2 * j][k], f2 = fv[2 + 2 * j][k];
            resk += kWgk[j] * (f1 + f2);
            resabs += kWgk[j] * (std::abs(f1) + std::abs(f2));
            if (j % 2 == 1) resg += kWg[j / 2] * (f1 + f2);
        }
        const double reskh = resk * 0.5;
        double resasc = kWgk[7] * std::abs(fc - reskh);
        for (int j = 0; j < 7; ++j)
            resasc += kWgk[j] * (std::abs(fv[1 + 2 * j][k] - reskh) + std::abs(fv[2 + 2 * j][k] - reskh));

        const double result = resk * hlgth;
        resabs *= dhlgth;
        resasc *= dhlgth;
        double err = std::abs((resk - resg) * hlgth);
        if (resasc != 0.0 && err != 0.0) err = resasc * std::min(1.0, std::pow(200.0 * err / resasc, 1.5));
        if (resabs > uflow / (50.0 * epmach)) err = std::max(epmach * 50.0 * resabs, err);
        p.value[k] = result;
        p.error[k] = err;
        p.l1[k] = resabs;
    }
    for (std::size_t k = 0; k < controlled; ++k) p.norm = std::max(p.norm, p.error[k]);
    return p;
}

template <std::size_t N>
struct PanelLess {
    bool operator()(const Panel<N>& x, const Panel<N>& y) const noexcept
    {
        if (x.norm != y.norm) return x.norm < y.norm;
        return x.order > y.order;
    }
};

} // namespace detail

struct AdaptiveOptions {
    double rel_tol = 1e-8;
    double abs_tol = 0.0;
    double cancellation_floor = 0.0;
    int max_subdivisions = 400;
    std::size_t controlled = std::numeric_limits<std::size_t>::max();
};

/// Globally adaptive GK15 on [a, b]: the panel with the largest error is
/// bisected until the summed error meets the target.
template <std::size_t N, class F>
IntegralResultN<N> integrate_adaptive(const F& f, double a, double b, const AdaptiveOptions& opt)
{
    using P = detail::Panel<N>;
    const std::size_t controlled = std::min(opt.controlled, N);
    long order = 0;
    long evaluations = 0;

    std::priority_queue<P, std::vector<P>, detail::PanelLess<N>> heap;
    auto push = [&](double lo, double hi) {
        P p = detail::gk15<N>(f, lo, hi, controlled);
        p.order = order++;
        evaluations += 15;
        heap.push(p);
    };

    IntegralResultN<N> res;
    push(a, b);
    bool roundoff = false;
    for (;;) {
        std::array<double, N> sum{}, err{}, l1{};
        {
            // totals are re-summed each pass; panel counts stay small
            auto copy = heap;
            while (!copy.empty()) {
                const P& p = copy.top();
                for (std::size_t k = 0; k < N; ++k) {
                    sum[k] += p.value[k];
                    err[k] += p.error[k];
                    l1[k] += p.l1[k];
                }
                copy.pop();
            }
        }
        double vmax = 0.0, emax = 0.0, lmax = 0.0;
        for (std::size_t k = 0; k < controlled; ++k) {
            vmax = std::max(vmax, std::abs(sum[k]));
            emax = std::max(emax, err[k]);
            lmax = std::max(lmax, l1[k]);
        }
        const double tol = std::max({opt.abs_tol, opt.rel_tol * vmax,
                                     opt.rel_tol * opt.cancellation_floor * lmax});
        res.value = sum;
        res.error = err;
        res.l1 = l1;
        res.tolerance = tol;
        res.evaluations = evaluations;
        if (emax <= tol) {
            res.converged = true;
            return res;
        }
        if (static_cast<int>(heap.size()) >= opt.max_subdivisions || roundoff) {
            res.converged = false;
            return res;
        }
        P worst = heap.top();
        const double mid = 0.5 * (worst.a + worst.b);
        if (!(mid > worst.a && mid < worst.b) ||
            std::abs(worst.b - worst.a) <= 64.0 * std::numeric_limits<double>::epsilon() *
                                               std::max(std::abs(worst.a), std::abs(worst.b))) {
            roundoff = true;
            continue;
        }
        heap.pop();
        push(worst.a, mid);
        push(mid, worst.b);
    }
}

/// Integral over [a, infinity) after the map x = a + scale * t / (1 - t).
template <std::size_t N, class F>
IntegralResultN<N> integrate_semi_infinite_n(const F& f, double a, double scale,
                                             const AdaptiveOptions& opt)
{
    if (!(scale > 0.0) || !std::isfinite(scale))
        throw std::invalid_argument("integrate_semi_infinite: scale must be positive");
    auto g = [&](double t) {
        std::array<double, N> out{};
        if (t >= 1.0) return out;
        const double one_minus = 1.0 - t;
        const double x = a + scale * t / one_minus;
        if (!std::isfinite(x)) return out;
        const double jac = scale / (one_minus * one_minus);
        out = f(x);
        for (auto& v : out) v *= jac;
        return out;
    };
    return integrate_adaptive<N>(g, 0.0, 1.0, opt);
}

namespace detail {

template <class F>
auto as_array(const F& f)
{
    return [&f](double x) { return std::array<double, 1>{f(x)}; };
}

inline IntegralResult scalar_result(const IntegralResultN<1>& r)
{
    return {r.value[0], r.error[0], r.evaluations, r.converged, r.tolerance};
}

inline AdaptiveOptions options_from(const QuadratureSpec& spec, double rel_tol)
{
    spec.validate();
    AdaptiveOptions o;
    o.rel_tol = rel_tol;
    o.abs_tol = spec.abs_tol;
    o.cancellation_floor = spec.cancellation_floor;
    o.max_subdivisions = spec.max_subdivisions;
    return o;
}

} // namespace detail

/// Scalar integral over [a, b].
template <class F>
IntegralResult integrate_finite(const F& f, double a, double b, const QuadratureSpec& spec = {})
{
    return detail::scalar_result(
        integrate_adaptive<1>(detail::as_array(f), a, b, detail::options_from(spec, spec.rel_tol)));
}

/// Scalar integral over [a, infinity). `scale` is the length over which f
/// decays; nodes cluster within a few scales of a.
template <class F>
IntegralResult integrate_semi_infinite(const F& f, double a, const QuadratureSpec& spec = {},
                                       double scale = 1.0)
{
    return detail::scalar_result(integrate_semi_infinite_n<1>(
        detail::as_array(f), a, scale, detail::options_from(spec, spec.rel_tol)));
}

/// Lower limit and decay scale of one semi-infinite integration range.
struct Range {
    double lower = 0.0;
    double scale = 1.0;
};

/// Nested semi-infinite integral
///   int_{outer.lower}^inf dx  int_{inner(x).lower}^inf dy  f(x, y).
///
/// `make_inner(x)` returns a pair {Range, g} where g(y) yields the
/// std::array<double, N> integrand at (x, y). Inner integrals run at
/// spec.inner_rel_tol with an L1 floor; the reported error is the outer
/// estimate plus the integrated inner estimates.
template <std::size_t N, class MakeInner>
IntegralResultN<N> integrate_nested(const MakeInner& make_inner, Range outer, const QuadratureSpec& spec)
{
    spec.validate();
    AdaptiveOptions inner_opt = detail::options_from(spec, spec.inner_rel_tol);
    inner_opt.cancellation_floor = std::max(spec.cancellation_floor, 1.0);
    inner_opt.abs_tol = 0.0;
    AdaptiveOptions outer_opt = detail::options_from(spec, spec.rel_tol);
    outer_opt.controlled = N;

    long evaluations = 0;
    bool inner_ok = true;
    auto outer_f = [&](double x) {
        const auto [range, g] = make_inner(x);
        const auto r = integrate_semi_infinite_n<N>(g, range.lower, range.scale, inner_opt);
        evaluations += r.evaluations;
        inner_ok = inner_ok && r.converged;
        std::array<double, N + 1> out{};
        for (std::size_t k = 0; k < N; ++k) out[k] = r.value[k];
        out[N] = r.max_error();
        return out;
    };
    const auto o = integrate_semi_infinite_n<N + 1>(outer_f, outer.lower, outer.scale, outer_opt);

    IntegralResultN<N> res;
    for (std::size_t k = 0; k < N; ++k) {
        res.value[k] = o.value[k];
        res.error[k] = o.error[k] + std::abs(o.value[N]);
        res.l1[k] = o.l1[k];
    }
    res.evaluations = evaluations;
    res.converged = o.converged && inner_ok;
    res.tolerance = o.tolerance;
    return res;
}

} // namespace vdw
