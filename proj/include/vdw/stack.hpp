#pragma once

// Planar multilayer geometry and generalized reflection coefficients.
//
// Layers are indexed 0..n from left to right; layers 0 and n are semi-infinite.
// The atom sits in the vacuum layer j at distance z from the left boundary of
// that layer (for j == 0, at distance z from its right boundary).

#include <cmath>
#include <limits>
#include <optional>
#include <stdexcept>
#include <string>
#include <utility>
#include <vector>

#include "vdw/materials.hpp"

namespace vdw {

class InvalidStack : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class DegeneratePoint : public std::domain_error {
public:
    using std::domain_error::domain_error;
};

inline constexpr double semi_infinite = std::numeric_limits<double>::infinity();

struct Layer {
    double thickness = semi_infinite;
    MaterialModel material;
};

class LayerStack {
public:
    LayerStack(std::vector<Layer> layers, std::size_t atom_layer)
        : layers_(std::move(layers)), atom_layer_(atom_layer)
    {
        if (layers_.size() < 2) throw InvalidStack("stack: at least two layers are required");
        const std::size_t n = layers_.size() - 1;
        if (atom_layer_ > n) throw InvalidStack("stack: atom layer index out of range");
        if (!std::isinf(layers_.front().thickness) || !std::isinf(layers_.back().thickness))
            throw InvalidStack("stack: outer layers must be semi-infinite");
        for (std::size_t l = 1; l < n; ++l) {
            const double d = layers_[l].thickness;
            if (!(d > 0.0) || !std::isfinite(d))
                throw InvalidStack("stack: interior layer " + std::to_string(l) +
                                   " needs a finite positive thickness");
        }
        if (!layers_[atom_layer_].material.is_vacuum())
            throw InvalidStack("stack: the atom layer must be vacuum");
    }

    /// Atom in vacuum at the right of a single semi-infinite medium.
    static LayerStack halfspace(const MaterialModel& m)
    {
        return LayerStack({{semi_infinite, m}, {semi_infinite, MaterialModel::vacuum()}}, 1);
    }

    /// Atom in vacuum at the right of a plate of thickness d, vacuum behind it.
    static LayerStack plate(const MaterialModel& m, double d)
    {
        return LayerStack({{semi_infinite, MaterialModel::vacuum()}, {d, m},
                           {semi_infinite, MaterialModel::vacuum()}},
                          2);
    }

    /// Atom in a vacuum gap of width s between two semi-infinite media.
    static LayerStack gap(const MaterialModel& left, double s, const MaterialModel& right)
    {
        return LayerStack({{semi_infinite, left}, {s, MaterialModel::vacuum()},
                           {semi_infinite, right}},
                          1);
    }

    [[nodiscard]] const std::vector<Layer>& layers() const noexcept { return layers_; }
    [[nodiscard]] std::size_t atom_layer() const noexcept { return atom_layer_; }
    [[nodiscard]] std::size_t last_index() const noexcept { return layers_.size() - 1; }
    [[nodiscard]] bool atom_in_interior() const noexcept
    {
        return atom_layer_ != 0 && atom_layer_ != last_index();
    }
    [[nodiscard]] double atom_layer_thickness() const noexcept
    {
        return layers_[atom_layer_].thickness;
    }

    /// Throws unless z is a valid atom position inside the atom layer.
    void check_position(double z) const
    {
        if (!(z > 0.0) || !std::isfinite(z))
            throw InvalidStack("stack: atom position must be positive and finite");
        if (atom_in_interior() && !(z < atom_layer_thickness()))
            throw InvalidStack("stack: atom position must lie strictly inside its layer");
    }

    /// Same physical system seen from the other side.
    [[nodiscard]] LayerStack mirrored() const
    {
        std::vector<Layer> rev(layers_.rbegin(), layers_.rend());
        return LayerStack(std::move(rev), last_index() - atom_layer_);
    }

    /// Lowest active resonance frequency in the stack (0 if none).
    [[nodiscard]] double min_resonance() const noexcept
    {
        double w = 0.0;
        for (const auto& l : layers_) {
            const double m = l.material.min_resonance();
            if (m > 0.0 && (w == 0.0 || m < w)) w = m;
        }
        return w;
    }

    [[nodiscard]] bool all_vacuum() const noexcept
    {
        for (const auto& l : layers_)
            if (!l.material.is_vacuum()) return false;
        return true;
    }

private:
    std::vector<Layer> layers_;
    std::size_t atom_layer_;
};

/// b = sqrt(u^2 eps(iu) mu(iu) + q^2); +infinity for a perfect mirror.
inline double axial_wavenumber(const MaterialModel& m, double u, double q)
{
    if (!(u >= 0.0) || !(q >= 0.0)) throw std::domain_error("axial_wavenumber: negative argument");
    if (u == 0.0 && q == 0.0) throw DegeneratePoint("axial_wavenumber: (u, q) = (0, 0)");
    if (m.is_mirror()) return std::numeric_limits<double>::infinity();
    const auto r = susceptibility_eval(m, u);
    return std::sqrt(u * u * r.eps * r.mu + q * q);
}

inline LayerStack duality_swap(const LayerStack& stack)
{
    std::vector<Layer> layers;
    layers.reserve(stack.layers().size());
    for (const auto& l : stack.layers()) layers.push_back({l.thickness, l.material.dual()});
    return LayerStack(std::move(layers), stack.atom_layer());
}

struct ReflectionSet {
    double r_s_minus = 0.0;
    double r_s_plus = 0.0;
    double r_p_minus = 0.0;
    double r_p_plus = 0.0;
    double D_s = 1.0;
    double D_p = 1.0;
};

namespace detail {

/// Per-layer response frozen at one imaginary frequency u.
struct LayerResponse {
    double chi_e = 0.0;
    double chi_m = 0.0;
    double eps_mu_minus_one = 0.0;
    double thickness = semi_infinite;
    MirrorKind mirror = MirrorKind::none;
};

class StackSlice {
public:
    StackSlice(const LayerStack& stack, double u) : u_(u), j_(stack.atom_layer())
    {
        layers_.reserve(stack.layers().size());
        for (const auto& l : stack.layers()) {
            LayerResponse lr;
            lr.thickness = l.thickness;
            lr.mirror = l.material.mirror();
            if (lr.mirror == MirrorKind::none) {
                lr.chi_e = l.material.chi_e(u);
                lr.chi_m = l.material.chi_m(u);
                lr.eps_mu_minus_one = lr.chi_e + lr.chi_m + lr.chi_e * lr.chi_m;
            }
            layers_.push_back(lr);
        }
    }

    /// Reflection set at the atom layer for vacuum wavenumber b >= u.
    [[nodiscard]] ReflectionSet at(double b) const
    {
        ReflectionSet out;
        const std::size_t n = layers_.size() - 1;
        // left side: r_{l-} for l = 1..j, seeded with r_{0-} = 0
        double rs = 0.0, rp = 0.0;
        for (std::size_t l = 1; l <= j_; ++l) step(l, l - 1, b, rs, rp);
        out.r_s_minus = rs;
        out.r_p_minus = rp;
        // right side: r_{l+} for l = n-1..j, seeded with r_{n+} = 0
        rs = rp = 0.0;
        for (std::size_t l = n; l-- > j_;) step(l, l + 1, b, rs, rp);
        out.r_s_plus = rs;
        out.r_p_plus = rp;
        if (j_ != 0 && j_ != n) {
            const double e = attenuation(b, layers_[j_].thickness);
            out.D_s = 1.0 - out.r_s_minus * out.r_s_plus * e;
            out.D_p = 1.0 - out.r_p_minus * out.r_p_plus * e;
        }
        return out;
    }

    [[nodiscard]] double u() const noexcept { return u_; }

private:
    [[nodiscard]] double wavenumber(const LayerResponse& lr, double b) const noexcept
    {
        return std::sqrt(b * b + u_ * u_ * lr.eps_mu_minus_one);
    }

    static double attenuation(double b, double d) noexcept
    {
        if (!std::isfinite(d)) return 0.0;
        const double x = 2.0 * b * d;
        return x > 700.0 ? 0.0 : std::exp(-x);
    }

    // (X_o b_i - X_i b_o) / (X_o b_i + X_i b_o) with X = 1 + chi. The numerator
    // is rewritten as (X_o^2 b_i^2 - X_i^2 b_o^2) / (X_o b_i + X_i b_o) so that
    // weak contrasts keep full relative precision.
    double interface_term(double chi_o, double chi_i, const LayerResponse& o,
                          const LayerResponse& in, double b, double bo, double bi) const noexcept
    {
        const double xo = 1.0 + chi_o, xi = 1.0 + chi_i;
        const double den = xo * bi + xi * bo;
        const double num = b * b * (chi_o - chi_i) * (2.0 + chi_o + chi_i) +
                           u_ * u_ * (xo * xo * in.eps_mu_minus_one - xi * xi * o.eps_mu_minus_one);
        return num / (den * den);
    }

    // Updates (rs, rp) from the coefficient of the outer neighbour to that of layer l.
    void step(std::size_t l, std::size_t outer, double b, double& rs, double& rp) const noexcept
    {
        const LayerResponse& o = layers_[outer];
        if (o.mirror == MirrorKind::conducting) {
            rs = -1.0;
            rp = 1.0;
            return;
        }
        if (o.mirror == MirrorKind::permeable) {
            rs = 1.0;
            rp = -1.0;
            return;
        }
        const LayerResponse& in = layers_[l];
        const double bo = wavenumber(o, b);
        const double bi = wavenumber(in, b);
        const double e = attenuation(bo, o.thickness);
        const double fs = interface_term(o.chi_m, in.chi_m, o, in, b, bo, bi);
        const double fp = interface_term(o.chi_e, in.chi_e, o, in, b, bo, bi);
        const double ers = e * rs, erp = e * rp;
        rs = (fs + ers) / (1.0 + fs * ers);
        rp = (fp + erp) / (1.0 + fp * erp);
    }

    double u_;
    std::size_t j_;
    std::vector<LayerResponse> layers_;
};

} // namespace detail

/// Generalized reflection coefficients r^sigma_{j+-} and cavity denominators
/// D^sigma_j at the atom layer.
inline ReflectionSet reflection_coefficients(const LayerStack& stack, double u, double q)
{
    if (!(u >= 0.0) || !(q >= 0.0))
        throw std::domain_error("reflection_coefficients: negative argument");
    if (u == 0.0 && q == 0.0) throw DegeneratePoint("reflection_coefficients: (u, q) = (0, 0)");
    return detail::StackSlice(stack, u).at(std::hypot(u, q));
}

} // namespace vdw
