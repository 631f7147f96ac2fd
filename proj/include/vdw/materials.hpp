#pragma once

// Dispersion models on the imaginary frequency axis.
//
// Every quantity here is evaluated at omega = i*u, where the permittivity,
// permeability and atomic polarizability are real, positive and smooth.
// Units are reduced: hbar = c = eps0 = 1, frequencies in units of a reference
// frequency, lengths in c/omega_ref, energies in hbar*omega_ref.

#include <algorithm>
#include <cmath>
#include <limits>
#include <numbers>
#include <stdexcept>
#include <string>
#include <vector>

namespace vdw {

class InvalidModel : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

class InvalidAtom : public std::invalid_argument {
public:
    using std::invalid_argument::invalid_argument;
};

/// One Drude-Lorentz oscillator, 1 + wp^2 / (wt^2 - w^2 - i w gamma).
struct Resonance {
    double plasma_frequency = 0.0;
    double transverse_frequency = 1.0;
    double damping = 0.0;

    void validate() const
    {
        if (!(transverse_frequency > 0.0) || !std::isfinite(transverse_frequency))
            throw InvalidModel("resonance: transverse frequency must be positive");
        if (!(plasma_frequency >= 0.0) || !std::isfinite(plasma_frequency))
            throw InvalidModel("resonance: plasma frequency must be non-negative");
        if (!(damping >= 0.0) || !std::isfinite(damping))
            throw InvalidModel("resonance: damping must be non-negative");
    }

    /// Contribution to the susceptibility at imaginary frequency u.
    [[nodiscard]] double susceptibility(double u) const noexcept
    {
        const double wt = transverse_frequency;
        return plasma_frequency * plasma_frequency / (wt * wt + u * u + damping * u);
    }

    [[nodiscard]] double static_susceptibility() const noexcept
    {
        return susceptibility(0.0);
    }
};

/// Idealised limits of a layer: eps -> infinity or mu -> infinity.
enum class MirrorKind { none, conducting, permeable };

struct Response {
    double eps = 1.0;
    double mu = 1.0;
};

struct StaticSummary {
    double eps0 = 1.0;
    double mu0 = 1.0;
    double n0 = 1.0;
    double impedance = 1.0;
    double chi_e0 = 0.0;
    double chi_m0 = 0.0;
};

class MaterialModel {
public:
    MaterialModel() = default;

    MaterialModel(std::vector<Resonance> electric, std::vector<Resonance> magnetic)
        : electric_(std::move(electric)), magnetic_(std::move(magnetic))
    {
        for (const auto& r : electric_) r.validate();
        for (const auto& r : magnetic_) r.validate();
    }

    static MaterialModel vacuum() { return {}; }

    static MaterialModel electric(double wp, double wt, double gamma = 0.0)
    {
        return MaterialModel({Resonance{wp, wt, gamma}}, {});
    }

    static MaterialModel magnetic(double wp, double wt, double gamma = 0.0)
    {
        return MaterialModel({}, {Resonance{wp, wt, gamma}});
    }

    static MaterialModel magnetodielectric(Resonance e, Resonance m)
    {
        return MaterialModel({e}, {m});
    }

    static MaterialModel perfect(MirrorKind kind)
    {
        MaterialModel m;
        m.mirror_ = kind;
        return m;
    }

    [[nodiscard]] const std::vector<Resonance>& electric_resonances() const noexcept { return electric_; }
    [[nodiscard]] const std::vector<Resonance>& magnetic_resonances() const noexcept { return magnetic_; }
    [[nodiscard]] MirrorKind mirror() const noexcept { return mirror_; }
    [[nodiscard]] bool is_mirror() const noexcept { return mirror_ != MirrorKind::none; }

    [[nodiscard]] bool is_vacuum() const noexcept
    {
        auto inert = [](const std::vector<Resonance>& v) {
            return std::all_of(v.begin(), v.end(),
                               [](const Resonance& r) { return r.plasma_frequency == 0.0; });
        };
        return !is_mirror() && inert(electric_) && inert(magnetic_);
    }

    [[nodiscard]] bool has_electric_response() const noexcept
    {
        return mirror_ == MirrorKind::conducting ||
               std::any_of(electric_.begin(), electric_.end(),
                           [](const Resonance& r) { return r.plasma_frequency > 0.0; });
    }

    [[nodiscard]] bool has_magnetic_response() const noexcept
    {
        return mirror_ == MirrorKind::permeable ||
               std::any_of(magnetic_.begin(), magnetic_.end(),
                           [](const Resonance& r) { return r.plasma_frequency > 0.0; });
    }

    [[nodiscard]] double chi_e(double u) const noexcept { return sum(electric_, u); }
    [[nodiscard]] double chi_m(double u) const noexcept { return sum(magnetic_, u); }

    /// Electric and magnetic resonance lists exchanged.
    [[nodiscard]] MaterialModel dual() const
    {
        MaterialModel m(magnetic_, electric_);
        if (mirror_ == MirrorKind::conducting) m.mirror_ = MirrorKind::permeable;
        else if (mirror_ == MirrorKind::permeable) m.mirror_ = MirrorKind::conducting;
        return m;
    }

    /// Smallest and largest transverse frequency over all active resonances
    /// (0 when there are none).
    [[nodiscard]] double min_resonance() const noexcept
    {
        double w = std::numeric_limits<double>::infinity();
        for (const auto* list : {&electric_, &magnetic_})
            for (const auto& r : *list)
                if (r.plasma_frequency > 0.0) w = std::min(w, r.transverse_frequency);
        return std::isfinite(w) ? w : 0.0;
    }

    [[nodiscard]] double max_resonance() const noexcept
    {
        double w = 0.0;
        for (const auto* list : {&electric_, &magnetic_})
            for (const auto& r : *list)
                if (r.plasma_frequency > 0.0) w = std::max(w, r.transverse_frequency);
        return w;
    }

private:
    static double sum(const std::vector<Resonance>& list, double u) noexcept
    {
        double chi = 0.0;
        for (const auto& r : list) chi += r.susceptibility(u);
        return chi;
    }

    std::vector<Resonance> electric_;
    std::vector<Resonance> magnetic_;
    MirrorKind mirror_ = MirrorKind::none;
};

/// (eps(iu), mu(iu)). Perfect mirrors report +infinity in the divergent channel.
inline Response susceptibility_eval(const MaterialModel& model, double u)
{
    if (!(u >= 0.0)) throw std::domain_error("susceptibility_eval: u must be non-negative");
    constexpr double inf = std::numeric_limits<double>::infinity();
    switch (model.mirror()) {
    case MirrorKind::conducting: return {inf, 1.0};
    case MirrorKind::permeable: return {1.0, inf};
    case MirrorKind::none: break;
    }
    return {1.0 + model.chi_e(u), 1.0 + model.chi_m(u)};
}

inline StaticSummary static_summary(const MaterialModel& model)
{
    const auto r = susceptibility_eval(model, 0.0);
    StaticSummary s;
    s.eps0 = r.eps;
    s.mu0 = r.mu;
    s.n0 = std::sqrt(r.eps * r.mu);
    s.impedance = std::sqrt(r.mu / r.eps);
    s.chi_e0 = r.eps - 1.0;
    s.chi_m0 = r.mu - 1.0;
    return s;
}

struct Transition {
    double frequency = 1.0;
    double dipole_sq = 1.0;
};

class AtomModel {
public:
    AtomModel() = default;

    explicit AtomModel(std::vector<Transition> transitions) : transitions_(std::move(transitions))
    {
        for (const auto& t : transitions_) {
            if (!(t.frequency > 0.0) || !std::isfinite(t.frequency))
                throw InvalidAtom("atom: transition frequency must be positive");
            if (!(t.dipole_sq >= 0.0) || !std::isfinite(t.dipole_sq))
                throw InvalidAtom("atom: squared dipole moment must be non-negative");
        }
    }

    static AtomModel two_level(double frequency = 1.0, double dipole_sq = 1.0)
    {
        return AtomModel({Transition{frequency, dipole_sq}});
    }

    [[nodiscard]] const std::vector<Transition>& transitions() const noexcept { return transitions_; }
    [[nodiscard]] bool empty() const noexcept { return transitions_.empty(); }

    void require_valid() const
    {
        if (transitions_.empty()) throw InvalidAtom("atom: no transitions");
    }

    [[nodiscard]] double min_frequency() const
    {
        require_valid();
        double w = transitions_.front().frequency;
        for (const auto& t : transitions_) w = std::min(w, t.frequency);
        return w;
    }

    [[nodiscard]] double max_frequency() const
    {
        require_valid();
        double w = transitions_.front().frequency;
        for (const auto& t : transitions_) w = std::max(w, t.frequency);
        return w;
    }

    /// Sum of |d_0k|^2, i.e. <0|d^2|0>.
    [[nodiscard]] double total_dipole_sq() const noexcept
    {
        double s = 0.0;
        for (const auto& t : transitions_) s += t.dipole_sq;
        return s;
    }

    /// Unchecked alpha(iu); callers validate once up front.
    [[nodiscard]] double alpha(double u) const noexcept
    {
        double a = 0.0;
        for (const auto& t : transitions_)
            a += t.frequency * t.dipole_sq / (t.frequency * t.frequency + u * u);
        return 2.0 / 3.0 * a;
    }

private:
    std::vector<Transition> transitions_;
};

/// Ground-state polarizability alpha(iu) = (2/3) sum_k w_k |d_k|^2 / (w_k^2 + u^2).
inline double polarizability_eval(const AtomModel& atom, double u)
{
    atom.require_valid();
    if (!(u >= 0.0)) throw std::domain_error("polarizability_eval: u must be non-negative");
    return atom.alpha(u);
}

} // namespace vdw
