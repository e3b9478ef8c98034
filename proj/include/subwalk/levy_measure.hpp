#pragma once

#include "subwalk/quadrature.hpp"

#include <functional>
#include <optional>
#include <utility>
#include <vector>

namespace subwalk {

/// Measure mu on (0,infinity) with a density part, optional atoms and an
/// optional analytic tail t -> mu(t,inf). Must integrate (1 ^ s).
///
/// Integration strategy: the density part is split at split_point; the piece
/// on (0,split] is integrated in u with t = split*e^{-u} and the piece on
/// (split,inf) with t = split*e^{u}. Chunks of growing length are added until
/// their contribution is negligible, each chunk handled by adaptive G7K15.
/// This tames densities blowing up like t^{-1-alpha} at zero.
class LevyMeasure {
  public:
    using Density = std::function<double(double)>;
    using Tail = std::function<double(double)>;

    struct Atom {
        double location; // > 0
        double mass;     // > 0
    };

    LevyMeasure() = default; // zero measure
    explicit LevyMeasure(Density density, std::vector<Atom> atoms = {},
                         std::optional<Tail> tail_analytic = std::nullopt,
                         double split_point = 1.0);

    static LevyMeasure zero() { return LevyMeasure(); }

    bool is_zero() const { return !density_ && atoms_.empty(); }
    const std::vector<Atom>& atoms() const { return atoms_; }
    double split_point() const { return split_point_; }
    bool has_analytic_tail() const { return tail_.has_value(); }

    /// integral of f against mu (density + atoms), with optional breakpoints
    /// in t marking narrow features of f.
    QuadResult integrate(const std::function<double(double)>& f,
                         const QuadOptions& opts = {},
                         const std::vector<double>& t_breakpoints = {}) const;

    /// mu(t, infinity): analytic tail when present, else quadrature.
    double tail_mass(double t, const QuadOptions& opts = {}) const;
    /// same but always by quadrature (used to validate an analytic tail)
    double tail_mass_by_quadrature(double t, const QuadOptions& opts = {}) const;

    /// integral of s against mu over (0, r]
    double truncated_first_moment(double r, const QuadOptions& opts = {}) const;

    /// integral of (1 ^ s) mu(ds), computed at construction
    double one_wedge_mass() const { return one_wedge_mass_; }
    double one_wedge_mass_error() const { return one_wedge_err_; }

    /// Scale all mass by a positive factor (drifts are handled by the caller).
    LevyMeasure scaled(double factor) const;

  private:
    void validate();

    Density density_;
    std::vector<Atom> atoms_;
    std::optional<Tail> tail_;
    double split_point_ = 1.0;
    double one_wedge_mass_ = 0.0;
    double one_wedge_err_ = 0.0;
};

} // namespace subwalk
