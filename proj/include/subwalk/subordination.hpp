#pragma once

#include "subwalk/bernstein.hpp"
#include "subwalk/common.hpp"
#include "subwalk/lattice.hpp"
#include "subwalk/rng.hpp"

#include <cstdint>
#include <memory>
#include <vector>

namespace subwalk {

/// Mixture law of the subordinate step: with probability direct_atom the step
/// is one walk step, with probability w_m it is the sum of m walk steps,
///   w_m = q^{m-1}/m! * integral of t^m e^{-qt} mu(dt),
/// truncated at M terms with truncation_mass left unassigned.
struct StepDistribution {
    double q = 1.0;
    double direct_atom = 0.0;          // the drift coefficient b
    std::vector<double> weights;       // w_1..w_M
    double truncation_mass = 0.0;      // 1 - direct_atom - sum(weights)
    std::size_t M = 0;

    double total_assigned() const;
};

/// Thrown when M_cap is hit while more than mass_tol is still unassigned.
/// Carries the partial weights so callers may proceed deliberately.
struct TruncationError : Error {
    TruncationError(const std::string& msg, StepDistribution partial_)
        : Error(msg), partial(std::move(partial_)) {}
    StepDistribution partial;
};

struct StepWeightOptions {
    double mass_tol = 1e-10;
    std::size_t M_cap = 100'000;
    double quad_rel_tol = 1e-12;
    /// require |phi(q) - q| <= q * this
    double fixed_point_tol = 1e-8;
};

/// Build the step mixture for a phi with phi(q) = q (normalize first
/// otherwise). truncation_mass is estimated independently by integrating the
/// Poisson tail beyond M against mu, so that
/// direct_atom + sum(w) + truncation_mass reproduces phi(q)/q.
StepDistribution step_weights(const BernsteinFunction& phi, double q,
                              const StepWeightOptions& opts = {});

struct SubordinatePmf {
    LatticeDistribution law;     // P(xi_1 = z) on the box
    double weight_truncation;    // mass in mixture terms beyond M
    double lattice_loss;         // assigned mass landing outside the box
};

/// P(xi_1 = z) on |z|_inf <= radius: direct_atom * P(Z_1 = z) + sum of
/// w_m * P(Z_m = z). SRW in d=1/2 uses exact closed forms per term.
SubordinatePmf subordinate_step_pmf(const StepDistribution& sd, const LatticeWalk& walk,
                                    int radius);

// ---------------------------------------------------------------------------
// sampling

/// Walker alias table over the renormalized mixture {direct, m=1..M}.
class StepSampler {
  public:
    StepSampler(const StepDistribution& sd, const LatticeWalk& walk);

    /// number of walk steps composing one subordinate step (1 for the direct
    /// branch); renormalized by 1/(1 - truncation_mass)
    std::int64_t sample_count(Rng& rng) const;
    /// whether the previous contract is honest enough for sampling
    static void require_sampleable(const StepDistribution& sd, double mass_tol);

    /// one subordinate step xi
    LatticePoint sample(Rng& rng) const;

  private:
    LatticeWalk walk_;
    std::vector<double> accept_;
    std::vector<std::uint32_t> alias_;
};

/// Endpoint of m SRW steps in Z^d without walking them: binomial splitting
/// across axes, then 2*Binomial(m_j, 1/2) - m_j per axis. Supports the huge
/// step counts produced by heavy-tailed mixtures.
std::vector<std::int64_t> sample_srw_endpoint64(int d, std::int64_t m, Rng& rng);

/// Endpoint of m steps of an arbitrary finite walk (O(m), small m only).
LatticePoint sample_walk_endpoint(const LatticeWalk& walk, std::int64_t m, Rng& rng);

/// Exact step-count law for the stable exponent lambda^alpha: the mixture
/// weights have generating function 1-(1-z)^alpha, i.e. m is Sibuya(alpha),
/// sampled as a Beta(alpha,1-alpha)-mixed geometric. No truncation.
std::int64_t sample_sibuya(double alpha, Rng& rng);

/// One draw of T_t for the subordinator with E e^{-lambda T_t} = e^{-t lambda^alpha},
/// via the Kanter representation of the one-sided stable law.
double sample_stable_subordinator(double alpha, double t, Rng& rng);

/// Step-count sampler used by the scaled-process Monte Carlo: exact for the
/// stable catalog entry and for pure drift, truncated mixture otherwise.
class StepCountSampler {
  public:
    /// exact Sibuya(alpha)
    static StepCountSampler stable(double alpha);
    /// always one step
    static StepCountSampler drift();
    /// truncated mixture (bias <= truncation_mass, renormalized)
    static StepCountSampler mixture(const StepDistribution& sd, const LatticeWalk& walk);

    std::int64_t operator()(Rng& rng) const;
    bool exact() const { return exact_; }

  private:
    StepCountSampler() = default;
    double alpha_ = 0.0;
    bool exact_ = false;
    std::shared_ptr<StepSampler> mixture_;
};

} // namespace subwalk
