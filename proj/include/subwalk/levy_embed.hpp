#pragma once

#include "subwalk/bernstein.hpp"
#include "subwalk/lattice.hpp"
#include "subwalk/rng.hpp"
#include "subwalk/subordination.hpp"

#include <complex>
#include <cstdint>
#include <vector>

namespace subwalk {

/// Compound-Poisson Levy triplet: drift-correction vector beta and the finite
/// jump measure nu on a truncated lattice box; Gaussian part identically zero.
struct LevyTriplet {
    int dimension = 1;
    std::vector<double> beta;
    LatticeDistribution nu;
    /// jump mass known to be missing from the box (mixture truncation,
    /// lattice truncation, quadrature cut-offs)
    double unaccounted = 0.0;
};

struct TripletComparison {
    double beta_distance = 0.0;    // max-norm
    double nu_tv_distance = 0.0;   // sum of |nu_a - nu_b| over the union box
    double mass_unaccounted = 0.0; // both triplets' reported losses
    double tolerance = 0.0;
    bool pass = false;
};

/// Triplet of the compound Poisson process with intensity q and jump law eta:
/// beta_j = -q * sum_{0 < |y| <= 1} y_j eta({y}) (Euclidean norm), nu = q*eta
/// restricted off the origin.
LevyTriplet cp_triplet_from_jump_law(double q, const LatticeDistribution& eta);

struct TripletOptions {
    /// step-weight truncation target for the hat route; the hat-side pointwise
    /// nu error behaves like 0.11/M, so the default keeps it below ~5e-7
    double mass_tol = 1.2e-3;
    std::size_t M_cap = 300'000;
    double s_budget_per_point = 1e-8; // tilde route: allowed s-integral tail per z
    double quad_rel_tol = 1e-9;       // tilde route: s-quadrature tolerance
};

/// Hat route: mixture weights first (t-integral per m), lattice sums second.
LevyTriplet triplet_hat(const BernsteinFunction& phi, const LatticeWalk& walk, double q,
                        int radius, const TripletOptions& opts = {});

/// Tilde route: the opposite integration order. Builds P(Z~_s = z) from the
/// Poisson series at each quadrature node s and integrates against mu in s.
/// Supported for the SRW in d = 1, 2.
LevyTriplet triplet_tilde(const BernsteinFunction& phi, const LatticeWalk& walk, double q,
                          int radius, const TripletOptions& opts = {});

TripletComparison compare_triplets(const LevyTriplet& a, const LevyTriplet& b,
                                   double tolerance);

// ---------------------------------------------------------------------------
// characteristic functions of the embedded processes at time t

struct ChfIdentity {
    double hat = 0.0;
    double tilde = 0.0;
    double truncation_budget = 0.0; // bound on the hat-side series tail
};

/// hat:   exp(-t q (1 - chi_xi(theta))) with chi_xi from the weight series,
/// tilde: exp(-t phi(q (1 - chi_zeta(theta)))) via eval_phi.
/// The two must agree within the reported budget.
ChfIdentity chf_exact(const StepDistribution& sd, const BernsteinFunction& phi,
                      const LatticeWalk& walk, double t,
                      const std::vector<double>& theta);

double chf_hat_exact(const StepDistribution& sd, const LatticeWalk& walk, double t,
                     const std::vector<double>& theta);
double chf_tilde_exact(const BernsteinFunction& phi, const LatticeWalk& walk, double q,
                       double t, const std::vector<double>& theta);

/// 1 - chf of one walk step, computed as sum p_z * 2 sin^2(theta.z/2) so no
/// precision is lost when theta is small. Requires a symmetric walk.
double one_minus_chf(const LatticeWalk& walk, const std::vector<double>& theta);

// ---------------------------------------------------------------------------
// Monte Carlo of the two embeddings

/// Endpoints of hat{X}_t = X_{N_t}: Poisson(qt) many subordinate steps.
std::vector<std::vector<std::int64_t>> simulate_hat(const StepDistribution& sd,
                                                    const LatticeWalk& walk, double t,
                                                    std::size_t paths, Rng rng);

/// Endpoints of tilde{X}_t = Z_{N_{T_t}} for the stable catalog exponent:
/// draw T_t, then Poisson(q T_t) SRW steps.
std::vector<std::vector<std::int64_t>> simulate_tilde(double alpha,
                                                      const LatticeWalk& walk, double q,
                                                      double t, std::size_t paths,
                                                      Rng rng);

} // namespace subwalk
