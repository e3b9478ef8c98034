#pragma once

#include <cstdint>
#include <map>
#include <vector>

namespace subwalk {

/// A lattice point in Z^d, d small.
using LatticePoint = std::vector<int>;

/// One-step law of a random walk on Z^d with finite support.
class LatticeWalk {
  public:
    LatticeWalk(int dimension, std::map<LatticePoint, double> step_pmf);

    /// simple symmetric random walk: mass 1/(2d) on each of +-e_j
    static LatticeWalk srw(int dimension);

    int dimension() const { return d_; }
    const std::map<LatticePoint, double>& step_pmf() const { return pmf_; }
    bool is_srw() const { return is_srw_; }
    /// pmf(z) == pmf(-z) for all z
    bool is_symmetric() const { return symmetric_; }
    /// max |coordinate| over the support
    int step_radius() const { return step_radius_; }

    /// characteristic function at theta (real; requires a symmetric walk)
    double chf(const std::vector<double>& theta) const;

  private:
    int d_;
    std::map<LatticePoint, double> pmf_;
    bool is_srw_ = false;
    bool symmetric_ = false;
    int step_radius_ = 0;
};

/// Sub-probability (or finite) measure on the box |z|_inf <= radius of Z^d,
/// stored densely. captured_mass tracks how much of the target measure the
/// box holds.
class LatticeDistribution {
  public:
    LatticeDistribution(int dimension, int radius);

    int dimension() const { return d_; }
    int radius() const { return radius_; }
    double captured_mass() const { return captured_; }
    void set_captured_mass(double m) { captured_ = m; }

    double& at(const LatticePoint& z);
    double at(const LatticePoint& z) const;
    bool contains(const LatticePoint& z) const;

    /// sum of all stored masses
    double total_mass() const;
    /// multiply every mass by a factor
    void scale(double factor);

    /// nonzero entries in lexicographic order (deterministic serialization)
    std::vector<std::pair<LatticePoint, double>> entries() const;

    const std::vector<double>& raw() const { return data_; }
    std::vector<double>& raw() { return data_; }
    std::size_t index_of(const LatticePoint& z) const;

  private:
    int d_;
    int radius_;
    double captured_ = 0.0;
    std::vector<double> data_;
};

struct SrwPmfOptions {
    /// memory guard: refuse dense supports bigger than this many entries
    std::size_t max_entries = 1u << 26;
    /// when the guard trips, truncate to this radius (<=0: derive from guard)
    int fallback_radius = 0;
};

/// Exact law of the m-step SRW position Z_m in Z^d. d=1 uses the binomial
/// closed form, d=2 the rotation into two independent 1d walks, d>=3 iterated
/// sparse convolution. If the support would exceed the memory guard, the
/// result is truncated and captured_mass < 1 reports the loss.
LatticeDistribution srw_pmf(int dimension, int m, const SrwPmfOptions& opts = {});

/// P(Z_m = k) for the 1d SRW; exact, 0 when parity mismatches.
double srw1d_point_pmf(std::int64_t m, std::int64_t k);

/// m-fold convolution of an arbitrary finite step law, truncated to the box
/// |z|_inf <= radius; mass walking outside the box is dropped (and reported
/// via captured_mass).
LatticeDistribution walk_pmf_convolved(const LatticeWalk& walk, int m, int radius);

} // namespace subwalk
