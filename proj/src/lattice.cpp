#include "subwalk/lattice.hpp"

#include "subwalk/common.hpp"

#include <algorithm>
#include <cmath>

namespace subwalk {

LatticeWalk::LatticeWalk(int dimension, std::map<LatticePoint, double> step_pmf)
    : d_(dimension), pmf_(std::move(step_pmf)) {
    if (d_ < 1) throw DomainError("walk dimension must be >= 1");
    double total = 0.0;
    for (const auto& [z, p] : pmf_) {
        if (static_cast<int>(z.size()) != d_)
            throw DomainError("walk support point has wrong dimension");
        if (p < 0.0) throw DomainError("walk step mass must be nonnegative");
        total += p;
        for (int c : z) step_radius_ = std::max(step_radius_, std::abs(c));
    }
    if (std::fabs(total - 1.0) > 1e-12)
        throw DomainError("walk step masses must sum to 1");

    symmetric_ = true;
    for (const auto& [z, p] : pmf_) {
        LatticePoint neg(z);
        for (int& c : neg) c = -c;
        auto it = pmf_.find(neg);
        if (it == pmf_.end() || std::fabs(it->second - p) > 1e-15) {
            symmetric_ = false;
            break;
        }
    }

    if (pmf_.size() == static_cast<std::size_t>(2 * d_)) {
        is_srw_ = true;
        const double w = 1.0 / (2.0 * d_);
        for (int j = 0; j < d_ && is_srw_; ++j) {
            for (int sign : {-1, 1}) {
                LatticePoint e(d_, 0);
                e[j] = sign;
                auto it = pmf_.find(e);
                if (it == pmf_.end() || std::fabs(it->second - w) > 1e-15) is_srw_ = false;
            }
        }
    }
}

LatticeWalk LatticeWalk::srw(int dimension) {
    if (dimension < 1) throw DomainError("walk dimension must be >= 1");
    std::map<LatticePoint, double> pmf;
    const double w = 1.0 / (2.0 * dimension);
    for (int j = 0; j < dimension; ++j) {
        for (int sign : {-1, 1}) {
            LatticePoint e(dimension, 0);
            e[j] = sign;
            pmf[e] = w;
        }
    }
    return LatticeWalk(dimension, std::move(pmf));
}

double LatticeWalk::chf(const std::vector<double>& theta) const {
    if (static_cast<int>(theta.size()) != d_)
        throw DomainError("chf: theta has wrong dimension");
    if (!symmetric_) throw DomainError("chf: walk must be symmetric");
    double v = 0.0;
    for (const auto& [z, p] : pmf_) {
        double dot = 0.0;
        for (int j = 0; j < d_; ++j) dot += theta[j] * z[j];
        v += p * std::cos(dot);
    }
    return v;
}

// ---------------------------------------------------------------------------

LatticeDistribution::LatticeDistribution(int dimension, int radius)
    : d_(dimension), radius_(radius) {
    if (d_ < 1 || radius_ < 0) throw DomainError("bad lattice distribution shape");
    std::size_t n = 1;
    const std::size_t side = static_cast<std::size_t>(2 * radius_ + 1);
    for (int j = 0; j < d_; ++j) {
        if (n > (1ull << 40) / side) throw DomainError("lattice box too large");
        n *= side;
    }
    data_.assign(n, 0.0);
}

std::size_t LatticeDistribution::index_of(const LatticePoint& z) const {
    std::size_t idx = 0;
    const std::size_t side = static_cast<std::size_t>(2 * radius_ + 1);
    for (int j = 0; j < d_; ++j) {
        const int c = z[j];
        idx = idx * side + static_cast<std::size_t>(c + radius_);
    }
    return idx;
}

bool LatticeDistribution::contains(const LatticePoint& z) const {
    if (static_cast<int>(z.size()) != d_) return false;
    for (int c : z)
        if (std::abs(c) > radius_) return false;
    return true;
}

double& LatticeDistribution::at(const LatticePoint& z) {
    if (!contains(z)) throw DomainError("lattice point outside box");
    return data_[index_of(z)];
}

double LatticeDistribution::at(const LatticePoint& z) const {
    if (!contains(z)) return 0.0;
    return data_[index_of(z)];
}

double LatticeDistribution::total_mass() const {
    double s = 0.0;
    for (double v : data_) s += v;
    return s;
}

void LatticeDistribution::scale(double factor) {
    for (double& v : data_) v *= factor;
    captured_ *= factor;
}

std::vector<std::pair<LatticePoint, double>> LatticeDistribution::entries() const {
    std::vector<std::pair<LatticePoint, double>> out;
    LatticePoint z(d_, -radius_);
    const std::size_t n = data_.size();
    for (std::size_t idx = 0; idx < n; ++idx) {
        if (data_[idx] != 0.0) out.emplace_back(z, data_[idx]);
        // odometer increment, last coordinate fastest
        for (int j = d_ - 1; j >= 0; --j) {
            if (++z[j] <= radius_) break;
            z[j] = -radius_;
        }
    }
    return out;
}

// ---------------------------------------------------------------------------

double srw1d_point_pmf(std::int64_t m, std::int64_t k) {
    if (std::llabs(k) > m) return 0.0;
    if ((m + k) % 2 != 0) return 0.0;
    if (m == 0) return 1.0;
    const double up = static_cast<double>((m + k) / 2);
    const double lg = std::lgamma(static_cast<double>(m) + 1.0) -
                      std::lgamma(up + 1.0) -
                      std::lgamma(static_cast<double>(m) - up + 1.0) -
                      static_cast<double>(m) * std::log(2.0);
    return std::exp(lg);
}

LatticeDistribution walk_pmf_convolved(const LatticeWalk& walk, int m, int radius) {
    LatticeDistribution acc(walk.dimension(), radius);
    acc.at(LatticePoint(walk.dimension(), 0)) = 1.0;
    const auto& step = walk.step_pmf();
    for (int iter = 0; iter < m; ++iter) {
        LatticeDistribution next(walk.dimension(), radius);
        for (const auto& [z, p] : acc.entries()) {
            for (const auto& [s, ps] : step) {
                LatticePoint t(z);
                for (int j = 0; j < walk.dimension(); ++j) t[j] += s[j];
                if (next.contains(t)) next.at(t) += p * ps; // outside: dropped
            }
        }
        acc = std::move(next);
    }
    acc.set_captured_mass(acc.total_mass());
    return acc;
}

LatticeDistribution srw_pmf(int dimension, int m, const SrwPmfOptions& opts) {
    if (dimension < 1 || m < 0) throw DomainError("srw_pmf: bad arguments");

    // pick the support radius, honoring the memory guard
    int radius = m;
    std::size_t entries = 1;
    bool truncated = false;
    for (;;) {
        entries = 1;
        bool over = false;
        for (int j = 0; j < dimension; ++j) {
            entries *= static_cast<std::size_t>(2 * radius + 1);
            if (entries > opts.max_entries) {
                over = true;
                break;
            }
        }
        if (!over) break;
        truncated = true;
        radius = opts.fallback_radius > 0
                     ? opts.fallback_radius
                     : static_cast<int>(
                           (std::pow(static_cast<double>(opts.max_entries),
                                     1.0 / dimension) -
                            1.0) /
                           2.0);
        if (radius < 1) radius = 1;
        break;
    }

    LatticeDistribution out(dimension, radius);
    if (dimension == 1) {
        for (int k = -radius; k <= radius; ++k) out.at({k}) = srw1d_point_pmf(m, k);
    } else if (dimension == 2) {
        // (x,y) -> (x+y, x-y) maps the 2d SRW to two independent 1d SRWs
        for (int x = -radius; x <= radius; ++x)
            for (int y = -radius; y <= radius; ++y)
                out.at({x, y}) = srw1d_point_pmf(m, x + y) * srw1d_point_pmf(m, x - y);
    } else {
        out = walk_pmf_convolved(LatticeWalk::srw(dimension), m, radius);
        out.set_captured_mass(out.total_mass());
        return out;
    }
    out.set_captured_mass(truncated ? out.total_mass() : 1.0);
    return out;
}

} // namespace subwalk
