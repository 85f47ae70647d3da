#pragma once

#include <vector>

#include "ssmlab/errors.hpp"

namespace ssmlab {

/// Hash rates of the strategic miners. The remaining share beta = 1 - sum(alpha)
/// belongs to the implicit honest pool and must stay positive. A zero entry marks
/// an inactive strategic miner; inactive miners are projected out before any
/// chain is built and always earn a zero share.
class HashDistribution {
public:
    explicit HashDistribution(std::vector<double> alphas);

    int miner_count() const { return static_cast<int>(alphas_.size()); }
    double alpha(int i) const { return alphas_.at(static_cast<size_t>(i)); }
    const std::vector<double>& alphas() const { return alphas_; }
    double beta() const { return beta_; }

    /// Indices of miners with alpha > 0, in order.
    std::vector<int> active_miners() const;

    /// Distribution over the active miners only.
    HashDistribution project_active() const;

    bool has_inactive() const;

private:
    std::vector<double> alphas_;
    double beta_;
};

}  // namespace ssmlab
