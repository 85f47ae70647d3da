#include "ssmlab/hash_distribution.hpp"

#include <cmath>
#include <string>

namespace ssmlab {

HashDistribution::HashDistribution(std::vector<double> alphas) : alphas_(std::move(alphas)) {
    double sum = 0.0;
    for (size_t i = 0; i < alphas_.size(); ++i) {
        double a = alphas_[i];
        if (!std::isfinite(a) || a < 0.0 || a > 0.5) {
            throw DomainError("alpha[" + std::to_string(i + 1) + "]=" + std::to_string(a) +
                              " out of (0,0.5] (0 marks an inactive miner)");
        }
        sum += a;
    }
    beta_ = 1.0 - sum;
    if (!(beta_ > 0.0)) {
        throw DomainError("sum(alpha)=" + std::to_string(sum) +
                          " leaves no honest hash power (need sum < 1)");
    }
}

std::vector<int> HashDistribution::active_miners() const {
    std::vector<int> out;
    for (int i = 0; i < miner_count(); ++i) {
        if (alphas_[static_cast<size_t>(i)] > 0.0) out.push_back(i);
    }
    return out;
}

HashDistribution HashDistribution::project_active() const {
    std::vector<double> act;
    for (double a : alphas_) {
        if (a > 0.0) act.push_back(a);
    }
    return HashDistribution(std::move(act));
}

bool HashDistribution::has_inactive() const {
    for (double a : alphas_) {
        if (a == 0.0) return true;
    }
    return false;
}

}  // namespace ssmlab
