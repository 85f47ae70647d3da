#include "ssmlab/revenue.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ssmlab {

namespace {

double weight_of(int id, const HashDistribution& alpha) {
    return id == kHonestPool ? alpha.beta() : alpha.alpha(id);
}

void check_tie(const std::vector<int>& tie, int miner_count) {
    if (tie.empty()) throw DomainError("tie set is empty");
    if (!std::is_sorted(tie.begin(), tie.end()) ||
        std::adjacent_find(tie.begin(), tie.end()) != tie.end()) {
        throw DomainError("tie set must be sorted and duplicate-free");
    }
    for (int id : tie) {
        if (id != kHonestPool && (id < 0 || id >= miner_count)) {
            throw DomainError("tie set references unknown miner " + std::to_string(id + 1));
        }
    }
}

size_t slot(int id, int m) { return id == kHonestPool ? static_cast<size_t>(m) : static_cast<size_t>(id); }

}  // namespace

std::vector<double> tie_reward(const std::vector<int>& tie, int order,
                               const HashDistribution& alpha, const PropagationModel& prop) {
    const int m = alpha.miner_count();
    check_tie(tie, m);
    if (order != 1 && order != 2) throw DomainError("tie order must be 1 or 2");

    std::vector<double> out(static_cast<size_t>(m) + 1, 0.0);
    auto resolve = [&](int resolver) {
        const double w = weight_of(resolver, alpha);
        if (w == 0.0) return;
        const auto gamma = prop.branch_weights(resolver, tie);
        for (size_t k = 0; k < tie.size(); ++k) {
            const double g = w * gamma[k];
            out[slot(resolver, m)] += g;                         // the resolving block
            out[slot(tie[k], m)] += g * static_cast<double>(order);  // the winning branch
        }
    };
    for (int i = 0; i < m; ++i) resolve(i);
    resolve(kHonestPool);
    return out;
}

std::vector<double> state_revenue(const LeadState& x, const HashDistribution& alpha,
                                  const PropagationModel& prop, TieVariant variant) {
    const int m = alpha.miner_count();
    if (static_cast<int>(x.leads.size()) != m) {
        throw DomainError("lead state has wrong miner count");
    }
    const double beta = alpha.beta();
    std::vector<double> rev(static_cast<size_t>(m) + 1, 0.0);
    const auto A = x.ones();
    const auto B = x.twos();

    if (A.empty() && B.empty()) {
        rev[static_cast<size_t>(m)] = beta;
    } else if (!A.empty() && B.empty()) {
        std::vector<int> tie{kHonestPool};
        tie.insert(tie.end(), A.begin(), A.end());
        auto t = tie_reward(tie, 1, alpha, prop);
        for (auto& v : t) v *= beta;
        rev = t;
    } else if (A.empty() && B.size() == 1) {
        const int j = B.front();
        rev[static_cast<size_t>(j)] = alpha.alpha(j) + 2.0 * beta;
    } else if (B.size() > 1) {
        auto t = tie_reward(B, 2, alpha, prop);
        for (auto& v : t) v *= beta;
        rev = t;
        for (int j : B) rev[static_cast<size_t>(j)] += 3.0 * alpha.alpha(j);
        if (variant == TieVariant::Printed) {
            // the honest pool's resolution pays the winning branch one block
            // instead of two
            const auto g = prop.branch_weights(kHonestPool, B);
            for (size_t k = 0; k < B.size(); ++k) {
                rev[static_cast<size_t>(B[k])] -= beta * beta * g[k];
            }
        }
    } else {
        const int j = B.front();
        const double aj = alpha.alpha(j);
        rev[static_cast<size_t>(j)] = 2.0 * beta + 2.0 * aj * aj + 3.0 * aj * (1.0 - aj);
    }
    return rev;
}

Eigen::MatrixXd revenue_matrix(const HashDistribution& alpha, const PropagationModel& prop,
                               TieVariant variant) {
    const auto states = enumerate_states(alpha.miner_count());
    Eigen::MatrixXd R(static_cast<Eigen::Index>(states.size()), alpha.miner_count() + 1);
    for (size_t r = 0; r < states.size(); ++r) {
        const auto rev = state_revenue(states[r], alpha, prop, variant);
        for (int c = 0; c <= alpha.miner_count(); ++c) {
            R(static_cast<Eigen::Index>(r), c) = rev[static_cast<size_t>(c)];
        }
    }
    return R;
}

RevenueProfile relative_revenue(const HashDistribution& alpha, const PropagationModel& prop,
                                TieVariant variant) {
    const int m = alpha.miner_count();
    RevenueProfile out;
    out.rates.assign(static_cast<size_t>(m) + 1, 0.0);
    out.shares.assign(static_cast<size_t>(m) + 1, 0.0);

    const auto active = alpha.active_miners();
    if (active.empty()) {
        out.rates[static_cast<size_t>(m)] = alpha.beta();
        out.shares[static_cast<size_t>(m)] = 1.0;
        return out;
    }

    const HashDistribution proj = alpha.project_active();
    const PropagationModel pprop = prop.project(active);
    ChainModel chain = transition_matrix(proj);
    chain.pi = steady_state(chain);
    out.pi_residual = (chain.P * chain.pi - chain.pi).lpNorm<Eigen::Infinity>();

    const Eigen::MatrixXd R = revenue_matrix(proj, pprop, variant);
    const Eigen::VectorXd rates = R.transpose() * chain.pi;

    const int mp = proj.miner_count();
    for (int k = 0; k < mp; ++k) out.rates[static_cast<size_t>(active[static_cast<size_t>(k)])] = rates[k];
    out.rates[static_cast<size_t>(m)] = rates[mp];

    const double total = rates.sum();
    if (!(total > 0.0)) throw NumericalError("total block rate is not positive");
    for (size_t i = 0; i < out.rates.size(); ++i) out.shares[i] = out.rates[i] / total;
    return out;
}

}  // namespace ssmlab
