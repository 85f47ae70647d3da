#pragma once

#include <Eigen/Dense>
#include <vector>

#include "ssmlab/chain.hpp"
#include "ssmlab/propagation.hpp"

namespace ssmlab {

/// The two published forms of the per-state reward when several miners hold a
/// lead of 2 disagree on what the honest pool's race resolution pays the
/// winning branch (two blocks vs one). Appendix keeps the full two-block award
/// and conserves 3 expected blocks in those states.
enum class TieVariant { Appendix, Printed };

/// Expected reward vector (size M+1, honest pool last) for a tie among the
/// branches in `tie` (sorted owner ids, kHonestPool allowed) whose branches
/// carry `order` in {1,2} blocks. Total mass is 1 + order.
std::vector<double> tie_reward(const std::vector<int>& tie, int order,
                               const HashDistribution& alpha, const PropagationModel& prop);

/// Expected block reward per agent while the chain sits in state x.
std::vector<double> state_revenue(const LeadState& x, const HashDistribution& alpha,
                                  const PropagationModel& prop,
                                  TieVariant variant = TieVariant::Appendix);

/// Rows follow the chain's state order; columns are the M strategic miners
/// then the honest pool.
Eigen::MatrixXd revenue_matrix(const HashDistribution& alpha, const PropagationModel& prop,
                               TieVariant variant = TieVariant::Appendix);

struct RevenueProfile {
    std::vector<double> rates;   // un-normalized expected blocks per transition, honest last
    std::vector<double> shares;  // rates / sum(rates); sums to 1
    double pi_residual = 0.0;    // achieved ||P pi - pi||_inf of the underlying solve
};

/// Steady-state relative revenue for every agent. Inactive miners (alpha = 0)
/// are admitted and earn share 0; with no active miner the honest pool gets
/// everything.
RevenueProfile relative_revenue(const HashDistribution& alpha, const PropagationModel& prop,
                                TieVariant variant = TieVariant::Appendix);

}  // namespace ssmlab
