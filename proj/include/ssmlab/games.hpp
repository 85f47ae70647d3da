#pragma once

#include <cstdint>
#include <map>
#include <mutex>
#include <optional>
#include <vector>

#include "ssmlab/hash_distribution.hpp"
#include "ssmlab/propagation.hpp"
#include "ssmlab/revenue.hpp"

namespace ssmlab {

/// The partition-game utility as published carries a squared (1-s_i) weight on
/// the honest part; ShareConsistent drops the outer factor. The two coincide
/// at every binary profile.
enum class PartitionVariant { Literal, ShareConsistent };

enum class StackelbergMode { TwoPlayerSse, Pessimistic };

struct BestResponseResult {
    int action = 0;            // argmax over {0,1}
    double utility_honest = 0.0;
    double utility_ssm = 0.0;
    bool indifferent = false;  // |gap| <= 1e-9
};

struct StackelbergResult {
    int leader = 0;
    double commitment = 0.0;
    std::vector<double> response;        // followers' binary profile, in miner order
    double leader_value = 0.0;
    std::vector<double> follower_values;
    double follower_gap = 0.0;           // two-player: U_f(S) - U_f(H) at the optimum
    std::vector<double> no_pne_commitments;  // commitments whose follower subgame had no PNE
};

struct Coalition {
    std::vector<int> members;  // retaliating miners (victim excluded)
    double penalty = 0.0;      // honest payoff minus the victim's payoff under retaliation
};

struct ThresholdResult {
    double eta = 0.0;
    double margin_below = 0.0;  // all-SSM deviation margin just below eta (negative)
    double margin_above = 0.0;  // and just above (non-negative)
};

/// Utilities, equilibria and commitment analysis of the binary SSM game and
/// its partition extension at a fixed hash distribution. Revenue solves are
/// memoized on the effective hash vector (rounded at 1e-12), so the 2^M
/// deviation checks reuse chains.
class GameContext {
public:
    explicit GameContext(HashDistribution alpha,
                         PropagationModel prop = PropagationModel::uniform(),
                         TieVariant variant = TieVariant::Appendix,
                         PartitionVariant partition = PartitionVariant::Literal);

    const HashDistribution& hash() const { return alpha_; }
    int miner_count() const { return alpha_.miner_count(); }

    /// Utility of every strategic miner at a binary action profile
    /// (0 = honest, 1 = SSM). Honest strategic miners split the honest pool's
    /// share pro rata by hash.
    std::vector<double> ssm_game_utilities(const std::vector<std::uint8_t>& actions) const;

    /// Exact brute-force pure Nash enumeration over {0,1}^M; a deviation must
    /// improve by more than 1e-12 to disqualify a profile. Requires M <= 8.
    std::vector<std::vector<std::uint8_t>> enumerate_pne() const;

    /// Utility at a fractional partition profile s in [0,1]^M; uses the
    /// context's partition variant unless overridden.
    std::vector<double> partition_utilities(const std::vector<double>& s) const;
    std::vector<double> partition_utilities(const std::vector<double>& s,
                                            PartitionVariant pv) const;

    /// Endpoint best response of `miner` against fixed (possibly fractional)
    /// opponent partitions; s[miner] is ignored.
    BestResponseResult best_response(int miner, std::vector<double> s) const;

    /// Leader-commitment search over a grid with golden-section refinement
    /// (1e-5). TwoPlayerSse breaks follower ties in the leader's favour;
    /// Pessimistic takes the follower-subgame PNE worst for the leader.
    StackelbergResult stackelberg(int leader, double grid_step, StackelbergMode mode) const;

    /// Commitment classification in {0,1,2,3}; endpoints snapped at 1e-6.
    int commitment_type(double grid_step = 1e-3) const;
    int commitment_type(const StackelbergResult& sse) const;

    /// All coalitions whose SSM retaliation pushes the victim below its honest
    /// payoff while every member prefers staying in. Requires M <= 8.
    std::vector<Coalition> penalizing_coalitions(int victim) const;

    /// Cached relative-revenue shares for an effective hash vector.
    std::vector<double> revenue_shares(const std::vector<double>& effective) const;

private:
    HashDistribution alpha_;
    PropagationModel prop_;
    TieVariant variant_;
    PartitionVariant partition_;
    mutable std::mutex mutex_;
    mutable std::map<std::vector<long long>, std::vector<double>> cache_;
};

/// Smallest symmetric hash rate eta such that all-M-miners-SSM is a pure Nash
/// equilibrium, by 0.005 pre-scan plus bisection. Fails loudly if the scan
/// sees more than one sign change; returns nullopt if the condition never
/// holds on the admissible range.
std::optional<ThresholdResult> uniform_profitability_threshold(
    int miners, double tol = 1e-4, const PropagationModel& prop = PropagationModel::uniform(),
    TieVariant variant = TieVariant::Appendix);

}  // namespace ssmlab
