#pragma once

#include <cstdint>
#include <vector>

#include "ssmlab/hash_distribution.hpp"
#include "ssmlab/propagation.hpp"

namespace ssmlab {

enum class MinerStrategy { Honest, SelfishMining, SemiSelfishMining };

struct SimResult {
    std::vector<long long> counts;  // accepted main-phase blocks per agent, honest pool last
    std::vector<double> shares;     // counts / total
    long long total_accepted = 0;
    long long steps = 0;            // block draws in the main phase
    std::uint64_t seed = 0;
};

/// Monte Carlo run of the mining strategy automata on an explicit block tree.
///
/// Each step draws a winner from (alpha, beta) and applies that miner's
/// find-block rule, then lets every other automaton react to the public-chain
/// changes until no reaction is pending (reactions are processed one atomic
/// public-chain change at a time). Tie targets follow the propagation model;
/// a strategic miner whose own branch is in the tie always mines on it. After
/// n_blocks draws the run is settled by forcing honest wins until no fork or
/// private chain remains; settlement blocks are excluded from the counts.
///
/// Identical inputs and seed give bit-identical results.
SimResult simulate(const HashDistribution& alpha, const std::vector<MinerStrategy>& strategies,
                   const PropagationModel& prop, long long n_blocks, std::uint64_t seed);

}  // namespace ssmlab
