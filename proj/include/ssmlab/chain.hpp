#pragma once

#include <Eigen/Dense>
#include <Eigen/Sparse>
#include <cstdint>
#include <vector>

#include "ssmlab/hash_distribution.hpp"

namespace ssmlab {

/// One node of the lead chain: the private-chain lead of every miner, each in {0,1,2}.
struct LeadState {
    std::vector<std::uint8_t> leads;

    /// Miners with a lead of exactly 1.
    std::vector<int> ones() const;
    /// Miners with a lead of exactly 2.
    std::vector<int> twos() const;
    int total_lead() const;

    bool operator==(const LeadState&) const = default;
};

/// All 3^m lead states, sorted by total lead then lexicographically on the lead
/// vector. Index 0 is the all-zero state. Requires 1 <= m <= 10; callers with
/// no active miners short-circuit before building a chain.
std::vector<LeadState> enumerate_states(int miner_count);

/// Markov chain over lead states. P is column-stochastic: P(x, y) is the
/// probability of moving to state x from state y. pi is empty until
/// steady_state() has been called.
struct ChainModel {
    int miner_count = 0;
    std::vector<LeadState> states;
    Eigen::SparseMatrix<double> P;
    Eigen::VectorXd pi;

    Eigen::MatrixXd dense_P() const { return Eigen::MatrixXd(P); }
    int index_of(const LeadState& s) const;
};

/// Build the transition matrix for the given (fully active) hash distribution.
/// Callers with inactive miners must project them out first.
ChainModel transition_matrix(const HashDistribution& alpha);

/// Solve P*pi = pi, sum(pi) = 1 by a direct sparse factorization of the
/// row-replaced system. Guarantees ||P*pi - pi||_inf <= 1e-12 and pi >= 0
/// (entries in [-1e-15, 0) are clamped to zero); throws NumericalError with the
/// achieved residual otherwise.
Eigen::VectorXd steady_state(const ChainModel& model);

/// transition_matrix + steady_state in one call.
ChainModel solved_chain(const HashDistribution& alpha);

}  // namespace ssmlab
