#pragma once

#include <optional>

#include "ssmlab/errors.hpp"

namespace ssmlab {

enum class Strategy { SelfishMining, SemiSelfishMining };

/// Relative revenue of a single selfish miner with hash share alpha and
/// propagation gamma facing an honest pool.
double sm_relative_revenue(double alpha, double gamma);

/// Relative revenue of a single semi-selfish miner (private lead capped at 2).
double ssm_relative_revenue(double alpha, double gamma);

/// Un-normalized block creation rates underlying ssm_relative_revenue:
/// own / (own + others) equals the relative revenue.
struct SsmBlockRates {
    double own;
    double others;
};
SsmBlockRates ssm_block_rates(double alpha, double gamma);

/// Smallest alpha in (0, 0.5] where the strategy's relative revenue reaches
/// alpha, located by a sign-change pre-scan (step 0.005) plus bisection to
/// `tol`. Returns nullopt when the strategy is never profitable on (0, 0.5].
std::optional<double> profitability_root(Strategy strategy, double gamma, double tol = 1e-6);

}  // namespace ssmlab
