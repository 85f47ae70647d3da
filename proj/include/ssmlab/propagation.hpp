#pragma once

#include <map>
#include <utility>
#include <vector>

#include "ssmlab/errors.hpp"

namespace ssmlab {

/// Id used for the honest pool wherever tie participants are named. Strategic
/// miners use their 0-based index, which keeps the id stable across
/// projections that drop inactive miners.
inline constexpr int kHonestPool = -1;

/// How hash power is split across the branches of a public tie.
///
/// A branch is named by its owner. A strategic miner whose own branch is in
/// the tie always mines on it. Everyone else splits per the chosen model:
///   - uniform: 1/|D| on every branch, honest pool included even when its own
///     block is one of the branches.
///   - two-way gamma: in a tie of one strategic branch against the honest
///     branch, every uncommitted miner puts gamma on the strategic branch and
///     1-gamma on the honest one; other tie shapes fall back to uniform.
///   - explicit table: per-tie-set rows, validated on construction; miners
///     without a row fall back to the uniform rule.
class PropagationModel {
public:
    struct TableRow {
        std::map<int, double> weights;  // branch owner -> weight
    };
    struct TableEntry {
        std::map<int, TableRow> rows;  // mining miner -> row
    };
    using Table = std::map<std::vector<int>, TableEntry>;  // key: sorted tie set

    static PropagationModel uniform();
    static PropagationModel two_way_gamma(double gamma);
    static PropagationModel explicit_table(Table table);

    enum class Kind { Uniform, TwoWayGamma, ExplicitTable };
    Kind kind() const { return kind_; }
    double gamma() const { return gamma_; }

    /// Weights miner `miner` puts on each branch of the tie `D` (sorted owner
    /// ids). Result is aligned with D and sums to 1.
    std::vector<double> branch_weights(int miner, const std::vector<int>& tie) const;

    /// Remap an explicit table onto the surviving miners `kept` (old index ->
    /// position). Uniform and gamma models are index-free and returned as-is.
    PropagationModel project(const std::vector<int>& kept) const;

    /// Human-readable form used by the CLI output ("uniform", "gamma=0.25", "table").
    std::string describe() const;

private:
    PropagationModel() = default;
    Kind kind_ = Kind::Uniform;
    double gamma_ = 0.5;
    Table table_;
};

}  // namespace ssmlab
