#pragma once

#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include <json.hpp>

#include "ssmlab/games.hpp"
#include "ssmlab/propagation.hpp"
#include "ssmlab/revenue.hpp"
#include "ssmlab/simkit.hpp"

namespace ssmlab::cli {

/// Exit codes shared by every subcommand.
inline constexpr int kOk = 0;
inline constexpr int kDomainError = 2;
inline constexpr int kNumericalError = 3;
inline constexpr int kIoError = 4;

struct CommandOutput {
    int exit_code = kOk;
    nlohmann::json body;
};

/// S22 revenue variant from SSMLAB_VARIANT ("printed" | "appendix"); appendix
/// when unset. An unknown value is a domain error.
TieVariant variant_from_env();

TieVariant parse_variant(const std::string& name);
std::string variant_name(TieVariant v);

/// "uniform" | "gamma=G" | "table=FILE". The file holds tie-set keyed rows,
/// e.g. {"2,H": {"1": {"2": 0.7, "H": 0.3}}} with 1-based miner ids and "H"
/// for the honest pool.
PropagationModel parse_propagation(const std::string& spec);

/// Parse an explicit propagation table from JSON text. Messages carry the
/// offending key path.
PropagationModel parse_propagation_table_json(const std::string& text);

std::vector<double> parse_alpha_list(const std::string& csv);
std::vector<MinerStrategy> parse_strategies(const std::string& csv);

struct SolveOptions {
    std::vector<double> alpha;
    std::string prop = "uniform";
    std::optional<TieVariant> variant;  // env default when unset
};
CommandOutput cmd_solve(const SolveOptions& opt);

struct GameOptions {
    std::string what;  // table | pne | sse | coalitions | type
    std::vector<double> alpha;
    std::string prop = "uniform";
    std::optional<TieVariant> variant;
    int leader = 0;
    int victim = 0;
    double grid_step = 1e-3;
    PartitionVariant partition = PartitionVariant::Literal;
};
CommandOutput cmd_game(const GameOptions& opt);

struct ThresholdOptions {
    int miners = 1;
    double tol = 1e-4;
    std::string prop = "uniform";
    std::optional<TieVariant> variant;
};
CommandOutput cmd_threshold(const ThresholdOptions& opt);

struct SimulateOptions {
    std::vector<double> alpha;
    std::vector<MinerStrategy> strategies;
    std::string prop = "uniform";
    long long blocks = 1000000;
    std::uint64_t seed = 1;
    int replicas = 1;
};
CommandOutput cmd_simulate(const SimulateOptions& opt);

struct SweepAxis {
    int miner = 0;  // 0-based
    double lo = 0.0;
    double hi = 0.0;
    double step = 0.0;
};
struct SweepOptions {
    int miners = 2;
    std::vector<SweepAxis> free_axes;          // row-major, first axis outermost
    std::vector<std::pair<int, double>> fixed;  // miner -> alpha
    std::string quantity = "shares";  // shares | pne-class | commitment-type | sse-surplus | coalition-penalty
    std::string prop = "uniform";
    std::optional<TieVariant> variant;
    int leader = 0;
    int victim = 0;
    double sse_grid = 1e-2;
    int jobs = 1;
};
/// Streams the CSV (header comment, header row, one row per grid point;
/// %.9f numbers, LF endings, deterministic order). Per-row failures land in
/// the trailing error column. Returns an exit code.
int cmd_sweep(const SweepOptions& opt, std::ostream& out, std::string* error = nullptr);

/// Shape checks for each command's JSON output; used by the test suite.
bool validate_output(const std::string& command, const nlohmann::json& j,
                     std::string* why = nullptr);

}  // namespace ssmlab::cli
