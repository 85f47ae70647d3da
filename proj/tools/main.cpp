#include <CLI11.hpp>
#include <fstream>
#include <iostream>

#include "ssmlab/cli_core.hpp"

namespace cli = ssmlab::cli;

namespace {

int emit(const cli::CommandOutput& out) {
    std::cout << out.body.dump(2) << "\n";
    return out.exit_code;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"semi-selfish mining analytics: chain revenues, mining games, simulation"};
    app.require_subcommand(1);

    std::string alpha_csv;
    std::string prop = "uniform";
    std::string variant_name;

    auto add_common = [&](CLI::App* cmd, bool with_alpha = true) {
        if (with_alpha) {
            cmd->add_option("--alpha", alpha_csv, "comma separated strategic hash rates")->required();
        }
        cmd->add_option("--prop", prop, "propagation model: uniform | gamma=G | table=FILE");
        cmd->add_option("--variant", variant_name, "revenue variant: appendix | printed");
    };
    auto variant_opt = [&]() -> std::optional<ssmlab::TieVariant> {
        if (variant_name.empty()) return std::nullopt;
        return cli::parse_variant(variant_name);
    };

    // solve
    auto* solve = app.add_subcommand("solve", "steady-state relative revenue for a hash distribution");
    add_common(solve);
    solve->callback([&]() {
        cli::SolveOptions o;
        o.alpha = cli::parse_alpha_list(alpha_csv);
        o.prop = prop;
        o.variant = variant_opt();
        std::exit(emit(cli::cmd_solve(o)));
    });

    // game
    auto* game = app.add_subcommand("game", "binary SSM game analysis");
    std::string what;
    int leader = 1, victim = 1;
    double grid_step = 1e-3;
    bool share_consistent = false;
    game->add_option("query", what, "table | pne | sse | coalitions | type")->required();
    add_common(game);
    game->add_option("--leader", leader, "leader miner (1-based) for sse/type");
    game->add_option("--victim", victim, "victim miner (1-based) for coalitions");
    game->add_option("--grid", grid_step, "commitment grid step");
    game->add_flag("--share-consistent", share_consistent,
                   "drop the squared honest weight in partition utilities");
    game->callback([&]() {
        cli::GameOptions o;
        o.what = what;
        o.alpha = cli::parse_alpha_list(alpha_csv);
        o.prop = prop;
        o.variant = variant_opt();
        o.leader = leader - 1;
        o.victim = victim - 1;
        o.grid_step = grid_step;
        o.partition = share_consistent ? ssmlab::PartitionVariant::ShareConsistent
                                       : ssmlab::PartitionVariant::Literal;
        std::exit(emit(cli::cmd_game(o)));
    });

    // threshold
    auto* threshold = app.add_subcommand("threshold", "uniform profitability threshold for SSM");
    int miners = 1;
    double tol = 1e-4;
    threshold->add_option("--miners", miners, "number of strategic miners")->required();
    threshold->add_option("--tol", tol, "bisection tolerance");
    add_common(threshold, false);
    threshold->callback([&]() {
        cli::ThresholdOptions o;
        o.miners = miners;
        o.tol = tol;
        o.prop = prop;
        o.variant = variant_opt();
        std::exit(emit(cli::cmd_threshold(o)));
    });

    // simulate
    auto* simulate = app.add_subcommand("simulate", "Monte Carlo run of the strategy automata");
    std::string strategies_csv;
    long long blocks = 1000000;
    std::uint64_t seed = 1;
    int replicas = 1;
    add_common(simulate);
    simulate->add_option("--strategies", strategies_csv, "per miner: honest|sm|ssm")->required();
    simulate->add_option("--blocks", blocks, "number of block draws");
    simulate->add_option("--seed", seed, "base RNG seed");
    simulate->add_option("--replicas", replicas, "independent replicas (seeds derived from --seed)");
    simulate->callback([&]() {
        cli::SimulateOptions o;
        o.alpha = cli::parse_alpha_list(alpha_csv);
        o.strategies = cli::parse_strategies(strategies_csv);
        o.prop = prop;
        o.blocks = blocks;
        o.seed = seed;
        o.replicas = replicas;
        std::exit(emit(cli::cmd_simulate(o)));
    });

    // sweep
    auto* sweep = app.add_subcommand("sweep", "grid sweep over hash space, CSV output");
    int sweep_miners = 2;
    std::vector<std::string> free_specs;
    std::vector<std::string> fixed_specs;
    std::string quantity = "shares";
    std::string out_path;
    int jobs = 1;
    double sse_grid = 1e-2;
    sweep->add_option("--miners", sweep_miners, "total strategic miners")->required();
    sweep->add_option("--free", free_specs, "axis spec MINER:LO:HI:STEP (1-based miner)");
    sweep->add_option("--fixed", fixed_specs, "fixed value MINER=ALPHA (1-based miner)");
    sweep->add_option("--quantity", quantity,
                      "shares | pne-class | commitment-type | sse-surplus | coalition-penalty");
    sweep->add_option("--out", out_path, "output CSV path (stdout when omitted)");
    sweep->add_option("--jobs", jobs, "parallel workers (static row partition)");
    sweep->add_option("--leader", leader, "leader miner (1-based)");
    sweep->add_option("--victim", victim, "victim miner (1-based)");
    sweep->add_option("--sse-grid", sse_grid, "commitment grid step for sse quantities");
    add_common(sweep, false);
    sweep->callback([&]() {
        cli::SweepOptions o;
        o.miners = sweep_miners;
        o.quantity = quantity;
        o.prop = prop;
        o.variant = variant_opt();
        o.leader = leader - 1;
        o.victim = victim - 1;
        o.jobs = jobs;
        o.sse_grid = sse_grid;
        for (const auto& s : free_specs) {
            cli::SweepAxis ax;
            if (std::sscanf(s.c_str(), "%d:%lf:%lf:%lf", &ax.miner, &ax.lo, &ax.hi, &ax.step) != 4) {
                std::cerr << "{\"error\": \"bad --free spec '" << s << "'\"}\n";
                std::exit(cli::kDomainError);
            }
            ax.miner -= 1;
            o.free_axes.push_back(ax);
        }
        for (const auto& s : fixed_specs) {
            int idx = 0;
            double v = 0;
            if (std::sscanf(s.c_str(), "%d=%lf", &idx, &v) != 2) {
                std::cerr << "{\"error\": \"bad --fixed spec '" << s << "'\"}\n";
                std::exit(cli::kDomainError);
            }
            o.fixed.emplace_back(idx - 1, v);
        }
        std::string err;
        int code;
        if (out_path.empty()) {
            code = cli::cmd_sweep(o, std::cout, &err);
        } else {
            std::ofstream f(out_path, std::ios::binary);
            if (!f) {
                std::cerr << "{\"error\": \"cannot open output file '" << out_path << "'\"}\n";
                std::exit(cli::kIoError);
            }
            code = cli::cmd_sweep(o, f, &err);
        }
        if (code != cli::kOk) std::cerr << "{\"error\": \"" << err << "\"}\n";
        std::exit(code);
    });

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : cli::kDomainError;
    } catch (const ssmlab::DomainError& e) {
        std::cerr << "{\"error\": \"" << e.what() << "\"}\n";
        return cli::kDomainError;
    } catch (const ssmlab::NumericalError& e) {
        std::cerr << "{\"error\": \"" << e.what() << "\"}\n";
        return cli::kNumericalError;
    }
    return 0;
}
