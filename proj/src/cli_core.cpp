#include "ssmlab/cli_core.hpp"

#include <cinttypes>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <functional>
#include <ostream>
#include <sstream>
#include <thread>

namespace ssmlab::cli {

namespace {

struct IoError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

CommandOutput run_guarded(const std::function<nlohmann::json()>& fn) {
    CommandOutput out;
    try {
        out.body = fn();
        out.exit_code = kOk;
    } catch (const IoError& e) {
        out.exit_code = kIoError;
        out.body = {{"error", e.what()}};
    } catch (const DomainError& e) {
        out.exit_code = kDomainError;
        out.body = {{"error", e.what()}};
    } catch (const NumericalError& e) {
        out.exit_code = kNumericalError;
        out.body = {{"error", e.what()}, {"residual", e.residual()}};
    } catch (const SettlementError& e) {
        out.exit_code = kNumericalError;
        out.body = {{"error", e.what()}};
    }
    return out;
}

std::string fmt9(double v) {
    char buf[64];
    std::snprintf(buf, sizeof(buf), "%.9f", v);
    return buf;
}

std::string profile_string(const std::vector<std::uint8_t>& x) {
    std::string s;
    for (auto a : x) s += a ? 'S' : 'H';
    return s;
}

int parse_participant(const std::string& tok, const std::string& context) {
    if (tok == "H" || tok == "h") return kHonestPool;
    try {
        size_t pos = 0;
        const int v = std::stoi(tok, &pos);
        if (pos != tok.size() || v < 1) throw std::invalid_argument("");
        return v - 1;
    } catch (...) {
        throw PropagationTableError(context + ": \"" + tok +
                                    "\" is neither a 1-based miner index nor \"H\"");
    }
}

std::vector<std::string> split(const std::string& s, char sep) {
    std::vector<std::string> out;
    std::string cur;
    for (char c : s) {
        if (c == sep) {
            out.push_back(cur);
            cur.clear();
        } else {
            cur += c;
        }
    }
    out.push_back(cur);
    return out;
}

std::uint64_t splitmix64(std::uint64_t x) {
    x += 0x9e3779b97f4a7c15ull;
    x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ull;
    x = (x ^ (x >> 27)) * 0x94d049bb133111ebull;
    return x ^ (x >> 31);
}

nlohmann::json shares_json(const std::vector<double>& v) {
    return nlohmann::json(v);
}

}  // namespace

TieVariant parse_variant(const std::string& name) {
    if (name == "appendix") return TieVariant::Appendix;
    if (name == "printed") return TieVariant::Printed;
    throw DomainError("unknown revenue variant \"" + name + "\" (expected printed|appendix)");
}

std::string variant_name(TieVariant v) {
    return v == TieVariant::Appendix ? "appendix" : "printed";
}

TieVariant variant_from_env() {
    const char* env = std::getenv("SSMLAB_VARIANT");
    if (env == nullptr || *env == '\0') return TieVariant::Appendix;
    return parse_variant(env);
}

std::vector<double> parse_alpha_list(const std::string& csv) {
    std::vector<double> out;
    for (const auto& tok : split(csv, ',')) {
        try {
            size_t pos = 0;
            out.push_back(std::stod(tok, &pos));
            if (pos != tok.size()) throw std::invalid_argument("");
        } catch (...) {
            throw DomainError("bad alpha value \"" + tok + "\"");
        }
    }
    return out;
}

std::vector<MinerStrategy> parse_strategies(const std::string& csv) {
    std::vector<MinerStrategy> out;
    for (const auto& tok : split(csv, ',')) {
        if (tok == "honest") {
            out.push_back(MinerStrategy::Honest);
        } else if (tok == "sm") {
            out.push_back(MinerStrategy::SelfishMining);
        } else if (tok == "ssm") {
            out.push_back(MinerStrategy::SemiSelfishMining);
        } else {
            throw DomainError("unknown strategy \"" + tok + "\" (expected honest|sm|ssm)");
        }
    }
    return out;
}

PropagationModel parse_propagation_table_json(const std::string& text) {
    nlohmann::json j;
    try {
        j = nlohmann::json::parse(text);
    } catch (const nlohmann::json::parse_error& e) {
        throw PropagationTableError(std::string("propagation table is not valid JSON: ") + e.what());
    }
    if (!j.is_object()) throw PropagationTableError("propagation table must be a JSON object");

    PropagationModel::Table table;
    for (auto it = j.begin(); it != j.end(); ++it) {
        const std::string& key = it.key();
        std::vector<int> tie;
        for (const auto& tok : split(key, ',')) tie.push_back(parse_participant(tok, "tie set \"" + key + "\""));
        std::sort(tie.begin(), tie.end());
        if (!it.value().is_object()) {
            throw PropagationTableError("table[\"" + key + "\"] must map miners to weight rows");
        }
        PropagationModel::TableEntry entry;
        for (auto rit = it.value().begin(); rit != it.value().end(); ++rit) {
            const int miner = parse_participant(rit.key(), "table[\"" + key + "\"] row \"" + rit.key() + "\"");
            if (!rit.value().is_object()) {
                throw PropagationTableError("table[\"" + key + "\"], row \"" + rit.key() +
                                            "\" must map branches to weights");
            }
            PropagationModel::TableRow row;
            for (auto wit = rit.value().begin(); wit != rit.value().end(); ++wit) {
                const int branch = parse_participant(
                    wit.key(), "table[\"" + key + "\"], row \"" + rit.key() + "\", branch \"" + wit.key() + "\"");
                if (!wit.value().is_number()) {
                    throw PropagationTableError("table[\"" + key + "\"], row \"" + rit.key() +
                                                "\", branch \"" + wit.key() + "\": weight must be a number");
                }
                row.weights[branch] = wit.value().get<double>();
            }
            entry.rows[miner] = row;
        }
        table[tie] = entry;
    }
    return PropagationModel::explicit_table(std::move(table));
}

PropagationModel parse_propagation(const std::string& spec) {
    if (spec == "uniform") return PropagationModel::uniform();
    if (spec.rfind("gamma=", 0) == 0) {
        const std::string v = spec.substr(6);
        try {
            size_t pos = 0;
            const double g = std::stod(v, &pos);
            if (pos != v.size()) throw std::invalid_argument("");
            return PropagationModel::two_way_gamma(g);
        } catch (const DomainError&) {
            throw;
        } catch (...) {
            throw DomainError("bad gamma value \"" + v + "\"");
        }
    }
    if (spec.rfind("table=", 0) == 0) {
        const std::string path = spec.substr(6);
        std::ifstream in(path, std::ios::binary);
        if (!in) throw IoError("cannot open propagation table \"" + path + "\"");
        std::ostringstream ss;
        ss << in.rdbuf();
        if (in.bad()) throw IoError("cannot read propagation table \"" + path + "\"");
        return parse_propagation_table_json(ss.str());
    }
    throw DomainError("unknown propagation spec \"" + spec + "\" (expected uniform|gamma=G|table=FILE)");
}

CommandOutput cmd_solve(const SolveOptions& opt) {
    return run_guarded([&]() -> nlohmann::json {
        const TieVariant variant = opt.variant.value_or(variant_from_env());
        const PropagationModel prop = parse_propagation(opt.prop);
        const HashDistribution alpha(opt.alpha);
        const RevenueProfile profile = relative_revenue(alpha, prop, variant);
        return nlohmann::json{{"alpha", opt.alpha},
                              {"prop", prop.describe()},
                              {"variant", variant_name(variant)},
                              {"shares", shares_json(profile.shares)},
                              {"rates", shares_json(profile.rates)},
                              {"pi_residual", profile.pi_residual}};
    });
}

CommandOutput cmd_game(const GameOptions& opt) {
    return run_guarded([&]() -> nlohmann::json {
        const TieVariant variant = opt.variant.value_or(variant_from_env());
        const PropagationModel prop = parse_propagation(opt.prop);
        const HashDistribution alpha(opt.alpha);
        GameContext ctx(alpha, prop, variant, opt.partition);
        const int m = ctx.miner_count();

        nlohmann::json j{{"alpha", opt.alpha},
                         {"prop", prop.describe()},
                         {"variant", variant_name(variant)}};

        if (opt.what == "table") {
            nlohmann::json profiles = nlohmann::json::array();
            const unsigned n = 1u << m;
            for (unsigned bits = 0; bits < n; ++bits) {
                std::vector<std::uint8_t> x(static_cast<size_t>(m));
                // lexicographic over H<S with miner 1 most significant
                for (int i = 0; i < m; ++i) {
                    x[static_cast<size_t>(i)] = (bits >> (m - 1 - i)) & 1u;
                }
                profiles.push_back({{"profile", profile_string(x)},
                                    {"utilities", ctx.ssm_game_utilities(x)}});
            }
            j["profiles"] = profiles;
            return j;
        }
        if (opt.what == "pne") {
            nlohmann::json pne = nlohmann::json::array();
            for (const auto& x : ctx.enumerate_pne()) pne.push_back(profile_string(x));
            j["pne"] = pne;
            return j;
        }
        if (opt.what == "sse" || opt.what == "type") {
            if (opt.leader < 0 || opt.leader >= m) throw DomainError("leader index out of range");
            const auto mode = m == 2 ? StackelbergMode::TwoPlayerSse : StackelbergMode::Pessimistic;
            const auto sse = ctx.stackelberg(opt.leader, opt.grid_step, mode);
            j["leader"] = opt.leader + 1;
            j["mode"] = m == 2 ? "two-player-sse" : "pessimistic";
            j["partition"] =
                opt.partition == PartitionVariant::Literal ? "literal" : "share-consistent";
            j["commitment"] = sse.commitment;
            j["response"] = sse.response;
            j["leader_value"] = sse.leader_value;
            j["follower_values"] = sse.follower_values;
            j["follower_gap"] = sse.follower_gap;
            j["no_pne_commitments"] = sse.no_pne_commitments;
            if (opt.what == "type") {
                j["commitment_type"] = ctx.commitment_type(sse);
                nlohmann::json pne = nlohmann::json::array();
                for (const auto& x : ctx.enumerate_pne()) pne.push_back(profile_string(x));
                j["pne"] = pne;
            }
            return j;
        }
        if (opt.what == "coalitions") {
            if (opt.victim < 0 || opt.victim >= m) throw DomainError("victim index out of range");
            nlohmann::json arr = nlohmann::json::array();
            for (const auto& c : ctx.penalizing_coalitions(opt.victim)) {
                nlohmann::json members = nlohmann::json::array();
                for (int i : c.members) members.push_back(i + 1);
                arr.push_back({{"members", members}, {"penalty", c.penalty}});
            }
            j["victim"] = opt.victim + 1;
            j["coalitions"] = arr;
            return j;
        }
        throw DomainError("unknown game query \"" + opt.what +
                          "\" (expected table|pne|sse|coalitions|type)");
    });
}

CommandOutput cmd_threshold(const ThresholdOptions& opt) {
    return run_guarded([&]() -> nlohmann::json {
        const TieVariant variant = opt.variant.value_or(variant_from_env());
        const PropagationModel prop = parse_propagation(opt.prop);
        const auto res = uniform_profitability_threshold(opt.miners, opt.tol, prop, variant);
        nlohmann::json j{{"miners", opt.miners}, {"tol", opt.tol}, {"prop", prop.describe()},
                         {"variant", variant_name(variant)}};
        if (!res) {
            j["eta"] = nullptr;
            return j;
        }
        j["eta"] = res->eta;
        j["margin_below"] = res->margin_below;
        j["margin_above"] = res->margin_above;
        const double eta = res->eta;
        GameContext ctx(HashDistribution(std::vector<double>(static_cast<size_t>(opt.miners), eta)),
                        prop, variant);
        j["welfare_all_s"] =
            ctx.ssm_game_utilities(std::vector<std::uint8_t>(static_cast<size_t>(opt.miners), 1));
        j["welfare_all_h"] =
            ctx.ssm_game_utilities(std::vector<std::uint8_t>(static_cast<size_t>(opt.miners), 0));
        return j;
    });
}

CommandOutput cmd_simulate(const SimulateOptions& opt) {
    return run_guarded([&]() -> nlohmann::json {
        const PropagationModel prop = parse_propagation(opt.prop);
        const HashDistribution alpha(opt.alpha);
        if (opt.replicas < 1) throw DomainError("replicas must be >= 1");

        nlohmann::json runs = nlohmann::json::array();
        const size_t width = opt.alpha.size() + 1;
        std::vector<double> mean(width, 0.0), m2(width, 0.0);
        for (int r = 0; r < opt.replicas; ++r) {
            const std::uint64_t rs = splitmix64(opt.seed + static_cast<std::uint64_t>(r));
            const SimResult res = simulate(alpha, opt.strategies, prop, opt.blocks, rs);
            runs.push_back({{"seed", res.seed},
                            {"counts", res.counts},
                            {"shares", res.shares},
                            {"total_accepted", res.total_accepted}});
            for (size_t i = 0; i < width; ++i) {
                const double d = res.shares[i] - mean[i];
                mean[i] += d / static_cast<double>(r + 1);
                m2[i] += d * (res.shares[i] - mean[i]);
            }
        }
        std::vector<double> stderr_(width, 0.0);
        if (opt.replicas > 1) {
            for (size_t i = 0; i < width; ++i) {
                stderr_[i] = std::sqrt(m2[i] / (opt.replicas - 1.0) / opt.replicas);
            }
        }
        nlohmann::json strategies = nlohmann::json::array();
        for (auto s : opt.strategies) {
            strategies.push_back(s == MinerStrategy::Honest ? "honest"
                                 : s == MinerStrategy::SelfishMining ? "sm" : "ssm");
        }
        return nlohmann::json{{"alpha", opt.alpha},
                              {"strategies", strategies},
                              {"prop", prop.describe()},
                              {"blocks", opt.blocks},
                              {"seed", opt.seed},
                              {"replicas", opt.replicas},
                              {"per_replica", runs},
                              {"mean_shares", mean},
                              {"stderr", stderr_}};
    });
}

namespace {

struct SweepGrid {
    std::vector<long long> sizes;
    long long total = 1;
};

SweepGrid grid_of(const SweepOptions& opt) {
    SweepGrid g;
    for (const auto& ax : opt.free_axes) {
        if (!(ax.step >= 1e-3 && ax.step <= 0.05)) {
            throw DomainError("sweep step must lie in [1e-3, 0.05]");
        }
        if (!(ax.hi >= ax.lo)) throw DomainError("sweep axis has hi < lo");
        const long long n = static_cast<long long>(std::floor((ax.hi - ax.lo) / ax.step + 1.5));
        g.sizes.push_back(n);
        g.total *= n;
    }
    return g;
}

std::vector<double> alpha_at(const SweepOptions& opt, const SweepGrid& g, long long row) {
    std::vector<double> alpha(static_cast<size_t>(opt.miners), -1.0);
    for (const auto& [miner, v] : opt.fixed) alpha[static_cast<size_t>(miner)] = v;
    long long rem = row;
    for (size_t a = opt.free_axes.size(); a-- > 0;) {
        const long long idx = rem % g.sizes[a];
        rem /= g.sizes[a];
        const auto& ax = opt.free_axes[a];
        alpha[static_cast<size_t>(ax.miner)] = ax.lo + static_cast<double>(idx) * ax.step;
    }
    return alpha;
}

}  // namespace

int cmd_sweep(const SweepOptions& opt, std::ostream& out, std::string* error) {
    try {
        const TieVariant variant = opt.variant.value_or(variant_from_env());
        const PropagationModel prop = parse_propagation(opt.prop);
        if (opt.miners < 1) throw DomainError("miner count must be >= 1");
        if (opt.jobs < 1) throw DomainError("jobs must be >= 1");
        std::vector<bool> covered(static_cast<size_t>(opt.miners), false);
        for (const auto& ax : opt.free_axes) {
            if (ax.miner < 0 || ax.miner >= opt.miners) throw DomainError("free axis miner out of range");
            if (covered[static_cast<size_t>(ax.miner)]) throw DomainError("miner assigned twice in sweep");
            covered[static_cast<size_t>(ax.miner)] = true;
        }
        for (const auto& [miner, v] : opt.fixed) {
            (void)v;
            if (miner < 0 || miner >= opt.miners) throw DomainError("fixed miner out of range");
            if (covered[static_cast<size_t>(miner)]) throw DomainError("miner assigned twice in sweep");
            covered[static_cast<size_t>(miner)] = true;
        }
        for (bool c : covered) {
            if (!c) throw DomainError("every miner needs a free axis or a fixed value");
        }
        const SweepGrid grid = grid_of(opt);

        std::vector<std::string> value_cols;
        if (opt.quantity == "shares") {
            for (int i = 1; i <= opt.miners; ++i) value_cols.push_back("share_" + std::to_string(i));
            value_cols.push_back("share_honest");
        } else if (opt.quantity == "pne-class") {
            value_cols = {"pne"};
        } else if (opt.quantity == "commitment-type") {
            value_cols = {"commitment_type", "commitment", "leader_value"};
        } else if (opt.quantity == "sse-surplus") {
            value_cols = {"commitment", "leader_value", "surplus"};
        } else if (opt.quantity == "coalition-penalty") {
            value_cols = {"coalitions", "min_penalty"};
        } else {
            throw DomainError("unknown sweep quantity \"" + opt.quantity + "\"");
        }

        auto row_values = [&](const std::vector<double>& av) -> std::vector<std::string> {
            const HashDistribution alpha(av);
            if (opt.quantity == "shares") {
                const auto profile = relative_revenue(alpha, prop, variant);
                std::vector<std::string> vals;
                for (double s : profile.shares) vals.push_back(fmt9(s));
                return vals;
            }
            GameContext ctx(alpha, prop, variant);
            if (opt.quantity == "pne-class") {
                std::string cls;
                for (const auto& x : ctx.enumerate_pne()) {
                    if (!cls.empty()) cls += '|';
                    cls += profile_string(x);
                }
                return {cls};
            }
            const auto mode =
                opt.miners == 2 ? StackelbergMode::TwoPlayerSse : StackelbergMode::Pessimistic;
            if (opt.quantity == "commitment-type") {
                const auto sse = ctx.stackelberg(opt.leader, opt.sse_grid, mode);
                return {std::to_string(ctx.commitment_type(sse)), fmt9(sse.commitment),
                        fmt9(sse.leader_value)};
            }
            if (opt.quantity == "sse-surplus") {
                const auto sse = ctx.stackelberg(opt.leader, opt.sse_grid, mode);
                double best_pne = -1.0;
                for (const auto& x : ctx.enumerate_pne()) {
                    best_pne = std::max(best_pne,
                                        ctx.ssm_game_utilities(x)[static_cast<size_t>(opt.leader)]);
                }
                return {fmt9(sse.commitment), fmt9(sse.leader_value),
                        fmt9(sse.leader_value - best_pne)};
            }
            // coalition-penalty
            const auto coalitions = ctx.penalizing_coalitions(opt.victim);
            std::string which;
            double min_penalty = 0.0;
            bool have = false;
            for (const auto& c : coalitions) {
                if (!which.empty()) which += '|';
                for (size_t k = 0; k < c.members.size(); ++k) {
                    if (k) which += '+';
                    which += std::to_string(c.members[k] + 1);
                }
                if (!have || c.penalty < min_penalty) {
                    min_penalty = c.penalty;
                    have = true;
                }
            }
            return {which, have ? fmt9(min_penalty) : std::string()};
        };

        std::vector<std::string> rows(static_cast<size_t>(grid.total));
        auto worker = [&](int t) {
            for (long long r = t; r < grid.total; r += opt.jobs) {
                const auto av = alpha_at(opt, grid, r);
                std::ostringstream line;
                for (size_t i = 0; i < av.size(); ++i) {
                    if (i) line << ',';
                    line << fmt9(av[i]);
                }
                try {
                    for (const auto& v : row_values(av)) line << ',' << v;
                    line << ',';  // empty error column
                } catch (const std::exception& e) {
                    for (size_t i = 0; i < value_cols.size(); ++i) line << ',';
                    line << ',' << e.what();
                }
                rows[static_cast<size_t>(r)] = line.str();
            }
        };
        if (opt.jobs == 1) {
            worker(0);
        } else {
            std::vector<std::thread> pool;
            for (int t = 0; t < opt.jobs; ++t) pool.emplace_back(worker, t);
            for (auto& th : pool) th.join();
        }

        out << "# sweep quantity=" << opt.quantity << " miners=" << opt.miners
            << " prop=" << prop.describe() << " variant=" << variant_name(variant) << "\n";
        out << "# error column is empty on success and carries the failure message otherwise\n";
        for (int i = 1; i <= opt.miners; ++i) out << "alpha_" << i << ",";
        for (const auto& c : value_cols) out << c << ",";
        out << "error\n";
        for (const auto& r : rows) out << r << "\n";
        out.flush();
        return kOk;
    } catch (const IoError& e) {
        if (error) *error = e.what();
        return kIoError;
    } catch (const DomainError& e) {
        if (error) *error = e.what();
        return kDomainError;
    } catch (const NumericalError& e) {
        if (error) *error = e.what();
        return kNumericalError;
    }
}

bool validate_output(const std::string& command, const nlohmann::json& j, std::string* why) {
    auto fail = [&](const std::string& msg) {
        if (why) *why = msg;
        return false;
    };
    auto need = [&](const char* key, bool ok) {
        return ok ? true : fail(std::string("missing or mistyped field \"") + key + "\"");
    };
    if (j.contains("error")) return need("error", j["error"].is_string());

    if (command == "solve") {
        return need("alpha", j.contains("alpha") && j["alpha"].is_array()) &&
               need("prop", j.contains("prop") && j["prop"].is_string()) &&
               need("variant", j.contains("variant") && j["variant"].is_string()) &&
               need("shares", j.contains("shares") && j["shares"].is_array()) &&
               need("rates", j.contains("rates") && j["rates"].is_array()) &&
               need("pi_residual", j.contains("pi_residual") && j["pi_residual"].is_number());
    }
    if (command == "game-table") {
        if (!need("profiles", j.contains("profiles") && j["profiles"].is_array())) return false;
        for (const auto& p : j["profiles"]) {
            if (!p.contains("profile") || !p["profile"].is_string() || !p.contains("utilities") ||
                !p["utilities"].is_array()) {
                return fail("profiles entries need profile + utilities");
            }
        }
        return true;
    }
    if (command == "game-pne") {
        return need("pne", j.contains("pne") && j["pne"].is_array());
    }
    if (command == "game-sse" || command == "game-type") {
        bool ok = need("commitment", j.contains("commitment") && j["commitment"].is_number()) &&
                  need("response", j.contains("response") && j["response"].is_array()) &&
                  need("leader_value", j.contains("leader_value") && j["leader_value"].is_number()) &&
                  need("no_pne_commitments",
                       j.contains("no_pne_commitments") && j["no_pne_commitments"].is_array());
        if (ok && command == "game-type") {
            ok = need("commitment_type",
                      j.contains("commitment_type") && j["commitment_type"].is_number_integer());
        }
        return ok;
    }
    if (command == "game-coalitions") {
        if (!need("coalitions", j.contains("coalitions") && j["coalitions"].is_array())) return false;
        for (const auto& c : j["coalitions"]) {
            if (!c.contains("members") || !c["members"].is_array() || !c.contains("penalty") ||
                !c["penalty"].is_number()) {
                return fail("coalition entries need members + penalty");
            }
        }
        return true;
    }
    if (command == "threshold") {
        return need("miners", j.contains("miners") && j["miners"].is_number_integer()) &&
               need("eta", j.contains("eta") && (j["eta"].is_number() || j["eta"].is_null()));
    }
    if (command == "simulate") {
        bool ok = need("per_replica", j.contains("per_replica") && j["per_replica"].is_array()) &&
                  need("mean_shares", j.contains("mean_shares") && j["mean_shares"].is_array()) &&
                  need("seed", j.contains("seed") && j["seed"].is_number()) &&
                  need("blocks", j.contains("blocks") && j["blocks"].is_number_integer());
        if (!ok) return false;
        for (const auto& r : j["per_replica"]) {
            if (!r.contains("shares") || !r["shares"].is_array() || !r.contains("counts") ||
                !r["counts"].is_array() || !r.contains("seed")) {
                return fail("per_replica entries need seed + counts + shares");
            }
        }
        return true;
    }
    return fail("unknown command \"" + command + "\"");
}

}  // namespace ssmlab::cli
