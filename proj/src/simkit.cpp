#include "ssmlab/simkit.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <string>

namespace ssmlab {

namespace {

struct Block {
    int parent;
    int owner;  // 0..M-1 strategic, M honest pool
    int height;
    bool published;
    bool settlement;
};

struct World {
    const HashDistribution& alpha;
    const std::vector<MinerStrategy>& strategies;
    const PropagationModel& prop;
    int m;
    int honest_id;

    std::vector<Block> blocks;
    int pub_len = 0;
    std::vector<int> frontier;       // published blocks at pub_len
    std::vector<int> len_log;        // pub_len after every publish that raised it
    std::vector<size_t> cursor;      // per miner: next len_log entry to process
    std::vector<int> seen_len;       // per miner: pub length already reacted to
    std::vector<std::vector<int>> priv;  // per miner private chain, oldest first

    std::mt19937_64 rng;
    bool settling = false;

    World(const HashDistribution& a, const std::vector<MinerStrategy>& s,
          const PropagationModel& p, std::uint64_t seed)
        : alpha(a), strategies(s), prop(p), m(a.miner_count()), honest_id(a.miner_count()), rng(seed) {
        blocks.push_back(Block{-1, -1, 0, true, false});  // genesis
        frontier = {0};
        cursor.assign(static_cast<size_t>(m), 0);
        seen_len.assign(static_cast<size_t>(m), 0);
        priv.assign(static_cast<size_t>(m), {});
    }

    double uniform01() { return static_cast<double>(rng() >> 11) * 0x1.0p-53; }

    int new_block(int parent, int owner) {
        blocks.push_back(Block{parent, owner, blocks[static_cast<size_t>(parent)].height + 1,
                               false, settling});
        return static_cast<int>(blocks.size()) - 1;
    }

    // marks the block and any unpublished ancestors public, tracking the frontier
    void publish(int b) {
        std::vector<int> chain;
        for (int x = b; !blocks[static_cast<size_t>(x)].published; x = blocks[static_cast<size_t>(x)].parent) {
            chain.push_back(x);
        }
        const int before = pub_len;
        for (auto it = chain.rbegin(); it != chain.rend(); ++it) {
            Block& blk = blocks[static_cast<size_t>(*it)];
            blk.published = true;
            if (blk.height > pub_len) {
                pub_len = blk.height;
                frontier.clear();
                frontier.push_back(*it);
            } else if (blk.height == pub_len) {
                frontier.push_back(*it);
            }
        }
        if (pub_len > before) len_log.push_back(pub_len);
    }

    // the miner has fully reacted to the public chain as of now
    void mark_seen(int miner) {
        cursor[static_cast<size_t>(miner)] = len_log.size();
        seen_len[static_cast<size_t>(miner)] = pub_len;
    }

    // tie target per the propagation model; a strategic miner with its own
    // branch in the frontier always extends it
    int pick_branch(int miner_or_honest) {
        if (frontier.size() == 1) return frontier.front();
        std::vector<int> owners;
        owners.reserve(frontier.size());
        for (int f : frontier) {
            const int o = blocks[static_cast<size_t>(f)].owner;
            owners.push_back(o == honest_id ? kHonestPool : o);
        }
        std::vector<size_t> order(owners.size());
        for (size_t i = 0; i < order.size(); ++i) order[i] = i;
        std::sort(order.begin(), order.end(), [&](size_t a, size_t b) { return owners[a] < owners[b]; });
        std::vector<int> tie;
        tie.reserve(owners.size());
        for (size_t i : order) tie.push_back(owners[i]);
        if (std::adjacent_find(tie.begin(), tie.end()) != tie.end()) {
            throw SimulationBugError("two frontier branches share an owner");
        }
        const int who = miner_or_honest == honest_id ? kHonestPool : miner_or_honest;
        const auto w = prop.branch_weights(who, tie);
        double r = uniform01();
        for (size_t k = 0; k < w.size(); ++k) {
            r -= w[k];
            if (r < 0.0) return frontier[order[k]];
        }
        return frontier[order.back()];
    }

    // pub grew by k since `miner` last looked; apply its reaction rule
    void react(int miner, int k) {
        auto& p = priv[static_cast<size_t>(miner)];
        if (p.empty() || k <= 0) return;
        const auto strat = strategies[static_cast<size_t>(miner)];
        const int lead = static_cast<int>(p.size());
        if (strat == MinerStrategy::SelfishMining && k <= std::max(lead - 2, 0)) {
            // keep the race going: release just enough to match the public tip
            const int prefix_end = p[static_cast<size_t>(k) - 1];
            publish(prefix_end);
            p.erase(p.begin(), p.begin() + k);
        } else {
            publish(p.back());
            p.clear();
        }
    }

    void cascade() {
        bool progress = true;
        while (progress) {
            progress = false;
            for (int i = 0; i < m; ++i) {
                while (cursor[static_cast<size_t>(i)] < len_log.size()) {
                    const int ev = len_log[cursor[static_cast<size_t>(i)]];
                    ++cursor[static_cast<size_t>(i)];
                    const int k = ev - seen_len[static_cast<size_t>(i)];
                    if (k <= 0) continue;
                    seen_len[static_cast<size_t>(i)] = ev;
                    react(i, k);
                    progress = true;
                }
            }
        }
    }

    void find_block(int winner) {
        if (winner == honest_id || strategies[static_cast<size_t>(winner)] == MinerStrategy::Honest) {
            const int tip = pick_branch(winner);
            const int b = new_block(tip, winner);
            publish(b);
            if (winner != honest_id) mark_seen(winner);
            cascade();
            return;
        }
        auto& p = priv[static_cast<size_t>(winner)];
        const auto strat = strategies[static_cast<size_t>(winner)];
        if (p.empty()) {
            if (frontier.size() > 1) {
                // in a tie the strategy mines publicly and resolves it
                const int tip = pick_branch(winner);
                const int b = new_block(tip, winner);
                publish(b);
                mark_seen(winner);
                cascade();
            } else {
                const int b = new_block(frontier.front(), winner);
                p.push_back(b);
                mark_seen(winner);
            }
            return;
        }
        if (strat == MinerStrategy::SemiSelfishMining && p.size() == 2) {
            // cap the private chain at two: release the oldest block
            const int b = new_block(p.back(), winner);
            p.push_back(b);
            publish(p.front());
            p.erase(p.begin());
            mark_seen(winner);
            cascade();
            return;
        }
        const int b = new_block(p.back(), winner);
        p.push_back(b);
    }

    void check_invariants() const {
        for (int i = 0; i < m; ++i) {
            if (strategies[static_cast<size_t>(i)] == MinerStrategy::SemiSelfishMining &&
                priv[static_cast<size_t>(i)].size() > 2) {
                throw SimulationBugError("semi-selfish private chain exceeded length 2");
            }
            if (strategies[static_cast<size_t>(i)] == MinerStrategy::Honest &&
                !priv[static_cast<size_t>(i)].empty()) {
                throw SimulationBugError("honest miner holds a private chain");
            }
        }
    }

    bool settled() const {
        if (frontier.size() != 1) return false;
        for (const auto& p : priv) {
            if (!p.empty()) return false;
        }
        return true;
    }
};

}  // namespace

SimResult simulate(const HashDistribution& alpha, const std::vector<MinerStrategy>& strategies,
                   const PropagationModel& prop, long long n_blocks, std::uint64_t seed) {
    const int m = alpha.miner_count();
    if (static_cast<int>(strategies.size()) != m) {
        throw DomainError("need one strategy per strategic miner");
    }
    if (m > 10) throw SizeLimitError("at most 10 strategic miners are supported");
    if (n_blocks < 10000) {
        throw DomainError("n_blocks=" + std::to_string(n_blocks) + " below the 1e4 minimum");
    }

    World w(alpha, strategies, prop, seed);
    const double beta = alpha.beta();
    (void)beta;

    for (long long step = 0; step < n_blocks; ++step) {
        double r = w.uniform01();
        int winner = w.honest_id;
        for (int i = 0; i < m; ++i) {
            r -= alpha.alpha(i);
            if (r < 0.0) {
                winner = i;
                break;
            }
        }
        w.find_block(winner);
        w.check_invariants();
    }

    // settle every fork by letting the honest pool win
    w.settling = true;
    long long max_lead = 1;
    for (const auto& p : w.priv) max_lead = std::max<long long>(max_lead, static_cast<long long>(p.size()));
    const long long budget = std::max<long long>(20, 10 * max_lead);
    long long used = 0;
    while (!w.settled()) {
        if (++used > budget) {
            throw SettlementError("forks unresolved after " + std::to_string(budget) +
                                  " forced honest blocks");
        }
        w.find_block(w.honest_id);
    }

    SimResult res;
    res.seed = seed;
    res.steps = n_blocks;
    res.counts.assign(static_cast<size_t>(m) + 1, 0);
    int tip = w.frontier.front();
    for (int x = tip; x != 0; x = w.blocks[static_cast<size_t>(x)].parent) {
        const Block& b = w.blocks[static_cast<size_t>(x)];
        if (!b.settlement) ++res.counts[static_cast<size_t>(b.owner)];
    }
    res.total_accepted = 0;
    for (long long c : res.counts) res.total_accepted += c;
    res.shares.assign(res.counts.size(), 0.0);
    if (res.total_accepted > 0) {
        for (size_t i = 0; i < res.counts.size(); ++i) {
            res.shares[i] = static_cast<double>(res.counts[i]) / static_cast<double>(res.total_accepted);
        }
    }
    return res;
}

}  // namespace ssmlab
