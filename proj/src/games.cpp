#include "ssmlab/games.hpp"

#include <algorithm>
#include <cmath>
#include <string>

namespace ssmlab {

namespace {

constexpr double kStrictImprove = 1e-12;
constexpr double kIndifference = 1e-9;
constexpr double kEndpointTol = 1e-6;
constexpr double kRefineTol = 1e-5;

std::vector<long long> cache_key(const std::vector<double>& eff) {
    std::vector<long long> k(eff.size());
    for (size_t i = 0; i < eff.size(); ++i) k[i] = std::llround(eff[i] * 1e12);
    return k;
}

}  // namespace

GameContext::GameContext(HashDistribution alpha, PropagationModel prop, TieVariant variant,
                         PartitionVariant partition)
    : alpha_(std::move(alpha)), prop_(std::move(prop)), variant_(variant), partition_(partition) {}

std::vector<double> GameContext::revenue_shares(const std::vector<double>& effective) const {
    const auto key = cache_key(effective);
    {
        std::lock_guard<std::mutex> lock(mutex_);
        auto it = cache_.find(key);
        if (it != cache_.end()) return it->second;
    }
    auto shares = relative_revenue(HashDistribution(effective), prop_, variant_).shares;
    std::lock_guard<std::mutex> lock(mutex_);
    return cache_.emplace(key, std::move(shares)).first->second;
}

std::vector<double> GameContext::ssm_game_utilities(const std::vector<std::uint8_t>& actions) const {
    const int m = miner_count();
    if (static_cast<int>(actions.size()) != m) throw DomainError("action profile has wrong miner count");
    std::vector<double> eff(static_cast<size_t>(m));
    double committed = 0.0;
    for (int i = 0; i < m; ++i) {
        if (actions[static_cast<size_t>(i)] > 1) throw DomainError("actions must be 0 (honest) or 1 (SSM)");
        eff[static_cast<size_t>(i)] = actions[static_cast<size_t>(i)] ? alpha_.alpha(i) : 0.0;
        committed += eff[static_cast<size_t>(i)];
    }
    const auto shares = revenue_shares(eff);
    std::vector<double> u(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        if (actions[static_cast<size_t>(i)]) {
            u[static_cast<size_t>(i)] = shares[static_cast<size_t>(i)];
        } else {
            u[static_cast<size_t>(i)] =
                alpha_.alpha(i) / (1.0 - committed) * shares[static_cast<size_t>(m)];
        }
    }
    return u;
}

std::vector<std::vector<std::uint8_t>> GameContext::enumerate_pne() const {
    const int m = miner_count();
    if (m > 8) throw SizeLimitError("PNE enumeration supports at most 8 miners");
    std::vector<std::vector<std::uint8_t>> pne;
    const unsigned profiles = 1u << m;
    for (unsigned bits = 0; bits < profiles; ++bits) {
        std::vector<std::uint8_t> x(static_cast<size_t>(m));
        for (int i = 0; i < m; ++i) x[static_cast<size_t>(i)] = (bits >> i) & 1u;
        const auto u = ssm_game_utilities(x);
        bool stable = true;
        for (int i = 0; i < m && stable; ++i) {
            auto y = x;
            y[static_cast<size_t>(i)] ^= 1u;
            if (ssm_game_utilities(y)[static_cast<size_t>(i)] > u[static_cast<size_t>(i)] + kStrictImprove) {
                stable = false;
            }
        }
        if (stable) pne.push_back(std::move(x));
    }
    return pne;
}

std::vector<double> GameContext::partition_utilities(const std::vector<double>& s) const {
    return partition_utilities(s, partition_);
}

std::vector<double> GameContext::partition_utilities(const std::vector<double>& s,
                                                     PartitionVariant pv) const {
    const int m = miner_count();
    if (static_cast<int>(s.size()) != m) throw DomainError("partition profile has wrong miner count");
    std::vector<double> eff(static_cast<size_t>(m));
    double committed = 0.0;
    for (int i = 0; i < m; ++i) {
        const double si = s[static_cast<size_t>(i)];
        if (!(si >= 0.0 && si <= 1.0)) throw DomainError("partition fractions must lie in [0,1]");
        eff[static_cast<size_t>(i)] = si * alpha_.alpha(i);
        committed += eff[static_cast<size_t>(i)];
    }
    const auto shares = revenue_shares(eff);
    std::vector<double> u(static_cast<size_t>(m));
    for (int i = 0; i < m; ++i) {
        const double si = s[static_cast<size_t>(i)];
        const double honest_weight = (pv == PartitionVariant::Literal) ? (1.0 - si) * (1.0 - si)
                                                                       : (1.0 - si);
        u[static_cast<size_t>(i)] =
            si * shares[static_cast<size_t>(i)] +
            honest_weight * alpha_.alpha(i) / (1.0 - committed) * shares[static_cast<size_t>(m)];
    }
    return u;
}

BestResponseResult GameContext::best_response(int miner, std::vector<double> s) const {
    if (miner < 0 || miner >= miner_count()) throw DomainError("miner index out of range");
    BestResponseResult res;
    s[static_cast<size_t>(miner)] = 0.0;
    res.utility_honest = partition_utilities(s)[static_cast<size_t>(miner)];
    s[static_cast<size_t>(miner)] = 1.0;
    res.utility_ssm = partition_utilities(s)[static_cast<size_t>(miner)];
    res.indifferent = std::abs(res.utility_ssm - res.utility_honest) <= kIndifference;
    res.action = res.utility_ssm > res.utility_honest ? 1 : 0;
    return res;
}

namespace {

// followers' binary-profile pure Nash equilibria of the subgame with the
// leader pinned at s1; empty when none exists
std::vector<std::vector<std::uint8_t>> follower_subgame_pne(const GameContext& ctx, int leader,
                                                            double s1) {
    const int m = ctx.miner_count();
    const int f = m - 1;
    std::vector<int> follower_ids;
    for (int i = 0; i < m; ++i) {
        if (i != leader) follower_ids.push_back(i);
    }
    auto full_profile = [&](unsigned bits) {
        std::vector<double> s(static_cast<size_t>(m), 0.0);
        s[static_cast<size_t>(leader)] = s1;
        for (int k = 0; k < f; ++k) {
            s[static_cast<size_t>(follower_ids[static_cast<size_t>(k)])] =
                static_cast<double>((bits >> k) & 1u);
        }
        return s;
    };
    std::vector<std::vector<std::uint8_t>> pne;
    for (unsigned bits = 0; bits < (1u << f); ++bits) {
        const auto s = full_profile(bits);
        const auto u = ctx.partition_utilities(s);
        bool stable = true;
        for (int k = 0; k < f && stable; ++k) {
            const auto dev = full_profile(bits ^ (1u << k));
            const int id = follower_ids[static_cast<size_t>(k)];
            if (ctx.partition_utilities(dev)[static_cast<size_t>(id)] >
                u[static_cast<size_t>(id)] + kStrictImprove) {
                stable = false;
            }
        }
        if (stable) {
            std::vector<std::uint8_t> y(static_cast<size_t>(f));
            for (int k = 0; k < f; ++k) y[static_cast<size_t>(k)] = (bits >> k) & 1u;
            pne.push_back(std::move(y));
        }
    }
    return pne;
}

template <typename F>
double golden_section_max(F f, double lo, double hi, double tol) {
    constexpr double inv_phi = 0.6180339887498949;
    double a = lo, b = hi;
    double x1 = b - inv_phi * (b - a);
    double x2 = a + inv_phi * (b - a);
    double f1 = f(x1), f2 = f(x2);
    while (b - a > tol) {
        if (f1 < f2) {
            a = x1;
            x1 = x2;
            f1 = f2;
            x2 = a + inv_phi * (b - a);
            f2 = f(x2);
        } else {
            b = x2;
            x2 = x1;
            f2 = f1;
            x1 = b - inv_phi * (b - a);
            f1 = f(x1);
        }
    }
    return f1 >= f2 ? x1 : x2;
}

}  // namespace

StackelbergResult GameContext::stackelberg(int leader, double grid_step,
                                           StackelbergMode mode) const {
    const int m = miner_count();
    if (leader < 0 || leader >= m) throw DomainError("leader index out of range");
    if (!(grid_step >= 1e-4 && grid_step <= 1e-2)) {
        throw DomainError("commitment grid step must lie in [1e-4, 1e-2]");
    }
    if (mode == StackelbergMode::TwoPlayerSse && m != 2) {
        throw DomainError("two-player SSE mode needs exactly 2 miners");
    }
    if (m < 2) throw DomainError("commitment search needs at least 2 miners");

    StackelbergResult out;
    std::vector<double> no_pne;

    // value of a commitment, plus the realized follower response
    auto evaluate = [&](double s1, std::vector<double>* response,
                        std::vector<double>* fvalues, double* fgap) -> double {
        if (mode == StackelbergMode::TwoPlayerSse) {
            const int follower = 1 - leader;
            std::vector<double> s(2, 0.0);
            s[static_cast<size_t>(leader)] = s1;
            s[static_cast<size_t>(follower)] = 0.0;
            const auto u0 = partition_utilities(s);
            s[static_cast<size_t>(follower)] = 1.0;
            const auto u1 = partition_utilities(s);
            const double gap = u1[static_cast<size_t>(follower)] - u0[static_cast<size_t>(follower)];
            int br;
            if (std::abs(gap) <= kIndifference) {
                // follower breaks ties in the leader's favour
                br = u1[static_cast<size_t>(leader)] >= u0[static_cast<size_t>(leader)] ? 1 : 0;
            } else {
                br = gap > 0 ? 1 : 0;
            }
            const auto& u = br ? u1 : u0;
            if (response) *response = {static_cast<double>(br)};
            if (fvalues) *fvalues = {u[static_cast<size_t>(follower)]};
            if (fgap) *fgap = gap;
            return u[static_cast<size_t>(leader)];
        }
        const auto pne = follower_subgame_pne(*this, leader, s1);
        if (pne.empty()) {
            no_pne.push_back(s1);
            if (response) response->clear();
            if (fvalues) fvalues->clear();
            if (fgap) *fgap = 0.0;
            return -1.0;  // utilities are shares in [0,1]; never selected
        }
        std::vector<int> follower_ids;
        for (int i = 0; i < m; ++i) {
            if (i != leader) follower_ids.push_back(i);
        }
        double worst = 2.0;
        std::vector<double> worst_s;
        std::vector<double> worst_u;
        for (const auto& y : pne) {
            std::vector<double> s(static_cast<size_t>(m), 0.0);
            s[static_cast<size_t>(leader)] = s1;
            for (size_t k = 0; k < y.size(); ++k) {
                s[static_cast<size_t>(follower_ids[k])] = static_cast<double>(y[k]);
            }
            const auto u = partition_utilities(s);
            if (u[static_cast<size_t>(leader)] < worst) {
                worst = u[static_cast<size_t>(leader)];
                worst_s = s;
                worst_u = u;
            }
        }
        if (response) {
            response->clear();
            for (int id : follower_ids) response->push_back(worst_s[static_cast<size_t>(id)]);
        }
        if (fvalues) {
            fvalues->clear();
            for (int id : follower_ids) fvalues->push_back(worst_u[static_cast<size_t>(id)]);
        }
        if (fgap) *fgap = 0.0;
        return worst;
    };

    double best_s1 = 0.0;
    double best_v = -2.0;
    for (double s1 = 0.0; s1 <= 1.0 + grid_step / 2; s1 += grid_step) {
        const double x = std::min(s1, 1.0);
        const double v = evaluate(x, nullptr, nullptr, nullptr);
        if (v > best_v) {
            best_v = v;
            best_s1 = x;
        }
        if (x >= 1.0) break;
    }
    if (best_v < 0.0) {
        throw NumericalError("no commitment on the grid admits a follower equilibrium");
    }

    const double lo = std::max(0.0, best_s1 - grid_step);
    const double hi = std::min(1.0, best_s1 + grid_step);
    double refined = golden_section_max(
        [&](double x) { return evaluate(x, nullptr, nullptr, nullptr); }, lo, hi, kRefineTol);
    if (evaluate(refined, nullptr, nullptr, nullptr) < best_v) refined = best_s1;
    if (std::abs(refined) <= kEndpointTol) refined = 0.0;
    if (std::abs(refined - 1.0) <= kEndpointTol) refined = 1.0;

    out.leader = leader;
    out.commitment = refined;
    out.leader_value = evaluate(refined, &out.response, &out.follower_values, &out.follower_gap);
    std::sort(no_pne.begin(), no_pne.end());
    no_pne.erase(std::unique(no_pne.begin(), no_pne.end()), no_pne.end());
    out.no_pne_commitments = std::move(no_pne);
    return out;
}

int GameContext::commitment_type(const StackelbergResult& sse) const {
    const auto pne = enumerate_pne();
    const double s1 = sse.commitment;
    const bool endpoint = std::abs(s1) <= kEndpointTol || std::abs(s1 - 1.0) <= kEndpointTol;
    if (!endpoint) return 3;

    // assemble the binary profile the SSE realizes
    std::vector<std::uint8_t> profile(static_cast<size_t>(miner_count()), 0);
    profile[static_cast<size_t>(sse.leader)] = s1 > 0.5 ? 1 : 0;
    size_t k = 0;
    for (int i = 0; i < miner_count(); ++i) {
        if (i == sse.leader) continue;
        profile[static_cast<size_t>(i)] = sse.response.size() > k && sse.response[k] > 0.5 ? 1 : 0;
        ++k;
    }
    const bool in_pne = std::find(pne.begin(), pne.end(), profile) != pne.end();
    if (in_pne) return pne.size() == 1 ? 0 : 1;
    return 2;
}

int GameContext::commitment_type(double grid_step) const {
    const auto mode = miner_count() == 2 ? StackelbergMode::TwoPlayerSse : StackelbergMode::Pessimistic;
    return commitment_type(stackelberg(0, grid_step, mode));
}

std::vector<Coalition> GameContext::penalizing_coalitions(int victim) const {
    const int m = miner_count();
    if (m > 8) throw SizeLimitError("coalition search supports at most 8 miners");
    if (victim < 0 || victim >= m) throw DomainError("victim index out of range");

    std::vector<Coalition> out;
    std::vector<std::uint8_t> honest(static_cast<size_t>(m), 0);
    const double base = ssm_game_utilities(honest)[static_cast<size_t>(victim)];

    auto solo = honest;
    solo[static_cast<size_t>(victim)] = 1;
    if (!(ssm_game_utilities(solo)[static_cast<size_t>(victim)] > base + kStrictImprove)) {
        return out;  // deviation is not unilaterally profitable, nothing to penalize
    }

    std::vector<int> others;
    for (int i = 0; i < m; ++i) {
        if (i != victim) others.push_back(i);
    }
    const unsigned subsets = 1u << others.size();
    for (unsigned bits = 1; bits < subsets; ++bits) {
        auto profile = solo;
        std::vector<int> members;
        for (size_t k = 0; k < others.size(); ++k) {
            if ((bits >> k) & 1u) {
                profile[static_cast<size_t>(others[k])] = 1;
                members.push_back(others[k]);
            }
        }
        const auto u = ssm_game_utilities(profile);
        bool credible = true;
        for (int i : members) {
            auto defect = profile;
            defect[static_cast<size_t>(i)] = 0;
            if (!(u[static_cast<size_t>(i)] >
                  ssm_game_utilities(defect)[static_cast<size_t>(i)] + kStrictImprove)) {
                credible = false;
                break;
            }
        }
        if (!credible) continue;
        if (u[static_cast<size_t>(victim)] < base - kStrictImprove) {
            out.push_back(Coalition{std::move(members), base - u[static_cast<size_t>(victim)]});
        }
    }
    return out;
}

std::optional<ThresholdResult> uniform_profitability_threshold(int miners, double tol,
                                                               const PropagationModel& prop,
                                                               TieVariant variant) {
    if (miners < 1 || miners > 8) throw SizeLimitError("threshold search supports 1..8 miners");
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");

    // by symmetry, all-SSM is a PNE iff one miner's deviation to honest does
    // not pay: margin(eta) = U_1(all-S) - U_1(H, rest S) >= 0
    auto margin = [&](double eta) {
        std::vector<double> all_s(static_cast<size_t>(miners), eta);
        const double u_s = relative_revenue(HashDistribution(all_s), prop, variant)
                               .shares[0];
        auto rest = all_s;
        rest[0] = 0.0;
        const auto shares = relative_revenue(HashDistribution(rest), prop, variant).shares;
        const double u_h =
            eta / (1.0 - eta * static_cast<double>(miners - 1)) * shares[static_cast<size_t>(miners)];
        return u_s - u_h;
    };

    constexpr double kScanStep = 0.005;
    const double hi_limit = std::min(0.5, 1.0 / static_cast<double>(miners)) - 1e-6;

    double lo = kScanStep;
    double f_lo = margin(lo);
    if (f_lo >= 0.0) {
        return ThresholdResult{lo, margin(std::max(lo / 2, 1e-4)), f_lo};
    }
    int sign_changes = 0;
    double bracket_lo = 0.0, bracket_hi = 0.0;
    double prev = lo, f_prev = f_lo;
    for (double eta = lo + kScanStep; eta < hi_limit; eta += kScanStep) {
        const double f = margin(eta);
        if ((f_prev < 0.0) != (f < 0.0)) {
            ++sign_changes;
            if (sign_changes == 1) {
                bracket_lo = prev;
                bracket_hi = eta;
            }
        }
        prev = eta;
        f_prev = f;
    }
    if (sign_changes == 0) return std::nullopt;
    if (sign_changes > 1) {
        throw NumericalError("all-SSM equilibrium condition changes sign more than once over the scan");
    }

    while (bracket_hi - bracket_lo > tol) {
        const double mid = 0.5 * (bracket_lo + bracket_hi);
        if (margin(mid) >= 0.0)
            bracket_hi = mid;
        else
            bracket_lo = mid;
    }
    // report the bracket end where the all-SSM condition provably holds
    const double eta = bracket_hi;
    const double probe = std::max(tol, 1e-6);
    ThresholdResult res;
    res.eta = eta;
    res.margin_below = margin(std::max(eta - probe, 1e-6));
    res.margin_above = margin(eta);
    return res;
}

}  // namespace ssmlab
