#include "ssmlab/chain.hpp"

#include <Eigen/SparseLU>
#include <algorithm>
#include <cmath>
#include <map>
#include <string>

namespace ssmlab {

std::vector<int> LeadState::ones() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(leads.size()); ++i) {
        if (leads[static_cast<size_t>(i)] == 1) out.push_back(i);
    }
    return out;
}

std::vector<int> LeadState::twos() const {
    std::vector<int> out;
    for (int i = 0; i < static_cast<int>(leads.size()); ++i) {
        if (leads[static_cast<size_t>(i)] == 2) out.push_back(i);
    }
    return out;
}

int LeadState::total_lead() const {
    int t = 0;
    for (auto l : leads) t += l;
    return t;
}

std::vector<LeadState> enumerate_states(int miner_count) {
    if (miner_count < 1 || miner_count > 10) {
        throw SizeLimitError("miner count " + std::to_string(miner_count) +
                             " outside supported range 1..10 (3^m states)");
    }
    std::vector<LeadState> states;
    std::vector<std::uint8_t> cur(static_cast<size_t>(miner_count), 0);
    size_t n = 1;
    for (int i = 0; i < miner_count; ++i) n *= 3;
    states.reserve(n);
    for (size_t k = 0; k < n; ++k) {
        states.push_back(LeadState{cur});
        for (int i = miner_count - 1; i >= 0; --i) {
            auto& d = cur[static_cast<size_t>(i)];
            if (d < 2) {
                ++d;
                break;
            }
            d = 0;
        }
    }
    std::stable_sort(states.begin(), states.end(), [](const LeadState& a, const LeadState& b) {
        if (a.total_lead() != b.total_lead()) return a.total_lead() < b.total_lead();
        return a.leads < b.leads;
    });
    return states;
}

int ChainModel::index_of(const LeadState& s) const {
    for (int i = 0; i < static_cast<int>(states.size()); ++i) {
        if (states[static_cast<size_t>(i)] == s) return i;
    }
    throw DomainError("lead state not part of this chain");
}

namespace {

struct StateIndex {
    std::map<std::vector<std::uint8_t>, int> by_leads;
    int at(const std::vector<std::uint8_t>& l) const { return by_leads.at(l); }
};

}  // namespace

ChainModel transition_matrix(const HashDistribution& alpha) {
    for (double a : alpha.alphas()) {
        if (a == 0.0) throw DomainError("inactive miner present; project it out before building the chain");
    }
    const int m = alpha.miner_count();
    ChainModel model;
    model.miner_count = m;
    model.states = enumerate_states(m);
    const int n = static_cast<int>(model.states.size());

    StateIndex index;
    for (int i = 0; i < n; ++i) index.by_leads[model.states[static_cast<size_t>(i)].leads] = i;

    const double beta = alpha.beta();
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(n) * static_cast<size_t>(m + 2));

    for (int col = 0; col < n; ++col) {
        const LeadState& x = model.states[static_cast<size_t>(col)];
        const auto A = x.ones();
        const auto B = x.twos();
        auto add = [&](const std::vector<std::uint8_t>& to, double p) {
            trip.emplace_back(index.at(to), col, p);
        };
        auto bump = [&](int i) {
            auto t = x.leads;
            ++t[static_cast<size_t>(i)];
            return t;
        };
        const std::vector<std::uint8_t> zero(static_cast<size_t>(m), 0);

        if (B.empty()) {
            // Everyone has room to extend a private chain; the honest pool's
            // block flushes every nonzero lead and the ensuing race settles in
            // the next turn.
            for (int i = 0; i < m; ++i) add(bump(i), alpha.alpha(i));
            add(zero, beta);
        } else if (A.empty() && B.size() == 1) {
            const int j = B.front();
            for (int i = 0; i < m; ++i) {
                if (i != j) add(bump(i), alpha.alpha(i));
            }
            add(x.leads, alpha.alpha(j));  // j publishes its oldest block, lead stays 2
            add(zero, beta);
        } else if (B.size() > 1) {
            for (int i = 0; i < m; ++i) {
                if (std::find(B.begin(), B.end(), i) == B.end()) add(bump(i), alpha.alpha(i));
            }
            double mass = beta;
            for (int j : B) mass += alpha.alpha(j);
            add(zero, mass);
        } else {
            // One miner at lead 2, at least one at lead 1. A find by j opens a
            // race against the lead-1 chains; j either extends to keep a clean
            // lead of 2 or flushes everything.
            const int j = B.front();
            for (int i = 0; i < m; ++i) {
                if (i != j) add(bump(i), alpha.alpha(i));
            }
            const double aj = alpha.alpha(j);
            std::vector<std::uint8_t> twoj(static_cast<size_t>(m), 0);
            twoj[static_cast<size_t>(j)] = 2;
            add(twoj, aj * aj);
            add(zero, beta + aj * (1.0 - aj));
        }
    }

    model.P.resize(n, n);
    model.P.setFromTriplets(trip.begin(), trip.end());
    model.P.makeCompressed();
    return model;
}

Eigen::VectorXd steady_state(const ChainModel& model) {
    const int n = static_cast<int>(model.states.size());
    if (n == 1) {
        Eigen::VectorXd pi(1);
        pi[0] = 1.0;
        return pi;
    }

    // (P - I) pi = 0 plus normalization. The equation for the all-zero state
    // is redundant (columns of P - I sum to zero), so drop it along with that
    // state's column: with pi_0 pinned to 1, the remaining block is a
    // nonsingular M-matrix and stays sparse. Normalize afterwards.
    const int r = n - 1;
    std::vector<Eigen::Triplet<double>> trip;
    trip.reserve(static_cast<size_t>(model.P.nonZeros()));
    Eigen::VectorXd rhs = Eigen::VectorXd::Zero(r);
    for (int col = 0; col < n; ++col) {
        bool diag_seen = false;
        for (Eigen::SparseMatrix<double>::InnerIterator it(model.P, col); it; ++it) {
            if (it.row() == 0) continue;
            if (col == 0) {
                rhs[it.row() - 1] -= it.value();
                continue;
            }
            double v = it.value();
            if (it.row() == col) {
                v -= 1.0;
                diag_seen = true;
            }
            trip.emplace_back(it.row() - 1, col - 1, v);
        }
        if (col != 0 && !diag_seen) trip.emplace_back(col - 1, col - 1, -1.0);
    }
    Eigen::SparseMatrix<double> A(r, r);
    A.setFromTriplets(trip.begin(), trip.end());
    A.makeCompressed();

    Eigen::SparseLU<Eigen::SparseMatrix<double>> solver;
    solver.analyzePattern(A);
    solver.factorize(A);
    if (solver.info() != Eigen::Success) {
        throw NumericalError("stationary solve failed: singular factorization");
    }
    const Eigen::VectorXd x = solver.solve(rhs);

    Eigen::VectorXd pi(n);
    pi[0] = 1.0;
    pi.tail(r) = x;
    pi /= pi.sum();

    double residual = (model.P * pi - pi).lpNorm<Eigen::Infinity>();
    double drift = std::abs(pi.sum() - 1.0);
    if (!(residual <= 1e-12) || !(drift <= 1e-12)) {
        throw NumericalError("stationary solve residual above tolerance", std::max(residual, drift));
    }
    for (int i = 0; i < n; ++i) {
        if (pi[i] < 0.0) {
            if (pi[i] < -1e-15) throw NumericalError("stationary distribution has a negative entry", -pi[i]);
            pi[i] = 0.0;
        }
    }
    return pi;
}

ChainModel solved_chain(const HashDistribution& alpha) {
    ChainModel model = transition_matrix(alpha);
    model.pi = steady_state(model);
    return model;
}

}  // namespace ssmlab
