#include "ssmlab/propagation.hpp"

#include <algorithm>
#include <cmath>
#include <sstream>

namespace ssmlab {

namespace {

// display order puts the honest pool last, matching the file format ("1,3,H")
std::string tie_name(const std::vector<int>& tie) {
    std::ostringstream os;
    bool first = true;
    for (int id : tie) {
        if (id == kHonestPool) continue;
        if (!first) os << ",";
        os << id + 1;
        first = false;
    }
    if (!tie.empty() && tie.front() == kHonestPool) {
        if (!first) os << ",";
        os << "H";
    }
    return os.str();
}

}  // namespace

PropagationModel PropagationModel::uniform() {
    PropagationModel m;
    m.kind_ = Kind::Uniform;
    return m;
}

PropagationModel PropagationModel::two_way_gamma(double gamma) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) throw DomainError("gamma must lie in [0,1]");
    PropagationModel m;
    m.kind_ = Kind::TwoWayGamma;
    m.gamma_ = gamma;
    return m;
}

PropagationModel PropagationModel::explicit_table(Table table) {
    for (auto& [tie, entry] : table) {
        if (tie.empty()) throw PropagationTableError("tie set \"\" is empty");
        if (!std::is_sorted(tie.begin(), tie.end()) ||
            std::adjacent_find(tie.begin(), tie.end()) != tie.end()) {
            throw PropagationTableError("tie set \"" + tie_name(tie) + "\" must be sorted and duplicate-free");
        }
        for (auto& [miner, row] : entry.rows) {
            double sum = 0.0;
            for (auto& [branch, w] : row.weights) {
                if (!std::binary_search(tie.begin(), tie.end(), branch)) {
                    throw PropagationTableError("table[\"" + tie_name(tie) + "\"], row \"" +
                                                (miner == kHonestPool ? std::string("H") : std::to_string(miner + 1)) +
                                                "\": weight on \"" +
                                                (branch == kHonestPool ? std::string("H") : std::to_string(branch + 1)) +
                                                "\" which is not a branch of this tie");
                }
                if (!(w >= 0.0)) {
                    throw PropagationTableError("table[\"" + tie_name(tie) + "\"], row \"" +
                                                (miner == kHonestPool ? std::string("H") : std::to_string(miner + 1)) +
                                                "\": negative weight");
                }
                sum += w;
            }
            if (std::abs(sum - 1.0) > 1e-9) {
                std::ostringstream os;
                os << "table[\"" << tie_name(tie) << "\"], row \""
                   << (miner == kHonestPool ? std::string("H") : std::to_string(miner + 1))
                   << "\": weights sum to " << sum << ", expected 1";
                throw PropagationTableError(os.str());
            }
            if (miner != kHonestPool && std::binary_search(tie.begin(), tie.end(), miner)) {
                auto it = row.weights.find(miner);
                if (it == row.weights.end() || std::abs(it->second - 1.0) > 1e-9) {
                    throw PropagationTableError("table[\"" + tie_name(tie) + "\"], row \"" +
                                                std::to_string(miner + 1) +
                                                "\": a strategic tie participant must put weight 1 on its own branch");
                }
            }
        }
    }
    PropagationModel m;
    m.kind_ = Kind::ExplicitTable;
    m.table_ = std::move(table);
    return m;
}

std::vector<double> PropagationModel::branch_weights(int miner, const std::vector<int>& tie) const {
    if (tie.empty()) throw DomainError("tie set is empty");
    const size_t n = tie.size();
    std::vector<double> w(n, 0.0);

    // committed strategic participant mines its own branch, in every model
    if (miner != kHonestPool) {
        auto it = std::find(tie.begin(), tie.end(), miner);
        if (it != tie.end()) {
            w[static_cast<size_t>(it - tie.begin())] = 1.0;
            return w;
        }
    }

    if (kind_ == Kind::ExplicitTable) {
        auto entry = table_.find(tie);
        if (entry == table_.end()) {
            throw PropagationTableError("table has no entry for tie set \"" + tie_name(tie) + "\"");
        }
        auto row = entry->second.rows.find(miner);
        if (row != entry->second.rows.end()) {
            for (size_t k = 0; k < n; ++k) {
                auto f = row->second.weights.find(tie[k]);
                w[k] = (f == row->second.weights.end()) ? 0.0 : f->second;
            }
            return w;
        }
        // fall through to the uniform rule for miners without a row
    }

    if (kind_ == Kind::TwoWayGamma && n == 2 && tie[0] == kHonestPool && tie[1] != kHonestPool) {
        w[0] = 1.0 - gamma_;
        w[1] = gamma_;
        return w;
    }

    for (size_t k = 0; k < n; ++k) w[k] = 1.0 / static_cast<double>(n);
    return w;
}

PropagationModel PropagationModel::project(const std::vector<int>& kept) const {
    if (kind_ != Kind::ExplicitTable) return *this;
    std::map<int, int> remap;
    remap[kHonestPool] = kHonestPool;
    for (size_t p = 0; p < kept.size(); ++p) remap[kept[p]] = static_cast<int>(p);

    Table out;
    for (const auto& [tie, entry] : table_) {
        std::vector<int> nt;
        bool keep = true;
        for (int id : tie) {
            auto it = remap.find(id);
            if (it == remap.end()) {
                keep = false;  // refers to a projected-out miner; unreachable tie
                break;
            }
            nt.push_back(it->second);
        }
        if (!keep) continue;
        std::sort(nt.begin(), nt.end());
        TableEntry ne;
        for (const auto& [miner, row] : entry.rows) {
            auto mi = remap.find(miner);
            if (mi == remap.end()) continue;
            TableRow nr;
            for (const auto& [branch, weight] : row.weights) nr.weights[remap.at(branch)] = weight;
            ne.rows[mi->second] = nr;
        }
        out[nt] = ne;
    }
    PropagationModel m;
    m.kind_ = Kind::ExplicitTable;
    m.table_ = std::move(out);
    return m;
}

std::string PropagationModel::describe() const {
    switch (kind_) {
        case Kind::Uniform: return "uniform";
        case Kind::TwoWayGamma: {
            std::ostringstream os;
            os << "gamma=" << gamma_;
            return os.str();
        }
        case Kind::ExplicitTable: return "table";
    }
    return "?";
}

}  // namespace ssmlab
