#include "ssmlab/closedform.hpp"

#include <cmath>
#include <string>

namespace ssmlab {

namespace {

void check_query(double alpha, double gamma) {
    if (!(alpha > 0.0 && alpha <= 0.5)) {
        throw DomainError("alpha=" + std::to_string(alpha) + " out of (0,0.5]");
    }
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw DomainError("gamma=" + std::to_string(gamma) + " out of [0,1]");
    }
}

}  // namespace

double sm_relative_revenue(double alpha, double gamma) {
    check_query(alpha, gamma);
    const double a = alpha;
    const double num = a * (1 - a) * (1 - a) * (4 * a + gamma * (1 - 2 * a)) - a * a * a;
    const double den = 1 - a * (1 + (2 - a) * a);
    if (!(den > 0.0)) throw DomainError("degenerate denominator outside the valid domain");
    return num / den;
}

SsmBlockRates ssm_block_rates(double alpha, double gamma) {
    check_query(alpha, gamma);
    const double a = alpha;
    const double own =
        (2 - gamma) * a * a * a * a + (3 * gamma - 5) * a * a * a + (4 - 3 * gamma) * a * a + gamma * a;
    const double others = (1 - a) * (1 - a) * ((gamma - 2) * a * a + (2 - gamma) * a + 1);
    return {own, others};
}

double ssm_relative_revenue(double alpha, double gamma) {
    check_query(alpha, gamma);
    const double a = alpha;
    const double num = a * (a * (a * (2 * a - 5) + 4) - (a - 1) * (a - 1) * (a - 1) * gamma);
    const double den = (a - 1) * a * a + 1;
    if (!(den > 0.0)) throw DomainError("degenerate denominator outside the valid domain");
    return num / den;
}

std::optional<double> profitability_root(Strategy strategy, double gamma, double tol) {
    if (!(gamma >= 0.0 && gamma <= 1.0)) {
        throw DomainError("gamma=" + std::to_string(gamma) + " out of [0,1]");
    }
    if (!(tol > 0.0)) throw DomainError("tolerance must be positive");
    auto margin = [&](double a) {
        return (strategy == Strategy::SelfishMining ? sm_relative_revenue(a, gamma)
                                                    : ssm_relative_revenue(a, gamma)) -
               a;
    };

    constexpr double kScanStep = 0.005;
    constexpr double kLo = 1e-9;
    double prev_a = kLo;
    double prev_f = margin(prev_a);
    if (prev_f >= 0.0) return prev_a;  // profitable from the outset

    double lo = 0.0, hi = 0.0;
    bool found = false;
    for (double a = kScanStep; a < 0.5 + kScanStep / 2; a += kScanStep) {
        const double x = std::min(a, 0.5);
        const double f = margin(x);
        if (!found && prev_f < 0.0 && f >= 0.0) {
            lo = prev_a;
            hi = x;
            found = true;
        }
        prev_a = x;
        prev_f = f;
        if (x >= 0.5) break;
    }
    if (!found) return std::nullopt;

    while (hi - lo > tol) {
        const double mid = 0.5 * (lo + hi);
        if (margin(mid) >= 0.0)
            hi = mid;
        else
            lo = mid;
    }
    return 0.5 * (lo + hi);
}

}  // namespace ssmlab
