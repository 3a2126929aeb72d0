#include <map>
#include <numeric>
#include <stdexcept>

#include "gw/exact_engine.hpp"
#include "gw/simd/kernels.hpp"

namespace gw {

ProbabilityInterval window_tail_bruteforce(const OffspringLaw& law, std::size_t j, std::size_t n,
                                           const WindowTailBudget& budget) {
    if (j < 1 || n < 1) throw std::invalid_argument("window_tail_bruteforce: need j, n >= 1");
    if (n <= 1) return {1.0, 1.0, 0, 1};

    // conv[z][k] = P(xi_1 + ... + xi_z = k) for k < n.
    std::vector<double> pmf(n, 0.0);
    for (std::size_t k = 0; k < n; ++k) pmf[k] = law.pmf(k);
    std::vector<std::vector<double>> conv(n);
    conv[1] = pmf;
    for (std::size_t z = 2; z < n; ++z) {
        conv[z].assign(n, 0.0);
        for (std::size_t e = 0; e < n; ++e) conv[z][e] = simd::convolve_at(conv[z - 1], pmf, 0, e, e);
    }

    using State = std::vector<std::uint32_t>;
    const std::size_t width = std::max<std::size_t>(1, j - 1);
    std::map<State, double> current;
    State start(width, 0);
    start.back() = 1;
    current[start] = 1.0;

    double yes = 0.0;
    double slack = 0.0;
    std::size_t generation = 0;
    std::size_t peak = 1;
    while (!current.empty() && generation < budget.max_generations) {
        std::map<State, double> next;
        for (const auto& [state, p] : current) {
            const std::size_t z = state.back();
            const std::size_t partial =
                j == 1 ? 0 : std::accumulate(state.begin(), state.end(), std::size_t{0});
            const std::size_t limit = n - partial;  // z' >= limit decides yes
            const auto& row = conv[z];
            double kept = row[0];
            for (std::size_t zp = 1; zp < limit; ++zp) {
                const double pr = row[zp];
                kept += pr;
                if (pr == 0.0) continue;
                State succ(width);
                if (width > 1) std::copy(state.begin() + 1, state.end(), succ.begin());
                succ.back() = static_cast<std::uint32_t>(zp);
                next[succ] += p * pr;
            }
            yes += p * std::max(0.0, 1.0 - kept);
        }
        ++generation;
        for (auto it = next.begin(); it != next.end();) {
            if (it->second < budget.prune_threshold) {
                slack += it->second;
                it = next.erase(it);
            } else {
                ++it;
            }
        }
        peak = std::max(peak, next.size());
        current.swap(next);
        if (current.size() > budget.max_states) break;
    }
    double alive = 0.0;
    for (const auto& [state, p] : current) alive += p;
    return {yes, std::min(1.0, yes + slack + alive), generation, peak};
}

}  // namespace gw
