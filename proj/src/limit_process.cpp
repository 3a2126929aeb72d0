#include "gw/limit_process.hpp"

#include <algorithm>
#include <cmath>
#include <random>
#include <stdexcept>

#include "gw/exact_engine.hpp"
#include "gw/simd/kernels.hpp"
#include "gw/simulator.hpp"

namespace gw {

namespace {

std::size_t cells_for(double T, double spacing) {
    return static_cast<std::size_t>(std::llround(T / spacing));
}

double max_of(const std::vector<double>& Ts) {
    if (Ts.empty()) throw std::invalid_argument("need at least one horizon T");
    for (double T : Ts)
        if (!(T >= 1.0)) throw std::invalid_argument("horizon T must be >= 1");
    return *std::max_element(Ts.begin(), Ts.end());
}

using Accs = std::vector<MomentAccumulator>;

void merge_all(Accs& a, const Accs& b) {
    if (a.empty()) a.resize(b.size());
    for (std::size_t i = 0; i < b.size(); ++i) a[i].merge(b[i]);
}

std::vector<EstimatorResult> to_results(const Accs& accs, const McConfig& config) {
    std::vector<EstimatorResult> out;
    for (const auto& a : accs) out.push_back(mean_result(a, config));
    return out;
}

}  // namespace

std::vector<double> LimitPathGrid::times() const {
    std::vector<double> t(values.size());
    for (std::size_t k = 0; k < t.size(); ++k) t[k] = spacing * static_cast<double>(k);
    return t;
}

LimitPathGrid gw_limit_path(const OffspringLaw& law, double T, std::size_t n_scale, double q_n,
                            RngStream& rng) {
    if (!(T >= 1.0)) throw std::invalid_argument("gw_limit_path: T must be >= 1");
    if (n_scale < 1) throw std::invalid_argument("gw_limit_path: n_scale must be >= 1");
    const double spacing = 1.0 / static_cast<double>(n_scale);
    const std::size_t cells = cells_for(T, spacing);
    const Trajectory traj = simulate_conditioned(law, n_scale, rng, 1000000000, cells - 1);
    LimitPathGrid path;
    path.spacing = spacing;
    path.source = PathSource::gw_approx;
    path.resolution = static_cast<double>(n_scale);
    path.values.assign(cells, 0.0);
    const std::size_t known = std::min(cells, traj.sizes.size());
    for (std::size_t k = 0; k < known; ++k) path.values[k] = q_n * static_cast<double>(traj.sizes[k]);
    return path;
}

double vstar_of_path(const LimitPathGrid& path, double T) {
    if (T < 0.0) T = path.horizon();
    if (!(T >= 1.0 - 1e-12)) throw std::invalid_argument("vstar_of_path: T must be >= 1");
    const std::size_t cells = cells_for(T, path.spacing);
    const std::size_t width = cells_for(1.0, path.spacing);
    if (cells > path.values.size()) throw std::invalid_argument("vstar_of_path: T beyond the path");
    if (width < 1 || width > cells) throw std::invalid_argument("vstar_of_path: grid too coarse");
    std::vector<double> prefix(cells + 1, 0.0);
    for (std::size_t k = 0; k < cells; ++k) prefix[k + 1] = prefix[k] + path.values[k];
    return path.spacing * simd::window_max(std::span<const double>(prefix), width);
}

double integral_of_path(const LimitPathGrid& path, double T) {
    if (T < 0.0) T = path.horizon();
    const std::size_t cells = std::min(cells_for(T, path.spacing), path.values.size());
    double acc = 0.0;
    for (std::size_t k = 0; k < cells; ++k) acc += path.values[k];
    return path.spacing * acc;
}

std::vector<EstimatorResult> estimate_EVstar(const OffspringLaw& law, const std::vector<double>& Ts,
                                             std::size_t n_scale, std::uint64_t n_paths,
                                             const McConfig& config) {
    const double t_max = max_of(Ts);
    const double q_n = iterate_extinction(law, n_scale).Q_values[n_scale];
    auto body = [&](RngStream& rng, std::uint64_t, std::uint64_t count) {
        Accs accs(Ts.size());
        for (std::uint64_t s = 0; s < count; ++s) {
            const LimitPathGrid path = gw_limit_path(law, t_max, n_scale, q_n, rng);
            for (std::size_t i = 0; i < Ts.size(); ++i) accs[i].add(vstar_of_path(path, Ts[i]));
        }
        return accs;
    };
    return to_results(chunked_map_reduce<Accs>(n_paths, config, body, merge_all), config);
}

EstimatorResult estimate_path_value_at_one(const OffspringLaw& law, std::size_t n_scale,
                                           std::uint64_t n_paths, const McConfig& config) {
    const double q_n = iterate_extinction(law, n_scale).Q_values[n_scale];
    auto body = [&](RngStream& rng, std::uint64_t, std::uint64_t count) {
        MomentAccumulator acc;
        for (std::uint64_t s = 0; s < count; ++s) {
            const Trajectory t = simulate_conditioned(law, n_scale, rng);
            acc.add(q_n * static_cast<double>(t.sizes[n_scale]));
        }
        return acc;
    };
    const auto acc = chunked_map_reduce<MomentAccumulator>(
        n_paths, config, body, [](MomentAccumulator& a, const MomentAccumulator& b) { a.merge(b); });
    return mean_result(acc, config);
}

EstimatorResult estimate_phi(const OffspringLaw& law, double eta, std::size_t n_scale,
                             std::uint64_t n_paths, const McConfig& config) {
    if (!(eta > 0.0 && eta <= 1.0)) throw std::invalid_argument("estimate_phi: eta in (0, 1]");
    EstimatorResult r = estimate_EVstar(law, {1.0 / eta}, n_scale, n_paths, config).front();
    const double alpha = law.alpha();
    const double shift = alpha / (2.0 * alpha + 1.0);
    r.estimate += shift;
    r.censor_lo += shift;
    r.censor_hi += shift;
    return r;
}

std::vector<PsiEstimate> estimate_psi(const OffspringLaw& law, const std::vector<double>& ys,
                                      double T_cutoff, std::size_t n_scale, std::uint64_t n_paths,
                                      const McConfig& config) {
    if (!(T_cutoff >= 4.0)) throw std::invalid_argument("estimate_psi: T_cutoff must be >= 4");
    for (double y : ys)
        if (!(y > 0.0)) throw std::invalid_argument("estimate_psi: y must be positive");
    const double alpha = law.alpha();
    const std::size_t long_n = cells_for(T_cutoff, 1.0 / static_cast<double>(n_scale));
    const auto Q = iterate_extinction(law, long_n).Q_values;
    const double q_n = Q[n_scale];

    double c = 0.0;
    for (std::size_t T = 1; static_cast<double>(T) <= T_cutoff; ++T)
        c = std::max(c, Q[T * n_scale] / q_n * std::pow(static_cast<double>(T), 1.0 / alpha));
    const double bias = c * std::pow(T_cutoff, -1.0 / alpha);

    // Per y: indicator of V* >= 1/y, indicator of the integral >= 1/y, and
    // their difference.
    auto body = [&](RngStream& rng, std::uint64_t, std::uint64_t count) {
        Accs accs(3 * ys.size());
        for (std::uint64_t s = 0; s < count; ++s) {
            const LimitPathGrid path = gw_limit_path(law, T_cutoff, n_scale, q_n, rng);
            const double v = vstar_of_path(path);
            const double integral = integral_of_path(path);
            for (std::size_t i = 0; i < ys.size(); ++i) {
                const double threshold = 1.0 / ys[i];
                const double a = v >= threshold ? 1.0 : 0.0;
                const double b = integral >= threshold ? 1.0 : 0.0;
                accs[3 * i].add(a);
                accs[3 * i + 1].add(b);
                accs[3 * i + 2].add(a - b);
            }
        }
        return accs;
    };
    const Accs accs = chunked_map_reduce<Accs>(n_paths, config, body, merge_all);

    std::vector<PsiEstimate> out;
    for (std::size_t i = 0; i < ys.size(); ++i) {
        PsiEstimate p;
        p.y = ys[i];
        p.term1 = accs[3 * i].mean;
        p.term2 = tail_constants(alpha, ys[i]).term2_constant;
        p.term3 = accs[3 * i + 1].mean;
        p.result = mean_result(accs[3 * i + 2], config);
        p.result.estimate = p.term1 + p.term2 - p.term3;
        p.result.censor_lo = p.result.estimate;
        p.result.censor_hi = p.result.estimate;
        p.cutoff_bias_bound = bias;
        out.push_back(p);
    }
    return out;
}

double csbp_alpha1_transition(double x, double t, RngStream& rng) {
    if (!(t > 0.0)) throw std::invalid_argument("csbp_alpha1_transition: t must be positive");
    if (!(x > 0.0)) return 0.0;
    std::poisson_distribution<long long> jumps(x / t);
    const long long n = jumps(rng);
    if (n == 0) return 0.0;
    std::gamma_distribution<double> size(static_cast<double>(n), t);
    return size(rng);
}

LimitPathGrid csbp_alpha1_path(double T, double dt, RngStream& rng) {
    if (!(T >= 1.0)) throw std::invalid_argument("csbp_alpha1_path: T must be >= 1");
    if (!(dt > 0.0 && dt <= 0.01)) throw std::invalid_argument("csbp_alpha1_path: need dt <= 0.01");
    const std::size_t steps_to_one = cells_for(1.0, dt);
    const double step = 1.0 / static_cast<double>(steps_to_one);
    const std::size_t cells = cells_for(T, step);

    LimitPathGrid path;
    path.spacing = step;
    path.source = PathSource::csbp_exact_alpha1;
    path.resolution = step;
    path.values.assign(cells, 0.0);

    auto h = [&](std::size_t k, double y) {
        if (k >= steps_to_one) return y > 0.0 ? 1.0 : 0.0;
        const double t = static_cast<double>(k) * step;
        return -std::expm1(-y / (1.0 - t));
    };

    // First grid point: density proportional to exp(-y/t) (1 - exp(-y/(1-t))).
    double y = 0.0;
    {
        std::exponential_distribution<double> envelope(1.0 / step);
        for (;;) {
            y = envelope(rng);
            if (rng.uniform() < h(1, y)) break;
        }
    }
    if (cells > 1) path.values[1] = y;
    for (std::size_t k = 2; k < std::max(cells, steps_to_one + 1); ++k) {
        if (k <= steps_to_one) {
            double proposal;
            do {
                proposal = csbp_alpha1_transition(y, step, rng);
            } while (!(rng.uniform() < h(k, proposal)));
            y = proposal;
        } else {
            y = csbp_alpha1_transition(y, step, rng);
        }
        if (k < cells) path.values[k] = y;
    }
    return path;
}

std::vector<EstimatorResult> csbp_alpha1_vstar(const std::vector<double>& Ts, double dt,
                                               std::uint64_t n_paths, const McConfig& config) {
    const double t_max = max_of(Ts);
    auto body = [&](RngStream& rng, std::uint64_t, std::uint64_t count) {
        Accs accs(Ts.size());
        for (std::uint64_t s = 0; s < count; ++s) {
            const LimitPathGrid path = csbp_alpha1_path(t_max, dt, rng);
            for (std::size_t i = 0; i < Ts.size(); ++i) accs[i].add(vstar_of_path(path, Ts[i]));
        }
        return accs;
    };
    return to_results(chunked_map_reduce<Accs>(n_paths, config, body, merge_all), config);
}

}  // namespace gw
