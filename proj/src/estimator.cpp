#include "gw/estimator.hpp"

#include <cstdlib>
#include <string>

namespace gw {

EstimatorResult mean_result(const MomentAccumulator& acc, const McConfig& config) {
    EstimatorResult r;
    r.estimate = acc.mean;
    r.std_error = acc.std_error();
    r.n_samples = acc.n;
    r.censor_lo = acc.mean;
    r.censor_hi = acc.mean;
    r.seed = config.seed;
    r.stream_base = config.stream_base;
    return r;
}

double ks_distance(std::vector<double> sample, const std::function<double(double)>& cdf) {
    if (sample.empty()) return 0.0;
    std::sort(sample.begin(), sample.end());
    const double n = static_cast<double>(sample.size());
    double d = 0.0;
    for (std::size_t i = 0; i < sample.size(); ++i) {
        const double f = cdf(sample[i]);
        d = std::max(d, std::max(static_cast<double>(i + 1) / n - f, f - static_cast<double>(i) / n));
    }
    return d;
}

unsigned workers_from_env() {
    const char* env = std::getenv("GW_WINDOW_WORKERS");
    if (!env || !*env) return 1;
    try {
        const long v = std::stol(env);
        return v >= 1 ? static_cast<unsigned>(v) : 1u;
    } catch (...) {
        return 1;
    }
}

}  // namespace gw
