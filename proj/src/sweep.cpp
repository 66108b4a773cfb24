#include "ssp/sweep.hpp"

#ifdef _OPENMP
#include <omp.h>
#endif

namespace ssp::sweep {

std::vector<shooter::ShotOutcome> classify_serial(const ParamTriple& q,
                                                  std::span<const double> C_list,
                                                  const shooter::ShooterOptions& opts) {
    std::vector<shooter::ShotOutcome> out(C_list.size());
    for (std::size_t i = 0; i < C_list.size(); ++i)
        out[i] = shooter::classify(shooter::LaunchSpec{C_list[i], opts.delta, q}, opts);
    return out;
}

std::vector<shooter::ShotOutcome> classify_parallel(const ParamTriple& q,
                                                    std::span<const double> C_list,
                                                    const shooter::ShooterOptions& opts) {
    std::vector<shooter::ShotOutcome> out(C_list.size());
#ifdef _OPENMP
#pragma omp parallel for schedule(dynamic)
#endif
    for (long long i = 0; i < static_cast<long long>(C_list.size()); ++i) {
        const auto idx = static_cast<std::size_t>(i);
        out[idx] = shooter::classify(shooter::LaunchSpec{C_list[idx], opts.delta, q}, opts);
    }
    return out;
}

std::vector<shooter::ShotOutcome> classify_sweep(const ParamTriple& q,
                                                 std::span<const double> C_list,
                                                 const shooter::ShooterOptions& opts,
                                                 bool parallel) {
    return parallel ? classify_parallel(q, C_list, opts)
                    : classify_serial(q, C_list, opts);
}

int max_threads() {
#ifdef _OPENMP
    return omp_get_max_threads();
#else
    return 1;
#endif
}

}  // namespace ssp::sweep
