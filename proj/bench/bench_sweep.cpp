// Benchmark comparing the OpenMP classification sweep against the serial
// reference on a grid of shooting parameters.
#include <chrono>
#include <cstdio>
#include <vector>

#include "ssp/sweep.hpp"

using Clock = std::chrono::steady_clock;

static double seconds_since(Clock::time_point t0) {
    return std::chrono::duration<double>(Clock::now() - t0).count();
}

int main(int argc, char** argv) {
    int n = argc > 1 ? std::atoi(argv[1]) : 64;
    const ssp::ParamTriple q{2.0, 20.0, 10.0};
    std::vector<double> Cs;
    Cs.reserve(static_cast<std::size_t>(n));
    for (int i = 0; i < n; ++i) Cs.push_back(1.2 + 48.8 * i / (n - 1.0));

    ssp::shooter::ShooterOptions opts;
    opts.tol = {1e-8, 1e-10};

    auto t0 = Clock::now();
    auto serial = ssp::sweep::classify_serial(q, Cs, opts);
    const double ts = seconds_since(t0);

    t0 = Clock::now();
    auto parallel = ssp::sweep::classify_parallel(q, Cs, opts);
    const double tp = seconds_since(t0);

    int mismatches = 0;
    for (std::size_t i = 0; i < serial.size(); ++i) {
        const auto& a = serial[i];
        const auto& b = parallel[i];
        if (a.classification != b.classification || a.oscillations != b.oscillations ||
            a.trajectory.samples.size() != b.trajectory.samples.size() ||
            a.trajectory.back().y != b.trajectory.back().y)
            ++mismatches;
    }

    std::printf("sweep of %d launches, %d thread(s)\n", n, ssp::sweep::max_threads());
    std::printf("  serial   %8.3f s\n", ts);
    std::printf("  parallel %8.3f s   speedup %.2fx\n", tp, ts / tp);
    std::printf("  mismatches %d\n", mismatches);
    return mismatches == 0 ? 0 : 1;
}
