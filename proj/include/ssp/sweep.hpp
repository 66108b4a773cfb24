#ifndef SSP_SWEEP_HPP
#define SSP_SWEEP_HPP

#include <span>
#include <vector>

#include "ssp/shooter.hpp"

namespace ssp::sweep {

// Classification sweep over a list of shooting parameters. The entries are
// independent; the parallel kernel fans them out with OpenMP and must agree
// with the serial reference bit for bit.
std::vector<shooter::ShotOutcome> classify_serial(const ParamTriple& q,
                                                  std::span<const double> C_list,
                                                  const shooter::ShooterOptions& opts = {});

std::vector<shooter::ShotOutcome> classify_parallel(const ParamTriple& q,
                                                    std::span<const double> C_list,
                                                    const shooter::ShooterOptions& opts = {});

// Dispatches to the parallel kernel when OpenMP is available.
std::vector<shooter::ShotOutcome> classify_sweep(const ParamTriple& q,
                                                 std::span<const double> C_list,
                                                 const shooter::ShooterOptions& opts = {},
                                                 bool parallel = true);

int max_threads();

}  // namespace ssp::sweep

#endif
