// kernel_dynamics.hpp: the emitter amplitude from the exact memory-kernel
// equation, solved by product-trapezoidal Volterra quadrature.

#pragma once

#include <cstdint>
#include <iosfwd>
#include <vector>

#include "crq/lattice.hpp"
#include "crq/trajectory.hpp"

namespace crq {

/// Largest number of time samples solve_volterra accepts (O(M^2) history sum).
inline constexpr long long kVolterraBudget = 30000;

/// K(s_j) = (1/N) sum_{k,pm} |alpha_k^pm|^2 e^{-i E_k^pm s_j}, s_j = j dt.
struct MemoryKernel {
    std::vector<cd> samples;
    double dt = 0.0;
    std::uint64_t params_hash = 0;

    std::size_t size() const noexcept { return samples.size(); }
    /// Time span covered by the samples.
    double span() const noexcept { return samples.empty() ? 0.0 : dt * (samples.size() - 1); }
};

MemoryKernel build_kernel(const BandStructure& bands, double dt, double t_max);

/// Solves eps' = -i omega_e eps - int_0^t K(s) eps(t - s) ds, eps(0) = 1.
/// Output is sampled on the kernel grid; `dt` must equal kernel.dt.
/// Throws GridMismatch, DomainError (kernel too short) or BudgetExceeded.
AmplitudeTrajectory solve_volterra(const MemoryKernel& kernel, double omega_e, double t_max,
                                   double dt, long long budget = kVolterraBudget);

/// Convenience overload on the kernel's own grid.
AmplitudeTrajectory solve_volterra(const MemoryKernel& kernel, double omega_e, double t_max);

/// CSV columns s, K_re, K_im.
void write_kernel_csv(std::ostream& os, const MemoryKernel& kernel);

} // namespace crq
