#include "crq/kernel_dynamics.hpp"

#include <cmath>
#include <ostream>
#include <string>

#include "crq/error.hpp"

namespace crq {

MemoryKernel build_kernel(const BandStructure& bands, double dt, double t_max)
{
    if (!(dt > 0.0)) throw DomainError("kernel dt must be positive");
    if (!(t_max > 0.0)) throw DomainError("kernel t_max must be positive");

    const int N = bands.size();
    const long long M = std::llround(t_max / dt);

    // Each mode contributes w e^{-i E s_j}; advance the phase by a fixed
    // rotor and renormalize it periodically to keep |rotor^j| = 1.
    std::vector<double> weight(2 * N), energy(2 * N);
    for (int m = 0; m < N; ++m) {
        weight[m] = std::norm(bands.coupling_minus[m]) / N;
        weight[N + m] = std::norm(bands.coupling_plus[m]) / N;
        energy[m] = bands.E_minus[m];
        energy[N + m] = bands.E_plus[m];
    }

    MemoryKernel kernel;
    kernel.dt = dt;
    kernel.params_hash = bands.params.hash();
    kernel.samples.assign(static_cast<std::size_t>(M) + 1, cd{});
    for (int q = 0; q < 2 * N; ++q) {
        if (weight[q] == 0.0) continue;
        const cd rotor = std::polar(1.0, -energy[q] * dt);
        cd phase = 1.0;
        for (long long j = 0; j <= M; ++j) {
            if (j % 256 == 0) phase = std::polar(1.0, -energy[q] * dt * static_cast<double>(j));
            kernel.samples[j] += weight[q] * phase;
            phase *= rotor;
        }
    }
    return kernel;
}

AmplitudeTrajectory solve_volterra(const MemoryKernel& kernel, double omega_e, double t_max,
                                   double dt, long long budget)
{
    if (std::abs(dt - kernel.dt) > 1e-12 * kernel.dt) {
        throw GridMismatch("Volterra step differs from the kernel sampling step");
    }
    if (!(t_max > 0.0)) throw DomainError("t_max must be positive");
    const long long M = std::llround(t_max / dt);
    if (M + 1 > budget) {
        throw BudgetExceeded("Volterra run needs " + std::to_string(M + 1) +
                             " samples, budget is " + std::to_string(budget));
    }
    if (static_cast<long long>(kernel.size()) < M + 1) {
        throw DomainError("kernel covers t <= " + std::to_string(kernel.span()) +
                          ", requested t_max = " + std::to_string(t_max));
    }

    const std::vector<cd>& K = kernel.samples;
    const cd iw{0.0, omega_e};
    std::vector<cd> eps(static_cast<std::size_t>(M) + 1), f(static_cast<std::size_t>(M) + 1);
    eps[0] = 1.0;
    f[0] = -iw * eps[0];  // the history integral vanishes at t = 0

    // Trapezoid in time for eps' = f, trapezoid in s for the history
    //   I_{m+1} = dt [K_0 eps_{m+1}/2 + sum_{j=1}^{m} K_j eps_{m+1-j} + K_{m+1} eps_0/2],
    // solved implicitly for the newest point.
    const double h = 0.5 * dt;
    const cd denom = 1.0 + h * (iw + h * K[0]);
    for (long long m = 0; m < M; ++m) {
        cd known = 0.5 * K[m + 1] * eps[0];
        for (long long j = 1; j <= m; ++j) known += K[j] * eps[m + 1 - j];
        known *= dt;
        const cd next = (eps[m] + h * f[m] - h * known) / denom;
        eps[m + 1] = next;
        f[m + 1] = -iw * next - (known + h * K[0] * next);
    }

    AmplitudeTrajectory traj;
    traj.dt = dt;
    traj.t.resize(eps.size());
    for (std::size_t j = 0; j < eps.size(); ++j) traj.t[j] = dt * static_cast<double>(j);
    traj.epsilon = std::move(eps);
    return traj;
}

AmplitudeTrajectory solve_volterra(const MemoryKernel& kernel, double omega_e, double t_max)
{
    return solve_volterra(kernel, omega_e, t_max, kernel.dt);
}

void write_kernel_csv(std::ostream& os, const MemoryKernel& kernel)
{
    os << "s,K_re,K_im\n";
    for (std::size_t j = 0; j < kernel.size(); ++j) {
        os << format_number(kernel.dt * static_cast<double>(j)) << ','
           << format_number(kernel.samples[j].real()) << ','
           << format_number(kernel.samples[j].imag()) << '\n';
    }
}

} // namespace crq
