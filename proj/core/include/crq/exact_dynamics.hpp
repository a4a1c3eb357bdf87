// exact_dynamics.hpp: single-excitation propagation of emitter + ring, in the
// Bloch-mode basis and in the site basis.
//
// Initial state is always the excited emitter with the bath in vacuum.

#pragma once

#include <functional>
#include <vector>

#include <Eigen/Core>
#include <Eigen/SparseCore>

#include "crq/lattice.hpp"
#include "crq/trajectory.hpp"

namespace crq {

/// Default integrator step, in units of 1/J.
inline constexpr double kDefaultExactDt = 0.01;
/// Required margin dt * (spectral radius bound) for the fixed RK4 step.
inline constexpr double kStabilityMargin = 0.1;

/// Observer receives the full state at every output sample, in the basis of
/// the solver that calls it.
using StateObserver = std::function<void(double t, const Eigen::VectorXcd& state)>;

struct EvolveOptions {
    int stride = 1;                      ///< output every `stride` steps
    std::vector<double> snapshot_times;  ///< site-resolved snapshots (nearest step)
    StateObserver observer;
};

/// Emitter amplitude and Bloch-mode amplitudes c_k^pm.
struct ModeState {
    cd eps;
    Eigen::VectorXcd c_minus, c_plus;
};

// Site basis layout: [a_1..a_N, b_1..b_N, eps]. The emitter couples to a_1.
inline Eigen::Index site_a(int N, int n) { return ((n - 1) % N + N) % N; }
inline Eigen::Index site_b(int N, int n) { return N + ((n - 1) % N + N) % N; }
inline Eigen::Index site_emitter(int N) { return 2 * N; }

/// Sparse single-excitation Hamiltonian on the ring (rotating frame).
Eigen::SparseMatrix<cd> realspace_hamiltonian(const LatticeParams& params);

/// Mode basis layout: [eps, c_minus(0..N-1), c_plus(0..N-1)].
ModeState unpack_modes(const BandStructure& bands, const Eigen::VectorXcd& state);

/// Total sublattice populations from a mode-basis state.
std::pair<double, double> modespace_populations(const BandStructure& bands,
                                                const Eigen::VectorXcd& state);

SiteSnapshot modespace_snapshot(const BandStructure& bands, const Eigen::VectorXcd& state, double t);
SiteSnapshot realspace_snapshot(int N, const Eigen::VectorXcd& state, double t);

/// <psi|H|psi> in the mode basis.
double modespace_energy(const BandStructure& bands, const Eigen::VectorXcd& state);

/// Throws StepTooLarge if dt exceeds the RK4 stability margin.
void check_step(const BandStructure& bands, double dt);

AmplitudeTrajectory evolve_modespace(const BandStructure& bands, double t_max, double dt,
                                     const EvolveOptions& options = {});

AmplitudeTrajectory evolve_realspace(const LatticeParams& params, double t_max, double dt,
                                     const EvolveOptions& options = {});

} // namespace crq
