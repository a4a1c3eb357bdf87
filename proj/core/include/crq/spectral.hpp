// spectral.hpp: full single-excitation eigenproblem, participation ratios
// and the dark-state certificate.

#pragma once

#include <limits>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "crq/lattice.hpp"

namespace crq {

/// A mode is reported dark when its PR is below `max_pr` and more than
/// `min_local_fraction` of its photonic weight sits within `radius` sites
/// of the emitter. Modes with photonic weight below `min_bath_weight` are
/// the bare emitter and are never counted.
struct DarkStateCriteria {
    double max_pr = 10.0;
    int radius = 5;
    double min_local_fraction = 0.5;
    double min_bath_weight = 1e-8;
};

struct SpectralReport {
    std::vector<double> eigenvalues;  ///< ascending
    std::vector<double> pr;
    std::vector<double> emitter_weight;
    std::vector<double> local_bath_fraction;
    int min_pr_index = -1;
    bool dark_state_found = false;
    std::vector<int> dark_indices;

    // Zero-mode diagnostics; NaN / -1 when the analytic mode does not apply.
    double zero_mode_residual = std::numeric_limits<double>::quiet_NaN();
    double pr_formula_value = std::numeric_limits<double>::quiet_NaN();
    double zero_mode_numeric_pr = std::numeric_limits<double>::quiet_NaN();
    int zero_mode_index = -1;
    int zero_mode_multiplicity = 0;
    double zero_mode_gap = std::numeric_limits<double>::quiet_NaN();

    std::vector<std::string> warnings;
    Eigen::MatrixXcd eigenvectors;  ///< filled only on request
};

/// (sum |c|^2)^2 / sum |c|^4.
double participation_ratio(const Eigen::VectorXcd& v);

/// Ring distance of every site-basis component from the emitter's anchor
/// a_1; b_n counts as the nearer of a_n and a_{n+1}. The emitter entry is 0.
std::vector<int> emitter_distances(int N);

SpectralReport solve_eigenproblem(const LatticeParams& params,
                                  const DarkStateCriteria& criteria = {},
                                  bool keep_vectors = false);

/// Unnormalized candidate a_n = 0, b_n = i^{n-1}, eps = -2 rho / alpha,
/// built for any parameters (no preconditions).
Eigen::VectorXcd zero_mode_candidate(const LatticeParams& params);

struct ZeroMode {
    Eigen::VectorXcd vector;
    double residual = 0.0;  ///< |H v| / |v|
};

/// Throws WrongParity unless N = 2 mod 4, RegimeError unless phi = pi/2,
/// omega_e = 0 and alpha > 0.
ZeroMode analytic_zero_mode(const LatticeParams& params);

/// |H v| / |v| for the site-basis Hamiltonian of `params`.
double candidate_residual(const LatticeParams& params, const Eigen::VectorXcd& v);

/// [(2 rho/alpha)^2 + N]^2 / [(2 rho/alpha)^4 + N]; preconditions as
/// analytic_zero_mode.
double pr_formula(const LatticeParams& params);

} // namespace crq
