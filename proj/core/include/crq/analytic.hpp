// analytic.hpp: closed forms for the reduced delay equation (Laplace
// transform, terminating hypergeometric series), the piecewise staircase
// approximants, and the emitter density-matrix map.

#pragma once

#include <functional>
#include <vector>

#include "crq/lattice.hpp"

namespace crq {

/// eps~(s) = 1 / (s + gamma0/2 - gamma0^- / (e^{s T^-} + 1)).
/// Needs N = 2 mod 4. Throws WrongParity, PoleProximity.
cd laplace_amplitude(const FeedbackRates& rates, cd s);

/// 1F1(1 - n, 2, y) as a terminating polynomial (n >= 1), with compensated
/// summation.
double kummer_polynomial(int n, double y);

/// Time-domain inverse of laplace_amplitude, valid for 0 <= t < T^+.
/// Throws WrongParity, DomainError.
cd series_amplitude(const FeedbackRates& rates, double t);

enum class StaircaseBranch { even_class, odd_plus, odd_minus };

const char* branch_name(StaircaseBranch branch) noexcept;

/// Affine piece eps(t) = intercept + slope * t on [t_lo, t_hi] T^-.
/// Intercepts and slopes refer to absolute time t.
struct StaircasePiece {
    double t_lo = 0.0, t_hi = 0.0;
    double re_intercept = 0.0, re_slope = 0.0;
    double im_intercept = 0.0, im_slope = 0.0;
    StaircaseBranch branch = StaircaseBranch::even_class;

    cd value(double t) const noexcept
    {
        return {re_intercept + re_slope * t, im_intercept + im_slope * t};
    }
};

/// Latest time the staircase is built to: T^+ for N = 2 mod 4, 2 T^+ for odd N.
double staircase_limit(const FeedbackRates& rates, int parity);

/// One piece per T^- interval, clipped at staircase_limit. Throws
/// WrongParity for parity 0, InvalidValue if parity disagrees with rates.N.
std::vector<StaircasePiece> staircase_pieces(const FeedbackRates& rates, int parity, int n_pieces);

/// Evaluates the piecewise approximant; DomainError outside the tiling.
cd staircase_value(const std::vector<StaircasePiece>& pieces, double T_minus, double t);

/// First time on a uniform scan of step `step` where the staircase departs
/// from `reference` by more than `tol`, capped at the end of the tiling.
double staircase_horizon(const std::vector<StaircasePiece>& pieces, double T_minus,
                         const std::function<cd(double)>& reference, double step,
                         double tol = 1e-3);

/// As above with the reference chosen by parity: series_amplitude for
/// N = 2 mod 4, the delay equation otherwise.
double staircase_horizon(const FeedbackRates& rates, int parity,
                         const std::vector<StaircasePiece>& pieces, double tol = 1e-3);

struct DensitySnapshot {
    cd rho_ee, rho_eg, rho_ge, rho_gg;
};

/// Eigenvalues of the Hermitian part, ascending.
std::pair<double, double> density_eigenvalues(const DensitySnapshot& rho);

/// Throws InvalidState unless rho is Hermitian, has unit trace and is
/// positive semidefinite, each to `tol`.
void validate_density(const DensitySnapshot& rho, double tol = 1e-12);

/// rho_ee |eps|^2, rho_eg eps, rho_ge conj(eps), rho_gg + (1 - |eps|^2) rho_ee.
DensitySnapshot density_map(cd epsilon, const DensitySnapshot& rho0);

} // namespace crq
