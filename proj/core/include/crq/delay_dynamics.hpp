// delay_dynamics.hpp: the delayed-feedback equation
//   eps' = -(gamma0/2 + i omega_e) eps - sum_{n,pm} gamma_n^pm eps(t - n T^pm) Theta(t - n T^pm)
// integrated by the method of steps on a grid that carries the delays.

#pragma once

#include <vector>

#include "crq/lattice.hpp"
#include "crq/trajectory.hpp"

namespace crq {

/// Default step as a fraction of T^-.
inline constexpr double kDefaultDdeStepsPerLoop = 2000.0;

struct DelaySpec {
    FeedbackRates rates;
    int n_max_minus = 0;
    int n_max_plus = 0;
    double omega_e = 0.0;
};

/// Retains every feedback term that switches on before t_max.
DelaySpec make_delay_spec(const FeedbackRates& rates, double t_max, double omega_e = 0.0);

/// One active feedback term with its grid-rounded delay.
struct FeedbackTerm {
    int n = 0;
    Band band = Band::minus;
    cd gamma;
    long long delay_steps = 0;
};

struct DdeSolution {
    AmplitudeTrajectory trajectory;
    /// One-sided derivatives at each grid node. They differ exactly at the
    /// nodes where a feedback term switches on.
    std::vector<cd> deriv_left, deriv_right;
    std::vector<FeedbackTerm> ladder;

    /// Cubic Hermite interpolant of eps between grid nodes.
    cd at(double t) const;
};

double default_dde_step(const FeedbackRates& rates);

/// Throws GridIncommensurate if neither T^- nor T^+ is an integer multiple
/// of dt (relative tolerance 1e-9), DomainError if the spec omits a
/// feedback term that becomes active before t_max.
DdeSolution solve_dde(const DelaySpec& spec, double t_max, double dt);

} // namespace crq
