#include "crq/delay_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "crq/error.hpp"

namespace crq {

namespace {

struct Rounded {
    long long steps;
    bool commensurate;
};

Rounded round_delay(double T, double dt)
{
    const double ratio = T / dt;
    const long long steps = std::llround(ratio);
    return {steps, steps >= 1 && std::abs(ratio - steps) <= 1e-9 * steps};
}

int terms_needed(double T, double t_max)
{
    // Terms with n T < t_max act on the open interval (0, t_max).
    return std::max(0, static_cast<int>(std::ceil(t_max / T - 1e-12)) - 1);
}

} // namespace

DelaySpec make_delay_spec(const FeedbackRates& rates, double t_max, double omega_e)
{
    DelaySpec spec;
    spec.rates = rates;
    spec.n_max_minus = static_cast<int>(std::ceil(t_max / rates.T_minus));
    spec.n_max_plus = static_cast<int>(std::ceil(t_max / rates.T_plus));
    spec.omega_e = omega_e;
    return spec;
}

double default_dde_step(const FeedbackRates& rates)
{
    return rates.T_minus / kDefaultDdeStepsPerLoop;
}

cd DdeSolution::at(double t) const
{
    const AmplitudeTrajectory& tr = trajectory;
    if (tr.size() == 0) throw DomainError("empty DDE solution");
    if (t < 0.0) return 0.0;
    const double dt = tr.dt;
    const double x = t / dt;
    auto j = static_cast<std::size_t>(std::floor(x));
    if (j + 1 >= tr.size()) {
        if (x <= static_cast<double>(tr.size() - 1) * (1.0 + 1e-12)) return tr.epsilon.back();
        throw DomainError("t = " + std::to_string(t) + " is beyond the DDE solution");
    }
    const double s = x - static_cast<double>(j);
    const double h00 = (1.0 + 2.0 * s) * (1.0 - s) * (1.0 - s);
    const double h10 = s * (1.0 - s) * (1.0 - s);
    const double h01 = s * s * (3.0 - 2.0 * s);
    const double h11 = s * s * (s - 1.0);
    return h00 * tr.epsilon[j] + h10 * dt * deriv_right[j] + h01 * tr.epsilon[j + 1] +
           h11 * dt * deriv_left[j + 1];
}

DdeSolution solve_dde(const DelaySpec& spec, double t_max, double dt)
{
    if (!(t_max > 0.0)) throw DomainError("t_max must be positive");
    if (!(dt > 0.0)) throw DomainError("dt must be positive");
    const FeedbackRates& r = spec.rates;

    const Rounded dm = round_delay(r.T_minus, dt);
    const Rounded dp = round_delay(r.T_plus, dt);
    if (!dm.commensurate && !dp.commensurate) {
        throw GridIncommensurate("neither T- = " + std::to_string(r.T_minus) +
                                 " nor T+ = " + std::to_string(r.T_plus) +
                                 " is a multiple of dt = " + std::to_string(dt));
    }
    if (spec.n_max_minus < terms_needed(r.T_minus, t_max) ||
        spec.n_max_plus < terms_needed(r.T_plus, t_max)) {
        throw DomainError("delay spec omits feedback terms active before t_max");
    }

    DdeSolution sol;
    for (int n = 1; n <= spec.n_max_minus; ++n) {
        sol.ladder.push_back({n, Band::minus, r.gamma_n(n, Band::minus), n * dm.steps});
    }
    for (int n = 1; n <= spec.n_max_plus; ++n) {
        sol.ladder.push_back({n, Band::plus, r.gamma_n(n, Band::plus), n * dp.steps});
    }
    std::stable_sort(sol.ladder.begin(), sol.ladder.end(),
                     [](const FeedbackTerm& a, const FeedbackTerm& b) {
                         return a.delay_steps < b.delay_steps;
                     });

    // The grid always reaches t_max.
    const long long M = std::max(1LL, static_cast<long long>(std::ceil(t_max / dt - 1e-9)));
    const auto size = static_cast<std::size_t>(M) + 1;
    std::vector<cd>& eps = sol.trajectory.epsilon;
    eps.assign(size, cd{});
    sol.deriv_left.assign(size, cd{});
    sol.deriv_right.assign(size, cd{});

    const cd decay{0.5 * r.gamma0, spec.omega_e};

    // Delayed value at fractional grid position i + half/2 (half in {0,1}),
    // cubic Hermite on the i-th interval for the half-step.
    auto delayed = [&](long long i, bool half) -> cd {
        if (!half) return eps[i];
        return 0.5 * (eps[i] + eps[i + 1]) +
               0.125 * dt * (sol.deriv_right[i] - sol.deriv_left[i + 1]);
    };
    // Feedback sum for a step starting at node j, evaluated at node
    // position j + offset/2 (offset = 0, 1, 2). Terms with delay d > j are
    // inactive on the whole step.
    auto feedback = [&](long long j, int offset) {
        cd sum = 0.0;
        for (const FeedbackTerm& term : sol.ladder) {
            if (term.delay_steps > j) break;
            const long long base = j - term.delay_steps;
            const cd value = offset == 1 ? delayed(base, true) : eps[base + offset / 2];
            sum += term.gamma * value;
        }
        return sum;
    };
    // Derivative at node i using the terms active on the step starting at
    // node `active_from`.
    auto node_derivative = [&](long long i, long long active_from) {
        cd sum = 0.0;
        for (const FeedbackTerm& term : sol.ladder) {
            if (term.delay_steps > active_from) break;
            sum += term.gamma * eps[i - term.delay_steps];
        }
        return -decay * eps[i] - sum;
    };

    eps[0] = 1.0;
    sol.deriv_left[0] = -decay;
    sol.deriv_right[0] = node_derivative(0, 0);

    for (long long j = 0; j < M; ++j) {
        const cd y = eps[j];
        const cd fb0 = feedback(j, 0), fb1 = feedback(j, 1), fb2 = feedback(j, 2);
        const cd k1 = -decay * y - fb0;
        const cd k2 = -decay * (y + 0.5 * dt * k1) - fb1;
        const cd k3 = -decay * (y + 0.5 * dt * k2) - fb1;
        const cd k4 = -decay * (y + dt * k3) - fb2;
        eps[j + 1] = y + (dt / 6.0) * (k1 + 2.0 * k2 + 2.0 * k3 + k4);
        sol.deriv_left[j + 1] = node_derivative(j + 1, j);
        sol.deriv_right[j + 1] = node_derivative(j + 1, j + 1);
    }

    AmplitudeTrajectory& tr = sol.trajectory;
    tr.dt = dt;
    tr.t.resize(size);
    for (std::size_t j = 0; j < size; ++j) tr.t[j] = dt * static_cast<double>(j);
    return sol;
}

} // namespace crq
