#include "crq/analytic.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "crq/delay_dynamics.hpp"
#include "crq/error.hpp"

namespace crq {

namespace {

void require_even_class(const FeedbackRates& rates)
{
    if (rates.N % 4 != 2) {
        throw WrongParity("closed form needs N = 2 mod 4, got N = " + std::to_string(rates.N));
    }
}

} // namespace

cd laplace_amplitude(const FeedbackRates& rates, cd s)
{
    require_even_class(rates);
    const cd loop = std::exp(s * rates.T_minus) + 1.0;
    if (std::abs(loop) < 1e-12) throw PoleProximity("e^{sT-} + 1 vanishes at the requested s");
    return 1.0 / (s + 0.5 * rates.gamma0 - rates.gamma0_minus / loop);
}

double kummer_polynomial(int n, double y)
{
    if (n < 1) throw DomainError("terminating 1F1 needs n >= 1");
    // Neumaier summation of t_j, t_{j+1} = t_j (1 - n + j) y / ((2 + j)(j + 1)).
    double sum = 1.0, comp = 0.0, term = 1.0;
    for (int j = 0; j + 1 < n; ++j) {
        term *= (1.0 - n + j) * y / ((2.0 + j) * (j + 1.0));
        const double next = sum + term;
        comp += std::abs(sum) >= std::abs(term) ? (sum - next) + term : (term - next) + sum;
        sum = next;
    }
    return sum + comp;
}

cd series_amplitude(const FeedbackRates& rates, double t)
{
    require_even_class(rates);
    if (t < 0.0) return 0.0;
    if (t >= rates.T_plus) {
        throw DomainError("series excludes slow-band feedback, needs t < T+ = " +
                          std::to_string(rates.T_plus));
    }
    const double g = rates.gamma0;
    const double gm = rates.gamma0_minus;
    double value = std::exp(-0.5 * g * t);
    for (int n = 1; n * rates.T_minus < t; ++n) {
        const double u = t - n * rates.T_minus;
        const double sign = n % 2 == 1 ? 1.0 : -1.0;
        value += sign * gm * u * std::exp(-0.5 * g * u) * kummer_polynomial(n, gm * u);
    }
    return value;
}

const char* branch_name(StaircaseBranch branch) noexcept
{
    switch (branch) {
    case StaircaseBranch::even_class: return "even_class";
    case StaircaseBranch::odd_plus: return "odd_plus";
    case StaircaseBranch::odd_minus: return "odd_minus";
    }
    return "unknown";
}

double staircase_limit(const FeedbackRates& rates, int parity)
{
    return parity == 2 ? rates.T_plus : 2.0 * rates.T_plus;
}

std::vector<StaircasePiece> staircase_pieces(const FeedbackRates& rates, int parity, int n_pieces)
{
    if (parity == 0) throw WrongParity("N = 0 mod 4 has no blockade staircase");
    if (parity < 0 || parity > 3) throw InvalidValue("parity", "must be N mod 4");
    if (rates.N % 4 != parity) {
        throw InvalidValue("parity", "N mod 4 of the rates is " + std::to_string(rates.N % 4));
    }
    if (n_pieces < 1) throw InvalidValue("n_pieces", "must be >= 1");

    const StaircaseBranch branch = parity == 2   ? StaircaseBranch::even_class
                                   : parity == 1 ? StaircaseBranch::odd_plus
                                                 : StaircaseBranch::odd_minus;
    const double T = rates.T_minus;
    const double limit = staircase_limit(rates, parity) / T;

    // First-order integration of the comb equation: on the j-th loop the
    // slope is -gamma0/2 - sum_{n <= j} gamma_n^-.
    std::vector<StaircasePiece> pieces;
    cd slope = -0.5 * rates.gamma0;
    cd start = 1.0;
    for (int j = 0; j < n_pieces && j < limit; ++j) {
        if (j > 0) slope -= rates.gamma_n(j, Band::minus);
        const double t_lo_abs = j * T;
        const cd intercept = start - slope * t_lo_abs;
        StaircasePiece p;
        p.t_lo = j;
        p.t_hi = std::min<double>(j + 1, limit);
        p.re_intercept = intercept.real();
        p.re_slope = slope.real();
        p.im_intercept = intercept.imag();
        p.im_slope = slope.imag();
        p.branch = branch;
        pieces.push_back(p);
        start = p.value((j + 1) * T);
    }
    return pieces;
}

cd staircase_value(const std::vector<StaircasePiece>& pieces, double T_minus, double t)
{
    const double x = t / T_minus;
    for (const StaircasePiece& p : pieces) {
        if (x >= p.t_lo && x <= p.t_hi) return p.value(t);
    }
    throw DomainError("t = " + std::to_string(t) + " lies outside the staircase tiling");
}

double staircase_horizon(const std::vector<StaircasePiece>& pieces, double T_minus,
                         const std::function<cd(double)>& reference, double step, double tol)
{
    if (pieces.empty()) return 0.0;
    if (!(step > 0.0)) throw DomainError("scan step must be positive");
    const double end = pieces.back().t_hi * T_minus;
    const long long M = static_cast<long long>(std::floor(end / step));
    for (long long j = 0; j <= M; ++j) {
        const double t = step * static_cast<double>(j);
        if (std::abs(staircase_value(pieces, T_minus, t) - reference(t)) > tol) return t;
    }
    return end;
}

double staircase_horizon(const FeedbackRates& rates, int parity,
                         const std::vector<StaircasePiece>& pieces, double tol)
{
    if (pieces.empty()) return 0.0;
    const double T = rates.T_minus;
    const double dt = default_dde_step(rates);
    const double step = T / 200.0;
    if (parity == 2) {
        // The series is defined on [0, T+); the scan stops just short of it.
        std::vector<StaircasePiece> clipped = pieces;
        for (StaircasePiece& p : clipped) p.t_hi = std::min(p.t_hi, (rates.T_plus - step) / T);
        return staircase_horizon(clipped, T,
                                 [&](double t) { return series_amplitude(rates, t); }, step, tol);
    }
    const double t_end = pieces.back().t_hi * T;
    const DdeSolution dde = solve_dde(make_delay_spec(rates, t_end), t_end, dt);
    return staircase_horizon(pieces, T, [&](double t) { return dde.at(t); }, step, tol);
}

std::pair<double, double> density_eigenvalues(const DensitySnapshot& rho)
{
    const double a = rho.rho_ee.real(), d = rho.rho_gg.real();
    const cd b = 0.5 * (rho.rho_eg + std::conj(rho.rho_ge));
    const double mean = 0.5 * (a + d);
    const double radius = std::hypot(0.5 * (a - d), std::abs(b));
    return {mean - radius, mean + radius};
}

void validate_density(const DensitySnapshot& rho, double tol)
{
    if (std::abs(rho.rho_ee.imag()) > tol || std::abs(rho.rho_gg.imag()) > tol ||
        std::abs(rho.rho_eg - std::conj(rho.rho_ge)) > tol) {
        throw InvalidState("density matrix is not Hermitian");
    }
    if (std::abs(rho.rho_ee.real() + rho.rho_gg.real() - 1.0) > tol) {
        throw InvalidState("density matrix trace differs from 1");
    }
    if (density_eigenvalues(rho).first < -tol) {
        throw InvalidState("density matrix has a negative eigenvalue");
    }
}

DensitySnapshot density_map(cd epsilon, const DensitySnapshot& rho0)
{
    validate_density(rho0);
    const double p = std::norm(epsilon);
    if (!std::isfinite(p) || std::sqrt(p) > 1.0 + 1e-12) {
        throw InvalidState("|eps| exceeds 1");
    }
    return {p * rho0.rho_ee, epsilon * rho0.rho_eg, std::conj(epsilon) * rho0.rho_ge,
            rho0.rho_gg + (1.0 - p) * rho0.rho_ee};
}

} // namespace crq
