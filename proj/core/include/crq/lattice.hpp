// lattice.hpp: chiral sawtooth ring bath, Bloch bands, emitter couplings and
// the feedback constants of the linearized crossing.

#pragma once

#include <complex>
#include <cstdint>
#include <map>
#include <string>
#include <vector>

#include <Eigen/Core>

namespace crq {

using cd = std::complex<double>;

inline constexpr double kPi = 3.14159265358979323846;

/// Model constants. Energies in units of J, times in units of 1/J.
/// `omega` is the bare cavity frequency; all dynamics run in the frame
/// rotating at `omega`, so it never enters a generator.
struct LatticeParams {
    int N = 0;
    double J = 1.0;
    double rho = 1.0;
    double phi = 0.0;
    double omega = 0.0;
    double alpha = 0.0;
    double omega_e = 0.0;

    /// N mod 4; 2 is the blockade class, 0 has no sign alternation.
    int parity() const noexcept { return N % 4; }
    /// Stable 64-bit fingerprint of all fields (FNV-1a over the raw bytes).
    std::uint64_t hash() const noexcept;
};

/// Validates a raw key/value record. Required: N, J, rho, phi, alpha.
/// Optional: omega, omega_e (default 0). Throws MissingKey / InvalidValue.
LatticeParams build_params(const std::map<std::string, double>& raw);

/// Throws InvalidValue if the record violates the model invariants.
void validate(const LatticeParams& params);

struct BandPair {
    double minus;
    double plus;
};

BandPair dispersion(const LatticeParams& params, double k);

/// g_k = rho (1 + e^{-i(phi+k)}).
cd off_diagonal(const LatticeParams& params, double k);

/// h_k = [[2J cos k, conj(g_k)], [g_k, 0]].
Eigen::Matrix2cd bloch_matrix(const LatticeParams& params, double k);

/// Group velocities at the phi = pi/2 crossing: -J -+ sqrt(J^2 + rho^2).
/// `minus` is the fast (negative) branch, `plus` the slow one.
BandPair crossing_velocities(const LatticeParams& params);

/// |alpha_{pi/2}^pm| = alpha |Omega_pm| / sqrt(Omega_pm^2 + rho^2).
/// Throws RegimeError unless |phi - pi/2| <= 1e-9.
BandPair crossing_couplings(const LatticeParams& params);

/// Per-k band data on the ring grid k_m = 2 pi m / N.
///
/// mode_minus[m], mode_plus[m] are the normalized eigenvectors (a, b) of
/// h_k in the convention of bloch_matrix, i.e. (E_k, g_k) / N_k. Where that
/// quotient is 0/0 the vectors are replaced by their analytic limits and
/// `degenerate[m]` is set.
struct BandStructure {
    LatticeParams params;
    std::vector<double> k;
    std::vector<double> E_minus, E_plus;
    std::vector<cd> g;
    std::vector<double> norm_minus, norm_plus;
    std::vector<cd> coupling_minus, coupling_plus;
    std::vector<Eigen::Vector2cd> mode_minus, mode_plus;
    std::vector<bool> degenerate;

    int size() const noexcept { return static_cast<int>(k.size()); }
    double max_abs_energy() const;
};

BandStructure band_structure(const LatticeParams& params);

/// Upper bound on the spectral radius of the single-excitation generator
/// (bath bands, emitter detuning and the rank-two coupling of norm alpha).
double spectral_radius_bound(const BandStructure& bands);

enum class Band { minus, plus };

const char* band_name(Band band) noexcept;

/// Delay-equation constants of the linearized crossing.
struct FeedbackRates {
    int N = 0;
    double Omega_minus = 0.0, Omega_plus = 0.0;
    double T_minus = 0.0, T_plus = 0.0;
    double gamma0_minus = 0.0, gamma0_plus = 0.0, gamma0 = 0.0;

    double T(Band band) const noexcept { return band == Band::minus ? T_minus : T_plus; }
    double gamma0_of(Band band) const noexcept {
        return band == Band::minus ? gamma0_minus : gamma0_plus;
    }
    /// gamma_n^pm = gamma0^pm e^{pm i pi n N / 2}, phase evaluated exactly.
    cd gamma_n(int n, Band band) const;
    /// n-th meeting time of the counter-propagating fronts.
    double T_meet(int n) const noexcept { return n * T_minus * T_plus / (T_minus + T_plus); }
};

FeedbackRates feedback_rates(const LatticeParams& params);

/// Exact power i^e for integer e.
cd i_pow(long long e) noexcept;

} // namespace crq
