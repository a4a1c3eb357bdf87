#include "crq/lattice.hpp"

#include <algorithm>
#include <cassert>
#include <cmath>
#include <cstring>

#include "crq/error.hpp"

namespace crq {

namespace {

constexpr double kDegenerateNorm = 1e-12;
constexpr double kRegimeTolerance = 1e-9;

void require_crossing_regime(const LatticeParams& params)
{
    if (std::abs(params.phi - kPi / 2) > kRegimeTolerance) {
        throw RegimeError("linearized crossing requires phi = pi/2 (got phi = " +
                          std::to_string(params.phi) + ")");
    }
}

template <class T>
void fnv_mix(std::uint64_t& h, const T& value)
{
    unsigned char bytes[sizeof(T)];
    std::memcpy(bytes, &value, sizeof(T));
    for (unsigned char b : bytes) {
        h ^= b;
        h *= 1099511628211ULL;
    }
}

} // namespace

std::uint64_t LatticeParams::hash() const noexcept
{
    std::uint64_t h = 14695981039346656037ULL;
    fnv_mix(h, N);
    fnv_mix(h, J);
    fnv_mix(h, rho);
    fnv_mix(h, phi);
    fnv_mix(h, omega);
    fnv_mix(h, alpha);
    fnv_mix(h, omega_e);
    return h;
}

void validate(const LatticeParams& p)
{
    if (p.N < 3) throw InvalidValue("N", "ring needs at least 3 cells (got " + std::to_string(p.N) + ")");
    const std::pair<const char*, double> reals[] = {
        {"J", p.J}, {"rho", p.rho}, {"phi", p.phi}, {"omega", p.omega},
        {"alpha", p.alpha}, {"omega_e", p.omega_e}};
    for (const auto& [key, value] : reals) {
        if (!std::isfinite(value)) throw InvalidValue(key, "must be finite");
    }
    if (p.alpha < 0.0) throw InvalidValue("alpha", "coupling must be non-negative");
}

LatticeParams build_params(const std::map<std::string, double>& raw)
{
    auto required = [&](const char* key) {
        auto it = raw.find(key);
        if (it == raw.end()) throw MissingKey(key);
        return it->second;
    };
    auto optional = [&](const char* key, double fallback) {
        auto it = raw.find(key);
        return it == raw.end() ? fallback : it->second;
    };

    const double n = required("N");
    if (!std::isfinite(n) || n != std::floor(n)) throw InvalidValue("N", "must be an integer");
    if (n < 3) throw InvalidValue("N", "ring needs at least 3 cells");
    if (n > 1e7) throw InvalidValue("N", "unreasonably large ring");

    LatticeParams p;
    p.N = static_cast<int>(n);
    p.J = required("J");
    p.rho = required("rho");
    p.phi = required("phi");
    p.alpha = required("alpha");
    p.omega = optional("omega", 0.0);
    p.omega_e = optional("omega_e", 0.0);
    validate(p);
    return p;
}

BandPair dispersion(const LatticeParams& p, double k)
{
    const double c = std::cos(k);
    // 1 + cos x written as 2 cos^2(x/2) to avoid cancellation near the crossing.
    const double h = std::cos(0.5 * (p.phi + k));
    const double radicand = p.J * p.J * c * c + 4.0 * p.rho * p.rho * h * h;
    assert(radicand >= -1e-15);
    const double root = std::sqrt(std::max(radicand, 0.0));
    return {p.J * c - root, p.J * c + root};
}

cd off_diagonal(const LatticeParams& p, double k)
{
    return p.rho * (1.0 + std::polar(1.0, -(p.phi + k)));
}

Eigen::Matrix2cd bloch_matrix(const LatticeParams& p, double k)
{
    const cd g = off_diagonal(p, k);
    Eigen::Matrix2cd h;
    h << 2.0 * p.J * std::cos(k), std::conj(g),
         g, 0.0;
    return h;
}

BandPair crossing_velocities(const LatticeParams& p)
{
    const double root = std::sqrt(p.J * p.J + p.rho * p.rho);
    return {-p.J - root, -p.J + root};
}

BandPair crossing_couplings(const LatticeParams& p)
{
    require_crossing_regime(p);
    const BandPair v = crossing_velocities(p);
    auto limit = [&](double omega) {
        return p.alpha * std::abs(omega) / std::sqrt(omega * omega + p.rho * p.rho);
    };
    return {limit(v.minus), limit(v.plus)};
}

double BandStructure::max_abs_energy() const
{
    double m = 0.0;
    for (std::size_t i = 0; i < k.size(); ++i) {
        m = std::max({m, std::abs(E_minus[i]), std::abs(E_plus[i])});
    }
    return m;
}

BandStructure band_structure(const LatticeParams& p)
{
    validate(p);
    const int n = p.N;
    BandStructure b;
    b.params = p;
    b.k.resize(n);
    b.E_minus.resize(n);
    b.E_plus.resize(n);
    b.g.resize(n);
    b.norm_minus.resize(n);
    b.norm_plus.resize(n);
    b.coupling_minus.resize(n);
    b.coupling_plus.resize(n);
    b.mode_minus.resize(n);
    b.mode_plus.resize(n);
    b.degenerate.assign(n, false);

    const bool crossing_regime = std::abs(p.phi - kPi / 2) <= kRegimeTolerance;

    for (int m = 0; m < n; ++m) {
        const double k = 2.0 * kPi * m / n;
        const BandPair e = dispersion(p, k);
        const cd g = off_diagonal(p, k);
        b.k[m] = k;
        b.E_minus[m] = e.minus;
        b.E_plus[m] = e.plus;
        b.g[m] = g;
        b.norm_minus[m] = std::sqrt(e.minus * e.minus + std::norm(g));
        b.norm_plus[m] = std::sqrt(e.plus * e.plus + std::norm(g));

        if (b.norm_minus[m] >= kDegenerateNorm && b.norm_plus[m] >= kDegenerateNorm) {
            b.mode_minus[m] = Eigen::Vector2cd(e.minus, g) / b.norm_minus[m];
            b.mode_plus[m] = Eigen::Vector2cd(e.plus, g) / b.norm_plus[m];
        } else if (crossing_regime && std::abs(std::cos(k)) < 1e-9) {
            // Band crossing on the grid: h_k vanishes, any orthonormal basis is
            // exact. Use the limits along the fast and slow lines.
            const BandPair v = crossing_velocities(p);
            auto line = [&](double omega) -> Eigen::Vector2cd {
                return Eigen::Vector2cd(omega, cd(0.0, p.rho)) / std::sqrt(omega * omega + p.rho * p.rho);
            };
            b.mode_minus[m] = line(v.minus);
            b.mode_plus[m] = line(v.plus);
            b.E_minus[m] = 0.0;
            b.E_plus[m] = 0.0;
            b.degenerate[m] = true;
        } else {
            // g_k = 0 with one band at zero energy: h_k = diag(2J cos k, 0).
            const bool a_is_plus = e.plus > 0.0 && std::abs(e.plus) >= std::abs(e.minus);
            b.mode_minus[m] = a_is_plus ? Eigen::Vector2cd(0.0, 1.0) : Eigen::Vector2cd(1.0, 0.0);
            b.mode_plus[m] = a_is_plus ? Eigen::Vector2cd(1.0, 0.0) : Eigen::Vector2cd(0.0, 1.0);
            b.degenerate[m] = true;
        }
        b.coupling_minus[m] = p.alpha * b.mode_minus[m](0);
        b.coupling_plus[m] = p.alpha * b.mode_plus[m](0);
    }
    return b;
}

double spectral_radius_bound(const BandStructure& bands)
{
    return std::max(bands.max_abs_energy(), std::abs(bands.params.omega_e)) + bands.params.alpha;
}

const char* band_name(Band band) noexcept
{
    return band == Band::minus ? "minus" : "plus";
}

cd i_pow(long long e) noexcept
{
    switch (((e % 4) + 4) % 4) {
    case 0: return {1.0, 0.0};
    case 1: return {0.0, 1.0};
    case 2: return {-1.0, 0.0};
    default: return {0.0, -1.0};
    }
}

cd FeedbackRates::gamma_n(int n, Band band) const
{
    const long long e = static_cast<long long>(n) * N;
    return band == Band::minus ? gamma0_minus * i_pow(-e) : gamma0_plus * i_pow(e);
}

FeedbackRates feedback_rates(const LatticeParams& p)
{
    require_crossing_regime(p);
    const BandPair v = crossing_velocities(p);
    const BandPair a = crossing_couplings(p);

    FeedbackRates r;
    r.N = p.N;
    r.Omega_minus = v.minus;
    r.Omega_plus = v.plus;
    r.T_minus = p.N / std::abs(v.minus);
    r.T_plus = p.N / std::abs(v.plus);
    r.gamma0_minus = a.minus * a.minus / std::abs(v.minus);
    r.gamma0_plus = a.plus * a.plus / std::abs(v.plus);
    r.gamma0 = r.gamma0_minus + r.gamma0_plus;
    return r;
}

} // namespace crq
