#include "crq/exact_dynamics.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include "crq/detail/rk4.hpp"
#include "crq/error.hpp"

namespace crq {

namespace {

const cd kMinusI{0.0, -1.0};

// Shared fixed-step driver. `populations(state)` returns (pop_A, pop_B) and
// `snapshot(state, t)` builds a site-resolved snapshot.
template <class Generator, class Populations, class Snapshot>
AmplitudeTrajectory drive(Eigen::VectorXcd state, Eigen::Index emitter_index, double t_max,
                          double dt, const EvolveOptions& options, Generator&& gen,
                          Populations&& populations, Snapshot&& snapshot)
{
    if (!(t_max > 0.0)) throw DomainError("t_max must be positive");
    if (options.stride < 1) throw DomainError("output stride must be >= 1");

    const long long steps = std::max(1LL, std::llround(t_max / dt));
    std::vector<long long> snap_steps;
    for (double ts : options.snapshot_times) {
        snap_steps.push_back(std::clamp(std::llround(ts / dt), 0LL, steps));
    }

    AmplitudeTrajectory traj;
    traj.dt = dt * options.stride;
    const std::size_t samples = static_cast<std::size_t>(steps / options.stride) + 1;
    traj.t.reserve(samples);
    traj.epsilon.reserve(samples);
    traj.pop_A.reserve(samples);
    traj.pop_B.reserve(samples);
    traj.norm_defect.reserve(samples);

    auto record = [&](long long j) {
        const double t = static_cast<double>(j) * dt;
        if (j % options.stride == 0) {
            const auto [pa, pb] = populations(state);
            traj.t.push_back(t);
            traj.epsilon.push_back(state(emitter_index));
            traj.pop_A.push_back(pa);
            traj.pop_B.push_back(pb);
            traj.norm_defect.push_back(std::abs(1.0 - state.squaredNorm()));
            if (options.observer) options.observer(t, state);
        }
        for (long long s : snap_steps) {
            if (s == j) traj.snapshots.push_back(snapshot(state, t));
        }
    };

    detail::LinearRk4 rk(state.size());
    record(0);
    for (long long j = 1; j <= steps; ++j) {
        rk.step(state, dt, gen);
        record(j);
    }
    return traj;
}

} // namespace

void check_step(const BandStructure& bands, double dt)
{
    if (!(dt > 0.0)) throw StepTooLarge("dt must be positive");
    const double bound = spectral_radius_bound(bands);
    if (dt * bound > kStabilityMargin) {
        throw StepTooLarge("dt * spectral radius = " + std::to_string(dt * bound) +
                           " exceeds the RK4 margin " + std::to_string(kStabilityMargin));
    }
}

Eigen::SparseMatrix<cd> realspace_hamiltonian(const LatticeParams& p)
{
    validate(p);
    const int N = p.N;
    const cd hop_b_prev = p.rho * std::polar(1.0, -p.phi);  // a_n <- b_{n-1}
    std::vector<Eigen::Triplet<cd>> entries;
    entries.reserve(10 * N + 3);
    auto add_pair = [&](Eigen::Index i, Eigen::Index j, cd value) {
        entries.emplace_back(i, j, value);
        entries.emplace_back(j, i, std::conj(value));
    };
    for (int n = 1; n <= N; ++n) {
        add_pair(site_a(N, n), site_a(N, n + 1), p.J);
        add_pair(site_a(N, n), site_b(N, n), p.rho);
        add_pair(site_a(N, n), site_b(N, n - 1), hop_b_prev);
    }
    const Eigen::Index e = site_emitter(N);
    if (p.omega_e != 0.0) entries.emplace_back(e, e, p.omega_e);
    if (p.alpha != 0.0) add_pair(e, site_a(N, 1), p.alpha);

    Eigen::SparseMatrix<cd> h(2 * N + 1, 2 * N + 1);
    h.setFromTriplets(entries.begin(), entries.end());
    h.makeCompressed();
    return h;
}

ModeState unpack_modes(const BandStructure& bands, const Eigen::VectorXcd& state)
{
    const int N = bands.size();
    return {state(0), state.segment(1, N), state.segment(1 + N, N)};
}

std::pair<double, double> modespace_populations(const BandStructure& bands,
                                                const Eigen::VectorXcd& state)
{
    // The site-basis Bloch amplitudes are conj(mode) combinations of c_k^pm;
    // Parseval turns sublattice sums into sums over k.
    const int N = bands.size();
    double pa = 0.0, pb = 0.0;
    for (int m = 0; m < N; ++m) {
        const cd cm = state(1 + m), cp = state(1 + N + m);
        const Eigen::Vector2cd& vm = bands.mode_minus[m];
        const Eigen::Vector2cd& vp = bands.mode_plus[m];
        pa += std::norm(std::conj(vm(0)) * cm + std::conj(vp(0)) * cp);
        pb += std::norm(std::conj(vm(1)) * cm + std::conj(vp(1)) * cp);
    }
    return {pa, pb};
}

SiteSnapshot modespace_snapshot(const BandStructure& bands, const Eigen::VectorXcd& state, double t)
{
    // A_k = e^{-ik} (conj(v_a^-) c^- + conj(v_a^+) c^+), a_n = N^{-1/2} sum_k e^{ikn} A_k.
    const int N = bands.size();
    std::vector<cd> roots(N);
    for (int m = 0; m < N; ++m) roots[m] = std::polar(1.0, 2.0 * kPi * m / N);

    std::vector<cd> A(N), B(N);
    for (int m = 0; m < N; ++m) {
        const cd cm = state(1 + m), cp = state(1 + N + m);
        const Eigen::Vector2cd& vm = bands.mode_minus[m];
        const Eigen::Vector2cd& vp = bands.mode_plus[m];
        A[m] = std::conj(vm(0)) * cm + std::conj(vp(0)) * cp;
        B[m] = std::conj(vm(1)) * cm + std::conj(vp(1)) * cp;
    }
    SiteSnapshot snap;
    snap.t = t;
    snap.a.resize(N);
    snap.b.resize(N);
    snap.emitter = std::norm(state(0));
    const double scale = 1.0 / N;
    for (int n = 1; n <= N; ++n) {
        cd an = 0.0, bn = 0.0;
        for (int m = 0; m < N; ++m) {
            const cd w = roots[(static_cast<long long>(m) * (n - 1)) % N];
            an += w * A[m];
            bn += w * B[m];
        }
        snap.a[n - 1] = std::norm(an) * scale;
        snap.b[n - 1] = std::norm(bn) * scale;
    }
    return snap;
}

SiteSnapshot realspace_snapshot(int N, const Eigen::VectorXcd& state, double t)
{
    SiteSnapshot snap;
    snap.t = t;
    snap.a.resize(N);
    snap.b.resize(N);
    for (int n = 1; n <= N; ++n) {
        snap.a[n - 1] = std::norm(state(site_a(N, n)));
        snap.b[n - 1] = std::norm(state(site_b(N, n)));
    }
    snap.emitter = std::norm(state(site_emitter(N)));
    return snap;
}

double modespace_energy(const BandStructure& bands, const Eigen::VectorXcd& state)
{
    const int N = bands.size();
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(N));
    double e = bands.params.omega_e * std::norm(state(0));
    cd cross = 0.0;
    for (int m = 0; m < N; ++m) {
        e += bands.E_minus[m] * std::norm(state(1 + m)) + bands.E_plus[m] * std::norm(state(1 + N + m));
        cross += bands.coupling_minus[m] * state(1 + m) + bands.coupling_plus[m] * state(1 + N + m);
    }
    return e + 2.0 * (std::conj(state(0)) * cross * inv_sqrt_n).real();
}

AmplitudeTrajectory evolve_modespace(const BandStructure& bands, double t_max, double dt,
                                     const EvolveOptions& options)
{
    check_step(bands, dt);
    const int N = bands.size();
    const double omega_e = bands.params.omega_e;
    const double inv_sqrt_n = 1.0 / std::sqrt(static_cast<double>(N));

    Eigen::VectorXd energy(2 * N);
    Eigen::VectorXcd coupling(2 * N);
    for (int m = 0; m < N; ++m) {
        energy(m) = bands.E_minus[m];
        energy(N + m) = bands.E_plus[m];
        coupling(m) = bands.coupling_minus[m] * inv_sqrt_n;
        coupling(N + m) = bands.coupling_plus[m] * inv_sqrt_n;
    }

    auto gen = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
        const cd eps = in(0);
        const auto bath = in.tail(2 * N);
        out(0) = kMinusI * (omega_e * eps + coupling.cwiseProduct(bath).sum());
        out.tail(2 * N) = kMinusI * (energy.cwiseProduct(bath) + coupling.conjugate() * eps);
    };

    Eigen::VectorXcd state = Eigen::VectorXcd::Zero(2 * N + 1);
    state(0) = 1.0;
    return drive(
        std::move(state), 0, t_max, dt, options, gen,
        [&](const Eigen::VectorXcd& s) { return modespace_populations(bands, s); },
        [&](const Eigen::VectorXcd& s, double t) { return modespace_snapshot(bands, s, t); });
}

AmplitudeTrajectory evolve_realspace(const LatticeParams& params, double t_max, double dt,
                                     const EvolveOptions& options)
{
    check_step(band_structure(params), dt);
    const int N = params.N;
    const Eigen::SparseMatrix<cd, Eigen::RowMajor> h = realspace_hamiltonian(params);

    auto gen = [&](const Eigen::VectorXcd& in, Eigen::VectorXcd& out) {
        out.noalias() = h * in;
        out *= kMinusI;
    };
    auto populations = [N](const Eigen::VectorXcd& s) {
        return std::pair<double, double>{s.head(N).squaredNorm(), s.segment(N, N).squaredNorm()};
    };

    Eigen::VectorXcd state = Eigen::VectorXcd::Zero(2 * N + 1);
    state(site_emitter(N)) = 1.0;
    return drive(std::move(state), site_emitter(N), t_max, dt, options, gen, populations,
                 [N](const Eigen::VectorXcd& s, double t) { return realspace_snapshot(N, s, t); });
}

} // namespace crq
