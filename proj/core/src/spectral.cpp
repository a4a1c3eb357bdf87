#include "crq/spectral.hpp"

#include <algorithm>
#include <cmath>
#include <string>

#include <Eigen/Eigenvalues>

#include "crq/error.hpp"
#include "crq/exact_dynamics.hpp"

namespace crq {

namespace {

void require_zero_mode_regime(const LatticeParams& p)
{
    if (p.N % 4 != 2) {
        throw WrongParity("analytic zero mode needs N = 2 mod 4, got N = " + std::to_string(p.N));
    }
    if (std::abs(p.phi - kPi / 2) > 1e-9) throw RegimeError("analytic zero mode needs phi = pi/2");
    if (p.omega_e != 0.0) throw RegimeError("analytic zero mode needs omega_e = 0");
    if (!(p.alpha > 0.0)) throw RegimeError("analytic zero mode needs alpha > 0");
}

bool zero_mode_applies(const LatticeParams& p)
{
    return p.N % 4 == 2 && std::abs(p.phi - kPi / 2) <= 1e-9 && p.omega_e == 0.0 && p.alpha > 0.0;
}

} // namespace

double participation_ratio(const Eigen::VectorXcd& v)
{
    const double s2 = v.squaredNorm();
    double s4 = 0.0;
    for (Eigen::Index i = 0; i < v.size(); ++i) s4 += std::norm(v(i)) * std::norm(v(i));
    return s2 * s2 / s4;
}

std::vector<int> emitter_distances(int N)
{
    std::vector<int> d(2 * N + 1, 0);
    auto ring = [N](int n) {
        const int offset = ((n - 1) % N + N) % N;
        return std::min(offset, N - offset);
    };
    for (int n = 1; n <= N; ++n) {
        d[site_a(N, n)] = ring(n);
        d[site_b(N, n)] = std::min(ring(n), ring(n + 1));
    }
    d[site_emitter(N)] = 0;
    return d;
}

Eigen::VectorXcd zero_mode_candidate(const LatticeParams& p)
{
    const int N = p.N;
    Eigen::VectorXcd v = Eigen::VectorXcd::Zero(2 * N + 1);
    for (int n = 1; n <= N; ++n) v(site_b(N, n)) = i_pow(n - 1);
    v(site_emitter(N)) = -2.0 * p.rho / p.alpha;
    return v;
}

double candidate_residual(const LatticeParams& params, const Eigen::VectorXcd& v)
{
    const Eigen::SparseMatrix<cd> h = realspace_hamiltonian(params);
    const Eigen::VectorXcd hv = h * v;
    return hv.norm() / v.norm();
}

ZeroMode analytic_zero_mode(const LatticeParams& params)
{
    require_zero_mode_regime(params);
    ZeroMode z;
    z.vector = zero_mode_candidate(params);
    z.residual = candidate_residual(params, z.vector);
    return z;
}

double pr_formula(const LatticeParams& params)
{
    require_zero_mode_regime(params);
    const double x = std::pow(2.0 * params.rho / params.alpha, 2);
    return (x + params.N) * (x + params.N) / (x * x + params.N);
}

SpectralReport solve_eigenproblem(const LatticeParams& params, const DarkStateCriteria& criteria,
                                  bool keep_vectors)
{
    const int N = params.N;
    const int dim = 2 * N + 1;
    const Eigen::MatrixXcd h = Eigen::MatrixXcd(realspace_hamiltonian(params));
    Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> solver(h);
    if (solver.info() != Eigen::Success) throw Error("Hermitian eigensolver did not converge");
    const Eigen::VectorXd& w = solver.eigenvalues();
    const Eigen::MatrixXcd& V = solver.eigenvectors();

    SpectralReport r;
    if (params.omega_e != 0.0) {
        r.warnings.push_back("omega_e != 0: the emitter is detuned from the band crossing and the "
                             "dark-state protocol assumes resonance");
    }
    const std::vector<int> dist = emitter_distances(N);
    const Eigen::Index e = site_emitter(N);
    r.eigenvalues.resize(dim);
    r.pr.resize(dim);
    r.emitter_weight.resize(dim);
    r.local_bath_fraction.resize(dim);
    double best = std::numeric_limits<double>::infinity();
    for (int i = 0; i < dim; ++i) {
        const Eigen::VectorXcd v = V.col(i);
        r.eigenvalues[i] = w(i);
        r.pr[i] = participation_ratio(v);
        const double total = v.squaredNorm();
        const double emitter = std::norm(v(e)) / total;
        double local = 0.0, bath = 0.0;
        for (int q = 0; q < dim; ++q) {
            if (q == e) continue;
            const double p = std::norm(v(q));
            bath += p;
            if (dist[q] <= criteria.radius) local += p;
        }
        r.emitter_weight[i] = emitter;
        r.local_bath_fraction[i] = bath > 0.0 ? local / bath : 0.0;
        if (r.pr[i] < best) {
            best = r.pr[i];
            r.min_pr_index = i;
        }
        if (r.pr[i] < criteria.max_pr && bath / total > criteria.min_bath_weight &&
            r.local_bath_fraction[i] > criteria.min_local_fraction) {
            r.dark_indices.push_back(i);
        }
    }
    r.dark_state_found = !r.dark_indices.empty();

    if (zero_mode_applies(params)) {
        const ZeroMode z = analytic_zero_mode(params);
        r.zero_mode_residual = z.residual;
        r.pr_formula_value = pr_formula(params);

        const auto nearest = std::min_element(w.data(), w.data() + dim, [](double a, double b) {
            return std::abs(a) < std::abs(b);
        });
        const int i0 = static_cast<int>(nearest - w.data());
        int lo = i0, hi = i0;
        while (lo > 0 && std::abs(w(lo - 1) - w(i0)) <= 1e-10) --lo;
        while (hi + 1 < dim && std::abs(w(hi + 1) - w(i0)) <= 1e-10) ++hi;
        r.zero_mode_index = i0;
        r.zero_mode_multiplicity = hi - lo + 1;
        double gap = std::numeric_limits<double>::infinity();
        if (lo > 0) gap = std::min(gap, w(i0) - w(lo - 1));
        if (hi + 1 < dim) gap = std::min(gap, w(hi + 1) - w(i0));
        r.zero_mode_gap = gap;
        if (r.zero_mode_multiplicity == 1) {
            r.zero_mode_numeric_pr = r.pr[i0];
        } else {
            const Eigen::MatrixXcd S = V.middleCols(lo, hi - lo + 1);
            const Eigen::VectorXcd projected = S * (S.adjoint() * z.vector);
            r.zero_mode_numeric_pr = participation_ratio(projected);
        }
    }
    if (keep_vectors) r.eigenvectors = V;
    return r;
}

} // namespace crq
