#include <gtest/gtest.h>

#include <cmath>

#include <Eigen/Eigenvalues>

#include "crq/error.hpp"
#include "crq/exact_dynamics.hpp"

using namespace crq;

namespace {

LatticeParams ring(int N, double alpha, double omega_e = 0.0, double phi = kPi / 2)
{
    LatticeParams p;
    p.N = N;
    p.J = 1.0;
    p.rho = 1.0;
    p.phi = phi;
    p.alpha = alpha;
    p.omega_e = omega_e;
    return p;
}

} // namespace

TEST(RealspaceHamiltonian, IsExactlyHermitian)
{
    const Eigen::SparseMatrix<cd> h = realspace_hamiltonian(ring(22, 0.3, 0.2));
    const Eigen::SparseMatrix<cd> adj = h.adjoint();
    EXPECT_EQ((h - adj).norm(), 0.0);
    EXPECT_EQ(h.rows(), 45);
}

TEST(RealspaceHamiltonian, BathSpectrumMatchesDispersion)
{
    for (double phi : {0.0, kPi / 2, 1.1}) {
        const LatticeParams p = ring(22, 0.0, 0.0, phi);
        const Eigen::MatrixXcd h = Eigen::MatrixXcd(realspace_hamiltonian(p)).topLeftCorner(44, 44);
        Eigen::SelfAdjointEigenSolver<Eigen::MatrixXcd> es(h);
        const BandStructure b = band_structure(p);
        std::vector<double> expected(b.E_minus);
        expected.insert(expected.end(), b.E_plus.begin(), b.E_plus.end());
        std::sort(expected.begin(), expected.end());
        for (int i = 0; i < 44; ++i) EXPECT_NEAR(es.eigenvalues()(i), expected[i], 1e-10);
    }
}

TEST(EvolveModespace, DecoupledEmitterRotates)
{
    const LatticeParams p = ring(30, 0.0, 0.3);
    const AmplitudeTrajectory tr = evolve_modespace(band_structure(p), 20.0, 0.01);
    for (std::size_t i = 0; i < tr.size(); ++i) {
        EXPECT_NEAR(std::abs(tr.epsilon[i] - std::polar(1.0, -0.3 * tr.t[i])), 0.0, 1e-10);
        EXPECT_NEAR(std::abs(tr.epsilon[i]), 1.0, 1e-10);
    }
}

TEST(EvolveRealspace, DecoupledEmitterLeavesBathEmpty)
{
    const LatticeParams p = ring(30, 0.0);
    const AmplitudeTrajectory tr = evolve_realspace(p, 10.0, 0.01);
    for (std::size_t i = 0; i < tr.size(); ++i) {
        EXPECT_EQ(tr.pop_A[i], 0.0);
        EXPECT_EQ(tr.pop_B[i], 0.0);
        EXPECT_EQ(tr.epsilon[i], cd(1.0));
    }
}

TEST(EvolveModespace, RejectsUnstableStep)
{
    const BandStructure b = band_structure(ring(102, 0.25));
    EXPECT_THROW(evolve_modespace(b, 1.0, 0.1), StepTooLarge);
    EXPECT_THROW(evolve_realspace(b.params, 1.0, 0.1), StepTooLarge);
    EXPECT_THROW(evolve_modespace(b, 1.0, -0.01), StepTooLarge);
    EXPECT_THROW(evolve_modespace(b, 0.0, 0.01), DomainError);
}

TEST(EvolveModespace, InitialStateAndUnitarity)
{
    const LatticeParams p = ring(102, 0.25);
    const BandStructure b = band_structure(p);
    const double t_max = 3.0 * feedback_rates(p).T_minus;
    double e0 = NAN, worst_energy = 0.0;
    EvolveOptions opt;
    opt.stride = 5;
    opt.observer = [&](double, const Eigen::VectorXcd& s) {
        const double e = modespace_energy(b, s);
        if (std::isnan(e0)) e0 = e;
        worst_energy = std::max(worst_energy, std::abs(e - e0));
    };
    const AmplitudeTrajectory tr = evolve_modespace(b, t_max, kDefaultExactDt, opt);
    EXPECT_EQ(tr.epsilon[0], cd(1.0));
    EXPECT_EQ(tr.pop_A[0], 0.0);
    EXPECT_EQ(tr.pop_B[0], 0.0);
    EXPECT_DOUBLE_EQ(tr.dt, 5 * kDefaultExactDt);
    for (std::size_t i = 0; i < tr.size(); ++i) {
        EXPECT_LT(tr.norm_defect[i], 1e-8);
        EXPECT_NEAR(std::norm(tr.epsilon[i]) + tr.pop_A[i] + tr.pop_B[i], 1.0, 1e-8);
    }
    EXPECT_LT(worst_energy, 1e-8);
}

TEST(EvolveRealspace, Unitarity)
{
    const LatticeParams p = ring(102, 0.25);
    const AmplitudeTrajectory tr = evolve_realspace(p, 150.0, kDefaultExactDt);
    for (std::size_t i = 0; i < tr.size(); ++i) {
        EXPECT_LT(tr.norm_defect[i], 1e-8);
        EXPECT_NEAR(std::norm(tr.epsilon[i]) + tr.pop_A[i] + tr.pop_B[i], 1.0, 1e-8);
    }
}

TEST(EvolveBoth, AgreeOnAmplitudePopulationsAndSnapshots)
{
    // Covers the blockade class, an odd ring, the degenerate crossing on the
    // grid, a detuned emitter and a non-crossing flux.
    const LatticeParams cases[] = {ring(102, 0.25), ring(101, 0.1), ring(104, 0.2),
                                   ring(42, 0.3, 0.4), ring(42, 0.3, 0.0, 0.7)};
    for (const LatticeParams& p : cases) {
        EvolveOptions opt;
        opt.stride = 4;
        opt.snapshot_times = {0.0, 37.3, 80.0};
        const AmplitudeTrajectory a = evolve_modespace(band_structure(p), 80.0, 0.01, opt);
        const AmplitudeTrajectory b = evolve_realspace(p, 80.0, 0.01, opt);
        EXPECT_LT(max_deviation(a, b), 1e-9) << "N=" << p.N;
        for (std::size_t i = 0; i < a.size(); ++i) {
            EXPECT_NEAR(a.pop_A[i], b.pop_A[i], 1e-9);
            EXPECT_NEAR(a.pop_B[i], b.pop_B[i], 1e-9);
        }
        ASSERT_EQ(a.snapshots.size(), 3u);
        ASSERT_EQ(b.snapshots.size(), 3u);
        for (int s = 0; s < 3; ++s) {
            EXPECT_DOUBLE_EQ(a.snapshots[s].t, b.snapshots[s].t);
            EXPECT_NEAR(a.snapshots[s].emitter, b.snapshots[s].emitter, 1e-9);
            for (int n = 0; n < p.N; ++n) {
                EXPECT_NEAR(a.snapshots[s].a[n], b.snapshots[s].a[n], 1e-9) << "a_" << n + 1;
                EXPECT_NEAR(a.snapshots[s].b[n], b.snapshots[s].b[n], 1e-9) << "b_" << n + 1;
            }
        }
    }
}

TEST(EvolveModespace, GoldenRuleDecayRate)
{
    // For t < T^- the emitter decays at gamma0 (no feedback yet).
    const LatticeParams p = ring(502, 0.02);
    const FeedbackRates r = feedback_rates(p);
    EvolveOptions opt;
    opt.stride = 100;
    const AmplitudeTrajectory tr = evolve_modespace(band_structure(p), 0.9 * r.T_minus, 0.01, opt);
    // Fit log|eps|^2 between 0.2 T and 0.9 T (past the initial Zeno transient).
    double st = 0, sy = 0, stt = 0, sty = 0, n = 0;
    for (std::size_t i = 0; i < tr.size(); ++i) {
        if (tr.t[i] < 0.2 * r.T_minus) continue;
        const double y = std::log(std::norm(tr.epsilon[i]));
        st += tr.t[i];
        sy += y;
        stt += tr.t[i] * tr.t[i];
        sty += tr.t[i] * y;
        n += 1;
    }
    const double slope = (n * sty - st * sy) / (n * stt - st * st);
    EXPECT_NEAR(-slope / r.gamma0, 1.0, 0.05);
}

TEST(Sites, LayoutAndPeriodicity)
{
    EXPECT_EQ(site_a(10, 1), 0);
    EXPECT_EQ(site_a(10, 11), 0);
    EXPECT_EQ(site_b(10, 0), 19);
    EXPECT_EQ(site_b(10, 1), 10);
    EXPECT_EQ(site_emitter(10), 20);
}

TEST(UnpackModes, SplitsState)
{
    const BandStructure b = band_structure(ring(5, 0.1));
    Eigen::VectorXcd s = Eigen::VectorXcd::LinSpaced(11, 0.0, 10.0);
    const ModeState m = unpack_modes(b, s);
    EXPECT_EQ(m.eps, cd(0.0));
    EXPECT_EQ(m.c_minus(0), cd(1.0));
    EXPECT_EQ(m.c_plus(4), cd(10.0));
}
