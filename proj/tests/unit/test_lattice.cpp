#include <gtest/gtest.h>

#include <cmath>
#include <random>

#include <Eigen/Eigenvalues>

#include "crq/error.hpp"
#include "crq/lattice.hpp"

using namespace crq;

namespace {

LatticeParams ring(int N, double alpha, double phi = kPi / 2, double J = 1.0, double rho = 1.0)
{
    LatticeParams p;
    p.N = N;
    p.J = J;
    p.rho = rho;
    p.phi = phi;
    p.alpha = alpha;
    return p;
}

std::map<std::string, double> raw_record()
{
    return {{"N", 502}, {"J", 1}, {"rho", 1}, {"phi", kPi / 2}, {"alpha", 0.01}, {"omega_e", 0}};
}

} // namespace

TEST(BuildParams, AcceptsFigureParameters)
{
    const LatticeParams p = build_params(raw_record());
    EXPECT_EQ(p.N, 502);
    EXPECT_DOUBLE_EQ(p.alpha, 0.01);
    EXPECT_DOUBLE_EQ(p.omega, 0.0);
    EXPECT_EQ(p.parity(), 2);
}

TEST(BuildParams, OddRingParity)
{
    auto raw = raw_record();
    raw["N"] = 501;
    raw.erase("omega_e");
    const LatticeParams p = build_params(raw);
    EXPECT_EQ(p.parity(), 1);
    EXPECT_DOUBLE_EQ(p.omega_e, 0.0);
}

TEST(BuildParams, RejectsTooSmallRing)
{
    auto raw = raw_record();
    raw["N"] = 2;
    try {
        build_params(raw);
        FAIL() << "expected InvalidValue";
    } catch (const InvalidValue& e) {
        EXPECT_EQ(e.key(), "N");
    }
}

TEST(BuildParams, NamesMissingKey)
{
    auto raw = raw_record();
    raw.erase("alpha");
    try {
        build_params(raw);
        FAIL() << "expected MissingKey";
    } catch (const MissingKey& e) {
        EXPECT_EQ(e.key(), "alpha");
    }
}

TEST(BuildParams, RejectsBadValues)
{
    auto raw = raw_record();
    raw["N"] = 10.5;
    EXPECT_THROW(build_params(raw), InvalidValue);
    raw = raw_record();
    raw["J"] = std::nan("");
    EXPECT_THROW(build_params(raw), InvalidValue);
    raw = raw_record();
    raw["rho"] = INFINITY;
    EXPECT_THROW(build_params(raw), InvalidValue);
    raw = raw_record();
    raw["alpha"] = -0.1;
    EXPECT_THROW(build_params(raw), InvalidValue);
}

TEST(LatticeParams, HashIsStableAndSensitive)
{
    const LatticeParams a = ring(502, 0.01);
    EXPECT_EQ(a.hash(), ring(502, 0.01).hash());
    EXPECT_NE(a.hash(), ring(502, 0.02).hash());
    EXPECT_NE(a.hash(), ring(501, 0.01).hash());
}

TEST(Dispersion, ClosesAtCrossing)
{
    const BandPair e = dispersion(ring(502, 0, kPi / 2, 1.0, 0.5), kPi / 2);
    EXPECT_NEAR(e.minus, 0.0, 1e-12);
    EXPECT_NEAR(e.plus, 0.0, 1e-12);
}

TEST(Dispersion, TimeReversalSymmetricPoint)
{
    const BandPair e = dispersion(ring(502, 0, 0.0, 1.0, 0.5), 0.0);
    EXPECT_NEAR(e.minus, 1.0 - std::sqrt(2.0), 1e-14);
    EXPECT_NEAR(e.plus, 1.0 + std::sqrt(2.0), 1e-14);
}

TEST(Dispersion, ChiralPointMatchesBlochEigenvalues)
{
    const LatticeParams p = ring(502, 0, kPi / 2, 1.0, 0.5);
    const BandPair e = dispersion(p, 0.0);
    EXPECT_NEAR(e.minus, 1.0 - std::sqrt(1.5), 1e-14);
    EXPECT_NEAR(e.plus, 1.0 + std::sqrt(1.5), 1e-14);
    Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(bloch_matrix(p, 0.0));
    EXPECT_NEAR(es.eigenvalues()(0), e.minus, 1e-12);
    EXPECT_NEAR(es.eigenvalues()(1), e.plus, 1e-12);
}

TEST(BlochMatrix, Examples)
{
    const Eigen::Matrix2cd zero = bloch_matrix(ring(10, 0), kPi / 2);
    EXPECT_LT(zero.norm(), 1e-15);
    const Eigen::Matrix2cd h = bloch_matrix(ring(10, 0, 0.0, 1.0, 0.5), 0.0);
    EXPECT_NEAR(std::abs(h(0, 0) - 2.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(h(0, 1) - 1.0), 0.0, 1e-15);
    EXPECT_NEAR(std::abs(h(1, 0) - 1.0), 0.0, 1e-15);
    EXPECT_EQ(h(1, 1), cd(0.0));
}

TEST(BlochMatrix, EigenvaluesMatchDispersionAtRandomPoints)
{
    std::mt19937_64 rng(7);
    std::uniform_real_distribution<double> u(-kPi, kPi), w(0.2, 2.0);
    for (int i = 0; i < 50; ++i) {
        const LatticeParams p = ring(10, 0, u(rng), w(rng), w(rng));
        const double k = u(rng);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(bloch_matrix(p, k));
        const BandPair e = dispersion(p, k);
        EXPECT_NEAR(es.eigenvalues()(0), e.minus, 1e-12);
        EXPECT_NEAR(es.eigenvalues()(1), e.plus, 1e-12);
    }
}

TEST(BandStructure, GridAvoidsCrossingForBlockadeClass)
{
    const BandStructure b = band_structure(ring(502, 0.01));
    ASSERT_EQ(b.size(), 502);
    double smallest = INFINITY;
    for (int m = 0; m < b.size(); ++m) {
        smallest = std::min({smallest, b.norm_minus[m], b.norm_plus[m]});
        EXPECT_FALSE(b.degenerate[m]);
    }
    EXPECT_GT(smallest, 1e-3);
}

TEST(BandStructure, DeterminantIdentityAndOrdering)
{
    for (double phi : {0.0, kPi / 4, kPi / 2}) {
        const BandStructure b = band_structure(ring(102, 0.1, phi, 1.0, 0.7));
        for (int m = 0; m < b.size(); ++m) {
            EXPECT_NEAR(b.E_plus[m] * b.E_minus[m] + std::norm(b.g[m]), 0.0, 1e-12);
            EXPECT_GE(b.E_plus[m], b.E_minus[m]);
        }
    }
}

TEST(BandStructure, Chirality)
{
    auto asymmetry = [](double phi) {
        const BandStructure b = band_structure(ring(102, 0.0, phi));
        double worst = 0.0;
        for (int m = 0; m < b.size(); ++m) {
            const int mirror = (b.size() - m) % b.size();
            worst = std::max({worst, std::abs(b.E_minus[m] - b.E_minus[mirror]),
                              std::abs(b.E_plus[m] - b.E_plus[mirror])});
        }
        return worst;
    };
    EXPECT_LT(asymmetry(0.0), 1e-12);
    EXPECT_GT(asymmetry(kPi / 2), 0.1);
}

TEST(BandStructure, ModesAreOrthonormalEigenvectors)
{
    for (int N : {102, 504}) {
        const BandStructure b = band_structure(ring(N, 0.1));
        for (int m = 0; m < b.size(); ++m) {
            const Eigen::Matrix2cd h = bloch_matrix(b.params, b.k[m]);
            const Eigen::Vector2cd& vm = b.mode_minus[m];
            const Eigen::Vector2cd& vp = b.mode_plus[m];
            EXPECT_NEAR(vm.squaredNorm(), 1.0, 1e-12);
            EXPECT_NEAR(vp.squaredNorm(), 1.0, 1e-12);
            EXPECT_NEAR(std::abs(vm.dot(vp)), 0.0, 1e-12);
            EXPECT_LT((h * vm - b.E_minus[m] * vm).norm(), 1e-12);
            EXPECT_LT((h * vp - b.E_plus[m] * vp).norm(), 1e-12);
        }
    }
}

TEST(BandStructure, DegenerateCrossingUsesLimitCouplings)
{
    const LatticeParams p = ring(504, 0.01);
    const BandStructure b = band_structure(p);
    const int m = 504 / 4;
    ASSERT_TRUE(b.degenerate[m]);
    const BandPair lim = crossing_couplings(p);
    EXPECT_NEAR(std::abs(b.coupling_minus[m]), lim.minus, 1e-15);
    EXPECT_NEAR(std::abs(b.coupling_plus[m]), lim.plus, 1e-15);
}

TEST(BandStructure, TimeReversalCouplingSigns)
{
    const BandStructure b = band_structure(ring(101, 0.3, 0.0));
    for (int m = 0; m < b.size(); ++m) {
        EXPECT_EQ(b.coupling_minus[m].imag(), 0.0);
        EXPECT_EQ(b.coupling_plus[m].imag(), 0.0);
        EXPECT_LE(b.coupling_minus[m].real() * b.coupling_plus[m].real(), 1e-15);
    }
}

TEST(BandStructure, CouplingSumRuleFromUnitaryTransform)
{
    // Transform the site-basis coupling vector alpha e_a with numerically
    // diagonalized h_k and compare with the closed-form couplings.
    std::mt19937_64 rng(11);
    std::uniform_real_distribution<double> u(0.0, 2.0 * kPi);
    const double alpha = 0.37;
    const LatticeParams p = ring(10, alpha, kPi / 2, 1.0, 0.8);
    for (int i = 0; i < 10; ++i) {
        const double k = u(rng);
        Eigen::SelfAdjointEigenSolver<Eigen::Matrix2cd> es(bloch_matrix(p, k));
        const Eigen::Matrix2cd U = es.eigenvectors();
        const double am = alpha * std::abs(U(0, 0)), ap = alpha * std::abs(U(0, 1));
        const BandPair e = dispersion(p, k);
        const double g2 = std::norm(off_diagonal(p, k));
        const double nm2 = e.minus * e.minus + g2, np2 = e.plus * e.plus + g2;
        const double closed = alpha * alpha * (e.plus * e.plus * nm2 + e.minus * e.minus * np2) / (np2 * nm2);
        EXPECT_NEAR(am * am + ap * ap, closed, 1e-10);
        EXPECT_NEAR(am, alpha * std::abs(e.minus) / std::sqrt(nm2), 1e-10);
        EXPECT_NEAR(ap, alpha * std::abs(e.plus) / std::sqrt(np2), 1e-10);
    }
}

TEST(CrossingCouplings, RequiresCrossingRegime)
{
    EXPECT_THROW(crossing_couplings(ring(502, 0.01, 0.0)), RegimeError);
    EXPECT_THROW(feedback_rates(ring(502, 0.01, kPi / 2 + 1e-6)), RegimeError);
    EXPECT_NO_THROW(crossing_couplings(ring(502, 0.01, kPi / 2 + 1e-10)));
}

TEST(CrossingCouplings, ZeroCoupling)
{
    const BandPair a = crossing_couplings(ring(502, 0.0));
    EXPECT_EQ(a.minus, 0.0);
    EXPECT_EQ(a.plus, 0.0);
}

TEST(CrossingCouplings, MatchesLimitAlongEachBand)
{
    const LatticeParams p = ring(502, 0.01);
    const BandPair lim = crossing_couplings(p);
    const double k = kPi / 2 + 1e-6;
    const BandPair e = dispersion(p, k);
    const double g2 = std::norm(off_diagonal(p, k));
    EXPECT_NEAR(p.alpha * std::abs(e.minus) / std::sqrt(e.minus * e.minus + g2), lim.minus, 1e-8);
    EXPECT_NEAR(p.alpha * std::abs(e.plus) / std::sqrt(e.plus * e.plus + g2), lim.plus, 1e-8);
}

TEST(CrossingCouplings, EqualRatesForBothBands)
{
    const FeedbackRates r = feedback_rates(ring(502, 0.01));
    EXPECT_NEAR(r.gamma0_plus, r.gamma0_minus, 1e-12 * r.gamma0_minus);
    EXPECT_NEAR(r.gamma0_minus, 0.01 * 0.01 / (2.0 * std::sqrt(2.0)), 1e-18);
    EXPECT_NEAR(r.gamma0, r.gamma0_plus + r.gamma0_minus, 0.0);
}

TEST(FeedbackRates, LoopTimesAtFigureParameters)
{
    const FeedbackRates r = feedback_rates(ring(502, 0.01));
    EXPECT_NEAR(r.T_minus, 207.935, 1e-3);
    EXPECT_NEAR(r.T_plus, 1211.935, 1e-3);
    EXPECT_NEAR(r.T_plus / r.T_minus, 3.0 + 2.0 * std::sqrt(2.0), 1e-12);
    EXPECT_NEAR(r.T_meet(1), 502.0 / (2.0 * std::sqrt(2.0)), 1e-9);
    EXPECT_NEAR(r.T_meet(3), 3.0 * r.T_meet(1), 1e-9);
}

TEST(FeedbackRates, VelocitiesMatchFiniteDifferenceSlopes)
{
    const LatticeParams p = ring(502, 0.01);
    const FeedbackRates r = feedback_rates(p);
    const double h = 1e-6;
    const BandPair e = dispersion(p, kPi / 2 + h);
    EXPECT_NEAR(e.minus / h, r.Omega_minus, 1e-5);
    EXPECT_NEAR(e.plus / h, r.Omega_plus, 1e-5);
}

TEST(FeedbackRates, PhasesArePureAndExact)
{
    for (int N : {501, 502, 503, 504}) {
        const FeedbackRates r = feedback_rates(ring(N, 0.01));
        for (int n = 1; n <= 9; ++n) {
            for (Band b : {Band::minus, Band::plus}) {
                const cd g = r.gamma_n(n, b);
                EXPECT_NEAR(std::abs(g), r.gamma0_of(b), 1e-18);
                const double sign = b == Band::minus ? -1.0 : 1.0;
                const cd direct = std::polar(r.gamma0_of(b), sign * kPi * n * N / 2.0);
                EXPECT_NEAR(std::abs(g - direct), 0.0, 1e-9 * r.gamma0_of(b));
            }
        }
    }
}

TEST(FeedbackRates, BlockadeClassAlternates)
{
    const FeedbackRates r = feedback_rates(ring(502, 0.01));
    for (int n = 1; n <= 8; ++n) {
        const cd g = r.gamma_n(n, Band::minus);
        EXPECT_EQ(g.imag(), 0.0);
        EXPECT_EQ(g.real(), (n % 2 == 0 ? 1.0 : -1.0) * r.gamma0_minus);
    }
}

TEST(FeedbackRates, OddRingHasImaginaryFirstRates)
{
    const FeedbackRates r = feedback_rates(ring(501, 0.01));
    EXPECT_EQ(r.gamma_n(1, Band::minus).real(), 0.0);
    EXPECT_EQ(r.gamma_n(1, Band::plus).real(), 0.0);
    EXPECT_NE(r.gamma_n(1, Band::minus).imag(), 0.0);
}

TEST(IPow, Cycle)
{
    EXPECT_EQ(i_pow(0), cd(1, 0));
    EXPECT_EQ(i_pow(1), cd(0, 1));
    EXPECT_EQ(i_pow(-1), cd(0, -1));
    EXPECT_EQ(i_pow(6), cd(-1, 0));
    EXPECT_EQ(i_pow(-1003), cd(0, 1));
}

TEST(SpectralRadiusBound, CoversBandsAndEmitter)
{
    LatticeParams p = ring(102, 0.25);
    p.omega_e = 7.0;
    const BandStructure b = band_structure(p);
    EXPECT_DOUBLE_EQ(spectral_radius_bound(b), 7.25);
}
