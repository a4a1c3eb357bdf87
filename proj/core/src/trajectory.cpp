#include "crq/trajectory.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <ostream>

#include "crq/error.hpp"

namespace crq {

std::string format_number(double value)
{
    if (value == 0.0) return "0";  // collapses -0
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", value);
    return buf;
}

double max_deviation(const AmplitudeTrajectory& a, const AmplitudeTrajectory& b, double t_limit)
{
    if (std::abs(a.dt - b.dt) > 1e-12 * std::max(a.dt, b.dt)) {
        throw GridMismatch("trajectories sampled with different spacing");
    }
    const std::size_t n = std::min(a.size(), b.size());
    double worst = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        if (t_limit >= 0.0 && a.t[j] > t_limit * (1.0 + 1e-12)) break;
        worst = std::max(worst, std::abs(a.epsilon[j] - b.epsilon[j]));
    }
    return worst;
}

void write_trajectory_csv(std::ostream& os, const AmplitudeTrajectory& traj)
{
    os << "t,eps_re,eps_im,abs_eps_sq,pop_A,pop_B,norm_defect\n";
    const bool pops = traj.has_populations();
    const bool norms = !traj.norm_defect.empty();
    for (std::size_t j = 0; j < traj.size(); ++j) {
        const cd e = traj.epsilon[j];
        os << format_number(traj.t[j]) << ',' << format_number(e.real()) << ','
           << format_number(e.imag()) << ',' << format_number(std::norm(e)) << ',';
        if (pops) os << format_number(traj.pop_A[j]) << ',' << format_number(traj.pop_B[j]);
        else os << ',';
        os << ',';
        if (norms) os << format_number(traj.norm_defect[j]);
        os << '\n';
    }
}

void write_snapshots_csv(std::ostream& os, const std::vector<SiteSnapshot>& snapshots)
{
    os << "t,site,sublattice,abs_amp_sq\n";
    for (const auto& s : snapshots) {
        const std::string t = format_number(s.t);
        for (std::size_t n = 0; n < s.a.size(); ++n) {
            os << t << ',' << n + 1 << ",A," << format_number(s.a[n]) << '\n';
        }
        for (std::size_t n = 0; n < s.b.size(); ++n) {
            os << t << ',' << n + 1 << ",B," << format_number(s.b[n]) << '\n';
        }
    }
}

void write_bands_csv(std::ostream& os, const BandStructure& bands)
{
    os << "k,E_minus,E_plus,abs_g,alpha_minus_re,alpha_minus_im,alpha_plus_re,alpha_plus_im\n";
    for (int m = 0; m < bands.size(); ++m) {
        os << format_number(bands.k[m]) << ',' << format_number(bands.E_minus[m]) << ','
           << format_number(bands.E_plus[m]) << ',' << format_number(std::abs(bands.g[m])) << ','
           << format_number(bands.coupling_minus[m].real()) << ','
           << format_number(bands.coupling_minus[m].imag()) << ','
           << format_number(bands.coupling_plus[m].real()) << ','
           << format_number(bands.coupling_plus[m].imag()) << '\n';
    }
}

} // namespace crq
