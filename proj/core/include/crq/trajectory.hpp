// trajectory.hpp: sampled emitter/bath trajectories and their CSV schemas.

#pragma once

#include <complex>
#include <iosfwd>
#include <optional>
#include <string>
#include <vector>

#include "crq/lattice.hpp"

namespace crq {

/// Site-resolved |amplitude|^2 at one instant. `a[n-1]`, `b[n-1]` are the
/// populations of a_n, b_n.
struct SiteSnapshot {
    double t = 0.0;
    std::vector<double> a, b;
    double emitter = 0.0;
};

/// Emitter amplitude on a uniform grid t_j = j * dt. Solvers that only
/// produce eps(t) leave the population and norm columns empty.
struct AmplitudeTrajectory {
    double dt = 0.0;
    std::vector<double> t;
    std::vector<cd> epsilon;
    std::vector<double> pop_A, pop_B, norm_defect;
    std::vector<SiteSnapshot> snapshots;

    std::size_t size() const noexcept { return t.size(); }
    bool has_populations() const noexcept { return !pop_A.empty(); }
};

/// Largest |a_j - b_j| over the common prefix of two trajectories sampled on
/// the same grid. Throws GridMismatch if the sample spacings differ.
double max_deviation(const AmplitudeTrajectory& a, const AmplitudeTrajectory& b,
                     double t_limit = -1.0);

/// Fixed numeric formatting: 17 significant digits, '.' decimal point.
std::string format_number(double value);

void write_trajectory_csv(std::ostream& os, const AmplitudeTrajectory& traj);
void write_snapshots_csv(std::ostream& os, const std::vector<SiteSnapshot>& snapshots);
void write_bands_csv(std::ostream& os, const BandStructure& bands);

} // namespace crq
