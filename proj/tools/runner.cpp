#include "runner.hpp"

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <map>
#include <optional>
#include <regex>
#include <set>

#include "crq/analytic.hpp"
#include "crq/delay_dynamics.hpp"
#include "crq/error.hpp"
#include "crq/exact_dynamics.hpp"
#include "crq/kernel_dynamics.hpp"
#include "crq/spectral.hpp"
#include "crq/trajectory.hpp"

namespace fs = std::filesystem;
using nlohmann::json;

namespace crq::runner {

namespace {

constexpr const char* kScenarioNames[] = {"bands",     "evolve_exact", "evolve_kernel",
                                          "evolve_dde", "analytic",     "staircase",
                                          "spectrum",   "crosscheck",   "figures"};

const std::set<std::string> kLatticeKeys = {"N", "J", "rho", "phi", "omega", "alpha", "omega_e"};
const std::set<std::string> kRunKeys = {"scenario",       "params",         "t_max",
                                        "dt",             "output_dir",     "output_stride",
                                        "stride",         "seed",           "basis",
                                        "snapshot_times", "dump_vectors",   "snapshot_every"};

bool needs_t_max(Scenario s)
{
    switch (s) {
    case Scenario::evolve_exact:
    case Scenario::evolve_kernel:
    case Scenario::evolve_dde:
    case Scenario::analytic:
    case Scenario::crosscheck: return true;
    default: return false;
    }
}

json number_or_null(double v)
{
    return std::isfinite(v) ? json(v) : json(nullptr);
}

long long parse_integer(const json& v, const std::string& key, long long lo)
{
    const double x = parse_real(v, key);
    if (x != std::floor(x) || x < static_cast<double>(lo) || x > 9.0e15) {
        throw ConfigError(key, "expected an integer >= " + std::to_string(lo));
    }
    return static_cast<long long>(x);
}

double positive(const json& v, const std::string& key, const FeedbackRates* rates)
{
    const double x = parse_real(v, key, rates);
    if (!(x > 0.0) || !std::isfinite(x)) throw ConfigError(key, "must be positive");
    return x;
}

// Keeps every `stride`-th sample; the spacing of the result is stride * dt.
AmplitudeTrajectory thin(const AmplitudeTrajectory& in, int stride)
{
    if (stride <= 1) return in;
    AmplitudeTrajectory out;
    out.dt = in.dt * stride;
    out.snapshots = in.snapshots;
    for (std::size_t j = 0; j < in.size(); j += static_cast<std::size_t>(stride)) {
        out.t.push_back(in.t[j]);
        out.epsilon.push_back(in.epsilon[j]);
        if (in.has_populations()) {
            out.pop_A.push_back(in.pop_A[j]);
            out.pop_B.push_back(in.pop_B[j]);
        }
        if (!in.norm_defect.empty()) out.norm_defect.push_back(in.norm_defect[j]);
    }
    return out;
}

class Output {
public:
    explicit Output(const std::string& dir) : dir_(dir)
    {
        std::error_code ec;
        fs::create_directories(dir_, ec);
        if (ec) throw IoError("cannot create output directory '" + dir + "': " + ec.message());
    }

    template <class Fn>
    void write(const std::string& name, Fn&& fn)
    {
        const fs::path path = dir_ / name;
        std::ofstream os(path, std::ios::binary | std::ios::trunc);
        if (!os) throw IoError("cannot open '" + path.string() + "' for writing");
        fn(os);
        os.flush();
        if (!os) throw IoError("write failed for '" + path.string() + "'");
        files_.push_back(name);
    }

    void write_json(const std::string& name, const json& j)
    {
        write(name, [&](std::ostream& os) { os << j.dump(2) << '\n'; });
    }

    const std::vector<std::string>& files() const { return files_; }

private:
    fs::path dir_;
    std::vector<std::string> files_;
};

double abs_sq_last(const AmplitudeTrajectory& tr)
{
    return tr.size() == 0 ? 0.0 : std::norm(tr.epsilon.back());
}

json run_bands(const ScenarioConfig& c, Output& out)
{
    const BandStructure b = band_structure(c.params);
    out.write("bands.csv", [&](std::ostream& os) { write_bands_csv(os, b); });
    int lo_minus = 0, lo_plus = 0;
    for (int m = 1; m < b.size(); ++m) {
        if (std::abs(b.E_minus[m]) < std::abs(b.E_minus[lo_minus])) lo_minus = m;
        if (std::abs(b.E_plus[m]) < std::abs(b.E_plus[lo_plus])) lo_plus = m;
    }
    return {{"k_min_abs_E_minus", b.k[lo_minus]}, {"k_min_abs_E_plus", b.k[lo_plus]},
            {"min_abs_E_minus", std::abs(b.E_minus[lo_minus])},
            {"min_abs_E_plus", std::abs(b.E_plus[lo_plus])}};
}

json run_exact(ScenarioConfig& c, Output& out)
{
    if (c.dt == 0.0) c.dt = kDefaultExactDt;
    EvolveOptions opt;
    opt.stride = c.output_stride;
    opt.snapshot_times = c.snapshot_times;
    const AmplitudeTrajectory tr = c.basis == "site"
                                       ? evolve_realspace(c.params, c.t_max, c.dt, opt)
                                       : evolve_modespace(band_structure(c.params), c.t_max, c.dt, opt);
    out.write("trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, tr); });
    if (!tr.snapshots.empty()) {
        out.write("snapshots.csv", [&](std::ostream& os) { write_snapshots_csv(os, tr.snapshots); });
    }
    const double worst = tr.norm_defect.empty()
                             ? 0.0
                             : *std::max_element(tr.norm_defect.begin(), tr.norm_defect.end());
    return {{"final_abs_eps_sq", abs_sq_last(tr)}, {"max_norm_defect", worst}, {"samples", tr.size()}};
}

double default_kernel_step(double t_max)
{
    return std::max(0.02, t_max / static_cast<double>(kVolterraBudget - 1));
}

json run_kernel(ScenarioConfig& c, Output& out)
{
    if (c.dt == 0.0) c.dt = default_kernel_step(c.t_max);
    const MemoryKernel K = build_kernel(band_structure(c.params), c.dt, c.t_max);
    const AmplitudeTrajectory tr = thin(solve_volterra(K, c.params.omega_e, c.t_max), c.output_stride);
    out.write("trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, tr); });
    out.write("kernel.csv", [&](std::ostream& os) { write_kernel_csv(os, K); });
    return {{"final_abs_eps_sq", abs_sq_last(tr)}, {"kernel_samples", K.size()}};
}

json ladder_json(const DdeSolution& sol, const FeedbackRates& r)
{
    json terms = json::array();
    for (const FeedbackTerm& f : sol.ladder) {
        terms.push_back({{"n", f.n},
                         {"band", band_name(f.band)},
                         {"gamma_re", f.gamma.real()},
                         {"gamma_im", f.gamma.imag()},
                         {"delay_steps", f.delay_steps},
                         {"delay", static_cast<double>(f.delay_steps) * sol.trajectory.dt}});
    }
    return {{"dt", sol.trajectory.dt}, {"T_minus", r.T_minus}, {"T_plus", r.T_plus},
            {"gamma0_minus", r.gamma0_minus}, {"gamma0_plus", r.gamma0_plus},
            {"gamma0", r.gamma0}, {"terms", terms}};
}

json run_dde(ScenarioConfig& c, Output& out)
{
    const FeedbackRates r = feedback_rates(c.params);
    if (c.dt == 0.0) c.dt = default_dde_step(r);
    const DdeSolution sol = solve_dde(make_delay_spec(r, c.t_max, c.params.omega_e), c.t_max, c.dt);
    const AmplitudeTrajectory tr = thin(sol.trajectory, c.output_stride);
    out.write("trajectory.csv", [&](std::ostream& os) { write_trajectory_csv(os, tr); });
    out.write_json("ladder.json", ladder_json(sol, r));
    return {{"final_abs_eps_sq", abs_sq_last(tr)}, {"feedback_terms", sol.ladder.size()}};
}

AmplitudeTrajectory sample(double t_max, double dt, const std::function<cd(double)>& f)
{
    AmplitudeTrajectory tr;
    tr.dt = dt;
    const auto n = static_cast<long long>(std::floor(t_max / dt + 1e-9));
    for (long long j = 0; j <= n; ++j) {
        const double t = static_cast<double>(j) * dt;
        tr.t.push_back(t);
        tr.epsilon.push_back(f(t));
    }
    return tr;
}

json run_analytic(ScenarioConfig& c, Output& out)
{
    const FeedbackRates r = feedback_rates(c.params);
    if (c.params.parity() != 2) throw WrongParity("the series solution needs N = 2 mod 4");
    if (c.t_max >= r.T_plus) {
        throw ConfigError("t_max", "the series solution holds only below T+ = " + format_number(r.T_plus));
    }
    if (c.dt == 0.0) c.dt = r.T_minus / kDefaultDdeStepsPerLoop;
    const AmplitudeTrajectory tr =
        thin(sample(c.t_max, c.dt, [&](double t) { return series_amplitude(r, t); }), c.output_stride);
    out.write("series.csv", [&](std::ostream& os) { write_trajectory_csv(os, tr); });
    return {{"final_abs_eps_sq", abs_sq_last(tr)}, {"T_minus", r.T_minus}, {"T_plus", r.T_plus}};
}

json run_staircase(ScenarioConfig& c, Output& out)
{
    const FeedbackRates r = feedback_rates(c.params);
    const int parity = c.params.parity();
    const double limit = parity == 0 ? 0.0 : staircase_limit(r, parity);
    const double span = c.t_max > 0.0 ? c.t_max : limit;
    const int n_pieces = std::max(1, static_cast<int>(std::ceil(span / r.T_minus - 1e-12)));
    const std::vector<StaircasePiece> pieces = staircase_pieces(r, parity, n_pieces);
    const double horizon = staircase_horizon(r, parity, pieces);

    json list = json::array();
    for (const StaircasePiece& p : pieces) {
        list.push_back({{"t_lo", p.t_lo},
                        {"t_hi", p.t_hi},
                        {"branch", branch_name(p.branch)},
                        {"re_intercept", p.re_intercept},
                        {"re_slope", p.re_slope},
                        {"im_intercept", p.im_intercept},
                        {"im_slope", p.im_slope}});
    }
    const json doc = {{"parity", parity},       {"T_minus", r.T_minus}, {"T_plus", r.T_plus},
                      {"gamma0", r.gamma0},     {"limit", limit},       {"horizon", horizon},
                      {"horizon_over_T_minus", horizon / r.T_minus},    {"time_unit", "T_minus"},
                      {"pieces", list}};
    out.write_json("staircase.json", doc);

    if (c.dt == 0.0) c.dt = r.T_minus / 200.0;
    const double end = pieces.back().t_hi * r.T_minus;
    const AmplitudeTrajectory tr = thin(
        sample(end, c.dt, [&](double t) { return staircase_value(pieces, r.T_minus, std::min(t, end)); }),
        c.output_stride);
    out.write("staircase.csv", [&](std::ostream& os) { write_trajectory_csv(os, tr); });
    return {{"pieces", pieces.size()}, {"horizon_over_T_minus", horizon / r.T_minus}};
}

json run_spectrum(ScenarioConfig& c, Output& out)
{
    const SpectralReport rep = solve_eigenproblem(c.params, {}, c.dump_vectors);
    const json doc = {{"eigenvalues", rep.eigenvalues},
                      {"pr", rep.pr},
                      {"emitter_weight", rep.emitter_weight},
                      {"local_bath_fraction", rep.local_bath_fraction},
                      {"min_pr_index", rep.min_pr_index},
                      {"dark_state_found", rep.dark_state_found},
                      {"dark_indices", rep.dark_indices},
                      {"zero_mode_residual", number_or_null(rep.zero_mode_residual)},
                      {"pr_formula_value", number_or_null(rep.pr_formula_value)},
                      {"zero_mode_numeric_pr", number_or_null(rep.zero_mode_numeric_pr)},
                      {"zero_mode_index", rep.zero_mode_index},
                      {"zero_mode_multiplicity", rep.zero_mode_multiplicity},
                      {"zero_mode_gap", number_or_null(rep.zero_mode_gap)},
                      {"warnings", rep.warnings}};
    out.write_json("spectrum.json", doc);
    if (c.dump_vectors) {
        out.write("eigenvectors.csv", [&](std::ostream& os) {
            os << "mode,component,re,im\n";
            for (Eigen::Index i = 0; i < rep.eigenvectors.cols(); ++i) {
                for (Eigen::Index q = 0; q < rep.eigenvectors.rows(); ++q) {
                    const cd v = rep.eigenvectors(q, i);
                    os << i << ',' << q << ',' << format_number(v.real()) << ','
                       << format_number(v.imag()) << '\n';
                }
            }
        });
    }
    return {{"dark_state_found", rep.dark_state_found},
            {"min_pr", rep.pr.empty() ? 0.0 : rep.pr[rep.min_pr_index]},
            {"zero_mode_residual", number_or_null(rep.zero_mode_residual)}};
}

json run_crosscheck(ScenarioConfig& c, Output& out)
{
    // All three solvers are compared on the kernel grid.
    if (c.dt == 0.0) c.dt = default_kernel_step(c.t_max);
    const BandStructure bands = band_structure(c.params);
    const FeedbackRates r = feedback_rates(c.params);
    const int sub = std::max(1, static_cast<int>(std::ceil(c.dt / kDefaultExactDt - 1e-9)));
    EvolveOptions opt;
    opt.stride = sub;
    const AmplitudeTrajectory exact = evolve_modespace(bands, c.t_max, c.dt / sub, opt);
    const AmplitudeTrajectory kernel =
        solve_volterra(build_kernel(bands, c.dt, c.t_max), c.params.omega_e, c.t_max);
    const double dde_dt = default_dde_step(r);
    const DdeSolution dde = solve_dde(make_delay_spec(r, c.t_max, c.params.omega_e), c.t_max, dde_dt);

    const std::size_t n = std::min(exact.size(), kernel.size());
    double ek = 0.0, ed = 0.0, kd = 0.0;
    for (std::size_t j = 0; j < n; ++j) {
        const double t = std::min(kernel.t[j], c.t_max);
        const cd d = dde.at(t);
        ek = std::max(ek, std::abs(exact.epsilon[j] - kernel.epsilon[j]));
        ed = std::max(ed, std::abs(exact.epsilon[j] - d));
        kd = std::max(kd, std::abs(kernel.epsilon[j] - d));
    }
    out.write("crosscheck.csv", [&](std::ostream& os) {
        os << "t,exact_re,exact_im,kernel_re,kernel_im,dde_re,dde_im\n";
        for (std::size_t j = 0; j < n; j += static_cast<std::size_t>(c.output_stride)) {
            const cd d = dde.at(std::min(kernel.t[j], c.t_max));
            os << format_number(kernel.t[j]) << ',' << format_number(exact.epsilon[j].real()) << ','
               << format_number(exact.epsilon[j].imag()) << ','
               << format_number(kernel.epsilon[j].real()) << ','
               << format_number(kernel.epsilon[j].imag()) << ',' << format_number(d.real()) << ','
               << format_number(d.imag()) << '\n';
        }
    });
    const json doc = {{"grid_dt", c.dt},
                      {"exact_dt", c.dt / sub},
                      {"dde_dt", dde_dt},
                      {"samples", n},
                      {"max_deviation",
                       {{"exact_kernel", ek}, {"exact_dde", ed}, {"kernel_dde", kd}}}};
    out.write_json("crosscheck.json", doc);
    return doc["max_deviation"];
}

LatticeParams reference_ring(int N, double alpha)
{
    LatticeParams p;
    p.N = N;
    p.J = 1.0;
    p.rho = 1.0;
    p.phi = kPi / 2;
    p.alpha = alpha;
    return p;
}

void write_alpha_rows(std::ostream& os, double alpha, const AmplitudeTrajectory& tr)
{
    for (std::size_t j = 0; j < tr.size(); ++j) {
        const cd e = tr.epsilon[j];
        os << format_number(alpha) << ',' << format_number(tr.t[j]) << ','
           << format_number(e.real()) << ',' << format_number(e.imag()) << ','
           << format_number(std::norm(e)) << '\n';
    }
}

void write_site_map(std::ostream& os, const std::vector<SiteSnapshot>& snaps, bool sublattice_a)
{
    os << "t,site,abs_amp_sq\n";
    for (const SiteSnapshot& s : snaps) {
        const std::vector<double>& v = sublattice_a ? s.a : s.b;
        const std::string t = format_number(s.t);
        for (std::size_t n = 0; n < v.size(); ++n) {
            os << t << ',' << n + 1 << ',' << format_number(v[n]) << '\n';
        }
    }
}

json run_figures(ScenarioConfig& c, Output& out)
{
    if (c.dt == 0.0) c.dt = kDefaultExactDt;
    EvolveOptions opt;
    opt.stride = c.output_stride;
    auto evolve = [&](const LatticeParams& p, double loops, const EvolveOptions& o) {
        return evolve_modespace(band_structure(p), loops * feedback_rates(p).T_minus, c.dt, o);
    };
    const char* header = "alpha,t,eps_re,eps_im,abs_eps_sq\n";

    out.write("fig2a.csv", [&](std::ostream& os) {
        os << header;
        for (double a : {0.25, 0.50}) write_alpha_rows(os, a, evolve(reference_ring(502, a), 4.0, opt));
    });
    out.write("fig2b.csv", [&](std::ostream& os) {
        os << header;
        for (double a : {0.01, 0.02}) write_alpha_rows(os, a, evolve(reference_ring(502, a), 8.0, opt));
    });

    const LatticeParams p3 = reference_ring(502, 0.01);
    const FeedbackRates r3 = feedback_rates(p3);
    const double t3 = 6.0 * r3.T_minus;
    EvolveOptions opt3 = opt;
    for (double t = 0.0; t <= t3; t += c.snapshot_every) opt3.snapshot_times.push_back(t);
    const AmplitudeTrajectory tr3 = evolve(p3, 6.0, opt3);
    out.write("fig3a.csv", [&](std::ostream& os) {
        os << "t,pop_A,pop_B,abs_eps_sq\n";
        for (std::size_t j = 0; j < tr3.size(); ++j) {
            os << format_number(tr3.t[j]) << ',' << format_number(tr3.pop_A[j]) << ','
               << format_number(tr3.pop_B[j]) << ',' << format_number(std::norm(tr3.epsilon[j])) << '\n';
        }
    });
    out.write("fig3b.csv", [&](std::ostream& os) { write_site_map(os, tr3.snapshots, true); });
    out.write("fig3c.csv", [&](std::ostream& os) { write_site_map(os, tr3.snapshots, false); });

    const LatticeParams pa = reference_ring(501, 0.01);
    const FeedbackRates ra = feedback_rates(pa);
    const AmplitudeTrajectory tra = evolve(pa, 14.0, opt);
    out.write("figA1.csv", [&](std::ostream& os) { write_trajectory_csv(os, tra); });

    out.write("markers.csv", [&](std::ostream& os) {
        os << "figure,kind,n,t\n";
        auto row = [&](const char* fig, const char* kind, int n, double t) {
            os << fig << ',' << kind << ',' << n << ',' << format_number(t) << '\n';
        };
        for (int n = 1; n <= 4; ++n) row("fig2a", "loop", n, n * r3.T_minus);
        for (int n = 1; n <= 8; ++n) row("fig2b", "loop", n, n * r3.T_minus);
        for (int n = 1; n <= 6; ++n) row("fig3", "loop", n, n * r3.T_minus);
        for (int n = 1; r3.T_meet(n) <= t3; ++n) row("fig3", "meet", n, r3.T_meet(n));
        for (int n = 1; n <= 14; ++n) row("figA1", "loop", n, n * ra.T_minus);
    });
    return {{"T_minus_502", r3.T_minus}, {"T_meet_502", r3.T_meet(1)}, {"T_minus_501", ra.T_minus}};
}

std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return "";
    return s.substr(b, s.find_last_not_of(" \t") - b + 1);
}

} // namespace

const char* scenario_name(Scenario s) noexcept
{
    return kScenarioNames[static_cast<int>(s)];
}

Scenario parse_scenario(const std::string& name)
{
    for (int i = 0; i < static_cast<int>(std::size(kScenarioNames)); ++i) {
        if (name == kScenarioNames[i]) return static_cast<Scenario>(i);
    }
    throw ConfigError("scenario", "unknown scenario '" + name + "'");
}

double parse_real(const json& value, const std::string& key, const FeedbackRates* rates)
{
    if (value.is_number()) return value.get<double>();
    if (!value.is_string()) throw ConfigError(key, "expected a number or numeric expression");
    static const std::regex re(
        R"(^([+-])?\s*((?:\d+\.?\d*|\.\d+)(?:[eE][+-]?\d+)?)?\s*\*?\s*(pi|T-|T\+)?\s*(?:/\s*((?:\d+\.?\d*|\.\d+)))?$)");
    const std::string text = trim(value.get<std::string>());
    std::smatch m;
    if (!std::regex_match(text, m, re) || (!m[2].matched && !m[3].matched)) {
        throw ConfigError(key, "cannot parse '" + text + "'");
    }
    double x = m[2].matched ? std::strtod(m[2].str().c_str(), nullptr) : 1.0;
    if (m[3].matched) {
        const std::string unit = m[3].str();
        if (unit == "pi") {
            x *= kPi;
        } else {
            if (rates == nullptr) throw ConfigError(key, "loop-time units are not available here");
            x *= unit == "T-" ? rates->T_minus : rates->T_plus;
        }
    }
    if (m[4].matched) {
        const double d = std::strtod(m[4].str().c_str(), nullptr);
        if (d == 0.0) throw ConfigError(key, "division by zero");
        x /= d;
    }
    return m[1].matched && m[1].str() == "-" ? -x : x;
}

json merge_config(json base, const json& overlay)
{
    if (!base.is_object()) base = json::object();
    for (auto it = overlay.begin(); it != overlay.end(); ++it) {
        if (it.key() == "params" && it->is_object() && base.contains("params") &&
            base["params"].is_object()) {
            for (auto p = it->begin(); p != it->end(); ++p) base["params"][p.key()] = *p;
        } else {
            base[it.key()] = *it;
        }
    }
    return base;
}

ScenarioConfig parse_config(const json& input)
{
    const json& doc = input.contains("config") && input["config"].is_object() ? input["config"] : input;
    if (!doc.is_object()) throw ConfigError("config", "expected a JSON object");
    for (auto it = doc.begin(); it != doc.end(); ++it) {
        if (!kRunKeys.count(it.key()) && !kLatticeKeys.count(it.key())) {
            throw ConfigError(it.key(), "unknown key");
        }
    }

    ScenarioConfig c;
    if (!doc.contains("scenario")) throw ConfigError("scenario", "required");
    if (!doc["scenario"].is_string()) throw ConfigError("scenario", "expected a string");
    c.scenario = parse_scenario(doc["scenario"].get<std::string>());

    json lattice = json::object();
    for (const std::string& k : kLatticeKeys) {
        if (doc.contains(k)) lattice[k] = doc[k];
    }
    if (doc.contains("params")) {
        if (!doc["params"].is_object()) throw ConfigError("params", "expected an object");
        for (auto it = doc["params"].begin(); it != doc["params"].end(); ++it) {
            if (!kLatticeKeys.count(it.key())) throw ConfigError(it.key(), "unknown lattice key");
            lattice[it.key()] = *it;
        }
    }
    std::map<std::string, double> raw;
    for (auto it = lattice.begin(); it != lattice.end(); ++it) raw[it.key()] = parse_real(*it, it.key());
    if (c.scenario == Scenario::bands && !raw.count("alpha")) raw["alpha"] = 0.0;
    if (c.scenario == Scenario::figures) {
        // Figure datasets use fixed parameter sets; lattice keys are not used.
        c.params = reference_ring(502, 0.01);
    } else {
        try {
            c.params = build_params(raw);
        } catch (const KeyedError& e) {
            throw ConfigError(e.key(), e.what());
        }
    }

    std::optional<FeedbackRates> rates;
    try {
        rates = feedback_rates(c.params);
    } catch (const Error&) {
    }
    const FeedbackRates* rp = rates ? &*rates : nullptr;

    if (doc.contains("t_max")) c.t_max = positive(doc["t_max"], "t_max", rp);
    else if (needs_t_max(c.scenario)) throw ConfigError("t_max", "required");
    if (doc.contains("dt")) c.dt = positive(doc["dt"], "dt", rp);
    if (doc.contains("output_dir")) {
        if (!doc["output_dir"].is_string()) throw ConfigError("output_dir", "expected a string");
        c.output_dir = doc["output_dir"].get<std::string>();
    }
    c.output_stride = c.scenario == Scenario::figures ? 10 : 1;
    if (doc.contains("stride")) c.output_stride = static_cast<int>(parse_integer(doc["stride"], "stride", 1));
    if (doc.contains("output_stride")) {
        c.output_stride = static_cast<int>(parse_integer(doc["output_stride"], "output_stride", 1));
    }
    if (doc.contains("seed")) c.seed = static_cast<std::uint64_t>(parse_integer(doc["seed"], "seed", 0));
    if (doc.contains("basis")) {
        if (!doc["basis"].is_string()) throw ConfigError("basis", "expected a string");
        c.basis = doc["basis"].get<std::string>();
        if (c.basis != "mode" && c.basis != "site") throw ConfigError("basis", "expected 'mode' or 'site'");
    }
    if (doc.contains("snapshot_times")) {
        if (!doc["snapshot_times"].is_array()) throw ConfigError("snapshot_times", "expected an array");
        for (const json& t : doc["snapshot_times"]) {
            const double v = parse_real(t, "snapshot_times", rp);
            if (v < 0.0) throw ConfigError("snapshot_times", "times must be non-negative");
            c.snapshot_times.push_back(v);
        }
    }
    if (doc.contains("dump_vectors")) {
        if (!doc["dump_vectors"].is_boolean()) throw ConfigError("dump_vectors", "expected a boolean");
        c.dump_vectors = doc["dump_vectors"].get<bool>();
    }
    if (doc.contains("snapshot_every")) c.snapshot_every = positive(doc["snapshot_every"], "snapshot_every", rp);
    return c;
}

json ScenarioConfig::to_json() const
{
    json j = {{"scenario", scenario_name(scenario)},
              {"params",
               {{"N", params.N},
                {"J", params.J},
                {"rho", params.rho},
                {"phi", params.phi},
                {"omega", params.omega},
                {"alpha", params.alpha},
                {"omega_e", params.omega_e}}},
              {"output_dir", output_dir},
              {"output_stride", output_stride},
              {"seed", seed},
              {"basis", basis},
              {"snapshot_times", snapshot_times},
              {"dump_vectors", dump_vectors},
              {"snapshot_every", snapshot_every}};
    if (t_max > 0.0) j["t_max"] = t_max;
    if (dt > 0.0) j["dt"] = dt;
    return j;
}

std::string default_output_dir(const std::string& explicit_dir)
{
    if (!explicit_dir.empty()) return explicit_dir;
    if (const char* env = std::getenv("CRQ_OUT_DIR"); env != nullptr && *env != '\0') return env;
    return "crq_out";
}

RunReport run(const ScenarioConfig& config)
{
    const auto start = std::chrono::steady_clock::now();
    ScenarioConfig c = config;
    c.output_dir = default_output_dir(c.output_dir);
    Output out(c.output_dir);

    json summary;
    switch (c.scenario) {
    case Scenario::bands: summary = run_bands(c, out); break;
    case Scenario::evolve_exact: summary = run_exact(c, out); break;
    case Scenario::evolve_kernel: summary = run_kernel(c, out); break;
    case Scenario::evolve_dde: summary = run_dde(c, out); break;
    case Scenario::analytic: summary = run_analytic(c, out); break;
    case Scenario::staircase: summary = run_staircase(c, out); break;
    case Scenario::spectrum: summary = run_spectrum(c, out); break;
    case Scenario::crosscheck: summary = run_crosscheck(c, out); break;
    case Scenario::figures: summary = run_figures(c, out); break;
    }

    const double wall = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
    RunReport report;
    report.files = out.files();
    report.summary = summary;
    const json manifest = {{"tool", "crq"},
                           {"version", kVersion},
                           {"config", c.to_json()},
                           {"params_hash", std::to_string(c.params.hash())},
                           {"files", report.files},
                           {"summary", summary},
                           {"wall_clock_seconds", wall}};
    out.write_json("manifest.json", manifest);
    return report;
}

} // namespace crq::runner
