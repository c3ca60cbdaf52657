#pragma once

#include <algorithm>
#include <chrono>
#include <cmath>
#include <fstream>
#include <functional>
#include <iostream>
#include <map>
#include <memory>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "echo_rmt/common.hpp"
#include "echo_rmt/concurrence_cp.hpp"
#include "echo_rmt/csv_io.hpp"
#include "echo_rmt/ensembles.hpp"
#include "echo_rmt/fidelity_mc.hpp"
#include "echo_rmt/fidelity_theory.hpp"
#include "echo_rmt/random_streams.hpp"
#include "echo_rmt/spectator_purity.hpp"
#include "echo_rmt/spectral_stats.hpp"

namespace echo_rmt::cli {

inline constexpr const char* kVersion = "0.1.0";

enum ExitCode : int { kExitOk = 0, kExitConfig = 2, kExitNumerical = 3 };

/// n equally spaced points on [0, tmax].
inline std::vector<double> linear_grid(double tmax, int points)
{
    require(points >= 2, "need at least two time points");
    require(tmax > 0.0 && std::isfinite(tmax), "tmax must be positive");
    std::vector<double> grid(static_cast<std::size_t>(points));
    for (int i = 0; i < points; ++i) {
        grid[static_cast<std::size_t>(i)] = tmax * i / (points - 1);
    }
    return grid;
}

namespace detail {

inline std::string trim(const std::string& s)
{
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) {
        return {};
    }
    return s.substr(b, s.find_last_not_of(" \t\r") - b + 1);
}

/*
 * Appends `--key value` for every line of a key=value file whose key is not
 * already given on the command line. Blank lines and '#' comments are skipped.
 */
inline std::vector<std::string> merge_config_file(std::vector<std::string> args)
{
    std::string path;
    for (std::size_t i = 0; i < args.size(); ++i) {
        if (args[i] == "--config" && i + 1 < args.size()) {
            path = args[i + 1];
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i), args.begin() + static_cast<std::ptrdiff_t>(i + 2));
            break;
        }
        if (args[i].rfind("--config=", 0) == 0) {
            path = args[i].substr(9);
            args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
            break;
        }
    }
    if (path.empty()) {
        return args;
    }
    std::ifstream in(path);
    if (!in) {
        throw ConfigError("cannot read config file '" + path + "'");
    }
    auto given = [&](const std::string& flag) {
        return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
            return a == flag || a.rfind(flag + "=", 0) == 0;
        });
    };
    std::string line;
    int lineno = 0;
    while (std::getline(in, line)) {
        ++lineno;
        line = trim(line);
        if (line.empty() || line.front() == '#') {
            continue;
        }
        const auto eq = line.find('=');
        if (eq == std::string::npos) {
            throw ConfigError(path + ":" + std::to_string(lineno) + ": expected key=value");
        }
        std::string key = trim(line.substr(0, eq));
        while (!key.empty() && key.front() == '-') {
            key.erase(key.begin());
        }
        std::replace(key.begin(), key.end(), '_', '-');
        const std::string flag = "--" + key;
        if (!given(flag)) {
            args.push_back(flag);
            args.push_back(trim(line.substr(eq + 1)));
        }
    }
    return args;
}

/// Registers options on a subcommand and remembers how to echo them into metadata.
class OptionSet {
public:
    explicit OptionSet(CLI::App* app) : app_(app) {}

    template <class T>
    CLI::Option* add(const std::string& name, T& value, const std::string& help)
    {
        auto* opt = app_->add_option("--" + name, value, help)->capture_default_str();
        echo_.emplace_back([name, &value](nlohmann::json& j) { j[name] = value; });
        return opt;
    }

    [[nodiscard]] nlohmann::json config() const
    {
        nlohmann::json j = nlohmann::json::object();
        for (const auto& e : echo_) {
            e(j);
        }
        return j;
    }

    [[nodiscard]] CLI::App* app() const { return app_; }

private:
    CLI::App* app_;
    std::vector<std::function<void(nlohmann::json&)>> echo_;
};

struct Common {
    std::string out;
    std::uint64_t seed = 1;
    unsigned workers = 1;
};

inline void add_common(OptionSet& o, Common& c, bool seeded)
{
    o.add("out", c.out, "Output CSV path (metadata goes to <out>.json)")->required();
    if (seeded) {
        o.add("seed", c.seed, "Master seed");
        o.add("workers", c.workers, "Worker threads (default from ECHO_RMT_WORKERS)");
    }
}

inline nlohmann::json base_metadata(const std::string& sub, const OptionSet& o, const Common& c, double seconds)
{
    nlohmann::json meta;
    meta["subcommand"] = sub;
    meta["config"] = o.config();
    meta["master_seed"] = c.seed;
    meta["version"] = kVersion;
    meta["wall_time_seconds"] = seconds;
    return meta;
}

struct FidelityArgs {
    Index n = 1024;
    std::string h0 = "gue";
    std::string v = "gue";
    double eps = -1.0;
    double eps2_heis = -1.0;
    double tmax = 1.5;
    int points = 31;
    int realizations = 20;
    int states = 10;
    double band = 0.5;
    double state_band = 0.5;
    /// Used when neither --eps nor --eps2-heis is given (negative: no default).
    double default_eps2_heis = -1.0;
};

inline void add_fidelity(OptionSet& o, FidelityArgs& a)
{
    o.add("n", a.n, "Matrix dimension of the H0 sample");
    o.add("h0", a.h0, "H0 ensemble: goe, gue, poisson, picket");
    o.add("v", a.v, "Perturbation: goe, gue, gue-zero-diagonal, imaginary-antisymmetric");
    o.add("eps", a.eps, "Perturbation strength in unit-spacing units");
    o.add("eps2-heis", a.eps2_heis, "Squared strength in Heisenberg units (alternative to --eps)");
    o.add("tmax", a.tmax, "Final time in units of tau_H");
    o.add("points", a.points, "Number of time points on [0, tmax]");
    o.add("realizations", a.realizations, "Independent (H0, V) draws");
    o.add("states", a.states, "Random initial states per realization");
    o.add("band", a.band, "Central fraction of the H0 spectrum kept");
    o.add("state-band", a.state_band, "Central fraction of the band carrying the initial states");
}

inline EchoRunConfig fidelity_config(const FidelityArgs& a, const Common& c)
{
    double eps2 = a.eps2_heis;
    if (a.eps < 0.0 && eps2 < 0.0) {
        eps2 = a.default_eps2_heis;
    }
    require((a.eps >= 0.0) != (eps2 >= 0.0), "give exactly one of --eps and --eps2-heis");
    EchoRunConfig cfg;
    cfg.n = a.n;
    cfg.h0_kind = parse_ensemble_kind(a.h0);
    cfg.v_kind = parse_perturbation_kind(a.v);
    cfg.epsilon = a.eps >= 0.0 ? a.eps : unmap_epsilon_units(std::sqrt(eps2), kUnfoldedHeisenbergTime);
    cfg.time_grid = linear_grid(a.tmax, a.points);
    cfg.n_realizations = a.realizations;
    cfg.n_states_per_realization = a.states;
    cfg.band = a.band;
    cfg.state_band = a.state_band;
    cfg.master_seed = c.seed;
    cfg.validate();
    return cfg;
}

struct PurityArgs {
    Index ne = 256;
    double delta = 0.0;
    double lambda = 0.03;
    double theta1 = 0.0;
    double theta2 = 0.0;
    std::string layout = "spectator";
    std::string env = "gue";
    std::string coupling = "gue";
    double tmax = 1.0;
    int points = 41;
    int realizations = 20;
    int states = 10;
    double env_band = 0.5;
};

inline void add_purity(OptionSet& o, PurityArgs& a)
{
    o.add("ne", a.ne, "Environment dimension N_e");
    o.add("delta", a.delta, "Qubit level splitting (unit environment spacing)");
    o.add("lambda", a.lambda, "Coupling strength");
    o.add("theta1", a.theta1, "Entanglement angle in [0, pi/4]");
    o.add("theta2", a.theta2, "Local angle of the coupled qubit in [0, pi/2]");
    o.add("layout", a.layout, "spectator or both");
    o.add("env", a.env, "Environment spectrum ensemble");
    o.add("coupling", a.coupling, "Coupling ensemble");
    o.add("tmax", a.tmax, "Final time in units of tau_H");
    o.add("points", a.points, "Number of time points on [0, tmax]");
    o.add("realizations", a.realizations, "Independent Hamiltonians");
    o.add("states", a.states, "Random environment states per Hamiltonian");
    o.add("env-band", a.env_band, "Central fraction of the sampled spectrum kept as environment");
}

inline SpectatorConfig purity_config(const PurityArgs& a, const Common& c)
{
    SpectatorConfig cfg;
    cfg.n_env = a.ne;
    cfg.delta = a.delta;
    cfg.lambda = a.lambda;
    cfg.theta1 = a.theta1;
    cfg.theta2 = a.theta2;
    cfg.layout = parse_coupling_layout(a.layout);
    cfg.env_kind = parse_ensemble_kind(a.env);
    cfg.coupling_kind = parse_perturbation_kind(a.coupling);
    cfg.time_grid = linear_grid(a.tmax, a.points);
    cfg.n_realizations = a.realizations;
    cfg.n_states = a.states;
    cfg.env_band = a.env_band;
    cfg.master_seed = c.seed;
    cfg.validate();
    return cfg;
}

inline constexpr std::uint64_t kEnsembleStreamSalt = 0xE75E7B1EULL;

} // namespace detail

/*
 * Parses argv, runs one subcommand and writes its CSV plus a JSON sidecar.
 * Returns 0 on success, 2 on configuration errors (including bad flags) and
 * 3 on numerical or I/O failures.
 */
inline int run_cli(int argc, const char* const* argv, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    using namespace detail;
    std::vector<std::string> args(argv + 1, argv + argc);
    try {
        args = merge_config_file(std::move(args));
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    }

    CLI::App app{"Random-matrix fidelity and decoherence experiments"};
    app.require_subcommand(1);
    app.set_version_flag("--version", kVersion);

    Common common;
    common.workers = default_worker_count();
    std::function<void()> action;
    std::vector<std::unique_ptr<OptionSet>> sets;
    auto subcommand = [&](const std::string& name, const std::string& help) {
        sets.push_back(std::make_unique<OptionSet>(app.add_subcommand(name, help)));
        return sets.back().get();
    };
    std::string chosen;
    nlohmann::json extra;

    // ensemble-validate
    struct {
        std::string kind = "gue";
        Index n = 512;
        int realizations = 100;
        double band = 0.5;
        int bins = 40;
        double smax = 4.0;
        std::string ff_out;
        double ff_tau_max = 1.5;
        double ff_step = 0.05;
        double ff_width = 0.05;
    } ens;
    {
        auto* o = subcommand("ensemble-validate", "Spacing histogram, KS distance to the surmise, optional form factor");
        add_common(*o, common, true);
        o->add("kind", ens.kind, "goe, gue, poisson, picket");
        o->add("n", ens.n, "Spectrum size");
        o->add("realizations", ens.realizations, "Number of spectra");
        o->add("band", ens.band, "Central fraction used for spacings");
        o->add("bins", ens.bins, "Histogram bins on [0, smax]");
        o->add("smax", ens.smax, "Histogram upper edge");
        o->add("ff-out", ens.ff_out, "Optional form-factor CSV (tau,K2,stderr_K2,K2_theory)");
        o->add("ff-tau-max", ens.ff_tau_max, "Largest tau for the form factor");
        o->add("ff-step", ens.ff_step, "tau step");
        o->add("ff-width", ens.ff_width, "tau averaging window");
        o->app()->callback([&] {
            chosen = "ensemble-validate";
            action = [&] {
                require(ens.realizations >= 1, "need at least one realization");
                require(ens.bins >= 1 && ens.smax > 0.0, "histogram needs bins >= 1 and smax > 0");
                const EnsembleKind kind = parse_ensemble_kind(ens.kind);
                std::vector<UnfoldedSpectrum> spectra(static_cast<std::size_t>(ens.realizations));
                parallel_for(spectra.size(), common.workers, [&](std::size_t k) {
                    Engine rng = derive_stream(common.seed, k, kEnsembleStreamSalt);
                    spectra[k] = sample_unfolded_levels(kind, ens.n, rng);
                });
                std::vector<double> s;
                std::size_t clamped = 0;
                for (const auto& sp : spectra) {
                    const auto set = nn_spacings(sp, ens.band);
                    s.insert(s.end(), set.spacings.begin(), set.spacings.end());
                    clamped += sp.clamped;
                }
                std::function<double(double)> cdf;
                std::function<double(double)> pdf;
                if (kind == EnsembleKind::GOE || kind == EnsembleKind::GUE) {
                    const int beta = kind == EnsembleKind::GOE ? 1 : 2;
                    cdf = [beta](double x) { return wigner_surmise_cdf(x, beta); };
                    pdf = [beta](double x) { return wigner_surmise_pdf(x, beta); };
                } else if (kind == EnsembleKind::PoissonSpectrum) {
                    cdf = [](double x) { return 1.0 - std::exp(-x); };
                    pdf = [](double x) { return std::exp(-x); };
                }
                const double width = ens.smax / ens.bins;
                CsvTable hist{{"s", "density", "reference"}, std::vector<std::vector<double>>(3)};
                std::vector<double> counts(static_cast<std::size_t>(ens.bins), 0.0);
                for (double x : s) {
                    const auto b = static_cast<long>(std::floor(x / width));
                    if (b >= 0 && b < ens.bins) {
                        counts[static_cast<std::size_t>(b)] += 1.0;
                    }
                }
                for (int b = 0; b < ens.bins; ++b) {
                    const double mid = (b + 0.5) * width;
                    hist.columns[0].push_back(mid);
                    hist.columns[1].push_back(counts[static_cast<std::size_t>(b)] / (width * static_cast<double>(s.size())));
                    hist.columns[2].push_back(pdf ? pdf(mid) : 0.0);
                }
                write_csv(hist, common.out);
                extra["n_spacings"] = s.size();
                extra["clamped_levels"] = clamped;
                if (cdf) {
                    extra["ks_distance"] = ks_distance(s, cdf);
                }
                if (!ens.ff_out.empty()) {
                    require(ens.ff_step > 0.0 && ens.ff_tau_max > 0.0, "form factor needs positive step and range");
                    std::vector<std::vector<double>> bands;
                    for (const auto& sp : spectra) {
                        bands.push_back(central_band(sp, ens.band));
                    }
                    CsvTable ff{{"tau", "K2", "stderr_K2", "K2_theory"}, std::vector<std::vector<double>>(4)};
                    const auto steps = static_cast<int>(std::floor(ens.ff_tau_max / ens.ff_step + 1e-9));
                    for (int i = 1; i <= steps; ++i) {
                        const double tau = i * ens.ff_step;
                        const auto est = form_factor_window(bands, tau, ens.ff_width);
                        ff.columns[0].push_back(tau);
                        ff.columns[1].push_back(est.value);
                        ff.columns[2].push_back(est.stderr_value);
                        ff.columns[3].push_back(kind == EnsembleKind::GUE ? 1.0 - b2_gue(tau) : std::nan(""));
                    }
                    write_csv(ff, ens.ff_out);
                    extra["form_factor_csv"] = ens.ff_out;
                }
            };
        });
    }

    // fidelity-mc and freeze
    FidelityArgs fid;
    FidelityArgs frz;
    frz.v = "gue-zero-diagonal";
    frz.default_eps2_heis = 0.1;
    frz.tmax = 4.0;
    frz.points = 41;
    auto fidelity_action = [&](const FidelityArgs& a, bool freeze) {
        const EchoRunConfig cfg = fidelity_config(a, common);
        const FidelitySeries series = run_fidelity_mc(cfg, common.workers);
        write_series_csv(series, common.out);
        const double eps_theory = map_epsilon_units(cfg.epsilon, kUnfoldedHeisenbergTime);
        extra["epsilon_native"] = cfg.epsilon;
        extra["epsilon_heisenberg"] = eps_theory;
        extra["n_samples"] = series.n_samples;
        if (freeze) {
            extra["plateau"] = freeze_plateau(eps_theory, 1.0);
        }
    };
    {
        auto* o = subcommand("fidelity-mc", "Monte Carlo fidelity amplitude f(t) and F(t)");
        add_common(*o, common, true);
        add_fidelity(*o, fid);
        o->app()->callback([&] {
            chosen = "fidelity-mc";
            action = [&] { fidelity_action(fid, false); };
        });
    }
    {
        auto* o = subcommand("freeze", "Fidelity freeze run (zero-diagonal perturbation by default)");
        add_common(*o, common, true);
        add_fidelity(*o, frz);
        o->app()->callback([&] {
            chosen = "freeze";
            action = [&] { fidelity_action(frz, true); };
        });
    }

    // fidelity-theory
    struct {
        std::string kind = "elr";
        double eps2 = 1.0;
        double tmax = 2.0;
        int points = 200;
        int beta_v = 2;
        std::string h0 = "gue";
        std::string convention = "triangle";
        double tau_h = 1.0;
    } th;
    {
        auto* o = subcommand("fidelity-theory", "Tabulate lr, elr, susy-gue, susy-goe or freeze curves");
        add_common(*o, common, false);
        o->add("kind", th.kind, "lr, elr, susy-gue, susy-goe, freeze");
        o->add("eps2", th.eps2, "Squared perturbation strength (units of tau-h)");
        o->add("tmax", th.tmax, "Final time");
        o->add("points", th.points, "Number of points on [0, tmax]");
        o->add("beta-v", th.beta_v, "Symmetry index of V (1 or 2)");
        o->add("h0", th.h0, "H0 ensemble: goe, gue, poisson, picket");
        o->add("convention", th.convention, "triangle or square");
        o->add("tau-h", th.tau_h, "Heisenberg time in the units of t");
        o->app()->callback([&] {
            chosen = "fidelity-theory";
            action = [&] {
                require(th.eps2 >= 0.0, "eps2 must be nonnegative");
                require(th.tau_h > 0.0, "tau-h must be positive");
                require(th.beta_v == 1 || th.beta_v == 2, "beta-v must be 1 or 2");
                TheoryCurve c;
                c.kind = parse_theory_kind(th.kind);
                c.epsilon = std::sqrt(th.eps2);
                c.beta_v = th.beta_v;
                c.h0_kind = parse_ensemble_kind(th.h0);
                c.convention = parse_correlation_convention(th.convention);
                c.tau_h = th.tau_h;
                write_series_csv(tabulate_theory(c, linear_grid(th.tmax, th.points)), common.out);
            };
        });
    }

    // purity-mc, cp-plane, concurrence-decay
    PurityArgs pur;
    {
        auto* o = subcommand("purity-mc", "Monte Carlo purity of the two-qubit state");
        add_common(*o, common, true);
        add_purity(*o, pur);
        o->app()->callback([&] {
            chosen = "purity-mc";
            action = [&] {
                const SpectatorConfig cfg = purity_config(pur, common);
                const PuritySeries series = run_purity_mc(cfg, common.workers);
                write_series_csv(series, common.out);
                extra["n_samples"] = series.n_samples;
            };
        });
    }

    PurityArgs cpa;
    cpa.theta1 = kPi / 4.0;
    cpa.lambda = 0.14;
    cpa.delta = 1.0;
    cpa.ne = 64;
    cpa.tmax = 3.0;
    cpa.points = 301;
    cpa.realizations = 15;
    cpa.states = 15;
    int cp_bins = kDefaultPurityBins;
    double cp_p_min = 1.0 / 3.0;
    {
        auto* o = subcommand("cp-plane", "Binned concurrence-purity curve and its distance to the Werner curve");
        add_common(*o, common, true);
        add_purity(*o, cpa);
        o->add("bins", cp_bins, "Equal-width purity bins on [1/4, 1]");
        o->add("p-min", cp_p_min, "Lower purity limit of the distance integral");
        o->app()->callback([&] {
            chosen = "cp-plane";
            action = [&] {
                SpectatorConfig cfg = purity_config(cpa, common);
                cfg.record_samples = true;
                const PuritySeries series = run_purity_mc(cfg, common.workers);
                const CPCurve curve = bin_cp_points(pooled_samples(series), cp_bins, cp_p_min);
                write_series_csv(curve, common.out);
                extra["p_min"] = cp_p_min;
                extra["distance"] = cp_distance(curve);
                extra["ansatz_distance"] = ansatz_distance(cfg.lambda, static_cast<double>(cfg.n_env));
            };
        });
    }

    PurityArgs cda;
    cda.theta1 = kPi / 4.0;
    cda.lambda = 0.01;
    cda.layout = "both";
    cda.tmax = 10.0;
    cda.points = 41;
    cda.realizations = 10;
    cda.states = 10;
    {
        auto* o = subcommand("concurrence-decay", "Mean concurrence and purity against the ELR prediction");
        add_common(*o, common, true);
        add_purity(*o, cda);
        o->app()->callback([&] {
            chosen = "concurrence-decay";
            action = [&] {
                const SpectatorConfig cfg = purity_config(cda, common);
                const PuritySeries s = run_purity_mc(cfg, common.workers);
                CsvTable t{{"t_over_tauh", "C", "stderr_C", "P", "stderr_P", "P_elr", "C_elr"},
                           {s.t_over_tau_h, s.mean_C, s.stderr_C, s.mean_P, s.stderr_P, {}, {}}};
                for (double x : s.t_over_tau_h) {
                    const double p = elr_purity_for(cfg, x);
                    t.columns[5].push_back(p);
                    t.columns[6].push_back(elr_concurrence(p));
                }
                write_csv(t, common.out);
                extra["n_samples"] = s.n_samples;
                extra["p_infinity"] = p_infinity_for(cfg);
            };
        });
    }

    // purity-theory
    struct {
        std::string kind = "lr";
        double theta1 = 0.0;
        double theta2 = 0.0;
        double lambda = 0.03;
        double delta = 0.0;
        std::string layout = "spectator";
        std::string regime = "general";
        std::string convention = "born";
        double tmax = 1.0;
        int points = 101;
    } pt;
    {
        auto* o = subcommand("purity-theory", "Tabulate linear-response or ELR purity against t/tau_H");
        add_common(*o, common, false);
        o->add("kind", pt.kind, "lr or elr");
        o->add("theta1", pt.theta1, "Entanglement angle in [0, pi/4]");
        o->add("theta2", pt.theta2, "Local angle in [0, pi/2]");
        o->add("lambda", pt.lambda, "Coupling strength");
        o->add("delta", pt.delta, "Qubit level splitting");
        o->add("layout", pt.layout, "spectator or both");
        o->add("regime", pt.regime, "general, degenerate or fast (spectator only)");
        o->add("convention", pt.convention, "born or printed");
        o->add("tmax", pt.tmax, "Final time in units of tau_H");
        o->add("points", pt.points, "Number of points on [0, tmax]");
        o->app()->callback([&] {
            chosen = "purity-theory";
            action = [&] {
                require(pt.kind == "lr" || pt.kind == "elr", "purity-theory kind must be lr or elr");
                SpectatorConfig cfg;
                cfg.theta1 = pt.theta1;
                cfg.theta2 = pt.theta2;
                cfg.lambda = pt.lambda;
                cfg.delta = pt.delta;
                cfg.layout = parse_coupling_layout(pt.layout);
                const PurityRegime regime = parse_purity_regime(pt.regime);
                const PurityConvention conv = parse_purity_convention(pt.convention);
                require(regime == PurityRegime::General || cfg.layout == CouplingLayout::Spectator,
                        "degenerate and fast regimes are spectator-only");
                validate_angles(cfg.theta1, cfg.theta2);
                TheoryCurve c;
                c.t = linear_grid(pt.tmax, pt.points);
                const double tau_h = kUnfoldedHeisenbergTime;
                for (double x : c.t) {
                    double p = regime == PurityRegime::General
                                   ? lr_purity_for(cfg, x, conv)
                                   : lr_purity(cfg.theta1, cfg.theta2, cfg.lambda, cfg.delta, x * tau_h, tau_h, regime, conv);
                    if (pt.kind == "elr") {
                        p = elr_purity(p, p_infinity_for(cfg));
                    }
                    c.value.push_back(p);
                }
                write_series_csv(c, common.out);
            };
        });
    }

    std::vector<const char*> ptrs{argv[0]};
    for (const auto& a : args) {
        ptrs.push_back(a.c_str());
    }
    try {
        app.parse(static_cast<int>(ptrs.size()), ptrs.data());
    } catch (const CLI::ParseError& e) {
        const int code = app.exit(e, out, err);
        return code == 0 ? kExitOk : kExitConfig;
    }

    try {
        require(common.workers >= 1, "workers must be at least 1");
        const auto start = std::chrono::steady_clock::now();
        action();
        const double seconds = std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
        const OptionSet* set = nullptr;
        for (const auto& s : sets) {
            if (s->app()->get_name() == chosen) {
                set = s.get();
            }
        }
        nlohmann::json meta = base_metadata(chosen, *set, common, seconds);
        meta["workers"] = common.workers;
        for (auto it = extra.begin(); it != extra.end(); ++it) {
            meta[it.key()] = it.value();
        }
        write_metadata(meta, common.out);
        return kExitOk;
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << '\n';
        return kExitConfig;
    } catch (const IoError& e) {
        err << "error: " << e.what() << '\n';
        return kExitNumerical;
    } catch (const NumericalError& e) {
        err << "numerical error: " << e.what() << '\n';
        return kExitNumerical;
    }
}

inline int run_cli(const std::vector<std::string>& args, std::ostream& out = std::cout, std::ostream& err = std::cerr)
{
    std::vector<const char*> ptrs{"echo-rmt"};
    for (const auto& a : args) {
        ptrs.push_back(a.c_str());
    }
    return run_cli(static_cast<int>(ptrs.size()), ptrs.data(), out, err);
}

} // namespace echo_rmt::cli
