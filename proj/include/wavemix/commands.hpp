#pragma once

// Command layer behind the CLI: a fully resolved RunConfig drives each of
// fit / simulate / mc and is serialized verbatim into the output metadata,
// so any metadata file fed back as a config reproduces the run byte for
// byte. Values in a config file take precedence over command-line flags.

#include <filesystem>
#include <fstream>
#include <iostream>
#include <optional>
#include <stdexcept>
#include <string>
#include <vector>

#include <json.hpp>

#include "wavemix/gibbs.hpp"
#include "wavemix/inference.hpp"
#include "wavemix/io.hpp"
#include "wavemix/simgen.hpp"
#include "wavemix/version.hpp"

namespace wavemix {

struct RunConfig {
    std::string command;  // fit | simulate | mc

    // input (fit)
    std::string input_path;
    std::string value_column = "value";
    std::string date_column;
    std::string aggregate = "none";        // none | monthly_mean
    std::string date_format = "iso";       // iso | dmy
    std::string delimiter = ",";
    std::string length_policy = "strict";  // strict | truncate

    // model / chain
    std::string slab = "gaussian";  // gaussian | laplace
    std::string filter = "coif3";
    int iterations = 6000;
    int burn_in = 1000;
    int thin = 5;
    std::uint64_t seed = 1;
    int refit_every = 1;
    bool store_z = false;
    bool store_theta = false;

    // scenario (simulate / mc)
    std::string curve = "sinusoidal";  // sinusoidal | blocks | bumps | constant
    std::size_t n = 1024;
    double mu1 = 0.0, mu2 = 2.0;
    double tau21 = 4.0, tau22 = 4.0;
    double level = 0.5;  // constant curve height
    int replicates = 30;
    int threads = 0;

    std::string output_dir = ".";

    SlabFamily::Kind slab_kind() const {
        if (slab == "gaussian") return SlabFamily::Kind::gaussian;
        if (slab == "laplace") return SlabFamily::Kind::laplace;
        throw std::invalid_argument("slab must be 'gaussian' or 'laplace', got '" + slab + "'");
    }

    ChainConfig chain_config() const {
        ChainConfig c;
        c.iterations = iterations;
        c.burn_in = burn_in;
        c.thin = thin;
        c.seed = seed;
        c.slab = slab_kind();
        c.hyperparam_refit_every = refit_every;
        c.store_z = store_z;
        c.store_theta = store_theta;
        c.filter = filter_by_name(filter);
        c.validate();
        return c;
    }

    ScenarioConfig scenario_config() const {
        ScenarioConfig s;
        s.curve.kind = WeightCurve::kind_from_string(curve);
        s.curve.n = n;
        s.curve.level = level;
        s.mu1 = mu1;
        s.mu2 = mu2;
        s.tau21 = tau21;
        s.tau22 = tau22;
        s.replicates = replicates;
        s.chain = chain_config();
        s.threads = threads;
        s.validate();
        return s;
    }
};

inline void to_json(nlohmann::json& j, const RunConfig& c) {
    j = nlohmann::json{{"command", c.command},
                       {"input_path", c.input_path},
                       {"value_column", c.value_column},
                       {"date_column", c.date_column},
                       {"aggregate", c.aggregate},
                       {"date_format", c.date_format},
                       {"delimiter", c.delimiter},
                       {"length_policy", c.length_policy},
                       {"slab", c.slab},
                       {"filter", c.filter},
                       {"iterations", c.iterations},
                       {"burn_in", c.burn_in},
                       {"thin", c.thin},
                       {"seed", c.seed},
                       {"refit_every", c.refit_every},
                       {"store_z", c.store_z},
                       {"store_theta", c.store_theta},
                       {"curve", c.curve},
                       {"n", c.n},
                       {"mu1", c.mu1},
                       {"mu2", c.mu2},
                       {"tau21", c.tau21},
                       {"tau22", c.tau22},
                       {"level", c.level},
                       {"replicates", c.replicates},
                       {"threads", c.threads},
                       {"output_dir", c.output_dir},
                       {"version", kVersion}};
}

inline void from_json(const nlohmann::json& j, RunConfig& c) {
    auto get = [&](const char* key, auto& field) {
        if (j.contains(key)) j.at(key).get_to(field);
    };
    get("command", c.command);
    get("input_path", c.input_path);
    get("value_column", c.value_column);
    get("date_column", c.date_column);
    get("aggregate", c.aggregate);
    get("date_format", c.date_format);
    get("delimiter", c.delimiter);
    get("length_policy", c.length_policy);
    get("slab", c.slab);
    get("filter", c.filter);
    get("iterations", c.iterations);
    get("burn_in", c.burn_in);
    get("thin", c.thin);
    get("seed", c.seed);
    get("refit_every", c.refit_every);
    get("store_z", c.store_z);
    get("store_theta", c.store_theta);
    get("curve", c.curve);
    get("n", c.n);
    get("mu1", c.mu1);
    get("mu2", c.mu2);
    get("tau21", c.tau21);
    get("tau22", c.tau22);
    get("level", c.level);
    get("replicates", c.replicates);
    get("threads", c.threads);
    get("output_dir", c.output_dir);
}

inline RunConfig load_config(const std::string& path) {
    std::ifstream in(path);
    if (!in) throw std::runtime_error("cannot open config file '" + path + "'");
    nlohmann::json j;
    in >> j;
    return j.get<RunConfig>();
}

namespace detail {

inline std::ofstream open_output(const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);  // LF line endings everywhere
    if (!out) throw std::runtime_error("cannot write output file '" + path.string() + "'");
    return out;
}

inline void write_metadata(const RunConfig& config, const std::filesystem::path& dir) {
    auto out = open_output(dir / "metadata.json");
    nlohmann::json j = config;
    out << j.dump(2) << "\n";
}

inline char delimiter_char(const RunConfig& config) {
    if (config.delimiter.size() != 1)
        throw std::invalid_argument("delimiter must be a single character");
    return config.delimiter[0];
}

inline Aggregation aggregation_from(const RunConfig& config) {
    if (config.aggregate == "none") return Aggregation::none;
    if (config.aggregate == "monthly_mean") return Aggregation::monthly_mean;
    throw std::invalid_argument("aggregate must be 'none' or 'monthly_mean'");
}

inline DateFormat date_format_from(const RunConfig& config) {
    if (config.date_format == "iso") return DateFormat::iso;
    if (config.date_format == "dmy") return DateFormat::dmy;
    throw std::invalid_argument("date_format must be 'iso' or 'dmy'");
}

}  // namespace detail

// Fit the model to an ingested series. Writes chains.csv, summary.txt,
// alpha_path.csv and metadata.json into output_dir.
inline void fit_command(const RunConfig& config) {
    if (config.input_path.empty()) throw std::invalid_argument("fit: --input is required");
    IngestedSeries series = ingest_series(
        config.input_path, config.value_column,
        config.date_column.empty() ? std::nullopt : std::make_optional(config.date_column),
        detail::aggregation_from(config), detail::date_format_from(config),
        detail::delimiter_char(config));

    if (!is_power_of_two(series.values.size())) {
        if (config.length_policy == "strict") {
            throw std::runtime_error(
                "series length " + std::to_string(series.values.size()) +
                " is not a power of two; rerun with --length-policy truncate to keep the most "
                "recent 2^floor(log2 n) observations");
        }
        if (config.length_policy != "truncate")
            throw std::invalid_argument("length_policy must be 'strict' or 'truncate'");
        std::size_t keep = 1;
        while (keep * 2 <= series.values.size()) keep *= 2;
        const std::size_t drop = series.values.size() - keep;
        std::cerr << "fit: truncating to the most recent " << keep << " observations (dropping "
                  << drop << " leading rows)\n";
        series.values.erase(series.values.begin(),
                            series.values.begin() + static_cast<std::ptrdiff_t>(drop));
        series.labels.erase(series.labels.begin(),
                            series.labels.begin() + static_cast<std::ptrdiff_t>(drop));
    }

    const ChainConfig chain_cfg = config.chain_config();
    const PriorSpec priors = default_priors_from_data(series.values);
    const PosteriorChains chains = run_chain(series.values, chain_cfg, priors);
    const FitSummary summary = summarize_chains(chains);

    const std::filesystem::path dir(config.output_dir);
    std::filesystem::create_directories(dir);
    const std::size_t n = series.values.size();

    {
        auto out = detail::open_output(dir / "chains.csv");
        out << "draw,iteration,mu1,tau21,mu2,tau22";
        for (std::size_t t = 1; t <= n; ++t) out << ",alpha_" << t;
        if (chain_cfg.store_z)
            for (std::size_t t = 1; t <= n; ++t) out << ",z_" << t;
        if (chain_cfg.store_theta)
            for (std::size_t t = 1; t <= n; ++t) out << ",theta_" << t;
        out << "\n";
        for (std::size_t i = 0; i < chains.retained(); ++i) {
            const std::size_t iteration =
                static_cast<std::size_t>(chain_cfg.burn_in) + (i + 1) * static_cast<std::size_t>(chain_cfg.thin);
            out << (i + 1) << ',' << iteration << ',' << format_double(chains.mu1[i]) << ','
                << format_double(chains.tau21[i]) << ',' << format_double(chains.mu2[i]) << ','
                << format_double(chains.tau22[i]);
            for (std::size_t t = 0; t < n; ++t) out << ',' << format_double(chains.alpha[i][t]);
            if (chain_cfg.store_z)
                for (std::size_t t = 0; t < n; ++t) out << ',' << chains.z[i][t];
            if (chain_cfg.store_theta)
                for (std::size_t t = 0; t < n; ++t) out << ',' << format_double(chains.theta[i][t]);
            out << "\n";
        }
    }
    {
        auto out = detail::open_output(dir / "alpha_path.csv");
        out << "t,label,alpha_hat,hpd_lower,hpd_upper,regime\n";
        for (std::size_t t = 0; t < n; ++t)
            out << (t + 1) << ',' << series.labels[t] << ',' << format_double(summary.alpha_hat[t])
                << ',' << format_double(summary.alpha_lower[t]) << ','
                << format_double(summary.alpha_upper[t]) << ',' << summary.labels[t] << "\n";
    }
    {
        auto out = detail::open_output(dir / "summary.txt");
        out << "fit summary (point estimates are chain medians; intervals are 95% HPD)\n\n";
        out << "parameter estimate hpd_lower hpd_upper\n";
        auto row = [&](const char* name, const ParamSummary& p) {
            out << name << ' ' << format_double(p.estimate) << ' ' << format_double(p.lower) << ' '
                << format_double(p.upper) << "\n";
        };
        row("mu1", summary.mu1);
        row("tau21", summary.tau21);
        row("mu2", summary.mu2);
        row("tau22", summary.tau22);
        out << "\nchange_points";
        if (summary.change_points.empty()) out << " none";
        for (std::size_t cp : summary.change_points) out << ' ' << cp;
        out << "\n\nt label alpha_hat regime\n";
        for (std::size_t t = 0; t < n; ++t)
            out << (t + 1) << ' ' << series.labels[t] << ' ' << format_double(summary.alpha_hat[t])
                << ' ' << summary.labels[t] << "\n";
    }
    detail::write_metadata(config, dir);
}

// Emit one synthetic series (y, z_true, alpha_true) for inspection or
// external fitting.
inline void simulate_command(const RunConfig& config) {
    const ScenarioConfig scenario = config.scenario_config();
    const std::vector<double> alpha = weight_curve(scenario.curve);
    RngStream rng(config.seed, 0);
    const SimulatedSeries sim =
        generate_series(rng, alpha, scenario.mu1, scenario.mu2, scenario.tau21, scenario.tau22);

    const std::filesystem::path dir(config.output_dir);
    std::filesystem::create_directories(dir);
    {
        auto out = detail::open_output(dir / "simulated.csv");
        out << "t,y,z_true,alpha_true\n";
        for (std::size_t t = 0; t < sim.y.size(); ++t)
            out << (t + 1) << ',' << format_double(sim.y[t]) << ',' << sim.z_true[t] << ','
                << format_double(alpha[t]) << "\n";
    }
    detail::write_metadata(config, dir);
}

// Monte Carlo study: per-replicate point estimates, the table-shaped
// parameter summary, and the pointwise weight-curve table.
inline void mc_command(const RunConfig& config) {
    const ScenarioConfig scenario = config.scenario_config();
    const McStudy study = run_monte_carlo(scenario);

    const std::filesystem::path dir(config.output_dir);
    std::filesystem::create_directories(dir);
    {
        auto out = detail::open_output(dir / "mc_replicates.csv");
        out << "replicate,mu1_hat,tau21_hat,mu2_hat,tau22_hat\n";
        for (std::size_t r = 0; r < study.estimates.size(); ++r) {
            out << study.replicate_ids[r];
            for (int p = 0; p < 4; ++p)
                out << ',' << format_double(study.estimates[r][static_cast<std::size_t>(p)]);
            out << "\n";
        }
    }
    {
        auto out = detail::open_output(dir / "mc_summary.txt");
        out << "monte carlo summary: curve " << config.curve << ", slab " << config.slab
            << ", n " << config.n << ", replicates " << config.replicates << "\n";
        out << "interval " << (study.interval_is_hpd ? "hpd95_across_replicates" : "minmax_across_replicates")
            << "\n\n";
        out << "parameter truth mean lower upper\n";
        const char* names[4] = {"mu1", "tau21", "mu2", "tau22"};
        const double truth[4] = {config.mu1, config.tau21, config.mu2, config.tau22};
        for (int p = 0; p < 4; ++p) {
            const ParamSummary& s = study.params[static_cast<std::size_t>(p)];
            out << names[p] << ' ' << format_double(truth[p]) << ' ' << format_double(s.estimate)
                << ' ' << format_double(s.lower) << ' ' << format_double(s.upper) << "\n";
        }
        if (!study.failures.empty()) {
            out << "\nfailed_replicates " << study.failures.size() << "\n";
            for (const std::string& f : study.failures) out << "# " << f << "\n";
        }
    }
    {
        auto out = detail::open_output(dir / "mc_alpha.csv");
        out << "t,alpha_true,alpha_mean,hpd_lower,hpd_upper\n";
        for (std::size_t t = 0; t < study.alpha_true.size(); ++t)
            out << (t + 1) << ',' << format_double(study.alpha_true[t]) << ','
                << format_double(study.alpha_mean[t]) << ',' << format_double(study.alpha_lower[t])
                << ',' << format_double(study.alpha_upper[t]) << "\n";
    }
    detail::write_metadata(config, dir);
}

inline void run_command(const RunConfig& config) {
    if (config.command == "fit") fit_command(config);
    else if (config.command == "simulate") simulate_command(config);
    else if (config.command == "mc") mc_command(config);
    else throw std::invalid_argument("unknown command '" + config.command + "'");
}

}  // namespace wavemix
