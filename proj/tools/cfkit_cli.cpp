// Command-line front end: builds aggregate-loss characteristic functions from
// files or parametric specs, inverts them, fits tails, and simulates. Exit
// codes follow the library contract: 2 bad input, 3 numeric failure, 4 I/O.

#include <cfkit/cfkit.hpp>

#include <CLI11.hpp>
#include <json.hpp>

#include <fstream>
#include <iostream>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#ifndef CFKIT_DATA_DIR
#define CFKIT_DATA_DIR "data"
#endif

namespace {

using nlohmann::json;

// "family:0.5,2" -> {family, {0.5, 2}}
cfkit::ParametricSpec parse_spec(const std::string& text) {
    auto colon = text.find(':');
    cfkit::ParametricSpec spec;
    spec.family = text.substr(0, colon);
    if (colon == std::string::npos || colon + 1 == text.size()) return spec;
    std::istringstream in(text.substr(colon + 1));
    std::string tok;
    while (std::getline(in, tok, ',')) {
        try {
            std::size_t used = 0;
            double v = std::stod(tok, &used);
            if (used != tok.size()) throw std::invalid_argument(tok);
            spec.params.push_back(v);
        } catch (const std::exception&) {
            throw cfkit::invalid_argument_error("cannot parse '" + tok + "' in spec '" +
                                                text + "' as a number");
        }
    }
    return spec;
}

// replace ':' with ',' so parse_spec's number scanner can be reused
std::string colons_to_commas(std::string s) {
    for (char& c : s)
        if (c == ':') c = ',';
    return s;
}

// "lo:hi:count"
cfkit::GridSpec parse_grid(const std::string& text) {
    auto spec = parse_spec("g:" + colons_to_commas(text));
    if (spec.params.size() != 3)
        throw cfkit::invalid_argument_error("grid spec '" + text + "' must be lo:hi:count");
    cfkit::GridSpec g;
    g.lo = spec.params[0];
    g.hi = spec.params[1];
    g.count = static_cast<int>(spec.params[2]);
    return g;
}

void apply_config_file(const std::string& path, cfkit::RunConfig& cfg) {
    std::ifstream in(path);
    if (!in) throw cfkit::io_error("cannot open config '" + path + "' for reading");
    json j;
    try {
        in >> j;
    } catch (const json::parse_error& e) {
        throw cfkit::ingestion_error("config '" + path + "': " + e.what());
    }
    auto spec_of = [](const json& node) {
        cfkit::ParametricSpec s;
        s.family = node.at("family").get<std::string>();
        if (node.contains("params")) s.params = node["params"].get<std::vector<double>>();
        return s;
    };
    if (j.contains("frequency_file")) cfg.frequency_file = j["frequency_file"].get<std::string>();
    if (j.contains("frequency_counts"))
        cfg.frequency_counts = j["frequency_counts"].get<std::vector<double>>();
    if (j.contains("frequency_model")) cfg.frequency_model = spec_of(j["frequency_model"]);
    if (j.contains("severity_file")) cfg.severity_file = j["severity_file"].get<std::string>();
    if (j.contains("severity_model")) cfg.severity_model = spec_of(j["severity_model"]);
    if (j.contains("tail_p")) cfg.tail_p = j["tail_p"].get<double>();
    if (j.contains("smoothing_sigma")) cfg.smoothing_sigma = j["smoothing_sigma"].get<double>();
    if (j.contains("probs")) cfg.probs = j["probs"].get<std::vector<double>>();
    if (j.contains("grid")) {
        cfkit::GridSpec g;
        g.lo = j["grid"].at("lo").get<double>();
        g.hi = j["grid"].at("hi").get<double>();
        g.count = j["grid"].at("count").get<int>();
        cfg.grid = g;
    }
    if (j.contains("halfline_nodes")) cfg.halfline_nodes = j["halfline_nodes"].get<int>();
    if (j.contains("inversion")) {
        const auto& inv = j["inversion"];
        if (inv.contains("quadrature_n")) cfg.inversion.quadrature_n = inv["quadrature_n"].get<long>();
        if (inv.contains("six_sigma_k")) cfg.inversion.six_sigma_k = inv["six_sigma_k"].get<double>();
        if (inv.contains("tail_epsilon")) cfg.inversion.tail_epsilon = inv["tail_epsilon"].get<double>();
        if (inv.contains("t_max")) cfg.inversion.t_max = inv["t_max"].get<double>();
        if (inv.contains("support")) {
            auto v = inv["support"].get<std::vector<double>>();
            if (v.size() != 2)
                throw cfkit::invalid_argument_error("config inversion.support needs [a, b]");
            cfg.inversion.support = std::make_pair(v[0], v[1]);
        }
    }
    if (j.contains("format")) cfg.format = j["format"].get<std::string>();
    if (j.contains("output")) cfg.output_path = j["output"].get<std::string>();
}

// CLI option holders for the compute pipeline; only values the user actually
// passed are applied on top of any config file.
struct ComputeArgs {
    std::string config;
    std::string frequency_file, freq_spec;
    std::string severity_file, sev_spec;
    std::vector<double> probs;
    std::string grid;
    double tail_p = 0.0;
    double smooth = 0.0;
    int nodes = 0;
    long quadrature_n = 0;
    double six_sigma = 0.0;
    double epsilon = 0.0;
    double t_max = 0.0;
    std::string support;
    std::string format;
    std::string output;
};

void add_source_flags(CLI::App* cmd, ComputeArgs& a) {
    cmd->add_option("--frequency-file", a.frequency_file,
                    "claim counts, one integer per line");
    cmd->add_option("--freq", a.freq_spec,
                    "parametric counts 'family:params' (poisson:10, binomial:20,0.3, "
                    "negative-binomial:2,0.4, dirac:1) or inline 'empirical:166,170,...'");
    cmd->add_option("--severity-file", a.severity_file, "claim sizes, one per line");
    cmd->add_option("--sev", a.sev_spec,
                    "parametric severity 'family:params' (exponential:1, gamma:2,1, "
                    "lognormal:0,1, loglogistic:1.5,1.7, pareto1:1.2,2, pareto2:1.2,2, "
                    "gpd:0.5,2,10)");
}

void apply_source_flags(const ComputeArgs& a, cfkit::RunConfig& cfg) {
    if (!a.frequency_file.empty()) {
        cfg.frequency_file = a.frequency_file;
        cfg.frequency_counts.reset();
        cfg.frequency_model.reset();
    }
    if (!a.freq_spec.empty()) {
        auto spec = parse_spec(a.freq_spec);
        cfg.frequency_file.reset();
        if (spec.family == "empirical") {
            cfg.frequency_counts = spec.params;
            cfg.frequency_model.reset();
        } else {
            cfg.frequency_model = spec;
            cfg.frequency_counts.reset();
        }
    }
    if (!a.severity_file.empty()) {
        cfg.severity_file = a.severity_file;
        cfg.severity_model.reset();
    }
    if (!a.sev_spec.empty()) {
        cfg.severity_model = parse_spec(a.sev_spec);
        cfg.severity_file.reset();
    }
}

void write_out(const std::optional<std::string>& path, const std::string& text) {
    if (!path) {
        std::cout << text;
        return;
    }
    std::ofstream out(*path, std::ios::binary);
    if (!out) throw cfkit::io_error("cannot open '" + *path + "' for writing");
    out << text;
    if (!out) throw cfkit::io_error("failed writing to '" + *path + "'");
    std::clog << "wrote " << text.size() << " byte(s) to '" << *path << "'\n";
}

int cmd_compute(const ComputeArgs& a, const CLI::App& cmd) {
    cfkit::RunConfig cfg;
    if (!a.config.empty()) apply_config_file(a.config, cfg);
    apply_source_flags(a, cfg);
    if (cmd.count("--prob")) cfg.probs = a.probs;
    if (cmd.count("--grid")) cfg.grid = parse_grid(a.grid);
    if (cmd.count("--gpd-tail")) cfg.tail_p = a.tail_p;
    if (cmd.count("--smooth")) cfg.smoothing_sigma = a.smooth;
    if (cmd.count("--nodes")) cfg.halfline_nodes = a.nodes;
    if (cmd.count("--quadrature-n")) cfg.inversion.quadrature_n = a.quadrature_n;
    if (cmd.count("--six-sigma")) cfg.inversion.six_sigma_k = a.six_sigma;
    if (cmd.count("--epsilon")) cfg.inversion.tail_epsilon = a.epsilon;
    if (cmd.count("--t-max")) cfg.inversion.t_max = a.t_max;
    if (cmd.count("--support")) {
        auto s = parse_spec("s:" + colons_to_commas(a.support));
        if (s.params.size() != 2)
            throw cfkit::invalid_argument_error("--support needs a:b");
        cfg.inversion.support = std::make_pair(s.params[0], s.params[1]);
    }
    if (cmd.count("--format")) cfg.format = a.format;
    if (cmd.count("--output")) cfg.output_path = a.output;

    auto out = cfkit::run_compute(cfg);
    std::ostringstream os;
    cfkit::write_report(out, cfg.format, os);
    write_out(cfg.output_path, os.str());
    return 0;
}

int cmd_fit_gpd(const std::string& file, double tail_p, const std::string& format,
                const std::optional<std::string>& output) {
    auto sample = cfkit::load_claims(file, cfkit::SampleKind::severity);
    auto fit = cfkit::fit_gpd_tail(sample, tail_p);
    std::ostringstream os;
    if (format == "json") {
        os << "{\"theta\":" << cfkit::detail::json_num(fit.theta)
           << ",\"xi\":" << cfkit::detail::json_num(fit.xi)
           << ",\"sigma\":" << cfkit::detail::json_num(fit.sigma)
           << ",\"p\":" << cfkit::detail::json_num(fit.p)
           << ",\"n_excesses\":" << fit.n_excesses
           << ",\"log_lik\":" << cfkit::detail::json_num(fit.log_lik) << "}\n";
    } else if (format == "text") {
        os << "gpd tail fit (threshold at the " << cfkit::detail::fmt_double(100.0 * tail_p)
           << " percent sample quantile)\n";
        os << "  theta     " << cfkit::detail::fmt_double(fit.theta) << "\n";
        os << "  xi        " << cfkit::detail::fmt_double(fit.xi) << "\n";
        os << "  sigma     " << cfkit::detail::fmt_double(fit.sigma) << "\n";
        os << "  excesses  " << fit.n_excesses << "\n";
        os << "  log-lik   " << cfkit::detail::fmt_double(fit.log_lik) << "\n";
    } else {
        throw cfkit::invalid_argument_error("fit-gpd supports text or json output");
    }
    write_out(output, os.str());
    return 0;
}

int cmd_moments(const ComputeArgs& a, double h) {
    cfkit::RunConfig cfg;
    if (!a.config.empty()) apply_config_file(a.config, cfg);
    apply_source_flags(a, cfg);

    cfkit::FrequencyModel freq = [&] {
        if (cfg.frequency_model)
            return cfkit::make_frequency_model(cfg.frequency_model->family,
                                               cfg.frequency_model->params);
        if (cfg.frequency_file)
            return cfkit::empirical_pgf(
                cfkit::load_claims(*cfg.frequency_file, cfkit::SampleKind::frequency));
        if (cfg.frequency_counts)
            return cfkit::empirical_pgf(
                cfkit::ClaimSample(*cfg.frequency_counts, cfkit::SampleKind::frequency));
        throw cfkit::invalid_argument_error("moments: no frequency source given");
    }();
    cfkit::CharFn sev = [&] {
        if (cfg.severity_model) {
            auto sp = cfkit::make_severity_params(cfg.severity_model->family,
                                                  cfg.severity_model->params);
            return cfkit::make_severity_cf(sp, cfg.halfline_nodes);
        }
        if (cfg.severity_file)
            return cfkit::empirical_cf(
                cfkit::load_claims(*cfg.severity_file, cfkit::SampleKind::severity));
        throw cfkit::invalid_argument_error("moments: no severity source given");
    }();

    auto agg = cfkit::compound_cf(freq, sev);
    bool hinted = agg.moment_hints().has_value();
    auto [mean, var] = cfkit::estimate_moments(agg, h);
    auto [smean, svar] = cfkit::moments_by_differentiation(agg, h);
    std::cout << "aggregate moments\n";
    std::cout << "  mean      " << cfkit::detail::fmt_double(mean)
              << (hinted ? "  (closed form)" : "  (stencil)") << "\n";
    std::cout << "  variance  " << cfkit::detail::fmt_double(var)
              << (hinted ? "  (closed form)" : "  (stencil)") << "\n";
    if (hinted) {
        std::cout << "  stencil cross-check: mean " << cfkit::detail::fmt_double(smean)
                  << ", variance " << cfkit::detail::fmt_double(svar) << " (h="
                  << cfkit::detail::fmt_double(h) << ")\n";
    }
    return 0;
}

int cmd_simulate(const ComputeArgs& a, long n_sims, std::uint64_t seed,
                 const std::optional<std::string>& output) {
    cfkit::RunConfig cfg;
    if (!a.config.empty()) apply_config_file(a.config, cfg);
    apply_source_flags(a, cfg);

    std::variant<cfkit::FrequencyModel, cfkit::ClaimSample> freq = [&]()
        -> std::variant<cfkit::FrequencyModel, cfkit::ClaimSample> {
        if (cfg.frequency_model)
            return cfkit::make_frequency_model(cfg.frequency_model->family,
                                               cfg.frequency_model->params);
        if (cfg.frequency_file)
            return cfkit::load_claims(*cfg.frequency_file, cfkit::SampleKind::frequency);
        if (cfg.frequency_counts)
            return cfkit::ClaimSample(*cfg.frequency_counts, cfkit::SampleKind::frequency);
        throw cfkit::invalid_argument_error("simulate: no frequency source given");
    }();
    std::variant<cfkit::SeverityParams, cfkit::ClaimSample> sev = [&]()
        -> std::variant<cfkit::SeverityParams, cfkit::ClaimSample> {
        if (cfg.severity_model)
            return cfkit::make_severity_params(cfg.severity_model->family,
                                               cfg.severity_model->params);
        if (cfg.severity_file)
            return cfkit::load_claims(*cfg.severity_file, cfkit::SampleKind::severity);
        throw cfkit::invalid_argument_error("simulate: no severity source given");
    }();

    cfkit::SimulationSpec spec(std::move(freq), std::move(sev));
    spec.n_sims = n_sims;
    spec.seed = seed;
    auto draws = cfkit::simulate_aggregate(spec);
    std::ostringstream os;
    for (double d : draws) os << cfkit::detail::fmt_double(d) << "\n";
    write_out(output, os.str());
    auto s = cfkit::summarize(draws);
    std::clog << "simulated " << s.n << " aggregate(s): mean "
              << cfkit::detail::fmt_double(s.mean) << ", sd "
              << cfkit::detail::fmt_double(s.sd) << "\n";
    return 0;
}

int cmd_demo_danish(const std::string& data_dir) {
    using namespace cfkit;
    auto losses = load_claims(data_dir + "/danish_fire_losses.txt", SampleKind::severity);
    auto counts = load_claims(data_dir + "/danish_claim_counts.txt", SampleKind::frequency);

    auto s = summarize(losses.values());
    std::cout << "danish fire losses 1980-1990, in millions of DKK (1985 value)\n";
    std::cout << "  losses " << s.n << ", mean " << detail::fmt_double(s.mean) << ", sd "
              << detail::fmt_double(s.sd) << ", skewness " << detail::fmt_double(s.skewness)
              << ", kurtosis " << detail::fmt_double(s.kurtosis) << "\n\n";

    auto fit = fit_gpd_tail(losses, 0.95);
    std::cout << "tail above the 95% sample quantile\n";
    std::cout << "  theta " << detail::fmt_double(fit.theta) << ", xi "
              << detail::fmt_double(fit.xi) << ", sigma " << detail::fmt_double(fit.sigma)
              << ", " << fit.n_excesses << " excesses\n\n";

    const std::vector<double> probs{0.9, 0.99, 0.999};

    auto nonpar = compound_cf(empirical_pgf(counts), empirical_cf(losses));
    auto q1 = quantiles(nonpar, probs);
    std::cout << "annual aggregate quantiles, empirical frequency and severity\n";
    for (std::size_t i = 0; i < probs.size(); ++i)
        std::cout << "  VaR(" << detail::fmt_double(probs[i]) << ") = "
                  << detail::fmt_double(q1[i]) << "\n";
    std::cout << "\n";

    auto spliced = compound_cf(empirical_pgf(counts), tail_mixture_cf(losses, 0.95, fit));
    InversionOptions opts;
    opts.six_sigma_k = 15.0;
    opts.quadrature_n = 1 << 16;
    auto q2 = quantiles(spliced, probs, opts);
    std::cout << "annual aggregate quantiles, empirical body with fitted gpd tail\n";
    for (std::size_t i = 0; i < probs.size(); ++i)
        std::cout << "  VaR(" << detail::fmt_double(probs[i]) << ") = "
                  << detail::fmt_double(q2[i]) << "\n";
    return 0;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"aggregate-loss distributions from characteristic functions"};
    app.require_subcommand(1);

    ComputeArgs ca;
    auto* compute = app.add_subcommand(
        "compute", "invert an aggregate-loss CF into pdf, cdf and quantiles");
    compute->add_option("--config", ca.config, "JSON config file; flags override it");
    add_source_flags(compute, ca);
    compute->add_option("--prob", ca.probs, "quantile probability (repeatable)");
    compute->add_option("--grid", ca.grid, "loss grid lo:hi:count");
    compute->add_option("--gpd-tail", ca.tail_p,
                        "fit a GPD above this body fraction of the severity file");
    compute->add_option("--smooth", ca.smooth, "gaussian smoothing width");
    compute->add_option("--nodes", ca.nodes, "quadrature nodes for numeric severity CFs");
    compute->add_option("--quadrature-n", ca.quadrature_n, "starting frequency-grid size");
    compute->add_option("--six-sigma", ca.six_sigma, "support half-width in standard deviations");
    compute->add_option("--epsilon", ca.epsilon, "tail threshold on |cf(T)|/T");
    compute->add_option("--t-max", ca.t_max, "fixed integration cutoff (overrides the tail rule)");
    compute->add_option("--support", ca.support, "explicit support a:b");
    compute->add_option("--format", ca.format, "text, json or csv");
    compute->add_option("--output", ca.output, "write the report here instead of stdout");

    std::string gpd_file, gpd_format = "text", gpd_output;
    double gpd_p = 0.95;
    auto* fitgpd = app.add_subcommand("fit-gpd", "peaks-over-threshold tail fit");
    fitgpd->add_option("--severity-file", gpd_file, "claim sizes, one per line")->required();
    fitgpd->add_option("--tail-p", gpd_p, "threshold at this sample quantile (default 0.95)");
    fitgpd->add_option("--format", gpd_format, "text or json");
    fitgpd->add_option("--output", gpd_output, "write the fit here instead of stdout");

    ComputeArgs ma;
    double moments_h = 1e-4;
    auto* moments = app.add_subcommand("moments", "aggregate mean and variance from the CF");
    moments->add_option("--config", ma.config, "JSON config file; flags override it");
    add_source_flags(moments, ma);
    moments->add_option("--step", moments_h, "stencil step for moment differentiation");

    ComputeArgs sa;
    long n_sims = 10000;
    std::uint64_t seed = 0;
    std::string sim_output;
    auto* simulate = app.add_subcommand("simulate", "draw aggregate losses by resampling");
    simulate->add_option("--config", sa.config, "JSON config file; flags override it");
    add_source_flags(simulate, sa);
    simulate->add_option("--n-sims", n_sims, "number of aggregate draws");
    simulate->add_option("--seed", seed, "RNG seed; same seed, same draws");
    simulate->add_option("--output", sim_output, "write draws here instead of stdout");

    std::string data_dir = CFKIT_DATA_DIR;
    auto* demo = app.add_subcommand("demo-danish",
                                    "reproduce the bundled Danish fire-loss analyses");
    demo->add_option("--data-dir", data_dir, "directory holding the bundled datasets");

    try {
        app.parse(argc, argv);
    } catch (const CLI::CallForHelp& e) {
        return app.exit(e);
    } catch (const CLI::CallForAllHelp& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        app.exit(e);
        return 2;
    }

    try {
        if (compute->parsed()) return cmd_compute(ca, *compute);
        if (fitgpd->parsed())
            return cmd_fit_gpd(gpd_file, gpd_p, gpd_format,
                               gpd_output.empty()
                                   ? std::nullopt
                                   : std::optional<std::string>(gpd_output));
        if (moments->parsed()) return cmd_moments(ma, moments_h);
        if (simulate->parsed())
            return cmd_simulate(sa, n_sims, seed,
                                sim_output.empty()
                                    ? std::nullopt
                                    : std::optional<std::string>(sim_output));
        if (demo->parsed()) return cmd_demo_danish(data_dir);
    } catch (const cfkit::error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return e.exit_code();
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 1;
    }
    return 0;
}
