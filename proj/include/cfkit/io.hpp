#pragma once

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iostream>
#include <optional>
#include <ostream>
#include <string>
#include <system_error>
#include <vector>

#include "compose.hpp"
#include "empirical.hpp"
#include "errors.hpp"
#include "frequency.hpp"
#include "gpd.hpp"
#include "invert.hpp"
#include "severity.hpp"
#include "stats.hpp"

namespace cfkit {

namespace detail {

// shortest decimal form that parses back to the same double
inline std::string fmt_double(double v) {
    char buf[48];
    auto res = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, res.ptr);
}

inline std::string json_num(double v) {
    if (!std::isfinite(v)) return "null";
    return fmt_double(v);
}

inline std::string json_escape(const std::string& s) {
    std::string out;
    out.reserve(s.size() + 2);
    for (char c : s) {
        switch (c) {
        case '"': out += "\\\""; break;
        case '\\': out += "\\\\"; break;
        case '\n': out += "\\n"; break;
        case '\r': out += "\\r"; break;
        case '\t': out += "\\t"; break;
        default:
            if (static_cast<unsigned char>(c) < 0x20) {
                char buf[8];
                std::snprintf(buf, sizeof buf, "\\u%04x", c);
                out += buf;
            } else {
                out += c;
            }
        }
    }
    return out;
}

inline void json_array(std::ostream& os, const std::vector<double>& xs) {
    os << '[';
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) os << ',';
        os << json_num(xs[i]);
    }
    os << ']';
}

} // namespace detail

// One numeric value per line; an optional single header line is detected by
// failing to parse the first non-blank line. CRLF endings and surrounding
// whitespace are tolerated. Errors carry the offending line number.
inline ClaimSample load_claims(const std::string& path, SampleKind kind) {
    std::ifstream in(path);
    if (!in) throw io_error("cannot open '" + path + "' for reading");
    std::vector<double> vals;
    std::string line;
    long line_no = 0;
    bool saw_content = false;
    while (std::getline(in, line)) {
        ++line_no;
        if (!line.empty() && line.back() == '\r') line.pop_back();
        auto b = line.find_first_not_of(" \t");
        if (b == std::string::npos) continue;
        auto e = line.find_last_not_of(" \t");
        std::string tok = line.substr(b, e - b + 1);
        double v = 0.0;
        auto [ptr, ec] = std::from_chars(tok.data(), tok.data() + tok.size(), v);
        if (ec != std::errc{} || ptr != tok.data() + tok.size()) {
            if (!saw_content) {
                saw_content = true; // header line
                continue;
            }
            throw ingestion_error(path + ":" + std::to_string(line_no) +
                                  ": cannot parse '" + tok + "' as a number");
        }
        saw_content = true;
        vals.push_back(v);
    }
    if (vals.empty()) throw ingestion_error(path + ": no numeric data found");
    try {
        ClaimSample sample(vals, kind);
        SummaryStats s = summarize(sample.values());
        std::clog << "loaded " << s.n << " value(s) from '" << path
                  << "' (mean=" << detail::fmt_double(s.mean)
                  << ", sd=" << detail::fmt_double(s.sd) << ")\n";
        return sample;
    } catch (const validation_error& err) {
        throw ingestion_error(path + ": " + err.what());
    }
}

struct ParametricSpec {
    std::string family;
    std::vector<double> params;
};

struct GridSpec {
    double lo = 0.0;
    double hi = 0.0;
    int count = 0;
};

struct RunConfig {
    // exactly one frequency source
    std::optional<std::string> frequency_file;
    std::optional<std::vector<double>> frequency_counts;
    std::optional<ParametricSpec> frequency_model;
    // exactly one severity source
    std::optional<std::string> severity_file;
    std::optional<ParametricSpec> severity_model;

    std::optional<double> tail_p;          // splice a fitted GPD above this body fraction
    std::optional<double> smoothing_sigma; // Gaussian kernel width
    std::vector<double> probs;
    std::optional<GridSpec> grid;
    int halfline_nodes = 1 << 7;
    InversionOptions inversion;
    std::string format = "text"; // text | json | csv
    std::optional<std::string> output_path;
};

struct ComputeOutcome {
    DistributionResult result;
    std::optional<GpdFit> gpd;
    std::string frequency_desc;
    std::string severity_desc;
};

namespace detail {

inline std::string describe_spec(const ParametricSpec& ps) {
    std::string s = ps.family + "(";
    for (std::size_t i = 0; i < ps.params.size(); ++i) {
        if (i) s += ", ";
        s += fmt_double(ps.params[i]);
    }
    return s + ")";
}

} // namespace detail

// Builds the aggregate-loss CF described by the config, inverts it, and
// returns the distribution plus any fitted tail. The inversion always runs
// with the nonnegative-support treatment: every pipeline here compounds
// claim counts with nonnegative severities.
inline ComputeOutcome run_compute(const RunConfig& cfg) {
    int nfreq = int(cfg.frequency_file.has_value()) + int(cfg.frequency_counts.has_value()) +
                int(cfg.frequency_model.has_value());
    if (nfreq != 1)
        throw invalid_argument_error("config: exactly one frequency source required "
                                     "(file, inline counts, or parametric family)");
    int nsev = int(cfg.severity_file.has_value()) + int(cfg.severity_model.has_value());
    if (nsev != 1)
        throw invalid_argument_error("config: exactly one severity source required "
                                     "(file or parametric family)");
    if (cfg.tail_p && !cfg.severity_file)
        throw invalid_argument_error("config: a GPD tail fit needs a severity sample file");
    if (cfg.grid && cfg.grid->count < 2)
        throw invalid_argument_error("config: loss grid needs at least 2 points");

    ComputeOutcome out;

    FrequencyModel freq = [&] {
        if (cfg.frequency_model) {
            out.frequency_desc = detail::describe_spec(*cfg.frequency_model);
            return make_frequency_model(cfg.frequency_model->family, cfg.frequency_model->params);
        }
        ClaimSample counts = cfg.frequency_file
                                 ? load_claims(*cfg.frequency_file, SampleKind::frequency)
                                 : ClaimSample(*cfg.frequency_counts, SampleKind::frequency);
        out.frequency_desc = "empirical counts (n=" + std::to_string(counts.size()) + ")";
        return empirical_pgf(counts);
    }();

    CharFn sev = [&] {
        if (cfg.severity_model) {
            out.severity_desc = detail::describe_spec(*cfg.severity_model);
            SeverityParams sp = make_severity_params(cfg.severity_model->family,
                                                     cfg.severity_model->params);
            return make_severity_cf(sp, cfg.halfline_nodes);
        }
        ClaimSample sample = load_claims(*cfg.severity_file, SampleKind::severity);
        if (cfg.tail_p) {
            GpdFit fit = fit_gpd_tail(sample, *cfg.tail_p);
            out.gpd = fit;
            out.severity_desc = "empirical body + gpd tail (p=" + detail::fmt_double(fit.p) +
                                ", theta=" + detail::fmt_double(fit.theta) +
                                ", xi=" + detail::fmt_double(fit.xi) +
                                ", sigma=" + detail::fmt_double(fit.sigma) + ")";
            return tail_mixture_cf(sample, *cfg.tail_p, fit, cfg.halfline_nodes);
        }
        out.severity_desc = "empirical severities (n=" + std::to_string(sample.size()) + ")";
        return empirical_cf(sample);
    }();

    CharFn agg = compound_cf(freq, sev);
    if (cfg.smoothing_sigma) agg = smooth_cf(agg, *cfg.smoothing_sigma);

    InversionOptions opts = cfg.inversion;
    opts.is_compound = true;

    std::vector<double> xs;
    if (cfg.grid) {
        xs.resize(static_cast<std::size_t>(cfg.grid->count));
        double step = (cfg.grid->hi - cfg.grid->lo) / (cfg.grid->count - 1);
        for (int i = 0; i < cfg.grid->count; ++i)
            xs[static_cast<std::size_t>(i)] = cfg.grid->lo + step * i;
    }

    out.result = invert_distribution(agg, xs, cfg.probs, opts);
    return out;
}

namespace detail {

inline void report_text(const ComputeOutcome& out, std::ostream& os) {
    const auto& r = out.result;
    const auto& d = r.diagnostics;
    char buf[128];
    os << "aggregate loss report\n";
    os << "=====================\n";
    if (!out.frequency_desc.empty()) os << "frequency : " << out.frequency_desc << "\n";
    if (!out.severity_desc.empty()) os << "severity  : " << out.severity_desc << "\n";
    os << "\nmoments\n";
    os << "  mean      " << fmt_double(r.mean_estimate) << "\n";
    os << "  variance  " << fmt_double(r.var_estimate) << "\n";
    if (out.gpd) {
        const auto& g = *out.gpd;
        os << "\ngpd tail fit\n";
        os << "  body fraction " << fmt_double(g.p) << "\n";
        os << "  threshold     " << fmt_double(g.theta) << "\n";
        os << "  xi            " << fmt_double(g.xi) << "\n";
        os << "  sigma         " << fmt_double(g.sigma) << "\n";
        os << "  excesses      " << g.n_excesses << "\n";
        os << "  log-lik       " << fmt_double(g.log_lik) << "\n";
    }
    os << "\ninversion grid\n";
    os << "  support   [" << fmt_double(d.a) << ", " << fmt_double(d.b) << "]\n";
    os << "  delta     " << fmt_double(d.delta) << "\n";
    os << "  nodes     " << d.n << (d.n_capped ? " (capped)" : "") << "\n";
    os << "  t_max     " << fmt_double(d.t_max) << "  tail |cf|/T "
       << fmt_double(d.tail_magnitude) << "\n";
    os << "  cf evals  " << d.cf_evaluations << "\n";
    if (d.atom_split)
        os << "  atom      Pr(L=0) = " << fmt_double(d.prob_zero) << "\n";
    os << "  clamped cdf values      " << d.cdf_clamp_count << "\n";
    os << "  monotonicity violation  " << fmt_double(d.max_monotonicity_violation) << "\n";
    os << "  negative pdf values     " << d.pdf_negative_count << "\n";
    if (!r.probs.empty()) {
        os << "\nvalue-at-risk\n";
        os << "  prob          quantile\n";
        for (std::size_t i = 0; i < r.probs.size(); ++i) {
            std::snprintf(buf, sizeof buf, "  %-12.8g  %.10g\n", r.probs[i], r.quantiles[i]);
            os << buf;
        }
    }
    if (!r.x_grid.empty()) {
        os << "\ndistribution (" << r.x_grid.size() << " points)\n";
        os << "  x               pdf             cdf\n";
        for (std::size_t i = 0; i < r.x_grid.size(); ++i) {
            std::snprintf(buf, sizeof buf, "  %-14.8g  %-14.8g  %.10g\n", r.x_grid[i],
                          r.pdf[i], r.cdf[i]);
            os << buf;
        }
    }
}

inline void report_json(const ComputeOutcome& out, std::ostream& os) {
    const auto& r = out.result;
    const auto& d = r.diagnostics;
    os << "{";
    os << "\"frequency\":\"" << json_escape(out.frequency_desc) << "\",";
    os << "\"severity\":\"" << json_escape(out.severity_desc) << "\",";
    if (out.gpd) {
        const auto& g = *out.gpd;
        os << "\"gpd_fit\":{\"theta\":" << json_num(g.theta) << ",\"xi\":" << json_num(g.xi)
           << ",\"sigma\":" << json_num(g.sigma) << ",\"p\":" << json_num(g.p)
           << ",\"n_excesses\":" << g.n_excesses << ",\"log_lik\":" << json_num(g.log_lik)
           << "},";
    }
    os << "\"moments\":{\"mean\":" << json_num(r.mean_estimate)
       << ",\"variance\":" << json_num(r.var_estimate) << "},";
    os << "\"grid\":{\"a\":" << json_num(d.a) << ",\"b\":" << json_num(d.b)
       << ",\"delta\":" << json_num(d.delta) << ",\"n\":" << d.n
       << ",\"t_max\":" << json_num(d.t_max) << ",\"capped\":" << (d.n_capped ? "true" : "false")
       << ",\"tail_magnitude\":" << json_num(d.tail_magnitude) << "},";
    os << "\"diagnostics\":{\"cf_evaluations\":" << d.cf_evaluations
       << ",\"cdf_clamp_count\":" << d.cdf_clamp_count
       << ",\"max_monotonicity_violation\":" << json_num(d.max_monotonicity_violation)
       << ",\"pdf_negative_count\":" << d.pdf_negative_count << ",\"atom_split\":"
       << (d.atom_split ? "true" : "false") << ",\"prob_zero\":" << json_num(d.prob_zero)
       << ",\"newton_iterations\":[";
    for (std::size_t i = 0; i < d.newton_iterations.size(); ++i) {
        if (i) os << ',';
        os << d.newton_iterations[i];
    }
    os << "]},";
    os << "\"x\":";
    json_array(os, r.x_grid);
    os << ",\"pdf\":";
    json_array(os, r.pdf);
    os << ",\"cdf\":";
    json_array(os, r.cdf);
    os << ",\"probs\":";
    json_array(os, r.probs);
    os << ",\"quantiles\":";
    json_array(os, r.quantiles);
    os << "}\n";
}

inline void report_csv(const ComputeOutcome& out, std::ostream& os) {
    const auto& r = out.result;
    os << "x,pdf,cdf\n";
    for (std::size_t i = 0; i < r.x_grid.size(); ++i)
        os << fmt_double(r.x_grid[i]) << ',' << fmt_double(r.pdf[i]) << ','
           << fmt_double(r.cdf[i]) << '\n';
}

} // namespace detail

inline void write_report(const ComputeOutcome& out, const std::string& format,
                         std::ostream& os) {
    if (format == "text")
        detail::report_text(out, os);
    else if (format == "json")
        detail::report_json(out, os);
    else if (format == "csv")
        detail::report_csv(out, os);
    else
        throw invalid_argument_error("unknown report format '" + format +
                                     "' (expected text, json, or csv)");
}

inline void write_report(const DistributionResult& result, const std::string& format,
                         std::ostream& os) {
    ComputeOutcome out;
    out.result = result;
    write_report(out, format, os);
}

} // namespace cfkit
