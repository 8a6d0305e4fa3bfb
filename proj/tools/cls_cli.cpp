// Command-line front end: estimate on CSV data, Monte Carlo simulation, and
// bootstrap inference. Exit codes: 0 success, 2 input/validation error,
// 3 numerical failure, 4 bootstrap failure beyond threshold.
#include <algorithm>
#include <cstdint>
#include <fstream>
#include <iostream>
#include <sstream>
#include <string>
#include <vector>

#include "CLI11.hpp"
#include "json.hpp"

#include "clsiv/bootstrap.hpp"
#include "clsiv/csv_io.hpp"
#include "clsiv/simulation.hpp"
#include "clsiv/version.hpp"

namespace {

using clsiv::Dataset;
using clsiv::Index;
using clsiv::Matrix;
using clsiv::Vector;
using ordered_json = nlohmann::ordered_json;

std::vector<std::string> split_list(const std::string& csv) {
    std::vector<std::string> out;
    std::stringstream ss(csv);
    std::string item;
    while (std::getline(ss, item, ',')) {
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

std::string sanitize_cell(std::string s) {
    std::replace(s.begin(), s.end(), ',', ';');
    return s;
}

// Linearly interpolated empirical quantile of an unsorted sample.
double quantile(std::vector<double> values, double p) {
    std::sort(values.begin(), values.end());
    if (values.empty()) return std::numeric_limits<double>::quiet_NaN();
    const double pos = p * static_cast<double>(values.size() - 1);
    const std::size_t lo = static_cast<std::size_t>(pos);
    if (lo + 1 >= values.size()) return values.back();
    const double frac = pos - static_cast<double>(lo);
    return values[lo] * (1.0 - frac) + values[lo + 1] * frac;
}

void write_output(const std::string& path, const std::string& content) {
    if (path.empty()) {
        std::cout << content;
        return;
    }
    std::ofstream out(path, std::ios::binary);
    if (!out) throw clsiv::validation_error("cannot write output file '" + path + "'");
    out << content;
}

struct ColumnFlags {
    std::string response;
    std::string endogenous;
    std::string exogenous;
    std::string instruments;
    bool intercept = false;

    clsiv::ColumnSpec spec() const {
        clsiv::ColumnSpec s;
        s.response = response;
        s.endogenous = split_list(endogenous);
        s.exogenous = split_list(exogenous);
        s.instruments = split_list(instruments);
        s.intercept = intercept;
        return s;
    }
};

void add_column_flags(CLI::App* cmd, ColumnFlags* flags, std::string* input) {
    cmd->add_option("--input", *input, "CSV file with a header row")->required();
    cmd->add_option("--response", flags->response, "response column name")->required();
    cmd->add_option("--endogenous", flags->endogenous, "comma-separated endogenous columns")
        ->required();
    cmd->add_option("--exogenous", flags->exogenous, "comma-separated exogenous columns");
    cmd->add_option("--instruments", flags->instruments, "comma-separated instrument columns")
        ->required();
    cmd->add_flag("--intercept", flags->intercept, "append a constant exogenous column");
}

std::vector<std::string> term_names(const clsiv::ColumnSpec& spec) {
    std::vector<std::string> names = spec.endogenous;
    names.insert(names.end(), spec.exogenous.begin(), spec.exogenous.end());
    if (spec.intercept) names.emplace_back("(intercept)");
    return names;
}

ordered_json column_spec_json(const clsiv::ColumnSpec& spec) {
    return ordered_json{{"response", spec.response},
                        {"endogenous", spec.endogenous},
                        {"exogenous", spec.exogenous},
                        {"instruments", spec.instruments},
                        {"intercept", spec.intercept}};
}

std::string column_spec_echo(const clsiv::ColumnSpec& spec) {
    auto join = [](const std::vector<std::string>& v) {
        std::string out;
        for (std::size_t i = 0; i < v.size(); ++i) {
            if (i) out += "+";
            out += v[i];
        }
        return out;
    };
    return "y=" + spec.response + ";x1=" + join(spec.endogenous) + ";x2=" + join(spec.exogenous) +
           ";z1=" + join(spec.instruments) + ";intercept=" + (spec.intercept ? "1" : "0");
}

// ---------------------------------------------------------------------------
// estimate

struct EstimateRecord {
    std::string estimator;
    Vector beta;
    Vector se;
    bool has_pi = false;
    double pi = 0.0;
    bool degenerate = false;
    std::vector<std::string> warnings;
};

int cmd_estimate(const std::string& input, const ColumnFlags& columns,
                 const std::string& estimators, int bootstrap_reps, std::uint64_t seed,
                 int threads, const std::string& output, const std::string& format) {
    const clsiv::ColumnSpec spec = columns.spec();
    const Dataset d = clsiv::assemble(clsiv::load_csv(input, spec));
    const auto names = term_names(spec);

    std::vector<EstimateRecord> records;
    for (const auto& name : split_list(estimators)) {
        const clsiv::Method method = clsiv::method_from_string(name);
        EstimateRecord rec;
        rec.estimator = name;
        // Fixed per-method stream indices keep reruns byte-identical
        // regardless of the order estimators are requested in.
        const auto ordinal = static_cast<std::uint64_t>(method);
        clsiv::BootstrapPlan se_plan{bootstrap_reps, clsiv::substream(seed, 2 * ordinal)};
        clsiv::BootstrapPlan pi_plan{bootstrap_reps, clsiv::substream(seed, 2 * ordinal + 1)};

        switch (method) {
            case clsiv::Method::Ols: {
                const clsiv::FitResult r = clsiv::fit_ols(d);
                rec.beta = r.beta;
                rec.se = r.cov_beta.diagonal().cwiseMax(0.0).cwiseSqrt();
                break;
            }
            case clsiv::Method::Tsls: {
                const clsiv::FitResult r = clsiv::fit_tsls(d);
                rec.beta = r.beta;
                rec.se = r.cov_beta.diagonal().cwiseMax(0.0).cwiseSqrt();
                if (auto w = clsiv::moment_caveat(d); !w.empty()) rec.warnings.push_back(w);
                break;
            }
            case clsiv::Method::Jive: {
                const clsiv::FitResult r = clsiv::fit_jive(d);
                rec.beta = r.beta;
                const clsiv::BootstrapMoments m = clsiv::bootstrap_moments(
                    d, se_plan, [](const Dataset& db) { return clsiv::fit_jive(db).beta; },
                    threads);
                rec.se = m.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
                break;
            }
            case clsiv::Method::ClsTsls:
            case clsiv::Method::ClsJive: {
                const clsiv::Unbiased u = method == clsiv::Method::ClsTsls
                                              ? clsiv::Unbiased::Tsls
                                              : clsiv::Unbiased::Jive;
                const clsiv::ClsResult r =
                    u == clsiv::Unbiased::Tsls ? clsiv::fit_cls(d)
                                               : clsiv::fit_cls(d, u, &pi_plan);
                rec.beta = r.beta_cls;
                rec.has_pi = true;
                rec.pi = r.pi_hat;
                rec.degenerate = r.degenerate;
                rec.warnings = r.warnings;
                const clsiv::BootstrapMoments m =
                    clsiv::bootstrap_variance_cls(d, se_plan, u, threads);
                rec.se = m.cov.diagonal().cwiseMax(0.0).cwiseSqrt();
                break;
            }
        }
        records.push_back(std::move(rec));
    }

    std::string content;
    if (format == "json") {
        ordered_json j;
        j["artifact_version"] = clsiv::kVersion;
        j["command"] = "estimate";
        j["seed"] = seed;
        j["bootstrap_reps"] = bootstrap_reps;
        j["input"] = input;
        j["column_spec"] = column_spec_json(spec);
        j["n"] = d.n();
        j["k"] = d.k();
        j["l"] = d.l();
        ordered_json results = ordered_json::array();
        for (const auto& rec : records) {
            ordered_json r;
            r["estimator"] = rec.estimator;
            ordered_json terms = ordered_json::array();
            for (Index i = 0; i < rec.beta.size(); ++i) {
                terms.push_back(ordered_json{{"term", names[static_cast<std::size_t>(i)]},
                                             {"estimate", rec.beta(i)},
                                             {"std_error", rec.se(i)}});
            }
            r["terms"] = terms;
            if (rec.has_pi) {
                r["pi"] = rec.pi;
                r["degenerate"] = rec.degenerate;
            }
            r["warnings"] = rec.warnings;
            results.push_back(std::move(r));
        }
        j["results"] = results;
        content = j.dump(2) + "\n";
    } else {
        std::ostringstream os;
        os << "# clsiv " << clsiv::kVersion << " estimate seed=" << seed
           << " bootstrap_reps=" << bootstrap_reps << " input=" << sanitize_cell(input)
           << " columns=" << sanitize_cell(column_spec_echo(spec)) << "\n";
        os << "estimator,term,estimate,std_error,pi,n,k,l,seed,bootstrap_reps,warnings\n";
        for (const auto& rec : records) {
            std::string warn;
            for (std::size_t i = 0; i < rec.warnings.size(); ++i) {
                if (i) warn += "; ";
                warn += rec.warnings[i];
            }
            for (Index i = 0; i < rec.beta.size(); ++i) {
                os << rec.estimator << "," << names[static_cast<std::size_t>(i)] << ","
                   << clsiv::format_double(rec.beta(i)) << "," << clsiv::format_double(rec.se(i))
                   << "," << (rec.has_pi ? clsiv::format_double(rec.pi) : std::string())
                   << "," << d.n() << "," << d.k() << "," << d.l() << "," << seed << ","
                   << bootstrap_reps << "," << sanitize_cell(warn) << "\n";
            }
        }
        content = os.str();
    }
    write_output(output, content);
    return 0;
}

// ---------------------------------------------------------------------------
// simulate

int cmd_simulate(const std::string& model_name, const std::vector<double>& alphas,
                 const std::vector<double>& gammas, const std::vector<Index>& sizes,
                 Index instruments, double beta, int iterations, const std::string& estimators,
                 int bootstrap_reps, std::uint64_t seed, int threads,
                 const std::string& dump_data, const std::string& output,
                 const std::string& format) {
    if (model_name != "I" && model_name != "II") {
        throw clsiv::validation_error("--model must be I or II");
    }
    const clsiv::Model model = model_name == "I" ? clsiv::Model::I : clsiv::Model::II;

    std::vector<clsiv::MethodSpec> methods;
    for (const auto& name : split_list(estimators)) {
        methods.push_back({clsiv::method_from_string(name), bootstrap_reps});
    }

    std::vector<clsiv::ScenarioSpec> grid;
    for (double a : alphas) {
        for (double g : gammas) {
            for (Index n : sizes) {
                clsiv::ScenarioSpec spec;
                spec.model = model;
                spec.alpha = a;
                spec.gamma = g;
                spec.n = n;
                spec.l = instruments;
                spec.beta_true = beta;
                spec.iterations = iterations;
                spec.seed = seed;
                spec.validate();
                grid.push_back(spec);
            }
        }
    }
    if (grid.empty()) throw clsiv::validation_error("empty scenario grid");

    if (!dump_data.empty()) {
        // Write the first scenario's first drawn dataset and stop.
        const clsiv::ScenarioSpec& spec = grid.front();
        clsiv::RngStream stream(clsiv::substream(spec.seed, 0));
        const Dataset d = clsiv::draw(spec, stream);
        clsiv::PartitionedDataset p;
        p.y = d.y;
        p.X1 = d.X;
        p.X2 = Matrix(d.n(), 0);
        p.Z1 = d.Z;
        clsiv::ColumnSpec cols;
        cols.response = "y";
        cols.endogenous = {"x1"};
        for (Index j = 0; j < d.l(); ++j) cols.instruments.push_back("z" + std::to_string(j + 1));
        clsiv::write_dataset_csv(dump_data, p, cols);
        std::cerr << "wrote " << d.n() << "-row dataset to " << dump_data << "\n";
        return 0;
    }

    std::vector<std::vector<clsiv::McSummary>> all;
    all.reserve(grid.size());
    for (const auto& spec : grid) all.push_back(clsiv::run_monte_carlo(spec, methods, threads));

    std::string content;
    if (format == "json") {
        ordered_json j;
        j["artifact_version"] = clsiv::kVersion;
        j["command"] = "simulate";
        j["seed"] = seed;
        j["bootstrap_reps"] = bootstrap_reps;
        j["iterations"] = iterations;
        ordered_json rows = ordered_json::array();
        for (std::size_t g = 0; g < grid.size(); ++g) {
            const auto& spec = grid[g];
            for (const auto& s : all[g]) {
                auto row = [&](const char* stat, double value) {
                    rows.push_back(ordered_json{{"model", model_name},
                                                {"alpha", spec.alpha},
                                                {"gamma", spec.gamma},
                                                {"n", spec.n},
                                                {"l", model == clsiv::Model::II ? spec.l : 1},
                                                {"T", spec.iterations},
                                                {"seed", spec.seed},
                                                {"estimator", clsiv::to_string(s.method)},
                                                {"statistic", stat},
                                                {"value", value}});
                };
                row("bias", s.bias.size() == 1 ? s.bias(0) : s.bias_norm());
                row("sd", s.sd());
                row("rmse", s.rmse());
            }
        }
        j["rows"] = rows;
        content = j.dump(2) + "\n";
    } else {
        std::ostringstream os;
        os << "# clsiv " << clsiv::kVersion << " simulate seed=" << seed
           << " bootstrap_reps=" << bootstrap_reps << "\n";
        for (std::size_t g = 0; g < grid.size(); ++g) {
            clsiv::write_mc_csv(os, grid[g], all[g], g == 0);
        }
        content = os.str();
    }
    write_output(output, content);

    // Human summary goes wherever the machine output does not.
    std::ostream& human = output.empty() ? std::cerr : std::cout;
    human << "model alpha gamma     n  estimator      rmse    failures\n";
    for (std::size_t g = 0; g < grid.size(); ++g) {
        for (const auto& s : all[g]) {
            char line[128];
            std::snprintf(line, sizeof(line), "%5s %5.3g %5.3g %5lld  %-9s %9.5f %7d\n",
                          model_name.c_str(), grid[g].alpha, grid[g].gamma,
                          static_cast<long long>(grid[g].n), clsiv::to_string(s.method),
                          s.rmse(), s.failures);
            human << line;
        }
    }
    return 0;
}

// ---------------------------------------------------------------------------
// bootstrap

int cmd_bootstrap(const std::string& input, const ColumnFlags& columns,
                  const std::string& estimator, int bootstrap_reps, std::uint64_t seed,
                  int threads, const std::string& output, const std::string& format) {
    const clsiv::ColumnSpec spec = columns.spec();
    const Dataset d = clsiv::assemble(clsiv::load_csv(input, spec));
    const auto names = term_names(spec);

    clsiv::Unbiased unbiased;
    if (estimator == "cls-tsls") {
        unbiased = clsiv::Unbiased::Tsls;
    } else if (estimator == "cls-jive") {
        unbiased = clsiv::Unbiased::Jive;
    } else {
        throw clsiv::validation_error("--estimator must be cls-tsls or cls-jive");
    }

    const clsiv::BootstrapPlan plan{bootstrap_reps, seed};
    const clsiv::BootstrapMoments m = clsiv::bootstrap_variance_cls(d, plan, unbiased, threads);

    std::vector<double> pis(m.pi_values.data(), m.pi_values.data() + m.pi_values.size());
    const ordered_json pi_summary{{"mean", m.pi_values.mean()},
                                  {"min", m.pi_values.minCoeff()},
                                  {"p2.5", quantile(pis, 0.025)},
                                  {"median", quantile(pis, 0.5)},
                                  {"p97.5", quantile(pis, 0.975)},
                                  {"max", m.pi_values.maxCoeff()}};

    std::string content;
    if (format == "json") {
        ordered_json j;
        j["artifact_version"] = clsiv::kVersion;
        j["command"] = "bootstrap";
        j["seed"] = seed;
        j["bootstrap_reps"] = bootstrap_reps;
        j["input"] = input;
        j["column_spec"] = column_spec_json(spec);
        j["estimator"] = estimator;
        j["n"] = d.n();
        j["k"] = d.k();
        j["l"] = d.l();
        j["failures"] = m.failures;
        ordered_json terms = ordered_json::array();
        for (Index i = 0; i < d.k(); ++i) {
            std::vector<double> values(m.replicate_values.cols());
            for (Index b = 0; b < m.replicate_values.cols(); ++b) {
                values[static_cast<std::size_t>(b)] = m.replicate_values(i, b);
            }
            terms.push_back(ordered_json{{"term", names[static_cast<std::size_t>(i)]},
                                         {"mean", m.mean(i)},
                                         {"sd", std::sqrt(std::max(0.0, m.cov(i, i)))},
                                         {"p2.5", quantile(values, 0.025)},
                                         {"p97.5", quantile(values, 0.975)}});
        }
        j["terms"] = terms;
        j["pi"] = pi_summary;
        content = j.dump(2) + "\n";
    } else {
        std::ostringstream os;
        os << "# clsiv " << clsiv::kVersion << " bootstrap seed=" << seed
           << " bootstrap_reps=" << bootstrap_reps << " estimator=" << estimator
           << " input=" << sanitize_cell(input)
           << " columns=" << sanitize_cell(column_spec_echo(spec)) << " failures=" << m.failures
           << "\n";
        os << "record,term,mean,sd,p2_5,p97_5\n";
        for (Index i = 0; i < d.k(); ++i) {
            std::vector<double> values(m.replicate_values.cols());
            for (Index b = 0; b < m.replicate_values.cols(); ++b) {
                values[static_cast<std::size_t>(b)] = m.replicate_values(i, b);
            }
            os << "estimate," << names[static_cast<std::size_t>(i)] << ","
               << clsiv::format_double(m.mean(i)) << ","
               << clsiv::format_double(std::sqrt(std::max(0.0, m.cov(i, i)))) << ","
               << clsiv::format_double(quantile(values, 0.025)) << ","
               << clsiv::format_double(quantile(values, 0.975)) << "\n";
        }
        os << "pi,pi," << clsiv::format_double(m.pi_values.mean()) << ",,"
           << clsiv::format_double(quantile(pis, 0.025)) << ","
           << clsiv::format_double(quantile(pis, 0.975)) << "\n";
        content = os.str();
    }
    write_output(output, content);
    return 0;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Convex combination of OLS and IV estimators"};
    app.require_subcommand(1);
    app.fallthrough();

    std::uint64_t seed = 42;
    int threads = 0;
    int bootstrap_reps = 100;
    std::string output;
    std::string format = "csv";
    app.add_option("--seed", seed, "RNG seed, echoed into every output")->capture_default_str();
    app.add_option("--threads", threads, "worker threads (0 = all cores); results do not depend on it")
        ->capture_default_str();
    app.add_option("--bootstrap-reps", bootstrap_reps, "bootstrap replicates B")
        ->capture_default_str();
    app.add_option("--output", output, "output file (default: stdout)");
    app.add_option("--format", format, "csv or json")
        ->check(CLI::IsMember({"csv", "json"}))
        ->capture_default_str();

    // estimate
    auto* est = app.add_subcommand("estimate", "fit estimators on a CSV dataset");
    ColumnFlags est_columns;
    std::string est_input;
    std::string est_estimators = "ols,tsls,cls-tsls";
    add_column_flags(est, &est_columns, &est_input);
    est->add_option("--estimators", est_estimators,
                    "comma list of ols,tsls,jive,cls-tsls,cls-jive")
        ->capture_default_str();

    // simulate
    auto* sim = app.add_subcommand("simulate", "Monte Carlo study on synthetic data");
    std::string model_name = "I";
    std::vector<double> alphas{0.25};
    std::vector<double> gammas{0.5};
    std::vector<Index> sizes{100};
    Index instruments = 1;
    double beta = 0.5;
    int iterations = 1000;
    std::string sim_estimators = "ols,tsls,cls-tsls";
    std::string dump_data;
    sim->add_option("--model", model_name, "I or II")->capture_default_str();
    sim->add_option("--alpha", alphas, "confounding strengths (grid)")->delimiter(',');
    sim->add_option("--gamma", gammas, "instrument strengths (grid)")->delimiter(',');
    sim->add_option("--n", sizes, "sample sizes (grid)")->delimiter(',');
    sim->add_option("--instruments", instruments, "instrument count (Model II)")
        ->capture_default_str();
    sim->add_option("--beta", beta, "true coefficient")->capture_default_str();
    sim->add_option("--iterations", iterations, "Monte Carlo repetitions T")
        ->capture_default_str();
    sim->add_option("--estimators", sim_estimators, "comma list of estimators")
        ->capture_default_str();
    sim->add_option("--dump-data", dump_data,
                    "write the first drawn dataset as CSV and exit");

    // bootstrap
    auto* boot = app.add_subcommand("bootstrap", "bootstrap inference for a CLS variant");
    ColumnFlags boot_columns;
    std::string boot_input;
    std::string boot_estimator = "cls-tsls";
    add_column_flags(boot, &boot_columns, &boot_input);
    boot->add_option("--estimator", boot_estimator, "cls-tsls or cls-jive")
        ->capture_default_str();

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
        if (est->parsed()) {
            return cmd_estimate(est_input, est_columns, est_estimators, bootstrap_reps, seed,
                                threads, output, format);
        }
        if (sim->parsed()) {
            return cmd_simulate(model_name, alphas, gammas, sizes, instruments, beta, iterations,
                                sim_estimators, bootstrap_reps, seed, threads, dump_data, output,
                                format);
        }
        if (boot->parsed()) {
            return cmd_bootstrap(boot_input, boot_columns, boot_estimator, bootstrap_reps, seed,
                                 threads, output, format);
        }
    } catch (const clsiv::bootstrap_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 4;
    } catch (const clsiv::validation_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 2;
    } catch (const clsiv::numeric_error& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    } catch (const std::exception& e) {
        std::cerr << "error: " << e.what() << "\n";
        return 3;
    }
    return 0;
}
