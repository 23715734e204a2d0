#pragma once

#include <fstream>
#include <iostream>
#include <map>
#include <optional>
#include <set>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "lsqb/bounds.hpp"
#include "lsqb/config.hpp"
#include "lsqb/io.hpp"
#include "lsqb/montecarlo.hpp"

// Command-line front end. Subcommands: bound, invert, simulate, figure1,
// check-noise. Exit codes: 0 success, 1 a noise check failed, 2 usage or
// configuration error.
//
// Overrides come in two flavors:
//   --set section.key=value   rewrites an experiment-config entry
//   --set key=value           supplies an operation parameter (bound and
//                             invert inputs: p, alpha, delta, sigma_min,
//                             sigma_max, r, eps, n)
// Parameters given directly always win over values derived from the config.

namespace lsqb::cli {

namespace detail {

struct CommonOpts {
    std::string config_path;
    std::vector<std::string> sets;
    std::string format = "csv";
    std::string out_path;
    long long trials = -1;       // -1: not given
    long long seed = -1;         // -1: not given
    int threads = 0;
};

inline void add_common(CLI::App* cmd, CommonOpts& opts) {
    cmd->add_option("--config", opts.config_path, "experiment config file (INI)");
    cmd->add_option("--set", opts.sets, "override, KEY=VALUE (repeatable)");
    cmd->add_option("--format", opts.format, "output format")->check(CLI::IsMember({"csv", "json"}));
    cmd->add_option("--out", opts.out_path, "output path (default: standard output)");
    cmd->add_option("--trials", opts.trials, "Monte-Carlo trials (overrides experiment.trials)");
    cmd->add_option("--seed", opts.seed, "master seed (overrides experiment.master_seed)");
    cmd->add_option("--threads", opts.threads, "worker threads, 0 = hardware (results are thread-count independent)");
}

struct SplitSets {
    std::vector<std::pair<std::string, std::string>> sectioned;
    std::map<std::string, std::string> bare;
};

inline SplitSets split_sets(const std::vector<std::string>& sets) {
    SplitSets out;
    for (const std::string& s : sets) {
        const auto eq = s.find('=');
        if (eq == std::string::npos || eq == 0)
            throw ConfigError("override '" + s + "' must have the form KEY=VALUE");
        const std::string key = s.substr(0, eq);
        const std::string value = s.substr(eq + 1);
        if (key.find('.') != std::string::npos)
            out.sectioned.emplace_back(key, value);
        else
            out.bare[key] = value;
    }
    return out;
}

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot open config file '" + path + "'");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

// Loads the experiment config with all sectioned overrides plus the --trials
// and --seed shortcuts applied.
inline ExperimentConfig load_config(const CommonOpts& opts, SplitSets& sets) {
    if (opts.config_path.empty()) throw ConfigError("this subcommand requires --config");
    auto overrides = sets.sectioned;
    if (opts.trials >= 0) overrides.emplace_back("experiment.trials", std::to_string(opts.trials));
    if (opts.seed >= 0) overrides.emplace_back("experiment.master_seed", std::to_string(opts.seed));
    return parse_experiment_config(read_file(opts.config_path), overrides);
}

// Bound/invert parameter resolution: direct key=value first, then the value
// implied by the config, otherwise an error naming the parameter.
class ParamResolver {
public:
    ParamResolver(std::map<std::string, std::string> bare, const std::optional<ExperimentConfig>& config)
        : bare_(std::move(bare)) {
        if (config) {
            inputs_ = bound_inputs_from(*config);
            eps_default_ = config->epsilon;
        }
    }

    double get(const std::string& name) {
        used_.insert(name);
        if (auto it = bare_.find(name); it != bare_.end())
            return cfg_detail::parse_double(it->second, name);
        if (inputs_) {
            if (name == "p") return inputs_->p;
            if (name == "alpha") return inputs_->alpha;
            if (name == "delta") return inputs_->delta;
            if (name == "sigma_min") return inputs_->sigma_min;
            if (name == "sigma_max") return inputs_->sigma_max;
        }
        if (name == "eps" && eps_default_) return *eps_default_;
        throw ConfigError("missing parameter '" + name + "' (pass --set " + name + "=VALUE" +
                          (inputs_ ? "" : " or --config FILE") + ")");
    }

    long long get_int(const std::string& name) {
        used_.insert(name);
        if (auto it = bare_.find(name); it != bare_.end()) return cfg_detail::parse_int(it->second, name);
        throw ConfigError("missing parameter '" + name + "' (pass --set " + name + "=VALUE)");
    }

    BoundInputs bound_inputs() {
        BoundInputs in;
        in.p = static_cast<int>(get("p"));
        in.alpha = get("alpha");
        in.delta = get("delta");
        in.sigma_min = get("sigma_min");
        in.sigma_max = get("sigma_max");
        try {
            in.validate();
        } catch (const std::invalid_argument& e) {
            throw ConfigError(e.what());
        }
        return in;
    }

    // Any direct parameter never consulted is a hard error (no silent typos).
    void finish() const {
        for (const auto& kv : bare_)
            if (!used_.count(kv.first)) throw ConfigError("unknown parameter '" + kv.first + "'");
    }

private:
    std::map<std::string, std::string> bare_;
    std::optional<BoundInputs> inputs_;
    std::optional<double> eps_default_;
    std::set<std::string> used_;
};

inline void write_output(const CommonOpts& opts, std::ostream& out, const std::string& text) {
    if (opts.out_path.empty()) {
        out << text;
        return;
    }
    std::ofstream f(opts.out_path, std::ios::binary);
    if (!f) throw ConfigError("cannot open output path '" + opts.out_path + "'");
    f << text;
}

inline std::string json_text(const nlohmann::ordered_json& j) { return j.dump(2) + "\n"; }

}  // namespace detail

inline int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
    CLI::App app{"Finite-sample guarantees for linear least squares under sub-Gaussian "
                 "martingale-difference noise",
                 "lsqb"};
    app.require_subcommand(1);

    detail::CommonOpts bound_opts, invert_opts, simulate_opts, figure1_opts, check_opts;
    std::string invert_mode;
    long long check_n = 100000;
    int check_max_lag = 5;
    std::string check_s_grid;
    double check_delta = -1.0;  // claimed certificate; -1: use the computed one

    CLI::App* cmd_bound = app.add_subcommand("bound", "certified sample count for accuracy r at confidence eps");
    detail::add_common(cmd_bound, bound_opts);
    CLI::App* cmd_invert = app.add_subcommand("invert", "solve the bound for r or for eps at a given n");
    detail::add_common(cmd_invert, invert_opts);
    cmd_invert->add_option("--mode", invert_mode, "solve-r or solve-eps")
        ->required()
        ->check(CLI::IsMember({"solve-r", "solve-eps"}));
    CLI::App* cmd_simulate = app.add_subcommand("simulate", "Monte-Carlo tail estimate at sample count n and radius r");
    detail::add_common(cmd_simulate, simulate_opts);
    CLI::App* cmd_figure1 = app.add_subcommand("figure1", "sweep the configured r grid: certified vs empirical sample counts");
    detail::add_common(cmd_figure1, figure1_opts);
    CLI::App* cmd_check = app.add_subcommand("check-noise", "validate the configured noise against the zero-mean MDS and sub-Gaussian assumptions");
    detail::add_common(cmd_check, check_opts);
    cmd_check->add_option("--n", check_n, "sample length (default 100000)");
    cmd_check->add_option("--max-lag", check_max_lag, "autocovariance lags to test (default 5)");
    cmd_check->add_option("--s-grid", check_s_grid, "comma-separated MGF grid (default +-{0.5,1,2,3}/delta)");
    cmd_check->add_option("--delta", check_delta, "claimed sub-Gaussian certificate (default: computed)");

    try {
        std::vector<std::string> reversed(args.rbegin(), args.rend());
        app.parse(reversed);
    } catch (const CLI::CallForHelp& e) {
        app.exit(e, out, err);
        return 0;
    } catch (const CLI::ParseError& e) {
        app.exit(e, out, err);
        return 2;
    }

    try {
        if (cmd_bound->parsed()) {
            auto sets = detail::split_sets(bound_opts.sets);
            std::optional<ExperimentConfig> config;
            if (!bound_opts.config_path.empty()) config = detail::load_config(bound_opts, sets);
            detail::ParamResolver params(sets.bare, config);
            const BoundInputs inputs = params.bound_inputs();
            const double r = params.get("r");
            const double eps = params.get("eps");
            params.finish();
            const BoundResult res = n_required(inputs, r, eps);
            detail::write_output(bound_opts, out,
                                 bound_opts.format == "json" ? detail::json_text(bound_result_json(res))
                                                             : bound_result_csv(res));
            return 0;
        }
        if (cmd_invert->parsed()) {
            auto sets = detail::split_sets(invert_opts.sets);
            std::optional<ExperimentConfig> config;
            if (!invert_opts.config_path.empty()) config = detail::load_config(invert_opts, sets);
            detail::ParamResolver params(sets.bare, config);
            const BoundInputs inputs = params.bound_inputs();
            const long long n = params.get_int("n");
            bool feasible = true;
            double value = 0.0;
            if (invert_mode == "solve-r") {
                const double eps = params.get("eps");
                params.finish();
                const auto r = invert_r(inputs, n, eps);
                feasible = r.has_value();
                value = r.value_or(0.0);
            } else {
                const double r = params.get("r");
                params.finish();
                value = invert_eps(inputs, n, r);
            }
            if (invert_opts.format == "json") {
                nlohmann::ordered_json j{{"mode", invert_mode}, {"feasible", feasible}};
                if (feasible)
                    j["value"] = value;
                else
                    j["value"] = nullptr;
                detail::write_output(invert_opts, out, detail::json_text(j));
            } else {
                std::string csv = "mode,feasible,value\n";
                csv += invert_mode + ',' + (feasible ? "true" : "false") + ',' +
                       (feasible ? format_sig6(value) : std::string("infeasible")) + '\n';
                detail::write_output(invert_opts, out, csv);
            }
            return 0;
        }
        if (cmd_simulate->parsed()) {
            auto sets = detail::split_sets(simulate_opts.sets);
            const ExperimentConfig config = detail::load_config(simulate_opts, sets);
            detail::ParamResolver params(sets.bare, config);
            const long long n = params.get_int("n");
            const double r = params.get("r");
            params.finish();
            const TailEstimate tail = tail_probability(config, n, r, config.trials, simulate_opts.threads);
            detail::write_output(simulate_opts, out,
                                 simulate_opts.format == "json"
                                     ? detail::json_text(tail_estimate_json(tail, config.master_seed))
                                     : tail_estimate_csv(tail, config.master_seed));
            return 0;
        }
        if (cmd_figure1->parsed()) {
            auto sets = detail::split_sets(figure1_opts.sets);
            if (!sets.bare.empty())
                throw ConfigError("unknown parameter '" + sets.bare.begin()->first + "'");
            const ExperimentConfig config = detail::load_config(figure1_opts, sets);
            const std::vector<SweepRow> rows = figure1_sweep(config, figure1_opts.threads);
            detail::write_output(figure1_opts, out,
                                 figure1_opts.format == "json"
                                     ? detail::json_text(figure1_json(rows, config.trials, config.master_seed))
                                     : figure1_csv(rows, config.trials, config.master_seed));
            return 0;
        }
        if (cmd_check->parsed()) {
            auto sets = detail::split_sets(check_opts.sets);
            if (!sets.bare.empty())
                throw ConfigError("unknown parameter '" + sets.bare.begin()->first + "'");
            const ExperimentConfig config = detail::load_config(check_opts, sets);
            const double delta = check_delta > 0.0 ? check_delta : delta_of(config.noise);
            std::vector<double> s_grid;
            if (check_s_grid.empty()) {
                for (double u : {-3.0, -2.0, -1.0, -0.5, 0.5, 1.0, 2.0, 3.0}) s_grid.push_back(u / delta);
            } else {
                s_grid = cfg_detail::parse_vector(check_s_grid, "s-grid");
            }
            const std::vector<double> values =
                sample_noise(config.noise, check_n, derive_seed(config.master_seed, SeedPurpose::noise_check));
            const SubGaussianReport sg = check_subgaussian(values, delta, s_grid);
            const MdsReport mds = check_mds(values, check_max_lag);
            detail::write_output(check_opts, out,
                                 check_opts.format == "json" ? detail::json_text(noise_checks_json(sg, mds))
                                                             : noise_checks_csv(sg, mds));
            return sg.pass && mds.pass ? 0 : 1;
        }
    } catch (const ConfigError& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    } catch (const std::exception& e) {
        err << "error: " << e.what() << "\n";
        return 2;
    }
    err << "error: no subcommand\n";
    return 2;
}

}  // namespace lsqb::cli
