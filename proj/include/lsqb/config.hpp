#pragma once

#include <charconv>
#include <cstdint>
#include <map>
#include <set>
#include <sstream>
#include <stdexcept>
#include <string>
#include <vector>

#include <boost/property_tree/ini_parser.hpp>
#include <boost/property_tree/ptree.hpp>

#include "lsqb/montecarlo.hpp"

// Experiment definition file: a plain INI with sections [design], [noise],
// [model], [experiment]. Unknown sections or keys are hard errors, as are
// keys that do not belong to the selected design/noise kind.

namespace lsqb {

struct ConfigError : std::runtime_error {
    using std::runtime_error::runtime_error;
};

namespace cfg_detail {

inline double parse_double(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const double v = std::stod(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("config: key '" + key + "' has a malformed number: '" + s + "'");
    }
}

inline long long parse_int(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const long long v = std::stoll(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("config: key '" + key + "' has a malformed integer: '" + s + "'");
    }
}

inline std::uint64_t parse_u64(const std::string& s, const std::string& key) {
    try {
        std::size_t pos = 0;
        const unsigned long long v = std::stoull(s, &pos);
        if (pos != s.size()) throw std::invalid_argument("");
        return v;
    } catch (...) {
        throw ConfigError("config: key '" + key + "' has a malformed unsigned integer: '" + s + "'");
    }
}

inline std::vector<double> parse_vector(const std::string& s, const std::string& key) {
    std::vector<double> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_double(item, key));
    if (out.empty()) throw ConfigError("config: key '" + key + "' must be a comma-separated list");
    return out;
}

inline Eigen::MatrixXd parse_block(const std::string& s, const std::string& key) {
    std::vector<std::vector<double>> rows;
    std::stringstream ss(s);
    std::string row;
    while (std::getline(ss, row, ';')) rows.push_back(parse_vector(row, key));
    if (rows.empty()) throw ConfigError("config: key '" + key + "' must be rows of numbers separated by ';'");
    Eigen::MatrixXd b(rows.size(), rows[0].size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        if (rows[i].size() != rows[0].size())
            throw ConfigError("config: key '" + key + "' has ragged rows");
        for (std::size_t j = 0; j < rows[i].size(); ++j) b(static_cast<long>(i), static_cast<long>(j)) = rows[i][j];
    }
    return b;
}

// Shortest decimal form that parses back to the same double.
inline std::string format_exact(double v) {
    char buf[32];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v);
    return std::string(buf, res.ptr);
}

inline std::string format_vector(const std::vector<double>& xs) {
    std::string out;
    for (std::size_t i = 0; i < xs.size(); ++i) {
        if (i) out += ',';
        out += format_exact(xs[i]);
    }
    return out;
}

class SectionReader {
public:
    SectionReader(const boost::property_tree::ptree& tree, std::string name) : name_(std::move(name)) {
        if (auto child = tree.get_child_optional(name_))
            for (const auto& kv : *child) values_[kv.first] = kv.second.get_value<std::string>();
    }

    bool has(const std::string& key) {
        seen_.insert(key);
        return values_.count(key) > 0;
    }
    std::string get(const std::string& key) {
        seen_.insert(key);
        auto it = values_.find(key);
        if (it == values_.end()) throw ConfigError("config: missing required key '" + name_ + "." + key + "'");
        return it->second;
    }
    std::string get_or(const std::string& key, const std::string& fallback) {
        return has(key) ? values_.at(key) : fallback;
    }
    std::string qualified(const std::string& key) const { return name_ + "." + key; }

    // Every present key must have been consulted by the selected schema.
    void finish() const {
        for (const auto& kv : values_)
            if (!seen_.count(kv.first))
                throw ConfigError("config: unknown key '" + name_ + "." + kv.first + "'");
    }

private:
    std::string name_;
    std::map<std::string, std::string> values_;
    std::set<std::string> seen_;
};

}  // namespace cfg_detail

// Overrides are (section.key, value) pairs applied on top of the file before
// validation, so the command line wins.
inline ExperimentConfig parse_experiment_config(const std::string& text,
                                                const std::vector<std::pair<std::string, std::string>>& overrides = {}) {
    namespace pt = boost::property_tree;
    pt::ptree tree;
    try {
        std::istringstream in(text);
        pt::read_ini(in, tree);
    } catch (const pt::ini_parser_error& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    static const std::set<std::string> known_sections{"design", "noise", "model", "experiment"};
    for (const auto& kv : tree) {
        if (!known_sections.count(kv.first)) throw ConfigError("config: unknown section '" + kv.first + "'");
        if (kv.second.empty() && !kv.second.get_value<std::string>().empty())
            throw ConfigError("config: top-level key '" + kv.first + "' outside any section");
    }
    for (const auto& [key, value] : overrides) {
        const auto dot = key.find('.');
        if (dot == std::string::npos || dot == 0 || dot + 1 == key.size())
            throw ConfigError("config: override key '" + key + "' must be section.key");
        const std::string section = key.substr(0, dot);
        if (!known_sections.count(section)) throw ConfigError("config: unknown section '" + section + "'");
        tree.put(pt::ptree::path_type(key, '.'), value);
    }

    using cfg_detail::SectionReader;
    ExperimentConfig config;

    SectionReader design(tree, "design");
    {
        const std::string kind = design.get("kind");
        if (kind == "rademacher" || kind == "uniform") {
            const int p = static_cast<int>(cfg_detail::parse_int(design.get("p"), design.qualified("p")));
            const double alpha = cfg_detail::parse_double(design.get("alpha"), design.qualified("alpha"));
            config.design = kind == "rademacher" ? DesignSpec::rademacher(p, alpha) : DesignSpec::uniform(p, alpha);
        } else if (kind == "fixed_block") {
            config.design = DesignSpec::fixed_block(
                cfg_detail::parse_block(design.get("block"), design.qualified("block")));
            if (design.has("p") &&
                cfg_detail::parse_int(design.get("p"), design.qualified("p")) != config.design.p)
                throw ConfigError("config: design.p disagrees with the block dimension");
        } else {
            throw ConfigError("config: design.kind must be rademacher, uniform or fixed_block; got '" + kind + "'");
        }
        design.finish();
    }

    SectionReader noise(tree, "noise");
    {
        const std::string kind = noise.get("kind");
        auto get_double = [&](const char* key) {
            return cfg_detail::parse_double(noise.get(key), noise.qualified(key));
        };
        if (kind == "gaussian") {
            config.noise = NoiseSpec::gaussian(get_double("sigma"));
        } else if (kind == "uniform_bounded") {
            config.noise = NoiseSpec::uniform_bounded(get_double("c"));
        } else if (kind == "rademacher_scaled") {
            config.noise = NoiseSpec::rademacher_scaled(get_double("c"));
        } else if (kind == "gaussian_mixture") {
            config.noise = NoiseSpec::gaussian_mixture(
                cfg_detail::parse_vector(noise.get("weights"), noise.qualified("weights")),
                cfg_detail::parse_vector(noise.get("sigmas"), noise.qualified("sigmas")));
        } else if (kind == "fir_mds") {
            config.noise = NoiseSpec::fir_mds(
                static_cast<int>(cfg_detail::parse_int(noise.get("taps"), noise.qualified("taps"))),
                get_double("eta"), get_double("r1"), get_double("r2"));
        } else if (kind == "ar1") {
            config.noise = NoiseSpec::ar1(get_double("phi"), get_double("sigma"));
        } else {
            throw ConfigError("config: noise.kind must be gaussian, uniform_bounded, rademacher_scaled, "
                              "gaussian_mixture, fir_mds or ar1; got '" + kind + "'");
        }
        noise.finish();
    }

    SectionReader model(tree, "model");
    {
        const std::vector<double> theta0 =
            cfg_detail::parse_vector(model.get("theta0"), model.qualified("theta0"));
        config.theta0 = Eigen::Map<const Eigen::VectorXd>(theta0.data(), static_cast<long>(theta0.size()));
        model.finish();
    }

    SectionReader experiment(tree, "experiment");
    {
        config.epsilon = cfg_detail::parse_double(experiment.get("epsilon"), experiment.qualified("epsilon"));
        config.r_grid = cfg_detail::parse_vector(experiment.get("r_grid"), experiment.qualified("r_grid"));
        config.trials = cfg_detail::parse_int(experiment.get("trials"), experiment.qualified("trials"));
        config.master_seed = cfg_detail::parse_u64(experiment.get("master_seed"), experiment.qualified("master_seed"));
        experiment.finish();
    }

    try {
        config.validate();
    } catch (const std::invalid_argument& e) {
        throw ConfigError(std::string("config: ") + e.what());
    }
    return config;
}

inline std::string serialize_experiment_config(const ExperimentConfig& config) {
    config.validate();
    using cfg_detail::format_exact;
    using cfg_detail::format_vector;
    std::string out;
    out += "[design]\n";
    switch (config.design.kind) {
        case DesignKind::rademacher:
            out += "kind = rademacher\n";
            break;
        case DesignKind::uniform:
            out += "kind = uniform\n";
            break;
        case DesignKind::fixed_block: {
            out += "kind = fixed_block\n";
            out += "block = ";
            for (int i = 0; i < config.design.p; ++i) {
                if (i) out += ';';
                for (int j = 0; j < config.design.p; ++j) {
                    if (j) out += ',';
                    out += format_exact(config.design.block(i, j));
                }
            }
            out += '\n';
            break;
        }
    }
    if (config.design.kind != DesignKind::fixed_block) {
        out += "p = " + std::to_string(config.design.p) + '\n';
        out += "alpha = " + format_exact(config.design.alpha) + '\n';
    }
    out += "\n[noise]\n";
    switch (config.noise.kind) {
        case NoiseKind::gaussian:
            out += "kind = gaussian\nsigma = " + format_exact(config.noise.sigma) + '\n';
            break;
        case NoiseKind::uniform_bounded:
            out += "kind = uniform_bounded\nc = " + format_exact(config.noise.c) + '\n';
            break;
        case NoiseKind::rademacher_scaled:
            out += "kind = rademacher_scaled\nc = " + format_exact(config.noise.c) + '\n';
            break;
        case NoiseKind::gaussian_mixture:
            out += "kind = gaussian_mixture\n";
            out += "weights = " + format_vector(config.noise.weights) + '\n';
            out += "sigmas = " + format_vector(config.noise.sigmas) + '\n';
            break;
        case NoiseKind::fir_mds:
            out += "kind = fir_mds\n";
            out += "taps = " + std::to_string(config.noise.taps) + '\n';
            out += "eta = " + format_exact(config.noise.eta) + '\n';
            out += "r1 = " + format_exact(config.noise.r1) + '\n';
            out += "r2 = " + format_exact(config.noise.r2) + '\n';
            break;
        case NoiseKind::ar1:
            out += "kind = ar1\n";
            out += "phi = " + format_exact(config.noise.phi) + '\n';
            out += "sigma = " + format_exact(config.noise.sigma) + '\n';
            break;
    }
    out += "\n[model]\ntheta0 = ";
    for (long i = 0; i < config.theta0.size(); ++i) {
        if (i) out += ',';
        out += format_exact(config.theta0(i));
    }
    out += '\n';
    out += "\n[experiment]\n";
    out += "epsilon = " + format_exact(config.epsilon) + '\n';
    out += "r_grid = " + format_vector(config.r_grid) + '\n';
    out += "trials = " + std::to_string(config.trials) + '\n';
    out += "master_seed = " + std::to_string(config.master_seed) + '\n';
    return out;
}

}  // namespace lsqb
