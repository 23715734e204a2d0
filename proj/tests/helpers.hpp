#pragma once

#include <algorithm>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <string>
#include <unistd.h>
#include <vector>

#include "lsqb/config.hpp"
#include "lsqb/montecarlo.hpp"

namespace lsqb::test {

// The canonical experiment: p = 2 Rademacher design with alpha^2 = 10
// (sigma_min = sigma_max = 10), interference noise with delta = 4, eps = 0.2.
inline ExperimentConfig fig1_config() {
    ExperimentConfig config;
    config.design = DesignSpec::rademacher(2, std::sqrt(10.0));
    config.noise = NoiseSpec::fir_mds(3, 2.0, 1.0, 2.0);
    config.theta0 = Eigen::Vector2d(1.0, -0.5);
    config.epsilon = 0.2;
    config.r_grid = {0.25, 0.5, 0.75, 1.0, 1.5, 2.0};
    config.trials = 2000;
    config.master_seed = 20260811ull;
    return config;
}

inline std::string fig1_config_text() { return serialize_experiment_config(fig1_config()); }

// Two-sample Kolmogorov-Smirnov statistic sup_x |F1(x) - F2(x)|.
inline double ks_two_sample(std::vector<double> a, std::vector<double> b) {
    std::sort(a.begin(), a.end());
    std::sort(b.begin(), b.end());
    const double na = static_cast<double>(a.size());
    const double nb = static_cast<double>(b.size());
    std::size_t i = 0, j = 0;
    double d = 0.0;
    while (i < a.size() && j < b.size()) {
        if (a[i] <= b[j])
            ++i;
        else
            ++j;
        d = std::max(d, std::abs(static_cast<double>(i) / na - static_cast<double>(j) / nb));
    }
    return d;
}

inline double ks_critical_1pct(std::size_t na, std::size_t nb) {
    const double c = 1.6276236307187293;  // sqrt(-ln(0.005) / 2)
    return c * std::sqrt(static_cast<double>(na + nb) / (static_cast<double>(na) * static_cast<double>(nb)));
}

// Scratch file that cleans up after itself.
class TempFile {
public:
    explicit TempFile(const std::string& contents, const std::string& stem = "lsqb_test") {
        static int counter = 0;
        path_ = std::filesystem::temp_directory_path() /
                (stem + "_" + std::to_string(::getpid()) + "_" + std::to_string(counter++) + ".ini");
        std::ofstream f(path_, std::ios::binary);
        f << contents;
    }
    ~TempFile() {
        std::error_code ec;
        std::filesystem::remove(path_, ec);
    }
    std::string path() const { return path_.string(); }

private:
    std::filesystem::path path_;
};

inline std::string read_file(const std::string& path) {
    std::ifstream in(path, std::ios::binary);
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

}  // namespace lsqb::test
