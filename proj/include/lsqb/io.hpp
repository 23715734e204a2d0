#pragma once

#include <charconv>
#include <string>
#include <vector>

#include <json.hpp>

#include "lsqb/montecarlo.hpp"
#include "lsqb/noise.hpp"

// Rendering of result records as CSV and JSON. All numeric text is produced
// by std::to_chars, so output is locale-independent and byte-deterministic.

namespace lsqb {

// Six significant digits, the precision of the CSV artifacts.
inline std::string format_sig6(double v) {
    char buf[48];
    const auto res = std::to_chars(buf, buf + sizeof(buf), v, std::chars_format::general, 6);
    return std::string(buf, res.ptr);
}

inline std::string figure1_csv_header() {
    return "r,n_theory_n1,n_theory_nrand,n_theory,n_empirical,p_hat_at_n_theory,ci_low,ci_high,trials,"
           "master_seed";
}

inline std::string figure1_csv(const std::vector<SweepRow>& rows, long long trials, std::uint64_t master_seed) {
    std::string out = figure1_csv_header() + "\n";
    for (const SweepRow& row : rows) {
        out += format_sig6(row.r) + ',';
        out += format_sig6(row.n_theory_n1) + ',';
        out += format_sig6(row.n_theory_nrand) + ',';
        out += std::to_string(row.n_theory) + ',';
        out += std::to_string(row.n_empirical) + ',';
        out += format_sig6(row.p_hat_at_n_theory) + ',';
        out += format_sig6(row.ci_low) + ',';
        out += format_sig6(row.ci_high) + ',';
        out += std::to_string(trials) + ',';
        out += std::to_string(master_seed) + '\n';
    }
    return out;
}

inline nlohmann::ordered_json figure1_json(const std::vector<SweepRow>& rows, long long trials,
                                           std::uint64_t master_seed) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const SweepRow& row : rows) {
        arr.push_back({{"r", row.r},
                       {"n_theory_n1", row.n_theory_n1},
                       {"n_theory_nrand", row.n_theory_nrand},
                       {"n_theory", row.n_theory},
                       {"n_empirical", row.n_empirical},
                       {"p_hat_at_n_theory", row.p_hat_at_n_theory},
                       {"ci_low", row.ci_low},
                       {"ci_high", row.ci_high},
                       {"trials", trials},
                       {"master_seed", master_seed}});
    }
    return arr;
}

inline std::string tail_estimate_csv(const TailEstimate& t, std::uint64_t master_seed) {
    std::string out = "n,r,trials,exceed_count,p_hat,ci_low,ci_high,master_seed\n";
    out += std::to_string(t.n) + ',' + format_sig6(t.r) + ',' + std::to_string(t.trials) + ',' +
           std::to_string(t.exceed_count) + ',' + format_sig6(t.p_hat) + ',' + format_sig6(t.ci_low) + ',' +
           format_sig6(t.ci_high) + ',' + std::to_string(master_seed) + '\n';
    return out;
}

inline nlohmann::ordered_json tail_estimate_json(const TailEstimate& t, std::uint64_t master_seed) {
    return {{"n", t.n},
            {"r", t.r},
            {"trials", t.trials},
            {"exceed_count", t.exceed_count},
            {"p_hat", t.p_hat},
            {"ci_low", t.ci_low},
            {"ci_high", t.ci_high},
            {"master_seed", master_seed}};
}

inline std::string bound_result_csv(const BoundResult& b) {
    std::string out = "n1,nrand,n,n_first_certified,log_term,degenerate\n";
    out += format_sig6(b.n1) + ',' + format_sig6(b.nrand) + ',' + std::to_string(b.n) + ',' +
           std::to_string(b.n + 1) + ',' + format_sig6(b.log_term) + ',' +
           (b.degenerate ? "true" : "false") + '\n';
    return out;
}

inline nlohmann::ordered_json bound_result_json(const BoundResult& b) {
    return {{"n1", b.n1},           {"nrand", b.nrand},       {"n", b.n},
            {"n_first_certified", b.n + 1}, {"log_term", b.log_term}, {"degenerate", b.degenerate}};
}

inline std::string noise_checks_csv(const SubGaussianReport& sg, const MdsReport& mds) {
    std::string out = "check,param,value,limit,ok\n";
    for (const SubGaussianPoint& p : sg.points)
        out += "subgaussian," + format_sig6(p.s) + ',' + format_sig6(p.log_mgf) + ',' +
               format_sig6(p.bound + p.slack) + ',' + (p.ok ? "1" : "0") + '\n';
    for (const MdsLagStat& s : mds.lag_stats)
        out += "mds_lag," + std::to_string(s.lag) + ',' + format_sig6(s.value) + ',' + format_sig6(s.band) +
               ',' + (s.ok ? "1" : "0") + '\n';
    for (const MdsLagStat& s : mds.regression_coeffs)
        out += "mds_regression," + std::to_string(s.lag) + ',' + format_sig6(s.value) + ',' +
               format_sig6(s.band) + ',' + (s.ok ? "1" : "0") + '\n';
    out += std::string("overall,,,,") + (sg.pass && mds.pass ? "1" : "0") + '\n';
    return out;
}

inline nlohmann::ordered_json noise_checks_json(const SubGaussianReport& sg, const MdsReport& mds) {
    nlohmann::ordered_json points = nlohmann::ordered_json::array();
    for (const SubGaussianPoint& p : sg.points)
        points.push_back(
            {{"s", p.s}, {"log_mgf", p.log_mgf}, {"bound", p.bound}, {"slack", p.slack}, {"ok", p.ok}});
    nlohmann::ordered_json lags = nlohmann::ordered_json::array();
    for (const MdsLagStat& s : mds.lag_stats)
        lags.push_back({{"lag", s.lag}, {"value", s.value}, {"band", s.band}, {"ok", s.ok}});
    nlohmann::ordered_json reg = nlohmann::ordered_json::array();
    for (const MdsLagStat& s : mds.regression_coeffs)
        reg.push_back({{"lag", s.lag}, {"value", s.value}, {"band", s.band}, {"ok", s.ok}});
    return {{"subgaussian", {{"points", points}, {"max_violation", sg.max_violation}, {"pass", sg.pass}}},
            {"mds", {{"lag_stats", lags}, {"regression_coeffs", reg}, {"pass", mds.pass}}},
            {"pass", sg.pass && mds.pass}};
}

}  // namespace lsqb
