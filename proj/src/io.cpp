#include "subwalk/io.hpp"

#include "subwalk/common.hpp"

#include <nlohmann/json.hpp>

#include <cstdio>
#include <fstream>
#include <sstream>

namespace subwalk {

std::string format_double(double v) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", v);
    return buf;
}

void write_text_file(const std::filesystem::path& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw Error("cannot open " + path.string() + " for writing");
    out << content;
    if (!out) throw Error("write failed for " + path.string());
}

std::string to_csv(const LatticeDistribution& law) {
    std::ostringstream os;
    for (int j = 0; j < law.dimension(); ++j) os << "z" << (j + 1) << ",";
    os << "mass\n";
    for (const auto& [z, p] : law.entries()) {
        for (int c : z) os << c << ",";
        os << format_double(p) << "\n";
    }
    return os.str();
}

std::string to_csv(const StepDistribution& sd) {
    std::ostringstream os;
    os << "m,w_m\n";
    for (std::size_t m = 0; m < sd.weights.size(); ++m)
        os << (m + 1) << "," << format_double(sd.weights[m]) << "\n";
    return os.str();
}

std::string to_csv(const ChfEvaluation& chf) {
    std::ostringstream os;
    if (chf.theta_grid.empty()) return "";
    const std::size_t d = chf.theta_grid.front().size();
    for (std::size_t j = 0; j < d; ++j) os << "theta" << (j + 1) << ",";
    os << "re,im";
    if (!chf.stderrs.empty()) os << ",stderr";
    os << "\n";
    for (std::size_t g = 0; g < chf.theta_grid.size(); ++g) {
        for (double th : chf.theta_grid[g]) os << format_double(th) << ",";
        os << format_double(chf.values[g].real()) << ","
           << format_double(chf.values[g].imag());
        if (!chf.stderrs.empty()) os << "," << format_double(chf.stderrs[g]);
        os << "\n";
    }
    return os.str();
}

std::string to_csv(const ConvergenceReport& rep) {
    std::ostringstream os;
    os << "n,sup_distance\n";
    for (std::size_t i = 0; i < rep.n_sequence.size(); ++i)
        os << rep.n_sequence[i] << "," << format_double(rep.sup_distance[i]) << "\n";
    return os.str();
}

std::string to_csv(const PathTable& path) {
    std::ostringstream os;
    os << "time";
    if (!path.values.empty())
        for (std::size_t j = 0; j < path.values.front().size(); ++j) os << ",x" << (j + 1);
    os << "\n";
    for (std::size_t i = 0; i < path.times.size(); ++i) {
        os << format_double(path.times[i]);
        for (double v : path.values[i]) os << "," << format_double(v);
        os << "\n";
    }
    return os.str();
}

std::string to_csv(const TailBoundReport& rep) {
    std::ostringstream os;
    os << "n,K,lhs,rhs,ratio,lhs_bound95\n";
    for (const auto& c : rep.cells)
        os << c.n << "," << format_double(c.K) << "," << format_double(c.lhs) << ","
           << format_double(c.rhs) << "," << format_double(c.ratio) << ","
           << format_double(c.lhs_bound95) << "\n";
    return os.str();
}

nlohmann::json to_json(const LatticeDistribution& law) {
    nlohmann::json entries = nlohmann::json::array();
    for (const auto& [z, p] : law.entries())
        entries.push_back({{"z", z}, {"mass", p}});
    return {{"d", law.dimension()},
            {"radius", law.radius()},
            {"captured_mass", law.captured_mass()},
            {"entries", entries}};
}

nlohmann::json to_json(const StepDistribution& sd) {
    return {{"q", sd.q},
            {"direct_atom", sd.direct_atom},
            {"M", sd.M},
            {"truncation_mass", sd.truncation_mass},
            {"assigned_mass", sd.total_assigned()}};
}

nlohmann::json to_json(const TripletComparison& cmp) {
    return {{"beta_distance", cmp.beta_distance},
            {"nu_tv_distance", cmp.nu_tv_distance},
            {"mass_unaccounted", cmp.mass_unaccounted},
            {"tolerance", cmp.tolerance},
            {"verdict", cmp.pass ? "pass" : "fail"}};
}

nlohmann::json to_json(const ConvergenceReport& rep) {
    return {{"n_sequence", rep.n_sequence},
            {"sup_distance", rep.sup_distance},
            {"alpha", rep.alpha},
            {"monotone_flag", rep.monotone_flag},
            {"final_distance", rep.final_distance}};
}

nlohmann::json to_json(const TailBoundReport& rep) {
    nlohmann::json cells = nlohmann::json::array();
    for (const auto& c : rep.cells)
        cells.push_back({{"n", c.n},
                         {"K", c.K},
                         {"lhs", c.lhs},
                         {"rhs", c.rhs},
                         {"ratio", c.ratio},
                         {"lhs_bound95", c.lhs_bound95}});
    return {{"a", rep.a},
            {"beta", rep.beta},
            {"cells", cells},
            {"max_ratio", rep.max_ratio},
            {"all_finite", rep.all_finite},
            {"monotone_growth", rep.monotone_growth}};
}

nlohmann::json to_json(const RVEstimate& rv) {
    return {{"index_hat", rv.index_hat},
            {"x_factor", rv.x_factor},
            {"scale_points", rv.scale_points},
            {"per_point_ratios", rv.per_point_ratios}};
}

} // namespace subwalk
