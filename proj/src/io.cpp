#include "prospect/io.hpp"

#include <algorithm>
#include <cstdio>
#include <fstream>
#include <sstream>

#include "prospect/errors.hpp"

namespace prospect {

std::string format_g17(double value) {
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    return buf;
}

void write_text_file(const std::string& path, const std::string& content) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot open output file '" + path + "'");
    out << content;
    if (!out) throw ConfigError("failed writing output file '" + path + "'");
}

std::string comment_block(const std::string& meta) {
    std::ostringstream os;
    std::istringstream in(meta);
    std::string line;
    while (std::getline(in, line)) os << "# " << line << "\n";
    return os.str();
}

std::string path_bundle_csv(const PathBundle& bundle, const std::string& meta) {
    std::ostringstream os;
    os << comment_block(meta);
    os << "path_id,step,t";
    for (Eigen::Index k = 1; k <= bundle.dimension; ++k) os << ",y_" << k;
    os << ",x\n";
    for (Eigen::Index p = 0; p < bundle.path_count(); ++p) {
        for (Eigen::Index i = 0; i <= bundle.grid.steps; ++i) {
            os << p << "," << i << "," << format_g17(bundle.grid.time(i));
            for (Eigen::Index k = 0; k < bundle.dimension; ++k) {
                os << "," << format_g17(bundle.y_at(p, i, k));
            }
            os << "," << format_g17(bundle.x_at(p, i)) << "\n";
        }
    }
    return os.str();
}

std::string cpt_report_csv(const CptReport& report, std::optional<double> loss_integral,
                           const std::string& meta) {
    std::ostringstream os;
    os << comment_block(meta);
    os << "v_plus,v_minus,v,se_plus,se_minus,se_v,analytic_bound,terminal_moment,"
          "loss_benchmark_integral,sample_count\n";
    os << format_g17(report.v_plus) << "," << format_g17(report.v_minus) << ","
       << format_g17(report.v) << "," << format_g17(report.se_plus) << ","
       << format_g17(report.se_minus) << "," << format_g17(report.se_v) << ","
       << format_g17(report.analytic_bound) << "," << format_g17(report.terminal_moment)
       << "," << (loss_integral ? format_g17(*loss_integral) : "") << ","
       << report.sample_count << "\n";
    return os.str();
}

std::string cpt_report_block(const CptReport& report, std::optional<double> loss_integral) {
    std::ostringstream os;
    os << "CPT evaluation (" << report.sample_count << " paths)\n"
       << "  V+             = " << format_g17(report.v_plus) << "  (SE "
       << format_g17(report.se_plus) << ")\n"
       << "  V-             = " << format_g17(report.v_minus) << "  (SE "
       << format_g17(report.se_minus) << ")\n"
       << "  V = V+ - V-    = " << format_g17(report.v) << "  (SE " << format_g17(report.se_v)
       << ")\n"
       << "  analytic bound = " << format_g17(report.analytic_bound)
       << "  (terminal moment " << format_g17(report.terminal_moment) << ")\n";
    if (loss_integral) {
        os << "  loss-side benchmark integral = " << format_g17(*loss_integral) << "\n";
    }
    return os.str();
}

std::string trace_csv(const OptimizationResult& result, const std::string& meta) {
    std::ostringstream os;
    os << comment_block(meta);
    os << "iter,value,se";
    const Eigen::Index dim =
        result.trace.empty() ? result.best_parameters.size() : result.trace.front().parameters.size();
    for (Eigen::Index i = 0; i < dim; ++i) os << ",param_" << i;
    os << "\n";
    for (const auto& row : result.trace) {
        os << row.iteration << "," << format_g17(row.value) << "," << format_g17(row.se);
        for (Eigen::Index i = 0; i < row.parameters.size(); ++i) {
            os << "," << format_g17(row.parameters[i]);
        }
        os << "\n";
    }
    return os.str();
}

std::string verify_table_csv(const std::vector<SuiteResult>& results,
                             const std::string& meta) {
    std::ostringstream os;
    os << comment_block(meta);
    os << "suite,status,detail\n";
    for (const auto& r : results) {
        std::string detail = r.detail;
        std::replace(detail.begin(), detail.end(), ',', ';');
        std::replace(detail.begin(), detail.end(), '\n', ' ');
        os << r.name << ","
           << (r.status == SuiteStatus::pass
                   ? "pass"
                   : r.status == SuiteStatus::fail ? "fail" : "unsupported")
           << "," << detail << "\n";
    }
    return os.str();
}

std::string terminal_summary_block(const PathBundle& bundle) {
    Eigen::VectorXd xt = bundle.terminal_wealth();
    std::vector<double> sorted(xt.data(), xt.data() + xt.size());
    std::sort(sorted.begin(), sorted.end());
    const auto quantile = [&](double q) {
        const auto idx = static_cast<std::size_t>(q * static_cast<double>(sorted.size() - 1));
        return sorted[idx];
    };
    std::ostringstream os;
    os << "terminal wealth over " << bundle.path_count() << " paths\n"
       << "  mean = " << format_g17(xt.mean()) << "\n"
       << "  q05  = " << format_g17(quantile(0.05)) << "\n"
       << "  q25  = " << format_g17(quantile(0.25)) << "\n"
       << "  q50  = " << format_g17(quantile(0.50)) << "\n"
       << "  q75  = " << format_g17(quantile(0.75)) << "\n"
       << "  q95  = " << format_g17(quantile(0.95)) << "\n";
    return os.str();
}

}  // namespace prospect
