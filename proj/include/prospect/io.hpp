#pragma once

#include <optional>
#include <string>

#include "prospect/cpt.hpp"
#include "prospect/optimizer.hpp"
#include "prospect/verify.hpp"

namespace prospect {

// 17 significant digits: decimal text that round-trips any double exactly.
std::string format_g17(double value);

void write_text_file(const std::string& path, const std::string& content);

// Prefixes every line of `meta` with "# " so it can head a CSV file.
std::string comment_block(const std::string& meta);

// CSV with header `path_id,step,t,y_1..y_d,x`.
std::string path_bundle_csv(const PathBundle& bundle, const std::string& meta);

std::string cpt_report_csv(const CptReport& report, std::optional<double> loss_integral,
                           const std::string& meta);
std::string cpt_report_block(const CptReport& report, std::optional<double> loss_integral);

// `iter,value,se,params...` rows.
std::string trace_csv(const OptimizationResult& result, const std::string& meta);

std::string verify_table_csv(const std::vector<SuiteResult>& results, const std::string& meta);

// Terminal-wealth summary (mean and 5/25/50/75/95% quantiles).
std::string terminal_summary_block(const PathBundle& bundle);

}  // namespace prospect
