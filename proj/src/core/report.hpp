#pragma once

#include <string>

#include <json.hpp>

#include "cv.hpp"

namespace sift {

inline constexpr const char* kReportFormatVersion = "rpt1";

nlohmann::json report_to_json(const CVReport& report);

void save_report(const CVReport& report, const std::string& path);
nlohmann::json load_report_json(const std::string& path); // validates format version

// Tidy CSVs for plotting: metrics.csv (metric,class,model,fold,value),
// confusion.csv (fold,class,tp,fp,fn,tn), importance.csv (feature,model,value).
void write_plot_csvs(const nlohmann::json& report, const std::string& dir);

} // namespace sift
