#pragma once

#include <string>
#include <vector>

#include "memodiff/dynamics.hpp"
#include "memodiff/report.hpp"

namespace memodiff {

// All writers format numbers with %.17g so identical runs produce
// byte-identical files.
std::string format_g17(double x);

// Columns: t, then the squared norms |u|_0^2, |u|_1^2, |u|_2^2,
// |eta|_{mu,1}^2, |eta|_{mu,2}^2, the two time-dependent state norms,
// and eps(t).
void write_trajectory_csv(const std::string& path, const Trajectory& traj);

// Columns: name, t, lhs, rhs, margin. One row per sample; several reports
// may share a file.
void write_report_csv(const std::string& path, const EstimateReport& report);
void write_reports_csv(const std::string& path,
                       const std::vector<EstimateReport>& reports);

}  // namespace memodiff
