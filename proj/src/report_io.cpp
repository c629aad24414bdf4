#include "memodiff/report_io.hpp"

#include <cstdio>
#include <fstream>

#include "memodiff/errors.hpp"

namespace memodiff {

std::string format_g17(double x) {
    char buf[40];
    std::snprintf(buf, sizeof buf, "%.17g", x);
    return buf;
}

std::string EstimateReport::summary_line() const {
    std::string line = pass ? "[PASS] " : "[FAIL] ";
    line += name;
    line += ": worst margin ";
    line += format_g17(worst_margin);
    if (worst_index >= 0) {
        line += " at t = ";
        line += format_g17(samples[static_cast<std::size_t>(worst_index)].t);
    }
    line += " (tolerance ";
    line += format_g17(tolerance);
    line += ", ";
    line += std::to_string(samples.size());
    line += " samples)";
    return line;
}

namespace {

std::ofstream open_out(const std::string& path) {
    std::ofstream out(path);
    if (!out) throw ConfigError("cannot open output file: " + path);
    return out;
}

void append_report_rows(std::ofstream& out, const EstimateReport& report) {
    for (const EstimateSample& s : report.samples)
        out << report.name << ',' << format_g17(s.t) << ',' << format_g17(s.lhs)
            << ',' << format_g17(s.rhs) << ',' << format_g17(s.margin()) << '\n';
}

}  // namespace

void write_trajectory_csv(const std::string& path, const Trajectory& traj) {
    std::ofstream out = open_out(path);
    out << "t,u_l2_sq,u_h1_sq,u_h2_sq,eta_mu1_sq,eta_mu2_sq,state_m_sq,"
           "state_m1_sq,eps\n";
    for (const TrajectorySample& s : traj.samples)
        out << format_g17(s.t) << ',' << format_g17(s.l2) << ','
            << format_g17(s.h1) << ',' << format_g17(s.h2) << ','
            << format_g17(s.eta1) << ',' << format_g17(s.eta2) << ','
            << format_g17(s.mt0) << ',' << format_g17(s.mt1) << ','
            << format_g17(s.eps) << '\n';
}

void write_report_csv(const std::string& path, const EstimateReport& report) {
    std::ofstream out = open_out(path);
    out << "name,t,lhs,rhs,margin\n";
    append_report_rows(out, report);
}

void write_reports_csv(const std::string& path,
                       const std::vector<EstimateReport>& reports) {
    std::ofstream out = open_out(path);
    out << "name,t,lhs,rhs,margin\n";
    for (const EstimateReport& r : reports) append_report_rows(out, r);
}

}  // namespace memodiff
