#pragma once

// JSON / CSV emission for experiment reports. The "report" object is a pure function
// of the run configuration; runtime and worker count go to "metadata".

#include <iomanip>
#include <ostream>
#include <sstream>
#include <string>

#include <json.hpp>

#include "experiments.hpp"
#include "ltconstant.hpp"

namespace ltavg {

inline constexpr int report_schema_version = 1;

inline nlohmann::json row_json(const ReportRow& row)
{
    nlohmann::json j = {{"x", row.x}, {"empirical", row.empirical}};
    j["theoretical"] = row.theoretical ? nlohmann::json(*row.theoretical) : nlohmann::json(nullptr);
    j["ratio"] = row.ratio ? nlohmann::json(*row.ratio) : nlohmann::json(nullptr);
    return j;
}

/// Deterministic body: config echo, constant provenance, rows.
inline nlohmann::json report_body(const ExperimentReport& rep)
{
    nlohmann::json rows = nlohmann::json::array();
    for (const auto& r : rep.rows) rows.push_back(row_json(r));
    nlohmann::json body = {{"experiment", rep.experiment}, {"config", rep.config}, {"rows", rows}};
    body["constant"] = rep.constant ? to_json(*rep.constant) : nlohmann::json(nullptr);
    if (!rep.extra.empty()) body["extra"] = rep.extra;
    return body;
}

inline nlohmann::json report_document(const nlohmann::json& body, double runtime_seconds, unsigned workers)
{
    return {{"schema_version", report_schema_version},
            {"report", body},
            {"metadata", {{"runtime_seconds", runtime_seconds}, {"workers", workers}}}};
}

inline nlohmann::json report_document(const ExperimentReport& rep, unsigned workers)
{
    return report_document(report_body(rep), rep.runtime_seconds, workers);
}

namespace detail {

inline std::string csv_number(double v)
{
    std::ostringstream os;
    os << std::setprecision(17) << v;
    return os.str();
}

} // namespace detail

/// One line per checkpoint: x,empirical,theoretical,ratio (absent values left empty).
inline void write_csv(std::ostream& os, const ExperimentReport& rep)
{
    os << "x,empirical,theoretical,ratio\n";
    for (const auto& r : rep.rows) {
        os << detail::csv_number(r.x) << ',' << detail::csv_number(r.empirical) << ',';
        if (r.theoretical) os << detail::csv_number(*r.theoretical);
        os << ',';
        if (r.ratio) os << detail::csv_number(*r.ratio);
        os << '\n';
    }
}

} // namespace ltavg
