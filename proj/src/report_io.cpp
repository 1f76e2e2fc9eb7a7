#include "rpr/report_io.hpp"

#include "rpr/util.hpp"

namespace rpr {

using nlohmann::json;

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n\r") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    out += '"';
    return out;
}

std::string report_to_csv(const ExperimentReport& report) {
    std::string out = "config,method,metric,value,mc_se\n";
    for (const ReportCell& cell : report.rows) {
        out += csv_escape(cell.config_key) + ',' + csv_escape(cell.method) + ',' +
               csv_escape(cell.metric) + ',' + format_double(cell.value) + ',' +
               format_double(cell.mc_se) + '\n';
    }
    return out;
}

json json_number(double v) {
    if (std::isfinite(v)) return v;
    return format_double(v);  // "inf" / "-inf" / "nan"
}

json report_to_json(const ExperimentReport& report) {
    json rows = json::array();
    for (const ReportCell& cell : report.rows)
        rows.push_back(json{{"config", cell.config_key},
                            {"method", cell.method},
                            {"metric", cell.metric},
                            {"value", json_number(cell.value)},
                            {"mc_se", json_number(cell.mc_se)}});
    return json{{"schema_version", REPORT_SCHEMA_VERSION},
                {"study", report.study},
                {"provenance",
                 json{{"config", json::parse(report.config_echo.empty()
                                                 ? "{}"
                                                 : report.config_echo)},
                      {"seed", report.seed}}},
                {"rows", rows}};
}

namespace {

void require(bool ok, const std::string& what) {
    if (!ok) throw DataError("report validation: " + what);
}

bool is_report_number(const json& v) {
    if (v.is_number()) return true;
    if (!v.is_string()) return false;
    const std::string s = v.get<std::string>();
    return s == "inf" || s == "-inf" || s == "nan";
}

}  // namespace

void validate_experiment_report(const json& doc) {
    require(doc.is_object(), "document must be an object");
    require(doc.contains("schema_version") && doc["schema_version"].is_number_integer(),
            "schema_version missing or not an integer");
    require(doc["schema_version"].get<int>() == REPORT_SCHEMA_VERSION,
            "unsupported schema_version");
    require(doc.contains("study") && doc["study"].is_string(),
            "study missing or not a string");
    require(doc.contains("provenance") && doc["provenance"].is_object(),
            "provenance missing or not an object");
    const json& prov = doc["provenance"];
    require(prov.contains("config") && prov["config"].is_object(),
            "provenance.config missing or not an object");
    require(prov.contains("seed") && prov["seed"].is_number(),
            "provenance.seed missing or not a number");
    require(doc.contains("rows") && doc["rows"].is_array(),
            "rows missing or not an array");
    std::size_t i = 0;
    for (const json& row : doc["rows"]) {
        const std::string at = "rows[" + std::to_string(i) + "]";
        require(row.is_object(), at + " must be an object");
        for (const char* key : {"config", "method", "metric"})
            require(row.contains(key) && row[key].is_string(),
                    at + "." + key + " missing or not a string");
        for (const char* key : {"value", "mc_se"})
            require(row.contains(key) && is_report_number(row[key]),
                    at + "." + key + " missing or not a number");
        ++i;
    }
}

}  // namespace rpr
