#include "hetcache/results.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iostream>
#include <stdexcept>

#include <json.hpp>

namespace hetcache {

namespace {

std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

std::string csv_opt(const std::optional<double>& v) { return v ? format_csv_number(*v) : std::string(); }

nlohmann::json json_opt(const std::optional<double>& v) { return v ? nlohmann::json(*v) : nlohmann::json(nullptr); }

std::optional<double> opt_from(const nlohmann::json& j, const char* key) {
    if (!j.contains(key) || j.at(key).is_null()) return std::nullopt;
    return j.at(key).get<double>();
}

}  // namespace

const std::vector<std::string>& result_fields() {
    static const std::vector<std::string> f{"sweep_value", "policy", "analytic_hit", "simulated_hit",
                                           "stderr", "objective_gap", "backhaul_latency_ms"};
    return f;
}

std::string format_csv_number(double v) {
    if (std::isnan(v)) return "nan";
    char buf[64];
    const auto res = std::to_chars(buf, buf + sizeof buf, v, std::chars_format::general, 12);
    return std::string(buf, res.ptr);
}

std::string results_to_csv(const std::vector<ResultRow>& rows) {
    std::string out;
    const auto& fields = result_fields();
    for (std::size_t i = 0; i < fields.size(); ++i) out += (i ? "," : "") + fields[i];
    out += "\r\n";
    for (const ResultRow& r : rows) {
        out += csv_opt(r.sweep_value) + "," + csv_field(r.policy) + "," + format_csv_number(r.analytic_hit) + "," +
               csv_opt(r.simulated_hit) + "," + csv_opt(r.std_error) + "," + csv_opt(r.objective_gap) + "," +
               csv_opt(r.backhaul_latency_ms) + "\r\n";
    }
    return out;
}

std::string results_to_json(const std::vector<ResultRow>& rows) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const ResultRow& r : rows) {
        nlohmann::ordered_json o;
        o["sweep_value"] = json_opt(r.sweep_value);
        o["policy"] = r.policy;
        o["analytic_hit"] = r.analytic_hit;
        o["simulated_hit"] = json_opt(r.simulated_hit);
        o["stderr"] = json_opt(r.std_error);
        o["objective_gap"] = json_opt(r.objective_gap);
        o["backhaul_latency_ms"] = json_opt(r.backhaul_latency_ms);
        arr.push_back(std::move(o));
    }
    return arr.dump(2) + "\n";
}

std::vector<ResultRow> results_from_json(const std::string& text) {
    const nlohmann::json arr = nlohmann::json::parse(text);
    if (!arr.is_array()) throw std::invalid_argument("results JSON: expected an array");
    std::vector<ResultRow> rows;
    for (const auto& o : arr) {
        ResultRow r;
        r.sweep_value = opt_from(o, "sweep_value");
        r.policy = o.at("policy").get<std::string>();
        r.analytic_hit = o.at("analytic_hit").get<double>();
        r.simulated_hit = opt_from(o, "simulated_hit");
        r.std_error = opt_from(o, "stderr");
        r.objective_gap = opt_from(o, "objective_gap");
        r.backhaul_latency_ms = opt_from(o, "backhaul_latency_ms");
        rows.push_back(std::move(r));
    }
    return rows;
}

std::string placements_to_csv(const std::vector<std::pair<std::string, PlacementMatrix>>& placements) {
    std::string out = "policy,file,tier,p\r\n";
    for (const auto& [name, p] : placements)
        for (std::size_t m = 0; m < p.files(); ++m)
            for (std::size_t k = 0; k < p.tiers(); ++k)
                out += csv_field(name) + "," + std::to_string(m + 1) + "," + std::to_string(k + 1) + "," +
                       format_csv_number(p(m, k)) + "\r\n";
    return out;
}

std::string placements_to_json(const std::vector<std::pair<std::string, PlacementMatrix>>& placements) {
    nlohmann::ordered_json arr = nlohmann::ordered_json::array();
    for (const auto& [name, p] : placements) {
        nlohmann::ordered_json rows = nlohmann::ordered_json::array();
        for (std::size_t m = 0; m < p.files(); ++m) {
            const auto r = p.row(m);
            rows.push_back(std::vector<double>(r.begin(), r.end()));
        }
        arr.push_back({{"policy", name}, {"placement", std::move(rows)}});
    }
    return arr.dump(2) + "\n";
}

void write_text(const std::string& text, const std::string& path) {
    if (path.empty() || path == "-") {
        std::cout << text << std::flush;
        if (!std::cout) throw std::runtime_error("failed writing to stdout");
        return;
    }
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw std::runtime_error("cannot open output file '" + path + "'");
    out << text;
    out.close();
    if (!out) throw std::runtime_error("failed writing output file '" + path + "'");
}

void emit_results(const std::vector<ResultRow>& rows, OutputFormat format, const std::string& path) {
    write_text(format == OutputFormat::Csv ? results_to_csv(rows) : results_to_json(rows), path);
}

}  // namespace hetcache
