#include "cli_support.hpp"

#include <cmath>
#include <filesystem>
#include <iostream>
#include <numbers>
#include <sstream>

#include "weyl_lab/numerics.hpp"

namespace weyl_lab::cli {

nlohmann::json RunConfig::to_json() const {
    return {{"seed", seed}, {"threads", threads}, {"form", form}, {"format", format}};
}

void Table::add(std::vector<nlohmann::json> row) {
    if (row.size() != columns.size()) throw std::logic_error("row width does not match the header of " + name);
    rows.push_back(std::move(row));
}

std::string format_cell(const nlohmann::json& cell) {
    if (cell.is_number_integer() || cell.is_number_unsigned()) return cell.dump();
    if (cell.is_number()) return format_double(cell.get<double>());
    if (cell.is_boolean()) return cell.get<bool>() ? "true" : "false";
    if (cell.is_null()) return "";
    std::string s = cell.is_string() ? cell.get<std::string>() : cell.dump();
    if (s.find_first_of(",\"\n") == std::string::npos) return s;
    std::string quoted = "\"";
    for (char c : s) {
        if (c == '"') quoted += '"';
        quoted += c;
    }
    return quoted + "\"";
}

std::string Table::csv() const {
    std::ostringstream os;
    for (std::size_t i = 0; i < columns.size(); ++i) os << (i ? "," : "") << columns[i];
    os << '\n';
    for (const auto& row : rows) {
        for (std::size_t i = 0; i < row.size(); ++i) os << (i ? "," : "") << format_cell(row[i]);
        os << '\n';
    }
    return os.str();
}

nlohmann::json Table::to_json() const {
    nlohmann::json rows_json = nlohmann::json::array();
    for (const auto& row : rows) rows_json.push_back(row);
    return {{"columns", columns}, {"rows", rows_json}};
}

namespace {

void write_output(const std::string& path, const std::string& content) {
    if (path.empty() || path == "-") {
        std::cout << content;
        std::cout.flush();
    } else {
        write_file_atomic(path, content);
    }
}

std::string sibling_path(const std::string& path, const std::string& table) {
    const std::filesystem::path p(path);
    return (p.parent_path() / (p.stem().string() + "_" + table + p.extension().string())).string();
}

}  // namespace

void emit(const Report& report, const RunConfig& cfg) {
    if (cfg.format == "json") {
        nlohmann::ordered_json j;
        j["schema_version"] = kSchemaVersion;
        j["command"] = report.command;
        j["config"] = cfg.to_json();
        j["parameters"] = report.parameters;
        nlohmann::ordered_json tables = nlohmann::ordered_json::object();
        for (const auto& t : report.tables) tables[t.name] = t.to_json();
        j["tables"] = tables;
        j["summary"] = report.summary;
        write_output(cfg.out, j.dump(2) + "\n");
        return;
    }
    if (cfg.out.empty() || cfg.out == "-") {
        std::string all;
        for (std::size_t i = 0; i < report.tables.size(); ++i) all += (i ? "\n" : "") + report.tables[i].csv();
        write_output("", all);
        return;
    }
    for (std::size_t i = 0; i < report.tables.size(); ++i)
        write_output(i == 0 ? cfg.out : sibling_path(cfg.out, report.tables[i].name), report.tables[i].csv());
}

double parse_real(const std::string& raw) {
    std::string text;
    for (char c : raw)
        if (!std::isspace(static_cast<unsigned char>(c))) text += c;
    if (text.empty()) throw UsageError("empty number");
    auto number = [&](const std::string& s) {
        std::size_t used = 0;
        double v = 0;
        try {
            v = std::stod(s, &used);
        } catch (const std::exception&) {
            throw UsageError("not a number: " + raw);
        }
        if (used != s.size() || !std::isfinite(v)) throw UsageError("not a number: " + raw);
        return v;
    };
    const auto pos = text.find("pi");
    if (pos == std::string::npos) return number(text);
    const std::string head = text.substr(0, pos), tail = text.substr(pos + 2);
    double v = std::numbers::pi;
    if (!head.empty()) v *= head == "-" ? -1.0 : number(head.back() == '*' ? head.substr(0, head.size() - 1) : head);
    if (!tail.empty()) {
        if (tail[0] != '/') throw UsageError("not a number: " + raw);
        v /= number(tail.substr(1));
    }
    return v;
}

std::vector<double> parse_real_list(const std::string& text) {
    std::vector<double> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) out.push_back(parse_real(item));
    return out;
}

std::vector<int> parse_int_list(const std::string& text) {
    std::vector<int> out;
    for (double v : parse_real_list(text)) {
        if (v != std::floor(v) || std::abs(v) > 1e9) throw UsageError("not an integer list: " + text);
        out.push_back(static_cast<int>(v));
    }
    return out;
}

std::vector<double> uniform_grid(double hi, double step) {
    if (!(step > 0) || !(hi >= 0) || !std::isfinite(hi)) throw UsageError("the grid needs step > 0 and a non-negative end");
    const long count = static_cast<long>(std::floor(hi / step + 1e-9)) + 1;
    if (count > 10000000) throw UsageError("grid too large");
    std::vector<double> out;
    for (long i = 0; i < count; ++i) out.push_back(static_cast<double>(i) * step);
    return out;
}

}  // namespace weyl_lab::cli
