#pragma once

// Output plumbing for the weyl-lab command-line tool: run configuration,
// tables rendered as CSV or JSON, atomic file output, list parsing and a
// deterministic parallel map.

#include <atomic>
#include <cstdint>
#include <functional>
#include <stdexcept>
#include <string>
#include <thread>
#include <vector>

#include "json.hpp"
#include "weyl_lab/rootsys.hpp"

namespace weyl_lab::cli {

// Exit codes.
constexpr int kExitOk = 0;
constexpr int kExitVerifyFailed = 1;
constexpr int kExitUsage = 2;
constexpr int kExitNumeric = 3;
constexpr int kExitSupport = 4;

constexpr int kSchemaVersion = 1;

// Invalid flag values detected after parsing (exit 2).
struct UsageError : std::invalid_argument {
    using std::invalid_argument::invalid_argument;
};

// Test-function support beyond the certified length-spectrum window (exit 4).
struct SupportViolation : std::runtime_error {
    using std::runtime_error::runtime_error;
};

struct RunConfig {
    std::uint64_t seed = 1;
    int threads = 1;
    std::string form = "killing";
    std::string format = "csv";
    std::string out;  // empty: standard output
    std::string constants;

    FormKind form_kind() const { return parse_form(form); }
    nlohmann::json to_json() const;
};

// Table cells are JSON numbers or strings.
struct Table {
    std::string name;
    std::vector<std::string> columns;
    std::vector<std::vector<nlohmann::json>> rows;

    void add(std::vector<nlohmann::json> row);
    std::string csv() const;
    nlohmann::json to_json() const;
};

struct Report {
    std::string command;
    nlohmann::json parameters = nlohmann::json::object();
    std::vector<Table> tables;
    nlohmann::json summary = nlohmann::json::object();
};

// Writes the report in the configured format. CSV: the first table goes to
// --out (or standard output), further tables to sibling files named
// <stem>_<table>.csv; on standard output tables are separated by a blank line.
// JSON: one object with schema_version, command, config, parameters, tables, summary.
void emit(const Report& report, const RunConfig& cfg);

std::string format_cell(const nlohmann::json& cell);

// Comma-separated lists; each entry may be a number or a multiple of pi ("4pi", "pi/2").
double parse_real(const std::string& text);
std::vector<double> parse_real_list(const std::string& text);
std::vector<int> parse_int_list(const std::string& text);

// 0, step, 2 step, ... up to hi (inclusive up to rounding).
std::vector<double> uniform_grid(double hi, double step);

// out[i] = f(i) for i < count, with the work spread over `threads` workers.
// Results depend only on i, never on the scheduling.
template <class T>
std::vector<T> parallel_map(std::size_t count, int threads, const std::function<T(std::size_t)>& f) {
    std::vector<T> out(count);
    const int workers = std::max(1, std::min<int>(threads, static_cast<int>(count)));
    if (workers == 1) {
        for (std::size_t i = 0; i < count; ++i) out[i] = f(i);
        return out;
    }
    std::atomic<std::size_t> next{0};
    std::exception_ptr error;
    std::atomic<bool> failed{false};
    auto work = [&] {
        for (std::size_t i = next++; i < count && !failed; i = next++) {
            try {
                out[i] = f(i);
            } catch (...) {
                if (!failed.exchange(true)) error = std::current_exception();
            }
        }
    };
    std::vector<std::thread> pool;
    for (int w = 0; w < workers; ++w) pool.emplace_back(work);
    for (auto& t : pool) t.join();
    if (error) std::rethrow_exception(error);
    return out;
}

}  // namespace weyl_lab::cli
