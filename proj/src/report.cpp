#include "wtime/report.hpp"

#include <algorithm>
#include <chrono>
#include <cstdio>
#include <ctime>
#include <iomanip>
#include <sstream>

namespace wtime {

void VerificationReport::add(ResidualRecord record) {
    auto pos = std::upper_bound(records.begin(), records.end(), record.name,
                                [](const std::string& name, const ResidualRecord& r) { return name < r.name; });
    records.insert(pos, std::move(record));
}

bool VerificationReport::all_passed() const {
    return std::all_of(records.begin(), records.end(), [](const ResidualRecord& r) { return r.passed; });
}

const ResidualRecord* VerificationReport::find(const std::string& name) const {
    auto it = std::find_if(records.begin(), records.end(), [&](const ResidualRecord& r) { return r.name == name; });
    return it == records.end() ? nullptr : &*it;
}

nlohmann::json VerificationReport::to_json() const {
    nlohmann::json recs = nlohmann::json::array();
    for (const auto& r : records) recs.push_back(wtime::to_json(r));
    return {{"run", run}, {"records", recs}, {"details", details}, {"all_passed", all_passed()},
            {"metadata", metadata}};
}

std::string VerificationReport::to_text() const {
    std::size_t width = 5;
    for (const auto& r : records) width = std::max(width, r.name.size());
    std::ostringstream out;
    out << std::left << std::setw(static_cast<int>(width)) << "check" << "  " << std::right << std::setw(12)
        << "value" << "  " << std::setw(12) << "tolerance" << "  status\n";
    out << std::string(width + 36, '-') << '\n';
    char value[32];
    char tol[32];
    for (const auto& r : records) {
        std::snprintf(value, sizeof value, "%12.4e", r.value);
        std::snprintf(tol, sizeof tol, "%12.4e", r.tolerance);
        out << std::left << std::setw(static_cast<int>(width)) << r.name << "  " << value << "  " << tol << "  "
            << (r.passed ? "PASS" : "FAIL") << '\n';
    }
    out << std::string(width + 36, '-') << '\n';
    out << (all_passed() ? "all checks passed" : "some checks FAILED") << " (" << records.size() << " records)\n";
    return out.str();
}

std::string utc_timestamp() {
    const std::time_t now = std::chrono::system_clock::to_time_t(std::chrono::system_clock::now());
    std::tm tm{};
    gmtime_r(&now, &tm);
    char buf[32];
    std::strftime(buf, sizeof buf, "%Y-%m-%dT%H:%M:%SZ", &tm);
    return buf;
}

}  // namespace wtime
