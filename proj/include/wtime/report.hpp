#pragma once

#include <string>
#include <vector>

#include <json.hpp>

#include "wtime/verification.hpp"

namespace wtime {

/**
 * Collection of residual records from one run.
 *
 * Records are kept sorted by name (stable, so repeated names keep insertion
 * order). `metadata` holds run-dependent fields such as the timestamp and is
 * the only part allowed to differ between two runs of the same config.
 */
struct VerificationReport {
    nlohmann::json run = nlohmann::json::object();
    std::vector<ResidualRecord> records;
    nlohmann::json details = nlohmann::json::object();
    nlohmann::json metadata = nlohmann::json::object();

    void add(ResidualRecord record);
    bool all_passed() const;
    const ResidualRecord* find(const std::string& name) const;

    nlohmann::json to_json() const;
    std::string to_text() const;
};

/// UTC ISO-8601 timestamp for report metadata.
std::string utc_timestamp();

}  // namespace wtime
