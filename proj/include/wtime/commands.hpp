#pragma once

#include <iosfwd>
#include <string>
#include <vector>

#include "wtime/config.hpp"
#include "wtime/report.hpp"

namespace wtime {

// Exit-status contract of every subcommand.
inline constexpr int kExitOk = 0;
inline constexpr int kExitCheckFailed = 1;
inline constexpr int kExitConfig = 2;
inline constexpr int kExitIo = 3;

/// Check names accepted by `checks`, in report order.
const std::vector<std::string>& all_check_names();

/// Runs the enabled checks in memory. Throws Error(Config) for an unknown check name.
VerificationReport run_verification(const RunConfig& cfg, const ResolvedConfig& resolved);

int cmd_validate(const RunConfig& cfg, std::ostream& log);
int cmd_verify(const RunConfig& cfg, std::ostream& log);
int cmd_propagate(const RunConfig& cfg, std::ostream& log);
int cmd_export_matrix(const RunConfig& cfg, std::ostream& log);

}  // namespace wtime
