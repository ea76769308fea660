#pragma once

#include <string>
#include <utility>
#include <vector>

namespace sptc {

/// Line-delimited JSON logging on the diagnostic stream. Off by default so
/// library users and tests stay quiet; the CLI enables it.
void set_log_enabled(bool enabled);
bool log_enabled();

using LogFields = std::vector<std::pair<std::string, std::string>>;

void log_info(const std::string& event, const LogFields& fields = {});
void log_warn(const std::string& event, const LogFields& fields = {});

/// Errors always print (single structured line), independent of the toggle.
void log_error(const std::string& code, const std::string& message);

}  // namespace sptc
