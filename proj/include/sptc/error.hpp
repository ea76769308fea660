#pragma once

#include <stdexcept>
#include <string>

namespace sptc {

// Exit-code discipline: 0 success, 2 config error, 3 data error,
// 4 training divergence.
struct ConfigError : std::runtime_error {
    explicit ConfigError(const std::string& msg) : std::runtime_error(msg) {}
    static constexpr int exit_code = 2;
};

struct DataError : std::runtime_error {
    explicit DataError(const std::string& msg) : std::runtime_error(msg) {}
    static constexpr int exit_code = 3;
};

struct TrainDivergence : std::runtime_error {
    explicit TrainDivergence(const std::string& msg) : std::runtime_error(msg) {}
    static constexpr int exit_code = 4;
};

}  // namespace sptc
