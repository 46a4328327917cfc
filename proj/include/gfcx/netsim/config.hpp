#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <string_view>

namespace gfcx::netsim {

struct LinkProfile {
    std::int64_t latency_min_ms = 0;
    std::int64_t latency_max_ms = 0;
    double loss_rate = 0.0;
};

/// Defaults: Proximity 5-50 ms / 1% loss, WideArea 80-300 ms / 0.5% loss.
struct NetConfig {
    std::uint64_t seed = 1;
    LinkProfile proximity{5, 50, 0.01};
    LinkProfile wide_area{80, 300, 0.005};

    /// Throws Error{InvalidConfig} unless 0 <= p <= 1 and 0 <= a <= b for both links.
    void validate() const;
};

/// `key = value` lines; '#' starts a comment. Keys:
///   seed
///   proximity.latency_min_ms   proximity.latency_max_ms   proximity.loss_rate
///   wide_area.latency_min_ms   wide_area.latency_max_ms   wide_area.loss_rate
/// Missing keys keep their defaults. Unknown keys are an error.
NetConfig parse_net_config(std::string_view text);
NetConfig load_net_config(const std::filesystem::path& path);
std::string format_net_config(const NetConfig& config);

} // namespace gfcx::netsim
