#pragma once

#include <functional>
#include <iosfwd>
#include <memory>
#include <optional>
#include <string>
#include <vector>

#include "gfcx/cli/transport.hpp"
#include "gfcx/core/error.hpp"

namespace gfcx::cli {

inline constexpr const char* kDefaultNode = "127.0.0.1:7400";

struct Environment {
    std::optional<std::string> node;  // GFCX_NODE
    std::optional<std::string> token; // GFCX_TOKEN, a path
    static Environment from_process();
};

using TransportFactory = std::function<std::unique_ptr<Transport>(const std::string& address)>;

/// 0 ok, 1 validation/usage/domain errors, 2 transport-level failures.
int exit_code_for(Errc code) noexcept;

/// `args` excludes the program name. Errors go to `err` as one
/// `ERROR|<code>|<detail>` line.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err,
        const TransportFactory& connect = tcp_transport, const Environment& env = Environment::from_process());

} // namespace gfcx::cli
