#pragma once

#include <cstdint>
#include <memory>
#include <optional>
#include <string>

namespace gfcx::cli {

/// How the CLI reaches a node: one request frame in, one reply frame out.
class Transport {
public:
    virtual ~Transport() = default;
    /// Throws Error{Transport} when the node cannot be reached.
    virtual std::string roundtrip(const std::string& frame) = 0;
    /// Lets `ms` of node time pass while polling an operation.
    virtual void pause(std::int64_t ms) = 0;
};

/// "host:port" or just "port" (loopback). Throws Error{Validation} on a bad address.
struct Address {
    std::string host = "127.0.0.1";
    std::uint16_t port = 0;
};
Address parse_address(const std::string& text);

std::unique_ptr<Transport> tcp_transport(const std::string& address);

// Blocking helpers for frame-at-a-time sockets, shared with the daemon.
bool write_all(int fd, const std::string& bytes);
/// Reads one whole frame. nullopt on clean EOF before any byte; throws
/// Error{Transport} on a short read and frame errors on a bad header.
std::optional<std::string> read_frame(int fd);

} // namespace gfcx::cli
