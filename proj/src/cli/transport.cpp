#include "gfcx/cli/transport.hpp"

#include <cerrno>
#include <charconv>
#include <chrono>
#include <cstring>
#include <thread>

#include <arpa/inet.h>
#include <netdb.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include "gfcx/core/error.hpp"
#include "gfcx/exchange/frame.hpp"

namespace gfcx::cli {

Address parse_address(const std::string& text)
{
    Address a;
    std::string_view port = text;
    if (const auto colon = text.rfind(':'); colon != std::string::npos) {
        a.host = text.substr(0, colon);
        port = std::string_view(text).substr(colon + 1);
        if (a.host.empty())
            throw Error(Errc::Validation, "empty host in node address '" + text + "'");
    }
    unsigned value = 0;
    const auto [p, ec] = std::from_chars(port.data(), port.data() + port.size(), value);
    if (ec != std::errc{} || p != port.data() + port.size() || value == 0 || value > 65535)
        throw Error(Errc::Validation, "bad port in node address '" + text + "'");
    a.port = static_cast<std::uint16_t>(value);
    return a;
}

bool write_all(int fd, const std::string& bytes)
{
    std::size_t off = 0;
    while (off < bytes.size()) {
        const auto n = ::send(fd, bytes.data() + off, bytes.size() - off, MSG_NOSIGNAL);
        if (n < 0 && errno == EINTR)
            continue;
        if (n <= 0)
            return false;
        off += static_cast<std::size_t>(n);
    }
    return true;
}

std::optional<std::string> read_frame(int fd)
{
    std::string buf;
    std::size_t want = 0;
    for (;;) {
        if (want == 0) {
            if (const auto n = exchange::peek_frame_length(buf))
                want = *n;
        }
        if (want != 0 && buf.size() >= want)
            return buf;
        char tmp[4096];
        const std::size_t ask = want == 0 ? 1 : std::min(sizeof tmp, want - buf.size());
        const auto n = ::recv(fd, tmp, ask, 0);
        if (n < 0 && errno == EINTR)
            continue;
        if (n <= 0) {
            if (buf.empty())
                return std::nullopt;
            throw Error(Errc::Transport, "connection closed mid-frame");
        }
        buf.append(tmp, static_cast<std::size_t>(n));
    }
}

namespace {

class TcpTransport : public Transport {
public:
    explicit TcpTransport(Address a)
        : address_(std::move(a))
    {
    }

    std::string roundtrip(const std::string& frame) override
    {
        addrinfo hints{};
        hints.ai_family = AF_UNSPEC;
        hints.ai_socktype = SOCK_STREAM;
        addrinfo* res = nullptr;
        const auto port = std::to_string(address_.port);
        if (const int rc = ::getaddrinfo(address_.host.c_str(), port.c_str(), &hints, &res); rc != 0)
            throw Error(Errc::Transport, address_.host + ": " + ::gai_strerror(rc));
        int fd = -1;
        for (auto* ai = res; ai; ai = ai->ai_next) {
            fd = ::socket(ai->ai_family, ai->ai_socktype, ai->ai_protocol);
            if (fd < 0)
                continue;
            if (::connect(fd, ai->ai_addr, ai->ai_addrlen) == 0)
                break;
            ::close(fd);
            fd = -1;
        }
        ::freeaddrinfo(res);
        if (fd < 0)
            throw Error(Errc::Transport, "cannot connect to " + address_.host + ":" + port + ": " + std::strerror(errno));
        const int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        try {
            if (!write_all(fd, frame))
                throw Error(Errc::Transport, "send failed");
            auto reply = read_frame(fd);
            ::close(fd);
            if (!reply)
                throw Error(Errc::Transport, "node closed the connection without replying");
            return *reply;
        } catch (...) {
            ::close(fd);
            throw;
        }
    }

    void pause(std::int64_t ms) override { std::this_thread::sleep_for(std::chrono::milliseconds(ms)); }

private:
    Address address_;
};

} // namespace

std::unique_ptr<Transport> tcp_transport(const std::string& address)
{
    return std::make_unique<TcpTransport>(parse_address(address));
}

} // namespace gfcx::cli
