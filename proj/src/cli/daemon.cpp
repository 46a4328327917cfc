#include "gfcx/cli/daemon.hpp"

#include <cerrno>
#include <chrono>
#include <cstring>

#include <arpa/inet.h>
#include <netinet/in.h>
#include <netinet/tcp.h>
#include <sys/socket.h>
#include <unistd.h>

#include <httplib.h>

#include "gfcx/cli/transport.hpp"
#include "gfcx/core/error.hpp"
#include "gfcx/node/api.hpp"

namespace gfcx::cli {

namespace {

int listen_on(const std::string& host, std::uint16_t port, std::uint16_t& bound)
{
    const int fd = ::socket(AF_INET, SOCK_STREAM, 0);
    if (fd < 0)
        throw Error(Errc::Transport, std::string("socket: ") + std::strerror(errno));
    const int one = 1;
    ::setsockopt(fd, SOL_SOCKET, SO_REUSEADDR, &one, sizeof one);
    sockaddr_in addr{};
    addr.sin_family = AF_INET;
    addr.sin_port = htons(port);
    if (::inet_pton(AF_INET, host.c_str(), &addr.sin_addr) != 1) {
        ::close(fd);
        throw Error(Errc::Validation, "listen host must be an IPv4 address: " + host);
    }
    if (::bind(fd, reinterpret_cast<sockaddr*>(&addr), sizeof addr) != 0 || ::listen(fd, 16) != 0) {
        const std::string why = std::strerror(errno);
        ::close(fd);
        throw Error(Errc::Transport, "cannot listen on " + host + ":" + std::to_string(port) + ": " + why);
    }
    socklen_t len = sizeof addr;
    ::getsockname(fd, reinterpret_cast<sockaddr*>(&addr), &len);
    bound = ntohs(addr.sin_port);
    return fd;
}

} // namespace

Daemon::Daemon(DaemonOptions options)
    : options_(std::move(options))
    , world_(options_.world)
{
    for (const auto& n : options_.nodes)
        world_.add_node(n);
}

Daemon::~Daemon()
{
    stop();
}

void Daemon::start()
{
    if (running_)
        return;
    for (std::size_t i = 0; i < options_.nodes.size(); ++i) {
        auto l = std::make_unique<Listener>();
        l->node = options_.nodes[i];
        const auto want = options_.base_port == 0 ? 0 : static_cast<std::uint16_t>(options_.base_port + i);
        l->fd = listen_on(options_.host, want, l->port);
        listeners_.push_back(std::move(l));
    }
    if (options_.http_port >= 0) {
        http_ = std::make_unique<httplib::Server>();
        http_->Post(R"(/api/([A-Za-z0-9_.-]+))", [this](const httplib::Request& req, httplib::Response& res) {
            const auto name = req.matches[1].str();
            res.set_content(handle(name, req.body), "application/octet-stream");
        });
        http_->Get("/api/nodes", [this](const httplib::Request&, httplib::Response& res) {
            std::string body;
            for (const auto& n : options_.nodes)
                body += "NODE|" + n + "\n";
            res.set_content(body, "text/plain");
        });
        if (!options_.webui_dir.empty())
            http_->set_mount_point("/", options_.webui_dir.string());
        int port = options_.http_port;
        if (port == 0)
            port = http_->bind_to_any_port(options_.host);
        else if (!http_->bind_to_port(options_.host, port))
            port = -1;
        if (port < 0)
            throw Error(Errc::Transport, "cannot bind HTTP bridge on port " + std::to_string(options_.http_port));
        http_bound_ = static_cast<std::uint16_t>(port);
        http_thread_ = std::thread([this] { http_->listen_after_bind(); });
    }
    running_ = true;
    for (auto& l : listeners_)
        l->thread = std::thread([this, lp = l.get()] { accept_loop(*lp); });
    ticker_ = std::thread([this] { tick_loop(); });
}

void Daemon::stop()
{
    if (!running_.exchange(false))
        return;
    for (auto& l : listeners_)
        ::shutdown(l->fd, SHUT_RDWR);
    for (auto& l : listeners_) {
        if (l->thread.joinable())
            l->thread.join();
        ::close(l->fd);
    }
    listeners_.clear();
    {
        std::lock_guard lock(conn_mutex_);
        for (auto& [fd, t] : connections_)
            ::shutdown(fd, SHUT_RDWR);
    }
    for (;;) {
        std::thread t;
        {
            std::lock_guard lock(conn_mutex_);
            if (!finished_.empty()) {
                t = std::move(finished_.back());
                finished_.pop_back();
            } else if (connections_.empty()) {
                break;
            }
        }
        if (t.joinable())
            t.join();
        else
            std::this_thread::sleep_for(std::chrono::milliseconds(1));
    }
    if (http_) {
        http_->stop();
        if (http_thread_.joinable())
            http_thread_.join();
        http_.reset();
    }
    if (ticker_.joinable())
        ticker_.join();
}

std::uint16_t Daemon::port_of(const std::string& name) const
{
    for (const auto& l : listeners_)
        if (l->node == name)
            return l->port;
    throw Error(Errc::NotFound, "no node " + name);
}

std::filesystem::path Daemon::token_path(const std::string& name) const
{
    return world_.node_dir(name) / "token";
}

std::string Daemon::handle(const std::string& name, const std::string& frame)
{
    std::lock_guard lock(mutex_);
    if (!world_.has_node(name))
        return node::encode_api_error(Errc::NotFound, "no node " + name);
    return world_.node(name).local_api(frame);
}

void Daemon::accept_loop(Listener& l)
{
    while (running_) {
        const int fd = ::accept(l.fd, nullptr, nullptr);
        if (fd < 0) {
            if (errno == EINTR)
                continue;
            return;
        }
        const int one = 1;
        ::setsockopt(fd, IPPROTO_TCP, TCP_NODELAY, &one, sizeof one);
        std::lock_guard lock(conn_mutex_);
        // reap threads whose connections already closed
        for (auto& t : finished_)
            t.join();
        finished_.clear();
        connections_.emplace(fd, std::thread([this, fd, name = l.node] { serve_connection(fd, name); }));
    }
}

void Daemon::serve_connection(int fd, std::string name)
{
    try {
        while (running_) {
            const auto frame = read_frame(fd);
            if (!frame)
                break;
            if (!write_all(fd, handle(name, *frame)))
                break;
        }
    } catch (const Error& e) {
        // a bad header: answer once, then drop the connection
        write_all(fd, node::encode_api_error(e.code(), e.detail()));
    }
    ::close(fd);
    std::lock_guard lock(conn_mutex_);
    auto it = connections_.find(fd);
    if (it != connections_.end()) {
        finished_.push_back(std::move(it->second));
        connections_.erase(it);
    }
}

void Daemon::tick_loop()
{
    using clock = std::chrono::steady_clock;
    auto last = clock::now();
    while (running_) {
        std::this_thread::sleep_for(std::chrono::milliseconds(options_.tick_ms));
        const auto now = clock::now();
        const auto ms = std::chrono::duration_cast<std::chrono::milliseconds>(now - last).count();
        if (ms <= 0)
            continue;
        last += std::chrono::milliseconds(ms);
        std::lock_guard lock(mutex_);
        world_.run_for(ms);
    }
}

} // namespace gfcx::cli
