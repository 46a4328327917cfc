#pragma once

#include <atomic>
#include <cstdint>
#include <filesystem>
#include <map>
#include <memory>
#include <mutex>
#include <optional>
#include <string>
#include <thread>
#include <vector>

#include "gfcx/node/world.hpp"

namespace httplib {
class Server;
}

namespace gfcx::cli {

struct DaemonOptions {
    node::WorldOptions world;
    std::vector<std::string> nodes;
    std::string host = "127.0.0.1";
    /// Node i listens on base_port + i; 0 picks ephemeral ports.
    std::uint16_t base_port = 7400;
    /// -1 disables the HTTP bridge, 0 picks an ephemeral port.
    int http_port = -1;
    /// Static web client assets served at / by the HTTP bridge.
    std::filesystem::path webui_dir;
    /// Network time advances with wall time in steps of this size.
    std::int64_t tick_ms = 10;
};

/// Hosts a World (registry plus named nodes) in real time and serves each
/// node's local API on its own loopback socket, one frame in, one frame out.
class Daemon {
public:
    explicit Daemon(DaemonOptions options);
    ~Daemon();
    Daemon(const Daemon&) = delete;
    Daemon& operator=(const Daemon&) = delete;

    /// Binds every socket and starts the ticker. Throws Error{Transport} on bind failure.
    void start();
    void stop();

    std::uint16_t port_of(const std::string& name) const;
    std::optional<std::uint16_t> http_port() const { return http_bound_; }
    std::filesystem::path token_path(const std::string& name) const;

    /// One API frame for `name`, serialized with the ticker.
    std::string handle(const std::string& name, const std::string& frame);

    template <class F>
    auto with_world(F&& f)
    {
        std::lock_guard lock(mutex_);
        return f(world_);
    }

private:
    struct Listener {
        std::string node;
        int fd = -1;
        std::uint16_t port = 0;
        std::thread thread;
    };
    void accept_loop(Listener& l);
    void serve_connection(int fd, std::string node);
    void tick_loop();

    DaemonOptions options_;
    std::mutex mutex_; // world and every node in it
    node::World world_;
    std::vector<std::unique_ptr<Listener>> listeners_;

    std::mutex conn_mutex_;
    std::map<int, std::thread> connections_;
    std::vector<std::thread> finished_;

    std::unique_ptr<httplib::Server> http_;
    std::thread http_thread_;
    std::optional<std::uint16_t> http_bound_;

    std::atomic<bool> running_{false};
    std::thread ticker_;
};

} // namespace gfcx::cli
