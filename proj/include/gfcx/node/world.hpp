#pragma once

#include <filesystem>
#include <map>
#include <memory>
#include <optional>
#include <string>

#include "gfcx/netsim/simulator.hpp"
#include "gfcx/node/node.hpp"
#include "gfcx/registry/registry.hpp"
#include "gfcx/registry/service.hpp"

namespace gfcx::node {

struct WorldOptions {
    netsim::NetConfig net;
    /// Holds registry.log, sms.log and nodes/<name>/.
    std::filesystem::path state_dir;
    std::uint64_t seed = 1;
    std::int64_t epoch_ms = 0;
    /// Put every node in one shared proximity group (one physical room).
    bool colocate = true;
    bool persist_registry = true;
};

/// A simulated network with one registry and any number of named nodes.
/// Single-threaded like the simulator it wraps.
class World {
public:
    explicit World(WorldOptions options);
    ~World();

    Node& add_node(const std::string& name, std::uint8_t reachability = netsim::kReachAll);
    Node& node(const std::string& name);
    bool has_node(const std::string& name) const { return nodes_.count(name) != 0; }
    std::vector<std::string> node_names() const;

    netsim::Simulator& sim() noexcept { return sim_; }
    registry::Registry& registry() noexcept { return *registry_; }
    registry::SmsInbox& inbox() noexcept { return inbox_; }
    std::filesystem::path node_dir(const std::string& name) const;

    /// Advances network time by `ms`.
    void run_for(std::int64_t ms);

    /// Encodes, dispatches and decodes one local API call on `name`.
    ApiReply call(const std::string& name, std::uint8_t type, const ApiDoc& body = {});
    /// Polls OP_STATUS, advancing time in 50 ms steps, until the op leaves
    /// RUNNING or `limit_ms` of network time passes.
    ApiReply wait_op(const std::string& name, const ApiReply& started, std::int64_t limit_ms = 300'000);

    /// register + verify using the OTP from the inbox. Returns the final OP_STATUS reply.
    ApiReply register_code(const std::string& name, const std::string& code, const std::string& phone);

private:
    WorldOptions options_;
    netsim::Simulator sim_;
    registry::SmsInbox inbox_;
    std::unique_ptr<AppendFile> sms_log_;
    std::unique_ptr<registry::Registry> registry_;
    std::unique_ptr<registry::RegistryNode> registry_node_;
    std::map<std::string, std::unique_ptr<Node>> nodes_;
    std::uint64_t next_seed_;
};

/// Room key of the shared proximity group used when colocate is set.
Id128 hall_room();

} // namespace gfcx::node
