#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "gfcx/exchange/outbox.hpp"
#include "gfcx/netsim/simulator.hpp"
#include "gfcx/registry/registry.hpp"
#include "gfcx/registry/wire.hpp"

namespace gfcx::registry {

/// Wire front-end for a Registry. Replies are cached per (sender, txn) for
/// 60 s so a retried request gets the original answer instead of running twice.
class RegistryService {
public:
    /// epoch_s: wall-clock seconds corresponding to network time 0.
    RegistryService(Registry& registry, Timestamp epoch_s = 0);

    /// Returns the encoded reply, or nullopt for frames that are not registry
    /// requests (including undecodable ones that carry no usable txn).
    std::optional<std::string> handle(netsim::EndpointId from, netsim::Endpoint sender, std::string_view bytes,
                                      std::int64_t now_ms);

    Timestamp to_seconds(std::int64_t now_ms) const noexcept { return epoch_s_ + now_ms / 1000; }

private:
    RegMessage dispatch(const netsim::Endpoint& sender, const RegMessage& req, Timestamp now);

    struct Cached {
        std::string reply;
        std::int64_t at_ms;
    };

    Registry& registry_;
    Timestamp epoch_s_;
    std::map<std::pair<netsim::EndpointId, std::uint32_t>, Cached> replies_;
};

/// Hosts a RegistryService on a simulator endpoint; replies go back WideArea.
class RegistryNode : public netsim::Handler {
public:
    RegistryNode(netsim::Simulator& sim, Registry& registry, Timestamp epoch_s = 0);
    ~RegistryNode() override;

    netsim::Endpoint endpoint() const noexcept { return self_; }

    void on_frame(const netsim::Delivery& d) override;
    void on_timer(std::uint64_t, std::int64_t) override {}

private:
    netsim::Simulator& sim_;
    netsim::Endpoint self_;
    RegistryService service_;
};

} // namespace gfcx::registry
