#pragma once

#include <cstdint>
#include <filesystem>
#include <functional>
#include <map>
#include <memory>
#include <optional>
#include <random>
#include <string>
#include <vector>

#include "gfcx/exchange/requester.hpp"
#include "gfcx/exchange/responder.hpp"
#include "gfcx/exchange/room.hpp"
#include "gfcx/netsim/simulator.hpp"
#include "gfcx/node/api.hpp"
#include "gfcx/node/contact_store.hpp"
#include "gfcx/node/policy.hpp"
#include "gfcx/node/profile_store.hpp"
#include "gfcx/registry/client.hpp"

namespace gfcx::node {

struct NodeOptions {
    std::filesystem::path dir;
    std::uint64_t seed = std::random_device{}();
    /// Wall-clock milliseconds at simulator time 0.
    std::int64_t epoch_ms = 0;
    std::int64_t approval_timeout_ms = 120'000;
    exchange::RetryPolicy retry;
    /// A fresh bearer token is written at construction (daemon start).
    bool fresh_token = true;
};

struct PendingApproval {
    enum class State : std::uint8_t { Waiting, Approved, Refused };
    Id128 request_id;
    netsim::EndpointId from;
    std::optional<GcCode> requester_code;
    std::int64_t arrived_at_ms = 0;
    State state = State::Waiting;
    std::optional<Id128> profile_id; // the rule's profile, or the one approved
    TransportClass transport = TransportClass::WideArea;
};

std::string_view approval_state_name(PendingApproval::State s) noexcept;

/// Long-running network action started through the API and polled with OP_STATUS.
struct Operation {
    enum class State : std::uint8_t { Running, Done, Failed };
    std::uint64_t op_id = 0;
    std::string kind;
    State state = State::Running;
    ApiDoc result;
    Errc error = Errc::Io;
    std::string detail;
};

std::string_view op_state_name(Operation::State s) noexcept;

/// What the responder side did with one inbound REQUEST (for policy audits).
struct SendRecord {
    Id128 request_id;
    std::optional<GcCode> requester_code;
    Decision decision;
    std::optional<Id128> sent_profile; // profile actually transmitted, if any
    bool deferred = false;
};

/// The per-user daemon core: profile and contact stores, auto-send policy,
/// registry client, exchange requester/responder, rooms and the local API.
///
/// Not internally synchronized against the simulator: callers must not run
/// local_api concurrently with Simulator::advance (the daemon holds one lock
/// around both). The stores themselves are single-writer/multi-reader.
class Node : public netsim::Handler {
public:
    Node(netsim::Simulator& sim, netsim::EndpointId registry, NodeOptions options,
         std::uint8_t reachability = netsim::kReachAll);
    ~Node() override;
    Node(const Node&) = delete;
    Node& operator=(const Node&) = delete;

    /// Handles one request frame and returns the reply frame. Never throws.
    std::string local_api(std::string_view request_bytes);

    const std::string& token() const noexcept { return token_; }
    netsim::Endpoint endpoint() const noexcept { return self_; }
    std::optional<GcCode> own_code() const;
    std::int64_t now_ms() const noexcept;

    ProfileStore& profiles() noexcept { return profiles_; }
    const ContactStore& contacts() const noexcept { return contacts_; }
    const std::vector<PolicyRule>& policy() const noexcept { return policy_; }
    Decision decide(const std::optional<GcCode>& requester) const;
    const std::vector<SendRecord>& send_log() const noexcept { return send_log_; }
    const Operation* operation(std::uint64_t op_id) const;

    void on_frame(const netsim::Delivery& d) override;
    void on_timer(std::uint64_t tag, std::int64_t now_ms) override;

private:
    // identity.cfg:  ACTIVE|<code>|<phone>  and/or  PENDING|<code>|<phone>|<challenge>|<expires>
    struct Identity {
        std::optional<GcCode> active_code;
        std::optional<PhoneNumber> active_phone;
        std::optional<GcCode> pending_code;
        std::optional<PhoneNumber> pending_phone;
        Id128 challenge_id;
        Timestamp expires_at = 0;
    };
    struct HostedRoom {
        std::optional<Id128> profile_id;
    };
    struct JoinedRoom {
        netsim::EndpointId host;
        GcCode host_code;
        std::uint32_t last_seq = 0;
        std::size_t received = 0;
    };
    struct PendingJoin {
        std::uint64_t op_id;
        int sends = 0;
        std::uint64_t tag;
    };

    ApiDoc dispatch(const ApiRequest& req);
    ApiDoc api_profile_create(const ApiDoc& in);
    ApiDoc api_profile_update(const ApiDoc& in);
    ApiDoc api_policy_set(const ApiDoc& in);
    ApiDoc api_code_register(const ApiDoc& in);
    ApiDoc api_code_verify(const ApiDoc& in);
    ApiDoc api_code_revoke(const ApiDoc& in);
    ApiDoc api_exchange(const ApiDoc& in);
    ApiDoc api_approve(const ApiDoc& in, bool approve);
    ApiDoc api_room_host(const ApiDoc& in);
    ApiDoc api_room_join(const ApiDoc& in);
    ApiDoc api_room_cast(const ApiDoc& in);
    ApiDoc api_room_status(const ApiDoc& in);
    ApiDoc api_search(const ApiDoc& in);
    ApiDoc api_reg_call(const ApiDoc& in, std::uint8_t type);

    Operation& new_op(std::string kind);
    void finish_op(std::uint64_t op_id, ApiDoc result);
    void fail_op(std::uint64_t op_id, Errc code, std::string detail);

    void on_registry_result(const registry::RegistryClient::Result& r);
    void on_exchange_outcome(const exchange::Requester::Outcome& o);
    void on_request(const netsim::Delivery& d, const exchange::Request& req);
    void send_frame(netsim::EndpointId to, TransportClass t, std::string bytes);
    void resolve_approval(PendingApproval& p, bool approve, std::optional<Id128> profile);

    Profile profile_or_throw(const ApiDoc& in);
    std::optional<Id128> default_profile() const;
    void save_policy();
    void save_identity();
    void load_identity();
    void start_request(std::uint64_t op_id, netsim::EndpointId peer, const GcCode& target, TransportClass t);
    exchange::Outbox outbox();

    netsim::Simulator& sim_;
    netsim::EndpointId registry_ep_;
    NodeOptions options_;
    netsim::Endpoint self_;
    std::mt19937_64 rng_;
    std::string token_;
    ProfileStore profiles_;
    ContactStore contacts_;
    std::vector<PolicyRule> policy_;
    Identity identity_;

    std::unique_ptr<exchange::Requester> requester_;
    exchange::Responder responder_;
    std::unique_ptr<registry::RegistryClient> registry_;
    exchange::RoomHost rooms_;

    std::map<std::uint64_t, Operation> ops_;
    std::uint64_t next_op_ = 1;
    std::map<std::uint32_t, std::uint64_t> op_by_txn_;
    std::map<std::uint32_t, GcCode> resolve_target_; // txn -> exchange target
    std::map<Id128, std::uint64_t> op_by_request_;

    std::map<Id128, PendingApproval> approvals_;
    std::map<std::uint64_t, Id128> approval_timer_;
    std::uint64_t next_tag_ = 0;

    std::map<Id128, HostedRoom> hosted_;
    std::map<Id128, JoinedRoom> joined_;
    std::map<Id128, PendingJoin> joining_;
    std::map<std::uint64_t, Id128> join_timer_;

    std::vector<SendRecord> send_log_;
};

} // namespace gfcx::node
