#pragma once

#include <cstdint>
#include <map>
#include <optional>
#include <ostream>
#include <queue>
#include <random>
#include <set>
#include <string>
#include <unordered_map>
#include <vector>

#include "gfcx/core/id.hpp"
#include "gfcx/netsim/config.hpp"
#include "gfcx/netsim/endpoint.hpp"

namespace gfcx::netsim {

/// Identifies a proximity group ("a room" in the physical sense). Proximity
/// sends succeed only between endpoints sharing at least one group.
using RoomKey = Id128;

struct Delivery {
    std::uint64_t seq = 0;
    std::int64_t send_time_ms = 0;
    std::int64_t arrival_ms = 0;
    EndpointId from;
    EndpointId to;
    TransportClass transport = TransportClass::WideArea;
    std::string bytes;
};

struct TraceRecord {
    std::int64_t send_time_ms = 0;
    EndpointId from;
    EndpointId to;
    TransportClass transport = TransportClass::WideArea;
    std::optional<std::int64_t> arrival_ms; // nullopt: dropped
    std::string bytes;
};

struct SendResult {
    bool delivered = false;
    std::int64_t arrival_ms = 0;
};

class Handler {
public:
    virtual ~Handler() = default;
    virtual void on_frame(const Delivery& delivery) = 0;
    virtual void on_timer(std::uint64_t tag, std::int64_t now_ms) = 0;
};

/// Deterministic discrete-event network.
///
/// Random draws come from one std::mt19937_64 seeded with NetConfig::seed. Each
/// send consumes one draw u = (engine() >> 11) * 2^-53; the frame is dropped iff
/// u < loss_rate. A surviving frame consumes a second draw v the same way and
/// gets latency a + min(floor(v * (b - a + 1)), b - a). Arrival is then raised
/// to the previous arrival on the same directed pair so delivery stays FIFO.
///
/// Not thread-safe; one instance per thread.
class Simulator {
public:
    explicit Simulator(NetConfig config = {});

    const NetConfig& config() const noexcept { return config_; }
    /// Changes one link class from now on; the random stream is untouched.
    /// Throws Error{InvalidConfig}.
    void set_link(TransportClass transport, const LinkProfile& profile);
    const LinkProfile& link(TransportClass t) const noexcept;
    std::int64_t now_ms() const noexcept { return now_ms_; }

    Endpoint add_endpoint(std::uint8_t reachability = kReachAll);
    bool has_endpoint(EndpointId id) const;
    Endpoint endpoint(EndpointId id) const;

    /// Handlers receive on_frame/on_timer from inside advance(). Not owned.
    void attach(EndpointId id, Handler* handler);
    void detach(EndpointId id);

    void join_room(const RoomKey& room, EndpointId id);
    void leave_room(const RoomKey& room, EndpointId id);
    bool share_room(EndpointId a, EndpointId b) const;
    std::vector<EndpointId> room_members(const RoomKey& room) const;

    /// Short advertisement visible to proximity neighbours (device-name style).
    void advertise(EndpointId id, std::string label);
    std::vector<std::pair<EndpointId, std::string>> neighbours(EndpointId id) const;

    /// Throws Error{UnknownEndpoint|NotInRange}. Drops are silent (delivered=false).
    SendResult send(EndpointId from, EndpointId to, TransportClass transport, std::string bytes);

    void schedule_timer(EndpointId id, std::int64_t at_ms, std::uint64_t tag);

    /// Processes every event with time <= clock_ms in (time, scheduling order),
    /// including events scheduled by handlers during the call, then sets the clock.
    /// Returns the frames delivered, in delivery order.
    std::vector<Delivery> advance(std::int64_t clock_ms);

    /// Advances to the next pending event if it is at or before limit_ms.
    /// Returns false (and sets the clock to limit_ms) when there is none.
    bool step(std::int64_t limit_ms);

    std::optional<std::int64_t> next_event_ms() const;

    const std::vector<TraceRecord>& trace() const noexcept { return trace_; }
    /// send_time,from,to,class,arrival_time_or_DROP
    void write_trace_csv(std::ostream& out) const;
    void clear_trace() { trace_.clear(); }

private:
    struct Event {
        std::int64_t time_ms;
        std::uint64_t seq;
        bool is_timer;
        std::uint64_t tag;
        Delivery delivery;
    };
    struct Later {
        bool operator()(const Event& a, const Event& b) const noexcept
        {
            if (a.time_ms != b.time_ms)
                return a.time_ms > b.time_ms;
            return a.seq > b.seq;
        }
    };

    double unit_draw();
    void dispatch(Event& ev, std::vector<Delivery>* out);

    NetConfig config_;
    std::mt19937_64 engine_;
    std::int64_t now_ms_ = 0;
    std::uint64_t next_seq_ = 0;
    std::uint64_t next_endpoint_ = 1;
    std::unordered_map<EndpointId, Endpoint> endpoints_;
    std::unordered_map<EndpointId, Handler*> handlers_;
    std::unordered_map<EndpointId, std::string> adverts_;
    std::map<RoomKey, std::set<EndpointId>> rooms_;
    std::map<std::pair<EndpointId, EndpointId>, std::int64_t> last_arrival_;
    std::priority_queue<Event, std::vector<Event>, Later> queue_;
    std::vector<TraceRecord> trace_;
};

} // namespace gfcx::netsim
