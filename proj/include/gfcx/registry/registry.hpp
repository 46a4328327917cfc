#pragma once

#include <cstdint>
#include <deque>
#include <filesystem>
#include <functional>
#include <map>
#include <mutex>
#include <optional>
#include <random>
#include <string>
#include <unordered_map>
#include <vector>

#include "gfcx/core/fsutil.hpp"
#include "gfcx/core/gc_code.hpp"
#include "gfcx/core/id.hpp"
#include "gfcx/core/phone.hpp"
#include "gfcx/core/profile.hpp"
#include "gfcx/netsim/endpoint.hpp"

namespace gfcx::registry {

enum class BindingStatus : std::uint8_t { PendingVerification = 1, Active = 2, Revoked = 3 };

std::string_view status_name(BindingStatus s) noexcept;

struct Binding {
    GcCode code;
    PhoneNumber phone;
    netsim::Endpoint endpoint;
    BindingStatus status = BindingStatus::PendingVerification;
    std::optional<Timestamp> verified_at;
};

/// Caller-visible part of a verification challenge. The OTP itself only ever
/// goes to the OtpSink.
struct ChallengeTicket {
    Id128 challenge_id;
    GcCode code;
    PhoneNumber phone;
    Timestamp expires_at = 0;
    int attempts_left = 0;
};

struct Resolution {
    netsim::Endpoint endpoint;
    /// Phone with all but the last two digits masked.
    std::string phone_hint;
};

/// Delivery channel for one-time codes (SMS stand-in).
using OtpSink = std::function<void(const PhoneNumber& phone, const std::string& otp)>;

struct RegistryOptions {
    std::uint64_t seed = std::random_device{}();
    /// Append-only binding log, replayed at construction when present.
    std::optional<std::filesystem::path> log_path;
    Timestamp challenge_ttl_s = 300;
    int otp_attempts = 3;
    int begins_per_window = 5;
    Timestamp rate_window_s = 3600;
};

/// One record per registry call, emitted under the registry lock in the order
/// the calls took effect.
struct OpRecord {
    enum class Op : std::uint8_t { Begin, Complete, Resolve, Reauth, Revoke };
    Op op;
    std::string code;   // empty for Complete (identified by challenge)
    std::string phone;
    Id128 challenge_id;
    std::string otp;
    Timestamp now = 0;
    bool ok = false;
    std::string error;  // errc name when !ok
};

/// Code directory: allocates codes first-verified-wins, authenticates them
/// against a phone number with a 6-digit OTP, and resolves codes to endpoints.
///
/// All operations are serialized by one lock. At most one non-revoked binding
/// (pending or active) exists per code; a phone holds at most one active code,
/// and activating a new one revokes the old.
class Registry {
public:
    Registry(OtpSink sink, RegistryOptions options = {});

    /// Throws Error{CodeTaken|PhoneRateLimited}.
    ChallengeTicket begin_registration(const GcCode& code, const PhoneNumber& phone, const netsim::Endpoint& endpoint,
                                       Timestamp now);
    /// Throws Error{InvalidOtp|Expired|UnknownChallenge|CodeTaken}.
    Binding complete_registration(const Id128& challenge_id, std::string_view otp, Timestamp now);
    /// Throws Error{NotFound}.
    Resolution resolve(const GcCode& code) const;
    /// Sends a fresh OTP to the bound phone for a later revoke. Throws Error{NotFound}.
    ChallengeTicket begin_reauth(const GcCode& code, Timestamp now);
    /// Throws Error{NotFound|InvalidOtp}. On InvalidOtp the binding is unchanged.
    void revoke(const GcCode& code, std::string_view otp, Timestamp now);

    std::optional<Binding> binding(const GcCode& code) const;
    std::vector<Binding> active_bindings() const;
    std::vector<Binding> history() const;

    void set_observer(std::function<void(const OpRecord&)> observer);

private:
    struct Pending {
        Id128 challenge_id;
        PhoneNumber phone;
        netsim::Endpoint endpoint;
        std::string otp;
        Timestamp expires_at;
        int attempts_left;
    };
    struct Reauth {
        std::string otp;
        Timestamp expires_at;
        int attempts_left;
    };
    struct CodeRecord {
        std::optional<Binding> active;
        std::optional<Pending> pending;
        std::optional<Reauth> reauth;
    };

    std::string make_otp();
    void append_log(const Binding& b, Timestamp ts);
    void replay_log();
    void apply_active(Binding b);
    void emit(OpRecord rec) const;

    OtpSink sink_;
    RegistryOptions options_;
    mutable std::mutex mutex_;
    std::mt19937_64 rng_;
    std::map<std::string, CodeRecord> codes_;
    std::unordered_map<Id128, std::string> challenges_;
    std::map<std::string, std::string> phone_to_code_;
    std::map<std::string, std::deque<Timestamp>> begins_;
    std::vector<Binding> history_;
    AppendFile log_;
    std::function<void(const OpRecord&)> observer_;
};

/// In-memory OTP inbox used as the delivery hook in tests and the simulated world.
class SmsInbox {
public:
    void deliver(const PhoneNumber& phone, const std::string& otp);
    std::optional<std::string> latest(const std::string& phone) const;
    std::size_t count() const;
    OtpSink sink();

private:
    mutable std::mutex mutex_;
    std::map<std::string, std::vector<std::string>> messages_;
    std::size_t total_ = 0;
};

} // namespace gfcx::registry
