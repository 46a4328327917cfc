#include "gfcx/registry/registry.hpp"

#include <charconv>

#include "gfcx/core/error.hpp"

namespace gfcx::registry {

std::string_view status_name(BindingStatus s) noexcept
{
    switch (s) {
    case BindingStatus::PendingVerification:
        return "PENDING";
    case BindingStatus::Active:
        return "ACTIVE";
    case BindingStatus::Revoked:
        return "REVOKED";
    }
    return "PENDING";
}

namespace {

std::vector<std::string_view> split_bar(std::string_view line)
{
    std::vector<std::string_view> out;
    std::size_t start = 0;
    for (;;) {
        const auto pos = line.find('|', start);
        out.push_back(line.substr(start, pos == std::string_view::npos ? std::string_view::npos : pos - start));
        if (pos == std::string_view::npos)
            return out;
        start = pos + 1;
    }
}

} // namespace

Registry::Registry(OtpSink sink, RegistryOptions options)
    : sink_(std::move(sink))
    , options_(std::move(options))
    , rng_(options_.seed)
{
    if (options_.log_path) {
        replay_log();
        log_ = AppendFile(*options_.log_path);
    }
}

void Registry::set_observer(std::function<void(const OpRecord&)> observer)
{
    std::lock_guard lock(mutex_);
    observer_ = std::move(observer);
}

void Registry::emit(OpRecord rec) const
{
    if (observer_)
        observer_(rec);
}

std::string Registry::make_otp()
{
    std::uniform_int_distribution<int> dist(0, 999'999);
    std::string otp = std::to_string(dist(rng_));
    return std::string(6 - otp.size(), '0') + otp;
}

// Line: B|<code>|<phone>|<STATUS>|<timestamp>|<endpoint hex>|<reachability>
void Registry::append_log(const Binding& b, Timestamp ts)
{
    if (!log_.is_open())
        return;
    std::string line = "B|" + b.code.text() + "|" + b.phone.text() + "|" + std::string(status_name(b.status)) + "|" +
                       std::to_string(ts) + "|" + b.endpoint.id.hex() + "|" + std::to_string(b.endpoint.reachability) + "\n";
    log_.append(line);
}

void Registry::apply_active(Binding b)
{
    const auto code_text = b.code.text();
    const auto phone_text = b.phone.text();
    if (const auto it = phone_to_code_.find(phone_text); it != phone_to_code_.end() && it->second != code_text) {
        auto& old = codes_[it->second];
        if (old.active) {
            old.active->status = BindingStatus::Revoked;
            history_.push_back(*old.active);
            append_log(*old.active, b.verified_at.value_or(0));
            old.active.reset();
            old.reauth.reset();
        }
    }
    phone_to_code_[phone_text] = code_text;
    codes_[code_text].active = std::move(b);
}

void Registry::replay_log()
{
    std::string content;
    try {
        content = read_file(*options_.log_path);
    } catch (const Error&) {
        return; // first start
    }
    std::size_t start = 0;
    std::size_t line_no = 0;
    while (start < content.size()) {
        const auto nl = content.find('\n', start);
        if (nl == std::string::npos) {
            // torn final write: cut it so later appends start on a fresh line
            std::filesystem::resize_file(*options_.log_path, start);
            break;
        }
        const std::string_view line(content.data() + start, nl - start);
        start = nl + 1;
        ++line_no;
        const auto parts = split_bar(line);
        if (parts.size() != 7 || parts[0] != "B" || !is_valid_code(parts[1]))
            throw Error(Errc::Io, "registry log line " + std::to_string(line_no) + " is malformed");
        Timestamp ts = 0;
        std::from_chars(parts[4].data(), parts[4].data() + parts[4].size(), ts);
        const auto ep = netsim::EndpointId::from_hex(parts[5]);
        int reach = 0;
        std::from_chars(parts[6].data(), parts[6].data() + parts[6].size(), reach);
        if (!ep)
            throw Error(Errc::Io, "registry log line " + std::to_string(line_no) + " has a bad endpoint");
        Binding b{validate_code(parts[1]), parse_phone(parts[2]), netsim::Endpoint{*ep, static_cast<std::uint8_t>(reach)},
                  BindingStatus::PendingVerification, std::nullopt};
        if (parts[3] == "ACTIVE") {
            b.status = BindingStatus::Active;
            b.verified_at = ts;
            apply_active(std::move(b));
        } else if (parts[3] == "REVOKED") {
            auto& rec = codes_[b.code.text()];
            if (rec.active && rec.active->phone == b.phone) {
                rec.active->status = BindingStatus::Revoked;
                history_.push_back(*rec.active);
                phone_to_code_.erase(b.phone.text());
                rec.active.reset();
            }
        }
        // PENDING lines are informational; challenges do not survive a restart
    }
}

ChallengeTicket Registry::begin_registration(const GcCode& code, const PhoneNumber& phone,
                                             const netsim::Endpoint& endpoint, Timestamp now)
{
    std::lock_guard lock(mutex_);
    OpRecord rec{OpRecord::Op::Begin, code.text(), phone.text(), {}, {}, now, false, {}};
    try {
        auto& window = begins_[phone.text()];
        while (!window.empty() && now - window.front() >= options_.rate_window_s)
            window.pop_front();
        if (static_cast<int>(window.size()) >= options_.begins_per_window)
            throw Error(Errc::PhoneRateLimited, "too many registrations for this phone in the last hour");
        window.push_back(now);

        auto& record = codes_[code.text()];
        if (record.active && record.active->phone != phone)
            throw Error(Errc::CodeTaken, "code " + code.text() + " is taken");
        if (record.pending && record.pending->expires_at >= now && record.pending->phone != phone)
            throw Error(Errc::CodeTaken, "code " + code.text() + " has a pending claim");
        if (record.pending)
            challenges_.erase(record.pending->challenge_id);

        Id128 cid = Id128::random(rng_);
        while (challenges_.count(cid))
            cid = Id128::random(rng_);
        Pending p{cid, phone, endpoint, make_otp(), now + options_.challenge_ttl_s, options_.otp_attempts};
        challenges_.emplace(cid, code.text());
        ChallengeTicket ticket{cid, code, phone, p.expires_at, p.attempts_left};
        const std::string otp = p.otp;
        record.pending = std::move(p);
        append_log(Binding{code, phone, endpoint, BindingStatus::PendingVerification, std::nullopt}, now);
        if (sink_)
            sink_(phone, otp);
        rec.ok = true;
        rec.challenge_id = cid;
        rec.otp = otp;
        emit(rec);
        return ticket;
    } catch (const Error& e) {
        rec.error = std::string(errc_name(e.code()));
        emit(rec);
        throw;
    }
}

Binding Registry::complete_registration(const Id128& challenge_id, std::string_view otp, Timestamp now)
{
    std::lock_guard lock(mutex_);
    OpRecord rec{OpRecord::Op::Complete, {}, {}, challenge_id, std::string(otp), now, false, {}};
    try {
        const auto cit = challenges_.find(challenge_id);
        if (cit == challenges_.end())
            throw Error(Errc::UnknownChallenge, "no such challenge");
        auto& record = codes_[cit->second];
        auto& pending = *record.pending;
        rec.code = cit->second;
        rec.phone = pending.phone.text();
        if (now > pending.expires_at) {
            record.pending.reset();
            challenges_.erase(cit);
            throw Error(Errc::Expired, "challenge expired");
        }
        if (otp != pending.otp) {
            if (--pending.attempts_left <= 0) {
                record.pending.reset();
                challenges_.erase(cit);
            }
            throw Error(Errc::InvalidOtp, "wrong verification code");
        }
        Binding b{validate_code(cit->second), pending.phone, pending.endpoint, BindingStatus::Active, now};
        record.pending.reset();
        challenges_.erase(cit);
        append_log(b, now);
        apply_active(b);
        rec.ok = true;
        emit(rec);
        return b;
    } catch (const Error& e) {
        rec.error = std::string(errc_name(e.code()));
        emit(rec);
        throw;
    }
}

Resolution Registry::resolve(const GcCode& code) const
{
    std::lock_guard lock(mutex_);
    const auto it = codes_.find(code.text());
    if (it == codes_.end() || !it->second.active) {
        emit(OpRecord{OpRecord::Op::Resolve, code.text(), {}, {}, {}, 0, false, "NotFound"});
        throw Error(Errc::NotFound, "code " + code.text() + " is not registered");
    }
    const auto& b = *it->second.active;
    emit(OpRecord{OpRecord::Op::Resolve, code.text(), b.phone.text(), {}, {}, 0, true, {}});
    return Resolution{b.endpoint, b.phone.masked()};
}

ChallengeTicket Registry::begin_reauth(const GcCode& code, Timestamp now)
{
    std::lock_guard lock(mutex_);
    const auto it = codes_.find(code.text());
    if (it == codes_.end() || !it->second.active) {
        emit(OpRecord{OpRecord::Op::Reauth, code.text(), {}, {}, {}, now, false, "NotFound"});
        throw Error(Errc::NotFound, "code " + code.text() + " is not registered");
    }
    auto& record = it->second;
    record.reauth = Reauth{make_otp(), now + options_.challenge_ttl_s, options_.otp_attempts};
    if (sink_)
        sink_(record.active->phone, record.reauth->otp);
    emit(OpRecord{OpRecord::Op::Reauth, code.text(), record.active->phone.text(), {}, record.reauth->otp, now, true, {}});
    return ChallengeTicket{Id128{}, code, record.active->phone, record.reauth->expires_at, record.reauth->attempts_left};
}

void Registry::revoke(const GcCode& code, std::string_view otp, Timestamp now)
{
    std::lock_guard lock(mutex_);
    OpRecord rec{OpRecord::Op::Revoke, code.text(), {}, {}, std::string(otp), now, false, {}};
    try {
        const auto it = codes_.find(code.text());
        if (it == codes_.end() || !it->second.active)
            throw Error(Errc::NotFound, "code " + code.text() + " is not registered");
        auto& record = it->second;
        rec.phone = record.active->phone.text();
        if (!record.reauth || now > record.reauth->expires_at) {
            record.reauth.reset();
            throw Error(Errc::InvalidOtp, "no valid re-authentication code");
        }
        if (otp != record.reauth->otp) {
            if (--record.reauth->attempts_left <= 0)
                record.reauth.reset();
            throw Error(Errc::InvalidOtp, "wrong verification code");
        }
        record.active->status = BindingStatus::Revoked;
        append_log(*record.active, now);
        history_.push_back(*record.active);
        phone_to_code_.erase(record.active->phone.text());
        record.active.reset();
        record.reauth.reset();
        rec.ok = true;
        emit(rec);
    } catch (const Error& e) {
        rec.error = std::string(errc_name(e.code()));
        emit(rec);
        throw;
    }
}

std::optional<Binding> Registry::binding(const GcCode& code) const
{
    std::lock_guard lock(mutex_);
    const auto it = codes_.find(code.text());
    if (it == codes_.end())
        return std::nullopt;
    if (it->second.active)
        return it->second.active;
    if (it->second.pending) {
        const auto& p = *it->second.pending;
        return Binding{code, p.phone, p.endpoint, BindingStatus::PendingVerification, std::nullopt};
    }
    return std::nullopt;
}

std::vector<Binding> Registry::active_bindings() const
{
    std::lock_guard lock(mutex_);
    std::vector<Binding> out;
    for (const auto& [code, rec] : codes_) {
        if (rec.active)
            out.push_back(*rec.active);
    }
    return out;
}

std::vector<Binding> Registry::history() const
{
    std::lock_guard lock(mutex_);
    return history_;
}

void SmsInbox::deliver(const PhoneNumber& phone, const std::string& otp)
{
    std::lock_guard lock(mutex_);
    messages_[phone.text()].push_back(otp);
    ++total_;
}

std::optional<std::string> SmsInbox::latest(const std::string& phone) const
{
    std::lock_guard lock(mutex_);
    const auto it = messages_.find(phone);
    if (it == messages_.end() || it->second.empty())
        return std::nullopt;
    return it->second.back();
}

std::size_t SmsInbox::count() const
{
    std::lock_guard lock(mutex_);
    return total_;
}

OtpSink SmsInbox::sink()
{
    return [this](const PhoneNumber& phone, const std::string& otp) { deliver(phone, otp); };
}

} // namespace gfcx::registry
