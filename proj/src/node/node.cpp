#include "gfcx/node/node.hpp"

#include <algorithm>
#include <charconv>
#include <tuple>

#include "gfcx/core/error.hpp"
#include "gfcx/core/fsutil.hpp"
#include "gfcx/core/gfc_format.hpp"
#include "gfcx/core/vcard.hpp"
#include "gfcx/node/lines.hpp"

namespace gfcx::node {

namespace {

// Timer tag spaces; the low bits are per-component counters.
constexpr std::uint64_t kTagShift = 60;
constexpr std::uint64_t kTagRequester = 1ULL << kTagShift;
constexpr std::uint64_t kTagRegistry = 2ULL << kTagShift;
constexpr std::uint64_t kTagApproval = 3ULL << kTagShift;
constexpr std::uint64_t kTagJoin = 4ULL << kTagShift;

std::string required(const ApiDoc& in, std::string_view key)
{
    auto v = in.value(key);
    if (!v)
        throw Error(Errc::Validation, "missing " + std::string(key));
    return *v;
}

Id128 parse_id(std::string_view text, std::string_view what)
{
    const auto id = Id128::from_hex(text);
    if (!id)
        throw Error(Errc::Validation, std::string(what) + " must be 32 hex digits");
    return *id;
}

std::uint64_t parse_u64(std::string_view text, std::string_view what)
{
    std::uint64_t v = 0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size() || text.empty())
        throw Error(Errc::Validation, std::string(what) + " must be a decimal number");
    return v;
}

std::int64_t parse_i64(std::string_view text, std::string_view what)
{
    std::int64_t v = 0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size() || text.empty())
        throw Error(Errc::Validation, std::string(what) + " must be a decimal number");
    return v;
}

std::string check_otp(const std::string& otp)
{
    if (otp.empty() || otp.size() > 16)
        throw Error(Errc::Validation, "OTP must be 1-16 characters");
    return otp;
}

std::vector<ProfileField> fields_from(const ApiDoc& in)
{
    std::vector<ProfileField> out;
    for (const auto& f : in.values("F")) {
        const auto bar = f.find('|');
        if (bar == std::string::npos)
            throw Error(Errc::Validation, "field must be F|<KIND>|<value>");
        out.push_back(ProfileField{FieldKind::from_token(f.substr(0, bar)), f.substr(bar + 1)});
    }
    return out;
}

// GFC document minus its magic and END lines.
void add_gfc_body(ApiDoc& out, const std::string& doc, std::string_view prefix = {})
{
    auto lines = split_lines(doc);
    for (std::size_t i = 1; i + 1 < lines.size(); ++i) {
        if (prefix.empty())
            out.add_line(std::string(lines[i]));
        else
            out.add(prefix, lines[i]);
    }
}

std::string contact_line(const ContactEntry& e)
{
    return "CONTACT|" + std::to_string(e.entry_id) + "|" + e.card.source_code.text() + "|" +
           std::to_string(e.card.received_at_ms) + "|" + std::string(transport_name(e.card.transport)) + "|" +
           e.card.classification.value_or("-") + "|" + e.card.profile_snapshot.name;
}

std::string random_token()
{
    std::random_device rd;
    std::mt19937_64 rng((static_cast<std::uint64_t>(rd()) << 32) ^ rd());
    return Id128::random(rng).hex() + Id128::random(rng).hex();
}

bool same_token(std::string_view a, std::string_view b)
{
    if (a.size() != b.size())
        return false;
    unsigned char diff = 0;
    for (std::size_t i = 0; i < a.size(); ++i)
        diff |= static_cast<unsigned char>(a[i] ^ b[i]);
    return diff == 0;
}


// Each open of a state dir gets its own RNG stream, so ids minted after a
// restart never repeat ones handed out (and possibly deleted) before it.
NodeOptions with_restart_seed(NodeOptions o)
{
    std::filesystem::create_directories(o.dir);
    const auto path = o.dir / "generation";
    std::int64_t gen = 0;
    if (std::filesystem::exists(path)) {
        auto text = read_file(path);
        while (!text.empty() && text.back() == '\n')
            text.pop_back();
        gen = parse_i64(text, "generation");
    }
    write_file_durably(path, std::to_string(gen + 1) + "\n");
    if (gen > 0) {
        std::uint64_t z = o.seed + static_cast<std::uint64_t>(gen) * 0x9E3779B97F4A7C15ULL;
        z = (z ^ (z >> 30)) * 0xBF58476D1CE4E5B9ULL;
        z = (z ^ (z >> 27)) * 0x94D049BB133111EBULL;
        o.seed = z ^ (z >> 31);
    }
    return o;
}

} // namespace

std::string_view approval_state_name(PendingApproval::State s) noexcept
{
    switch (s) {
    case PendingApproval::State::Waiting:
        return "WAITING";
    case PendingApproval::State::Approved:
        return "APPROVED";
    case PendingApproval::State::Refused:
        return "REFUSED";
    }
    return "WAITING";
}

std::string_view op_state_name(Operation::State s) noexcept
{
    switch (s) {
    case Operation::State::Running:
        return "RUNNING";
    case Operation::State::Done:
        return "DONE";
    case Operation::State::Failed:
        return "FAILED";
    }
    return "RUNNING";
}

Node::Node(netsim::Simulator& sim, netsim::EndpointId registry, NodeOptions options, std::uint8_t reachability)
    : sim_(sim)
    , registry_ep_(registry)
    , options_(with_restart_seed(std::move(options)))
    , rng_(options_.seed)
    , profiles_(options_.dir / "profiles", options_.seed ^ 0x51)
    , contacts_(options_.dir / "contacts.log")
    , rooms_(options_.seed ^ 0x7007)
{
    const auto policy_path = options_.dir / "policy.cfg";
    if (std::filesystem::exists(policy_path)) {
        policy_ = parse_policy(read_file(policy_path));
        validate_policy(policy_);
    } else {
        policy_ = default_policy();
        save_policy();
    }

    const auto token_path = options_.dir / "token";
    if (options_.fresh_token || !std::filesystem::exists(token_path)) {
        token_ = random_token();
        write_file_durably(token_path, token_ + "\n");
    } else {
        token_ = read_file(token_path);
        while (!token_.empty() && (token_.back() == '\n' || token_.back() == '\r'))
            token_.pop_back();
    }
    load_identity();

    self_ = sim_.add_endpoint(reachability);
    sim_.attach(self_.id, this);
    if (identity_.active_code)
        sim_.advertise(self_.id, identity_.active_code->text());

    requester_ = std::make_unique<exchange::Requester>(outbox(), options_.retry, rng_(), kTagRequester);
    registry_ = std::make_unique<registry::RegistryClient>(outbox(), registry_ep_, options_.retry, kTagRegistry);
}

Node::~Node()
{
    sim_.detach(self_.id);
}

exchange::Outbox Node::outbox()
{
    return exchange::Outbox{
        [this](netsim::EndpointId to, TransportClass t, std::string bytes) {
            try {
                return sim_.send(self_.id, to, t, std::move(bytes)).delivered;
            } catch (const Error&) {
                return false;
            }
        },
        [this](std::int64_t at, std::uint64_t tag) { sim_.schedule_timer(self_.id, at, tag); }};
}

std::int64_t Node::now_ms() const noexcept
{
    return options_.epoch_ms + sim_.now_ms();
}

std::optional<GcCode> Node::own_code() const
{
    return identity_.active_code;
}

Decision Node::decide(const std::optional<GcCode>& requester) const
{
    return select_profile_for(policy_, requester, [this](const Id128& id) { return profiles_.contains(id); });
}

const Operation* Node::operation(std::uint64_t op_id) const
{
    const auto it = ops_.find(op_id);
    return it == ops_.end() ? nullptr : &it->second;
}

void Node::save_policy()
{
    write_file_durably(options_.dir / "policy.cfg", format_policy(policy_));
}

void Node::save_identity()
{
    std::string out;
    if (identity_.active_code)
        out += "ACTIVE|" + identity_.active_code->text() + "|" + identity_.active_phone->text() + "\n";
    if (identity_.pending_code)
        out += "PENDING|" + identity_.pending_code->text() + "|" + identity_.pending_phone->text() + "|" +
               identity_.challenge_id.hex() + "|" + std::to_string(identity_.expires_at) + "\n";
    write_file_durably(options_.dir / "identity.cfg", out);
}

void Node::load_identity()
{
    const auto path = options_.dir / "identity.cfg";
    if (!std::filesystem::exists(path))
        return;
    const auto text = read_file(path);
    for (const auto line : split_lines(text)) {
        const auto parts = split_bar(line);
        if (parts[0] == "ACTIVE" && parts.size() == 3) {
            identity_.active_code = validate_code(parts[1]);
            identity_.active_phone = parse_phone(parts[2]);
        } else if (parts[0] == "PENDING" && parts.size() == 5) {
            identity_.pending_code = validate_code(parts[1]);
            identity_.pending_phone = parse_phone(parts[2]);
            identity_.challenge_id = parse_id(parts[3], "challenge id");
            identity_.expires_at = parse_i64(parts[4], "expiry");
        } else if (!line.empty()) {
            throw Error(Errc::Io, path.string() + ": unrecognized line");
        }
    }
}

Operation& Node::new_op(std::string kind)
{
    auto& op = ops_[next_op_];
    op.op_id = next_op_++;
    op.kind = std::move(kind);
    return op;
}

void Node::finish_op(std::uint64_t op_id, ApiDoc result)
{
    auto& op = ops_.at(op_id);
    op.state = Operation::State::Done;
    op.result = std::move(result);
}

void Node::fail_op(std::uint64_t op_id, Errc code, std::string detail)
{
    auto& op = ops_.at(op_id);
    op.state = Operation::State::Failed;
    op.error = code;
    op.detail = sanitize_field(detail);
}

std::optional<Id128> Node::default_profile() const
{
    for (const auto& r : policy_) {
        if (r.matcher.kind == Matcher::Kind::Any)
            return r.profile_id;
    }
    return std::nullopt;
}

Profile Node::profile_or_throw(const ApiDoc& in)
{
    std::optional<Profile> p;
    if (const auto id = in.value("ID"))
        p = profiles_.get(parse_id(*id, "profile id"));
    else if (const auto name = in.value("NAME"))
        p = profiles_.by_name(*name);
    else
        throw Error(Errc::Validation, "missing ID or NAME");
    if (!p)
        throw Error(Errc::NotFound, "no such profile");
    return *p;
}

std::string Node::local_api(std::string_view request_bytes)
{
    try {
        const auto req = decode_api_request(request_bytes);
        if (!same_token(req.token, token_))
            throw Error(Errc::Unauthorized, "bad token");
        return encode_api_ok(dispatch(req));
    } catch (const Error& e) {
        return encode_api_error(e.code(), e.detail());
    } catch (const std::exception& e) {
        return encode_api_error(Errc::Io, e.what());
    }
}

ApiDoc Node::dispatch(const ApiRequest& req)
{
    const auto& in = req.body;
    ApiDoc out;
    switch (req.type) {
    case kProfileList:
        for (const auto& p : profiles_.list())
            out.add_line("PROFILE|" + p.profile_id.hex() + "|" + p.name + "|" + std::to_string(p.fields.size()) + "|" +
                         std::to_string(p.updated_at));
        return out;
    case kProfileCreate:
        return api_profile_create(in);
    case kProfileUpdate:
        return api_profile_update(in);
    case kProfileDelete: {
        const auto p = profile_or_throw(in);
        profiles_.remove(p.profile_id);
        return out.add("ID", p.profile_id.hex());
    }
    case kProfileShow:
        add_gfc_body(out, serialize_gfc(profile_or_throw(in)));
        return out;
    case kPolicyList:
        for (const auto& r : policy_)
            out.add_line(format_rule(r));
        return out;
    case kPolicySet:
        return api_policy_set(in);
    case kCodeRegister:
        return api_code_register(in);
    case kCodeVerify:
        return api_code_verify(in);
    case kCodeStatus: {
        std::string status = "NONE";
        if (identity_.active_code) {
            status = "ACTIVE";
            out.add("ACTIVE", identity_.active_code->text() + "|" + identity_.active_phone->masked());
        }
        if (identity_.pending_code) {
            if (status == "NONE")
                status = "PENDING";
            out.add("PENDING", identity_.pending_code->text() + "|" + identity_.pending_phone->masked() + "|" +
                                   std::to_string(identity_.expires_at));
        }
        out.add("ENDPOINT", self_.id.hex());
        return out.add("STATUS", status);
    }
    case kCodeReauth:
    case kCodeRevoke:
        return api_code_revoke(req.type == kCodeReauth ? ApiDoc{} : in);
    case kExchange:
        return api_exchange(in);
    case kOpStatus: {
        const auto id = parse_u64(required(in, "OP"), "OP");
        const auto it = ops_.find(id);
        if (it == ops_.end())
            throw Error(Errc::NotFound, "no operation " + std::to_string(id));
        const auto& op = it->second;
        out.add("OP", std::to_string(op.op_id)).add("KIND", op.kind).add("STATE", op_state_name(op.state));
        if (op.state == Operation::State::Failed)
            out.add("FAIL", std::string(errc_name(op.error)) + "|" + op.detail);
        for (const auto& l : op.result.lines())
            out.add_line(l);
        return out;
    }
    case kPendingList:
    {
        std::vector<const PendingApproval*> order;
        for (const auto& [id, p] : approvals_)
            order.push_back(&p);
        std::sort(order.begin(), order.end(), [](auto* a, auto* b) {
            return std::tie(a->arrived_at_ms, a->request_id) < std::tie(b->arrived_at_ms, b->request_id);
        });
        for (const auto* pp : order) {
            const auto& p = *pp;
            const auto& id = p.request_id;
            out.add_line("PENDING|" + id.hex() + "|" + (p.requester_code ? p.requester_code->text() : "-") + "|" +
                         std::to_string(p.arrived_at_ms) + "|" + std::string(approval_state_name(p.state)) + "|" +
                         (p.profile_id ? p.profile_id->hex() : "-"));
        }
        return out;
    }
    case kApprove:
        return api_approve(in, true);
    case kRefuse:
        return api_approve(in, false);
    case kRoomHost:
        return api_room_host(in);
    case kRoomJoin:
        return api_room_join(in);
    case kRoomCast:
        return api_room_cast(in);
    case kRoomStatus:
        return api_room_status(in);
    case kContactsList:
        for (const auto& e : contacts_.list())
            out.add_line(contact_line(e));
        return out;
    case kContactsSearch:
        return api_search(in);
    case kClassify: {
        const auto entry = parse_u64(required(in, "ENTRY"), "ENTRY");
        contacts_.classify(entry, required(in, "LABEL"));
        return out.add_line(contact_line(*contacts_.get(entry)));
    }
    case kExportVcard: {
        const auto entry = parse_u64(required(in, "ENTRY"), "ENTRY");
        const auto e = contacts_.get(entry);
        if (!e)
            throw Error(Errc::NotFound, "no contact entry " + std::to_string(entry));
        const auto vcf = export_vcard(e->card);
        std::size_t start = 0;
        while (start < vcf.size()) {
            const auto crlf = vcf.find("\r\n", start);
            out.add("V", std::string_view(vcf).substr(start, crlf - start));
            start = crlf + 2;
        }
        return out;
    }
    case kContactShow: {
        const auto entry = parse_u64(required(in, "ENTRY"), "ENTRY");
        const auto e = contacts_.get(entry);
        if (!e)
            throw Error(Errc::NotFound, "no contact entry " + std::to_string(entry));
        out.add_line(contact_line(*e));
        add_gfc_body(out, e->wire_bytes, "GFC");
        return out;
    }
    default:
        throw Error(Errc::UnknownMsgType, "unsupported request");
    }
}

ApiDoc Node::api_profile_create(const ApiDoc& in)
{
    const auto p = profiles_.create(required(in, "NAME"), fields_from(in), now_ms() / 1000);
    bool filled = false;
    for (auto& r : policy_) {
        if (!r.profile_id) {
            r.profile_id = p.profile_id;
            filled = true;
        }
    }
    if (filled)
        save_policy();
    return ApiDoc{}.add("ID", p.profile_id.hex());
}

ApiDoc Node::api_profile_update(const ApiDoc& in)
{
    const auto id = parse_id(required(in, "ID"), "profile id");
    const auto p = profiles_.update(id, required(in, "NAME"), fields_from(in), now_ms() / 1000);
    return ApiDoc{}.add("ID", p.profile_id.hex());
}

ApiDoc Node::api_policy_set(const ApiDoc& in)
{
    std::vector<PolicyRule> rules;
    for (const auto& line : in.lines()) {
        if (line.rfind("R|", 0) == 0)
            rules.push_back(parse_rule(line));
    }
    validate_policy(rules);
    for (const auto& r : rules) {
        if (r.profile_id && !profiles_.contains(*r.profile_id))
            throw Error(Errc::NotFound, "rule " + r.rule_id + " names an unknown profile");
    }
    policy_ = std::move(rules);
    save_policy();
    ApiDoc out;
    for (const auto& r : policy_)
        out.add_line(format_rule(r));
    return out;
}

ApiDoc Node::api_code_register(const ApiDoc& in)
{
    const auto code = validate_code(required(in, "CODE"));
    const auto phone = parse_phone(required(in, "PHONE"));
    auto& op = new_op("REGISTER");
    const auto txn = registry_->call(registry::RegBegin{0, code, phone, self_}, sim_.now_ms());
    op_by_txn_[txn] = op.op_id;
    identity_.pending_code = code;
    identity_.pending_phone = phone;
    identity_.challenge_id = Id128{};
    identity_.expires_at = 0;
    return ApiDoc{}.add("OP", std::to_string(op.op_id));
}

ApiDoc Node::api_code_verify(const ApiDoc& in)
{
    const auto otp = check_otp(required(in, "OTP"));
    if (!identity_.pending_code || identity_.challenge_id == Id128{})
        throw Error(Errc::NotFound, "no registration is waiting for verification");
    auto& op = new_op("VERIFY");
    const auto txn = registry_->call(registry::RegComplete{0, identity_.challenge_id, otp}, sim_.now_ms());
    op_by_txn_[txn] = op.op_id;
    return ApiDoc{}.add("OP", std::to_string(op.op_id));
}

ApiDoc Node::api_code_revoke(const ApiDoc& in)
{
    if (!identity_.active_code)
        throw Error(Errc::NotFound, "no active code");
    std::uint32_t txn = 0;
    Operation* op = nullptr;
    if (const auto otp = in.value("OTP")) {
        op = &new_op("REVOKE");
        txn = registry_->call(registry::RegRevoke{0, *identity_.active_code, check_otp(*otp)}, sim_.now_ms());
    } else {
        op = &new_op("REAUTH");
        txn = registry_->call(registry::RegReauth{0, *identity_.active_code}, sim_.now_ms());
    }
    op_by_txn_[txn] = op->op_id;
    return ApiDoc{}.add("OP", std::to_string(op->op_id));
}

ApiDoc Node::api_exchange(const ApiDoc& in)
{
    const auto code = validate_code(required(in, "CODE"));
    const auto transport = transport_from_name(in.value("TRANSPORT").value_or("WIDEAREA"));
    if (!self_.reaches(transport))
        throw Error(Errc::NotInRange, "this node has no " + std::string(transport_name(transport)) + " link");
    if (transport == TransportClass::Proximity) {
        std::optional<netsim::EndpointId> peer;
        for (const auto& [id, label] : sim_.neighbours(self_.id)) {
            if (label == code.text())
                peer = id;
        }
        if (!peer)
            throw Error(Errc::NotFound, "no nearby device advertises " + code.text());
        auto& op = new_op("EXCHANGE");
        start_request(op.op_id, *peer, code, transport);
        return ApiDoc{}.add("OP", std::to_string(op.op_id));
    }
    auto& op = new_op("EXCHANGE");
    const auto txn = registry_->call(registry::ResolveReq{0, code}, sim_.now_ms());
    op_by_txn_[txn] = op.op_id;
    resolve_target_.emplace(txn, code);
    return ApiDoc{}.add("OP", std::to_string(op.op_id));
}

void Node::start_request(std::uint64_t op_id, netsim::EndpointId peer, const GcCode& target, TransportClass t)
{
    const auto& s = requester_->initiate_request(peer, target, own_code(), t, sim_.now_ms());
    op_by_request_[s.request_id()] = op_id;
}

ApiDoc Node::api_approve(const ApiDoc& in, bool approve)
{
    const auto id = parse_id(required(in, "ID"), "request id");
    const auto it = approvals_.find(id);
    if (it == approvals_.end())
        throw Error(Errc::NotFound, "no pending request " + id.hex());
    if (it->second.state != PendingApproval::State::Waiting)
        throw Error(Errc::Validation, "request already " + std::string(approval_state_name(it->second.state)));
    std::optional<Id128> profile;
    if (const auto p = in.value("PROFILE"))
        profile = parse_id(*p, "profile id");
    resolve_approval(it->second, approve, profile);
    return ApiDoc{}.add("STATE", approval_state_name(it->second.state));
}

void Node::resolve_approval(PendingApproval& p, bool approve, std::optional<Id128> profile_id)
{
    exchange::PolicyAnswer answer = exchange::PolicyAnswer::deny();
    std::optional<Profile> profile;
    if (approve) {
        const auto id = profile_id ? profile_id : p.profile_id;
        if (id)
            profile = profiles_.get(*id);
        if (!profile)
            throw Error(Errc::NotFound, "profile to send does not exist");
        answer = exchange::PolicyAnswer::send(*profile);
    }
    const auto reply = responder_.resolve_deferred(p.from, p.request_id, answer, sim_.now_ms());
    p.state = approve ? PendingApproval::State::Approved : PendingApproval::State::Refused;
    if (profile)
        p.profile_id = profile->profile_id;
    for (auto& rec : send_log_) {
        if (rec.request_id == p.request_id && profile)
            rec.sent_profile = profile->profile_id;
    }
    send_frame(p.from, p.transport, reply);
}

ApiDoc Node::api_room_host(const ApiDoc& in)
{
    if (!identity_.active_code)
        throw Error(Errc::Validation, "register a code before hosting a room");
    if (!self_.reaches(TransportClass::Proximity))
        throw Error(Errc::NotInRange, "this node has no proximity link");
    std::optional<Id128> profile = default_profile();
    if (const auto p = in.value("PROFILE")) {
        profile = parse_id(*p, "profile id");
        if (!profiles_.contains(*profile))
            throw Error(Errc::NotFound, "no such profile");
    }
    const auto room = rooms_.open_room(*identity_.active_code, sim_.now_ms());
    sim_.join_room(room, self_.id);
    hosted_[room] = HostedRoom{profile};
    return ApiDoc{}.add("ROOM", room.hex());
}

ApiDoc Node::api_room_join(const ApiDoc& in)
{
    const auto room = parse_id(required(in, "ROOM"), "room id");
    if (!self_.reaches(TransportClass::Proximity))
        throw Error(Errc::NotInRange, "this node has no proximity link");
    auto& op = new_op("ROOM_JOIN");
    if (const auto j = joined_.find(room); j != joined_.end()) {
        finish_op(op.op_id, ApiDoc{}.add("ROOM", room.hex()).add("HOST", j->second.host_code.text()));
        return ApiDoc{}.add("OP", std::to_string(op.op_id));
    }
    sim_.join_room(room, self_.id);
    std::vector<netsim::EndpointId> peers;
    for (const auto id : sim_.room_members(room)) {
        if (id != self_.id)
            peers.push_back(id);
    }
    if (peers.empty()) {
        sim_.leave_room(room, self_.id);
        ops_.erase(op.op_id);
        throw Error(Errc::UnknownRoom, "nobody nearby is in room " + room.hex());
    }
    const auto tag = kTagJoin | next_tag_++;
    joining_[room] = PendingJoin{op.op_id, 1, tag};
    join_timer_[tag] = room;
    const auto bytes = exchange::encode_message(exchange::RoomJoin{room, self_});
    for (const auto id : peers)
        send_frame(id, TransportClass::Proximity, bytes);
    sim_.schedule_timer(self_.id, sim_.now_ms() + options_.retry.interval_ms, tag);
    return ApiDoc{}.add("OP", std::to_string(op.op_id));
}

ApiDoc Node::api_room_cast(const ApiDoc& in)
{
    const auto room = parse_id(required(in, "ROOM"), "room id");
    const auto h = hosted_.find(room);
    if (h == hosted_.end())
        throw Error(Errc::UnknownRoom, "not hosting room " + room.hex());
    auto profile_id = h->second.profile_id;
    if (const auto p = in.value("PROFILE"))
        profile_id = parse_id(*p, "profile id");
    const auto profile = profile_id ? profiles_.get(*profile_id) : std::nullopt;
    if (!profile)
        throw Error(Errc::NotFound, "profile to broadcast does not exist");
    const auto report = rooms_.broadcast_room(room, *profile, outbox());
    return ApiDoc{}
        .add("SEQ", std::to_string(report.seq))
        .add("MEMBERS", std::to_string(report.total()))
        .add("SENT", std::to_string(report.delivered()));
}

ApiDoc Node::api_room_status(const ApiDoc& in)
{
    const auto room = parse_id(required(in, "ROOM"), "room id");
    ApiDoc out;
    out.add("ROOM", room.hex());
    if (hosted_.count(room)) {
        const auto members = rooms_.members(room);
        out.add("ROLE", "HOST")
            .add("STATE", rooms_.is_open(room) ? "OPEN" : "CLOSED")
            .add("MEMBERS", std::to_string(members.size()));
        for (const auto& m : members)
            out.add("MEMBER", m.id.hex());
        return out;
    }
    if (const auto j = joined_.find(room); j != joined_.end()) {
        return out.add("ROLE", "MEMBER")
            .add("HOST", j->second.host_code.text())
            .add("LAST_SEQ", std::to_string(j->second.last_seq))
            .add("RECEIVED", std::to_string(j->second.received));
    }
    throw Error(Errc::UnknownRoom, "not in room " + room.hex());
}

ApiDoc Node::api_search(const ApiDoc& in)
{
    ContactQuery q;
    q.text = in.value("TEXT");
    q.classification = in.value("CLASS");
    q.source_code = in.value("CODE");
    if (const auto v = in.value("FROM"))
        q.from_ms = parse_i64(*v, "FROM");
    if (const auto v = in.value("TO"))
        q.to_ms = parse_i64(*v, "TO");
    ApiDoc out;
    for (const auto& e : contacts_.search(q))
        out.add_line(contact_line(e));
    return out;
}

void Node::send_frame(netsim::EndpointId to, TransportClass t, std::string bytes)
{
    try {
        sim_.send(self_.id, to, t, std::move(bytes));
    } catch (const Error&) {
        // out of range: same as a lost frame
    }
}

void Node::on_frame(const netsim::Delivery& d)
{
    exchange::Frame frame;
    try {
        frame = exchange::decode_frame(d.bytes);
    } catch (const Error&) {
        return;
    }
    if (registry::is_registry_msg_type(frame.msg_type)) {
        if (auto r = registry_->on_frame(d.from, frame))
            on_registry_result(*r);
        return;
    }
    exchange::Message msg = exchange::Ack{};
    try {
        msg = exchange::from_frame(frame);
    } catch (const Error&) {
        return;
    }
    if (const auto* req = std::get_if<exchange::Request>(&msg)) {
        on_request(d, *req);
    } else if (std::holds_alternative<exchange::Response>(msg) || std::holds_alternative<exchange::Deny>(msg) ||
               std::holds_alternative<exchange::Ack>(msg)) {
        if (auto o = requester_->on_message(d.from, msg, sim_.now_ms()))
            on_exchange_outcome(*o);
    } else if (const auto* j = std::get_if<exchange::RoomJoin>(&msg)) {
        if (!hosted_.count(j->room_id) || !rooms_.is_open(j->room_id) || d.transport != TransportClass::Proximity)
            return;
        rooms_.join_room(j->room_id, netsim::Endpoint{d.from, j->member_endpoint.reachability});
        send_frame(d.from, TransportClass::Proximity,
                   exchange::encode_message(exchange::RoomOpen{j->room_id, rooms_.host_code(j->room_id)}));
    } else if (const auto* o = std::get_if<exchange::RoomOpen>(&msg)) {
        if (const auto it = joining_.find(o->room_id); it != joining_.end()) {
            joined_.insert_or_assign(o->room_id, JoinedRoom{d.from, o->host_code});
            finish_op(it->second.op_id, ApiDoc{}.add("ROOM", o->room_id.hex()).add("HOST", o->host_code.text()));
            join_timer_.erase(it->second.tag);
            joining_.erase(it);
        }
    } else if (const auto* c = std::get_if<exchange::RoomCard>(&msg)) {
        const auto it = joined_.find(c->room_id);
        if (it == joined_.end() || it->second.host != d.from || c->seq <= it->second.last_seq)
            return;
        try {
            contacts_.save(it->second.host_code, c->gfc_bytes, now_ms(), TransportClass::Proximity);
        } catch (const Error&) {
            return; // undecodable card; a later seq may still arrive
        }
        it->second.last_seq = c->seq;
        ++it->second.received;
    }
}

void Node::on_request(const netsim::Delivery& d, const exchange::Request& req)
{
    const auto reply = responder_.handle_request(d.from, req, own_code(), sim_.now_ms(), [&] {
        SendRecord rec{req.request_id, req.requester_code, decide(req.requester_code), std::nullopt, false};
        exchange::PolicyAnswer answer = exchange::PolicyAnswer::deny();
        if (rec.decision.kind == Decision::Kind::Auto) {
            if (auto p = profiles_.get(*rec.decision.profile_id)) {
                rec.sent_profile = p->profile_id;
                answer = exchange::PolicyAnswer::send(std::move(*p));
            }
        } else if (rec.decision.kind == Decision::Kind::Ask) {
            rec.deferred = true;
            PendingApproval p{req.request_id, d.from, req.requester_code, now_ms(), PendingApproval::State::Waiting,
                              rec.decision.profile_id, d.transport};
            approvals_[req.request_id] = p;
            const auto tag = kTagApproval | next_tag_++;
            approval_timer_[tag] = req.request_id;
            sim_.schedule_timer(self_.id, sim_.now_ms() + options_.approval_timeout_ms, tag);
            answer = exchange::PolicyAnswer::defer();
        }
        send_log_.push_back(rec);
        return answer;
    });
    send_frame(d.from, d.transport, reply);
}

void Node::on_exchange_outcome(const exchange::Requester::Outcome& o)
{
    const auto it = op_by_request_.find(o.request_id);
    if (it == op_by_request_.end())
        return;
    const auto op = it->second;
    op_by_request_.erase(it);
    switch (o.state) {
    case exchange::SessionState::Completed:
        try {
            const auto e = contacts_.save(o.target, o.gfc_bytes, now_ms(), o.transport);
            finish_op(op, ApiDoc{}
                              .add("ENTRY", std::to_string(e.entry_id))
                              .add("CODE", o.target.text())
                              .add("NAME", e.card.profile_snapshot.name));
        } catch (const Error& e) {
            fail_op(op, e.code(), "peer sent an invalid card: " + e.detail());
        }
        break;
    case exchange::SessionState::Denied:
        if (o.deny_reason == exchange::kDenyUnknownCode)
            fail_op(op, Errc::NotFound, "peer does not own " + o.target.text());
        else if (o.deny_reason == exchange::kDenyBusy)
            fail_op(op, Errc::Busy, "peer is busy");
        else
            fail_op(op, Errc::Refused, "peer refused the exchange");
        break;
    default:
        fail_op(op, Errc::Timeout, "no answer from peer");
        break;
    }
}

void Node::on_registry_result(const registry::RegistryClient::Result& r)
{
    const auto it = op_by_txn_.find(r.txn);
    if (it == op_by_txn_.end())
        return;
    const auto op_id = it->second;
    op_by_txn_.erase(it);
    auto target = resolve_target_.find(r.txn);
    std::optional<GcCode> exchange_target;
    if (target != resolve_target_.end()) {
        exchange_target = target->second;
        resolve_target_.erase(target);
    }
    const auto kind = ops_.at(op_id).kind;

    if (!r.reply) {
        fail_op(op_id, Errc::Timeout, "registry did not answer");
        return;
    }
    if (const auto* e = std::get_if<registry::RegError>(&*r.reply)) {
        if (kind == "VERIFY" && (e->error == Errc::Expired || e->error == Errc::UnknownChallenge)) {
            identity_.pending_code.reset();
            identity_.pending_phone.reset();
            save_identity();
        }
        if (kind == "REGISTER") {
            identity_.pending_code.reset();
            identity_.pending_phone.reset();
        }
        fail_op(op_id, e->error, e->detail);
        return;
    }
    if (const auto* c = std::get_if<registry::RegChallenge>(&*r.reply)) {
        if (kind == "REGISTER") {
            identity_.challenge_id = c->challenge_id;
            identity_.expires_at = c->expires_at;
            save_identity();
        }
        finish_op(op_id, ApiDoc{}
                             .add("CODE", c->code.text())
                             .add("EXPIRES", std::to_string(c->expires_at))
                             .add("ATTEMPTS", std::to_string(c->attempts_left)));
        return;
    }
    if (const auto* ok = std::get_if<registry::RegOk>(&*r.reply)) {
        if (kind == "VERIFY") {
            identity_.active_code = ok->code;
            identity_.active_phone = identity_.pending_phone;
            identity_.pending_code.reset();
            identity_.pending_phone.reset();
            identity_.challenge_id = Id128{};
            save_identity();
            sim_.advertise(self_.id, ok->code.text());
        } else if (kind == "REVOKE") {
            identity_.active_code.reset();
            identity_.active_phone.reset();
            save_identity();
            sim_.advertise(self_.id, "");
        }
        finish_op(op_id, ApiDoc{}.add("CODE", ok->code.text()).add("STATUS", registry::status_name(ok->status)));
        return;
    }
    if (const auto* res = std::get_if<registry::ResolveOk>(&*r.reply)) {
        if (!exchange_target)
            return;
        if (!res->endpoint.reaches(TransportClass::WideArea)) {
            fail_op(op_id, Errc::NotInRange, "peer has no wide-area link");
            return;
        }
        start_request(op_id, res->endpoint.id, *exchange_target, TransportClass::WideArea);
        return;
    }
    fail_op(op_id, Errc::MalformedPayload, "unexpected registry reply");
}

void Node::on_timer(std::uint64_t tag, std::int64_t now)
{
    switch (tag >> kTagShift) {
    case kTagRequester >> kTagShift:
        if (auto o = requester_->on_timer(tag, now))
            on_exchange_outcome(*o);
        return;
    case kTagRegistry >> kTagShift:
        if (auto r = registry_->on_timer(tag, now))
            on_registry_result(*r);
        return;
    case kTagApproval >> kTagShift: {
        const auto t = approval_timer_.find(tag);
        if (t == approval_timer_.end())
            return;
        const auto a = approvals_.find(t->second);
        approval_timer_.erase(t);
        if (a != approvals_.end() && a->second.state == PendingApproval::State::Waiting)
            resolve_approval(a->second, false, std::nullopt);
        return;
    }
    case kTagJoin >> kTagShift: {
        const auto t = join_timer_.find(tag);
        if (t == join_timer_.end())
            return;
        const auto room = t->second;
        auto& j = joining_.at(room);
        if (j.sends > options_.retry.max_retries) {
            fail_op(j.op_id, Errc::Timeout, "room host did not answer");
            sim_.leave_room(room, self_.id);
            join_timer_.erase(t);
            joining_.erase(room);
            return;
        }
        ++j.sends;
        const auto bytes = exchange::encode_message(exchange::RoomJoin{room, self_});
        for (const auto id : sim_.room_members(room)) {
            if (id != self_.id)
                send_frame(id, TransportClass::Proximity, bytes);
        }
        sim_.schedule_timer(self_.id, now + options_.retry.interval_ms, tag);
        return;
    }
    default:
        return;
    }
}

} // namespace gfcx::node
