#include "gfcx/node/world.hpp"

#include "gfcx/core/error.hpp"

namespace gfcx::node {

Id128 hall_room()
{
    Id128 id;
    id.bytes.fill(0xA1);
    return id;
}

World::World(WorldOptions options)
    : options_(std::move(options))
    , sim_(options_.net)
    , next_seed_(options_.seed * 0x9E3779B97F4A7C15ULL + 1)
{
    std::filesystem::create_directories(options_.state_dir / "nodes");
    sms_log_ = std::make_unique<AppendFile>(options_.state_dir / "sms.log");
    registry::RegistryOptions ro;
    ro.seed = options_.seed ^ 0xBADC0DE;
    if (options_.persist_registry)
        ro.log_path = options_.state_dir / "registry.log";
    registry_ = std::make_unique<registry::Registry>(
        [this](const PhoneNumber& phone, const std::string& otp) {
            inbox_.deliver(phone, otp);
            sms_log_->append(phone.text() + "|" + otp + "\n");
        },
        ro);
    registry_node_ = std::make_unique<registry::RegistryNode>(sim_, *registry_, options_.epoch_ms / 1000);
}

World::~World() = default;

std::filesystem::path World::node_dir(const std::string& name) const
{
    return options_.state_dir / "nodes" / name;
}

Node& World::add_node(const std::string& name, std::uint8_t reachability)
{
    if (name.empty() || name.find_first_of("/\\.") != std::string::npos)
        throw Error(Errc::Validation, "node names must be plain words");
    if (nodes_.count(name))
        throw Error(Errc::Validation, "node " + name + " already exists");
    NodeOptions no;
    no.dir = node_dir(name);
    no.seed = next_seed_++;
    no.epoch_ms = options_.epoch_ms;
    auto n = std::make_unique<Node>(sim_, registry_node_->endpoint().id, no, reachability);
    if (options_.colocate && n->endpoint().reaches(TransportClass::Proximity))
        sim_.join_room(hall_room(), n->endpoint().id);
    auto& ref = *n;
    nodes_.emplace(name, std::move(n));
    return ref;
}

Node& World::node(const std::string& name)
{
    const auto it = nodes_.find(name);
    if (it == nodes_.end())
        throw Error(Errc::NotFound, "no node " + name);
    return *it->second;
}

std::vector<std::string> World::node_names() const
{
    std::vector<std::string> out;
    for (const auto& [name, n] : nodes_)
        out.push_back(name);
    return out;
}

void World::run_for(std::int64_t ms)
{
    sim_.advance(sim_.now_ms() + ms);
}

ApiReply World::call(const std::string& name, std::uint8_t type, const ApiDoc& body)
{
    auto& n = node(name);
    return decode_api_reply(n.local_api(encode_api_request(type, n.token(), body)));
}

ApiReply World::wait_op(const std::string& name, const ApiReply& started, std::int64_t limit_ms)
{
    if (!started.ok)
        return started;
    const auto op = started.doc.value("OP");
    if (!op)
        throw Error(Errc::Validation, "reply carries no OP");
    const auto deadline = sim_.now_ms() + limit_ms;
    for (;;) {
        auto r = call(name, kOpStatus, ApiDoc{}.add("OP", *op));
        if (!r.ok || r.doc.value("STATE") != "RUNNING" || sim_.now_ms() >= deadline)
            return r;
        run_for(50);
    }
}

ApiReply World::register_code(const std::string& name, const std::string& code, const std::string& phone)
{
    auto r = wait_op(name, call(name, kCodeRegister, ApiDoc{}.add("CODE", code).add("PHONE", phone)));
    if (!r.ok || r.doc.value("STATE") != "DONE")
        return r;
    const auto otp = inbox_.latest(phone);
    if (!otp)
        throw Error(Errc::NotFound, "no OTP delivered to " + phone);
    return wait_op(name, call(name, kCodeVerify, ApiDoc{}.add("OTP", *otp)));
}

} // namespace gfcx::node
