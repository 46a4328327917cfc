#include "gfcx/node/contact_store.hpp"

#include <algorithm>
#include <charconv>
#include <mutex>

#include "gfcx/core/error.hpp"
#include "gfcx/core/gfc_format.hpp"
#include "gfcx/node/lines.hpp"

namespace gfcx::node {

namespace {

std::string lower(std::string_view s)
{
    std::string out(s);
    for (auto& c : out) {
        if (c >= 'A' && c <= 'Z')
            c = static_cast<char>(c - 'A' + 'a');
    }
    return out;
}

template <class T>
bool parse_num(std::string_view s, T& out)
{
    const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), out);
    return ec == std::errc{} && p == s.data() + s.size() && !s.empty();
}

bool matches(const ContactEntry& e, const ContactQuery& q)
{
    if (q.source_code && e.card.source_code.text() != *q.source_code)
        return false;
    if (q.from_ms && e.card.received_at_ms < *q.from_ms)
        return false;
    if (q.to_ms && e.card.received_at_ms > *q.to_ms)
        return false;
    if (q.classification && (!e.card.classification || lower(*e.card.classification) != lower(*q.classification)))
        return false;
    if (q.text) {
        const auto needle = lower(*q.text);
        bool hit = lower(e.card.profile_snapshot.name).find(needle) != std::string::npos;
        for (const auto& f : e.card.profile_snapshot.fields)
            hit = hit || lower(f.value).find(needle) != std::string::npos;
        if (!hit)
            return false;
    }
    return true;
}

} // namespace

bool is_valid_classification(std::string_view label) noexcept
{
    return is_valid_profile_name(label);
}

ContactStore::ContactStore(std::filesystem::path log_path)
    : path_(std::move(log_path))
{
    replay();
    log_ = AppendFile(path_);
}

void ContactStore::replay()
{
    std::string content;
    if (!std::filesystem::exists(path_))
        return;
    content = read_file(path_);
    std::size_t pos = 0;
    std::size_t good = 0;
    auto corrupt = [&](const std::string& what) {
        throw Error(Errc::Io, path_.string() + ": " + what + " at byte " + std::to_string(pos));
    };
    while (pos < content.size()) {
        const auto nl = content.find('\n', pos);
        if (nl == std::string::npos)
            break;
        const std::string_view line(content.data() + pos, nl - pos);
        const auto parts = split_bar(line);
        if (parts[0] == "C" && parts.size() == 6) {
            std::uint64_t id = 0;
            std::int64_t at = 0;
            std::size_t len = 0;
            if (!parse_num(parts[1], id) || !parse_num(parts[3], at) || !parse_num(parts[5], len) ||
                id != entries_.size() + 1)
                corrupt("bad contact header");
            const auto body = nl + 1;
            if (body + len + 1 > content.size())
                break; // torn record
            if (content[body + len] != '\n')
                corrupt("contact body not terminated");
            auto bytes = content.substr(body, len);
            ContactCard card{validate_code(parts[2]), parse_gfc(bytes), at, transport_from_name(parts[4]),
                             std::nullopt};
            entries_.push_back(ContactEntry{id, std::move(card), std::move(bytes)});
            pos = body + len + 1;
        } else if (parts[0] == "K" && parts.size() == 3) {
            std::uint64_t id = 0;
            if (!parse_num(parts[1], id) || id == 0 || id > entries_.size())
                corrupt("classification for unknown entry");
            entries_[id - 1].card.classification = std::string(parts[2]);
            pos = nl + 1;
        } else {
            corrupt("unrecognized record");
        }
        good = pos;
    }
    if (good < content.size())
        std::filesystem::resize_file(path_, good);
}

ContactEntry ContactStore::save(const GcCode& source, std::string gfc_bytes, std::int64_t received_ms,
                                TransportClass transport, std::optional<std::string> classification)
{
    if (classification && !is_valid_classification(*classification))
        throw Error(Errc::Validation, "classification must be 1-64 bytes of UTF-8 without '|'");
    auto snapshot = parse_gfc(gfc_bytes);

    std::unique_lock lock(mutex_);
    for (const auto& other : entries_) {
        if (other.card.source_code == source && other.card.received_at_ms >= received_ms)
            received_ms = other.card.received_at_ms + 1;
    }
    ContactEntry e{entries_.size() + 1, ContactCard{source, std::move(snapshot), received_ms, transport, classification},
                   std::move(gfc_bytes)};

    std::string rec = "C|" + std::to_string(e.entry_id) + "|" + source.text() + "|" + std::to_string(received_ms) +
                      "|" + std::string(transport_name(transport)) + "|" + std::to_string(e.wire_bytes.size()) + "\n" +
                      e.wire_bytes + "\n";
    if (classification)
        rec += "K|" + std::to_string(e.entry_id) + "|" + *classification + "\n";
    log_.append(rec);
    entries_.push_back(e);
    return e;
}

void ContactStore::classify(std::uint64_t entry_id, const std::string& label)
{
    if (!is_valid_classification(label))
        throw Error(Errc::Validation, "classification must be 1-64 bytes of UTF-8 without '|'");
    std::unique_lock lock(mutex_);
    if (entry_id == 0 || entry_id > entries_.size())
        throw Error(Errc::NotFound, "no contact entry " + std::to_string(entry_id));
    log_.append("K|" + std::to_string(entry_id) + "|" + label + "\n");
    entries_[entry_id - 1].card.classification = label;
}

std::optional<ContactEntry> ContactStore::get(std::uint64_t entry_id) const
{
    std::shared_lock lock(mutex_);
    if (entry_id == 0 || entry_id > entries_.size())
        return std::nullopt;
    return entries_[entry_id - 1];
}

std::vector<ContactEntry> ContactStore::search(const ContactQuery& query) const
{
    std::shared_lock lock(mutex_);
    std::vector<ContactEntry> out;
    for (const auto& e : entries_) {
        if (matches(e, query))
            out.push_back(e);
    }
    std::sort(out.begin(), out.end(), [](const ContactEntry& a, const ContactEntry& b) {
        if (a.card.received_at_ms != b.card.received_at_ms)
            return a.card.received_at_ms > b.card.received_at_ms;
        return a.entry_id > b.entry_id;
    });
    return out;
}

std::size_t ContactStore::size() const
{
    std::shared_lock lock(mutex_);
    return entries_.size();
}

} // namespace gfcx::node
