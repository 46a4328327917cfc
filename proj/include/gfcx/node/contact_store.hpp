#pragma once

#include <filesystem>
#include <optional>
#include <shared_mutex>
#include <string>
#include <vector>

#include "gfcx/core/contact_card.hpp"
#include "gfcx/core/fsutil.hpp"

namespace gfcx::node {

struct ContactEntry {
    std::uint64_t entry_id = 0;
    ContactCard card;
    std::string wire_bytes; // the GFC/1 document as received
};

/// Conjunctive filter; unset members match everything.
struct ContactQuery {
    std::optional<std::string> text;           // case-insensitive substring of the name or any field value
    std::optional<std::string> classification; // case-insensitive equality
    std::optional<std::string> source_code;    // exact
    std::optional<std::int64_t> from_ms;       // inclusive
    std::optional<std::int64_t> to_ms;         // inclusive
};

bool is_valid_classification(std::string_view label) noexcept;

/// Append-only contacts log. Record layout:
///   C|<entry>|<code>|<received_ms>|<TRANSPORT>|<byte length>\n<GFC bytes>\n
///   K|<entry>|<label>\n     (classification; the last one wins)
class ContactStore {
public:
    /// Replays `log_path` if present; a torn final record is cut off.
    explicit ContactStore(std::filesystem::path log_path);

    /// Parses `gfc_bytes` (throws its parse error). received_at is bumped by
    /// 1 ms on collision with an earlier entry from the same code.
    ContactEntry save(const GcCode& source, std::string gfc_bytes, std::int64_t received_ms, TransportClass transport,
                      std::optional<std::string> classification = std::nullopt);
    /// Throws Error{NotFound|Validation}.
    void classify(std::uint64_t entry_id, const std::string& label);

    std::optional<ContactEntry> get(std::uint64_t entry_id) const;
    /// Newest first (received_at descending, then entry id descending).
    std::vector<ContactEntry> search(const ContactQuery& query) const;
    std::vector<ContactEntry> list() const { return search({}); }
    std::size_t size() const;

private:
    void replay();

    std::filesystem::path path_;
    mutable std::shared_mutex mutex_;
    std::vector<ContactEntry> entries_; // entry_id == index + 1
    AppendFile log_;
};

} // namespace gfcx::node
