#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <random>
#include <shared_mutex>
#include <string>
#include <vector>

#include "gfcx/core/profile.hpp"

namespace gfcx::node {

/// One GFC/1 file per profile under `<dir>/`. Every mutation is on disk before
/// it returns. Profile names are unique within a store.
class ProfileStore {
public:
    /// Loads every *.gfc file in `dir` (created if missing). Throws Error{Io}
    /// or the parse error of a corrupt file.
    ProfileStore(std::filesystem::path dir, std::uint64_t seed);

    /// Throws Error{Validation} (duplicate name) or the gfc-core validation error.
    Profile create(std::string name, std::vector<ProfileField> fields, Timestamp now);
    /// Replaces name and fields. Throws Error{NotFound|Validation}.
    Profile update(const Id128& id, std::string name, std::vector<ProfileField> fields, Timestamp now);
    /// Throws Error{NotFound}.
    void remove(const Id128& id);

    std::optional<Profile> get(const Id128& id) const;
    std::optional<Profile> by_name(std::string_view name) const;
    bool contains(const Id128& id) const;
    /// Ordered by created_at, then id.
    std::vector<Profile> list() const;
    std::size_t size() const;

private:
    std::filesystem::path file_for(const Id128& id) const;
    void check_name_free(std::string_view name, const Id128* except) const;

    std::filesystem::path dir_;
    mutable std::shared_mutex mutex_;
    std::mt19937_64 rng_;
    std::map<Id128, Profile> profiles_;
};

} // namespace gfcx::node
