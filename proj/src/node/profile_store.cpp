#include "gfcx/node/profile_store.hpp"

#include <algorithm>
#include <mutex>

#include "gfcx/core/error.hpp"
#include "gfcx/core/fsutil.hpp"
#include "gfcx/core/gfc_format.hpp"

namespace gfcx::node {

ProfileStore::ProfileStore(std::filesystem::path dir, std::uint64_t seed)
    : dir_(std::move(dir))
    , rng_(seed)
{
    std::error_code ec;
    std::filesystem::create_directories(dir_, ec);
    if (ec)
        throw Error(Errc::Io, "cannot create " + dir_.string() + ": " + ec.message());
    for (const auto& entry : std::filesystem::directory_iterator(dir_)) {
        if (!entry.is_regular_file() || entry.path().extension() != ".gfc")
            continue;
        auto p = parse_gfc(read_file(entry.path()));
        if (entry.path().stem().string() != p.profile_id.hex())
            throw Error(Errc::Io, entry.path().string() + " does not match its profile id");
        profiles_.emplace(p.profile_id, std::move(p));
    }
}

std::filesystem::path ProfileStore::file_for(const Id128& id) const
{
    return dir_ / (id.hex() + ".gfc");
}

void ProfileStore::check_name_free(std::string_view name, const Id128* except) const
{
    for (const auto& [id, p] : profiles_) {
        if (p.name == name && (!except || id != *except))
            throw Error(Errc::Validation, "a profile named '" + std::string(name) + "' already exists");
    }
}

Profile ProfileStore::create(std::string name, std::vector<ProfileField> fields, Timestamp now)
{
    std::unique_lock lock(mutex_);
    Profile p;
    p.name = std::move(name);
    p.fields = std::move(fields);
    p.created_at = now;
    p.updated_at = now;
    do {
        p.profile_id = Id128::random(rng_);
    } while (profiles_.count(p.profile_id));
    validate_profile(p);
    check_name_free(p.name, nullptr);
    write_file_durably(file_for(p.profile_id), serialize_gfc(p));
    profiles_.emplace(p.profile_id, p);
    return p;
}

Profile ProfileStore::update(const Id128& id, std::string name, std::vector<ProfileField> fields, Timestamp now)
{
    std::unique_lock lock(mutex_);
    const auto it = profiles_.find(id);
    if (it == profiles_.end())
        throw Error(Errc::NotFound, "no profile " + id.hex());
    Profile p = it->second;
    p.name = std::move(name);
    p.fields = std::move(fields);
    p.updated_at = std::max(now, p.created_at);
    validate_profile(p);
    check_name_free(p.name, &id);
    write_file_durably(file_for(id), serialize_gfc(p));
    it->second = p;
    return p;
}

void ProfileStore::remove(const Id128& id)
{
    std::unique_lock lock(mutex_);
    const auto it = profiles_.find(id);
    if (it == profiles_.end())
        throw Error(Errc::NotFound, "no profile " + id.hex());
    remove_file_durably(file_for(id));
    profiles_.erase(it);
}

std::optional<Profile> ProfileStore::get(const Id128& id) const
{
    std::shared_lock lock(mutex_);
    const auto it = profiles_.find(id);
    if (it == profiles_.end())
        return std::nullopt;
    return it->second;
}

std::optional<Profile> ProfileStore::by_name(std::string_view name) const
{
    std::shared_lock lock(mutex_);
    for (const auto& [id, p] : profiles_) {
        if (p.name == name)
            return p;
    }
    return std::nullopt;
}

bool ProfileStore::contains(const Id128& id) const
{
    std::shared_lock lock(mutex_);
    return profiles_.count(id) != 0;
}

std::vector<Profile> ProfileStore::list() const
{
    std::shared_lock lock(mutex_);
    std::vector<Profile> out;
    for (const auto& [id, p] : profiles_)
        out.push_back(p);
    std::stable_sort(out.begin(), out.end(),
                     [](const Profile& a, const Profile& b) { return a.created_at < b.created_at; });
    return out;
}

std::size_t ProfileStore::size() const
{
    std::shared_lock lock(mutex_);
    return profiles_.size();
}

} // namespace gfcx::node
