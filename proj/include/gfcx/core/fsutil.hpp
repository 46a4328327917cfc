#pragma once

#include <filesystem>
#include <string>
#include <string_view>

namespace gfcx {

/// Append-only file; every append is fsync'ed before returning.
class AppendFile {
public:
    AppendFile() = default;
    explicit AppendFile(const std::filesystem::path& path);
    ~AppendFile();
    AppendFile(AppendFile&& other) noexcept;
    AppendFile& operator=(AppendFile&& other) noexcept;
    AppendFile(const AppendFile&) = delete;
    AppendFile& operator=(const AppendFile&) = delete;

    bool is_open() const noexcept { return fd_ >= 0; }
    /// Throws Error{Io}.
    void append(std::string_view bytes);

private:
    int fd_ = -1;
};

/// Writes to a temp file, fsyncs, renames over `path`, fsyncs the directory.
void write_file_durably(const std::filesystem::path& path, std::string_view content);
void remove_file_durably(const std::filesystem::path& path);

/// Whole file as bytes; Error{Io} if unreadable.
std::string read_file(const std::filesystem::path& path);

} // namespace gfcx
