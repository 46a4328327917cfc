#include "gfcx/core/fsutil.hpp"

#include <fcntl.h>
#include <unistd.h>

#include <cerrno>
#include <cstring>
#include <fstream>
#include <sstream>

#include "gfcx/core/error.hpp"

namespace gfcx {

namespace {

[[noreturn]] void io_error(const std::string& what, const std::filesystem::path& path)
{
    throw Error(Errc::Io, what + " " + path.string() + ": " + std::strerror(errno));
}

void write_all(int fd, std::string_view bytes, const std::filesystem::path& path)
{
    while (!bytes.empty()) {
        const auto n = ::write(fd, bytes.data(), bytes.size());
        if (n < 0) {
            if (errno == EINTR)
                continue;
            io_error("write", path);
        }
        bytes.remove_prefix(static_cast<std::size_t>(n));
    }
}

void sync_dir(const std::filesystem::path& dir)
{
    const int fd = ::open(dir.empty() ? "." : dir.c_str(), O_RDONLY | O_DIRECTORY);
    if (fd >= 0) {
        ::fsync(fd);
        ::close(fd);
    }
}

} // namespace

AppendFile::AppendFile(const std::filesystem::path& path)
{
    fd_ = ::open(path.c_str(), O_WRONLY | O_CREAT | O_APPEND | O_CLOEXEC, 0600);
    if (fd_ < 0)
        io_error("open", path);
}

AppendFile::~AppendFile()
{
    if (fd_ >= 0)
        ::close(fd_);
}

AppendFile::AppendFile(AppendFile&& other) noexcept : fd_(other.fd_)
{
    other.fd_ = -1;
}

AppendFile& AppendFile::operator=(AppendFile&& other) noexcept
{
    if (this != &other) {
        if (fd_ >= 0)
            ::close(fd_);
        fd_ = other.fd_;
        other.fd_ = -1;
    }
    return *this;
}

void AppendFile::append(std::string_view bytes)
{
    if (fd_ < 0)
        throw Error(Errc::Io, "append to closed file");
    write_all(fd_, bytes, "<append log>");
    if (::fsync(fd_) != 0)
        io_error("fsync", "<append log>");
}

void write_file_durably(const std::filesystem::path& path, std::string_view content)
{
    auto tmp = path;
    tmp += ".tmp";
    const int fd = ::open(tmp.c_str(), O_WRONLY | O_CREAT | O_TRUNC | O_CLOEXEC, 0600);
    if (fd < 0)
        io_error("open", tmp);
    try {
        write_all(fd, content, tmp);
    } catch (...) {
        ::close(fd);
        throw;
    }
    if (::fsync(fd) != 0) {
        ::close(fd);
        io_error("fsync", tmp);
    }
    ::close(fd);
    if (::rename(tmp.c_str(), path.c_str()) != 0)
        io_error("rename", path);
    sync_dir(path.parent_path());
}

void remove_file_durably(const std::filesystem::path& path)
{
    std::error_code ec;
    std::filesystem::remove(path, ec);
    if (ec)
        throw Error(Errc::Io, "remove " + path.string() + ": " + ec.message());
    sync_dir(path.parent_path());
}

std::string read_file(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::Io, "cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

} // namespace gfcx
