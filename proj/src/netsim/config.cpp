#include "gfcx/netsim/config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "gfcx/core/error.hpp"

namespace gfcx::netsim {

namespace {

std::string_view trim(std::string_view s)
{
    while (!s.empty() && (s.front() == ' ' || s.front() == '\t' || s.front() == '\r'))
        s.remove_prefix(1);
    while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
        s.remove_suffix(1);
    return s;
}

template <class T>
T parse_number(std::string_view key, std::string_view text)
{
    T value{};
    const auto res = std::from_chars(text.data(), text.data() + text.size(), value);
    if (res.ec != std::errc{} || res.ptr != text.data() + text.size())
        throw Error(Errc::InvalidConfig, "bad value for " + std::string(key) + ": '" + std::string(text) + "'");
    return value;
}

void check_link(const LinkProfile& link, const char* name)
{
    if (!(link.loss_rate >= 0.0 && link.loss_rate <= 1.0))
        throw Error(Errc::InvalidConfig, std::string(name) + ".loss_rate must be within [0, 1]");
    if (link.latency_min_ms < 0 || link.latency_min_ms > link.latency_max_ms)
        throw Error(Errc::InvalidConfig, std::string(name) + " latency range must satisfy 0 <= min <= max");
}

} // namespace

void NetConfig::validate() const
{
    check_link(proximity, "proximity");
    check_link(wide_area, "wide_area");
}

NetConfig parse_net_config(std::string_view text)
{
    NetConfig cfg;
    std::size_t line_no = 0;
    while (!text.empty()) {
        ++line_no;
        const auto nl = text.find('\n');
        auto line = text.substr(0, nl);
        text = nl == std::string_view::npos ? std::string_view{} : text.substr(nl + 1);
        if (const auto hash = line.find('#'); hash != std::string_view::npos)
            line = line.substr(0, hash);
        line = trim(line);
        if (line.empty())
            continue;
        const auto eq = line.find('=');
        if (eq == std::string_view::npos)
            throw Error(Errc::InvalidConfig, "line " + std::to_string(line_no) + ": expected key = value");
        const auto key = trim(line.substr(0, eq));
        const auto value = trim(line.substr(eq + 1));
        if (key == "seed")
            cfg.seed = parse_number<std::uint64_t>(key, value);
        else if (key == "proximity.latency_min_ms")
            cfg.proximity.latency_min_ms = parse_number<std::int64_t>(key, value);
        else if (key == "proximity.latency_max_ms")
            cfg.proximity.latency_max_ms = parse_number<std::int64_t>(key, value);
        else if (key == "proximity.loss_rate")
            cfg.proximity.loss_rate = parse_number<double>(key, value);
        else if (key == "wide_area.latency_min_ms")
            cfg.wide_area.latency_min_ms = parse_number<std::int64_t>(key, value);
        else if (key == "wide_area.latency_max_ms")
            cfg.wide_area.latency_max_ms = parse_number<std::int64_t>(key, value);
        else if (key == "wide_area.loss_rate")
            cfg.wide_area.loss_rate = parse_number<double>(key, value);
        else
            throw Error(Errc::InvalidConfig, "unknown key '" + std::string(key) + "'");
    }
    cfg.validate();
    return cfg;
}

NetConfig load_net_config(const std::filesystem::path& path)
{
    std::ifstream in(path, std::ios::binary);
    if (!in)
        throw Error(Errc::Io, "cannot open " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return parse_net_config(ss.str());
}

std::string format_net_config(const NetConfig& c)
{
    std::ostringstream out;
    out.precision(17);
    out << "seed = " << c.seed << '\n'
        << "proximity.latency_min_ms = " << c.proximity.latency_min_ms << '\n'
        << "proximity.latency_max_ms = " << c.proximity.latency_max_ms << '\n'
        << "proximity.loss_rate = " << c.proximity.loss_rate << '\n'
        << "wide_area.latency_min_ms = " << c.wide_area.latency_min_ms << '\n'
        << "wide_area.latency_max_ms = " << c.wide_area.latency_max_ms << '\n'
        << "wide_area.loss_rate = " << c.wide_area.loss_rate << '\n';
    return out.str();
}

} // namespace gfcx::netsim
