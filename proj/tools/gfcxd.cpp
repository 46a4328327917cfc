// Real-time host for a registry and a set of named nodes on the simulated
// network. Prints one NODE line per node so scripts can find ports and tokens.

#include <csignal>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "gfcx/cli/daemon.hpp"
#include "gfcx/core/error.hpp"
#include "gfcx/cli/cli.hpp"
#include "gfcx/netsim/config.hpp"

namespace {

volatile std::sig_atomic_t g_stop = 0;

void on_signal(int)
{
    g_stop = 1;
}

} // namespace

int main(int argc, char** argv)
{
    CLI::App app{"Run a gfcx registry and nodes on a simulated network.", "gfcxd"};
    gfcx::cli::DaemonOptions o;
    std::string nodes = "me";
    std::string net_file;
    std::uint64_t seed = 1;
    app.add_option("--state", o.world.state_dir, "state directory")->required();
    app.add_option("--nodes", nodes, "comma-separated node names")->capture_default_str();
    app.add_option("--host", o.host, "listen address")->capture_default_str();
    app.add_option("--port", o.base_port, "port of the first node; 0 for ephemeral")->capture_default_str();
    app.add_option("--http-port", o.http_port, "HTTP bridge port, -1 off, 0 ephemeral")->capture_default_str();
    app.add_option("--webui", o.webui_dir, "static web client directory served at /");
    app.add_option("--net", net_file, "network config file (key = value)");
    app.add_option("--seed", seed, "seed for the network and every node")->capture_default_str();
    app.add_option("--tick-ms", o.tick_ms, "network clock step")->capture_default_str()->check(CLI::PositiveNumber);
    try {
        app.parse(argc, argv);
    } catch (const CLI::Success& e) {
        return app.exit(e);
    } catch (const CLI::ParseError& e) {
        std::cerr << "ERROR|Validation|" << e.what() << "\n";
        return 1;
    }

    try {
        if (!net_file.empty())
            o.world.net = gfcx::netsim::load_net_config(net_file);
        else
            o.world.net.seed = seed;
        o.world.seed = seed;
        o.world.epoch_ms = std::chrono::duration_cast<std::chrono::milliseconds>(
                               std::chrono::system_clock::now().time_since_epoch())
                               .count();
        std::stringstream ss(nodes);
        for (std::string n; std::getline(ss, n, ',');)
            if (!n.empty())
                o.nodes.push_back(n);

        gfcx::cli::Daemon d(o);
        d.start();
        for (const auto& n : o.nodes)
            std::cout << "NODE|" << n << "|" << o.host << ":" << d.port_of(n) << "|" << d.token_path(n).string() << "\n";
        if (d.http_port())
            std::cout << "HTTP|" << o.host << ":" << *d.http_port() << "\n";
        std::cout << std::flush;

        std::signal(SIGINT, on_signal);
        std::signal(SIGTERM, on_signal);
        while (!g_stop)
            std::this_thread::sleep_for(std::chrono::milliseconds(100));
        d.stop();
        return 0;
    } catch (const gfcx::Error& e) {
        std::cerr << "ERROR|" << gfcx::errc_name(e.code()) << "|" << e.detail() << "\n";
        return gfcx::cli::exit_code_for(e.code());
    }
}
