// viva: local analytics server, synthetic data generator and offline replay checker.

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <sstream>

#include <CLI11.hpp>

#include "viva/server.hpp"
#include "viva/synth.hpp"

namespace fs = std::filesystem;

namespace {

std::string config_dir_or_env(const std::string& flag) {
    if (const char* env = std::getenv("VIVA_CONFIG_DIR"); env && *env) return env;
    return flag;
}

void print_diagnostics(const std::vector<viva::LineDiagnostic>& diags) {
    for (const auto& d : diags) std::cerr << d.file << ":" << d.line_no << ": " << d.message << "\n";
}

std::vector<viva::UploadFile> read_data_dir(const fs::path& dir, const viva::SchemaConfig& schema) {
    std::vector<viva::UploadFile> files;
    for (const auto& name : schema.dataset_names()) {
        const auto p = dir / (name + ".csv");
        if (!fs::is_regular_file(p)) continue;
        std::ifstream in(p, std::ios::binary);
        std::ostringstream ss;
        ss << in.rdbuf();
        files.push_back({name, ss.str()});
    }
    return files;
}

int serve(int port, const std::string& dir_flag, bool open_browser) {
    const auto dir = config_dir_or_env(dir_flag);
    if (dir.empty()) {
        std::cerr << "serve: --config-dir (or VIVA_CONFIG_DIR) is required\n";
        return 2;
    }
    auto cfg = viva::load_config(dir);
    print_diagnostics(cfg.diagnostics);
    viva::Session session(std::move(cfg));
    viva::Server server(session);
    const int bound = server.bind("127.0.0.1", port);
    if (bound < 0) {
        std::cerr << "serve: cannot bind 127.0.0.1:" << port << "\n";
        return 1;
    }
    const auto url = "http://127.0.0.1:" + std::to_string(bound) + "/";
    std::cout << "listening on " << url << std::endl;
    if (open_browser) {
        const auto cmd = "xdg-open '" + url + "' >/dev/null 2>&1 &";
        if (std::system(cmd.c_str()) != 0) std::cerr << "could not open a browser\n";
    }
    return server.listen_after_bind() ? 0 : 1;
}

int synth(std::uint64_t seed, int months, double scale, const std::string& out, bool demo) {
    try {
        viva::synth::GeneratorSpec spec{seed, months, scale, demo};
        viva::synth::write(viva::synth::generate(spec), out);
    } catch (const viva::Error& e) {
        std::cerr << "synth: " << e.what() << "\n";
        return 2;
    }
    return 0;
}

std::vector<std::string> lines_of(const std::string& s) {
    std::vector<std::string> out;
    std::istringstream in(s);
    for (std::string l; std::getline(in, l);) out.push_back(l);
    return out;
}

int replay_check(const std::string& dir_flag, const std::string& data) {
    const auto dir = config_dir_or_env(dir_flag);
    auto cfg = viva::load_config(dir);
    print_diagnostics(cfg.diagnostics);
    const auto store = cfg.store;
    const auto files = read_data_dir(data, store.schema);
    if (files.empty()) {
        std::cerr << "replay-check: no <Dataset>.csv files for the schema in " << data << "\n";
        return 2;
    }
    std::vector<viva::Dataset> bases;
    try {
        for (const auto& f : files) bases.push_back(viva::parse_csv(f.bytes, f.dataset_name, store.schema, store.merges));
    } catch (const viva::Error& e) {
        std::cerr << "replay-check: " << e.what() << "\n";
        return 2;
    }
    auto incremental = viva::rebuild(store, bases);
    const auto range = viva::full_range(incremental.engine);
    int status = 0;
    for (const auto& s : incremental.suspended) {
        std::cout << "suspended " << s.record << " " << s.seq << ": " << s.cause << ": " << s.message << "\n";
        status = 1;
    }
    for (auto seq : incremental.dormant) std::cout << "dormant operation " << seq << " (dataset not present)\n";

    const auto pure = viva::replay(incremental.engine, incremental.engine.log);
    const auto a = viva::catalog_json(incremental.engine, incremental.concerns, store, range).dump(1);
    const auto b = viva::catalog_json(pure, incremental.concerns, store, range).dump(1);
    if (a == b && viva::state_fingerprint(incremental.engine) == viva::state_fingerprint(pure)) {
        std::cout << "replay equal: " << incremental.engine.log.size() << " operations, fingerprint "
                  << viva::hex64(viva::state_fingerprint(pure)) << "\n";
        return status;
    }
    std::cout << "replay MISMATCH\n";
    const auto la = lines_of(a), lb = lines_of(b);
    for (std::size_t i = 0; i < std::max(la.size(), lb.size()); ++i) {
        const auto& x = i < la.size() ? la[i] : std::string();
        const auto& y = i < lb.size() ? lb[i] : std::string();
        if (x != y) std::cout << "@" << i + 1 << "\n- " << x << "\n+ " << y << "\n";
    }
    return 1;
}

} // namespace

int main(int argc, char** argv) {
    CLI::App app{"VIVA attribute analytics"};
    app.require_subcommand(1);

    int port = 8080;
    std::string config_dir;
    bool open_browser = false;
    auto* serve_cmd = app.add_subcommand("serve", "Run the local HTTP server");
    serve_cmd->add_option("--port", port, "TCP port (0 picks one)")->check(CLI::Range(0, 65535));
    serve_cmd->add_option("--config-dir", config_dir, "Configuration directory");
    serve_cmd->add_flag("--open", open_browser, "Open a browser on the server URL");

    std::uint64_t seed = 1;
    int months = 12;
    double scale = 1.0;
    std::string out;
    bool demo = false;
    auto* synth_cmd = app.add_subcommand("synth", "Write synthetic CSVs and schema.cfg");
    synth_cmd->add_option("--seed", seed, "RNG seed");
    synth_cmd->add_option("--months", months, "Number of months");
    synth_cmd->add_option("--scale", scale, "Row count multiplier");
    synth_cmd->add_option("--out", out, "Output directory")->required();
    synth_cmd->add_flag("--demo-config", demo, "Also write demo concerns, orderings, colors and merges");

    std::string data;
    auto* check_cmd = app.add_subcommand("replay-check", "Verify that the logs replay to the same state");
    check_cmd->add_option("--config-dir", config_dir, "Configuration directory");
    check_cmd->add_option("--data", data, "Directory with <Dataset>.csv files")->required();

    CLI11_PARSE(app, argc, argv);
    if (*serve_cmd) return serve(port, config_dir, open_browser);
    if (*synth_cmd) return synth(seed, months, scale, out, demo);
    if (*check_cmd) return replay_check(config_dir, data);
    return 2;
}
