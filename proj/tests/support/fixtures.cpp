#include "support/fixtures.hpp"

#include <array>
#include <atomic>
#include <cstdio>
#include <fstream>
#include <random>
#include <sstream>
#include <stdexcept>
#include <sys/wait.h>
#include <unistd.h>

namespace fs = std::filesystem;

namespace fixture {

TempDir::TempDir(const std::string &tag) {
    static std::atomic<int> counter{0};
    std::random_device rd;
    for (int attempt = 0; attempt < 100; ++attempt) {
        const auto name = tag + "-" + std::to_string(::getpid()) + "-" + std::to_string(counter++) + "-" +
                          std::to_string(rd() % 100000);
        const auto p = fs::temp_directory_path() / name;
        if (fs::create_directory(p)) {
            path_ = p;
            return;
        }
    }
    throw std::runtime_error("cannot create temp dir");
}

TempDir::~TempDir() {
    std::error_code ec;
    fs::remove_all(path_, ec);
}

std::string TempDir::write(const std::string &rel, const std::string &content) const {
    const auto p = path_ / rel;
    fs::create_directories(p.parent_path());
    std::ofstream out(p, std::ios::binary);
    out << content;
    if (!out) throw std::runtime_error("cannot write " + p.string());
    return p.string();
}

std::string read(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path);
    std::ostringstream os;
    os << in.rdbuf();
    return os.str();
}

std::string fixture_path(const std::string &rel) { return std::string(CXRFORGE_FIXTURE_DIR) + "/" + rel; }
std::string golden_path(const std::string &rel) { return std::string(CXRFORGE_GOLDEN_DIR) + "/" + rel; }
std::string data_path(const std::string &rel) { return std::string(CXRFORGE_DATA_DIR) + "/" + rel; }

void copy_e2e_fixture(const fs::path &dest) {
    fs::create_directories(dest);
    fs::copy(fixture_path("e2e"), dest, fs::copy_options::recursive | fs::copy_options::overwrite_existing);
}

RunResult run_forge(const std::string &args, const std::string &cwd, const std::string &env) {
    const std::string cmd = "cd '" + cwd + "' && " + (env.empty() ? "" : env + " ") + "'" + CXRFORGE_FORGE_BIN + "' " +
                            args + " 2>&1";
    RunResult r;
    FILE *pipe = ::popen(cmd.c_str(), "r");
    if (!pipe) throw std::runtime_error("popen failed");
    std::array<char, 4096> buf{};
    std::size_t n = 0;
    while ((n = std::fread(buf.data(), 1, buf.size(), pipe)) > 0) r.output.append(buf.data(), n);
    const int status = ::pclose(pipe);
    r.exit_code = WIFEXITED(status) ? WEXITSTATUS(status) : -1;
    return r;
}

} // namespace fixture
