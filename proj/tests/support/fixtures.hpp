#pragma once

#include <filesystem>
#include <string>

namespace fixture {

/// Fresh directory under the system temp dir, removed on destruction.
class TempDir {
  public:
    explicit TempDir(const std::string &tag = "cxrforge");
    ~TempDir();
    TempDir(const TempDir &) = delete;
    TempDir &operator=(const TempDir &) = delete;

    const std::filesystem::path &path() const { return path_; }
    std::string str() const { return path_.string(); }
    std::string file(const std::string &rel) const { return (path_ / rel).string(); }
    /// Writes `content` to `rel`, creating parent directories.
    std::string write(const std::string &rel, const std::string &content) const;

  private:
    std::filesystem::path path_;
};

std::string read(const std::string &path);
std::string fixture_path(const std::string &rel);
std::string golden_path(const std::string &rel);
std::string data_path(const std::string &rel);

/// Copies the end-to-end fixture tree into `dest`.
void copy_e2e_fixture(const std::filesystem::path &dest);

struct RunResult {
    int exit_code = -1;
    std::string output; ///< stdout and stderr interleaved
};

/// Runs the forge executable with `args` (already shell-quoted) in `cwd`.
RunResult run_forge(const std::string &args, const std::string &cwd, const std::string &env = "");

} // namespace fixture
