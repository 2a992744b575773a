#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <vector>

#include <json.hpp>

namespace isoplan::cli {

using Json = nlohmann::ordered_json;

/// Lossless decimal form used in every CSV cell.
std::string number(double v);

/// Collects the files one run writes and emits the manifest at the end.
class RunRecorder {
public:
    RunRecorder(std::string subcommand, std::filesystem::path out_dir);

    Json& params() { return params_; }
    void set_seed(std::uint64_t seed) { seed_ = seed; has_seed_ = true; }

    /// Writes `name` (CSV with a header row) and its `name.json` sidecar.
    void write_csv(const std::string& name, const std::vector<std::string>& columns,
                   const std::vector<std::vector<std::string>>& rows, Json meta = Json::object());

    /// Writes a standalone JSON document.
    void write_json(const std::string& name, const Json& doc);

    /// Writes manifest.json with checksums and the wall-clock duration.
    void finish(double seconds);

    const std::filesystem::path& out_dir() const { return out_dir_; }

private:
    void record(const std::filesystem::path& path);

    std::string subcommand_;
    std::filesystem::path out_dir_;
    Json params_ = Json::object();
    std::vector<std::filesystem::path> outputs_;
    std::uint64_t seed_ = 0;
    bool has_seed_ = false;
};

std::string sha256_file(const std::filesystem::path& path);

}  // namespace isoplan::cli
