#include "output.hpp"

#include <array>
#include <cmath>
#include <fstream>
#include <stdexcept>

#include <fmt/format.h>
#include <openssl/evp.h>

#include "isoplan/version.hpp"

namespace isoplan::cli {

std::string number(double v) {
    if (std::isnan(v)) return "nan";
    return fmt::format("{:.17g}", v);
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw std::runtime_error("cannot read " + path.string());

    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    if (ctx == nullptr || EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr) != 1) {
        EVP_MD_CTX_free(ctx);
        throw std::runtime_error("sha256: digest initialization failed");
    }
    std::array<char, 1 << 16> buffer{};
    while (in) {
        in.read(buffer.data(), buffer.size());
        EVP_DigestUpdate(ctx, buffer.data(), static_cast<std::size_t>(in.gcount()));
    }
    std::array<unsigned char, EVP_MAX_MD_SIZE> digest{};
    unsigned int length = 0;
    EVP_DigestFinal_ex(ctx, digest.data(), &length);
    EVP_MD_CTX_free(ctx);

    std::string hex;
    for (unsigned int i = 0; i < length; ++i) hex += fmt::format("{:02x}", digest[i]);
    return hex;
}

RunRecorder::RunRecorder(std::string subcommand, std::filesystem::path out_dir)
    : subcommand_(std::move(subcommand)), out_dir_(std::move(out_dir)) {
    std::filesystem::create_directories(out_dir_);
}

void RunRecorder::record(const std::filesystem::path& path) { outputs_.push_back(path); }

void RunRecorder::write_csv(const std::string& name, const std::vector<std::string>& columns,
                            const std::vector<std::vector<std::string>>& rows, Json meta) {
    const auto path = out_dir_ / name;
    {
        std::ofstream out(path, std::ios::binary);
        if (!out) throw std::runtime_error("cannot write " + path.string());
        out << fmt::format("{}\n", fmt::join(columns, ","));
        for (const auto& row : rows) out << fmt::format("{}\n", fmt::join(row, ","));
    }
    record(path);

    Json sidecar = Json::object();
    sidecar["file"] = name;
    sidecar["columns"] = columns;
    sidecar["rows"] = rows.size();
    sidecar["subcommand"] = subcommand_;
    for (auto& [key, value] : meta.items()) sidecar[key] = value;
    sidecar["params"] = params_;
    write_json(name + ".json", sidecar);
}

void RunRecorder::write_json(const std::string& name, const Json& doc) {
    const auto path = out_dir_ / name;
    std::ofstream out(path, std::ios::binary);
    if (!out) throw std::runtime_error("cannot write " + path.string());
    out << doc.dump(2) << "\n";
    out.close();
    record(path);
}

void RunRecorder::finish(double seconds) {
    Json manifest = Json::object();
    manifest["subcommand"] = subcommand_;
    manifest["params"] = params_;
    if (has_seed_) {
        manifest["seed"] = seed_;
    } else {
        manifest["seed"] = nullptr;
    }
    manifest["version"] = kVersion;
    manifest["out_dir"] = out_dir_.string();
    Json outputs = Json::array();
    for (const auto& path : outputs_) {
        outputs.push_back({{"path", path.filename().string()}, {"sha256", sha256_file(path)}});
    }
    manifest["outputs"] = outputs;
    manifest["duration_seconds"] = seconds;

    std::ofstream out(out_dir_ / "manifest.json", std::ios::binary);
    if (!out) throw std::runtime_error("cannot write manifest");
    out << manifest.dump(2) << "\n";
}

}  // namespace isoplan::cli
