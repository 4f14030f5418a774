#include "qzeno/io.hpp"

#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>

#include <json.hpp>
#include <openssl/evp.h>

#include "qzeno/error.hpp"

#ifndef QZENO_VERSION
#define QZENO_VERSION "unknown"
#endif

namespace qzeno {

void Table::add(std::vector<double> row) {
    if (row.size() != columns.size()) throw ArgumentError("row width does not match the column count");
    rows.push_back(std::move(row));
}

namespace {

std::string cell(double v) {
    if (std::isnan(v)) return "nan";
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.12g", v);
    return buf;
}

}  // namespace

void write_csv(const std::filesystem::path& path, const Meta& meta, const Table& table) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary);
    if (!out) throw ConfigError("cannot write " + path.string());
    for (const auto& [k, v] : meta) out << "# " << k << '=' << v << '\n';
    out << "# units:";
    for (const auto& c : table.columns) out << ' ' << c.name << '=' << c.unit;
    out << '\n';
    for (std::size_t i = 0; i < table.columns.size(); ++i) out << (i ? "," : "") << table.columns[i].name;
    out << '\n';
    for (const auto& row : table.rows) {
        for (std::size_t i = 0; i < row.size(); ++i) out << (i ? "," : "") << cell(row[i]);
        out << '\n';
    }
    if (!out) throw ConfigError("failed writing " + path.string());
}

CsvFile read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path.string());
    CsvFile f;
    std::string line;
    while (std::getline(in, line)) {
        if (line.rfind("# ", 0) == 0) {
            const auto body = line.substr(2);
            if (body.rfind("units:", 0) == 0) {
                std::stringstream us(body.substr(6));
                std::string u;
                while (us >> u) f.units.push_back(u);
                continue;
            }
            const auto eq = body.find('=');
            if (eq != std::string::npos) f.meta.emplace_back(body.substr(0, eq), body.substr(eq + 1));
            continue;
        }
        std::stringstream ss(line);
        std::string item;
        if (f.columns.empty()) {
            while (std::getline(ss, item, ',')) f.columns.push_back(item);
            continue;
        }
        std::vector<double> row;
        while (std::getline(ss, item, ',')) row.push_back(item == "nan" ? NAN : std::stod(item));
        f.rows.push_back(std::move(row));
    }
    return f;
}

std::string sha256_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw ConfigError("cannot read " + path.string());
    EVP_MD_CTX* ctx = EVP_MD_CTX_new();
    EVP_DigestInit_ex(ctx, EVP_sha256(), nullptr);
    char buf[1 << 16];
    while (in) {
        in.read(buf, sizeof buf);
        if (in.gcount() > 0) EVP_DigestUpdate(ctx, buf, static_cast<std::size_t>(in.gcount()));
    }
    unsigned char md[EVP_MAX_MD_SIZE];
    unsigned int len = 0;
    EVP_DigestFinal_ex(ctx, md, &len);
    EVP_MD_CTX_free(ctx);
    static const char* hex = "0123456789abcdef";
    std::string s;
    for (unsigned int i = 0; i < len; ++i) s += hex[md[i] >> 4], s += hex[md[i] & 15];
    return s;
}

void write_manifest(const std::filesystem::path& dir, RunManifest m, const std::vector<std::string>& files) {
    m.files.clear();
    for (const auto& f : files)
        m.files.push_back({f, sha256_file(dir / f), std::filesystem::file_size(dir / f)});
    nlohmann::ordered_json j;
    j["recipe"] = m.recipe;
    j["version"] = m.version;
    j["seed"] = m.seed;
    j["wall_seconds"] = m.wall_seconds;
    for (const auto& [k, v] : m.config) j["config"][k] = v;
    j["params"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m.params) j["params"][k] = v;
    j["summary"] = nlohmann::ordered_json::object();
    for (const auto& [k, v] : m.summary) j["summary"][k] = v;
    j["files"] = nlohmann::ordered_json::array();
    for (const auto& e : m.files) j["files"].push_back({{"file", e.file}, {"sha256", e.sha256}, {"bytes", e.bytes}});
    std::ofstream out(dir / "manifest.json");
    if (!out) throw ConfigError("cannot write manifest in " + dir.string());
    out << j.dump(2) << '\n';
}

RunManifest read_manifest(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ConfigError("cannot read " + path.string());
    RunManifest m;
    try {
        const auto j = nlohmann::ordered_json::parse(in);
        m.recipe = j.at("recipe");
        m.version = j.at("version");
        m.seed = j.at("seed");
        m.wall_seconds = j.at("wall_seconds");
        for (const auto& [k, v] : j.at("config").items()) m.config.emplace_back(k, v);
        for (const auto& [k, v] : j.at("params").items()) m.params.emplace_back(k, v);
        if (j.contains("summary"))
            for (const auto& [k, v] : j.at("summary").items()) m.summary.emplace_back(k, v);
        for (const auto& e : j.at("files")) m.files.push_back({e.at("file"), e.at("sha256"), e.at("bytes")});
    } catch (const nlohmann::json::exception& e) {
        throw ConfigError("malformed manifest " + path.string() + ": " + e.what());
    }
    return m;
}

std::filesystem::path output_root() {
    if (const char* env = std::getenv("QZENO_OUTPUT_DIR"); env && *env) return env;
    return "qzeno_output";
}

std::string version_string() { return QZENO_VERSION; }

}  // namespace qzeno
