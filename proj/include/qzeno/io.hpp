#pragma once

#include <cstdint>
#include <filesystem>
#include <string>
#include <utility>
#include <vector>

namespace qzeno {

using Meta = std::vector<std::pair<std::string, std::string>>;

struct Column {
    std::string name;
    std::string unit;  // "1" for dimensionless
};

struct Table {
    std::vector<Column> columns;
    std::vector<std::vector<double>> rows;

    void add(std::vector<double> row);
};

// "# key=value" header lines, a "# units:" line, the column names, then rows.
// NaN is written as "nan".
void write_csv(const std::filesystem::path& path, const Meta& meta, const Table& table);

struct CsvFile {
    Meta meta;
    std::vector<std::string> columns;
    std::vector<std::string> units;  // name=unit pairs from the units line
    std::vector<std::vector<double>> rows;
};
CsvFile read_csv(const std::filesystem::path& path);

std::string sha256_file(const std::filesystem::path& path);

struct ManifestEntry {
    std::string file;  // relative to the manifest
    std::string sha256;
    std::uintmax_t bytes = 0;
};

struct RunManifest {
    std::string recipe;
    std::string version;
    std::uint64_t seed = 0;
    double wall_seconds = 0;
    Meta config;
    Meta params;
    Meta summary;  // headline numbers of the run
    std::vector<ManifestEntry> files;
};

// Digests every listed file (paths relative to dir) and writes dir/manifest.json.
void write_manifest(const std::filesystem::path& dir, RunManifest manifest, const std::vector<std::string>& files);
RunManifest read_manifest(const std::filesystem::path& path);

// QZENO_OUTPUT_DIR, or ./qzeno_output when unset.
std::filesystem::path output_root();

std::string version_string();

}  // namespace qzeno
