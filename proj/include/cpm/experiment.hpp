#pragma once

#include <cstdint>
#include <filesystem>
#include <iosfwd>
#include <map>
#include <optional>
#include <string>

#include "cpm/calculus.hpp"
#include "cpm/droplet.hpp"
#include "cpm/dynamics.hpp"
#include "cpm/stats.hpp"

namespace cpm {

/// Config parse/validation failure with the offending line (0 = whole file).
struct ConfigError : std::runtime_error {
    int line;
    ConfigError(int line_, const std::string& msg)
        : std::runtime_error("line " + std::to_string(line_) + ": " + msg), line(line_) {}
};

/// Flat "key = value" sections.  Grammar: `[section]` headers, `key = value`
/// entries, `#` comments, values are whitespace-separated tokens.  No code,
/// no includes; every functional choice is a named family plus numbers.
class ConfigFile {
public:
    static ConfigFile parse(const std::string& text);

    bool has(const std::string& section, const std::string& key) const;
    std::string get_string(const std::string& section, const std::string& key) const;
    std::string get_string_or(const std::string& section, const std::string& key,
                              const std::string& fallback) const;
    double get_double(const std::string& section, const std::string& key) const;
    double get_double_or(const std::string& section, const std::string& key,
                         double fallback) const;
    std::uint64_t get_u64(const std::string& section, const std::string& key) const;
    long get_long_or(const std::string& section, const std::string& key, long fallback) const;
    Vec get_vec(const std::string& section, const std::string& key) const;
    int line_of(const std::string& section, const std::string& key) const;
    [[noreturn]] void fail_at(const std::string& section, const std::string& key,
                              const std::string& msg) const;

    const std::string& text() const { return text_; }

private:
    struct Entry {
        std::string value;
        int line = 0;
    };
    std::map<std::string, std::map<std::string, Entry>> sections_;
    std::string text_;
};

/// A fully built experiment: model, test parameters, seed, and run controls.
struct Experiment {
    ClusterProcessModel model;
    ConfigFile config;
    std::string test_kind;
    std::uint64_t seed = 0;
    std::size_t replicas = 1;
    int threads = 0;
    std::string config_hash;
};

struct ExperimentOverrides {
    std::optional<std::uint64_t> seed;
    std::optional<std::size_t> replicas;
    std::optional<int> threads;
};

/// Parses and validates config text into a runnable experiment.
Experiment build_experiment(const std::string& config_text, const ExperimentOverrides& overrides);

/// Dispatches one subcommand ("sample", "laplace-check", ..., or "run" to use
/// the configured test kind), writing outputs under out_dir.  Returns the
/// process exit code: 0 ok, 2 when a statistical gate fails.
int run_experiment(Experiment& experiment, const std::string& subcommand,
                   const std::filesystem::path& out_dir, std::ostream& log);

/// Shortest round-trip decimal formatting (CSV cells, hashes).
std::string format_double(double value);

/// FNV-1a hash of the canonical config bytes plus overrides, hex-encoded.
std::string hash_config(const std::string& text, const ExperimentOverrides& overrides);

/// Point-pattern CSV: header `x1,x2[,x3][,mark]`, one point per row, chart
/// coordinates, LF endings, shortest round-trip floats.
void write_point_csv(std::ostream& os, const std::vector<Configuration>& samples);
std::vector<Point> read_point_csv(std::istream& is, const Geometry& g);

}  // namespace cpm
