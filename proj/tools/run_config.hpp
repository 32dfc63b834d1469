#pragma once

#include <cstddef>
#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <vector>

namespace curvad::cli {

/// Resolved key=value settings of one command run. Values come from, in
/// increasing priority: declared defaults, the config file, command-line flags.
class RunConfig {
public:
    void declare(const std::string& key, const std::string& default_value, const std::string& help);
    const std::map<std::string, std::string>& declared_help() const { return help_; }

    /// Reads key=value lines ('#' comments, blank lines allowed). Unknown
    /// keys raise UsageError naming every offender.
    void load_file(const std::filesystem::path& path);
    void set(const std::string& key, const std::string& value);

    bool has(const std::string& key) const;
    const std::string& str(const std::string& key) const;
    double number(const std::string& key) const;
    std::size_t count(const std::string& key) const;
    std::uint64_t seed(const std::string& key) const;
    bool flag(const std::string& key) const;
    std::vector<std::size_t> counts(const std::string& key) const;
    std::vector<double> numbers(const std::string& key) const;
    std::vector<std::string> strings(const std::string& key) const;

    /// Sorted key=value lines.
    std::string to_text() const;
    void write(const std::filesystem::path& path) const;

private:
    std::map<std::string, std::string> values_;
    std::map<std::string, std::string> help_;
};

}  // namespace curvad::cli
