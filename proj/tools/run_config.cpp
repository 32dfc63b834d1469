#include "run_config.hpp"

#include <charconv>
#include <fstream>
#include <sstream>

#include "curvad/error.hpp"

namespace curvad::cli {
namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t\r");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t\r");
    return s.substr(b, e - b + 1);
}

std::vector<std::string> split_list(const std::string& s) {
    std::vector<std::string> out;
    std::stringstream ss(s);
    std::string item;
    while (std::getline(ss, item, ',')) {
        item = trim(item);
        if (!item.empty()) out.push_back(item);
    }
    return out;
}

}  // namespace

void RunConfig::declare(const std::string& key, const std::string& default_value,
                        const std::string& help) {
    values_[key] = default_value;
    help_[key] = help;
}

void RunConfig::load_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot open config file '" + path.string() + "'");
    std::string line;
    std::size_t line_no = 0;
    std::vector<std::string> unknown;
    while (std::getline(in, line)) {
        ++line_no;
        const std::string t = trim(line);
        if (t.empty() || t.front() == '#') continue;
        const auto eq = t.find('=');
        if (eq == std::string::npos) {
            throw ParseError(path.string() + ":" + std::to_string(line_no) + ": expected key=value");
        }
        const std::string key = trim(t.substr(0, eq));
        if (!values_.count(key)) {
            unknown.push_back(key);
            continue;
        }
        values_[key] = trim(t.substr(eq + 1));
    }
    if (!unknown.empty()) {
        std::string msg = "unknown config keys in '" + path.string() + "':";
        for (const auto& k : unknown) msg += " " + k;
        throw UsageError(msg);
    }
}

void RunConfig::set(const std::string& key, const std::string& value) {
    if (!values_.count(key)) throw UsageError("unknown config key '" + key + "'");
    values_[key] = value;
}

bool RunConfig::has(const std::string& key) const {
    const auto it = values_.find(key);
    return it != values_.end() && !it->second.empty();
}

const std::string& RunConfig::str(const std::string& key) const {
    const auto it = values_.find(key);
    if (it == values_.end()) throw UsageError("unknown config key '" + key + "'");
    return it->second;
}

double RunConfig::number(const std::string& key) const {
    const std::string& v = str(key);
    double out = 0.0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw UsageError("'" + key + "' expects a number, got '" + v + "'");
    }
    return out;
}

std::size_t RunConfig::count(const std::string& key) const {
    const std::string& v = str(key);
    std::size_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw UsageError("'" + key + "' expects a non-negative integer, got '" + v + "'");
    }
    return out;
}

std::uint64_t RunConfig::seed(const std::string& key) const {
    const std::string& v = str(key);
    std::uint64_t out = 0;
    const auto [ptr, ec] = std::from_chars(v.data(), v.data() + v.size(), out);
    if (ec != std::errc() || ptr != v.data() + v.size()) {
        throw UsageError("'" + key + "' expects an unsigned integer, got '" + v + "'");
    }
    return out;
}

bool RunConfig::flag(const std::string& key) const {
    const std::string& v = str(key);
    if (v == "1" || v == "true" || v == "yes" || v == "on") return true;
    if (v == "0" || v == "false" || v == "no" || v == "off" || v.empty()) return false;
    throw UsageError("'" + key + "' expects a boolean, got '" + v + "'");
}

std::vector<std::size_t> RunConfig::counts(const std::string& key) const {
    std::vector<std::size_t> out;
    for (const auto& item : split_list(str(key))) {
        std::size_t v = 0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || ptr != item.data() + item.size()) {
            throw UsageError("'" + key + "' expects integers, got '" + item + "'");
        }
        out.push_back(v);
    }
    return out;
}

std::vector<double> RunConfig::numbers(const std::string& key) const {
    std::vector<double> out;
    for (const auto& item : split_list(str(key))) {
        double v = 0.0;
        const auto [ptr, ec] = std::from_chars(item.data(), item.data() + item.size(), v);
        if (ec != std::errc() || ptr != item.data() + item.size()) {
            throw UsageError("'" + key + "' expects numbers, got '" + item + "'");
        }
        out.push_back(v);
    }
    return out;
}

std::vector<std::string> RunConfig::strings(const std::string& key) const {
    return split_list(str(key));
}

std::string RunConfig::to_text() const {
    std::string out;
    for (const auto& [k, v] : values_) out += k + "=" + v + "\n";
    return out;
}

void RunConfig::write(const std::filesystem::path& path) const {
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    out << to_text();
}

}  // namespace curvad::cli
