// config.hpp — flat sectioned key-value configuration files, and the
// resolved-run-config provenance record written next to every output.
#pragma once

#include <cstdint>
#include <filesystem>
#include <map>
#include <string>
#include <string_view>

#include "cascadelab/errors.hpp"
#include "cascadelab/io_util.hpp"

namespace cascadelab {

// Format: `[section]` headers, `key = value` lines, `#` comments. Serialized
// canonically (sorted sections and keys) so identical configurations have
// identical bytes.
class ConfigFile {
public:
    ConfigFile() = default;

    static ConfigFile parse_string(std::string_view content) {
        ConfigFile cfg;
        std::string section;
        std::size_t line_no = 0;
        std::size_t pos = 0;
        while (pos <= content.size()) {
            std::size_t eol = content.find('\n', pos);
            if (eol == std::string_view::npos) eol = content.size();
            std::string_view line = content.substr(pos, eol - pos);
            pos = eol + 1;
            ++line_no;
            line = trim(line);
            if (line.empty() || line.front() == '#') {
                if (pos > content.size()) break;
                continue;
            }
            if (line.front() == '[') {
                if (line.back() != ']')
                    throw ParseError("unterminated section header", line_no);
                section = std::string(trim(line.substr(1, line.size() - 2)));
                if (section.empty()) throw ParseError("empty section name", line_no);
            } else {
                const std::size_t eq = line.find('=');
                if (eq == std::string_view::npos)
                    throw ParseError("expected 'key = value'", line_no);
                const std::string key(trim(line.substr(0, eq)));
                const std::string value(trim(line.substr(eq + 1)));
                if (key.empty()) throw ParseError("empty key", line_no);
                cfg.sections_[section][key] = value;
            }
            if (pos > content.size()) break;
        }
        return cfg;
    }

    static ConfigFile parse_file(const std::filesystem::path& path) {
        return parse_string(read_file(path));
    }

    bool has(const std::string& section, const std::string& key) const {
        const auto s = sections_.find(section);
        return s != sections_.end() && s->second.count(key) > 0;
    }

    std::string get(const std::string& section, const std::string& key,
                    const std::string& fallback = "") const {
        const auto s = sections_.find(section);
        if (s == sections_.end()) return fallback;
        const auto k = s->second.find(key);
        return k == s->second.end() ? fallback : k->second;
    }

    double get_double(const std::string& section, const std::string& key,
                      double fallback) const {
        if (!has(section, key)) return fallback;
        double v = 0;
        if (!parse_double(get(section, key), v))
            throw InvalidConfigError("config value [" + section + "] " + key +
                                     " is not a number");
        return v;
    }

    template <typename Int>
    Int get_int(const std::string& section, const std::string& key, Int fallback) const {
        if (!has(section, key)) return fallback;
        Int v{};
        if (!parse_int(get(section, key), v))
            throw InvalidConfigError("config value [" + section + "] " + key +
                                     " is not an integer");
        return v;
    }

    void set(const std::string& section, const std::string& key, std::string value) {
        sections_[section][key] = std::move(value);
    }

    std::string serialize() const {
        std::string out;
        for (const auto& [section, entries] : sections_) {
            out += '[' + section + "]\n";
            for (const auto& [key, value] : entries) out += key + " = " + value + '\n';
        }
        return out;
    }

    void write(const std::filesystem::path& path) const {
        write_file_atomic(path, serialize());
    }

private:
    static std::string_view trim(std::string_view s) {
        while (!s.empty() && (s.front() == ' ' || s.front() == '\t')) s.remove_prefix(1);
        while (!s.empty() && (s.back() == ' ' || s.back() == '\t' || s.back() == '\r'))
            s.remove_suffix(1);
        return s;
    }

    std::map<std::string, std::map<std::string, std::string>> sections_;
};

}  // namespace cascadelab
