// cascade_io.hpp — text serialization for cascades and the label sidecar.
//
// One cascade per line:
//   <cascade_id>\t<origin_node>\t<origin_time>\t<event_count>\t<tok> <tok> ...
// with tok = <parent>/<node>:<time> for each non-origin event in time order.
// An optional first line `# time_unit=steps|seconds` declares the unit.
#pragma once

#include <filesystem>
#include <string>
#include <string_view>
#include <vector>

#include "cascadelab/cascade.hpp"
#include "cascadelab/errors.hpp"
#include "cascadelab/io_util.hpp"

namespace cascadelab {

namespace detail {

inline std::vector<std::string_view> split(std::string_view s, char sep) {
    std::vector<std::string_view> out;
    std::size_t pos = 0;
    while (true) {
        const std::size_t next = s.find(sep, pos);
        if (next == std::string_view::npos) {
            out.push_back(s.substr(pos));
            return out;
        }
        out.push_back(s.substr(pos, next - pos));
        pos = next + 1;
    }
}

}  // namespace detail

inline std::string serialize_cascade_line(const Cascade& c) {
    std::string line = c.cascade_id;
    line += '\t';
    line += std::to_string(c.origin_node);
    line += '\t';
    line += format_double(c.events.empty() ? 0.0 : c.events.front().time);
    line += '\t';
    line += std::to_string(c.events.size());
    for (std::size_t i = 1; i < c.events.size(); ++i) {
        const Event& e = c.events[i];
        line += (i == 1) ? '\t' : ' ';
        line += std::to_string(*e.parent);
        line += '/';
        line += std::to_string(e.node);
        line += ':';
        line += format_double(e.time);
    }
    line += '\n';
    return line;
}

inline std::string serialize_cascades_string(const std::vector<Cascade>& cascades) {
    std::string out;
    if (!cascades.empty() && cascades.front().unit != TimeUnit::unknown) {
        out += "# time_unit=";
        out += cascades.front().unit == TimeUnit::steps ? "steps" : "seconds";
        out += '\n';
    }
    for (const Cascade& c : cascades) {
        if (c.unit != cascades.front().unit)
            throw InvalidInputError("cannot serialize cascades with mixed time units");
        out += serialize_cascade_line(c);
    }
    return out;
}

inline void serialize_cascades(const std::vector<Cascade>& cascades,
                               const std::filesystem::path& path) {
    write_file_atomic(path, serialize_cascades_string(cascades));
}

inline Cascade parse_cascade_line(std::string_view line, TimeUnit unit, std::size_t line_no) {
    const auto fields = detail::split(line, '\t');
    if (fields.size() != 4 && fields.size() != 5)
        throw ParseError("expected 4 or 5 tab-separated fields", line_no);

    Cascade c;
    c.unit = unit;
    c.cascade_id = std::string(fields[0]);
    if (c.cascade_id.empty()) throw ParseError("empty cascade_id", line_no);
    if (!parse_int(fields[1], c.origin_node))
        throw ParseError("malformed origin node", line_no);
    double origin_time = 0.0;
    if (!parse_double(fields[2], origin_time) || origin_time != 0.0)
        throw ParseError("origin time must be 0", line_no);
    std::size_t declared_count = 0;
    if (!parse_int(fields[3], declared_count) || declared_count == 0)
        throw ParseError("malformed event count", line_no);

    c.events.push_back(Event{c.origin_node, std::nullopt, 0.0});
    if (fields.size() == 5 && !fields[4].empty()) {
        for (const auto tok : detail::split(fields[4], ' ')) {
            const std::size_t slash = tok.find('/');
            const std::size_t colon = tok.find(':', slash == std::string_view::npos ? 0 : slash);
            if (slash == std::string_view::npos || colon == std::string_view::npos)
                throw ParseError("malformed event token '" + std::string(tok) + "'", line_no);
            Event e;
            NodeId parent = 0;
            if (!parse_int(tok.substr(0, slash), parent) ||
                !parse_int(tok.substr(slash + 1, colon - slash - 1), e.node) ||
                !parse_double(tok.substr(colon + 1), e.time))
                throw ParseError("malformed event token '" + std::string(tok) + "'", line_no);
            e.parent = parent;
            c.events.push_back(e);
        }
    }
    if (c.events.size() != declared_count)
        throw ParseError("event count field does not match token count", line_no);
    try {
        validate_cascade(c);
    } catch (const InvalidInputError& e) {
        throw ParseError(e.what(), line_no);
    }
    return c;
}

inline std::vector<Cascade> parse_cascades_string(std::string_view content) {
    std::vector<Cascade> out;
    TimeUnit unit = TimeUnit::unknown;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string_view::npos) eol = content.size();
        const std::string_view line = content.substr(pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;
        if (line.front() == '#') {
            constexpr std::string_view prefix = "# time_unit=";
            if (line.substr(0, prefix.size()) == prefix) {
                const auto value = line.substr(prefix.size());
                if (value == "steps")
                    unit = TimeUnit::steps;
                else if (value == "seconds")
                    unit = TimeUnit::seconds;
                else
                    throw ParseError("unknown time_unit '" + std::string(value) + "'", line_no);
            }
            continue;
        }
        out.push_back(parse_cascade_line(line, unit, line_no));
    }
    return out;
}

inline std::vector<Cascade> parse_cascades(const std::filesystem::path& path) {
    return parse_cascades_string(read_file(path));
}

// Label sidecar: CSV `cascade_id,class_name`, one row per cascade.
inline void write_label_sidecar(const std::vector<std::pair<std::string, std::string>>& rows,
                                const std::filesystem::path& path) {
    std::string out = "cascade_id,class_name\n";
    for (const auto& [id, cls] : rows) {
        out += id;
        out += ',';
        out += cls;
        out += '\n';
    }
    write_file_atomic(path, out);
}

inline std::vector<std::pair<std::string, std::string>> read_label_sidecar(
    const std::filesystem::path& path) {
    const std::string content = read_file(path);
    std::vector<std::pair<std::string, std::string>> rows;
    std::size_t line_no = 0;
    std::size_t pos = 0;
    while (pos < content.size()) {
        std::size_t eol = content.find('\n', pos);
        if (eol == std::string_view::npos) eol = content.size();
        const std::string_view line(content.data() + pos, eol - pos);
        pos = eol + 1;
        ++line_no;
        if (line.empty()) continue;
        if (line_no == 1) {
            if (line != "cascade_id,class_name")
                throw ParseError("expected 'cascade_id,class_name' header", line_no);
            continue;
        }
        const std::size_t comma = line.find(',');
        if (comma == std::string_view::npos)
            throw ParseError("expected 'cascade_id,class_name' row", line_no);
        rows.emplace_back(std::string(line.substr(0, comma)),
                          std::string(line.substr(comma + 1)));
    }
    return rows;
}

}  // namespace cascadelab
