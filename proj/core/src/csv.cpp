#include "cxrforge/csv.hpp"

#include <fstream>
#include <sstream>

#include "cxrforge/error.hpp"
#include "cxrforge/text.hpp"

namespace cxrforge {

std::string read_text_file(const std::string &path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw FormatError(path, 0, "cannot open file");
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

CsvTable CsvTable::read_file(const std::string &path, char delim) { return parse(read_text_file(path), path, delim); }

CsvTable CsvTable::parse(std::string_view content, const std::string &origin, char delim) {
    CsvTable table;
    table.origin_ = origin;

    std::vector<std::vector<std::string>> records;
    std::vector<std::size_t> lines;
    std::vector<std::string> fields;
    std::string field;
    bool in_quotes = false;
    bool field_started = false;
    bool record_has_data = false;
    std::size_t line = 1;
    std::size_t record_line = 1;

    auto end_field = [&] {
        fields.push_back(std::move(field));
        field.clear();
        field_started = false;
    };
    auto end_record = [&] {
        end_field();
        if (record_has_data || fields.size() > 1 || !fields[0].empty()) {
            records.push_back(std::move(fields));
            lines.push_back(record_line);
        }
        fields.clear();
        record_has_data = false;
    };

    for (std::size_t i = 0; i < content.size(); ++i) {
        const char c = content[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < content.size() && content[i + 1] == '"') {
                    field.push_back('"');
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                if (c == '\n') ++line;
                field.push_back(c);
            }
            continue;
        }
        if (c == '"' && !field_started) {
            in_quotes = true;
            field_started = true;
            record_has_data = true;
        } else if (c == delim) {
            end_field();
            record_has_data = true;
        } else if (c == '\r') {
            continue;
        } else if (c == '\n') {
            end_record();
            ++line;
            record_line = line;
        } else {
            if (c == '"') throw FormatError(origin, line, "unexpected quote inside unquoted field");
            field.push_back(c);
            field_started = true;
            record_has_data = true;
        }
    }
    if (in_quotes) throw FormatError(origin, record_line, "unterminated quoted field");
    if (field_started || !fields.empty() || record_has_data) end_record();

    if (records.empty()) return table;

    table.header_ = records.front();
    for (auto &h : table.header_) h = text::trim(h);
    for (std::size_t i = 0; i < table.header_.size(); ++i) {
        if (!table.index_.emplace(table.header_[i], i).second)
            throw FormatError(origin, lines.front(), "duplicate column '" + table.header_[i] + "'");
    }
    for (std::size_t r = 1; r < records.size(); ++r) {
        if (records[r].size() != table.header_.size()) {
            throw FormatError(origin, lines[r],
                              "expected " + std::to_string(table.header_.size()) + " fields, found " +
                                  std::to_string(records[r].size()));
        }
        table.rows_.push_back({lines[r], std::move(records[r])});
    }
    return table;
}

std::optional<std::size_t> CsvTable::column(std::string_view name) const {
    auto it = index_.find(std::string(name));
    if (it == index_.end()) return std::nullopt;
    return it->second;
}

std::size_t CsvTable::require_column(std::string_view name) const {
    if (auto c = column(name)) return *c;
    throw FormatError(origin_, 1, "missing column '" + std::string(name) + "'");
}

} // namespace cxrforge
