#pragma once

#include <optional>
#include <string>
#include <string_view>
#include <unordered_map>
#include <vector>

namespace cxrforge {

/// Header-indexed table read from an RFC 4180 style delimited file.
/// Quoted fields may contain the delimiter, doubled quotes, and newlines.
class CsvTable {
  public:
    struct Row {
        std::size_t line = 0; ///< 1-based source line where the row starts
        std::vector<std::string> fields;
    };

    static CsvTable read_file(const std::string &path, char delim = ',');
    static CsvTable parse(std::string_view content, const std::string &origin, char delim = ',');

    const std::string &origin() const noexcept { return origin_; }
    const std::vector<std::string> &header() const noexcept { return header_; }
    const std::vector<Row> &rows() const noexcept { return rows_; }
    bool empty() const noexcept { return rows_.empty(); }

    std::optional<std::size_t> column(std::string_view name) const;
    /// Throws FormatError naming the file when the column is absent.
    std::size_t require_column(std::string_view name) const;

  private:
    std::string origin_;
    std::vector<std::string> header_;
    std::unordered_map<std::string, std::size_t> index_;
    std::vector<Row> rows_;
};

std::string read_text_file(const std::string &path);

} // namespace cxrforge
