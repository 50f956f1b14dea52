// output_table.hpp - tabular command output rendered as CSV, JSON or text.
#pragma once

#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace glrdose {

/// A number printed with a fixed number of decimals.
struct Number {
    double value = 0.0;
    int decimals = 2;
};

using Cell = std::variant<std::string, long long, Number>;

enum class OutputFormat { Csv, Json, Text };

OutputFormat parse_output_format(std::string_view name);

struct OutputTable {
    std::vector<std::string> headers;
    std::vector<std::vector<Cell>> rows;

    /// Throws std::invalid_argument if the row arity differs from the headers.
    void add_row(std::vector<Cell> row);
};

/// Cell text as it appears in every format. `decimals_override` replaces the
/// per-cell precision of Number cells.
std::string cell_text(const Cell& cell, std::optional<int> decimals_override = std::nullopt);

std::string render(const OutputTable& table, OutputFormat format, std::optional<int> decimals_override = std::nullopt);

/// Minimal CSV reader for the output of render(..., Csv): returns the header
/// followed by the rows, with quoted fields unescaped.
std::vector<std::vector<std::string>> parse_csv(const std::string& text);

}  // namespace glrdose
