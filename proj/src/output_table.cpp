#include "glrdose/output_table.hpp"

#include <algorithm>
#include <json.hpp>
#include <sstream>
#include <stdexcept>

#include "glrdose/format.hpp"

namespace glrdose {

namespace {

std::string csv_escape(const std::string& field) {
    if (field.find_first_of(",\"\n") == std::string::npos) return field;
    std::string out = "\"";
    for (char ch : field) {
        if (ch == '"') out += '"';
        out += ch;
    }
    return out + "\"";
}

}  // namespace

OutputFormat parse_output_format(std::string_view name) {
    if (name == "csv") return OutputFormat::Csv;
    if (name == "json") return OutputFormat::Json;
    if (name == "text") return OutputFormat::Text;
    throw std::invalid_argument("unknown output format '" + std::string(name) + "' (csv, json, text)");
}

void OutputTable::add_row(std::vector<Cell> row) {
    if (row.size() != headers.size()) throw std::invalid_argument("row arity does not match the headers");
    rows.push_back(std::move(row));
}

std::string cell_text(const Cell& cell, std::optional<int> decimals_override) {
    if (const auto* s = std::get_if<std::string>(&cell)) return *s;
    if (const auto* i = std::get_if<long long>(&cell)) return std::to_string(*i);
    const Number& num = std::get<Number>(cell);
    return format_fixed(num.value, decimals_override.value_or(num.decimals));
}

std::string render(const OutputTable& table, OutputFormat format, std::optional<int> decimals_override) {
    std::ostringstream out;
    switch (format) {
        case OutputFormat::Csv: {
            for (std::size_t j = 0; j < table.headers.size(); ++j) {
                out << (j ? "," : "") << csv_escape(table.headers[j]);
            }
            out << '\n';
            for (const auto& row : table.rows) {
                for (std::size_t j = 0; j < row.size(); ++j) {
                    out << (j ? "," : "") << csv_escape(cell_text(row[j], decimals_override));
                }
                out << '\n';
            }
            break;
        }
        case OutputFormat::Json: {
            // Numbers are emitted from their printed text so all formats agree.
            nlohmann::json rows = nlohmann::json::array();
            for (const auto& row : table.rows) {
                nlohmann::json obj = nlohmann::json::object();
                for (std::size_t j = 0; j < row.size(); ++j) {
                    const Cell& c = row[j];
                    if (std::holds_alternative<std::string>(c)) {
                        obj[table.headers[j]] = std::get<std::string>(c);
                    } else if (std::holds_alternative<long long>(c)) {
                        obj[table.headers[j]] = std::get<long long>(c);
                    } else {
                        obj[table.headers[j]] = std::stod(cell_text(c, decimals_override));
                    }
                }
                rows.push_back(std::move(obj));
            }
            out << nlohmann::json{{"columns", table.headers}, {"rows", rows}}.dump(2) << '\n';
            break;
        }
        case OutputFormat::Text: {
            std::vector<std::size_t> width(table.headers.size());
            for (std::size_t j = 0; j < width.size(); ++j) width[j] = table.headers[j].size();
            std::vector<std::vector<std::string>> text;
            for (const auto& row : table.rows) {
                auto& line = text.emplace_back();
                for (std::size_t j = 0; j < row.size(); ++j) {
                    line.push_back(cell_text(row[j], decimals_override));
                    width[j] = std::max(width[j], line.back().size());
                }
            }
            auto emit = [&](const std::vector<std::string>& fields) {
                for (std::size_t j = 0; j < fields.size(); ++j) {
                    if (j) out << "  ";
                    out << std::string(width[j] - fields[j].size(), ' ') << fields[j];
                }
                out << '\n';
            };
            emit(table.headers);
            for (const auto& line : text) emit(line);
            break;
        }
    }
    return out.str();
}

std::vector<std::vector<std::string>> parse_csv(const std::string& text) {
    std::vector<std::vector<std::string>> rows;
    std::vector<std::string> row;
    std::string field;
    bool quoted = false;
    bool row_open = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char ch = text[i];
        row_open = true;
        if (quoted) {
            if (ch == '"' && i + 1 < text.size() && text[i + 1] == '"') {
                field += '"';
                ++i;
            } else if (ch == '"') {
                quoted = false;
            } else {
                field += ch;
            }
        } else if (ch == '"') {
            quoted = true;
        } else if (ch == ',') {
            row.push_back(std::move(field));
            field.clear();
        } else if (ch == '\n') {
            row.push_back(std::move(field));
            field.clear();
            rows.push_back(std::move(row));
            row.clear();
            row_open = false;
        } else {
            field += ch;
        }
    }
    if (row_open) {
        row.push_back(std::move(field));
        rows.push_back(std::move(row));
    }
    return rows;
}

}  // namespace glrdose
