#include "mfeval/csv.hpp"

#include "mfeval/error.hpp"

namespace mfeval::csv {

std::string escape(std::string_view field) {
    if (field.find_first_of(",\"\r\n") == std::string_view::npos) return std::string(field);
    std::string out = "\"";
    for (char c : field) {
        if (c == '"') out += '"';
        out += c;
    }
    out += '"';
    return out;
}

std::string format_row(const Row& row) {
    std::string out;
    for (std::size_t i = 0; i < row.size(); ++i) {
        if (i) out += ',';
        out += escape(row[i]);
    }
    out += '\n';
    return out;
}

std::string format(const std::vector<Row>& rows) {
    std::string out;
    for (const auto& r : rows) out += format_row(r);
    return out;
}

std::vector<Row> parse(std::string_view text) {
    std::vector<Row> rows;
    Row row;
    std::string field;
    std::size_t line = 1;
    std::size_t i = 0;
    bool in_row = false;

    auto end_field = [&] {
        row.push_back(std::move(field));
        field.clear();
    };
    auto end_row = [&] {
        end_field();
        rows.push_back(std::move(row));
        row.clear();
        in_row = false;
    };

    while (i < text.size()) {
        const char c = text[i];
        if (c == '"' && field.empty()) {
            const std::size_t start_line = line;
            ++i;
            for (;;) {
                if (i >= text.size())
                    throw ParseError("line " + std::to_string(start_line), "unterminated quoted field");
                if (text[i] == '"') {
                    if (i + 1 < text.size() && text[i + 1] == '"') {
                        field += '"';
                        i += 2;
                        continue;
                    }
                    ++i;
                    break;
                }
                if (text[i] == '\n') ++line;
                field += text[i++];
            }
            in_row = true;
            if (i < text.size() && text[i] != ',' && text[i] != '\n' && text[i] != '\r')
                throw ParseError("line " + std::to_string(line), "text after closing quote");
            continue;
        }
        if (c == ',') {
            end_field();
            in_row = true;
            ++i;
        } else if (c == '\r' || c == '\n') {
            end_row();
            i += (c == '\r' && i + 1 < text.size() && text[i + 1] == '\n') ? 2 : 1;
            ++line;
        } else {
            if (c == '"') throw ParseError("line " + std::to_string(line), "stray quote in unquoted field");
            field += c;
            in_row = true;
            ++i;
        }
    }
    if (in_row || !field.empty()) end_row();
    return rows;
}

}  // namespace mfeval::csv
