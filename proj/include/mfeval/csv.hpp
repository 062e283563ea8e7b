#pragma once

// RFC 4180 style CSV: comma separated, double-quote escaping, CRLF or LF
// line ends on input, LF on output.

#include <string>
#include <string_view>
#include <vector>

namespace mfeval::csv {

using Row = std::vector<std::string>;

// Quotes only when the field contains a comma, quote, CR or LF.
std::string escape(std::string_view field);
std::string format_row(const Row& row);
std::string format(const std::vector<Row>& rows);

// Throws ParseError("line N") on an unterminated quote or stray quote.
std::vector<Row> parse(std::string_view text);

}  // namespace mfeval::csv
