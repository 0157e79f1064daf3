#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace evoplan {

// RFC 4180 subset: fields containing ',', '"' or newlines are quoted with
// doubled inner quotes. Empty lines are skipped on read.
std::vector<std::vector<std::string>> read_csv(std::istream &in);
void write_csv_row(std::ostream &out, const std::vector<std::string> &fields);

// Shortest text that parses back to the same double.
std::string format_double(double value);

}  // namespace evoplan
