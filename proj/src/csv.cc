#include "evoplan/csv.h"

#include <charconv>
#include <istream>
#include <ostream>
#include <stdexcept>

using namespace std;

namespace evoplan {
vector<vector<string>> read_csv(istream &in) {
    vector<vector<string>> rows;
    vector<string> row;
    string field;
    bool in_quotes = false;
    bool row_has_content = false;
    char c;
    auto end_row = [&]() {
        if (row_has_content || !field.empty() || !row.empty()) {
            row.push_back(move(field));
            rows.push_back(move(row));
        }
        row.clear();
        field.clear();
        row_has_content = false;
    };
    while (in.get(c)) {
        if (in_quotes) {
            if (c == '"') {
                if (in.peek() == '"') {
                    in.get(c);
                    field += '"';
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
        } else if (c == '"') {
            in_quotes = true;
            row_has_content = true;
        } else if (c == ',') {
            row.push_back(move(field));
            field.clear();
            row_has_content = true;
        } else if (c == '\n') {
            end_row();
        } else if (c != '\r') {
            field += c;
        }
    }
    if (in_quotes)
        throw invalid_argument("unterminated quoted CSV field");
    end_row();
    return rows;
}

void write_csv_row(ostream &out, const vector<string> &fields) {
    for (size_t i = 0; i < fields.size(); ++i) {
        if (i)
            out << ',';
        const string &f = fields[i];
        if (f.find_first_of(",\"\n\r") == string::npos) {
            out << f;
            continue;
        }
        out << '"';
        for (char c : f) {
            if (c == '"')
                out << '"';
            out << c;
        }
        out << '"';
    }
    out << '\n';
}

string format_double(double value) {
    char buf[64];
    auto [end, ec] = to_chars(buf, buf + sizeof(buf), value);
    if (ec != errc())
        throw runtime_error("cannot format double");
    return string(buf, end);
}
}  // namespace evoplan
