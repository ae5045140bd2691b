#pragma once

#include <iosfwd>
#include <string>
#include <string_view>
#include <vector>

#include "bandflow/banded_matrix.hpp"

namespace bandflow {

/// Shortest decimal text that parses back to exactly the same double.
std::string format_double(double value);

/// Strict full-string parse of a double ("nan"/"inf" accepted); throws InputError.
double parse_double(std::string_view text);

/// Matrix text format:
///
///     bandmat N M
///     n m value
///     ...
///
/// One line per stored entry (upper triangle, n <= m). Unlisted in-band
/// entries are zero. Blank lines and lines starting with '#' are ignored on read.
void write_matrix(std::ostream& out, const BandedSymmetricMatrix& h);
BandedSymmetricMatrix read_matrix(std::istream& in);

BandedSymmetricMatrix load_matrix(const std::string& path);
void save_matrix(const std::string& path, const BandedSymmetricMatrix& h);

/// Minimal CSV table: a header row and rows of string cells. No quoting; cells
/// in this project never contain commas.
struct CsvTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;

    /// Column index by name; throws InputError when absent.
    std::size_t column(std::string_view name) const;
};

class CsvWriter {
public:
    CsvWriter(std::ostream& out, std::vector<std::string> header);

    CsvWriter& cell(double value);
    CsvWriter& cell(long long value);
    CsvWriter& cell(std::string_view text);
    void end_row();

private:
    void separator();

    std::ostream& out_;
    std::size_t columns_;
    std::size_t filled_ = 0;
};

CsvTable read_csv(std::istream& in);

} // namespace bandflow
