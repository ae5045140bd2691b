#include "bandflow/text_io.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>

#include "bandflow/errors.hpp"

namespace bandflow {

std::string format_double(double value) {
    if (std::isnan(value)) {
        return "nan";
    }
    if (std::isinf(value)) {
        return value > 0 ? "inf" : "-inf";
    }
    std::array<char, 64> buf{};
    const auto [ptr, ec] = std::to_chars(buf.data(), buf.data() + buf.size(), value);
    if (ec != std::errc{}) {
        throw InputError("format_double: conversion failed");
    }
    return std::string(buf.data(), ptr);
}

double parse_double(std::string_view text) {
    while (!text.empty() && (text.front() == ' ' || text.front() == '\t')) {
        text.remove_prefix(1);
    }
    while (!text.empty() && (text.back() == ' ' || text.back() == '\t' || text.back() == '\r')) {
        text.remove_suffix(1);
    }
    if (text == "nan") {
        return std::nan("");
    }
    if (text == "inf") {
        return HUGE_VAL;
    }
    if (text == "-inf") {
        return -HUGE_VAL;
    }
    if (!text.empty() && text.front() == '+') {
        text.remove_prefix(1);
    }
    double value = 0.0;
    const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), value);
    if (text.empty() || ec != std::errc{} || ptr != text.data() + text.size()) {
        throw InputError("not a number: '" + std::string(text) + "'");
    }
    return value;
}

void write_matrix(std::ostream& out, const BandedSymmetricMatrix& h) {
    out << "bandmat " << h.dim() << ' ' << h.bandwidth() << '\n';
    for (std::size_t k = 0; k <= h.bandwidth(); ++k) {
        const auto b = h.band(k);
        for (std::size_t n = 0; n < b.size(); ++n) {
            out << n << ' ' << n + k << ' ' << format_double(b[n]) << '\n';
        }
    }
}

namespace {

std::size_t parse_index(const std::string& token, std::size_t line) {
    std::size_t value = 0;
    const auto [ptr, ec] = std::from_chars(token.data(), token.data() + token.size(), value);
    if (token.empty() || ec != std::errc{} || ptr != token.data() + token.size()) {
        throw ParseError(line, "expected a non-negative integer, got '" + token + "'");
    }
    return value;
}

} // namespace

BandedSymmetricMatrix read_matrix(std::istream& in) {
    std::string text;
    std::size_t line_no = 0;
    BandedSymmetricMatrix h;
    bool have_header = false;
    while (std::getline(in, text)) {
        ++line_no;
        std::istringstream line(text);
        std::string first;
        if (!(line >> first) || first.front() == '#') {
            continue;
        }
        if (!have_header) {
            std::string dim_tok;
            std::string bw_tok;
            std::string extra;
            if (first != "bandmat" || !(line >> dim_tok >> bw_tok) || (line >> extra)) {
                throw ParseError(line_no, "expected header 'bandmat N M'");
            }
            try {
                h = BandedSymmetricMatrix(parse_index(dim_tok, line_no), parse_index(bw_tok, line_no));
            } catch (const ParseError&) {
                throw;
            } catch (const InputError& e) {
                throw ParseError(line_no, e.what());
            }
            have_header = true;
            continue;
        }
        std::string m_tok;
        std::string value_tok;
        std::string extra;
        if (!(line >> m_tok >> value_tok) || (line >> extra)) {
            throw ParseError(line_no, "expected 'n m value'");
        }
        const std::size_t n = parse_index(first, line_no);
        const std::size_t m = parse_index(m_tok, line_no);
        double value = 0.0;
        try {
            value = parse_double(value_tok);
            h.set(n, m, value);
        } catch (const InputError& e) {
            throw ParseError(line_no, e.what());
        }
    }
    if (!have_header) {
        throw ParseError(line_no, "missing 'bandmat N M' header");
    }
    return h;
}

BandedSymmetricMatrix load_matrix(const std::string& path) {
    std::ifstream in(path);
    if (!in) {
        throw InputError("cannot open matrix file '" + path + "'");
    }
    return read_matrix(in);
}

void save_matrix(const std::string& path, const BandedSymmetricMatrix& h) {
    std::ofstream out(path);
    if (!out) {
        throw InputError("cannot write matrix file '" + path + "'");
    }
    write_matrix(out, h);
}

std::size_t CsvTable::column(std::string_view name) const {
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (header[i] == name) {
            return i;
        }
    }
    throw InputError("CSV has no column '" + std::string(name) + "'");
}

CsvWriter::CsvWriter(std::ostream& out, std::vector<std::string> header)
    : out_(out), columns_(header.size()) {
    for (std::size_t i = 0; i < header.size(); ++i) {
        out_ << (i ? "," : "") << header[i];
    }
    out_ << '\n';
}

void CsvWriter::separator() {
    if (filled_ == columns_) {
        throw InputError("CsvWriter: too many cells in row");
    }
    if (filled_ > 0) {
        out_ << ',';
    }
    ++filled_;
}

CsvWriter& CsvWriter::cell(double value) {
    separator();
    out_ << format_double(value);
    return *this;
}

CsvWriter& CsvWriter::cell(long long value) {
    separator();
    out_ << value;
    return *this;
}

CsvWriter& CsvWriter::cell(std::string_view text) {
    separator();
    out_ << text;
    return *this;
}

void CsvWriter::end_row() {
    if (filled_ != columns_) {
        throw InputError("CsvWriter: row has " + std::to_string(filled_) + " of " +
                         std::to_string(columns_) + " cells");
    }
    out_ << '\n';
    filled_ = 0;
}

namespace {

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> cells;
    std::string cell;
    std::istringstream in(line);
    while (std::getline(in, cell, ',')) {
        if (!cell.empty() && cell.back() == '\r') {
            cell.pop_back();
        }
        cells.push_back(cell);
    }
    if (!line.empty() && line.back() == ',') {
        cells.emplace_back();
    }
    return cells;
}

} // namespace

CsvTable read_csv(std::istream& in) {
    CsvTable table;
    std::string line;
    std::size_t line_no = 0;
    while (std::getline(in, line)) {
        ++line_no;
        if (line.empty()) {
            continue;
        }
        auto cells = split_csv_line(line);
        if (table.header.empty()) {
            table.header = std::move(cells);
            continue;
        }
        if (cells.size() != table.header.size()) {
            throw ParseError(line_no, "expected " + std::to_string(table.header.size()) +
                                          " cells, got " + std::to_string(cells.size()));
        }
        table.rows.push_back(std::move(cells));
    }
    return table;
}

} // namespace bandflow
