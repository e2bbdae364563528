#include "wppsc/csv.hpp"

#include <array>
#include <charconv>
#include <cmath>
#include <stdexcept>

namespace wppsc {

std::string format_number(double v) {
    if (std::isnan(v)) return "nan";
    if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
    if (v == 0.0) return "0";
    std::array<char, 64> buf{};
    const auto res = std::to_chars(buf.data(), buf.data() + buf.size(), v);
    return {buf.data(), res.ptr};
}

namespace {

std::string quote(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) {
        return s;
    }
    std::string q = "\"";
    for (char c : s) {
        if (c == '"') q += '"';
        q += c;
    }
    q += '"';
    return q;
}

}  // namespace

CsvWriter::CsvWriter(std::ostream& out, const std::vector<std::string>& header)
    : out_(out), columns_(header.size()) {
    for (std::size_t k = 0; k < header.size(); ++k) {
        if (k) out_ << ',';
        out_ << quote(header[k]);
    }
    out_ << '\n';
}

void CsvWriter::separator() {
    if (in_row_ >= columns_) {
        throw std::logic_error("CsvWriter: too many fields in row");
    }
    if (in_row_ > 0) out_ << ',';
    ++in_row_;
}

CsvWriter& CsvWriter::field(const std::string& s) {
    separator();
    out_ << quote(s);
    return *this;
}

CsvWriter& CsvWriter::field(double v) {
    separator();
    out_ << format_number(v);
    return *this;
}

CsvWriter& CsvWriter::field(long long v) {
    separator();
    out_ << v;
    return *this;
}

void CsvWriter::end_row() {
    if (in_row_ != columns_) {
        throw std::logic_error("CsvWriter: row has " + std::to_string(in_row_) + " fields, expected " +
                               std::to_string(columns_));
    }
    out_ << '\n';
    in_row_ = 0;
    ++rows_;
}

void write_timeseries_csv(std::ostream& out, const TimeSeries& ts) {
    std::vector<std::string> header{"t"};
    header.insert(header.end(), ts.names.begin(), ts.names.end());
    CsvWriter w(out, header);
    for (std::size_t k = 0; k < ts.rows(); ++k) {
        w.field(ts.t[k]);
        for (const auto& col : ts.columns) {
            w.field(col[k]);
        }
        w.end_row();
    }
}

void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& row_labels,
                      const std::vector<std::string>& col_labels) {
    std::vector<std::string> header{"row"};
    header.insert(header.end(), col_labels.begin(), col_labels.end());
    CsvWriter w(out, header);
    for (Eigen::Index i = 0; i < m.rows(); ++i) {
        w.field(row_labels.at(static_cast<std::size_t>(i)));
        for (Eigen::Index j = 0; j < m.cols(); ++j) {
            w.field(m(i, j));
        }
        w.end_row();
    }
}

}  // namespace wppsc
