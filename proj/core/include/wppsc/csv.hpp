#pragma once

#include <ostream>
#include <string>
#include <vector>

#include <Eigen/Dense>

#include "wppsc/timeseries.hpp"

namespace wppsc {

/// Shortest round-trip decimal form ("." separator, locale independent).
std::string format_number(double v);

/// Row-oriented CSV emitter: header first, LF line endings, fields quoted
/// only when they contain a separator, quote or newline.
class CsvWriter {
public:
    CsvWriter(std::ostream& out, const std::vector<std::string>& header);

    CsvWriter& field(const std::string& s);
    CsvWriter& field(const char* s) { return field(std::string(s)); }
    CsvWriter& field(double v);
    CsvWriter& field(long long v);
    CsvWriter& field(int v) { return field(static_cast<long long>(v)); }
    CsvWriter& field(std::size_t v) { return field(static_cast<long long>(v)); }
    CsvWriter& field(bool v) { return field(static_cast<long long>(v ? 1 : 0)); }
    void end_row();

    std::size_t rows() const { return rows_; }

private:
    void separator();

    std::ostream& out_;
    std::size_t columns_;
    std::size_t in_row_ = 0;
    std::size_t rows_ = 0;
};

/// Columns: t, then every series column.
void write_timeseries_csv(std::ostream& out, const TimeSeries& ts);

/// Labeled dense matrix, row-major; first column holds the row label.
void write_matrix_csv(std::ostream& out, const Eigen::MatrixXd& m,
                      const std::vector<std::string>& row_labels,
                      const std::vector<std::string>& col_labels);

}  // namespace wppsc
