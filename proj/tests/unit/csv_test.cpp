#include <gtest/gtest.h>

#include <sstream>

#include "wppsc/csv.hpp"

using namespace wppsc;

TEST(FormatNumber, ShortestRoundTrip) {
    EXPECT_EQ(format_number(0.0), "0");
    EXPECT_EQ(format_number(-0.0), "0");
    EXPECT_EQ(format_number(1.5), "1.5");
    EXPECT_EQ(format_number(0.1), "0.1");
    EXPECT_EQ(std::stod(format_number(1.0 / 3.0)), 1.0 / 3.0);
    EXPECT_EQ(format_number(std::nan("")), "nan");
    EXPECT_EQ(format_number(-INFINITY), "-inf");
}

TEST(CsvWriter, QuotingAndLineEndings) {
    std::ostringstream out;
    CsvWriter w(out, {"a", "b,c"});
    w.field("plain").field(2.5);
    w.end_row();
    w.field("with \"quote\"").field(true);
    w.end_row();
    EXPECT_EQ(out.str(), "a,\"b,c\"\nplain,2.5\n\"with \"\"quote\"\"\",1\n");
    EXPECT_EQ(w.rows(), 2u);
}

TEST(CsvWriter, ColumnCountIsEnforced) {
    std::ostringstream out;
    CsvWriter w(out, {"a", "b"});
    w.field(1);
    EXPECT_THROW(w.end_row(), std::logic_error);
    w.field(2);
    EXPECT_THROW(w.field(3), std::logic_error);
}

TEST(TimeSeriesCsv, Layout) {
    TimeSeries ts;
    ts.t = {0.0, 0.5};
    ts.add_column("x");
    ts.columns[0] = {1.0, 2.0};
    std::ostringstream out;
    write_timeseries_csv(out, ts);
    EXPECT_EQ(out.str(), "t,x\n0,1\n0.5,2\n");
    EXPECT_THROW(ts.column("y"), std::out_of_range);
}

TEST(MatrixCsv, Layout) {
    Eigen::Matrix2d m;
    m << 1, 2, 3, 4;
    std::ostringstream out;
    write_matrix_csv(out, m, {"r0", "r1"}, {"c0", "c1"});
    EXPECT_EQ(out.str(), "row,c0,c1\nr0,1,2\nr1,3,4\n");
}
