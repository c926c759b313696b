#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "support/random_session.hpp"

using namespace viva;

namespace {

const char* kSchema = "T.When: datetime time\nT.G: categorical\n";

Category cat(std::string_view raw) { return std::get<Category>(normalize_level(raw)); }

} // namespace

TEST(NormalizeLevel, BlankBecomesNull) { EXPECT_EQ(cat("").value, "NULL"); }

TEST(NormalizeLevel, TrimsSurroundingWhitespace) { EXPECT_EQ(cat(" Female ").value, "Female"); }

TEST(NormalizeLevel, NullSpellings) {
    for (auto s : {"null", "NULL", "N/A", "   ", "\t"}) EXPECT_EQ(cat(s).value, "NULL") << s;
    EXPECT_EQ(cat("n/a").value, "n/a");
    EXPECT_EQ(cat("Nullable").value, "Nullable");
}

TEST(CellValue, NonFiniteNumbersAreMissing) {
    EXPECT_TRUE(is_missing(make_number(std::numeric_limits<double>::infinity())));
    EXPECT_TRUE(is_missing(make_number(std::nan(""))));
    EXPECT_FALSE(parse_number("nan").has_value());
    EXPECT_FALSE(parse_number("inf").has_value());
    EXPECT_FALSE(parse_number("12abc").has_value());
    EXPECT_DOUBLE_EQ(*parse_number(" +2.5 "), 2.5);
    EXPECT_DOUBLE_EQ(*parse_number("-1e3"), -1000.0);
}

TEST(CellValue, ListsHaveNoEmptiesOrDuplicates) {
    const auto v = std::get<ValueList>(make_list({"a", "", "b", "a", "c", "b"}));
    EXPECT_EQ(v.values, (std::vector<std::string>{"a", "b", "c"}));
    EXPECT_TRUE(is_missing(make_list({"", ""})));
}

TEST(Timestamps, AcceptedFormats) {
    EXPECT_EQ(*parse_timestamp("1970-01-02"), 86400);
    EXPECT_EQ(*parse_timestamp("1970-01-01 01:02"), 3720);
    EXPECT_EQ(*parse_timestamp("1970-01-01T00:00:05Z"), 5);
    EXPECT_EQ(*parse_timestamp("2020-02-29 23:59:59"), 1583020799);
    EXPECT_FALSE(parse_timestamp("2021-02-29").has_value());
    EXPECT_FALSE(parse_timestamp("2021-01-01 24:00").has_value());
    EXPECT_FALSE(parse_timestamp("yesterday").has_value());
    EXPECT_EQ(format_timestamp(1583020799), "2020-02-29 23:59:59");
    EXPECT_EQ(day_of_timestamp(-1), -1);
}

TEST(TimeRange, StartAfterEndIsRejected) {
    try {
        vt::range("2021-01-02", "2021-01-01");
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::InvalidRange);
    }
    EXPECT_NO_THROW(vt::range("2021-01-01", "2021-01-01"));
}

TEST(ColumnValues, EmptyDataset) {
    const auto d = vt::load("When,G\n", "T", kSchema);
    EXPECT_EQ(d.row_count(), 0u);
    EXPECT_TRUE(column_values(d, "T.G", vt::wide_range()).empty());
}

TEST(ColumnValues, RangeIsInclusiveByDate) {
    const auto d = vt::load("When,G\n2021-01-01 00:00:00,a\n2021-01-02 23:59:59,b\n2021-01-03 00:00:00,c\n", "T", kSchema);
    const auto v = column_values(d, "T.G", vt::range("2021-01-01", "2021-01-02"));
    ASSERT_EQ(v.size(), 2u);
    EXPECT_EQ(std::get<Category>(v[1]).value, "b");
    EXPECT_EQ(column_values(d, "T.G", vt::wide_range()).size(), d.row_count());
}

TEST(ColumnValues, MissingTimestampsExcluded) {
    const auto d = vt::load("When,G\n2021-01-01,a\n,b\nnot a date,c\n", "T", kSchema);
    EXPECT_EQ(d.row_count(), 3u);
    EXPECT_EQ(column_values(d, "T.G", vt::wide_range()).size(), 1u);
}

TEST(ColumnValues, UnknownAttribute) {
    const auto d = vt::load("When,G\n", "T", kSchema);
    try {
        column_values(d, "T.Nope", vt::wide_range());
        FAIL();
    } catch (const Error& e) {
        EXPECT_EQ(e.code(), ErrorCode::UnknownAttribute);
    }
}

TEST(ColumnValues, DisjointRangesPartitionRows) {
    vt::Rng rng(7);
    for (int trial = 0; trial < 40; ++trial) {
        const auto d = vt::random_dataset(rng, 300);
        const auto full = column_values(d, "R.C1", vt::wide_range()).size();
        std::size_t timed = 0;
        for (auto day : d.row_days()) timed += day != kNoDay;
        EXPECT_EQ(full, timed);
        const auto ext = d.day_extent();
        if (!ext) continue;
        const auto cut = ext->first + static_cast<std::int32_t>(vt::uniform(rng, ext->second - ext->first + 1));
        const auto left = column_values(d, "R.C1", TimeRange(date_from_day(ext->first - 5), date_from_day(cut))).size();
        const auto right =
            column_values(d, "R.C1", TimeRange(date_from_day(cut + 1), date_from_day(ext->second + 5))).size();
        EXPECT_EQ(left + right, full);
    }
}

TEST(Dataset, FreeformIsNotChartable) {
    const auto d = vt::load("When,G,Extra\n2021-01-01,a,hello\n", "T", kSchema);
    const auto& x = d.attribute("T.Extra");
    EXPECT_EQ(x.kind, AttributeKind::freeform);
    EXPECT_FALSE(x.chartable);
    EXPECT_TRUE(d.attribute("T.G").chartable);
}

TEST(Fingerprint, SensitiveToCells) {
    const auto a = vt::load("When,G\n2021-01-01,a\n", "T", kSchema);
    const auto b = vt::load("When,G\n2021-01-01,b\n", "T", kSchema);
    const auto c = vt::load("When,G\n2021-01-01,a\n", "T", kSchema);
    EXPECT_NE(fingerprint(a), fingerprint(b));
    EXPECT_EQ(fingerprint(a), fingerprint(c));
}
