#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "viva/synth.hpp"

using namespace viva;

namespace {

const char* kSchema = R"(P.When: datetime time
P.Gender: categorical
P.Age: ordered
P.Dur: numerical units=seconds
P.Rate: percent
P.Langs: list
P.Tags: list sep=;
)";

} // namespace

TEST(ReadCsv, QuotingAndLineEnds) {
    const auto rows = read_csv("a,b\r\n\"x, y\",\"he said \"\"hi\"\"\"\n\n\"multi\nline\",\n");
    ASSERT_EQ(rows.size(), 3u);
    EXPECT_EQ(rows[1][0], "x, y");
    EXPECT_EQ(rows[1][1], "he said \"hi\"");
    EXPECT_EQ(rows[2][0], "multi\nline");
    EXPECT_EQ(rows[2][1], "");
}

TEST(ReadCsv, UnterminatedQuote) {
    EXPECT_EQ(vt::code_of([] { read_csv("a\n\"oops\n"); }), ErrorCode::MalformedCsv);
}

TEST(ParseCsv, HeaderOnly) {
    const auto d = vt::load("When,Gender,Age,Dur,Rate,Langs,Tags\n", "P", kSchema);
    EXPECT_EQ(d.row_count(), 0u);
    ASSERT_EQ(d.attributes().size(), 7u);
    EXPECT_EQ(d.attribute("P.Dur").kind, AttributeKind::quantitative);
    EXPECT_TRUE(d.attribute("P.Gender").levels.empty());
    EXPECT_EQ(d.time_attribute(), "P.When");
}

TEST(ParseCsv, GenderLevelsAndCounts) {
    const auto d = vt::load("When,Gender,Age,Dur,Rate,Langs,Tags\n"
                            "2021-01-01,F,1,1,1,,\n2021-01-01,F,1,1,1,,\n2021-01-01,M,1,1,1,,\n2021-01-01,,1,1,1,,\n",
                            "P", kSchema);
    const auto& g = d.attribute("P.Gender");
    EXPECT_EQ(g.levels, (std::vector<std::string>{"F", "M", "NULL"}));
    const auto counts = level_counts(d.column("P.Gender"));
    EXPECT_EQ(counts.at("F"), 2u);
    EXPECT_EQ(counts.at("M"), 1u);
    EXPECT_EQ(counts.at("NULL"), 1u);
}

TEST(ParseCsv, CellConversion) {
    const auto d = vt::load("When,Gender,Age,Dur,Rate,Langs,Tags\n"
                            "2021-01-01 10:00,F,2, 12.5 ,45%,en|fr||en,a;b\n"
                            "bad,N/A,,x,,,\n",
                            "P", kSchema);
    EXPECT_EQ(std::get<Number>(d.column("P.Dur")[0]).value, 12.5);
    EXPECT_EQ(std::get<Number>(d.column("P.Rate")[0]).value, 45.0);
    EXPECT_EQ(std::get<ValueList>(d.column("P.Langs")[0]).values, (std::vector<std::string>{"en", "fr"}));
    EXPECT_EQ(std::get<ValueList>(d.column("P.Tags")[0]).values, (std::vector<std::string>{"a", "b"}));
    EXPECT_TRUE(is_missing(d.column("P.When")[1]));
    EXPECT_EQ(std::get<Category>(d.column("P.Gender")[1]).value, "NULL");
    EXPECT_EQ(std::get<Category>(d.column("P.Age")[1]).value, "NULL");
    EXPECT_TRUE(is_missing(d.column("P.Dur")[1]));
    EXPECT_EQ(std::get<ValueList>(d.column("P.Langs")[1]).values, std::vector<std::string>{"NULL"});
}

TEST(ParseCsv, SpecifiedMergesApplyAtIngest) {
    std::vector<LineDiagnostic> diags;
    const auto merges = parse_merges("P.Gender: F, Female -> Female\nP.Langs: fr -> French\n", diags);
    const auto d = vt::load("When,Gender,Age,Dur,Rate,Langs,Tags\n"
                            "2021-01-01,F,1,1,1,fr|en,\n2021-01-01,Female,1,1,1,French,\n2021-01-01,M,1,1,1,,\n",
                            "P", kSchema, merges);
    EXPECT_EQ(d.attribute("P.Gender").levels, (std::vector<std::string>{"Female", "M"}));
    EXPECT_EQ(level_counts(d.column("P.Gender")).at("Female"), 2u);
    EXPECT_EQ(level_counts(d.column("P.Langs")).at("French"), 2u);
}

TEST(ParseCsv, Errors) {
    EXPECT_EQ(vt::code_of([] { vt::load("When,Gender\n2021-01-01,F\n", "P", kSchema); }), ErrorCode::MissingColumn);
    EXPECT_EQ(vt::code_of([] { vt::load("", "P", kSchema); }), ErrorCode::MalformedCsv);
    EXPECT_EQ(vt::code_of([] { vt::load("When,Gender,Age,Dur,Rate,Langs,Tags\n1,2\n", "P", kSchema); }),
              ErrorCode::MalformedCsv);
    EXPECT_EQ(vt::code_of([] { vt::load("When,Gender,Gender\n", "P", kSchema); }), ErrorCode::MalformedCsv);
    EXPECT_EQ(vt::code_of([] { vt::load("G\nx\n", "Q", "Q.G: categorical\n"); }), ErrorCode::NoTimeAttribute);
}

TEST(ParseCsv, BomIsIgnored) {
    const auto d = vt::load("\xEF\xBB\xBFWhen,G\n2021-01-01,a\n", "T", "T.When: datetime time\nT.G: categorical\n");
    EXPECT_TRUE(d.find("T.When").has_value());
}

TEST(ParseCsv, EncountersKindCounts) {
    synth::GeneratorSpec spec;
    spec.months = 1;
    spec.scale = 0.05;
    const auto out = synth::generate(spec);
    std::string schema_text;
    for (const auto& [name, text] : out.config)
        if (name == kSchemaFile) schema_text = text;
    const auto schema = vt::schema_of(schema_text);
    std::string csv;
    for (const auto& [name, bytes] : out.csv)
        if (name == "Encounters") csv = bytes;
    const auto d = parse_csv(csv, "Encounters", schema);
    std::map<AttributeKind, int> kinds;
    for (const auto& a : d.attributes()) ++kinds[a.kind];
    EXPECT_EQ(kinds[AttributeKind::categorical], 22);
    EXPECT_EQ(kinds[AttributeKind::quantitative], 3);
    EXPECT_EQ(kinds[AttributeKind::datetime], 1);
    EXPECT_EQ(kinds[AttributeKind::ordered], 0);
}
