#include <gtest/gtest.h>

#include "support/fixtures.hpp"
#include "support/live_server.hpp"
#include "support/svg_check.hpp"

using nlohmann::json;

namespace {

const char* kSchema = "E.When: datetime time\nE.G: categorical\nE.H: categorical\nE.V: numerical units=u\n";
const char* kCsv = "When,G,H,V\n2021-01-01,a,x,1\n2021-01-02,b,y,2\n2021-01-03,,x,3\n";

struct ServerTest : ::testing::Test {
    vt::TempDir dir;
    std::unique_ptr<vt::LiveServer> srv;

    void SetUp() override {
        dir.write(viva::kSchemaFile, kSchema);
        srv = std::make_unique<vt::LiveServer>(dir.path());
    }

    httplib::Result post(const std::string& path, const json& j) {
        auto c = srv->client();
        return c.Post(path, j.dump(), "application/json");
    }
    httplib::Result get(const std::string& path) {
        auto c = srv->client();
        return c.Get(path);
    }
    void load() {
        auto c = srv->client();
        ASSERT_EQ(vt::upload(c, {{"E", kCsv}})->status, 200);
    }
};

} // namespace

TEST_F(ServerTest, HealthAndIndex) {
    EXPECT_EQ(get("/api/health")->status, 200);
    const auto r = get("/");
    EXPECT_EQ(r->status, 200);
    EXPECT_NE(r->get_header_value("Content-Type").find("text/html"), std::string::npos);
}

TEST_F(ServerTest, HeaderOnlyUpload) {
    auto c = srv->client();
    const auto r = vt::upload(c, {{"E", "When,G,H,V\n"}});
    ASSERT_EQ(r->status, 200);
    EXPECT_EQ(vt::body(r).at("datasets")[0].at("row_count"), 0);
}

TEST_F(ServerTest, UploadFieldNameIsDatasetName) {
    auto c = srv->client();
    httplib::MultipartFormDataItems items = {{"E", kCsv, "whatever.csv", "text/csv"}};
    const auto r = c.Post("/api/data", items);
    ASSERT_EQ(r->status, 200);
    EXPECT_EQ(vt::body(r).at("datasets")[0].at("id"), "E");
}

TEST_F(ServerTest, BadUploadsAre400) {
    auto c = srv->client();
    auto r = vt::upload(c, {{"E", "When,G\n2021-01-01,a\n"}});
    EXPECT_EQ(r->status, 400);
    EXPECT_EQ(vt::body(r).at("code"), "MissingColumn");
    r = vt::upload(c, {{"E", "When,G,H,V\n\"2021-01-01,a,x,1\n"}});
    EXPECT_EQ(r->status, 400);
    EXPECT_EQ(vt::body(r).at("code"), "MalformedCsv");
    EXPECT_EQ(c.Post("/api/ops", "{not json", "application/json")->status, 400);
}

TEST_F(ServerTest, OpWithoutModeMakesNew) {
    load();
    const auto r = post("/api/ops", {{"kind", "FilterOut"}, {"target_attribute_id", "E.G"}, {"levels", {"NULL"}}});
    ASSERT_EQ(r->status, 200) << r->body;
    const auto j = vt::body(r);
    EXPECT_FALSE(j.at("created_attribute_ids").empty());
    EXPECT_EQ(j.at("seq"), 1);
    const auto cat = vt::body(get("/api/catalog"));
    EXPECT_EQ(cat.at("datasets")[0].at("attributes").size(), 5u);
}

TEST_F(ServerTest, SvgExportOfTwoLevelRollup) {
    auto c = srv->client();
    ASSERT_EQ(vt::upload(c, {{"E", "When,G,H,V\n2021-01-01,a,x,1\n2021-01-02,b,x,2\n2021-01-02,b,x,2\n"}})->status, 200);
    const auto r = get("/api/export/svg?mode=rollup&attribute=E.G");
    ASSERT_EQ(r->status, 200);
    EXPECT_EQ(r->get_header_value("Content-Type"), "image/svg+xml");
    const auto m = vt::svg::parse(r->body);
    ASSERT_TRUE(m);
    EXPECT_EQ(vt::svg::count(*m, "rect.mark bar"), 2u);
}

TEST_F(ServerTest, ChartQueries) {
    load();
    auto r = get("/api/chart?mode=stratify&attribute=E.G&attribute=E.H");
    ASSERT_EQ(r->status, 200) << r->body;
    EXPECT_EQ(vt::body(r).at("bars").size(), 3u);
    r = get("/api/chart?mode=partition&attribute=E.G&granularity=week&value_mode=percentage");
    ASSERT_EQ(r->status, 200) << r->body;
    r = get("/api/chart?mode=partition&attribute=E.G&value_mode=percentage&accumulate=true");
    EXPECT_EQ(r->status, 422);
    EXPECT_EQ(vt::body(r).at("code"), "InvalidCombination");
    r = get("/api/chart?mode=histogram&attribute=E.V&bins=4");
    ASSERT_EQ(r->status, 200);
    EXPECT_EQ(vt::body(r).at("bins").size(), 4u);
    r = get("/api/chart?mode=rollup&attribute=E.V");
    EXPECT_EQ(r->status, 422);
    EXPECT_EQ(vt::body(r).at("code"), "WrongKind");
}

TEST_F(ServerTest, RangeEndpoint) {
    load();
    auto c = srv->client();
    auto r = c.Put("/api/range", json{{"start", "2021-01-02"}, {"end", "2021-01-03"}}.dump(), "application/json");
    ASSERT_EQ(r->status, 200);
    EXPECT_EQ(vt::body(get("/api/chart?mode=rollup&attribute=E.G")).at("total"), 2);
    r = c.Put("/api/range", json{{"start", "2021-01-05"}, {"end", "2021-01-03"}}.dump(), "application/json");
    EXPECT_EQ(r->status, 422);
    EXPECT_EQ(vt::body(r).at("code"), "InvalidRange");
}

TEST_F(ServerTest, ReadsDoNotChangeState) {
    load();
    post("/api/ops", {{"kind", "MergeLevels"}, {"target_attribute_id", "E.G"}, {"levels", {"a", "b"}}, {"new_name", "ab"}});
    const auto before = get("/api/catalog")->body;
    const auto log_before = dir.read(viva::kOpsLog);
    for (const auto* path : {"/api/catalog", "/api/ops", "/api/chart?mode=rollup&attribute=E%231",
                             "/api/chart?mode=flow&attribute=E.G&attribute=E.H", "/api/export/svg?mode=histogram&attribute=E.V",
                             "/api/chart?mode=rollup&attribute=E.Nope"})
        get(path);
    EXPECT_EQ(get("/api/catalog")->body, before);
    EXPECT_EQ(dir.read(viva::kOpsLog), log_before);
}

TEST_F(ServerTest, ErrorStatuses) {
    load();
    post("/api/ops", {{"kind", "MergeLevels"}, {"target_attribute_id", "E.G"}, {"levels", {"a", "b"}}, {"new_name", "ab"}});
    post("/api/ops", {{"kind", "FilterOut"}, {"target_attribute_id", "E#1"}, {"levels", {"ab"}}});
    auto c = srv->client();
    auto r = c.Delete("/api/ops/1");
    EXPECT_EQ(r->status, 409);
    EXPECT_EQ(vt::body(r).at("details").at("dependents"), json::array({2}));
    EXPECT_EQ(c.Delete("/api/ops/99")->status, 404);
    r = post("/api/ops", {{"kind", "FilterOut"}, {"target_attribute_id", "E.G"}, {"levels", {"zzz"}}});
    EXPECT_EQ(r->status, 422);
    EXPECT_EQ(vt::body(r).at("code"), "UnknownLevel");
    r = post("/api/concerns", {{"kind", "Delete"}, {"concern", std::string(viva::kDefaultConcern)}});
    EXPECT_EQ(r->status, 422);
    EXPECT_EQ(vt::body(r).at("code"), "ProtectedConcern");
    r = c.Delete("/api/ops/1?cascade=true");
    ASSERT_EQ(r->status, 200);
    EXPECT_EQ(vt::body(r).at("removed"), json::array({1, 2}));
    r = c.Post("/api/undo", "", "application/json");
    EXPECT_EQ(r->status, 422);
    EXPECT_EQ(vt::body(r).at("code"), "EmptyLog");
}

TEST_F(ServerTest, ConcernEditsAndHistory) {
    load();
    auto r = post("/api/concerns", {{"kind", "Copy"}, {"concern", std::string(viva::kDefaultConcern)}, {"new_name", "Mine"}});
    ASSERT_EQ(r->status, 200) << r->body;
    r = post("/api/concerns", {{"kind", "RemoveMember"}, {"concern", "Mine"}, {"attribute_id", "E.G"}});
    ASSERT_EQ(r->status, 200) << r->body;
    r = post("/api/ops", {{"kind", "RenameAttribute"}, {"target_attribute_id", "E.H"}, {"new_name", "Hue"}});
    ASSERT_EQ(r->status, 200) << r->body;
    EXPECT_EQ(vt::body(r).at("seq"), 3);
    const auto hist = vt::body(get("/api/ops"));
    ASSERT_EQ(hist.size(), 1u);
    EXPECT_EQ(hist[0].at("status"), "applied");
    const auto cat = vt::body(get("/api/catalog"));
    EXPECT_EQ(cat.at("concerns")[1].at("members"), json::array({"E.When", "E.H", "E.V"}));
}
