#pragma once

/**
 * @file synth.hpp
 * @brief Deterministic synthetic telehealth-style datasets.
 *
 * Four CSVs (Encounters, IntervalOps, Survey, CallBack) plus a matching
 * schema.cfg. Output bytes depend only on (seed, months, scale); random
 * draws go through explicit bit manipulation of mt19937_64 output so no
 * library distribution is involved.
 */

#include <algorithm>
#include <chrono>
#include <cmath>
#include <cstdint>
#include <cstdio>
#include <filesystem>
#include <map>
#include <random>
#include <string>
#include <utility>
#include <vector>

#include "viva/config.hpp"
#include "viva/error.hpp"
#include "viva/tabular.hpp"

namespace viva::synth {

namespace fs = std::filesystem;

struct GeneratorSpec {
    std::uint64_t seed = 1;
    int months = 12;
    double scale = 1.0;
    bool demo_config = false;
};

/// Monthly rows at scale 1.
inline constexpr int kEncountersPerMonth = 4000;
inline constexpr int kIntervalOpsPerMonth = 3000;
inline constexpr int kSurveyPerMonth = 200;
inline constexpr int kCallBackPerMonth = 500;
inline constexpr double kDowngradeRate = 0.3;

/// Generation starts on this month.
inline constexpr std::chrono::year_month kStartMonth{std::chrono::year{2020}, std::chrono::April};

struct Output {
    /// Dataset name -> CSV bytes, in generation order.
    std::vector<std::pair<std::string, std::string>> csv;
    /// File name -> contents (schema.cfg always, the rest with demo_config).
    std::vector<std::pair<std::string, std::string>> config;
};

namespace detail {

class Rng {
public:
    explicit Rng(std::uint64_t seed) : gen_(seed) {}

    /// [0, 1) with 53 random bits.
    double uniform() { return static_cast<double>(gen_() >> 11) * 0x1.0p-53; }

    std::uint64_t below(std::uint64_t n) { return static_cast<std::uint64_t>(uniform() * static_cast<double>(n)); }

    bool chance(double p) { return uniform() < p; }

    double range(double lo, double hi) { return lo + (hi - lo) * uniform(); }

    /// Exponential with the given mean.
    double exponential(double mean) { return -mean * std::log1p(-uniform()); }

    std::size_t pick(const std::vector<double>& weights) {
        double total = 0.0;
        for (double w : weights) total += w;
        double u = uniform() * total;
        for (std::size_t i = 0; i < weights.size(); ++i) {
            if (u < weights[i]) return i;
            u -= weights[i];
        }
        return weights.size() - 1;
    }

private:
    std::mt19937_64 gen_;
};

struct Choice {
    std::string name;
    std::vector<std::string> levels;
    std::vector<double> weights;

    const std::string& draw(Rng& rng) const { return levels[rng.pick(weights)]; }
};

inline std::string fixed(double v, int digits) {
    char buf[48];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

inline std::string csv_field(const std::string& s) {
    if (s.find_first_of(",\"\r\n") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += '"';
        out += c;
    }
    return out + "\"";
}

class CsvWriter {
public:
    explicit CsvWriter(const std::vector<std::string>& header) { row(header); }

    void row(const std::vector<std::string>& fields) {
        for (std::size_t i = 0; i < fields.size(); ++i) {
            if (i) text_ += ',';
            text_ += csv_field(fields[i]);
        }
        text_ += "\r\n";
    }

    std::string take() && { return std::move(text_); }

private:
    std::string text_;
};

/// Sorted random timestamps, `per_month` inside each month.
inline std::vector<std::int64_t> month_times(Rng& rng, int months, int per_month) {
    using namespace std::chrono;
    std::vector<std::int64_t> out;
    out.reserve(static_cast<std::size_t>(months) * static_cast<std::size_t>(per_month));
    for (int m = 0; m < months; ++m) {
        const auto ym = kStartMonth + std::chrono::months{m};
        const auto start = static_cast<std::int64_t>(day_number(sys_days{ym / 1})) * 86400;
        const auto end = static_cast<std::int64_t>(day_number(sys_days{(ym + std::chrono::months{1}) / 1})) * 86400;
        std::vector<std::int64_t> times;
        for (int i = 0; i < per_month; ++i)
            times.push_back(start + static_cast<std::int64_t>(rng.below(static_cast<std::uint64_t>(end - start))));
        std::sort(times.begin(), times.end());
        out.insert(out.end(), times.begin(), times.end());
    }
    return out;
}

inline int scaled(int base, double scale) { return static_cast<int>(std::lround(base * scale)); }

inline const std::vector<std::string> kAges = {"0-9", "10-19", "20-29", "30-39", "40-49", "50-59", "60-69", "70-79", "80+"};
inline const std::vector<std::string> kAuthorities = {"Fraser", "Interior", "Island", "Northern", "VancouverCoastal"};
inline const std::vector<std::string> kLikert = {"1", "2", "3", "4", "5"};

inline Choice choice(std::string name, std::vector<std::string> levels, std::vector<double> weights = {}) {
    if (weights.empty()) weights.assign(levels.size(), 1.0);
    return {std::move(name), std::move(levels), std::move(weights)};
}

struct Schema {
    std::string text;
    void add(const std::string& ds, const std::string& attr, const std::string& kind) {
        text += ds + "." + attr + ": " + kind + "\n";
    }
};

// ---------------------------------------------------------------------------

inline std::string encounters(Rng& rng, int months, double scale, Schema& schema) {
    const std::string ds = "Encounters";
    const auto rn_levels = std::vector<std::string>{"Red", "Yellow", "Green", "TryHomeTreatment", ""};
    const std::vector<Choice> plain = {
        choice("Client_Age_Range", kAges, {9, 7, 12, 13, 12, 12, 13, 12, 10}),
        choice("Gender", {"Female", "Male", "", "Other"}, {52, 44, 3, 1}),
        choice("HealthAuthority", kAuthorities, {30, 15, 17, 8, 30}),
        choice("NursingProblemCategory",
               {"Respiratory", "Gastrointestinal", "Musculoskeletal", "Skin", "MentalHealth", "Medication", "Fever",
                "Pain", "Injury", "Other"},
               {16, 14, 10, 8, 7, 9, 12, 10, 9, 5}),
        choice("CallerRelationship", {"Self", "Parent", "Spouse", "Caregiver", "Other"}, {55, 25, 10, 7, 3}),
        choice("Language", {"English", "French", "Punjabi", "Mandarin", "Cantonese", "Other"}, {78, 3, 6, 5, 4, 4}),
        choice("CallSource", {"Direct", "Transfer911", "Referral", "Web"}, {70, 8, 12, 10}),
        choice("SeekCareLocation", {"EmergencyDept", "UrgentCare", "FamilyDoctor", "Pharmacy", "None"},
               {15, 20, 30, 10, 25}),
        choice("PriorCallWithin24h", {"Yes", "No"}, {12, 88}),
        choice("InterpreterUsed", {"Yes", "No"}, {9, 91}),
        choice("SymptomOnset", {"<24h", "1-3 days", "4-7 days", ">1 week"}, {35, 35, 18, 12}),
        choice("ChronicCondition", {"Yes", "No", "Unknown"}, {30, 60, 10}),
        choice("Pregnant", {"Yes", "No", "N/A"}, {3, 47, 50}),
        choice("CallOutcome", {"Advice", "Referred", "Transferred", "Dropped"}, {50, 35, 10, 5}),
        choice("RNExperienceBand", {"<2y", "2-5y", "5-10y", "10y+"}, {15, 30, 30, 25}),
        choice("ShiftType", {"Day", "Evening", "Night"}, {50, 35, 15}),
        choice("FollowUpRequested", {"Yes", "No"}, {20, 80}),
        choice("ProtocolUsed", {"Adult", "Pediatric", "Geriatric", "MentalHealth"}, {55, 20, 18, 7}),
        choice("UrbanRural", {"Urban", "Rural", "Remote"}, {70, 25, 5}),
    };
    schema.add(ds, "CallDateTime", "datetime time");
    for (const auto& c : plain) schema.add(ds, c.name, "categorical");
    schema.add(ds, "RNDisposition", "categorical");
    schema.add(ds, "MDDisposition", "categorical");
    schema.add(ds, "Weekend", "categorical");
    schema.add(ds, "CallDurationMin", "numerical units=minutes");
    schema.add(ds, "WaitTimeMin", "numerical units=minutes");
    schema.add(ds, "AdviceItems", "numerical units=items");

    std::vector<std::string> header{"EncounterID", "CallDateTime"};
    for (const auto& c : plain) header.push_back(c.name);
    for (auto h : {"RNDisposition", "MDDisposition", "Weekend", "CallDurationMin", "WaitTimeMin", "AdviceItems"})
        header.emplace_back(h);
    CsvWriter w(header);
    const auto times = month_times(rng, months, scaled(kEncountersPerMonth, scale));
    std::size_t id = 0;
    for (auto t : times) {
        std::vector<std::string> row{"E" + fixed(static_cast<double>(++id), 0), format_timestamp(t)};
        for (const auto& c : plain) row.push_back(c.draw(rng));
        const auto& rn = rn_levels[rng.pick({12, 30, 28, 24, 6})];
        std::string md;
        if (rn == "Yellow") md = rng.chance(kDowngradeRate) ? "Green" : "Yellow";
        else if (rn == "Red") md = rng.chance(0.85) ? "Red" : "Yellow";
        else md = "";
        row.push_back(rn);
        row.push_back(md);
        const auto wd = std::chrono::weekday{date_from_day(day_of_timestamp(t))}.iso_encoding();
        row.emplace_back(wd >= 6 ? "Yes" : "No");
        row.push_back(fixed(2.0 + rng.exponential(9.0), 1));
        row.push_back(rng.chance(0.02) ? "" : fixed(rng.exponential(14.0), 1));
        row.push_back(fixed(static_cast<double>(1 + rng.below(6)), 0));
        w.row(row);
    }
    return std::move(w).take();
}

inline std::string interval_ops(Rng& rng, int months, double scale, Schema& schema) {
    const std::string ds = "IntervalOps";
    struct Q {
        const char* name;
        const char* kind;
    };
    const std::vector<Q> qs = {
        {"CallsOffered", "numerical units=calls"},      {"CallsAnswered", "numerical units=calls"},
        {"CallsAbandoned", "numerical units=calls"},    {"AbandonRate", "percent"},
        {"ServiceLevel", "percent"},                    {"Occupancy", "percent"},
        {"Utilization", "percent"},                     {"AvgSpeedAnswer", "numerical units=seconds"},
        {"AvgHandleTime", "numerical units=seconds"},   {"AvgTalkTime", "numerical units=seconds"},
        {"AvgHoldTime", "numerical units=seconds"},     {"LongestWait", "numerical units=seconds"},
        {"AgentsStaffed", "numerical units=agents"},    {"AgentsAvailable", "numerical units=agents"},
        {"CallbacksQueued", "numerical units=calls"},   {"CallbacksCompleted", "numerical units=calls"},
        {"TransfersOut", "numerical units=calls"},      {"ShortCalls", "numerical units=calls"},
    };
    schema.add(ds, "IntervalStart", "datetime time");
    std::vector<std::string> header{"IntervalStart"};
    for (const auto& q : qs) {
        schema.add(ds, q.name, q.kind);
        header.emplace_back(q.name);
    }
    CsvWriter w(header);
    for (auto t : month_times(rng, months, scaled(kIntervalOpsPerMonth, scale))) {
        const double offered = std::floor(rng.range(5, 120));
        const double abandoned = std::floor(offered * rng.range(0.0, 0.15));
        const double answered = offered - abandoned;
        const double staffed = std::floor(rng.range(4, 40));
        const double service = rng.range(55, 99);
        const double speed = rng.exponential(60.0);
        const std::vector<std::string> row = {
            format_timestamp(t),
            fixed(offered, 0),
            fixed(answered, 0),
            fixed(abandoned, 0),
            fixed(offered > 0 ? 100.0 * abandoned / offered : 0.0, 2) + "%",
            fixed(service, 1),
            fixed(rng.range(60, 95), 1),
            fixed(rng.range(50, 90), 1),
            fixed(speed, 0),
            fixed(rng.range(300, 900), 0),
            fixed(rng.range(200, 700), 0),
            fixed(rng.exponential(40.0), 0),
            fixed(speed * rng.range(2.0, 6.0), 0),
            fixed(staffed, 0),
            fixed(std::floor(staffed * rng.range(0.1, 0.6)), 0),
            fixed(std::floor(rng.range(0, 20)), 0),
            fixed(std::floor(rng.range(0, 18)), 0),
            fixed(std::floor(rng.range(0, 6)), 0),
            fixed(std::floor(rng.range(0, 10)), 0),
        };
        w.row(row);
    }
    return std::move(w).take();
}

inline std::string survey(Rng& rng, int months, double scale, Schema& schema) {
    const std::string ds = "Survey";
    const std::vector<Choice> cats = {
        choice("HealthAuthority", kAuthorities, {30, 15, 17, 8, 30}),
        choice("Gender", {"Female", "Male", "", "Other"}, {58, 38, 3, 1}),
        choice("Client_Age_Range", kAges, {3, 5, 10, 12, 14, 16, 17, 14, 9}),
        choice("ServiceUsed", {"Nurse", "Dietitian", "Pharmacist", "ExercisePhysiologist"}, {70, 12, 13, 5}),
        choice("HowHeard", {"FamilyDoctor", "Friend", "Family", "Web", "Advertising", "Other"}, {25, 20, 18, 20, 10, 7}),
        choice("FollowedAdvice", {"Yes", "Partly", "No"}, {70, 20, 10}),
        choice("WouldCallAgain", {"Yes", "No", "Unsure"}, {80, 7, 13}),
        choice("SurveyMode", {"Phone", "Online", "Mail"}, {50, 40, 10}),
        choice("RepeatCaller", {"Yes", "No"}, {35, 65}),
        choice("LanguagePreferred", {"English", "French", "Punjabi", "Chinese", "Other"}, {80, 3, 6, 7, 4}),
        choice("CallReason", {"Symptom", "Medication", "Information", "Navigation"}, {55, 15, 20, 10}),
        choice("ContactedOtherService", {"Yes", "No"}, {30, 70}),
    };
    const std::vector<std::string> likert = {"SatisfactionOverall", "SatisfactionWait", "SatisfactionNurse",
                                             "EaseOfAccess",        "AdviceClarity",    "Reassurance",
                                             "Courtesy",            "LikelihoodRecommend"};
    schema.add(ds, "SurveyDate", "datetime time");
    for (const auto& c : cats) schema.add(ds, c.name, "categorical");
    for (const auto& l : likert) schema.add(ds, l, "ordered");
    schema.add(ds, "WaitMinutesReported", "numerical units=minutes");
    schema.add(ds, "CallLengthReported", "numerical units=minutes");
    schema.add(ds, "DaysSinceCall", "numerical units=days");
    schema.add(ds, "RespondentAge", "numerical units=years");
    schema.add(ds, "Comments", "freeform");

    std::vector<std::string> header{"SurveyDate"};
    for (const auto& c : cats) header.push_back(c.name);
    header.insert(header.end(), likert.begin(), likert.end());
    for (auto h : {"WaitMinutesReported", "CallLengthReported", "DaysSinceCall", "RespondentAge", "Comments"})
        header.emplace_back(h);
    static const std::vector<std::string> remarks = {
        "Nurse was very helpful", "Waited too long, but advice was good", "Clear instructions, thank you",
        "Could not get through the first time", "Would recommend to friends", "Felt rushed",
        "Advice saved me a trip to emergency", ""};
    CsvWriter w(header);
    for (auto t : month_times(rng, months, scaled(kSurveyPerMonth, scale))) {
        std::vector<std::string> row{format_timestamp(t)};
        for (const auto& c : cats) row.push_back(c.draw(rng));
        const double mood = rng.uniform();
        for (std::size_t i = 0; i < likert.size(); ++i) {
            const double lean = mood * 0.7 + rng.uniform() * 0.3;
            row.push_back(kLikert[std::min<std::size_t>(4, static_cast<std::size_t>(lean * 5.0))]);
        }
        row.push_back(fixed(rng.exponential(12.0), 0));
        row.push_back(fixed(3.0 + rng.exponential(8.0), 0));
        row.push_back(fixed(std::floor(rng.range(1, 30)), 0));
        row.push_back(fixed(std::floor(rng.range(18, 90)), 0));
        row.push_back(remarks[rng.below(remarks.size())]);
        w.row(row);
    }
    return std::move(w).take();
}

inline std::string callback(Rng& rng, int months, double scale, Schema& schema) {
    const std::string ds = "CallBack";
    const std::vector<Choice> cats = {
        choice("CallBackDisposition", {"Red", "red", "HIGH", "Yellow", "yellow", "MEDIUM", "Green", "green", "LOW", ""},
               {8, 4, 3, 18, 7, 5, 22, 8, 6, 3}),
        choice("HealthAuthority", kAuthorities, {30, 15, 17, 8, 30}),
        choice("CallBackReason", {"Results", "Worsening", "Medication", "Referral", "NoAnswerFirstCall"},
               {20, 30, 15, 20, 15}),
        choice("ReachedClient", {"Yes", "No"}, {78, 22}),
        choice("CallBackType", {"Scheduled", "Unscheduled"}, {65, 35}),
        choice("NurseRole", {"RN", "LPN", "NP"}, {70, 25, 5}),
        choice("Gender", {"Female", "Male", "", "Other"}, {52, 44, 3, 1}),
    };
    schema.add(ds, "CallBackDateTime", "datetime time");
    for (const auto& c : cats) schema.add(ds, c.name, "categorical");
    schema.add(ds, "PriorityLevel", "ordered");
    schema.add(ds, "MinutesToCallBack", "numerical units=minutes");
    schema.add(ds, "Attempts", "numerical units=attempts");
    std::vector<std::string> header{"CallBackDateTime"};
    for (const auto& c : cats) header.push_back(c.name);
    for (auto h : {"PriorityLevel", "MinutesToCallBack", "Attempts"}) header.emplace_back(h);
    CsvWriter w(header);
    for (auto t : month_times(rng, months, scaled(kCallBackPerMonth, scale))) {
        std::vector<std::string> row{format_timestamp(t)};
        for (const auto& c : cats) row.push_back(c.draw(rng));
        row.push_back(std::to_string(1 + rng.pick({30, 45, 25})));
        row.push_back(fixed(5.0 + rng.exponential(45.0), 0));
        row.push_back(std::to_string(1 + rng.pick({70, 20, 10})));
        w.row(row);
    }
    return std::move(w).take();
}

inline std::vector<std::pair<std::string, std::string>> demo_config() {
    std::vector<ConcernSpec> concerns = {
        {"Patient Satisfaction",
         {"Survey.SatisfactionOverall", "Survey.SatisfactionWait", "Survey.SatisfactionNurse", "Survey.Courtesy",
          "Survey.LikelihoodRecommend", "Survey.WouldCallAgain"}},
        {"Call Volumes",
         {"IntervalOps.CallsOffered", "IntervalOps.CallsAnswered", "IntervalOps.CallsAbandoned",
          "IntervalOps.AbandonRate", "Encounters.CallSource"}},
        {"Patient Journey",
         {"Encounters.RNDisposition", "Encounters.MDDisposition", "Encounters.SeekCareLocation",
          "CallBack.CallBackDisposition", "CallBack.ReachedClient"}},
        {"Nurse Triage",
         {"Encounters.RNDisposition", "Encounters.NursingProblemCategory", "Encounters.ProtocolUsed",
          "Encounters.RNExperienceBand", "Encounters.CallDurationMin"}},
        {"Physician Review", {"Encounters.MDDisposition", "Encounters.RNDisposition", "Encounters.CallOutcome"}},
        {"Demographics",
         {"Encounters.Client_Age_Range", "Encounters.Gender", "Encounters.HealthAuthority", "Encounters.Language",
          "Encounters.UrbanRural"}},
        {"Service Levels",
         {"IntervalOps.ServiceLevel", "IntervalOps.AvgSpeedAnswer", "IntervalOps.AvgHandleTime",
          "IntervalOps.LongestWait"}},
        {"Call Backs",
         {"CallBack.CallBackDisposition", "CallBack.CallBackReason", "CallBack.PriorityLevel",
          "CallBack.MinutesToCallBack", "CallBack.Attempts"}},
        {"Staffing",
         {"IntervalOps.AgentsStaffed", "IntervalOps.AgentsAvailable", "IntervalOps.Occupancy",
          "IntervalOps.Utilization", "Encounters.ShiftType"}},
        {"Wait Times",
         {"Encounters.WaitTimeMin", "Survey.WaitMinutesReported", "Survey.SatisfactionWait",
          "IntervalOps.AvgHoldTime"}},
    };
    std::vector<OrderingRule> orderings = {
        {"Encounters", "RNDisposition", {"Red", "Yellow", "Green", "TryHomeTreatment", "NULL"}},
        {"Encounters", "MDDisposition", {"Red", "Yellow", "Green", "TryHomeTreatment", "NULL"}},
        {"Encounters", "Client_Age_Range", kAges},
        {"Survey", "Client_Age_Range", kAges},
    };
    std::vector<ColorRule> colors = {
        {"Encounters", "RNDisposition", "TryHomeTreatment", "#8C564B"},
        {"Encounters", "MDDisposition", "TryHomeTreatment", "#8C564B"},
    };
    std::vector<MergeRule> merges = {
        {"Survey", "LanguagePreferred", "Other", {"French", "Other"}},
    };
    return {{kConcernsFile, serialize_concerns(concerns)},
            {kOrderingsFile, serialize_orderings(orderings)},
            {kColorsFile, serialize_colors(colors)},
            {kMergesFile, serialize_merges(merges)}};
}

} // namespace detail

inline Output generate(const GeneratorSpec& spec) {
    if (spec.months < 1) fail(ErrorCode::InvalidSpec, "months must be at least 1");
    if (!(spec.scale > 0.0) || !std::isfinite(spec.scale)) fail(ErrorCode::InvalidSpec, "scale must be positive");
    if (spec.scale * spec.months > 1000.0) fail(ErrorCode::InvalidSpec, "scale * months is limited to 1000");
    detail::Rng rng(spec.seed);
    detail::Schema schema;
    schema.text = "# Generated schema for the synthetic datasets\n";
    Output out;
    // One RNG stream per dataset so that each file is independent of the others' sizes.
    auto child = [&] { return detail::Rng(rng.below(UINT64_MAX >> 1) ^ 0x9E3779B97F4A7C15ULL); };
    auto r1 = child(), r2 = child(), r3 = child(), r4 = child();
    out.csv.emplace_back("Encounters", detail::encounters(r1, spec.months, spec.scale, schema));
    out.csv.emplace_back("IntervalOps", detail::interval_ops(r2, spec.months, spec.scale, schema));
    out.csv.emplace_back("Survey", detail::survey(r3, spec.months, spec.scale, schema));
    out.csv.emplace_back("CallBack", detail::callback(r4, spec.months, spec.scale, schema));
    out.config.emplace_back(kSchemaFile, schema.text);
    if (spec.demo_config)
        for (auto& f : detail::demo_config()) out.config.push_back(std::move(f));
    return out;
}

/// Writes `<Dataset>.csv` files and config files into `dir`.
inline void write(const Output& out, const fs::path& dir) {
    std::error_code ec;
    fs::create_directories(dir, ec);
    if (ec) fail(ErrorCode::IoError, "cannot create " + dir.string() + ": " + ec.message());
    for (const auto& [name, bytes] : out.csv) viva::detail::atomic_rewrite(dir / (name + ".csv"), bytes);
    for (const auto& [name, text] : out.config) viva::detail::atomic_rewrite(dir / name, text);
}

} // namespace viva::synth
