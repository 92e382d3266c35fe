#include "qrm/pipeline/csv_io.hpp"

#include <algorithm>
#include <charconv>
#include <chrono>
#include <cstdio>
#include <fstream>
#include <map>
#include <set>
#include <sstream>

#include <spdlog/spdlog.h>

#include "qrm/errors.hpp"

namespace qrm::pipeline {

namespace {

std::vector<std::string> split_line(const std::string& line) {
    std::vector<std::string> out;
    std::string field;
    std::istringstream ss(line);
    while (std::getline(ss, field, ',')) {
        if (!field.empty() && field.back() == '\r') field.pop_back();
        if (field.size() >= 2 && field.front() == '"' && field.back() == '"') {
            field = field.substr(1, field.size() - 2);
        }
        out.push_back(field);
    }
    if (!line.empty() && line.back() == ',') out.emplace_back();
    return out;
}

std::string join(const std::vector<std::string>& fields) {
    std::string s;
    for (std::size_t i = 0; i < fields.size(); ++i) {
        if (i) s += ',';
        s += fields[i];
    }
    s += '\n';
    return s;
}

std::optional<std::chrono::sys_days> parse_iso(std::string_view text) {
    if (text.size() != 10 || text[4] != '-' || text[7] != '-') return std::nullopt;
    int y = 0;
    unsigned m = 0;
    unsigned d = 0;
    auto ok = [](std::string_view s, auto& v) {
        const auto [p, ec] = std::from_chars(s.data(), s.data() + s.size(), v);
        return ec == std::errc{} && p == s.data() + s.size();
    };
    if (!ok(text.substr(0, 4), y) || !ok(text.substr(5, 2), m) || !ok(text.substr(8, 2), d)) {
        return std::nullopt;
    }
    const std::chrono::year_month_day ymd{std::chrono::year{y}, std::chrono::month{m}, std::chrono::day{d}};
    if (!ymd.ok()) return std::nullopt;
    return std::chrono::sys_days{ymd};
}

std::string iso(std::chrono::sys_days day) {
    const std::chrono::year_month_day ymd{day};
    char buf[16];
    std::snprintf(buf, sizeof buf, "%04d-%02u-%02u", static_cast<int>(ymd.year()),
                  static_cast<unsigned>(ymd.month()), static_cast<unsigned>(ymd.day()));
    return buf;
}

const char* split_name(Split s) { return s == Split::Validation ? "validation" : "test"; }

Split parse_split(const std::string& s) {
    if (s == "validation") return Split::Validation;
    if (s == "test") return Split::Test;
    throw DomainError("unknown split '" + s + "'");
}

template <class Fn>
auto with_row_context(const std::filesystem::path& path, std::size_t row, Fn fn) {
    try {
        return fn();
    } catch (const DomainError& e) {
        throw IoError(path.string() + ": row " + std::to_string(row + 2) + ": " + e.what());
    } catch (const std::out_of_range&) {
        throw IoError(path.string() + ": row " + std::to_string(row + 2) + ": too few fields");
    }
}

}  // namespace

std::string format_double(double v) {
    char buf[64];
    const auto [p, ec] = std::to_chars(buf, buf + sizeof buf, v);
    return std::string(buf, p);
}

std::string format_optional(const std::optional<double>& v) {
    return v ? format_double(*v) : std::string("NA");
}

double parse_double(std::string_view text) {
    double v = 0.0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size() || text.empty()) {
        throw DomainError("not a number: '" + std::string(text) + "'");
    }
    return v;
}

int parse_int(std::string_view text) {
    int v = 0;
    const auto [p, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
    if (ec != std::errc{} || p != text.data() + text.size() || text.empty()) {
        throw DomainError("not an integer: '" + std::string(text) + "'");
    }
    return v;
}

std::size_t CsvTable::column(std::string_view name) const {
    const auto it = std::find(header.begin(), header.end(), name);
    if (it == header.end()) throw IoError("csv: missing column '" + std::string(name) + "'");
    return static_cast<std::size_t>(it - header.begin());
}

CsvTable read_csv(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw IoError("cannot read " + path.string());
    CsvTable t;
    std::string line;
    if (!std::getline(in, line)) throw IoError(path.string() + ": missing header");
    // A UTF-8 byte order mark would otherwise end up in the first column name.
    if (line.rfind("\xEF\xBB\xBF", 0) == 0) line.erase(0, 3);
    t.header = split_line(line);
    while (std::getline(in, line)) {
        if (line.empty() || line == "\r") continue;
        t.rows.push_back(split_line(line));
    }
    return t;
}

void write_text(const std::filesystem::path& path, const std::string& content) {
    if (path.has_parent_path()) std::filesystem::create_directories(path.parent_path());
    std::ofstream out(path, std::ios::binary | std::ios::trunc);
    if (!out) throw IoError("cannot write " + path.string());
    out << content;
    if (!out) throw IoError("write failed: " + path.string());
}

std::string read_text(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot read " + path.string());
    std::stringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

std::string trading_day_iso(int index) {
    using namespace std::chrono;
    sys_days day = sys_days{year{2018} / January / 2};
    for (int k = 0; k < index;) {
        day += days{1};
        const weekday wd{day};
        if (wd != Saturday && wd != Sunday) ++k;
    }
    return iso(day);
}

IngestResult read_market_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    const std::size_t c_date = t.column("date");
    const std::size_t c_id = t.column("option_id");
    const std::size_t c_strike = t.column("strike");
    const std::size_t c_expiry = t.column("expiry");
    const std::size_t c_sb = t.column("stock_bid");
    const std::size_t c_sa = t.column("stock_ask");
    const std::size_t c_ub = t.column("option_bid");
    const std::size_t c_ua = t.column("option_ask");
    const std::size_t c_vol = t.column("ivol");
    const std::size_t width = t.header.size();

    IngestResult res;
    res.rows = t.rows.size();
    struct Parsed {
        std::chrono::sys_days day;
        market::MarketSnapshot snap;
    };
    std::vector<Parsed> parsed;
    for (const auto& row : t.rows) {
        if (row.size() < width) {
            ++res.malformed;
            continue;
        }
        const auto day = parse_iso(row[c_date]);
        if (!day || row[c_id].empty() || (!row[c_expiry].empty() && !parse_iso(row[c_expiry]))) {
            ++res.malformed;
            continue;
        }
        market::MarketSnapshot s;
        s.option_id = row[c_id];
        s.expiry = row[c_expiry];
        try {
            s.strike = parse_double(row[c_strike]);
            s.s_b = parse_double(row[c_sb]);
            s.s_a = parse_double(row[c_sa]);
            s.u_b = parse_double(row[c_ub]);
            s.u_a = parse_double(row[c_ua]);
            s.ivol = parse_double(row[c_vol]);
        } catch (const DomainError&) {
            ++res.malformed;
            continue;
        }
        try {
            market::validate_snapshot(s);
            if (!(s.strike > 0.0)) throw InvalidQuote("strike must be positive");
        } catch (const InvalidQuote&) {
            ++res.invalid_quote;
            continue;
        }
        parsed.push_back({*day, std::move(s)});
    }

    std::set<std::chrono::sys_days> distinct;
    for (const auto& p : parsed) distinct.insert(p.day);
    std::map<std::chrono::sys_days, int> rank;
    for (const auto day : distinct) {
        rank.emplace(day, static_cast<int>(res.dates.size()));
        res.dates.push_back(iso(day));
    }

    std::set<std::pair<std::string, int>> seen;
    for (auto& p : parsed) {
        p.snap.date = rank.at(p.day);
        if (!seen.emplace(p.snap.option_id, p.snap.date).second) {
            ++res.duplicate;
            continue;
        }
        res.snapshots.push_back(std::move(p.snap));
    }
    std::stable_sort(res.snapshots.begin(), res.snapshots.end(), [](const auto& a, const auto& b) {
        return std::tie(a.option_id, a.date) < std::tie(b.option_id, b.date);
    });
    if (res.malformed + res.invalid_quote + res.duplicate > 0) {
        spdlog::warn("{}: skipped {} malformed, {} invalid-quote and {} duplicate rows of {}",
                     path.string(), res.malformed, res.invalid_quote, res.duplicate, res.rows);
    }
    return res;
}

std::string market_csv(const std::vector<market::MarketSnapshot>& snapshots,
                       const std::vector<std::string>* dates) {
    std::string s = "date,option_id,strike,expiry,stock_bid,stock_ask,option_bid,option_ask,ivol\n";
    for (const auto& r : snapshots) {
        const std::string day = dates ? dates->at(static_cast<std::size_t>(r.date)) : trading_day_iso(r.date);
        s += join({day, r.option_id, format_double(r.strike), r.expiry,
                   format_double(r.s_b), format_double(r.s_a), format_double(r.u_b),
                   format_double(r.u_a), format_double(r.ivol)});
    }
    return s;
}

std::string solutions_csv(const std::vector<SolutionRecord>& rows) {
    std::string s = "option_id,date,beta,cg_iterations,residual_norm,j_value,est_tau,est_2tau\n";
    for (const auto& r : rows) {
        s += join({r.option_id, std::to_string(r.date), format_double(r.beta),
                   std::to_string(r.cg_iterations), format_double(r.residual_norm),
                   format_double(r.j_value), format_double(r.est_tau), format_double(r.est_2tau)});
    }
    return s;
}

std::vector<SolutionRecord> read_solutions_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    const std::size_t c[] = {t.column("option_id"), t.column("date"), t.column("beta"),
                             t.column("cg_iterations"), t.column("residual_norm"),
                             t.column("j_value"), t.column("est_tau"), t.column("est_2tau")};
    std::vector<SolutionRecord> out;
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        const auto& row = t.rows[k];
        out.push_back(with_row_context(path, k, [&] {
            SolutionRecord r;
            r.option_id = row.at(c[0]);
            r.date = parse_int(row.at(c[1]));
            r.beta = parse_double(row.at(c[2]));
            r.cg_iterations = parse_int(row.at(c[3]));
            r.residual_norm = parse_double(row.at(c[4]));
            r.j_value = parse_double(row.at(c[5]));
            r.est_tau = parse_double(row.at(c[6]));
            r.est_2tau = parse_double(row.at(c[7]));
            return r;
        }));
    }
    return out;
}

std::string features_csv(const std::vector<ml::FeatureRecord>& rows) {
    std::vector<std::string> header(ml::kFeatureNames.begin(), ml::kFeatureNames.end());
    for (const char* extra : {"label", "real_tau", "strike", "date", "option_id"}) header.emplace_back(extra);
    std::string s = join(header);
    for (const auto& r : rows) {
        std::vector<std::string> f;
        for (double v : r.raw) f.push_back(format_double(v));
        f.push_back(std::to_string(r.label));
        f.push_back(format_double(r.real_tau));
        f.push_back(format_double(r.strike));
        f.push_back(std::to_string(r.date));
        f.push_back(r.option_id);
        s += join(f);
    }
    return s;
}

std::vector<ml::FeatureRecord> read_features_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    std::array<std::size_t, ml::kFeatureCount> cf{};
    for (std::size_t i = 0; i < ml::kFeatureCount; ++i) cf[i] = t.column(ml::kFeatureNames[i]);
    const std::size_t c_label = t.column("label");
    const std::size_t c_real = t.column("real_tau");
    const std::size_t c_strike = t.column("strike");
    const std::size_t c_date = t.column("date");
    const std::size_t c_id = t.column("option_id");
    std::vector<ml::FeatureRecord> out;
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        const auto& row = t.rows[k];
        out.push_back(with_row_context(path, k, [&] {
            ml::FeatureRecord r;
            for (std::size_t i = 0; i < ml::kFeatureCount; ++i) r.raw[i] = parse_double(row.at(cf[i]));
            r.label = parse_int(row.at(c_label));
            r.real_tau = parse_double(row.at(c_real));
            r.strike = parse_double(row.at(c_strike));
            r.date = parse_int(row.at(c_date));
            r.option_id = row.at(c_id);
            return r;
        }));
    }
    return out;
}

std::string predictions_csv(const std::vector<Prediction>& rows) {
    std::string s =
        "option_id,date,split,stock,strike,real_0,real_tau,label,est_qrm,score,est_regression\n";
    for (const auto& r : rows) {
        s += join({r.option_id, std::to_string(r.date), split_name(r.split), format_double(r.stock),
                   format_double(r.strike), format_double(r.real_0), format_double(r.real_tau),
                   std::to_string(r.label()), format_double(r.est_qrm), format_double(r.score),
                   format_double(r.est_regression)});
    }
    return s;
}

std::vector<Prediction> read_predictions_csv(const std::filesystem::path& path) {
    const CsvTable t = read_csv(path);
    const std::size_t c[] = {t.column("option_id"), t.column("date"), t.column("split"),
                             t.column("stock"), t.column("strike"), t.column("real_0"),
                             t.column("real_tau"), t.column("est_qrm"), t.column("score"),
                             t.column("est_regression")};
    std::vector<Prediction> out;
    for (std::size_t k = 0; k < t.rows.size(); ++k) {
        const auto& row = t.rows[k];
        out.push_back(with_row_context(path, k, [&] {
            Prediction p;
            p.option_id = row.at(c[0]);
            p.date = parse_int(row.at(c[1]));
            p.split = parse_split(row.at(c[2]));
            p.stock = parse_double(row.at(c[3]));
            p.strike = parse_double(row.at(c[4]));
            p.real_0 = parse_double(row.at(c[5]));
            p.real_tau = parse_double(row.at(c[6]));
            p.est_qrm = parse_double(row.at(c[7]));
            p.score = parse_double(row.at(c[8]));
            p.est_regression = parse_double(row.at(c[9]));
            return p;
        }));
    }
    return out;
}

}  // namespace qrm::pipeline
