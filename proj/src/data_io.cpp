#include "wavecast/data_io.hpp"

#include "wavecast/error.hpp"
#include "wavecast/metrics.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <map>
#include <sstream>

namespace wavecast {

std::string to_string(IssueKind k) {
    switch (k) {
    case IssueKind::malformed: return "malformed";
    case IssueKind::off_grid: return "off_grid";
    case IssueKind::duplicate: return "duplicate";
    case IssueKind::non_monotone: return "non_monotone";
    case IssueKind::negative_value: return "negative_value";
    case IssueKind::incomplete_day: return "incomplete_day";
    }
    return "unknown";
}

std::vector<std::string> split_csv_line(const std::string& line) {
    std::vector<std::string> fields;
    std::string cur;
    bool quoted = false;
    for (std::size_t i = 0; i < line.size(); ++i) {
        const char c = line[i];
        if (quoted) {
            if (c == '"' && i + 1 < line.size() && line[i + 1] == '"') {
                cur.push_back('"');
                ++i;
            } else if (c == '"') {
                quoted = false;
            } else {
                cur.push_back(c);
            }
        } else if (c == '"') {
            quoted = true;
        } else if (c == ',') {
            fields.push_back(std::move(cur));
            cur.clear();
        } else if (c != '\r') {
            cur.push_back(c);
        }
    }
    fields.push_back(std::move(cur));
    return fields;
}

std::string format_double(double v) {
    char buf[32];
    std::snprintf(buf, sizeof buf, "%.17g", v);
    return buf;
}

namespace {

std::string trim(const std::string& s) {
    const auto b = s.find_first_not_of(" \t");
    if (b == std::string::npos) return {};
    const auto e = s.find_last_not_of(" \t");
    return s.substr(b, e - b + 1);
}

bool parse_double(const std::string& s, double& out) {
    const std::string t = trim(s);
    if (t.empty()) return false;
    const auto [ptr, ec] = std::from_chars(t.data(), t.data() + t.size(), out);
    return ec == std::errc() && ptr == t.data() + t.size() && std::isfinite(out);
}

std::string read_file(const std::filesystem::path& path) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw data_error("cannot open " + path.string());
    std::ostringstream ss;
    ss << in.rdbuf();
    return ss.str();
}

struct DaySlots {
    std::vector<std::vector<double>> values; // [site][step]
    std::vector<bool> filled;
    bool bad = false;
};

} // namespace

LoadResult parse_series_csv(const std::string& text, const CsvSchema& schema) {
    if (schema.interval_minutes <= 0 || schema.window_end_minute < schema.window_start_minute ||
        (schema.window_end_minute - schema.window_start_minute) % schema.interval_minutes != 0) {
        throw config_error("csv schema: window must be a whole number of intervals");
    }
    std::istringstream in(text);
    std::string line;
    if (!std::getline(in, line)) throw data_error("csv: empty input");
    const auto header = split_csv_line(line);

    int ts_col = -1;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (trim(header[i]) == schema.timestamp_column) ts_col = static_cast<int>(i);
    }
    if (ts_col < 0) throw data_error("csv: missing timestamp column '" + schema.timestamp_column + "'");

    LoadResult result;
    std::vector<int> value_cols;
    if (schema.value_columns.empty()) {
        for (std::size_t i = 0; i < header.size(); ++i) {
            if (static_cast<int>(i) == ts_col) continue;
            value_cols.push_back(static_cast<int>(i));
            result.site_names.push_back(trim(header[i]));
        }
    } else {
        for (const auto& name : schema.value_columns) {
            int found = -1;
            for (std::size_t i = 0; i < header.size(); ++i) {
                if (trim(header[i]) == name) found = static_cast<int>(i);
            }
            if (found < 0) throw data_error("csv: missing value column '" + name + "'");
            value_cols.push_back(found);
            result.site_names.push_back(name);
        }
    }
    if (value_cols.empty()) throw data_error("csv: no value columns");

    const int steps = schema.steps_per_day();
    const std::size_t sites = value_cols.size();
    std::map<DayNumber, DaySlots> days;
    std::size_t line_no = 1;
    long long last_key = std::numeric_limits<long long>::min();

    auto issue = [&](IssueKind k, const std::string& msg) {
        result.issues.push_back({k, line_no, msg});
    };

    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto fields = split_csv_line(line);
        if (fields.size() != header.size()) {
            issue(IssueKind::malformed, "expected " + std::to_string(header.size()) +
                                            " fields, found " + std::to_string(fields.size()));
            continue;
        }
        const auto ts = parse_timestamp(trim(fields[ts_col]));
        if (!ts) {
            issue(IssueKind::malformed, "unparsable timestamp '" + fields[ts_col] + "'");
            continue;
        }
        const long long key = static_cast<long long>(ts->day) * 1440 + ts->minute;
        if (key <= last_key) {
            issue(key == last_key ? IssueKind::duplicate : IssueKind::non_monotone,
                  "timestamp " + format_timestamp(*ts) +
                      (key == last_key ? " repeats the previous row" : " goes backwards"));
            if (key == last_key) days[ts->day].bad = true;
            continue;
        }
        last_key = key;
        if (ts->minute < schema.window_start_minute || ts->minute > schema.window_end_minute) continue;
        const int offset = ts->minute - schema.window_start_minute;
        if (offset % schema.interval_minutes != 0) {
            issue(IssueKind::off_grid, "timestamp " + format_timestamp(*ts) + " is off the " +
                                           std::to_string(schema.interval_minutes) + "-minute grid");
            continue;
        }
        const int step = offset / schema.interval_minutes;
        DaySlots& slot = days[ts->day];
        if (slot.filled.empty()) {
            slot.filled.assign(steps, false);
            slot.values.assign(sites, std::vector<double>(steps, 0.0));
        }
        if (slot.filled[step]) {
            issue(IssueKind::duplicate, "timestamp " + format_timestamp(*ts) + " appears twice");
            slot.bad = true;
            continue;
        }
        bool ok = true;
        std::vector<double> row(sites);
        for (std::size_t s = 0; s < sites; ++s) {
            if (!parse_double(fields[value_cols[s]], row[s])) {
                issue(IssueKind::malformed, "bad value '" + fields[value_cols[s]] + "' for " +
                                                result.site_names[s]);
                ok = false;
                break;
            }
            if (row[s] < 0.0) {
                issue(IssueKind::negative_value, "negative reading " + fields[value_cols[s]] +
                                                     " for " + result.site_names[s] + " clamped to 0");
                row[s] = 0.0;
            }
        }
        if (!ok) continue;
        slot.filled[step] = true;
        for (std::size_t s = 0; s < sites; ++s) slot.values[s][step] = row[s];
    }

    std::vector<DayNumber> kept;
    for (const auto& [day, slot] : days) {
        std::size_t present = 0;
        for (const bool f : slot.filled) present += f ? 1 : 0;
        if (slot.bad || present != static_cast<std::size_t>(steps)) {
            result.rejected_days.push_back(day);
            result.issues.push_back({IssueKind::incomplete_day, 0,
                                     "day " + format_date(day) + " rejected: " +
                                         std::to_string(present) + "/" + std::to_string(steps) +
                                         " samples" + (slot.bad ? ", duplicate timestamps" : "")});
            continue;
        }
        kept.push_back(day);
    }

    result.sites.resize(sites);
    for (std::size_t s = 0; s < sites; ++s) {
        DailyMatrix& m = result.sites[s];
        m.dates = kept;
        m.values.resize(static_cast<Eigen::Index>(kept.size()), steps);
        for (std::size_t d = 0; d < kept.size(); ++d) {
            const auto& v = days.at(kept[d]).values[s];
            for (int t = 0; t < steps; ++t) m.values(static_cast<Eigen::Index>(d), t) = v[t];
        }
    }
    return result;
}

LoadResult load_csv(const std::filesystem::path& path, const CsvSchema& schema) {
    return parse_series_csv(read_file(path), schema);
}

void write_series_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                      const std::vector<DailyMatrix>& sites, const CsvSchema& schema) {
    if (names.size() != sites.size() || sites.empty()) {
        throw shape_error("series csv: need one name per site and at least one site");
    }
    for (const auto& s : sites) {
        if (s.dates != sites.front().dates || s.steps() != schema.steps_per_day()) {
            throw data_error("series csv: sites must share one calendar and the schema's steps");
        }
    }
    std::ofstream out(path);
    if (!out) throw data_error("cannot write " + path.string());
    out << schema.timestamp_column;
    for (const auto& n : names) out << ',' << n;
    out << '\n';
    const auto& dates = sites.front().dates;
    for (std::size_t d = 0; d < dates.size(); ++d) {
        for (int t = 0; t < schema.steps_per_day(); ++t) {
            out << format_timestamp({dates[d], schema.window_start_minute + t * schema.interval_minutes});
            for (const auto& s : sites) out << ',' << format_double(s.values(static_cast<Eigen::Index>(d), t));
            out << '\n';
        }
    }
}

void write_matrix_csv(const std::filesystem::path& path, const DailyMatrix& m) {
    if (static_cast<Eigen::Index>(m.dates.size()) != m.days()) {
        throw shape_error("matrix csv: one date per row required");
    }
    std::ofstream out(path);
    if (!out) throw data_error("cannot write " + path.string());
    out << "date";
    for (Eigen::Index t = 0; t < m.steps(); ++t) out << ',' << step_label(static_cast<int>(t));
    out << '\n';
    for (Eigen::Index d = 0; d < m.days(); ++d) {
        out << format_date(m.dates[d]);
        for (Eigen::Index t = 0; t < m.steps(); ++t) out << ',' << format_double(m.values(d, t));
        out << '\n';
    }
}

DailyMatrix read_matrix_csv(const std::filesystem::path& path) {
    std::istringstream in(read_file(path));
    std::string line;
    if (!std::getline(in, line)) throw data_error("matrix csv " + path.string() + ": empty");
    const auto header = split_csv_line(line);
    if (header.size() < 2 || trim(header[0]) != "date") {
        throw data_error("matrix csv " + path.string() + ": header must start with 'date'");
    }
    const Eigen::Index steps = static_cast<Eigen::Index>(header.size()) - 1;
    std::vector<std::vector<double>> rows;
    DailyMatrix m;
    std::size_t line_no = 1;
    while (std::getline(in, line)) {
        ++line_no;
        if (trim(line).empty()) continue;
        const auto f = split_csv_line(line);
        const auto where = path.string() + ":" + std::to_string(line_no);
        if (f.size() != header.size()) throw data_error("matrix csv " + where + ": wrong field count");
        const auto date = parse_date(trim(f[0]));
        if (!date) throw data_error("matrix csv " + where + ": bad date '" + f[0] + "'");
        if (!m.dates.empty() && *date <= m.dates.back()) {
            throw data_error("matrix csv " + where + ": dates must increase");
        }
        std::vector<double> row(steps);
        for (Eigen::Index t = 0; t < steps; ++t) {
            if (!parse_double(f[t + 1], row[t]) || row[t] < 0.0) {
                throw data_error("matrix csv " + where + ": bad value '" + f[t + 1] + "'");
            }
        }
        m.dates.push_back(*date);
        rows.push_back(std::move(row));
    }
    m.values.resize(static_cast<Eigen::Index>(rows.size()), steps);
    for (std::size_t d = 0; d < rows.size(); ++d) {
        for (Eigen::Index t = 0; t < steps; ++t) m.values(static_cast<Eigen::Index>(d), t) = rows[d][t];
    }
    return m;
}

DailyMatrix aggregate_sites(const std::vector<DailyMatrix>& sites) {
    if (sites.empty()) throw data_error("aggregate: no sites");
    DailyMatrix out = sites.front();
    for (std::size_t i = 1; i < sites.size(); ++i) {
        if (sites[i].dates != out.dates || sites[i].steps() != out.steps()) {
            throw data_error("aggregate: site " + std::to_string(i) +
                             " is not aligned with site 0 (calendar or steps differ)");
        }
        out.values += sites[i].values;
    }
    return out;
}

DailyMatrix slice_days(const DailyMatrix& m, Eigen::Index start, Eigen::Index count) {
    if (start < 0 || count < 0 || start + count > m.days()) throw shape_error("slice_days: out of range");
    DailyMatrix out;
    out.values = m.values.middleRows(start, count);
    if (!m.dates.empty()) out.dates.assign(m.dates.begin() + start, m.dates.begin() + start + count);
    return out;
}

DailyMatrix concat_days(const DailyMatrix& a, const DailyMatrix& b) {
    if (a.days() > 0 && b.days() > 0 && a.steps() != b.steps()) {
        throw shape_error("concat_days: step counts differ");
    }
    DailyMatrix out;
    out.values.resize(a.days() + b.days(), a.days() > 0 ? a.steps() : b.steps());
    out.values.topRows(a.days()) = a.values;
    out.values.bottomRows(b.days()) = b.values;
    out.dates = a.dates;
    out.dates.insert(out.dates.end(), b.dates.begin(), b.dates.end());
    return out;
}

} // namespace wavecast
