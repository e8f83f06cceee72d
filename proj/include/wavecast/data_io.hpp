#pragma once

// Ingestion of half-hourly PV generation into daily matrices, and the CSV
// layouts used to exchange them.
//
// Input ("series") CSV: a header row, then one row per timestamp:
//
//     timestamp,site_a,site_b,...
//     2019-01-01T06:00,12.5,3.25,...
//
// Timestamps are ISO-8601 ("T" or space separator, optional ":00" seconds),
// values are MW. Rows outside the daily window are ignored.
//
// Matrix CSV: "date,06:00,06:30,...,19:00", one row per date.

#include "wavecast/calendar.hpp"
#include "wavecast/types.hpp"

#include <filesystem>
#include <string>
#include <vector>

namespace wavecast {

struct CsvSchema {
    std::string timestamp_column = "timestamp";
    std::vector<std::string> value_columns; ///< empty = every non-timestamp column
    int window_start_minute = 6 * 60;
    int window_end_minute = 19 * 60; ///< inclusive
    int interval_minutes = 30;

    int steps_per_day() const {
        return (window_end_minute - window_start_minute) / interval_minutes + 1;
    }
};

enum class IssueKind {
    malformed,
    off_grid,
    duplicate,
    non_monotone,
    negative_value,
    incomplete_day,
};

std::string to_string(IssueKind k);

struct IngestIssue {
    IssueKind kind = IssueKind::malformed;
    std::size_t line = 0; ///< 1-based CSV line; 0 for day-level issues
    std::string message;
};

struct LoadResult {
    std::vector<std::string> site_names;
    std::vector<DailyMatrix> sites; ///< share one calendar
    std::vector<IngestIssue> issues;
    std::vector<DayNumber> rejected_days;
};

/// Parses a series CSV. Days lacking any in-window sample (or holding a
/// duplicate or malformed one) are rejected as a whole; the remaining days
/// are kept in date order. Negative readings are clamped to zero and noted.
/// Throws ErrorKind::data when the file cannot be read or the header lacks
/// required columns.
LoadResult load_csv(const std::filesystem::path& path, const CsvSchema& schema = {});
LoadResult parse_series_csv(const std::string& text, const CsvSchema& schema = {});

/// Writes sites sharing one calendar in the series layout, values at full
/// precision, so load_csv reproduces them exactly.
void write_series_csv(const std::filesystem::path& path, const std::vector<std::string>& names,
                      const std::vector<DailyMatrix>& sites, const CsvSchema& schema = {});

void write_matrix_csv(const std::filesystem::path& path, const DailyMatrix& m);
DailyMatrix read_matrix_csv(const std::filesystem::path& path);

/// Element-wise sum. Throws ErrorKind::data when calendars or shapes differ.
DailyMatrix aggregate_sites(const std::vector<DailyMatrix>& sites);

/// Rows [start, start + count) with their dates.
DailyMatrix slice_days(const DailyMatrix& m, Eigen::Index start, Eigen::Index count);

/// Vertical concatenation; columns must agree.
DailyMatrix concat_days(const DailyMatrix& a, const DailyMatrix& b);

/// Splits a CSV line on commas, honouring double quotes.
std::vector<std::string> split_csv_line(const std::string& line);

/// "%.17g" formatting.
std::string format_double(double v);

} // namespace wavecast
