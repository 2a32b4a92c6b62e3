#pragma once

#include <charconv>
#include <cstdint>
#include <filesystem>
#include <fstream>
#include <optional>
#include <sstream>
#include <string>
#include <string_view>
#include <unordered_map>
#include <unordered_set>
#include <vector>

#include "hotelml/error.hpp"
#include "hotelml/rng.hpp"
#include "hotelml/timestamp.hpp"

namespace hotelml {

enum class ColumnType { Integer, Real, Categorical, Timestamp };

inline const char* column_type_name(ColumnType t) {
    switch (t) {
        case ColumnType::Integer: return "integer";
        case ColumnType::Real: return "real";
        case ColumnType::Categorical: return "categorical";
        case ColumnType::Timestamp: return "timestamp";
    }
    return "?";
}

struct ColumnSpec {
    std::string name;
    ColumnType type = ColumnType::Integer;
    bool nullable = false;
};

using TableSchema = std::vector<ColumnSpec>;

/// One named, typed column with a per-cell missing mask. Integer and
/// Categorical share the int storage; Categorical marks columns whose codes
/// carry no ordering.
class Column {
public:
    Column(std::string name, ColumnType type) : name_(std::move(name)), type_(type) {}

    const std::string& name() const { return name_; }
    ColumnType type() const { return type_; }
    std::size_t size() const { return missing_.size(); }
    bool is_missing(std::size_t i) const { return missing_[i] != 0; }
    bool has_missing() const {
        for (std::uint8_t m : missing_)
            if (m) return true;
        return false;
    }

    std::int64_t int_at(std::size_t i) const { return ints_[i]; }
    double real_at(std::size_t i) const { return reals_[i]; }
    const Timestamp& ts_at(std::size_t i) const { return times_[i]; }

    /// Numeric view used by the feature pipeline; timestamps have none.
    double as_double(std::size_t i) const {
        if (type_ == ColumnType::Real) return reals_[i];
        if (type_ == ColumnType::Timestamp)
            throw SchemaError("column '" + name_ + "': timestamps have no numeric view");
        return static_cast<double>(ints_[i]);
    }

    void push_int(std::int64_t v) {
        ints_.push_back(v);
        missing_.push_back(0);
    }
    void push_real(double v) {
        reals_.push_back(v);
        missing_.push_back(0);
    }
    void push_ts(const Timestamp& v) {
        times_.push_back(v);
        missing_.push_back(0);
    }
    void push_missing() {
        switch (type_) {
            case ColumnType::Integer:
            case ColumnType::Categorical: ints_.push_back(0); break;
            case ColumnType::Real: reals_.push_back(0.0); break;
            case ColumnType::Timestamp: times_.push_back(Timestamp{}); break;
        }
        missing_.push_back(1);
    }
    void push_from(const Column& src, std::size_t i) {
        if (src.is_missing(i)) {
            push_missing();
            return;
        }
        switch (type_) {
            case ColumnType::Integer:
            case ColumnType::Categorical: push_int(src.int_at(i)); break;
            case ColumnType::Real: push_real(src.real_at(i)); break;
            case ColumnType::Timestamp: push_ts(src.ts_at(i)); break;
        }
    }

    bool cell_equals(std::size_t i, const Column& other, std::size_t j) const {
        if (type_ != other.type_) return false;
        if (is_missing(i) || other.is_missing(j)) return is_missing(i) == other.is_missing(j);
        switch (type_) {
            case ColumnType::Integer:
            case ColumnType::Categorical: return int_at(i) == other.int_at(j);
            case ColumnType::Real: return real_at(i) == other.real_at(j);
            case ColumnType::Timestamp: return ts_at(i) == other.ts_at(j);
        }
        return false;
    }

private:
    std::string name_;
    ColumnType type_;
    std::vector<std::int64_t> ints_;
    std::vector<double> reals_;
    std::vector<Timestamp> times_;
    std::vector<std::uint8_t> missing_;
};

/// Immutable columnar table. Every transform returns a new Dataset, so a
/// constructed instance is safe to share across threads.
class Dataset {
public:
    Dataset() = default;

    explicit Dataset(std::vector<Column> cols) : cols_(std::move(cols)) {
        if (!cols_.empty()) rows_ = cols_[0].size();
        for (std::size_t i = 0; i < cols_.size(); ++i) {
            if (cols_[i].size() != rows_)
                throw ArgumentError("dataset: column '" + cols_[i].name() + "' has " +
                                    std::to_string(cols_[i].size()) + " rows, expected " +
                                    std::to_string(rows_));
            if (!index_.emplace(cols_[i].name(), i).second)
                throw SchemaError("dataset: duplicate column name '" + cols_[i].name() + "'");
        }
    }

    std::size_t row_count() const { return rows_; }
    std::size_t col_count() const { return cols_.size(); }

    bool has(std::string_view name) const { return index_.find(std::string(name)) != index_.end(); }

    const Column& col(std::size_t i) const { return cols_[i]; }

    const Column& col(std::string_view name) const {
        auto it = index_.find(std::string(name));
        if (it == index_.end()) throw SchemaError("missing column '" + std::string(name) + "'");
        return cols_[it->second];
    }

    const Column* find(std::string_view name) const {
        auto it = index_.find(std::string(name));
        return it == index_.end() ? nullptr : &cols_[it->second];
    }

    TableSchema schema() const {
        TableSchema s;
        s.reserve(cols_.size());
        for (const auto& c : cols_) s.push_back({c.name(), c.type(), c.has_missing()});
        return s;
    }

    bool equals(const Dataset& other) const {
        if (rows_ != other.rows_ || cols_.size() != other.cols_.size()) return false;
        for (std::size_t c = 0; c < cols_.size(); ++c) {
            if (cols_[c].name() != other.cols_[c].name()) return false;
            if (cols_[c].type() != other.cols_[c].type()) return false;
            for (std::size_t r = 0; r < rows_; ++r)
                if (!cols_[c].cell_equals(r, other.cols_[c], r)) return false;
        }
        return true;
    }

private:
    std::vector<Column> cols_;
    std::unordered_map<std::string, std::size_t> index_;
    std::size_t rows_ = 0;
};

// ---------------------------------------------------------------------------
// Schemas of the two input tables.
// ---------------------------------------------------------------------------

/// Event-log schema: 24 columns of user search/booking activity.
inline TableSchema event_schema() {
    TableSchema s = {
        {"date_time", ColumnType::Timestamp, false},
        {"site_name", ColumnType::Integer, false},
        {"posa_continent", ColumnType::Integer, false},
        {"user_location_country", ColumnType::Integer, false},
        {"user_location_region", ColumnType::Integer, false},
        {"user_location_city", ColumnType::Integer, false},
        {"orig_destination_distance", ColumnType::Real, true},
        {"user_id", ColumnType::Integer, false},
        {"is_mobile", ColumnType::Integer, false},
        {"is_package", ColumnType::Integer, false},
        {"channel", ColumnType::Integer, false},
        {"srch_ci", ColumnType::Timestamp, false},
        {"srch_co", ColumnType::Timestamp, false},
        {"srch_adults_cnt", ColumnType::Integer, false},
        {"srch_children_cnt", ColumnType::Integer, false},
        {"srch_rm_cnt", ColumnType::Integer, false},
        {"srch_destination_id", ColumnType::Integer, false},
        {"srch_destination_type_id", ColumnType::Integer, false},
        {"is_booking", ColumnType::Integer, false},
        {"cnt", ColumnType::Integer, false},
        {"hotel_continent", ColumnType::Integer, false},
        {"hotel_country", ColumnType::Integer, false},
        {"hotel_market", ColumnType::Integer, false},
        {"hotel_cluster", ColumnType::Integer, true},
    };
    return s;
}

inline constexpr int kDestinationLatentCount = 149;

/// Destination table schema: the join key plus d1..d149 latent columns.
inline TableSchema destination_schema() {
    TableSchema s;
    s.push_back({"srch_destination_id", ColumnType::Integer, false});
    for (int i = 1; i <= kDestinationLatentCount; ++i)
        s.push_back({"d" + std::to_string(i), ColumnType::Real, false});
    return s;
}

// ---------------------------------------------------------------------------
// CSV reading/writing. Dialect: comma-delimited, first row header, optional
// double-quote quoting with "" escapes, UTF-8, empty cell = missing.
// ---------------------------------------------------------------------------

namespace csv {

/// Splits the full file text into records of fields, honoring quotes
/// (including embedded commas, escaped quotes and newlines).
inline std::vector<std::vector<std::string>> parse(const std::string& text) {
    std::vector<std::vector<std::string>> records;
    std::vector<std::string> record;
    std::string field;
    bool in_quotes = false;
    bool any = false;
    for (std::size_t i = 0; i < text.size(); ++i) {
        const char c = text[i];
        if (in_quotes) {
            if (c == '"') {
                if (i + 1 < text.size() && text[i + 1] == '"') {
                    field += '"';
                    ++i;
                } else {
                    in_quotes = false;
                }
            } else {
                field += c;
            }
            continue;
        }
        switch (c) {
            case '"': in_quotes = true, any = true; break;
            case ',':
                record.push_back(std::move(field));
                field.clear();
                any = true;
                break;
            case '\r': break;
            case '\n':
                if (any || !field.empty()) {
                    record.push_back(std::move(field));
                    records.push_back(std::move(record));
                }
                field.clear();
                record = {};
                any = false;
                break;
            default: field += c; any = true;
        }
    }
    if (any || !field.empty()) {
        record.push_back(std::move(field));
        records.push_back(std::move(record));
    }
    return records;
}

inline std::string quote_if_needed(const std::string& s) {
    if (s.find_first_of(",\"\n\r") == std::string::npos) return s;
    std::string out = "\"";
    for (char c : s) {
        if (c == '"') out += "\"\"";
        else out += c;
    }
    out += '"';
    return out;
}

inline std::string format_double(double v) {
    char buf[64];
    auto [p, ec] = std::to_chars(buf, buf + sizeof(buf), v);
    (void)ec;
    return std::string(buf, p);
}

}  // namespace csv

namespace detail {

inline std::optional<std::int64_t> parse_int(std::string_view s) {
    std::int64_t v = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last) return std::nullopt;
    return v;
}

inline std::optional<double> parse_double(std::string_view s) {
    double v = 0;
    const char* first = s.data();
    const char* last = s.data() + s.size();
    auto [p, ec] = std::from_chars(first, last, v);
    if (ec != std::errc() || p != last) return std::nullopt;
    return v;
}

}  // namespace detail

/// Reads a CSV file against a schema. Header must contain exactly the schema
/// columns (any order); output columns follow schema order.
inline Dataset read_csv(const std::filesystem::path& path, const TableSchema& schema) {
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::ostringstream buf;
    buf << in.rdbuf();
    const std::string text = buf.str();

    auto records = csv::parse(text);
    if (records.empty()) {
        // No header at all: build an empty dataset with the schema's columns.
        std::vector<Column> cols;
        for (const auto& spec : schema) cols.emplace_back(spec.name, spec.type);
        return Dataset(std::move(cols));
    }

    const auto& header = records[0];
    std::unordered_map<std::string, std::size_t> pos;
    for (std::size_t i = 0; i < header.size(); ++i) {
        if (!pos.emplace(header[i], i).second)
            throw SchemaError(path.string() + ": duplicate header column '" + header[i] + "'");
    }
    std::vector<std::size_t> source(schema.size());
    for (std::size_t i = 0; i < schema.size(); ++i) {
        auto it = pos.find(schema[i].name);
        if (it == pos.end())
            throw SchemaError(path.string() + ": missing required column '" + schema[i].name + "'");
        source[i] = it->second;
    }
    if (header.size() != schema.size()) {
        std::unordered_set<std::string> wanted;
        for (const auto& spec : schema) wanted.insert(spec.name);
        for (const auto& name : header)
            if (!wanted.count(name))
                throw SchemaError(path.string() + ": unexpected column '" + name + "'");
    }

    std::vector<Column> cols;
    cols.reserve(schema.size());
    for (const auto& spec : schema) cols.emplace_back(spec.name, spec.type);

    for (std::size_t r = 1; r < records.size(); ++r) {
        const auto& rec = records[r];
        const std::string line = std::to_string(r + 1);
        if (rec.size() != header.size())
            throw RowError(path.string() + ":" + line + ": expected " + std::to_string(header.size()) +
                           " fields, got " + std::to_string(rec.size()));
        for (std::size_t i = 0; i < schema.size(); ++i) {
            const std::string& cell = rec[source[i]];
            Column& col = cols[i];
            if (cell.empty()) {
                col.push_missing();
                continue;
            }
            switch (schema[i].type) {
                case ColumnType::Integer:
                case ColumnType::Categorical: {
                    auto v = detail::parse_int(cell);
                    if (!v)
                        throw RowError(path.string() + ":" + line + ": column '" + schema[i].name +
                                       "': cannot parse integer from '" + cell + "'");
                    col.push_int(*v);
                    break;
                }
                case ColumnType::Real: {
                    auto v = detail::parse_double(cell);
                    if (!v)
                        throw RowError(path.string() + ":" + line + ": column '" + schema[i].name +
                                       "': cannot parse real from '" + cell + "'");
                    col.push_real(*v);
                    break;
                }
                case ColumnType::Timestamp: {
                    auto v = parse_timestamp(cell);
                    if (!v)
                        throw RowError(path.string() + ":" + line + ": column '" + schema[i].name +
                                       "': cannot parse timestamp from '" + cell + "'");
                    col.push_ts(*v);
                    break;
                }
            }
        }
    }
    return Dataset(std::move(cols));
}

/// Writes the canonical CSV form; reloading with the same schema restores the
/// dataset exactly (reals use shortest round-trip formatting).
inline void write_csv(const Dataset& ds, const std::filesystem::path& path) {
    std::ofstream out(path, std::ios::binary);
    if (!out) throw IoError("cannot write '" + path.string() + "'");
    for (std::size_t c = 0; c < ds.col_count(); ++c) {
        if (c) out << ',';
        out << csv::quote_if_needed(ds.col(c).name());
    }
    out << '\n';
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
        for (std::size_t c = 0; c < ds.col_count(); ++c) {
            if (c) out << ',';
            const Column& col = ds.col(c);
            if (col.is_missing(r)) continue;
            switch (col.type()) {
                case ColumnType::Integer:
                case ColumnType::Categorical: out << col.int_at(r); break;
                case ColumnType::Real: out << csv::format_double(col.real_at(r)); break;
                case ColumnType::Timestamp: out << format_timestamp(col.ts_at(r)); break;
            }
        }
        out << '\n';
    }
    if (!out) throw IoError("write failed for '" + path.string() + "'");
}

// ---------------------------------------------------------------------------
// Loaders with domain validation.
// ---------------------------------------------------------------------------

namespace detail {

inline void check_flag(const Column& col, std::size_t row, const std::string& file) {
    if (col.is_missing(row))
        throw RowError(file + ":" + std::to_string(row + 2) + ": column '" + col.name() +
                       "': value is required");
    const std::int64_t v = col.int_at(row);
    if (v != 0 && v != 1)
        throw RowError(file + ":" + std::to_string(row + 2) + ": column '" + col.name() +
                       "': value '" + std::to_string(v) + "' violates " + col.name() + " in {0,1}");
}

inline void check_non_negative(const Column& col, std::size_t row, const std::string& file) {
    if (col.is_missing(row)) return;
    const std::int64_t v = col.int_at(row);
    if (v < 0)
        throw RowError(file + ":" + std::to_string(row + 2) + ": column '" + col.name() +
                       "': value '" + std::to_string(v) + "' violates " + col.name() + " >= 0");
}

}  // namespace detail

/// Validates the per-row event invariants (booking/mobile/package flags,
/// non-negative counts, hotel_cluster range). Used by the loader and by the
/// synthetic generator's self-check.
inline void validate_events(const Dataset& ds, const std::string& file = "<memory>") {
    const Column& booking = ds.col("is_booking");
    const Column& mobile = ds.col("is_mobile");
    const Column& package_flag = ds.col("is_package");
    const Column& cluster = ds.col("hotel_cluster");
    const Column* counts[] = {&ds.col("srch_adults_cnt"), &ds.col("srch_children_cnt"),
                              &ds.col("srch_rm_cnt"), &ds.col("cnt")};
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
        detail::check_flag(booking, r, file);
        detail::check_flag(mobile, r, file);
        detail::check_flag(package_flag, r, file);
        for (const Column* c : counts) detail::check_non_negative(*c, r, file);
        if (!cluster.is_missing(r)) {
            const std::int64_t v = cluster.int_at(r);
            if (v < 0 || v > 99)
                throw RowError(file + ":" + std::to_string(r + 2) +
                               ": column 'hotel_cluster': value '" + std::to_string(v) +
                               "' violates hotel_cluster in [0,99]");
        }
    }
}

inline Dataset load_events(const std::filesystem::path& path, const TableSchema& schema = event_schema()) {
    Dataset ds = read_csv(path, schema);
    validate_events(ds, path.string());
    return ds;
}

inline Dataset load_destinations(const std::filesystem::path& path) {
    // Columns are discovered from the header so a wrong latent count reports
    // as a schema error rather than 149 missing-column errors.
    std::ifstream in(path, std::ios::binary);
    if (!in) throw IoError("cannot open '" + path.string() + "'");
    std::string header_line;
    std::getline(in, header_line);
    in.close();
    auto header_records = csv::parse(header_line);
    if (!header_records.empty()) {
        const std::size_t latent = header_records[0].size() > 0 ? header_records[0].size() - 1 : 0;
        if (latent != kDestinationLatentCount)
            throw SchemaError(path.string() + ": expected " + std::to_string(kDestinationLatentCount) +
                              " latent columns d1..d149, found " + std::to_string(latent));
    }

    Dataset ds = read_csv(path, destination_schema());
    const Column& key = ds.col("srch_destination_id");
    std::unordered_set<std::int64_t> seen;
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
        if (key.is_missing(r))
            throw RowError(path.string() + ":" + std::to_string(r + 2) +
                           ": column 'srch_destination_id': value is required");
        if (!seen.insert(key.int_at(r)).second)
            throw IntegrityError(path.string() + ": duplicate srch_destination_id '" +
                                 std::to_string(key.int_at(r)) + "'");
    }
    return ds;
}

// ---------------------------------------------------------------------------
// Transforms. All are pure: they return new datasets.
// ---------------------------------------------------------------------------

inline Dataset take_rows(const Dataset& ds, const std::vector<std::size_t>& rows) {
    std::vector<Column> cols;
    cols.reserve(ds.col_count());
    for (std::size_t c = 0; c < ds.col_count(); ++c) {
        Column out(ds.col(c).name(), ds.col(c).type());
        for (std::size_t r : rows) out.push_from(ds.col(c), r);
        cols.push_back(std::move(out));
    }
    return Dataset(std::move(cols));
}

/// Keeps exactly the rows with is_booking = 1, preserving order and schema.
inline Dataset filter_bookings(const Dataset& ds) {
    const Column& booking = ds.col("is_booking");
    if (booking.type() != ColumnType::Integer && booking.type() != ColumnType::Categorical)
        throw SchemaError("filter_bookings: 'is_booking' must be an integer column");
    std::vector<std::size_t> keep;
    for (std::size_t r = 0; r < ds.row_count(); ++r)
        if (!booking.is_missing(r) && booking.int_at(r) == 1) keep.push_back(r);
    return take_rows(ds, keep);
}

/// Left join on srch_destination_id. Every event row is kept; rows without a
/// destination match receive the per-column means of the destinations table
/// (missing when the destinations table is empty, imputed downstream).
inline Dataset merge_on_destination(const Dataset& events, const Dataset& destinations) {
    const Column& ekey = events.col("srch_destination_id");
    const Column& dkey = destinations.col("srch_destination_id");

    std::unordered_map<std::int64_t, std::size_t> by_id;
    by_id.reserve(destinations.row_count());
    for (std::size_t r = 0; r < destinations.row_count(); ++r)
        if (!dkey.is_missing(r)) by_id.emplace(dkey.int_at(r), r);

    // Per-column means over the whole destinations table, the fill for
    // unmatched events.
    std::vector<const Column*> dcols;
    std::vector<double> mean;
    for (std::size_t c = 0; c < destinations.col_count(); ++c) {
        const Column& col = destinations.col(c);
        if (col.name() == "srch_destination_id") continue;
        dcols.push_back(&col);
        double sum = 0.0;
        std::size_t n = 0;
        for (std::size_t r = 0; r < col.size(); ++r) {
            if (col.is_missing(r)) continue;
            sum += col.as_double(r);
            ++n;
        }
        mean.push_back(n ? sum / static_cast<double>(n) : 0.0);
    }
    const bool have_dest_rows = destinations.row_count() > 0;

    std::vector<Column> cols;
    cols.reserve(events.col_count() + dcols.size());
    for (std::size_t c = 0; c < events.col_count(); ++c) {
        Column out(events.col(c).name(), events.col(c).type());
        for (std::size_t r = 0; r < events.row_count(); ++r) out.push_from(events.col(c), r);
        cols.push_back(std::move(out));
    }
    for (std::size_t j = 0; j < dcols.size(); ++j) {
        Column out(dcols[j]->name(), dcols[j]->type());
        for (std::size_t r = 0; r < events.row_count(); ++r) {
            auto it = ekey.is_missing(r) ? by_id.end() : by_id.find(ekey.int_at(r));
            if (it != by_id.end() && !dcols[j]->is_missing(it->second)) {
                out.push_real(dcols[j]->real_at(it->second));
            } else if (have_dest_rows) {
                out.push_real(mean[j]);
            } else {
                out.push_missing();
            }
        }
        cols.push_back(std::move(out));
    }
    return Dataset(std::move(cols));
}

struct DataSplit {
    Dataset train;
    Dataset test;
    int cutoff_year = 0;
};

/// Time-based split: year(date_time) < cutoff goes to train, >= cutoff to test.
inline DataSplit split_by_year(const Dataset& ds, int cutoff_year) {
    const Column& dt = ds.col("date_time");
    if (dt.type() != ColumnType::Timestamp)
        throw SchemaError("split_by_year: 'date_time' must be a timestamp column");
    std::vector<std::size_t> train_rows, test_rows;
    for (std::size_t r = 0; r < ds.row_count(); ++r) {
        if (dt.is_missing(r))
            throw RowError("split_by_year: row " + std::to_string(r) + " has no date_time value");
        (dt.ts_at(r).year < cutoff_year ? train_rows : test_rows).push_back(r);
    }
    return DataSplit{take_rows(ds, train_rows), take_rows(ds, test_rows), cutoff_year};
}

/// Uniform sample of n rows without replacement; deterministic per seed,
/// result rows keep their original relative order.
inline Dataset sample_rows(const Dataset& ds, std::size_t n, std::uint64_t seed) {
    if (n > ds.row_count())
        throw ArgumentError("sample_rows: n=" + std::to_string(n) + " exceeds row count " +
                            std::to_string(ds.row_count()));
    auto rng = substream(seed, "sample_rows");
    auto rows = sample_without_replacement(ds.row_count(), n, rng);
    return take_rows(ds, rows);
}

}  // namespace hotelml
