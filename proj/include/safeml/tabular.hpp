#pragma once

#include "safeml/csv.hpp"
#include "safeml/error.hpp"

#include <algorithm>
#include <cmath>
#include <cstddef>
#include <cstdint>
#include <fstream>
#include <functional>
#include <map>
#include <numeric>
#include <optional>
#include <random>
#include <set>
#include <span>
#include <sstream>
#include <string>
#include <utility>
#include <vector>

namespace safeml {

enum class ColumnKind { numeric, categorical };
enum class TargetKind { continuous, binary };

struct ColumnSchema {
    std::string name;
    ColumnKind kind = ColumnKind::numeric;
    std::vector<std::string> levels; ///< categorical only; sorted, duplicate-free

    bool is_categorical() const noexcept { return kind == ColumnKind::categorical; }

    /// Index of `label` in `levels`, or nullopt.
    std::optional<std::size_t> level_index(std::string_view label) const
    {
        auto it = std::lower_bound(levels.begin(), levels.end(), label);
        if (it == levels.end() || *it != label)
            return std::nullopt;
        return static_cast<std::size_t>(it - levels.begin());
    }

    friend bool operator==(const ColumnSchema&, const ColumnSchema&) = default;
};

using Schema = std::vector<ColumnSchema>;

inline std::optional<std::size_t> find_column(const Schema& schema, std::string_view name)
{
    for (std::size_t j = 0; j < schema.size(); ++j)
        if (schema[j].name == name)
            return j;
    return std::nullopt;
}

/// Column-typed table with one target. Cells are stored row-major as doubles;
/// categorical cells hold the index of their level in the column schema.
/// Immutable after construction.
class Dataset {
public:
    Dataset(Schema schema, std::vector<double> cells, std::vector<double> target, TargetKind target_kind,
            std::string target_name = "target")
        : schema_(std::move(schema)), cells_(std::move(cells)), target_(std::move(target)),
          target_kind_(target_kind), target_name_(std::move(target_name))
    {
        validate();
    }

    std::size_t n() const noexcept { return target_.size(); }
    std::size_t p() const noexcept { return schema_.size(); }
    const Schema& schema() const noexcept { return schema_; }
    const ColumnSchema& column(std::size_t j) const { return schema_.at(j); }
    std::span<const double> cells() const noexcept { return cells_; }
    std::span<const double> row(std::size_t i) const { return std::span(cells_).subspan(i * p(), p()); }
    double cell(std::size_t i, std::size_t j) const { return cells_[i * p() + j]; }
    std::span<const double> target() const noexcept { return target_; }
    TargetKind target_kind() const noexcept { return target_kind_; }
    const std::string& target_name() const noexcept { return target_name_; }

    std::vector<double> column_values(std::size_t j) const
    {
        std::vector<double> out(n());
        for (std::size_t i = 0; i < n(); ++i)
            out[i] = cell(i, j);
        return out;
    }

    /// Rows at `indices`, in the given order; schema is kept whole.
    Dataset subset(std::span<const std::size_t> indices) const
    {
        std::vector<double> cells;
        std::vector<double> target;
        cells.reserve(indices.size() * p());
        target.reserve(indices.size());
        for (std::size_t i : indices) {
            if (i >= n())
                fail(ErrorCode::invalid_argument, "row index " + std::to_string(i) + " out of range");
            auto r = row(i);
            cells.insert(cells.end(), r.begin(), r.end());
            target.push_back(target_[i]);
        }
        return Dataset(schema_, std::move(cells), std::move(target), target_kind_, target_name_);
    }

    friend bool operator==(const Dataset&, const Dataset&) = default;

private:
    void validate() const
    {
        if (target_.empty())
            fail(ErrorCode::empty_file, "dataset has no rows");
        if (cells_.size() != target_.size() * schema_.size())
            fail(ErrorCode::invalid_argument, "cell count does not match n x p");
        for (std::size_t j = 0; j < schema_.size(); ++j) {
            const auto& col = schema_[j];
            if (!col.is_categorical())
                continue;
            if (col.levels.empty())
                fail(ErrorCode::invalid_argument, "categorical column '" + col.name + "' has no levels");
            if (std::adjacent_find(col.levels.begin(), col.levels.end(), std::greater_equal<>()) != col.levels.end())
                fail(ErrorCode::invalid_argument, "levels of '" + col.name + "' must be sorted and unique");
            for (std::size_t i = 0; i < n(); ++i) {
                double v = cell(i, j);
                if (!(v >= 0.0) || v != std::floor(v) || v >= static_cast<double>(col.levels.size()))
                    fail(ErrorCode::invalid_argument, "invalid level index in '" + col.name + "'");
            }
        }
        for (double y : target_) {
            if (!std::isfinite(y))
                fail(ErrorCode::non_finite_input, "non-finite target value");
            if (target_kind_ == TargetKind::binary && y != 0.0 && y != 1.0)
                fail(ErrorCode::invalid_argument, "binary target must contain only 0 and 1");
        }
    }

    Schema schema_;
    std::vector<double> cells_;
    std::vector<double> target_;
    TargetKind target_kind_;
    std::string target_name_;
};

using SchemaHints = std::map<std::string, ColumnKind, std::less<>>;

namespace detail {

struct RawTable {
    std::vector<std::string> header;
    std::vector<std::vector<std::string>> rows;
};

inline RawTable read_raw(std::istream& in)
{
    RawTable t;
    std::vector<std::string> fields;
    if (!csv::read_record(in, fields) || (fields.size() == 1 && fields[0].empty()))
        fail(ErrorCode::empty_file, "no header row");
    t.header = fields;
    std::size_t line = 1;
    while (csv::read_record(in, fields)) {
        ++line;
        if (fields.size() == 1 && fields[0].empty())
            continue; // blank line
        if (fields.size() != t.header.size())
            fail(ErrorCode::unparseable_cell, "row " + std::to_string(line) + " has " +
                                                  std::to_string(fields.size()) + " cells, header has " +
                                                  std::to_string(t.header.size()));
        for (std::size_t j = 0; j < fields.size(); ++j)
            if (fields[j].empty())
                fail(ErrorCode::missing_value, "row " + std::to_string(line) + ", column '" + t.header[j] + "'");
        t.rows.push_back(fields);
    }
    if (t.rows.empty())
        fail(ErrorCode::empty_file, "no data rows");
    return t;
}

inline double parse_target(const std::string& text, std::size_t row, const std::string& name)
{
    auto v = csv::parse_number(text);
    if (!v)
        fail(ErrorCode::unparseable_cell, "row " + std::to_string(row + 2) + ", column '" + name + "': '" + text + "'");
    return *v;
}

inline TargetKind infer_target_kind(std::span<const double> y)
{
    for (double v : y)
        if (v != 0.0 && v != 1.0)
            return TargetKind::continuous;
    return TargetKind::binary;
}

} // namespace detail

/// Reads a CSV with a header row. A column is numeric when every cell parses
/// as a finite decimal, categorical otherwise, unless `hints` says differently.
/// The target column must be numeric; it is binary iff it only holds 0 and 1.
inline Dataset read_csv(std::istream& in, std::string_view target_name, const SchemaHints& hints = {})
{
    auto raw = detail::read_raw(in);
    const auto target_col = std::find(raw.header.begin(), raw.header.end(), target_name);
    if (target_col == raw.header.end())
        fail(ErrorCode::missing_target, "target column '" + std::string(target_name) + "' not in header");
    const auto t = static_cast<std::size_t>(target_col - raw.header.begin());
    const std::size_t n = raw.rows.size();

    Schema schema;
    std::vector<std::size_t> source;
    for (std::size_t j = 0; j < raw.header.size(); ++j) {
        if (j == t)
            continue;
        ColumnSchema col{raw.header[j], ColumnKind::numeric, {}};
        if (auto h = hints.find(col.name); h != hints.end()) {
            col.kind = h->second;
        } else {
            for (const auto& r : raw.rows)
                if (!csv::parse_number(r[j])) {
                    col.kind = ColumnKind::categorical;
                    break;
                }
        }
        if (col.is_categorical()) {
            std::set<std::string> levels;
            for (const auto& r : raw.rows)
                levels.insert(r[j]);
            col.levels.assign(levels.begin(), levels.end());
        }
        schema.push_back(std::move(col));
        source.push_back(j);
    }

    std::vector<double> cells(n * schema.size());
    std::vector<double> target(n);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = raw.rows[i];
        target[i] = detail::parse_target(r[t], i, raw.header[t]);
        for (std::size_t k = 0; k < schema.size(); ++k) {
            const auto& text = r[source[k]];
            double& out = cells[i * schema.size() + k];
            if (schema[k].is_categorical()) {
                out = static_cast<double>(*schema[k].level_index(text));
            } else {
                auto v = csv::parse_number(text);
                if (!v)
                    fail(ErrorCode::unparseable_cell,
                         "row " + std::to_string(i + 2) + ", column '" + schema[k].name + "': '" + text + "'");
                out = *v;
            }
        }
    }
    const auto kind = detail::infer_target_kind(target);
    return Dataset(std::move(schema), std::move(cells), std::move(target), kind, std::string(target_name));
}

inline Dataset load_csv(const std::string& path, std::string_view target_name, const SchemaHints& hints = {})
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorCode::empty_file, "cannot open '" + path + "'");
    return read_csv(in, target_name, hints);
}

/// Reads a CSV against a fixed schema: columns are matched by name (extra
/// columns ignored) and labels mapped onto the schema's levels. The target is
/// read when `target_name` names a present column, otherwise filled with zeros.
inline Dataset read_csv_with_schema(std::istream& in, const Schema& schema, std::string_view target_name = {})
{
    auto raw = detail::read_raw(in);
    auto find = [&](std::string_view name) -> std::optional<std::size_t> {
        auto it = std::find(raw.header.begin(), raw.header.end(), name);
        if (it == raw.header.end())
            return std::nullopt;
        return static_cast<std::size_t>(it - raw.header.begin());
    };
    std::vector<std::size_t> source;
    for (const auto& col : schema) {
        auto j = find(col.name);
        if (!j)
            fail(ErrorCode::schema_mismatch, "column '" + col.name + "' missing from CSV");
        source.push_back(*j);
    }
    std::optional<std::size_t> t = target_name.empty() ? std::nullopt : find(target_name);
    const std::size_t n = raw.rows.size();
    std::vector<double> cells(n * schema.size());
    std::vector<double> target(n, 0.0);
    for (std::size_t i = 0; i < n; ++i) {
        const auto& r = raw.rows[i];
        if (t)
            target[i] = detail::parse_target(r[*t], i, raw.header[*t]);
        for (std::size_t k = 0; k < schema.size(); ++k) {
            const auto& text = r[source[k]];
            double& out = cells[i * schema.size() + k];
            if (schema[k].is_categorical()) {
                auto idx = schema[k].level_index(text);
                if (!idx)
                    fail(ErrorCode::unknown_level, "column '" + schema[k].name + "', label '" + text + "'");
                out = static_cast<double>(*idx);
            } else {
                auto v = csv::parse_number(text);
                if (!v)
                    fail(ErrorCode::unparseable_cell,
                         "row " + std::to_string(i + 2) + ", column '" + schema[k].name + "': '" + text + "'");
                out = *v;
            }
        }
    }
    const auto kind = t ? detail::infer_target_kind(target) : TargetKind::continuous;
    return Dataset(schema, std::move(cells), std::move(target), kind,
                   t ? std::string(target_name) : std::string("target"));
}

inline Dataset load_csv_with_schema(const std::string& path, const Schema& schema, std::string_view target_name = {})
{
    std::ifstream in(path);
    if (!in)
        fail(ErrorCode::empty_file, "cannot open '" + path + "'");
    return read_csv_with_schema(in, schema, target_name);
}

/// Text of cell (i, j): the level label for categorical columns.
inline std::string cell_text(const Schema& schema, std::span<const double> row, std::size_t j)
{
    if (schema[j].is_categorical())
        return schema[j].levels[static_cast<std::size_t>(row[j])];
    return csv::format_number(row[j]);
}

/// Features first in schema order, target last.
inline void write_csv(std::ostream& out, const Dataset& data)
{
    for (const auto& col : data.schema()) {
        csv::write_field(out, col.name);
        out << ',';
    }
    csv::write_field(out, data.target_name());
    out << '\n';
    for (std::size_t i = 0; i < data.n(); ++i) {
        auto r = data.row(i);
        for (std::size_t j = 0; j < data.p(); ++j) {
            csv::write_field(out, cell_text(data.schema(), r, j));
            out << ',';
        }
        out << csv::format_number(data.target()[i]) << '\n';
    }
}

inline void save_csv(const std::string& path, const Dataset& data)
{
    std::ofstream out(path);
    if (!out)
        fail(ErrorCode::invalid_argument, "cannot write '" + path + "'");
    write_csv(out, data);
}

/// Hints that reproduce `schema` on reload.
inline SchemaHints hints_of(const Schema& schema)
{
    SchemaHints hints;
    for (const auto& col : schema)
        hints[col.name] = col.kind;
    return hints;
}

struct SplitResult {
    Dataset train;
    Dataset test;
};

/// Seeded shuffle, then the first round(n * test_fraction) shuffled rows form
/// the test part. Both parts keep input row order and the full schema.
inline SplitResult split(const Dataset& data, double test_fraction, std::uint64_t seed)
{
    if (!(test_fraction > 0.0 && test_fraction < 1.0))
        fail(ErrorCode::invalid_argument, "test fraction must lie in (0,1)");
    const std::size_t n = data.n();
    const auto n_test = static_cast<std::size_t>(std::llround(static_cast<double>(n) * test_fraction));
    if (n < 2 || n_test == 0 || n_test >= n)
        fail(ErrorCode::degenerate_split, std::to_string(n) + " rows cannot be split with fraction " +
                                              csv::format_number(test_fraction));
    std::vector<std::size_t> order(n);
    std::iota(order.begin(), order.end(), std::size_t{0});
    std::mt19937_64 rng(seed);
    std::shuffle(order.begin(), order.end(), rng);
    std::vector<std::size_t> test(order.begin(), order.begin() + static_cast<std::ptrdiff_t>(n_test));
    std::vector<std::size_t> train(order.begin() + static_cast<std::ptrdiff_t>(n_test), order.end());
    std::sort(test.begin(), test.end());
    std::sort(train.begin(), train.end());
    return {data.subset(train), data.subset(test)};
}

} // namespace safeml
