#pragma once

#include "safeml/csv.hpp"
#include "safeml/discretize.hpp"
#include "safeml/error.hpp"
#include "safeml/model_api.hpp"
#include "safeml/profiles.hpp"
#include "safeml/schema_json.hpp"
#include "safeml/tabular.hpp"

#include <map>
#include <optional>
#include <string>
#include <variant>
#include <vector>

namespace safeml {

/// k thresholds split the line into k + 1 right-open intervals;
/// interval 0 is (-inf, t_1) and serves as the reference.
struct NumericBins {
    std::vector<double> thresholds;
    friend bool operator==(const NumericBins&, const NumericBins&) = default;
};

/// Level label -> group id; group 0 (lowest mean response) is the reference.
struct LevelMerge {
    std::map<std::string, std::size_t> group_of;
    std::size_t group_count = 1;
    friend bool operator==(const LevelMerge&, const LevelMerge&) = default;
};

struct Drop {
    friend bool operator==(const Drop&, const Drop&) = default;
};

struct Passthrough {
    friend bool operator==(const Passthrough&, const Passthrough&) = default;
};

using TransformKind = std::variant<NumericBins, LevelMerge, Drop, Passthrough>;

struct FeatureTransform {
    std::string feature;
    TransformKind kind;

    friend bool operator==(const FeatureTransform&, const FeatureTransform&) = default;
};

struct TransformSet {
    std::vector<FeatureTransform> transforms; ///< one per feature, schema order
    Schema source_schema;
    double penalty = 0.0;

    friend bool operator==(const TransformSet&, const TransformSet&) = default;
};

enum class ForcedKind { drop, passthrough };

struct ExtractOptions {
    std::map<std::string, double, std::less<>> penalty_overrides;
    std::map<std::string, ForcedKind, std::less<>> kind_overrides;
    bool keep_flat_raw = false; ///< flat features pass through raw instead of being dropped
    std::size_t max_points = default_grid_points;
    unsigned workers = 1;
};

/// Profile of one feature; empty when the feature's kind is overridden.
using FeatureProfile = std::variant<std::monostate, Profile, LevelProfile>;

/// The penalty-independent half of extraction: one profile per feature,
/// computed on the training rows. Reusable across penalties.
inline std::vector<FeatureProfile> compute_profiles(const PredictionOracle& oracle, const Dataset& train,
                                                    const ExtractOptions& options = {})
{
    std::vector<FeatureProfile> out;
    out.reserve(train.p());
    for (std::size_t j = 0; j < train.p(); ++j) {
        const auto& col = train.column(j);
        if (options.kind_overrides.contains(col.name)) {
            out.emplace_back(std::monostate{});
        } else if (col.is_categorical()) {
            out.emplace_back(categorical_profile(oracle, train, col.name, options.workers));
        } else {
            const auto grid = make_grid(train.column_values(j), options.max_points);
            out.emplace_back(numeric_profile(oracle, train, col.name, grid, options.workers));
        }
    }
    return out;
}

/// The penalty-dependent half: discretize each profile. A numeric feature with
/// no thresholds or a categorical feature collapsed to one group has a flat
/// response and is dropped (or passed through when `keep_flat_raw`).
inline TransformSet transforms_from_profiles(std::span<const FeatureProfile> profiles, const Schema& schema,
                                             double penalty, const ExtractOptions& options = {})
{
    if (profiles.size() != schema.size())
        fail(ErrorCode::schema_mismatch, "one profile per feature required");
    TransformSet tset{{}, schema, penalty};
    const auto flat = [&]() -> TransformKind {
        if (options.keep_flat_raw)
            return Passthrough{};
        return Drop{};
    };
    for (std::size_t j = 0; j < schema.size(); ++j) {
        const auto& col = schema[j];
        FeatureTransform ft{col.name, Drop{}};
        double lambda = penalty;
        if (auto it = options.penalty_overrides.find(col.name); it != options.penalty_overrides.end())
            lambda = it->second;
        if (auto it = options.kind_overrides.find(col.name); it != options.kind_overrides.end()) {
            if (it->second == ForcedKind::passthrough)
                ft.kind = Passthrough{};
        } else if (const auto* prof = std::get_if<Profile>(&profiles[j])) {
            const auto seg = segment_profile(prof->values, lambda);
            auto thresholds = cuts_to_thresholds(prof->grid, seg.cut_indices);
            if (thresholds.empty())
                ft.kind = flat();
            else
                ft.kind = NumericBins{std::move(thresholds)};
        } else if (const auto* lp = std::get_if<LevelProfile>(&profiles[j])) {
            const auto grouping = merge_levels(*lp, lambda);
            if (grouping.group_count() <= 1) {
                ft.kind = flat();
            } else {
                LevelMerge lm;
                lm.group_count = grouping.group_count();
                for (std::size_t l = 0; l < grouping.levels.size(); ++l)
                    lm.group_of[grouping.levels[l]] = grouping.group_of[l];
                ft.kind = std::move(lm);
            }
        } else {
            fail(ErrorCode::invalid_argument, "missing profile for '" + col.name + "'");
        }
        tset.transforms.push_back(std::move(ft));
    }
    return tset;
}

/// Surrogate-assisted feature extraction: profile every feature under the
/// oracle, then discretize numeric profiles and merge categorical levels.
inline TransformSet extract_transforms(const PredictionOracle& oracle, const Dataset& train, double penalty,
                                       const ExtractOptions& options = {})
{
    const auto profiles = compute_profiles(oracle, train, options);
    return transforms_from_profiles(profiles, train.schema(), penalty, options);
}

namespace detail {

inline void check_compatible(const Schema& source, const Schema& data)
{
    if (source.size() != data.size())
        fail(ErrorCode::schema_mismatch, "expected " + std::to_string(source.size()) + " features, got " +
                                             std::to_string(data.size()));
    for (std::size_t j = 0; j < source.size(); ++j)
        if (source[j].name != data[j].name || source[j].kind != data[j].kind)
            fail(ErrorCode::schema_mismatch, "feature " + std::to_string(j) + " is '" + data[j].name +
                                                 "', transforms expect '" + source[j].name + "' of the same kind");
}

/// Interval of `x` among right-open intervals cut at `thresholds`.
inline std::size_t interval_of(std::span<const double> thresholds, double x)
{
    return static_cast<std::size_t>(std::upper_bound(thresholds.begin(), thresholds.end(), x) - thresholds.begin());
}

} // namespace detail

/// Applies T* with reference encoding. Numeric bins with k thresholds become k
/// indicators `<f>__ge_<t_j>` (membership of interval j); a merge into G groups
/// becomes G - 1 indicators `<f>__grp<j>`; passthrough keeps the column as is;
/// drop emits nothing. The target is copied.
inline Dataset apply_transforms(const TransformSet& tset, const Dataset& data)
{
    detail::check_compatible(tset.source_schema, data.schema());

    Schema out_schema;
    struct Emit {
        std::size_t source;
        const FeatureTransform* ft;
        std::size_t width;
        std::vector<std::size_t> group_of_data_level; ///< level_merge only
    };
    std::vector<Emit> plan;
    for (std::size_t j = 0; j < tset.transforms.size(); ++j) {
        const auto& ft = tset.transforms[j];
        if (ft.feature != data.column(j).name)
            fail(ErrorCode::schema_mismatch, "transform " + std::to_string(j) + " is for '" + ft.feature + "'");
        Emit e{j, &ft, 0, {}};
        if (const auto* nb = std::get_if<NumericBins>(&ft.kind)) {
            for (double t : nb->thresholds)
                out_schema.push_back({ft.feature + "__ge_" + csv::format_number(t), ColumnKind::numeric, {}});
            e.width = nb->thresholds.size();
        } else if (const auto* lm = std::get_if<LevelMerge>(&ft.kind)) {
            for (std::size_t g = 1; g < lm->group_count; ++g)
                out_schema.push_back({ft.feature + "__grp" + std::to_string(g), ColumnKind::numeric, {}});
            e.width = lm->group_count - 1;
            for (const auto& label : data.column(j).levels) {
                auto it = lm->group_of.find(label);
                if (it == lm->group_of.end())
                    fail(ErrorCode::unknown_level, "feature '" + ft.feature + "', label '" + label + "'");
                e.group_of_data_level.push_back(it->second);
            }
        } else if (std::holds_alternative<Passthrough>(ft.kind)) {
            out_schema.push_back(data.column(j));
            e.width = 1;
        }
        if (e.width > 0)
            plan.push_back(std::move(e));
    }

    const std::size_t q = out_schema.size();
    std::vector<double> cells(data.n() * q, 0.0);
    for (std::size_t i = 0; i < data.n(); ++i) {
        double* out = cells.data() + i * q;
        std::size_t offset = 0;
        for (const auto& e : plan) {
            const double x = data.cell(i, e.source);
            if (const auto* nb = std::get_if<NumericBins>(&e.ft->kind)) {
                const std::size_t k = detail::interval_of(nb->thresholds, x);
                if (k > 0)
                    out[offset + k - 1] = 1.0;
            } else if (std::holds_alternative<LevelMerge>(e.ft->kind)) {
                const std::size_t g = e.group_of_data_level[static_cast<std::size_t>(x)];
                if (g > 0)
                    out[offset + g - 1] = 1.0;
            } else {
                out[offset] = x;
            }
            offset += e.width;
        }
    }
    return Dataset(std::move(out_schema), std::move(cells), {data.target().begin(), data.target().end()},
                   data.target_kind(), data.target_name());
}

/// Names of columns holding a single value; indicators that never fire on the
/// training split mean an interval or group saw no training rows.
inline std::vector<std::string> constant_columns(const Dataset& data)
{
    std::vector<std::string> out;
    for (std::size_t j = 0; j < data.p(); ++j) {
        bool constant = true;
        for (std::size_t i = 1; i < data.n() && constant; ++i)
            constant = data.cell(i, j) == data.cell(0, j);
        if (constant)
            out.push_back(data.column(j).name);
    }
    return out;
}

constexpr int transform_format_version = 1;

inline json transforms_to_json(const TransformSet& tset)
{
    json features = json::array();
    for (const auto& ft : tset.transforms) {
        json f = {{"name", ft.feature}};
        if (const auto* nb = std::get_if<NumericBins>(&ft.kind)) {
            f["kind"] = "numeric_bins";
            f["thresholds"] = nb->thresholds;
            f["reference"] = "interval 0: below the first threshold";
        } else if (const auto* lm = std::get_if<LevelMerge>(&ft.kind)) {
            f["kind"] = "level_merge";
            f["groups"] = lm->group_of;
            f["group_count"] = lm->group_count;
            f["reference"] = "group 0: lowest mean response";
        } else if (std::holds_alternative<Drop>(ft.kind)) {
            f["kind"] = "drop";
        } else {
            f["kind"] = "passthrough";
        }
        features.push_back(std::move(f));
    }
    return {{"version", transform_format_version},
            {"penalty", tset.penalty},
            {"source_schema", schema_to_json(tset.source_schema)},
            {"features", std::move(features)}};
}

inline TransformSet transforms_from_json(const json& j)
{
    try {
        if (!j.contains("version") || j.at("version") != transform_format_version)
            fail(ErrorCode::schema_version_mismatch,
                 "transform file version " + (j.contains("version") ? j.at("version").dump() : std::string("missing")) +
                     ", expected " + std::to_string(transform_format_version));
        TransformSet tset;
        tset.penalty = j.at("penalty").get<double>();
        tset.source_schema = schema_from_json(j.at("source_schema"));
        const auto& features = j.at("features");
        if (features.size() != tset.source_schema.size())
            fail(ErrorCode::malformed_file, "feature count differs from source schema");
        for (std::size_t k = 0; k < features.size(); ++k) {
            const auto& f = features[k];
            FeatureTransform ft{f.at("name").get<std::string>(), Drop{}};
            const auto& col = tset.source_schema[k];
            if (ft.feature != col.name)
                fail(ErrorCode::malformed_file, "feature '" + ft.feature + "' out of schema order");
            const auto kind = f.at("kind").get<std::string>();
            if (kind == "numeric_bins") {
                NumericBins nb{f.at("thresholds").get<std::vector<double>>()};
                if (col.is_categorical() ||
                    std::adjacent_find(nb.thresholds.begin(), nb.thresholds.end(), std::greater_equal<>()) !=
                        nb.thresholds.end())
                    fail(ErrorCode::malformed_file, "bad thresholds for '" + ft.feature + "'");
                ft.kind = std::move(nb);
            } else if (kind == "level_merge") {
                LevelMerge lm;
                lm.group_of = f.at("groups").get<std::map<std::string, std::size_t>>();
                lm.group_count = f.at("group_count").get<std::size_t>();
                if (!col.is_categorical() || lm.group_of.size() != col.levels.size())
                    fail(ErrorCode::malformed_file, "level map for '" + ft.feature + "' must cover every level");
                for (const auto& [label, g] : lm.group_of)
                    if (!col.level_index(label) || g >= lm.group_count)
                        fail(ErrorCode::malformed_file, "bad group entry for '" + ft.feature + "'");
                ft.kind = std::move(lm);
            } else if (kind == "passthrough") {
                ft.kind = Passthrough{};
            } else if (kind != "drop") {
                fail(ErrorCode::malformed_file, "unknown transform kind '" + kind + "'");
            }
            tset.transforms.push_back(std::move(ft));
        }
        return tset;
    } catch (const json::exception& e) {
        fail(ErrorCode::malformed_file, e.what());
    }
}

inline void save_transforms(const TransformSet& tset, const std::string& path)
{
    write_json_file(path, transforms_to_json(tset));
}

inline TransformSet load_transforms(const std::string& path) { return transforms_from_json(read_json_file(path)); }

} // namespace safeml
