#pragma once

#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "fruitscan/formats.hpp"
#include "fruitscan/geometry.hpp"
#include "fruitscan/metrics.hpp"

namespace fruitscan::evaluation {

// ---- phenotype error statistics -------------------------------------------

/// Printed: the P_e error columns as stored in the table. Recomputed: 100 (P_p - P_t) / P_t.
enum class ErrorSource { Printed, Recomputed };

struct TraitStats {
    metrics::Trait trait = metrics::Trait::Width;
    metrics::BoxStats stats;
    double max_printed_deviation = 0.0;  ///< max |printed - recomputed| in the column, pp
};

std::vector<double> error_column(const std::vector<formats::GroundTruthRow>& rows, metrics::Trait trait,
                                 ErrorSource source);

std::vector<TraitStats> phenotype_stats(const std::vector<formats::GroundTruthRow>& rows, ErrorSource source);

/// Header `trait,median,q1,q3,min,max,n`, one row per trait.
std::string stats_to_csv(const std::vector<TraitStats>& stats);
std::string stats_to_json(const std::vector<TraitStats>& stats, ErrorSource source);

// ---- segmentation evaluation ------------------------------------------------

struct Instance {
    int id = 0;
    geometry::Polygon polygon;
    std::optional<double> confidence;
};

struct Scene {
    std::string name;
    int width = 0;
    int height = 0;
    std::vector<Instance> instances;
};

/// `{"schema": 1, "scenes": [{"name", "width", "height",
///   "instances": [{"id", "polygon": [[x, y], ...], "confidence"?}]}]}`
std::vector<Scene> parse_annotations(std::string_view json_text);
std::vector<Scene> read_annotations(const std::filesystem::path& path);
std::string encode_annotations(const std::vector<Scene>& scenes);

enum class EvalKind { Mee, Map, EdgeLoss };

EvalKind parse_eval_kind(std::string_view text);
std::string_view to_string(EvalKind kind);

struct EvalOutput {
    std::string json;
    std::string csv;
    double headline = 0.0;  ///< mEE percent, mAP50, or mean edge loss
};

/// Pairs scenes by name and, for mee/edgeloss, instances by id. Any unpaired
/// entry throws Unpaired with the offending ids listed.
EvalOutput run_eval(EvalKind kind, const std::vector<Scene>& pred, const std::vector<Scene>& gt,
                    int samples = metrics::kDefaultEdgeSamples);

}  // namespace fruitscan::evaluation
