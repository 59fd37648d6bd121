#include "fruitscan/evaluation.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <map>
#include <set>

#include <json.hpp>

#include "fruitscan/edgeops.hpp"

namespace fruitscan::evaluation {

namespace {

using nlohmann::json;
using nlohmann::ordered_json;

std::string fixed(double v, int digits = 6) {
    char buf[64];
    std::snprintf(buf, sizeof buf, "%.*f", digits, v);
    return buf;
}

[[noreturn]] void schema_error(const std::string& message) {
    throw Error(ErrorCode::Parse, "annotations: " + message);
}

const json& require(const json& obj, const char* key, const std::string& where) {
    const auto it = obj.find(key);
    if (it == obj.end()) schema_error(where + ": missing field '" + key + "'");
    return *it;
}

geometry::Polygon parse_polygon(const json& v, const std::string& where) {
    if (!v.is_array()) schema_error(where + ": polygon must be a list of [x, y]");
    std::vector<geometry::Point> pts;
    for (const json& p : v) {
        if (!p.is_array() || p.size() != 2 || !p[0].is_number() || !p[1].is_number()) {
            schema_error(where + ": polygon vertex must be [x, y]");
        }
        pts.push_back({p[0].get<double>(), p[1].get<double>()});
    }
    try {
        return geometry::Polygon(std::move(pts));
    } catch (const Error& e) {
        throw Error(e.code(), "annotations: " + where + ": " + e.what());
    }
}

std::map<std::string, const Scene*> index_scenes(const std::vector<Scene>& scenes, const char* side) {
    std::map<std::string, const Scene*> out;
    for (const Scene& s : scenes) {
        if (!out.emplace(s.name, &s).second) {
            throw Error(ErrorCode::InvalidArgument, std::string(side) + " annotations repeat scene '" + s.name + "'");
        }
    }
    return out;
}

struct PairedScene {
    const Scene* pred;
    const Scene* gt;
};

std::vector<PairedScene> pair_scenes(const std::vector<Scene>& pred, const std::vector<Scene>& gt) {
    const auto p = index_scenes(pred, "prediction");
    const auto g = index_scenes(gt, "ground-truth");
    std::vector<std::string> unpaired;
    for (const auto& [name, _] : p)
        if (!g.count(name)) unpaired.push_back("scene '" + name + "' has no ground truth");
    for (const auto& [name, _] : g)
        if (!p.count(name)) unpaired.push_back("scene '" + name + "' has no predictions");
    if (!unpaired.empty()) {
        std::string msg = "unpaired scenes:";
        for (const auto& u : unpaired) msg += " " + u + ";";
        throw Error(ErrorCode::Unpaired, msg);
    }
    std::vector<PairedScene> out;
    for (const auto& [name, scene] : p) {
        const Scene* other = g.at(name);
        if (scene->width != other->width || scene->height != other->height) {
            throw Error(ErrorCode::DimensionMismatch, "scene '" + name + "' differs in size between files");
        }
        out.push_back({scene, other});
    }
    return out;
}

struct PairedInstance {
    std::string scene;
    int id;
    const Instance* pred;
    const Instance* gt;
    int width;
    int height;
};

std::vector<PairedInstance> pair_instances(const std::vector<PairedScene>& scenes) {
    std::vector<PairedInstance> out;
    std::vector<std::string> pred_only;
    std::vector<std::string> gt_only;
    for (const PairedScene& s : scenes) {
        std::map<int, const Instance*> p;
        std::map<int, const Instance*> g;
        for (const Instance& i : s.pred->instances) p[i.id] = &i;
        for (const Instance& i : s.gt->instances) g[i.id] = &i;
        for (const auto& [id, inst] : p) {
            const auto it = g.find(id);
            if (it == g.end()) {
                pred_only.push_back(s.pred->name + "/" + std::to_string(id));
            } else {
                out.push_back({s.pred->name, id, inst, it->second, s.pred->width, s.pred->height});
            }
        }
        for (const auto& [id, _] : g)
            if (!p.count(id)) gt_only.push_back(s.gt->name + "/" + std::to_string(id));
    }
    if (!pred_only.empty() || !gt_only.empty()) {
        std::string msg = "unpaired ids;";
        if (!pred_only.empty()) {
            msg += " missing ground truth for:";
            for (const auto& id : pred_only) msg += " " + id;
            msg += ";";
        }
        if (!gt_only.empty()) {
            msg += " missing prediction for:";
            for (const auto& id : gt_only) msg += " " + id;
            msg += ";";
        }
        throw Error(ErrorCode::Unpaired, msg);
    }
    return out;
}

}  // namespace

// ---------------------------------------------------------------------------

std::vector<double> error_column(const std::vector<formats::GroundTruthRow>& rows, metrics::Trait trait,
                                 ErrorSource source) {
    std::vector<double> out;
    out.reserve(rows.size());
    for (const auto& row : rows) {
        const auto& t = metrics::trait_of(row, trait);
        out.push_back(source == ErrorSource::Printed ? t.printed_error
                                                     : metrics::relative_error(t.truth, t.predicted));
    }
    return out;
}

std::vector<TraitStats> phenotype_stats(const std::vector<formats::GroundTruthRow>& rows, ErrorSource source) {
    if (rows.empty()) throw Error(ErrorCode::InvalidArgument, "phenotype dataset has no rows");
    std::vector<TraitStats> out;
    for (const metrics::Trait trait : metrics::kAllTraits) {
        const auto printed = error_column(rows, trait, ErrorSource::Printed);
        const auto recomputed = error_column(rows, trait, ErrorSource::Recomputed);
        double deviation = 0.0;
        for (std::size_t i = 0; i < rows.size(); ++i) {
            deviation = std::max(deviation, std::abs(printed[i] - recomputed[i]));
        }
        out.push_back({trait, metrics::box_stats(source == ErrorSource::Printed ? printed : recomputed), deviation});
    }
    return out;
}

std::string stats_to_csv(const std::vector<TraitStats>& stats) {
    std::string out = "trait,median,q1,q3,min,max,n\n";
    for (const auto& s : stats) {
        out += std::string(metrics::to_string(s.trait)) + "," + fixed(s.stats.median) + "," + fixed(s.stats.q1) +
               "," + fixed(s.stats.q3) + "," + fixed(s.stats.min) + "," + fixed(s.stats.max) + "," +
               std::to_string(s.stats.n) + "\n";
    }
    return out;
}

std::string stats_to_json(const std::vector<TraitStats>& stats, ErrorSource source) {
    ordered_json doc;
    doc["schema"] = 1;
    doc["source"] = source == ErrorSource::Printed ? "printed" : "recomputed";
    ordered_json traits = ordered_json::array();
    for (const auto& s : stats) {
        traits.push_back({{"trait", std::string(metrics::to_string(s.trait))},
                          {"median", s.stats.median},
                          {"q1", s.stats.q1},
                          {"q3", s.stats.q3},
                          {"min", s.stats.min},
                          {"max", s.stats.max},
                          {"n", s.stats.n},
                          {"max_printed_deviation_pp", s.max_printed_deviation}});
    }
    doc["traits"] = std::move(traits);
    return doc.dump(2) + "\n";
}

// ---------------------------------------------------------------------------

std::vector<Scene> parse_annotations(std::string_view json_text) {
    json doc;
    try {
        doc = json::parse(json_text.begin(), json_text.end());
    } catch (const json::parse_error& e) {
        schema_error(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) schema_error("top level must be an object");
    const json& scenes = require(doc, "scenes", "annotations");
    if (!scenes.is_array()) schema_error("'scenes' must be a list");
    std::vector<Scene> out;
    for (std::size_t s = 0; s < scenes.size(); ++s) {
        const json& js = scenes[s];
        std::string where = "scenes[" + std::to_string(s) + "]";
        if (!js.is_object()) schema_error(where + ": expected an object");
        Scene scene;
        const json& name = require(js, "name", where);
        if (!name.is_string()) schema_error(where + ": 'name' must be a string");
        scene.name = name.get<std::string>();
        const json& w = require(js, "width", where);
        const json& h = require(js, "height", where);
        if (!w.is_number_integer() || !h.is_number_integer() || w.get<int>() <= 0 || h.get<int>() <= 0) {
            schema_error(where + ": width and height must be positive integers");
        }
        scene.width = w.get<int>();
        scene.height = h.get<int>();
        const json& inst = require(js, "instances", where);
        if (!inst.is_array()) schema_error(where + ": 'instances' must be a list");
        std::set<int> ids;
        for (std::size_t i = 0; i < inst.size(); ++i) {
            const json& ji = inst[i];
            const std::string iw = where + ".instances[" + std::to_string(i) + "]";
            if (!ji.is_object()) schema_error(iw + ": expected an object");
            const json& id = require(ji, "id", iw);
            if (!id.is_number_integer()) schema_error(iw + ": 'id' must be an integer");
            if (!ids.insert(id.get<int>()).second) schema_error(iw + ": duplicate id");
            std::optional<double> confidence;
            if (const auto it = ji.find("confidence"); it != ji.end() && !it->is_null()) {
                if (!it->is_number()) schema_error(iw + ": 'confidence' must be a number");
                confidence = it->get<double>();
                if (!(*confidence >= 0.0 && *confidence <= 1.0)) {
                    throw Error(ErrorCode::InvalidArgument, "annotations: " + iw + ": confidence must be in [0, 1]");
                }
            }
            scene.instances.push_back({id.get<int>(), parse_polygon(require(ji, "polygon", iw), iw), confidence});
        }
        out.push_back(std::move(scene));
    }
    return out;
}

std::vector<Scene> read_annotations(const std::filesystem::path& path) {
    return parse_annotations(formats::read_file(path));
}

std::string encode_annotations(const std::vector<Scene>& scenes) {
    ordered_json doc;
    doc["schema"] = 1;
    ordered_json list = ordered_json::array();
    for (const Scene& s : scenes) {
        ordered_json js;
        js["name"] = s.name;
        js["width"] = s.width;
        js["height"] = s.height;
        ordered_json inst = ordered_json::array();
        for (const Instance& i : s.instances) {
            ordered_json ji;
            ji["id"] = i.id;
            ordered_json poly = ordered_json::array();
            for (const auto& p : i.polygon.vertices()) poly.push_back({p.x, p.y});
            ji["polygon"] = std::move(poly);
            if (i.confidence) ji["confidence"] = *i.confidence;
            inst.push_back(std::move(ji));
        }
        js["instances"] = std::move(inst);
        list.push_back(std::move(js));
    }
    doc["scenes"] = std::move(list);
    return doc.dump(2) + "\n";
}

EvalKind parse_eval_kind(std::string_view text) {
    if (text == "mee") return EvalKind::Mee;
    if (text == "map") return EvalKind::Map;
    if (text == "edgeloss") return EvalKind::EdgeLoss;
    throw Error(ErrorCode::InvalidArgument, "unknown evaluation '" + std::string(text) + "'");
}

std::string_view to_string(EvalKind kind) {
    switch (kind) {
        case EvalKind::Mee: return "mee";
        case EvalKind::Map: return "map";
        case EvalKind::EdgeLoss: return "edgeloss";
    }
    return "unknown";
}

EvalOutput run_eval(EvalKind kind, const std::vector<Scene>& pred, const std::vector<Scene>& gt, int samples) {
    const auto scenes = pair_scenes(pred, gt);
    ordered_json doc;
    doc["schema"] = 1;
    doc["metric"] = std::string(to_string(kind));
    EvalOutput out;

    if (kind == EvalKind::Map) {
        std::vector<metrics::DetectionScene> det;
        for (const PairedScene& s : scenes) {
            metrics::DetectionScene d{s.pred->width, s.pred->height, {}, {}};
            for (const Instance& i : s.pred->instances) {
                if (!i.confidence) {
                    throw Error(ErrorCode::InvalidArgument, "prediction " + s.pred->name + "/" +
                                                                std::to_string(i.id) + " has no confidence");
                }
                d.predictions.push_back({i.polygon, *i.confidence});
            }
            for (const Instance& i : s.gt->instances) d.ground_truth.push_back(i.polygon);
            det.push_back(std::move(d));
        }
        const metrics::DetectionEval e = metrics::detection_eval(det);
        doc["precision"] = e.precision;
        doc["recall"] = e.recall;
        doc["map50"] = e.map50;
        doc["iou_threshold"] = e.iou_threshold;
        doc["confidence_threshold"] = e.confidence_threshold;
        doc["true_positives"] = e.true_positives;
        doc["false_positives"] = e.false_positives;
        doc["ground_truths"] = e.ground_truths;
        out.csv = "precision,recall,map50,true_positives,false_positives,ground_truths\n" + fixed(e.precision) +
                  "," + fixed(e.recall) + "," + fixed(e.map50) + "," + std::to_string(e.true_positives) + "," +
                  std::to_string(e.false_positives) + "," + std::to_string(e.ground_truths) + "\n";
        out.headline = e.map50;
        out.json = doc.dump(2) + "\n";
        return out;
    }

    const auto pairs = pair_instances(scenes);
    if (pairs.empty()) throw Error(ErrorCode::InvalidArgument, "no instance pairs to evaluate");
    ordered_json per = ordered_json::array();
    double total = 0.0;
    if (kind == EvalKind::Mee) {
        std::vector<metrics::MaskPair> masks;
        for (const auto& p : pairs) masks.push_back({p.pred->polygon, p.gt->polygon});
        const metrics::EdgeErrorReport r = metrics::mean_edge_error(masks, samples);
        out.csv = "scene,id,edge_error_percent\n";
        for (std::size_t i = 0; i < pairs.size(); ++i) {
            per.push_back({{"scene", pairs[i].scene}, {"id", pairs[i].id}, {"edge_error_percent", r.per_pair_percent[i]}});
            out.csv += pairs[i].scene + "," + std::to_string(pairs[i].id) + "," + fixed(r.per_pair_percent[i]) + "\n";
        }
        doc["samples_per_mask"] = r.samples_per_mask;
        doc["pairs"] = std::move(per);
        doc["mee_percent"] = r.mee_percent;
        out.csv += "ALL,," + fixed(r.mee_percent) + "\n";
        out.headline = r.mee_percent;
    } else {
        out.csv = "scene,id,edge_loss\n";
        for (const auto& p : pairs) {
            const RasterGrid a = geometry::rasterize(p.pred->polygon, p.width, p.height);
            const RasterGrid b = geometry::rasterize(p.gt->polygon, p.width, p.height);
            const double loss = edgeops::edge_loss(a, b);
            total += loss;
            per.push_back({{"scene", p.scene}, {"id", p.id}, {"edge_loss", loss}});
            out.csv += p.scene + "," + std::to_string(p.id) + "," + fixed(loss) + "\n";
        }
        const double mean = total / static_cast<double>(pairs.size());
        doc["pairs"] = std::move(per);
        doc["mean_edge_loss"] = mean;
        out.csv += "ALL,," + fixed(mean) + "\n";
        out.headline = mean;
    }
    out.json = doc.dump(2) + "\n";
    return out;
}

}  // namespace fruitscan::evaluation
