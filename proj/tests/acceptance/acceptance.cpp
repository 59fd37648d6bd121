// Acceptance gate: one PASS/FAIL line per criterion, nonzero exit on any FAIL.
// Reference values come from closed forms or from the brute-force oracles in
// tests/support, never from the code under test.

#include <chrono>
#include <cmath>
#include <cstdio>
#include <functional>
#include <numbers>
#include <random>
#include <sstream>
#include <string>
#include <vector>

#include "fruitscan/edgeops.hpp"
#include "fruitscan/evaluation.hpp"
#include "fruitscan/formats.hpp"
#include "fruitscan/fusion.hpp"
#include "fruitscan/metrics.hpp"
#include "fruitscan/phenotype.hpp"
#include "fruitscan/pose.hpp"
#include "oracles.hpp"

using namespace fruitscan;
using geometry::Point;
using geometry::Polygon;

namespace {

// Tolerances.
constexpr double kRuntimeBudgetMs = 1000.0;
constexpr double kReTolerancePp = 0.05;
constexpr double kSphereTol = 0.02;
constexpr double kCylinderTol = 0.001;
constexpr double kConeTol = 0.03;
constexpr double kFusionRelTol = 1e-9;
constexpr double kCalibExactRelTol = 1e-9;
constexpr double kCalibGridTol = 0.01;
constexpr double kGridStep = 0.001;
constexpr double kMeeOracleTolPp = 0.01;
constexpr double kMeeInvarianceTolPp = 1e-6;
constexpr double kAttentionSaturationTol = 1e-9;
constexpr double kAttentionOracleTol = 1e-6;
constexpr double kPoseThetaTol = 1e-6;
constexpr double kPoseAreaRelTol = 1e-6;
constexpr double kPoseIdempotenceTolPx = 1e-6;

/// Collects failed checks for one criterion.
class Checker {
public:
    void require(bool ok, const std::string& what) {
        ++checks_;
        if (!ok && failures_.size() < 5) failures_.push_back(what);
        if (!ok) ++failed_;
    }
    void note(const std::string& s) { notes_ += (notes_.empty() ? "" : "; ") + s; }

    bool ok() const { return failed_ == 0; }
    int checks() const { return checks_; }
    int failed() const { return failed_; }
    const std::vector<std::string>& failures() const { return failures_; }
    const std::string& notes() const { return notes_; }

private:
    int checks_ = 0;
    int failed_ = 0;
    std::vector<std::string> failures_;
    std::string notes_;
};

std::string fmt(const char* f, double v) {
    char buf[96];
    std::snprintf(buf, sizeof buf, f, v);
    return buf;
}

Polygon to_polygon(const std::vector<oracle::Pt>& pts) {
    std::vector<Point> v;
    for (const auto& p : pts) v.push_back({p.x, p.y});
    return Polygon(std::move(v));
}

std::vector<oracle::Pt> to_pts(const Polygon& p) {
    std::vector<oracle::Pt> v;
    for (const auto& q : p.vertices()) v.push_back({q.x, q.y});
    return v;
}

Polygon square(double x, double y, double side) {
    return Polygon({{x, y}, {x + side, y}, {x + side, y + side}, {x, y + side}});
}

bool rel_close(double got, double want, double tol) { return std::abs(got - want) <= tol * std::abs(want); }

// ---------------------------------------------------------------------------

void median_reproduction(Checker& c) {
    const auto rows = formats::load_bundled_phenotype_table();
    c.require(rows.size() == 31, "bundled table has 31 rows");
    const auto stats = evaluation::phenotype_stats(rows, evaluation::ErrorSource::Printed);
    const double expected[4] = {5.63, 7.03, -0.64, 37.06};
    for (std::size_t t = 0; t < 4; ++t) {
        const double rounded = std::round(stats[t].stats.median * 100.0) / 100.0;
        c.require(std::abs(rounded - expected[t]) < 1e-9,
                  std::string(metrics::to_string(stats[t].trait)) + " median " + fmt("%.4f", stats[t].stats.median));
        c.note(std::string(metrics::to_string(stats[t].trait)) + fmt(" %.2f", rounded));
    }
}

void re_recomputation(Checker& c) {
    const auto rows = formats::load_bundled_phenotype_table();
    double worst = 0.0;
    int cells = 0;
    for (const auto& row : rows) {
        for (const metrics::Trait t : metrics::kAllTraits) {
            const auto& cell = metrics::trait_of(row, t);
            // Independent arithmetic; the library's relative_error is not used here.
            const double re = (cell.predicted - cell.truth) / cell.truth * 100.0;
            const double dev = std::abs(re - cell.printed_error);
            worst = std::max(worst, dev);
            ++cells;
            c.require(dev < kReTolerancePp, "row " + std::to_string(row.plant) + "-" + std::to_string(row.fruit) +
                                                " " + std::string(metrics::to_string(t)) + fmt(" off by %.4f pp", dev));
            c.require(std::abs(metrics::relative_error(cell.truth, cell.predicted) - re) < 1e-9, "library RE");
        }
    }
    c.require(cells == 124, "124 cells");
    c.note(std::to_string(cells) + " cells, worst " + fmt("%.4f pp", worst));
}

void volume_oracle(Checker& c) {
    const double r = 50.0;
    const auto sphere = phenotype::measure(to_polygon(oracle::regular_polygon(256, r, 60.0, 60.0)));
    const double v_sphere = 4.0 / 3.0 * std::numbers::pi * r * r * r;
    c.require(rel_close(sphere.volume_px3, v_sphere, kSphereTol), "256-gon volume " + fmt("%.2f", sphere.volume_px3));

    const auto rect = phenotype::measure(Polygon({{0, 0}, {10, 0}, {10, 20}, {0, 20}}));
    const double v_rect = 20.0 * std::numbers::pi * 25.0;
    c.require(rel_close(rect.volume_px3, v_rect, kCylinderTol), "rectangle volume " + fmt("%.4f", rect.volume_px3));

    const auto cone = phenotype::measure(Polygon({{0, 0}, {10, 0}, {5, 20}}));
    const double v_cone = std::numbers::pi * 25.0 * 20.0 / 3.0;
    c.require(rel_close(cone.volume_px3, v_cone, kConeTol), "cone volume " + fmt("%.4f", cone.volume_px3));

    c.note("sphere " + fmt("%+.2e", sphere.volume_px3 / v_sphere - 1) + ", cylinder " +
           fmt("%+.2e", rect.volume_px3 / v_rect - 1) + ", cone " + fmt("%+.2e", cone.volume_px3 / v_cone - 1));
}

void fusion_identity(Checker& c) {
    fusion::CalibrationModel model;
    model.k = 5000.0;
    const auto m = fusion::fuse({250.0, 500.0, 1e4, 1e6}, model, 50.0);
    c.require(rel_close(m.width_cm, 2.5, kFusionRelTol), "width");
    c.require(rel_close(m.height_cm, 5.0, kFusionRelTol), "height");
    c.require(rel_close(m.area_cm2, 1.0, kFusionRelTol), "area");
    c.require(rel_close(m.volume_cm3, 1.0, kFusionRelTol), "volume");

    std::mt19937 rng(2024);
    std::uniform_real_distribution<double> depth(20.0, 150.0);
    std::uniform_real_distribution<double> kd(500.0, 20000.0);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        const double k0 = kd(rng);
        std::vector<formats::CalibrationSample> s;
        for (int i = 0; i < 2 + trial % 9; ++i) {
            const double d = depth(rng);
            s.push_back({d, k0 / d});
        }
        const double k = fusion::fit_calibration(s).k;
        worst = std::max(worst, std::abs(k / k0 - 1.0));
        c.require(rel_close(k, k0, kCalibExactRelTol), "exact recovery");
    }

    const std::vector<formats::CalibrationSample> noisy{{20, 52}, {40, 24}, {100, 11}, {60, 17.5}, {30, 33}};
    std::vector<std::pair<double, double>> dp;
    for (const auto& s : noisy) dp.push_back({s.depth_cm, s.pixels_per_cm});
    const double k = fusion::fit_calibration(noisy).k;
    const double grid = oracle::grid_search_k(dp, 900.0, 1200.0, kGridStep);
    c.require(std::abs(k - grid) <= kCalibGridTol, "noisy fit " + fmt("%.6f", k) + " vs grid " + fmt("%.6f", grid));
    c.note("exact worst " + fmt("%.1e", worst) + ", noisy |k-grid| " + fmt("%.1e", std::abs(k - grid)));
}

void mee_properties(Checker& c) {
    const Polygon gt = square(0, 0, 10);
    const std::vector<metrics::MaskPair> same{{gt, gt}, {square(3, 7, 25), square(3, 7, 25)}};
    const double zero = metrics::mean_edge_error(same).mee_percent;
    c.require(zero == 0.0, "identity " + fmt("%.3e", zero));

    const Polygon shifted = square(1, 0, 10);
    const std::vector<metrics::MaskPair> one{{shifted, gt}};
    const double mee = metrics::mean_edge_error(one).mee_percent;
    const double oracle =
        oracle::dense_edge_error_percent(to_pts(shifted), to_pts(gt), metrics::kDefaultEdgeSamples, 10000);
    c.require(std::abs(mee - oracle) <= kMeeOracleTolPp, "shift " + fmt("%.6f", mee) + " vs " + fmt("%.6f", oracle));

    std::mt19937 rng(99);
    std::uniform_real_distribution<double> jitter(-2.0, 2.0);
    std::uniform_real_distribution<double> shift(-500.0, 500.0);
    std::uniform_real_distribution<double> scale(0.1, 10.0);
    double worst = 0.0;
    for (int trial = 0; trial < 50; ++trial) {
        std::vector<Point> pv;
        for (const auto& p : oracle::regular_polygon(12, 30.0, 50.0, 50.0)) pv.push_back({p.x + jitter(rng), p.y + jitter(rng)});
        const Polygon pred(pv);
        const Polygon g = to_polygon(oracle::regular_polygon(10, 28.0, 51.0, 49.0));
        const std::vector<metrics::MaskPair> base{{pred, g}};
        const double m0 = metrics::mean_edge_error(base).mee_percent;
        const Point t{shift(rng), shift(rng)};
        const std::vector<metrics::MaskPair> moved{{geometry::translate_polygon(pred, t), geometry::translate_polygon(g, t)}};
        const double s = scale(rng);
        const std::vector<metrics::MaskPair> scaled{{geometry::scale_polygon(pred, s), geometry::scale_polygon(g, s)}};
        const double dt = std::abs(metrics::mean_edge_error(moved).mee_percent - m0);
        const double ds = std::abs(metrics::mean_edge_error(scaled).mee_percent - m0);
        worst = std::max({worst, dt, ds});
        c.require(dt <= kMeeInvarianceTolPp, "translation");
        c.require(ds <= kMeeInvarianceTolPp, "scale");
    }
    c.note("shift " + fmt("%.4f%%", mee) + " (oracle " + fmt("%.4f%%)", oracle) + ", invariance worst " +
           fmt("%.1e pp", worst));
}

void sobel_edge_loss(Checker& c) {
    std::mt19937 rng(7);
    std::uniform_real_distribution<double> u(-10.0, 10.0);
    for (int trial = 0; trial < 20; ++trial) {
        std::vector<double> v(16 * 16);
        for (auto& x : v) x = u(rng);
        const auto g = edgeops::sobel(RasterGrid(16, 16, v));
        const auto o = oracle::naive_sobel(v, 16, 16);
        bool same = true;
        for (std::size_t i = 0; i < v.size(); ++i) {
            same = same && g.gx.data()[i] == o.gx[i] && g.gy.data()[i] == o.gy[i] && g.magnitude.data()[i] == o.mag[i];
        }
        c.require(same, "grid " + std::to_string(trial) + " differs from the nested-loop oracle");

        std::vector<double> w(16 * 16);
        for (auto& x : w) x = u(rng);
        const RasterGrid a(16, 16, v), b(16, 16, w);
        c.require(edgeops::edge_loss(a, a) == 0.0, "self loss");
        c.require(edgeops::edge_loss(a, b) == edgeops::edge_loss(b, a), "symmetry");
    }
    c.note("20 grids bit-identical");
}

void edge_boost(Checker& c) {
    std::mt19937 rng(11);
    std::uniform_int_distribution<int> px(0, 255);
    ImageBuffer rgb(17, 13, 3);
    for (auto& v : rgb.data()) v = static_cast<std::uint8_t>(px(rng));
    c.require(edgeops::edge_boost(rgb, 1.0, 1.0).data() == rgb.data(), "identity at 1,1");

    // Independent luminance for the flattening check.
    double lum = 0.0;
    for (int y = 0; y < rgb.height(); ++y)
        for (int x = 0; x < rgb.width(); ++x)
            lum += 0.299 * rgb(x, y, 0) + 0.587 * rgb(x, y, 1) + 0.114 * rgb(x, y, 2);
    lum /= rgb.width() * rgb.height();
    const auto flat = edgeops::enhance_contrast(rgb, 0.0);
    bool all_mean = true;
    for (auto v : flat.data()) all_mean = all_mean && v == static_cast<std::uint8_t>(std::round(lum));
    c.require(all_mean, "zero contrast flattens to mean luminance " + fmt("%.3f", lum));

    const std::vector<std::uint8_t> fixture{12, 40, 90, 200, 33, 77, 150, 255, 0, 64, 128, 192, 250, 180, 20, 5};
    const auto got = edgeops::edge_boost(ImageBuffer(4, 4, 1, fixture));
    c.require(got.data() == oracle::scalar_boost_gray(fixture, 4, 4, 1.5, 1.6), "4x4 fixture");
}

oracle::ConvSpec spec_of(const edgeops::ConvLayer& l) {
    return {l.out_channels, l.in_channels, l.kernel, l.weights, l.bias};
}

void edge_attention(Checker& c) {
    std::mt19937 rng(5);
    std::normal_distribution<double> n(0.0, 1.0);

    std::vector<double> v(2 * 4 * 4);
    for (auto& x : v) x = n(rng);
    const edgeops::FeatureMap p5(2, 4, 4, v);

    const auto zero_out = edgeops::edge_attention_forward(p5, edgeops::AttentionWeights::zeros(2));
    bool half = true;
    for (std::size_t i = 0; i < v.size(); ++i) half = half && zero_out.data()[i] == 0.5 * v[i];
    c.require(half, "zero weights give half the input");

    auto sat = edgeops::AttentionWeights::zeros(2);
    sat.conv3.bias[0] = 50.0;
    double worst_sat = 0.0;
    const auto sat_map = edgeops::attention_map(p5, sat);
    for (double a : sat_map.data()) worst_sat = std::max(worst_sat, std::abs(a - 1.0));
    c.require(worst_sat <= kAttentionSaturationTol, "saturated bias " + fmt("%.2e", worst_sat));

    // Fixed weights: conv1 2->1 3x3, conv2 1->1 3x3, conv3 1->1 1x1.
    edgeops::AttentionWeights w;
    w.conv1 = {1, 2, 3, {0.2, -0.1, 0.05, 0.3, 0.5, -0.2, 0.1, 0.0, -0.3, -0.4, 0.25, 0.1, 0.0, 0.6, 0.15, -0.05, 0.2, 0.3},
               {0.1}};
    w.conv2 = {1, 1, 3, {0.1, 0.2, 0.1, -0.2, 0.9, -0.1, 0.05, 0.3, 0.0}, {-0.05}};
    w.conv3 = {1, 1, 1, {1.7}, {-0.4}};
    const auto out = edgeops::edge_attention_forward(p5, w);
    const auto ref = oracle::direct_attention(v, 2, 4, 4, spec_of(w.conv1), spec_of(w.conv2), spec_of(w.conv3));
    double worst = 0.0;
    for (std::size_t i = 0; i < v.size(); ++i) worst = std::max(worst, std::abs(out.data()[i] - ref[i]));
    c.require(worst <= kAttentionOracleTol, "fixture deviation " + fmt("%.2e", worst));

    std::uniform_real_distribution<double> wd(-3.0, 3.0);
    bool in_range = true;
    for (int trial = 0; trial < 20; ++trial) {
        edgeops::AttentionWeights r = edgeops::AttentionWeights::zeros(4);
        for (edgeops::ConvLayer* l : {&r.conv1, &r.conv2, &r.conv3}) {
            for (auto& x : l->weights) x = wd(rng);
            for (auto& x : l->bias) x = wd(rng);
        }
        std::vector<double> in(4 * 6 * 5);
        for (auto& x : in) x = n(rng);
        const auto map = edgeops::attention_map(edgeops::FeatureMap(4, 6, 5, in), r);
        for (double a : map.data()) {
            in_range = in_range && a > 0.0 && a < 1.0;
        }
    }
    c.require(in_range, "attention values in (0, 1)");
    c.note("fixture max deviation " + fmt("%.1e", worst));
}

void pose_correction(Checker& c) {
    struct Case {
        Point body, carp;
        double theta;
    };
    const Case cases[] = {{{10, 20}, {10, 5}, std::acos(1.0)},
                          {{10, 20}, {30, 20}, std::acos(0.0)},
                          {{0, 0}, {3, -4}, std::acos(4.0 / 5.0)}};
    for (const auto& k : cases) {
        const double theta = pose::compute_pose({k.body, k.carp}).theta;
        c.require(std::abs(theta - k.theta) < 1e-12, "closed form " + fmt("%.6f", k.theta));
    }
    c.require(std::abs(cases[2].theta - 0.6435) < 1e-4, "0.6435 rad fixture");

    std::mt19937 rng(31);
    std::uniform_real_distribution<double> u(5.0, 75.0);
    const ImageBuffer img(80, 80, 3, 120);
    double worst_theta = 0.0, worst_area = 0.0, worst_move = 0.0;
    for (int trial = 0; trial < 200; ++trial) {
        const Point body{u(rng), u(rng)};
        const Point carp{u(rng), u(rng)};
        if (std::hypot(body.x - carp.x, body.y - carp.y) < 1.0) continue;
        const Polygon poly({{body.x - 6, body.y - 5}, {body.x + 7, body.y - 2}, {body.x + 5, body.y + 6},
                            {body.x, body.y + 8}, {body.x - 4, body.y + 4}});
        const auto once = pose::correct_pose(img, poly, {body, carp});
        const double th = pose::compute_pose(once.keypoints).theta;
        const double area = std::abs(geometry::polygon_area(once.polygon) / geometry::polygon_area(poly) - 1.0);
        const auto twice = pose::correct_pose(once.image, once.polygon, once.keypoints);
        double move = 0.0;
        for (std::size_t i = 0; i < poly.size(); ++i) {
            move = std::max(move, std::hypot(twice.polygon[i].x - once.polygon[i].x, twice.polygon[i].y - once.polygon[i].y));
        }
        worst_theta = std::max(worst_theta, th);
        worst_area = std::max(worst_area, area);
        worst_move = std::max(worst_move, move);
        c.require(th < kPoseThetaTol, "residual theta");
        c.require(area <= kPoseAreaRelTol, "area preserved");
        c.require(move <= kPoseIdempotenceTolPx, "second correction is a no-op");
    }
    c.note("residual theta " + fmt("%.1e", worst_theta) + ", area " + fmt("%.1e", worst_area) + ", re-apply " +
           fmt("%.1e px", worst_move));
}

void detection_metrics(Checker& c) {
    const Polygon gt = square(0, 0, 10);
    const std::vector<metrics::DetectionScene> identity{
        {40, 40, {{gt, 0.9}, {square(20, 20, 15), 0.8}}, {gt, square(20, 20, 15)}},
        {30, 30, {{square(4, 4, 12), 0.7}}, {square(4, 4, 12)}}};
    const auto id = metrics::detection_eval(identity);
    c.require(id.precision == 1.0 && id.recall == 1.0 && id.map50 == 1.0, "identity suite");

    // Offset by half the side: IoU = 25 / 175.
    const std::vector<metrics::DetectionScene> below{{30, 30, {{square(5, 5, 10), 0.9}}, {gt}}};
    c.require(metrics::detection_eval(below).map50 == 0.0, "below-threshold IoU");

    const std::vector<metrics::DetectionScene> pr{{40, 40, {{gt, 0.9}, {square(25, 25, 10), 0.8}}, {gt}}};
    const auto e = metrics::detection_eval(pr);
    c.require(e.precision == 0.5, "P " + fmt("%.3f", e.precision));
    c.require(e.recall == 1.0, "R " + fmt("%.3f", e.recall));
    c.require(e.map50 == 1.0, "AP50 " + fmt("%.3f", e.map50));
}

struct Criterion {
    const char* name;
    std::function<void(Checker&)> run;
    bool timed;
};

}  // namespace

int main() {
    const std::vector<Criterion> criteria{
        {"median-reproduction", median_reproduction, true},
        {"relative-error-recomputation", re_recomputation, true},
        {"volume-oracle", volume_oracle, true},
        {"fusion-identity", fusion_identity, false},
        {"mee-properties", mee_properties, false},
        {"sobel-edge-loss", sobel_edge_loss, false},
        {"edge-boost", edge_boost, false},
        {"edge-attention", edge_attention, false},
        {"pose-correction", pose_correction, false},
        {"detection-metrics", detection_metrics, false},
    };

    int failed = 0;
    int index = 0;
    for (const auto& cr : criteria) {
        ++index;
        Checker c;
        const auto start = std::chrono::steady_clock::now();
        try {
            cr.run(c);
        } catch (const std::exception& e) {
            c.require(false, std::string("threw: ") + e.what());
        }
        const double ms = std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - start).count();
        if (cr.timed) c.require(ms < kRuntimeBudgetMs, "runtime " + fmt("%.1f ms", ms));

        std::ostringstream line;
        line << (c.ok() ? "PASS" : "FAIL") << " " << (index < 10 ? " " : "") << index << " " << cr.name << " ("
             << c.checks() << " checks, " << fmt("%.1f ms", ms) << ")";
        if (!c.notes().empty()) line << ": " << c.notes();
        std::puts(line.str().c_str());
        for (const auto& f : c.failures()) std::printf("       failed: %s\n", f.c_str());
        if (!c.ok()) ++failed;
    }
    std::printf("%d/%zu criteria passed\n", static_cast<int>(criteria.size()) - failed, criteria.size());
    return failed == 0 ? 0 : 1;
}
