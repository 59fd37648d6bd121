#include <doctest.h>

#include <cmath>
#include <random>

#include "fruitscan/formats.hpp"
#include "temp_dir.hpp"

using namespace fruitscan;
using namespace fruitscan::formats;

namespace {

ErrorCode code_of(auto&& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.code();
    }
    FAIL("expected fruitscan::Error");
    return ErrorCode::Io;
}

const GroundTruthRow& find_row(const std::vector<GroundTruthRow>& rows, int plant, int fruit) {
    for (const auto& r : rows)
        if (r.plant == plant && r.fruit == fruit) return r;
    FAIL("row not found");
    return rows.front();
}

}  // namespace

TEST_CASE("read ASCII PGM") {
    const ImageBuffer img = decode_image("P2 2 2 255 0 64 128 255");
    CHECK(img.width() == 2);
    CHECK(img.height() == 2);
    CHECK(img.channels() == 1);
    CHECK(img.data() == std::vector<std::uint8_t>{0, 64, 128, 255});
}

TEST_CASE("header comments are skipped") {
    const ImageBuffer img = decode_image("P2\n# made by hand\n2 1 # width height\n255\n7 9\n");
    CHECK(img.data() == std::vector<std::uint8_t>{7, 9});
}

TEST_CASE("binary PPM round-trips byte-identically") {
    std::string bytes = "P6\n3 1\n255\n";
    for (int v : {255, 0, 0, 0, 255, 0, 0, 0, 255}) bytes.push_back(static_cast<char>(v));
    const ImageBuffer img = decode_image(bytes);
    CHECK(img.channels() == 3);
    CHECK(img(0, 0, 0) == 255);
    CHECK(img(1, 0, 1) == 255);
    CHECK(img(2, 0, 2) == 255);
    CHECK(encode_image(img) == bytes);

    testing_support::TempDir dir;
    write_image(dir / "x.ppm", img);
    CHECK(read_file(dir / "x.ppm") == bytes);
    CHECK(read_image(dir / "x.ppm") == img);
}

TEST_CASE("every encoding round-trips for random images") {
    std::mt19937 rng(1);
    std::uniform_int_distribution<int> dim(1, 9);
    std::uniform_int_distribution<int> sample(0, 255);
    for (int trial = 0; trial < 40; ++trial) {
        ImageBuffer img(dim(rng), dim(rng), trial % 2 ? 3 : 1);
        for (auto& v : img.data()) v = static_cast<std::uint8_t>(sample(rng));
        for (auto enc : {PnmEncoding::Binary, PnmEncoding::Ascii}) {
            const std::string bytes = encode_image(img, enc);
            CHECK(decode_image(bytes) == img);
            CHECK(encode_image(decode_image(bytes), enc) == bytes);
        }
    }
}

TEST_CASE("image reader errors") {
    CHECK(code_of([] { decode_image("P5\n4 4\n255\n12345678"); }) == ErrorCode::Truncated);
    CHECK(code_of([] { decode_image("P2 2 2 255 1 2 3"); }) == ErrorCode::Truncated);
    CHECK(code_of([] { decode_image("P5\n1 1\n65535\n\x01\x02"); }) == ErrorCode::Unsupported);
    CHECK(code_of([] { decode_image("P4\n1 1\n"); }) == ErrorCode::Unsupported);
    CHECK(code_of([] { decode_image("Q5\n1 1\n255\n"); }) == ErrorCode::Parse);
    CHECK(code_of([] { decode_image("P5\nx 1\n255\n"); }) == ErrorCode::Parse);
    CHECK(code_of([] { decode_image("P5\n0 1\n255\n"); }) == ErrorCode::Parse);
    CHECK(code_of([] { decode_image("P2 1 1 255 300"); }) == ErrorCode::Parse);
    CHECK(code_of([] { read_image("/nonexistent/file.ppm"); }) == ErrorCode::Io);
}

TEST_CASE("depth maps") {
    SUBCASE("uniform 600 mm is 60 cm") {
        DepthMap d(3, 2, std::vector<double>(6, 60.0));
        const std::string bytes = encode_depth(d);
        CHECK(bytes.substr(0, 13) == "P5\n3 2\n65535\n");
        CHECK(static_cast<unsigned char>(bytes[13]) == 0x02);  // 600 = 0x0258 big-endian
        CHECK(static_cast<unsigned char>(bytes[14]) == 0x58);
        const DepthMap back = decode_depth(bytes);
        for (double v : back.data()) CHECK(v == 60.0);
    }
    SUBCASE("zero is no reading; mixed values convert") {
        std::string bytes = "P5\n3 1\n65535\n";
        for (unsigned mm : {0u, 500u, 1200u}) {
            bytes.push_back(static_cast<char>(mm >> 8));
            bytes.push_back(static_cast<char>(mm & 0xFF));
        }
        const DepthMap d = decode_depth(bytes);
        CHECK(d(0, 0) == 0.0);
        CHECK_FALSE(d.has_reading(0, 0));
        CHECK(d(1, 0) == 50.0);
        CHECK(d(2, 0) == 120.0);
        CHECK(encode_depth(d) == bytes);
    }
    SUBCASE("errors") {
        CHECK(code_of([] { decode_depth("P5\n1 1\n255\n\x01"); }) == ErrorCode::Unsupported);
        CHECK(code_of([] { decode_depth("P5\n2 1\n65535\n\x01\x02\x03"); }) == ErrorCode::Truncated);
    }
    SUBCASE("round trip for 0.1 cm steps") {
        std::mt19937 rng(2);
        std::uniform_int_distribution<int> mm(0, 65535);
        std::vector<double> cm(50);
        for (auto& v : cm) v = mm(rng) / 10.0;
        const DepthMap d(10, 5, cm);
        testing_support::TempDir dir;
        write_depth(dir / "d.pgm", d);
        CHECK(read_depth(dir / "d.pgm") == d);
    }
}

TEST_CASE("manifest parsing") {
    const std::string minimal = R"({"image": "scene.ppm", "depth": "scene_depth.pgm", "fruits": [
        {"id": 1, "box": [0, 0, 10, 10], "confidence": 0.9, "body": [5, 6], "carpopodium": [5, 2],
         "pred_polygon": [[1, 1], [9, 1], [5, 9]], "gt_polygon": null}]})";

    SUBCASE("minimal one-fruit manifest") {
        const SceneManifest m = parse_manifest(minimal, "/data");
        CHECK(m.image == std::filesystem::path("/data/scene.ppm"));
        REQUIRE(m.fruits.size() == 1);
        CHECK(m.fruits[0].pred_polygon.size() == 3);
        CHECK(m.fruits[0].carpopodium.has_value());
        CHECK_FALSE(m.fruits[0].gt_polygon.has_value());
    }
    SUBCASE("confidence out of range") {
        std::string bad = minimal;
        bad.replace(bad.find("0.9"), 3, "1.2");
        CHECK(code_of([&] { parse_manifest(bad); }) == ErrorCode::InvalidArgument);
    }
    SUBCASE("missing carpopodium marks pose unavailable") {
        const std::string no_carp = R"({"image": "a.ppm", "depth": "b.pgm", "fruits": [
            {"id": 3, "box": [0, 0, 4, 4], "confidence": 0.5, "body": [2, 2],
             "pred_polygon": [[0, 0], [4, 0], [4, 4]]}]})";
        const SceneManifest m = parse_manifest(no_carp);
        CHECK_FALSE(m.fruits[0].carpopodium.has_value());
    }
    SUBCASE("schema violations") {
        CHECK(code_of([] { parse_manifest("[]"); }) == ErrorCode::Parse);
        CHECK(code_of([] { parse_manifest("{not json"); }) == ErrorCode::Parse);
        CHECK(code_of([] { parse_manifest(R"({"image": "a", "depth": "b"})"); }) == ErrorCode::Parse);
        CHECK(code_of([] {
                  parse_manifest(R"({"image": "a", "depth": "b", "fruits": [{"id": 1, "box": [0,0,1],
                    "confidence": 0.5, "body": [0,0], "pred_polygon": [[0,0],[1,0],[0,1]]}]})");
              }) == ErrorCode::Parse);
    }
    SUBCASE("polygon with fewer than 3 vertices") {
        CHECK(code_of([] {
                  parse_manifest(R"({"image": "a", "depth": "b", "fruits": [{"id": 1, "box": [0,0,1,1],
                    "confidence": 0.5, "body": [0,0], "pred_polygon": [[0,0],[1,0]]}]})");
              }) == ErrorCode::Degenerate);
    }
    SUBCASE("box outside the image") {
        const SceneManifest m = parse_manifest(minimal);
        CHECK_NOTHROW(validate_bounds(m, 10, 10));
        CHECK(code_of([&] { validate_bounds(m, 8, 10); }) == ErrorCode::OutOfBounds);

        testing_support::TempDir dir;
        write_image(dir / "scene.ppm", ImageBuffer(8, 8, 3));
        write_file(dir / "m.json", minimal);
        CHECK(code_of([&] { read_manifest(dir / "m.json"); }) == ErrorCode::OutOfBounds);
        write_image(dir / "scene.ppm", ImageBuffer(12, 12, 3));
        CHECK(read_manifest(dir / "m.json").fruits.size() == 1);
    }
    SUBCASE("duplicate ids") {
        CHECK(code_of([] {
                  parse_manifest(R"({"image": "a", "depth": "b", "fruits": [
                    {"id": 1, "box": [0,0,1,1], "confidence": 0.5, "body": [0,0], "pred_polygon": [[0,0],[1,0],[0,1]]},
                    {"id": 1, "box": [0,0,1,1], "confidence": 0.5, "body": [0,0], "pred_polygon": [[0,0],[1,0],[0,1]]}]})");
              }) == ErrorCode::Parse);
    }
}

TEST_CASE("calibration CSV and model file") {
    const auto s = parse_calibration_csv("depth_cm,pixels_per_cm\n20,50\n40,25\r\n100,10\n");
    REQUIRE(s.size() == 3);
    CHECK(s[1].depth_cm == 40.0);
    CHECK(s[2].pixels_per_cm == 10.0);
    CHECK(parse_calibration_csv(encode_calibration_csv(s)).size() == 3);

    try {
        parse_calibration_csv("depth_cm,pixels_per_cm\n20,50\n-4,25\n");
        FAIL("expected error");
    } catch (const Error& e) {
        CHECK(std::string(e.what()).find("line 3") != std::string::npos);
    }
    CHECK(code_of([] { parse_calibration_csv("depth_cm,pixels_per_cm\n"); }) == ErrorCode::InvalidArgument);
    CHECK(code_of([] { parse_calibration_csv("depth,px\n1,2\n"); }) == ErrorCode::Parse);

    CHECK(parse_calibration_model(encode_calibration_model(1026.3565891472867)) == 1026.3565891472867);
    CHECK(code_of([] { parse_calibration_model("k=-1"); }) == ErrorCode::InvalidArgument);
}

TEST_CASE("bundled phenotype table") {
    const auto rows = load_bundled_phenotype_table();
    REQUIRE(rows.size() == 31);

    const auto& r7 = find_row(rows, 7, 1);
    CHECK(r7.width.truth == 2.610);
    CHECK(r7.width.predicted == 2.864);
    CHECK(r7.width.printed_error == 9.739);

    const auto& r2 = find_row(rows, 2, 2);
    CHECK(r2.area.truth == 5.25);
    CHECK(r2.area.predicted == 4.019);
    CHECK(r2.area.printed_error == -23.450);

    const auto& r31 = find_row(rows, 31, 1);
    CHECK(r31.volume.truth == 19.0);
    CHECK(r31.volume.predicted == 26.551);
    CHECK(r31.volume.printed_error == 39.740);

    for (const auto& r : rows) {
        for (const auto* t : {&r.width, &r.height, &r.area, &r.volume}) {
            CHECK(t->truth > 0.0);
            CHECK(t->predicted > 0.0);
            CHECK(std::abs(t->printed_error - 100.0 * (t->predicted - t->truth) / t->truth) < 0.05);
        }
    }

    CHECK(bundled_phenotype_csv().substr(0, kPhenotypeCsvHeader.size()) == kPhenotypeCsvHeader);
}

TEST_CASE("phenotype CSV errors") {
    CHECK(code_of([] { parse_phenotype_csv("plant,fruit\n"); }) == ErrorCode::Parse);
    const std::string header(kPhenotypeCsvHeader);
    CHECK(code_of([&] { parse_phenotype_csv(header + "\n1,1,2\n"); }) == ErrorCode::Parse);
    CHECK(code_of([&] { parse_phenotype_csv(header + "\n1,1,0,1,1,1,1,1,1,1,1,1,1,1\n"); }) ==
          ErrorCode::InvalidArgument);
    CHECK(code_of([&] { parse_phenotype_csv(header + "\n1,1,abc,1,1,1,1,1,1,1,1,1,1,1\n"); }) == ErrorCode::Parse);
}
