#include <doctest.h>

#include <filesystem>
#include <fstream>
#include <functional>
#include <random>

#include "helpers.hpp"
#include "viewagg/ingest.hpp"

using namespace viewagg;
using viewagg::testing::make_record;
namespace fs = std::filesystem;

namespace {

struct TempDir {
    fs::path path;
    TempDir() {
        path = fs::temp_directory_path() /
               ("viewagg_test_" + std::to_string(std::random_device{}()));
        fs::create_directories(path);
    }
    ~TempDir() {
        std::error_code ec;
        fs::remove_all(path, ec);
    }
    std::string file(const std::string& name) const { return (path / name).string(); }
};

void write_text(const std::string& path, const std::string& text) {
    std::ofstream out(path);
    out << text;
}

ErrorKind kind_of(const std::function<void()>& fn) {
    try {
        fn();
    } catch (const Error& e) {
        return e.kind();
    }
    FAIL("expected a viewagg::Error");
    return ErrorKind::IoFailure;
}

}  // namespace

TEST_CASE("read_predictions maps rows to records") {
    TempDir dir;
    const std::string path = dir.file("p.csv");
    write_text(path,
               "image_id,study_id,view,Atelectasis\n"
               "i1,s1,frontal,0.25\n"
               "i2,s1,Lateral,0.75\n");
    auto [classes, records] = read_predictions(path);
    REQUIRE(classes == std::vector<std::string>{"Atelectasis"});
    REQUIRE(records.size() == 2);
    CHECK(records[0].image_id == "i1");
    CHECK(records[0].study_id == "s1");
    CHECK(records[0].view == ViewKind::Frontal);
    CHECK(records[0].scores == std::vector<double>{0.25});
    CHECK(records[1].view == ViewKind::Lateral);
}

TEST_CASE("read_predictions error paths") {
    TempDir dir;
    const std::string path = dir.file("p.csv");

    write_text(path, "id,study_id,view,A\ni1,s1,frontal,0.2\n");
    CHECK(kind_of([&] { read_predictions(path); }) == ErrorKind::MalformedHeader);

    write_text(path, "image_id,study_id,view,A\ni1,s1,frontal\n");
    CHECK(kind_of([&] { read_predictions(path); }) == ErrorKind::RowArity);

    write_text(path, "image_id,study_id,view,A\ni1,s1,frontal,zero\n");
    CHECK(kind_of([&] { read_predictions(path); }) == ErrorKind::UnparsableScore);

    write_text(path, "image_id,study_id,view,A\ni1,s1,oblique,0.2\n");
    CHECK(kind_of([&] { read_predictions(path); }) == ErrorKind::UnknownView);

    CHECK(kind_of([&] { read_predictions(dir.file("absent.csv")); }) == ErrorKind::IoFailure);
}

TEST_CASE("read_labels parses binary rows and rejects the rest") {
    TempDir dir;
    const std::string path = dir.file("l.csv");
    write_text(path, "study_id,A,B\ns1,1,0\ns2,0,1\n");
    LabelTable table = read_labels(path);
    CHECK(table.class_names == std::vector<std::string>{"A", "B"});
    CHECK(table.rows.at("s1") == std::vector<std::uint8_t>{1, 0});
    CHECK(table.rows.at("s2") == std::vector<std::uint8_t>{0, 1});

    write_text(path, "study_id,A\ns1,0.5\n");
    CHECK(kind_of([&] { read_labels(path); }) == ErrorKind::NonBinaryLabel);

    write_text(path, "study_id,A\ns1,1\ns1,0\n");
    CHECK(kind_of([&] { read_labels(path); }) == ErrorKind::DuplicateStudyId);
}

TEST_CASE("write_study_predictions emits shortest round-trip scores") {
    TempDir dir;
    const std::string path = dir.file("out.csv");
    write_study_predictions(path, {"A"}, {{"s1", {0.68}}});
    std::ifstream in(path);
    std::string header, body;
    std::getline(in, header);
    std::getline(in, body);
    CHECK(header == "study_id,A");
    CHECK(body == "s1,0.68");
}

TEST_CASE("write_study_predictions with no rows emits header only") {
    TempDir dir;
    const std::string path = dir.file("out.csv");
    write_study_predictions(path, {"A", "B"}, {});
    std::ifstream in(path);
    std::string header, rest;
    std::getline(in, header);
    CHECK(header == "study_id,A,B");
    CHECK_FALSE(std::getline(in, rest));
}

TEST_CASE("write_study_predictions rejects length mismatch before writing") {
    TempDir dir;
    const std::string path = dir.file("out.csv");
    CHECK(kind_of([&] {
              write_study_predictions(path, {"A", "B"}, {{"s1", {0.5}}});
          }) == ErrorKind::ClassCountMismatch);
    CHECK_FALSE(fs::exists(path));
}

TEST_CASE("study prediction write/read round-trip is bit-identical") {
    TempDir dir;
    const std::string path = dir.file("rt.csv");
    std::mt19937_64 rng(3);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<StudyPrediction> rows;
    for (int i = 0; i < 50; ++i) {
        StudyPrediction p;
        p.study_id = "s" + std::to_string(i);
        for (int c = 0; c < 7; ++c) p.p_final.push_back(unit(rng));
        rows.push_back(std::move(p));
    }
    std::vector<std::string> classes;
    for (int c = 0; c < 7; ++c) classes.push_back("c" + std::to_string(c));

    write_study_predictions(path, classes, rows);
    auto [classes_back, rows_back] = read_study_predictions(path);
    CHECK(classes_back == classes);
    REQUIRE(rows_back.size() == rows.size());
    for (std::size_t i = 0; i < rows.size(); ++i) {
        CHECK(rows_back[i].study_id == rows[i].study_id);
        CHECK(rows_back[i].p_final == rows[i].p_final);
    }
}

TEST_CASE("image prediction write/read round-trip is bit-identical") {
    TempDir dir;
    const std::string path = dir.file("rt.csv");
    std::mt19937_64 rng(4);
    std::uniform_real_distribution<double> unit(0.0, 1.0);
    std::vector<PredictionRecord> records;
    for (int i = 0; i < 40; ++i) {
        records.push_back(make_record("i" + std::to_string(i), "s" + std::to_string(i / 3),
                                      i % 2 ? ViewKind::Lateral : ViewKind::Frontal,
                                      {unit(rng), unit(rng), unit(rng)}));
    }
    write_predictions(path, {"A", "B", "C"}, records);
    auto [classes, back] = read_predictions(path);
    REQUIRE(back.size() == records.size());
    for (std::size_t i = 0; i < records.size(); ++i) {
        CHECK(back[i].image_id == records[i].image_id);
        CHECK(back[i].study_id == records[i].study_id);
        CHECK(back[i].view == records[i].view);
        CHECK(back[i].scores == records[i].scores);
    }
}
