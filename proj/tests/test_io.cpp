#define DOCTEST_CONFIG_IMPLEMENT_WITH_MAIN
#include "doctest.h"

#include <filesystem>
#include <random>

#include "stent/io.hpp"
#include "stent/rng.hpp"
#include "stent/simulate.hpp"

using namespace stent;
namespace fs = std::filesystem;

namespace {

struct TempDir {
  fs::path path;
  TempDir() {
    path = fs::temp_directory_path() /
           ("stent_io_test_" + std::to_string(rng::Stream(std::random_device{}()).next_u64()));
    fs::create_directories(path);
  }
  ~TempDir() { fs::remove_all(path); }
  std::string file(const std::string& name) const { return (path / name).string(); }
};

}  // namespace

TEST_CASE("pgm round trip is bit exact") {
  TempDir tmp;
  GrayFrame f;
  f.width = 37;
  f.height = 23;
  f.pixels.resize(static_cast<std::size_t>(37) * 23);
  rng::Stream s(4);
  for (auto& p : f.pixels) p = static_cast<std::uint8_t>(s.below(256));
  io::write_pgm(tmp.file("a.pgm"), f);
  const GrayFrame back = io::read_pgm(tmp.file("a.pgm"));
  CHECK(back.width == f.width);
  CHECK(back.height == f.height);
  CHECK(back.pixels == f.pixels);

  CHECK_THROWS(io::read_pgm(tmp.file("missing.pgm")));
  io::write_text_file(tmp.file("bad.pgm"), "P2\n1 1\n255\n0\n");
  CHECK_THROWS(io::read_pgm(tmp.file("bad.pgm")));
}

TEST_CASE("frame directories render back in order") {
  TempDir tmp;
  SimConfig c;
  c.frames = 4;
  c.noise_sigma = 5.0;
  c.seed = 17;
  auto [seq, gt] = simulate_sequence(c);
  (void)gt;
  io::write_frames(tmp.file("frames"), seq);
  const Sequence back = io::read_frames(tmp.file("frames"));
  REQUIRE(back.frames.size() == seq.frames.size());
  for (std::size_t t = 0; t < seq.frames.size(); ++t)
    CHECK(back.frames[t].pixels == seq.frames[t].pixels);
}

TEST_CASE("ground truth json lines round trip exactly") {
  TempDir tmp;
  GroundTruth gt;
  gt.frames.push_back({true, {12.125, 44.5}, {80.0625, 10.33333333333333}});
  gt.frames.push_back({false, {}, {}});
  gt.frames.push_back({true, {1.0 / 3.0, 2.0 / 7.0}, {5.5, 6.25}});
  io::write_ground_truth(tmp.file("gt.jsonl"), gt);
  const GroundTruth back = io::read_ground_truth(tmp.file("gt.jsonl"));
  REQUIRE(back.frames.size() == 3);
  CHECK(back.frames[0].present);
  CHECK_FALSE(back.frames[1].present);
  CHECK(back.frames[0].m1.x == gt.frames[0].m1.x);
  CHECK(back.frames[2].m1.x == gt.frames[2].m1.x);  // bit-exact doubles
  CHECK(back.frames[2].m1.y == gt.frames[2].m1.y);
}

TEST_CASE("detection json lines round trip exactly") {
  TempDir tmp;
  std::vector<std::vector<LandmarkDetection>> dets(3);
  rng::Stream s(9);
  for (int t = 0; t < 3; ++t)
    for (int k = 0; k < t + 1; ++k) {
      LandmarkDetection d;
      d.position = {s.uniform(0, 100), s.uniform(0, 100)};
      d.score = s.uniform01();
      d.frame = t;
      dets[static_cast<std::size_t>(t)].push_back(d);
    }
  io::write_detections(tmp.file("d.jsonl"), dets);
  const auto back = io::read_detections(tmp.file("d.jsonl"));
  REQUIRE(back.size() == dets.size());
  for (std::size_t t = 0; t < dets.size(); ++t) {
    REQUIRE(back[t].size() == dets[t].size());
    for (std::size_t k = 0; k < dets[t].size(); ++k) {
      CHECK(back[t][k].position.x == dets[t][k].position.x);
      CHECK(back[t][k].score == dets[t][k].score);
    }
  }
}

TEST_CASE("track json lines round trip") {
  TempDir tmp;
  Track track;
  track.frames.resize(3);
  LandmarkDetection a, b;
  a.position = {10.5, 20.25};
  b.position = {50.125, 21.75};
  a.frame = b.frame = 0;
  track.frames[0].present = true;
  track.frames[0].candidate = make_candidate(a, b);
  track.frames[0].probability = 0.875;
  a.frame = b.frame = 2;
  track.frames[2].present = true;
  track.frames[2].candidate = make_candidate(a, b);
  track.frames[2].probability = 1.0 / 3.0;
  io::write_track(tmp.file("t.jsonl"), track);
  const Track back = io::read_track(tmp.file("t.jsonl"));
  REQUIRE(back.frames.size() == 3);
  CHECK(back.frames[0].present);
  CHECK_FALSE(back.frames[1].present);
  CHECK(back.frames[0].candidate.first.position.x == 10.5);
  CHECK(back.frames[2].probability == 1.0 / 3.0);
}

TEST_CASE("classifier parameter files restore bit-exact values") {
  TempDir tmp;
  MlpParams p = init_mlp_params(12, 5, 31);
  p.class_weights = {1.0, 7.5};
  p.b1[2] = 1.0 / 3.0;
  io::save_mlp(tmp.file("mlp.txt"), p);
  const MlpParams back = io::load_mlp(tmp.file("mlp.txt"));
  CHECK(back.input_dim == 12);
  CHECK(back.hidden_dim == 5);
  CHECK(back.class_weights[1] == 7.5);
  CHECK(back.w1.a == p.w1.a);
  CHECK(back.b1 == p.b1);
  CHECK(back.w2.a == p.w2.a);

  CHECK_THROWS_AS(io::parse_mlp_params("mlp v2\n1 1 2\n"), std::invalid_argument);
  CHECK_THROWS_AS(io::parse_mlp_params("mlp v1\n4 2 2\n1 5\n0.25"), std::invalid_argument);
}

TEST_CASE("text files surface io failures") {
  CHECK_THROWS(io::read_text_file("/nonexistent/path/file.txt"));
  CHECK_THROWS(io::write_text_file("/nonexistent/dir/file.txt", "x"));
}
