#include "stent/io.hpp"

#include <algorithm>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <sstream>
#include <stdexcept>

#include "json.hpp"
#include "stent/gcn.hpp"

namespace stent::io {

namespace fs = std::filesystem;
using nlohmann::json;

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  std::ostringstream os;
  os << in.rdbuf();
  return os.str();
}

void write_text_file(const std::string& path, const std::string& content) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << content;
  if (!out) throw std::runtime_error("write failed: " + path);
}

void write_pgm(const std::string& path, const GrayFrame& frame) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open for writing: " + path);
  out << "P5\n" << frame.width << " " << frame.height << "\n255\n";
  out.write(reinterpret_cast<const char*>(frame.pixels.data()),
            static_cast<std::streamsize>(frame.pixels.size()));
  if (!out) throw std::runtime_error("write failed: " + path);
}

namespace {

int next_pgm_token(std::istream& in) {
  // skip whitespace and '#' comments
  int c = in.get();
  while (c != EOF) {
    if (c == '#') {
      while (c != EOF && c != '\n') c = in.get();
    } else if (!std::isspace(c)) {
      break;
    }
    c = in.get();
  }
  if (c == EOF) throw std::runtime_error("pgm: truncated header");
  int value = 0;
  while (c != EOF && std::isdigit(c)) {
    value = value * 10 + (c - '0');
    c = in.get();
  }
  return value;
}

}  // namespace

GrayFrame read_pgm(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open for reading: " + path);
  char magic[2];
  in.read(magic, 2);
  if (!in || magic[0] != 'P' || magic[1] != '5')
    throw std::runtime_error("pgm: not a P5 file: " + path);
  GrayFrame frame;
  frame.width = next_pgm_token(in);
  frame.height = next_pgm_token(in);
  const int maxval = next_pgm_token(in);
  if (maxval != 255) throw std::runtime_error("pgm: only maxval 255 supported: " + path);
  if (frame.width <= 0 || frame.height <= 0) throw std::runtime_error("pgm: bad dimensions: " + path);
  frame.pixels.resize(static_cast<std::size_t>(frame.width) * frame.height);
  in.read(reinterpret_cast<char*>(frame.pixels.data()),
          static_cast<std::streamsize>(frame.pixels.size()));
  if (!in) throw std::runtime_error("pgm: truncated pixel data: " + path);
  return frame;
}

void write_frames(const std::string& dir, const Sequence& seq) {
  fs::create_directories(dir);
  char name[32];
  for (std::size_t t = 0; t < seq.frames.size(); ++t) {
    std::snprintf(name, sizeof(name), "frame_%06zu.pgm", t);
    write_pgm((fs::path(dir) / name).string(), seq.frames[t]);
  }
}

Sequence read_frames(const std::string& dir) {
  std::vector<std::string> paths;
  if (!fs::is_directory(dir)) throw std::runtime_error("not a directory: " + dir);
  for (const auto& entry : fs::directory_iterator(dir))
    if (entry.path().extension() == ".pgm") paths.push_back(entry.path().string());
  std::sort(paths.begin(), paths.end());
  Sequence seq;
  for (const std::string& p : paths) seq.frames.push_back(read_pgm(p));
  return seq;
}

void write_ground_truth(const std::string& path, const GroundTruth& gt) {
  std::ostringstream os;
  for (std::size_t t = 0; t < gt.frames.size(); ++t) {
    json j;
    j["frame"] = static_cast<int>(t);
    j["present"] = gt.frames[t].present;
    if (gt.frames[t].present) {
      j["markers"] = {{gt.frames[t].m1.x, gt.frames[t].m1.y},
                      {gt.frames[t].m2.x, gt.frames[t].m2.y}};
    }
    os << j.dump() << "\n";
  }
  write_text_file(path, os.str());
}

GroundTruth read_ground_truth(const std::string& path) {
  GroundTruth gt;
  std::istringstream in(read_text_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    const int frame = j.at("frame").get<int>();
    if (frame >= static_cast<int>(gt.frames.size()))
      gt.frames.resize(static_cast<std::size_t>(frame) + 1);
    GroundTruth::Entry& e = gt.frames[static_cast<std::size_t>(frame)];
    e.present = j.at("present").get<bool>();
    if (e.present) {
      const auto& m = j.at("markers");
      e.m1 = {m[0][0].get<double>(), m[0][1].get<double>()};
      e.m2 = {m[1][0].get<double>(), m[1][1].get<double>()};
    }
  }
  return gt;
}

void write_detections(const std::string& path,
                      const std::vector<std::vector<LandmarkDetection>>& detections) {
  std::ostringstream os;
  for (std::size_t t = 0; t < detections.size(); ++t) {
    for (const LandmarkDetection& d : detections[t]) {
      json j;
      j["frame"] = static_cast<int>(t);
      j["x"] = d.position.x;
      j["y"] = d.position.y;
      j["score"] = d.score;
      os << j.dump() << "\n";
    }
  }
  write_text_file(path, os.str());
}

std::vector<std::vector<LandmarkDetection>> read_detections(const std::string& path,
                                                            int num_frames) {
  std::vector<std::vector<LandmarkDetection>> out;
  if (num_frames > 0) out.resize(static_cast<std::size_t>(num_frames));
  std::istringstream in(read_text_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    LandmarkDetection d;
    d.frame = j.at("frame").get<int>();
    d.position = {j.at("x").get<double>(), j.at("y").get<double>()};
    d.score = j.at("score").get<double>();
    if (d.frame >= static_cast<int>(out.size())) out.resize(static_cast<std::size_t>(d.frame) + 1);
    out[static_cast<std::size_t>(d.frame)].push_back(d);
  }
  return out;
}

void write_track(const std::string& path, const Track& track) {
  std::ostringstream os;
  for (std::size_t t = 0; t < track.frames.size(); ++t) {
    json j;
    j["frame"] = static_cast<int>(t);
    const Track::Entry& e = track.frames[t];
    if (e.present) {
      j["m1"] = {e.candidate.first.position.x, e.candidate.first.position.y};
      j["m2"] = {e.candidate.second.position.x, e.candidate.second.position.y};
      j["prob"] = e.probability;
    } else {
      j["none"] = true;
    }
    os << j.dump() << "\n";
  }
  write_text_file(path, os.str());
}

Track read_track(const std::string& path) {
  Track track;
  std::istringstream in(read_text_file(path));
  std::string line;
  while (std::getline(in, line)) {
    if (line.empty()) continue;
    const json j = json::parse(line);
    const int frame = j.at("frame").get<int>();
    if (frame >= static_cast<int>(track.frames.size()))
      track.frames.resize(static_cast<std::size_t>(frame) + 1);
    Track::Entry& e = track.frames[static_cast<std::size_t>(frame)];
    if (j.contains("none") && j.at("none").get<bool>()) {
      e.present = false;
      continue;
    }
    LandmarkDetection a, b;
    a.position = {j.at("m1")[0].get<double>(), j.at("m1")[1].get<double>()};
    b.position = {j.at("m2")[0].get<double>(), j.at("m2")[1].get<double>()};
    a.frame = b.frame = frame;
    e.present = true;
    e.candidate = make_candidate(a, b);
    e.probability = j.at("prob").get<double>();
    e.candidate.score = e.probability;
  }
  return track;
}

namespace {

void write_block(std::ostream& os, const std::vector<double>& values) {
  os.precision(17);
  for (std::size_t i = 0; i < values.size(); ++i)
    os << values[i] << (i + 1 == values.size() ? "\n" : " ");
  if (values.empty()) os << "\n";
}

}  // namespace

std::string format_mlp_params(const MlpParams& p) {
  std::ostringstream os;
  os << "mlp v1\n";
  os << p.input_dim << " " << p.hidden_dim << " 2\n";
  os.precision(17);
  os << p.class_weights[0] << " " << p.class_weights[1] << "\n";
  write_block(os, p.w1.a);
  write_block(os, p.b1);
  write_block(os, p.w2.a);
  write_block(os, p.b2);
  return os.str();
}

MlpParams parse_mlp_params(const std::string& text) {
  std::istringstream is(text);
  std::string word, version;
  is >> word >> version;
  if (word != "mlp" || version != "v1")
    throw std::invalid_argument("parse_mlp_params: expected 'mlp v1' header");
  int input = 0, hidden = 0, outputs = 0;
  if (!(is >> input >> hidden >> outputs) || outputs != 2)
    throw std::invalid_argument("parse_mlp_params: bad dimension line");
  MlpParams p = init_mlp_params(input, hidden, 0);
  if (!(is >> p.class_weights[0] >> p.class_weights[1]))
    throw std::invalid_argument("parse_mlp_params: truncated class weights");
  auto read_all = [&](std::vector<double>& dst, const char* name) {
    for (double& v : dst)
      if (!(is >> v)) throw std::invalid_argument(std::string("parse_mlp_params: truncated ") + name);
  };
  read_all(p.w1.a, "w1");
  read_all(p.b1, "b1");
  read_all(p.w2.a, "w2");
  read_all(p.b2, "b2");
  return p;
}

void save_mlp(const std::string& path, const MlpParams& params) {
  write_text_file(path, format_mlp_params(params));
}

MlpParams load_mlp(const std::string& path) { return parse_mlp_params(read_text_file(path)); }

void save_gcn(const std::string& path, const GcnParams& params) {
  write_text_file(path, format_gcn_params(params));
}

GcnParams load_gcn(const std::string& path) { return parse_gcn_params(read_text_file(path)); }

}  // namespace stent::io
