#include "streetscope/detections.hpp"

#include <fstream>

#include <nlohmann/json.hpp>

#include "streetscope/errors.hpp"
#include "streetscope/timeutil.hpp"

namespace streetscope {

namespace {

using json = nlohmann::ordered_json;

}  // namespace

const char* to_string(DetectionClass c) {
  switch (c) {
    case DetectionClass::person: return "person";
    case DetectionClass::car: return "car";
    case DetectionClass::bus: return "bus";
    case DetectionClass::motorbike: return "motorbike";
    case DetectionClass::bicycle: return "bicycle";
    case DetectionClass::truck: return "truck";
  }
  return "person";
}

DetectionClass detection_class_from_string(const std::string& s) {
  if (s == "person") return DetectionClass::person;
  if (s == "car") return DetectionClass::car;
  if (s == "bus") return DetectionClass::bus;
  if (s == "motorbike") return DetectionClass::motorbike;
  if (s == "bicycle") return DetectionClass::bicycle;
  if (s == "truck") return DetectionClass::truck;
  throw SchemaError("unknown detection class \"" + s + "\"", -1);
}

void ingest_detections(const std::string& path,
                       const std::function<void(FrameDetections&&)>& sink) {
  std::ifstream in(path);
  if (!in) throw IoError("cannot open " + path);
  std::string line;
  long line_no = 0;
  std::int64_t last_ts = INT64_MIN;
  std::string current_clip;
  while (std::getline(in, line)) {
    ++line_no;
    if (line.empty()) continue;
    json j;
    try {
      j = json::parse(line);
    } catch (const json::exception& e) {
      throw SchemaError("line " + std::to_string(line_no) +
                            ": malformed JSON: " + e.what(),
                        line_no);
    }
    try {
      FrameDetections frame;
      frame.camera_id = j.at("camera_id").get<std::string>();
      frame.clip_id = j.at("clip_id").get<std::string>();
      frame.frame_index = j.at("frame_index").get<std::int64_t>();
      if (frame.frame_index < 0)
        throw SchemaError("line " + std::to_string(line_no) +
                              ": negative frame_index",
                          line_no);
      frame.timestamp = parse_rfc3339(j.at("timestamp").get<std::string>());
      if (frame.clip_id == current_clip && frame.timestamp < last_ts)
        throw SchemaError("line " + std::to_string(line_no) +
                              ": timestamps decrease within clip",
                          line_no);
      current_clip = frame.clip_id;
      last_ts = frame.timestamp;
      for (const auto& dj : j.at("detections")) {
        Detection d;
        d.cls = detection_class_from_string(dj.at("class").get<std::string>());
        d.confidence = dj.at("confidence").get<double>();
        if (d.confidence < 0.0 || d.confidence > 1.0)
          throw SchemaError("line " + std::to_string(line_no) +
                                ": confidence outside [0, 1]",
                            line_no);
        const auto& bb = dj.at("bbox");
        if (!bb.is_array() || bb.size() != 4)
          throw SchemaError("line " + std::to_string(line_no) +
                                ": bbox must be [x, y, w, h]",
                            line_no);
        d.x = bb[0].get<double>();
        d.y = bb[1].get<double>();
        d.w = bb[2].get<double>();
        d.h = bb[3].get<double>();
        if (!(d.w > 0.0) || !(d.h > 0.0))
          throw SchemaError("line " + std::to_string(line_no) +
                                ": bbox w, h must be positive",
                            line_no);
        frame.detections.push_back(d);
      }
      sink(std::move(frame));
    } catch (const SchemaError&) {
      throw;
    } catch (const json::exception& e) {
      throw SchemaError(
          "line " + std::to_string(line_no) + ": " + e.what(), line_no);
    } catch (const IoError& e) {
      throw SchemaError(
          "line " + std::to_string(line_no) + ": " + e.what(), line_no);
    }
  }
}

std::vector<FrameDetections> load_detections(const std::string& path) {
  std::vector<FrameDetections> frames;
  ingest_detections(path, [&](FrameDetections&& f) {
    frames.push_back(std::move(f));
  });
  return frames;
}

std::string to_jsonl_line(const FrameDetections& frame) {
  json j;
  j["camera_id"] = frame.camera_id;
  j["clip_id"] = frame.clip_id;
  j["frame_index"] = frame.frame_index;
  j["timestamp"] = format_rfc3339(frame.timestamp);
  json dets = json::array();
  for (const auto& d : frame.detections) {
    json dj;
    dj["class"] = to_string(d.cls);
    dj["confidence"] = d.confidence;
    dj["bbox"] = {d.x, d.y, d.w, d.h};
    dets.push_back(dj);
  }
  j["detections"] = dets;
  return j.dump();
}

void write_detections(const std::vector<FrameDetections>& frames,
                      const std::string& path) {
  std::ofstream out(path, std::ios::trunc);
  if (!out) throw IoError("cannot write " + path);
  for (const auto& f : frames) out << to_jsonl_line(f) << '\n';
}

}  // namespace streetscope
