#pragma once

#include <cstdint>
#include <functional>
#include <string>
#include <vector>

namespace streetscope {

enum class DetectionClass { person, car, bus, motorbike, bicycle, truck };

const char* to_string(DetectionClass c);
DetectionClass detection_class_from_string(const std::string& s);  // SchemaError

struct Detection {
  DetectionClass cls = DetectionClass::person;
  double confidence = 0;        // [0, 1]
  double x = 0, y = 0, w = 0, h = 0;  // bbox, pixels

  // Pixel anchor used for georeferencing: bottom-center of the box.
  double anchor_u() const { return x + w / 2.0; }
  double anchor_v() const { return y + h; }
};

struct FrameDetections {
  std::string camera_id;
  std::string clip_id;
  std::int64_t frame_index = 0;
  std::int64_t timestamp = 0;  // unix seconds (UTC)
  std::vector<Detection> detections;
};

// Streaming JSON Lines parse; schema violations throw SchemaError carrying
// the 1-based line number.
void ingest_detections(const std::string& path,
                       const std::function<void(FrameDetections&&)>& sink);
std::vector<FrameDetections> load_detections(const std::string& path);

std::string to_jsonl_line(const FrameDetections& frame);
void write_detections(const std::vector<FrameDetections>& frames,
                      const std::string& path);

}  // namespace streetscope
