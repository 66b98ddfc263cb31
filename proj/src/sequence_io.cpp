#include "slipdet/sequence_io.hpp"

#include <algorithm>
#include <bit>
#include <cmath>
#include <cstring>
#include <fstream>

#include <json.hpp>

namespace slipdet::io {

namespace {

using json = nlohmann::json;

std::uint32_t to_le(std::uint32_t v) {
  if constexpr (std::endian::native == std::endian::big)
    v = ((v & 0xffu) << 24) | ((v & 0xff00u) << 8) | ((v >> 8) & 0xff00u) | (v >> 24);
  return v;
}

void put_float(std::string& buf, double value) {
  const auto f = static_cast<float>(value);
  std::uint32_t bits = to_le(std::bit_cast<std::uint32_t>(f));
  char raw[4];
  std::memcpy(raw, &bits, 4);
  buf.append(raw, 4);
}

double get_float(const char* p) {
  std::uint32_t bits;
  std::memcpy(&bits, p, 4);
  return static_cast<double>(std::bit_cast<float>(to_le(bits)));
}

struct FieldRef {
  int kind;  // 0 position, 1 displacement, 2 force, 3 mask
  int axis;
};

FieldRef field_ref(const std::string& name) {
  if (name == "contact_mask") return {3, 0};
  const auto us = name.find('_');
  if (us == std::string::npos || us + 2 != name.size()) throw LoadError(LoadError::Kind::Malformed, "bad field " + name);
  const std::string base = name.substr(0, us);
  const char ax = name.back();
  const int axis = ax == 'x' ? 0 : ax == 'y' ? 1 : ax == 'z' ? 2 : -1;
  const int kind = base == "pos" ? 0 : base == "disp" ? 1 : base == "force" ? 2 : -1;
  if (axis < 0 || kind < 0) throw LoadError(LoadError::Kind::Malformed, "unknown field " + name);
  return {kind, axis};
}

}  // namespace

SequenceHeader make_header(const std::vector<DeformationFrame>& frames, std::size_t rows, std::size_t cols,
                           double frame_rate_hz) {
  SequenceHeader h;
  h.rows = rows;
  h.cols = cols;
  h.frame_rate_hz = frame_rate_hz;
  h.frame_count = frames.size();
  h.fields = {"pos_x", "pos_y", "pos_z", "disp_x", "disp_y", "disp_z"};
  if (!frames.empty() && frames.front().has_forces())
    h.fields.insert(h.fields.end(), {"force_x", "force_y", "force_z"});
  if (!frames.empty() && frames.front().has_contact_mask()) h.fields.push_back("contact_mask");
  return h;
}

void write_sequence(const std::filesystem::path& header_path, const Sequence& seq) {
  SequenceHeader h = seq.header;
  if (h.version != kFormatVersion) throw FormatError("unsupported format version");
  if (!(h.frame_rate_hz > 0.0)) throw FormatError("frame rate must be positive");
  if (h.frame_count != seq.frames.size()) throw FormatError("header frame count differs from frames");
  if (h.payload.empty()) h.payload = header_path.stem().string() + ".bin";

  std::vector<FieldRef> refs;
  for (const auto& f : h.fields) refs.push_back(field_ref(f));
  std::string buf;
  buf.reserve(h.payload_bytes());
  for (const auto& fr : seq.frames) {
    if (!fr.positions.same_shape(h.rows, h.cols) || !fr.displacements.same_shape(h.rows, h.cols))
      throw FormatError("frame grid differs from header");
    for (const auto& r : refs) {
      if (r.kind == 2 && !fr.forces.same_shape(h.rows, h.cols)) throw FormatError("frame lacks force field");
      if (r.kind == 3 && !fr.contact.same_shape(h.rows, h.cols)) throw FormatError("frame lacks contact mask");
      for (std::size_t k = 0; k < h.rows * h.cols; ++k) {
        switch (r.kind) {
          case 0: put_float(buf, fr.positions.data[k][r.axis]); break;
          case 1: put_float(buf, fr.displacements.data[k][r.axis]); break;
          case 2: put_float(buf, fr.forces.data[k][r.axis]); break;
          default: put_float(buf, fr.contact.data[k] ? 1.0 : 0.0); break;
        }
      }
    }
  }

  json j;
  j["format"] = "slipdet-sequence";
  j["version"] = h.version;
  j["rows"] = h.rows;
  j["cols"] = h.cols;
  j["frame_rate_hz"] = h.frame_rate_hz;
  j["frame_count"] = h.frame_count;
  j["fields"] = h.fields;
  j["units"] = {{"length", h.length_unit}, {"force", h.force_unit}};
  j["payload"] = h.payload;

  const auto payload_path = header_path.parent_path() / h.payload;
  {
    std::ofstream out(payload_path, std::ios::binary | std::ios::trunc);
    if (!out) throw FormatError("cannot write " + payload_path.string());
    out.write(buf.data(), static_cast<std::streamsize>(buf.size()));
  }
  std::ofstream out(header_path, std::ios::trunc);
  if (!out) throw FormatError("cannot write " + header_path.string());
  out << j.dump(2) << "\n";
}

Sequence read_sequence(const std::filesystem::path& header_path) {
  std::ifstream in(header_path);
  if (!in) throw LoadError(LoadError::Kind::Malformed, "cannot open " + header_path.string());
  json j;
  try {
    j = json::parse(in);
  } catch (const json::exception& e) {
    throw LoadError(LoadError::Kind::Malformed, std::string("header is not valid JSON: ") + e.what());
  }
  Sequence seq;
  auto& h = seq.header;
  try {
    h.version = j.at("version").get<int>();
    if (h.version != kFormatVersion)
      throw LoadError(LoadError::Kind::VersionMismatch, "version mismatch: file has " + std::to_string(h.version));
    h.rows = j.at("rows").get<std::size_t>();
    h.cols = j.at("cols").get<std::size_t>();
    h.frame_rate_hz = j.at("frame_rate_hz").get<double>();
    h.frame_count = j.at("frame_count").get<std::size_t>();
    h.fields = j.at("fields").get<std::vector<std::string>>();
    h.payload = j.at("payload").get<std::string>();
    if (j.contains("units")) {
      h.length_unit = j["units"].value("length", h.length_unit);
      h.force_unit = j["units"].value("force", h.force_unit);
    }
  } catch (const json::exception& e) {
    throw LoadError(LoadError::Kind::Malformed, std::string("header field error: ") + e.what());
  }
  if (!(h.frame_rate_hz > 0.0)) throw LoadError(LoadError::Kind::Malformed, "frame rate must be positive");
  for (const char* req : {"pos_x", "pos_y", "pos_z", "disp_x", "disp_y", "disp_z"})
    if (std::find(h.fields.begin(), h.fields.end(), req) == h.fields.end())
      throw LoadError(LoadError::Kind::Malformed, std::string("missing field ") + req);
  std::vector<FieldRef> refs;
  for (const auto& f : h.fields) refs.push_back(field_ref(f));

  const auto payload_path = header_path.parent_path() / h.payload;
  std::ifstream pin(payload_path, std::ios::binary);
  if (!pin) throw LoadError(LoadError::Kind::TruncatedPayload, "missing payload " + payload_path.string());
  std::string buf((std::istreambuf_iterator<char>(pin)), std::istreambuf_iterator<char>());
  if (buf.size() != h.payload_bytes())
    throw LoadError(LoadError::Kind::TruncatedPayload, "payload has " + std::to_string(buf.size()) +
                                                           " bytes, expected " + std::to_string(h.payload_bytes()));

  bool has_force = false, has_mask = false;
  for (const auto& r : refs) {
    has_force = has_force || r.kind == 2;
    has_mask = has_mask || r.kind == 3;
  }
  const std::size_t nm = h.rows * h.cols;
  const char* p = buf.data();
  for (std::size_t t = 0; t < h.frame_count; ++t) {
    DeformationFrame fr;
    fr.t = static_cast<double>(t) / h.frame_rate_hz;
    fr.positions = Grid<Vec3>(h.rows, h.cols, Vec3{0, 0, 0});
    fr.displacements = Grid<Vec3>(h.rows, h.cols, Vec3{0, 0, 0});
    if (has_force) fr.forces = Grid<Vec3>(h.rows, h.cols, Vec3{0, 0, 0});
    if (has_mask) fr.contact = Grid<unsigned char>(h.rows, h.cols, 0);
    for (const auto& r : refs) {
      for (std::size_t k = 0; k < nm; ++k, p += 4) {
        const double v = get_float(p);
        switch (r.kind) {
          case 0:
            if (std::isnan(v))
              throw LoadError(LoadError::Kind::NanPosition, "NaN position in frame " + std::to_string(t));
            fr.positions.data[k][r.axis] = v;
            break;
          case 1: fr.displacements.data[k][r.axis] = v; break;
          case 2: fr.forces.data[k][r.axis] = v; break;
          default: fr.contact.data[k] = v != 0.0; break;
        }
      }
    }
    seq.frames.push_back(std::move(fr));
  }
  return seq;
}

}  // namespace slipdet::io
