#include "zpcc/ply.hpp"

#include <cmath>
#include <cstring>
#include <fstream>
#include <sstream>
#include <stdexcept>
#include <vector>

#include "zpcc/hierarchy.hpp"

namespace zpcc {

namespace {

enum class Scalar { i8, u8, i16, u16, i32, u32, f32, f64 };

std::optional<Scalar> parse_scalar(const std::string& s) {
  if (s == "char" || s == "int8") return Scalar::i8;
  if (s == "uchar" || s == "uint8") return Scalar::u8;
  if (s == "short" || s == "int16") return Scalar::i16;
  if (s == "ushort" || s == "uint16") return Scalar::u16;
  if (s == "int" || s == "int32") return Scalar::i32;
  if (s == "uint" || s == "uint32") return Scalar::u32;
  if (s == "float" || s == "float32") return Scalar::f32;
  if (s == "double" || s == "float64") return Scalar::f64;
  return std::nullopt;
}

std::size_t scalar_size(Scalar t) {
  switch (t) {
    case Scalar::i8:
    case Scalar::u8: return 1;
    case Scalar::i16:
    case Scalar::u16: return 2;
    case Scalar::i32:
    case Scalar::u32:
    case Scalar::f32: return 4;
    case Scalar::f64: return 8;
  }
  return 0;
}

double scalar_to_double(Scalar t, const uint8_t* p) {
  switch (t) {
    case Scalar::i8: return *reinterpret_cast<const int8_t*>(p);
    case Scalar::u8: return *p;
    case Scalar::i16: { int16_t v; std::memcpy(&v, p, 2); return v; }
    case Scalar::u16: { uint16_t v; std::memcpy(&v, p, 2); return v; }
    case Scalar::i32: { int32_t v; std::memcpy(&v, p, 4); return v; }
    case Scalar::u32: { uint32_t v; std::memcpy(&v, p, 4); return v; }
    case Scalar::f32: { float v; std::memcpy(&v, p, 4); return v; }
    case Scalar::f64: { double v; std::memcpy(&v, p, 8); return v; }
  }
  return 0.0;
}

struct Property {
  std::string name;
  Scalar type = Scalar::f32;
  bool is_list = false;
};

struct Element {
  std::string name;
  std::size_t count = 0;
  std::vector<Property> props;

  bool has_list() const {
    for (const auto& p : props)
      if (p.is_list) return true;
    return false;
  }
  std::size_t stride() const {
    std::size_t s = 0;
    for (const auto& p : props) s += scalar_size(p.type);
    return s;
  }
};

[[noreturn]] void malformed(const std::string& what) {
  throw std::runtime_error("ply: malformed header: " + what);
}

}  // namespace

RawCloud read_ply(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("ply: cannot open " + path);

  std::string line;
  auto next_line = [&](std::string& out) {
    if (!std::getline(in, out)) malformed("unexpected end of header");
    if (!out.empty() && out.back() == '\r') out.pop_back();
  };

  next_line(line);
  if (line != "ply") malformed("missing ply signature");

  bool binary = false;
  bool have_format = false;
  std::vector<Element> elements;
  while (true) {
    next_line(line);
    std::istringstream ls(line);
    std::string tok;
    ls >> tok;
    if (tok.empty() || tok == "comment" || tok == "obj_info") continue;
    if (tok == "format") {
      std::string fmt, ver;
      ls >> fmt >> ver;
      if (fmt == "ascii") binary = false;
      else if (fmt == "binary_little_endian") binary = true;
      else throw std::runtime_error("ply: unsupported format " + fmt);
      have_format = true;
    } else if (tok == "element") {
      Element e;
      long long n = -1;
      if (!(ls >> e.name >> n) || n < 0) malformed("bad element line");
      e.count = static_cast<std::size_t>(n);
      elements.push_back(std::move(e));
    } else if (tok == "property") {
      if (elements.empty()) malformed("property before element");
      Property p;
      std::string type;
      ls >> type;
      if (type == "list") {
        std::string count_t, value_t, name;
        ls >> count_t >> value_t >> name;
        p.name = name;
        p.is_list = true;
      } else {
        auto t = parse_scalar(type);
        if (!t) throw std::runtime_error("ply: unsupported property type " + type);
        p.type = *t;
        ls >> p.name;
      }
      if (p.name.empty()) malformed("bad property line");
      elements.back().props.push_back(std::move(p));
    } else if (tok == "end_header") {
      break;
    } else {
      malformed("unknown keyword " + tok);
    }
  }
  if (!have_format) malformed("missing format line");

  std::size_t vertex_idx = elements.size();
  for (std::size_t i = 0; i < elements.size(); ++i)
    if (elements[i].name == "vertex") { vertex_idx = i; break; }
  if (vertex_idx == elements.size()) malformed("no vertex element");

  int xyz[3] = {-1, -1, -1};
  const Element& vtx = elements[vertex_idx];
  for (std::size_t i = 0; i < vtx.props.size(); ++i) {
    const auto& p = vtx.props[i];
    if (p.is_list) continue;
    if (p.name == "x") xyz[0] = static_cast<int>(i);
    if (p.name == "y") xyz[1] = static_cast<int>(i);
    if (p.name == "z") xyz[2] = static_cast<int>(i);
  }
  if (xyz[0] < 0 || xyz[1] < 0 || xyz[2] < 0)
    malformed("vertex element lacks x/y/z properties");

  RawCloud cloud;
  cloud.points.reserve(vtx.count);

  for (std::size_t ei = 0; ei <= vertex_idx; ++ei) {
    const Element& e = elements[ei];
    const bool want = ei == vertex_idx;
    if (e.has_list())
      throw std::runtime_error("ply: unsupported property type: list in element " +
                               e.name);
    if (binary) {
      const std::size_t stride = e.stride();
      std::vector<uint8_t> row(stride);
      std::vector<std::size_t> offsets(e.props.size());
      std::size_t off = 0;
      for (std::size_t i = 0; i < e.props.size(); ++i) {
        offsets[i] = off;
        off += scalar_size(e.props[i].type);
      }
      for (std::size_t r = 0; r < e.count; ++r) {
        in.read(reinterpret_cast<char*>(row.data()), static_cast<std::streamsize>(stride));
        if (static_cast<std::size_t>(in.gcount()) != stride)
          throw std::runtime_error("ply: truncated payload: element " + e.name +
                                   " declares " + std::to_string(e.count) +
                                   " rows, got " + std::to_string(r));
        if (want) {
          Vec3d p;
          for (int a = 0; a < 3; ++a) {
            const auto& prop = e.props[static_cast<std::size_t>(xyz[a])];
            p[a] = scalar_to_double(prop.type, row.data() + offsets[static_cast<std::size_t>(xyz[a])]);
          }
          cloud.points.push_back(p);
        }
      }
    } else {
      for (std::size_t r = 0; r < e.count; ++r) {
        std::string body;
        do {
          if (!std::getline(in, body))
            throw std::runtime_error("ply: truncated payload: element " + e.name +
                                     " declares " + std::to_string(e.count) +
                                     " rows, got " + std::to_string(r));
          if (!body.empty() && body.back() == '\r') body.pop_back();
        } while (body.empty());
        if (want) {
          std::istringstream rs(body);
          std::vector<double> vals(e.props.size());
          for (std::size_t i = 0; i < e.props.size(); ++i) {
            if (!(rs >> vals[i]))
              throw std::runtime_error("ply: truncated payload: short row in element " +
                                       e.name);
          }
          cloud.points.push_back(Vec3d{vals[static_cast<std::size_t>(xyz[0])],
                                       vals[static_cast<std::size_t>(xyz[1])],
                                       vals[static_cast<std::size_t>(xyz[2])]});
        }
      }
    }
  }

  for (const auto& p : cloud.points)
    for (double v : p)
      if (!std::isfinite(v)) throw std::runtime_error("ply: non-finite coordinate");
  return cloud;
}

QuantizedCloud quantize(const RawCloud& cloud, int bit_depth,
                        std::optional<Vec3d> origin_opt,
                        std::optional<double> step_opt, QuantizeStats* stats) {
  if (bit_depth < kMinBitDepth || bit_depth > kMaxBitDepth)
    throw std::invalid_argument("quantize: bit depth must be in [2, 21]");
  if (cloud.points.empty()) throw std::invalid_argument("quantize: empty cloud");

  Vec3d lo{cloud.points[0]}, hi{cloud.points[0]};
  for (const auto& p : cloud.points)
    for (int a = 0; a < 3; ++a) {
      lo[a] = std::min(lo[a], p[a]);
      hi[a] = std::max(hi[a], p[a]);
    }

  Vec3d origin = origin_opt.value_or(
      Vec3d{std::floor(lo[0]), std::floor(lo[1]), std::floor(lo[2])});
  double step;
  if (step_opt) {
    step = *step_opt;
  } else {
    double extent = 0.0;
    for (int a = 0; a < 3; ++a) extent = std::max(extent, hi[a] - origin[a]);
    const double cells = static_cast<double>((uint64_t(1) << bit_depth) - 1);
    step = extent > 0.0 ? extent / cells : 1.0;
  }
  if (!(step > 0.0)) throw std::invalid_argument("quantize: step must be positive");

  const int64_t limit = int64_t(1) << bit_depth;
  std::vector<Coord> coords;
  coords.reserve(cloud.points.size());
  for (std::size_t i = 0; i < cloud.points.size(); ++i) {
    const auto& p = cloud.points[i];
    Coord c;
    for (int a = 0; a < 3; ++a) {
      const double q = std::floor((p[a] - origin[a]) / step);
      if (!(q >= 0.0) || q >= static_cast<double>(limit))
        throw std::runtime_error("quantize: point " + std::to_string(i) +
                                 " outside [0, 2^" + std::to_string(bit_depth) +
                                 ") voxel range");
      c[a] = static_cast<uint32_t>(q);
    }
    coords.push_back(c);
  }

  LevelState sorted = initial_sort(coords, bit_depth);
  if (stats) {
    stats->input_points = cloud.points.size();
    stats->merged_duplicates = cloud.points.size() - sorted.coords.size();
  }

  QuantizedCloud out;
  out.coords = std::move(sorted.coords);
  out.bit_depth = bit_depth;
  out.origin = origin;
  out.step = step;
  return out;
}

void write_ply(const QuantizedCloud& cloud, const std::string& path, bool ascii) {
  if (cloud.coords.empty())
    throw std::invalid_argument("write_ply: empty cloud");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("ply: cannot open " + path + " for writing");

  out << "ply\n"
      << (ascii ? "format ascii 1.0\n" : "format binary_little_endian 1.0\n")
      << "element vertex " << cloud.coords.size() << "\n"
      << "property double x\nproperty double y\nproperty double z\n"
      << "end_header\n";

  for (const Coord& c : cloud.coords) {
    const Vec3d p = dequantize_point(cloud, c);
    if (ascii) {
      std::ostringstream row;
      row.precision(17);
      row << p[0] << ' ' << p[1] << ' ' << p[2] << '\n';
      out << row.str();
    } else {
      out.write(reinterpret_cast<const char*>(p.data()), sizeof(double) * 3);
    }
  }
  if (!out) throw std::runtime_error("ply: write failure on " + path);
}

}  // namespace zpcc
