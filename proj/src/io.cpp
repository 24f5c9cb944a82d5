#include "surfbench/io.hpp"

#include <algorithm>
#include <bit>
#include <cctype>
#include <charconv>
#include <cstring>
#include <fstream>
#include <sstream>
#include <string>
#include <vector>

namespace surfbench::io {

namespace fs = std::filesystem;

namespace {

static_assert(std::endian::native == std::endian::little, "binary PLY I/O assumes a little-endian host");

std::string lower_extension(const fs::path& path) {
  std::string ext = path.extension().string();
  std::transform(ext.begin(), ext.end(), ext.begin(), [](unsigned char c) { return std::tolower(c); });
  return ext;
}

std::ifstream open_in(const fs::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IoError("cannot open " + path.string());
  return in;
}

std::ofstream open_out(const fs::path& path) {
  if (path.has_parent_path()) {
    std::error_code ec;
    fs::create_directories(path.parent_path(), ec);
  }
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IoError("cannot write " + path.string());
  return out;
}

TriMesh from_polygons(std::vector<double>&& coords, const std::vector<std::vector<Index>>& polygons,
                      const fs::path& path) {
  const auto nv = static_cast<Index>(coords.size() / 3);
  std::vector<int> tri;
  for (const auto& poly : polygons) {
    if (poly.size() < 3) throw IoError(path.string() + ": polygon with fewer than 3 vertices");
    for (Index idx : poly)
      if (idx < 0 || idx >= nv) throw IoError(path.string() + ": face index out of range");
    for (std::size_t k = 1; k + 1 < poly.size(); ++k) {
      tri.push_back(static_cast<int>(poly[0]));
      tri.push_back(static_cast<int>(poly[k]));
      tri.push_back(static_cast<int>(poly[k + 1]));
    }
  }
  TriMesh mesh;
  mesh.vertices = Eigen::Map<Points>(coords.data(), nv, 3);
  mesh.faces = Eigen::Map<Faces>(tri.data(), static_cast<Index>(tri.size() / 3), 3);
  return mesh;
}

// ---------------------------------------------------------------------------
// PLY

enum class PlyType { i8, u8, i16, u16, i32, u32, f32, f64 };

PlyType parse_type(const std::string& name) {
  if (name == "char" || name == "int8") return PlyType::i8;
  if (name == "uchar" || name == "uint8") return PlyType::u8;
  if (name == "short" || name == "int16") return PlyType::i16;
  if (name == "ushort" || name == "uint16") return PlyType::u16;
  if (name == "int" || name == "int32") return PlyType::i32;
  if (name == "uint" || name == "uint32") return PlyType::u32;
  if (name == "float" || name == "float32") return PlyType::f32;
  if (name == "double" || name == "float64") return PlyType::f64;
  throw IoError("unknown PLY type '" + name + "'");
}

struct PlyProperty {
  std::string name;
  PlyType type = PlyType::f32;
  bool is_list = false;
  PlyType count_type = PlyType::u8;
};

struct PlyElement {
  std::string name;
  Index count = 0;
  std::vector<PlyProperty> properties;
  int find(const std::string& prop) const {
    for (std::size_t i = 0; i < properties.size(); ++i)
      if (properties[i].name == prop) return static_cast<int>(i);
    return -1;
  }
};

class PlyReader {
 public:
  explicit PlyReader(const fs::path& path) : path_(path), in_(open_in(path)) { read_header(); }

  const std::vector<PlyElement>& elements() const { return elements_; }

  /// Calls `row(values, lists)` once per row of element `e`; elements must be
  /// consumed in file order.
  template <typename RowFn>
  void read_element(const PlyElement& e, RowFn&& row) {
    std::vector<double> values(e.properties.size());
    std::vector<std::vector<Index>> lists(e.properties.size());
    for (Index r = 0; r < e.count; ++r) {
      if (binary_) {
        for (std::size_t p = 0; p < e.properties.size(); ++p) {
          const auto& prop = e.properties[p];
          if (prop.is_list) {
            const auto n = static_cast<Index>(read_binary(prop.count_type));
            lists[p].resize(n);
            for (Index k = 0; k < n; ++k) lists[p][k] = static_cast<Index>(read_binary(prop.type));
          } else {
            values[p] = read_binary(prop.type);
          }
        }
      } else {
        std::string line;
        do {
          if (!std::getline(in_, line)) fail("truncated ASCII body");
        } while (line.find_first_not_of(" \t\r") == std::string::npos);
        const char* cur = line.data();
        const char* end = line.data() + line.size();
        for (std::size_t p = 0; p < e.properties.size(); ++p) {
          const auto& prop = e.properties[p];
          if (prop.is_list) {
            const auto n = static_cast<Index>(next_number(cur, end));
            lists[p].resize(n);
            for (Index k = 0; k < n; ++k) lists[p][k] = static_cast<Index>(next_number(cur, end));
          } else {
            values[p] = next_number(cur, end);
          }
        }
      }
      if (!in_) fail("truncated body");
      row(values, lists);
    }
  }

  [[noreturn]] void fail(const std::string& what) const { throw IoError(path_.string() + ": " + what); }

 private:
  void read_header() {
    std::string line;
    std::getline(in_, line);
    if (line.rfind("ply", 0) != 0) fail("missing 'ply' magic");
    bool have_format = false;
    while (std::getline(in_, line)) {
      if (!line.empty() && line.back() == '\r') line.pop_back();
      std::istringstream ss(line);
      std::string word;
      ss >> word;
      if (word == "format") {
        std::string fmt;
        ss >> fmt;
        if (fmt == "ascii") binary_ = false;
        else if (fmt == "binary_little_endian") binary_ = true;
        else fail("unsupported PLY format '" + fmt + "'");
        have_format = true;
      } else if (word == "element") {
        PlyElement e;
        ss >> e.name >> e.count;
        if (!ss || e.count < 0) fail("bad element line");
        elements_.push_back(std::move(e));
      } else if (word == "property") {
        if (elements_.empty()) fail("property before element");
        PlyProperty prop;
        std::string type;
        ss >> type;
        if (type == "list") {
          std::string count_type, item_type;
          ss >> count_type >> item_type >> prop.name;
          prop.is_list = true;
          prop.count_type = parse_type(count_type);
          prop.type = parse_type(item_type);
        } else {
          prop.type = parse_type(type);
          ss >> prop.name;
        }
        elements_.back().properties.push_back(std::move(prop));
      } else if (word == "end_header") {
        if (!have_format) fail("missing format line");
        return;
      }
      // comment / obj_info / unknown keywords are ignored
    }
    fail("missing end_header");
  }

  template <typename T>
  T raw() {
    T v;
    in_.read(reinterpret_cast<char*>(&v), sizeof(T));
    return v;
  }

  double read_binary(PlyType t) {
    switch (t) {
      case PlyType::i8: return raw<std::int8_t>();
      case PlyType::u8: return raw<std::uint8_t>();
      case PlyType::i16: return raw<std::int16_t>();
      case PlyType::u16: return raw<std::uint16_t>();
      case PlyType::i32: return raw<std::int32_t>();
      case PlyType::u32: return raw<std::uint32_t>();
      case PlyType::f32: return raw<float>();
      case PlyType::f64: return raw<double>();
    }
    return 0.0;
  }

  double next_number(const char*& cur, const char* end) {
    while (cur < end && (*cur == ' ' || *cur == '\t' || *cur == '\r')) ++cur;
    double v = 0.0;
    auto [ptr, ec] = std::from_chars(cur, end, v);
    if (ec != std::errc()) fail("malformed number in ASCII body");
    cur = ptr;
    return v;
  }

  fs::path path_;
  std::ifstream in_;
  bool binary_ = false;
  std::vector<PlyElement> elements_;
};

struct PlyWriter {
  std::ofstream out;
  PlyFormat format;

  template <typename T>
  void put(T v) {
    if (format == PlyFormat::binary_little_endian) {
      out.write(reinterpret_cast<const char*>(&v), sizeof(T));
    } else {
      if constexpr (std::is_floating_point_v<T>) {
        char buf[32];
        auto res = std::to_chars(buf, buf + sizeof(buf), v);
        out.write(buf, res.ptr - buf);
      } else {
        out << static_cast<long long>(v);
      }
      out.put(' ');
    }
  }
  void end_row() {
    if (format == PlyFormat::ascii) {
      out.seekp(-1, std::ios::cur);
      out.put('\n');
    }
  }
};

const char* format_name(PlyFormat f) {
  return f == PlyFormat::ascii ? "ascii" : "binary_little_endian";
}

// ---------------------------------------------------------------------------
// OBJ

Index parse_obj_index(const std::string& token, Index vertex_count, const fs::path& path) {
  const std::string head = token.substr(0, token.find('/'));
  long long idx = 0;
  auto [ptr, ec] = std::from_chars(head.data(), head.data() + head.size(), idx);
  if (ec != std::errc() || idx == 0) throw IoError(path.string() + ": bad face index '" + token + "'");
  return idx > 0 ? static_cast<Index>(idx - 1) : static_cast<Index>(vertex_count + idx);
}

}  // namespace

TriMesh read_obj(const fs::path& path) {
  auto in = open_in(path);
  std::vector<double> coords;
  std::vector<std::vector<Index>> polygons;
  std::string line, tag;
  while (std::getline(in, line)) {
    std::istringstream ss(line);
    if (!(ss >> tag)) continue;
    if (tag == "v") {
      double x, y, z;
      if (!(ss >> x >> y >> z)) throw IoError(path.string() + ": malformed vertex");
      coords.insert(coords.end(), {x, y, z});
    } else if (tag == "f") {
      std::vector<Index> poly;
      std::string token;
      while (ss >> token) poly.push_back(parse_obj_index(token, static_cast<Index>(coords.size() / 3), path));
      polygons.push_back(std::move(poly));
    }
  }
  return from_polygons(std::move(coords), polygons, path);
}

void write_obj(const fs::path& path, const TriMesh& mesh) {
  auto out = open_out(path);
  char buf[32];
  for (Index v = 0; v < mesh.vertex_count(); ++v) {
    out << 'v';
    for (int c = 0; c < 3; ++c) {
      auto res = std::to_chars(buf, buf + sizeof(buf), mesh.vertices(v, c));
      out << ' ' << std::string_view(buf, res.ptr - buf);
    }
    out << '\n';
  }
  for (Index f = 0; f < mesh.face_count(); ++f)
    out << "f " << mesh.faces(f, 0) + 1 << ' ' << mesh.faces(f, 1) + 1 << ' ' << mesh.faces(f, 2) + 1 << '\n';
  if (!out) throw IoError("write failed: " + path.string());
}

TriMesh read_ply_mesh(const fs::path& path) {
  PlyReader reader(path);
  std::vector<double> coords;
  std::vector<std::vector<Index>> polygons;
  for (const auto& e : reader.elements()) {
    if (e.name == "vertex") {
      const int ix = e.find("x"), iy = e.find("y"), iz = e.find("z");
      if (ix < 0 || iy < 0 || iz < 0) reader.fail("vertex element lacks x/y/z");
      coords.reserve(static_cast<std::size_t>(e.count) * 3);
      reader.read_element(e, [&](const std::vector<double>& v, const auto&) {
        coords.insert(coords.end(), {v[ix], v[iy], v[iz]});
      });
    } else if (e.name == "face") {
      int il = e.find("vertex_indices");
      if (il < 0) il = e.find("vertex_index");
      if (il < 0 || !e.properties[il].is_list) reader.fail("face element lacks a vertex index list");
      reader.read_element(e, [&](const auto&, const std::vector<std::vector<Index>>& lists) {
        polygons.push_back(lists[il]);
      });
    } else {
      reader.read_element(e, [](const auto&, const auto&) {});
    }
  }
  return from_polygons(std::move(coords), polygons, path);
}

void write_ply_mesh(const fs::path& path, const TriMesh& mesh, PlyFormat format) {
  PlyWriter w{open_out(path), format};
  w.out << "ply\nformat " << format_name(format) << " 1.0\n"
        << "element vertex " << mesh.vertex_count() << "\n"
        << "property double x\nproperty double y\nproperty double z\n"
        << "element face " << mesh.face_count() << "\n"
        << "property list uchar int vertex_indices\nend_header\n";
  for (Index v = 0; v < mesh.vertex_count(); ++v) {
    for (int c = 0; c < 3; ++c) w.put(mesh.vertices(v, c));
    w.end_row();
  }
  for (Index f = 0; f < mesh.face_count(); ++f) {
    w.put(std::uint8_t{3});
    for (int c = 0; c < 3; ++c) w.put(static_cast<std::int32_t>(mesh.faces(f, c)));
    w.end_row();
  }
  if (!w.out) throw IoError("write failed: " + path.string());
}

TriMesh read_mesh(const fs::path& path) {
  const std::string ext = lower_extension(path);
  if (ext == ".obj") return read_obj(path);
  if (ext == ".ply") return read_ply_mesh(path);
  throw IoError("unsupported mesh format: " + path.string());
}

void write_mesh(const fs::path& path, const TriMesh& mesh, PlyFormat format) {
  const std::string ext = lower_extension(path);
  if (ext == ".obj") return write_obj(path, mesh);
  if (ext == ".ply") return write_ply_mesh(path, mesh, format);
  throw IoError("unsupported mesh format: " + path.string());
}

PointCloud read_cloud(const fs::path& path) {
  PlyReader reader(path);
  PointCloud cloud;
  for (const auto& e : reader.elements()) {
    if (e.name != "vertex") {
      reader.read_element(e, [](const auto&, const auto&) {});
      continue;
    }
    const int ix = e.find("x"), iy = e.find("y"), iz = e.find("z");
    if (ix < 0 || iy < 0 || iz < 0) reader.fail("vertex element lacks x/y/z");
    const int inx = e.find("nx"), iny = e.find("ny"), inz = e.find("nz");
    const int iview = e.find("view_index");
    const int iface = e.find("face_index"), ifx = e.find("fnx"), ify = e.find("fny"), ifz = e.find("fnz");
    const bool has_normals = inx >= 0 && iny >= 0 && inz >= 0;
    const bool has_faces = iface >= 0 && ifx >= 0 && ify >= 0 && ifz >= 0;
    cloud.positions.resize(e.count, 3);
    if (has_normals) cloud.normals = Points(e.count, 3);
    if (iview >= 0) cloud.view_index = std::vector<std::uint32_t>(e.count);
    if (has_faces) cloud.faces = FaceProvenance{std::vector<int>(e.count), Points(e.count, 3)};
    Index r = 0;
    reader.read_element(e, [&](const std::vector<double>& v, const auto&) {
      cloud.positions.row(r) << v[ix], v[iy], v[iz];
      if (has_normals) cloud.normals->row(r) << v[inx], v[iny], v[inz];
      if (iview >= 0) (*cloud.view_index)[r] = static_cast<std::uint32_t>(v[iview]);
      if (has_faces) {
        cloud.faces->face[r] = static_cast<int>(v[iface]);
        cloud.faces->normal.row(r) << v[ifx], v[ify], v[ifz];
      }
      ++r;
    });
  }
  return cloud;
}

void write_cloud(const fs::path& path, const PointCloud& cloud, PlyFormat format) {
  cloud.check();
  PlyWriter w{open_out(path), format};
  w.out << "ply\nformat " << format_name(format) << " 1.0\n"
        << "element vertex " << cloud.size() << "\n"
        << "property double x\nproperty double y\nproperty double z\n";
  if (cloud.normals) w.out << "property double nx\nproperty double ny\nproperty double nz\n";
  if (cloud.view_index) w.out << "property uint view_index\n";
  if (cloud.faces) w.out << "property int face_index\nproperty double fnx\nproperty double fny\nproperty double fnz\n";
  w.out << "end_header\n";
  for (Index i = 0; i < cloud.size(); ++i) {
    for (int c = 0; c < 3; ++c) w.put(cloud.positions(i, c));
    if (cloud.normals)
      for (int c = 0; c < 3; ++c) w.put((*cloud.normals)(i, c));
    if (cloud.view_index) w.put(static_cast<std::uint32_t>((*cloud.view_index)[i]));
    if (cloud.faces) {
      w.put(static_cast<std::int32_t>(cloud.faces->face[i]));
      for (int c = 0; c < 3; ++c) w.put(cloud.faces->normal(i, c));
    }
    w.end_row();
  }
  if (!w.out) throw IoError("write failed: " + path.string());
}

}  // namespace surfbench::io
