#include "fcso/stl_io.hpp"

#include <cctype>
#include <cmath>
#include <cstdint>
#include <cstring>
#include <fstream>
#include <sstream>

namespace fcso {

StlParseError::StlParseError(const std::string& what, std::size_t offset)
    : std::runtime_error(what + " (byte " + std::to_string(offset) + ")"),
      byte_offset(offset) {}

namespace {

constexpr std::size_t kBinaryHeaderSize = 84;  // 80-byte comment + uint32 count
constexpr std::size_t kFacetRecordSize = 50;   // 12 float32 + uint16 attribute

float read_f32(const char* p) {
  float v;
  std::memcpy(&v, p, 4);
  return v;
}

std::uint32_t read_u32(const char* p) {
  std::uint32_t v;
  std::memcpy(&v, p, 4);
  return v;
}

bool looks_ascii(const std::string& bytes) {
  // "solid" header alone is not enough; real-world binary files use it
  // too. Accept as ASCII only when the facet grammar actually follows.
  std::size_t i = 0;
  while (i < bytes.size() && std::isspace(static_cast<unsigned char>(bytes[i]))) ++i;
  if (bytes.compare(i, 5, "solid") != 0) return false;
  if (bytes.size() >= kBinaryHeaderSize) {
    const std::uint32_t n = read_u32(bytes.data() + 80);
    if (bytes.size() == kBinaryHeaderSize + static_cast<std::size_t>(n) * kFacetRecordSize)
      return false;
  }
  return bytes.find("facet") != std::string::npos ||
         bytes.find("endsolid") != std::string::npos;
}

class Tokenizer {
 public:
  explicit Tokenizer(const std::string& text) : text_(text) {}

  // Returns empty string at end of input.
  std::string next() {
    while (pos_ < text_.size() && std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    token_offset_ = pos_;
    std::size_t start = pos_;
    while (pos_ < text_.size() && !std::isspace(static_cast<unsigned char>(text_[pos_]))) ++pos_;
    return text_.substr(start, pos_ - start);
  }

  void skip_rest_of_line() {
    while (pos_ < text_.size() && text_[pos_] != '\n') ++pos_;
  }

  std::size_t token_offset() const { return token_offset_; }

 private:
  const std::string& text_;
  std::size_t pos_ = 0;
  std::size_t token_offset_ = 0;
};

double parse_coord(Tokenizer& tok) {
  const std::string word = tok.next();
  if (word.empty()) throw StlParseError("unexpected end of ASCII STL", tok.token_offset());
  char* end = nullptr;
  const double v = std::strtod(word.c_str(), &end);
  if (end != word.c_str() + word.size())
    throw StlParseError("malformed number '" + word + "'", tok.token_offset());
  if (!std::isfinite(v))
    throw StlParseError("non-finite coordinate '" + word + "'", tok.token_offset());
  return v;
}

void expect(Tokenizer& tok, const char* keyword) {
  const std::string word = tok.next();
  if (word != keyword)
    throw StlParseError("expected '" + std::string(keyword) + "', got '" + word + "'",
                        tok.token_offset());
}

TriMesh parse_ascii(const std::string& text, double unit_scale) {
  Tokenizer tok(text);
  expect(tok, "solid");
  tok.skip_rest_of_line();  // solid name

  TriMesh raw;
  for (;;) {
    std::string word = tok.next();
    if (word == "endsolid") break;
    if (word.empty()) throw StlParseError("missing 'endsolid'", tok.token_offset());
    if (word != "facet")
      throw StlParseError("expected 'facet' or 'endsolid', got '" + word + "'",
                          tok.token_offset());
    expect(tok, "normal");
    parse_coord(tok);
    parse_coord(tok);
    parse_coord(tok);
    expect(tok, "outer");
    expect(tok, "loop");
    const int base = static_cast<int>(raw.vertices.size());
    for (int k = 0; k < 3; ++k) {
      expect(tok, "vertex");
      const double x = parse_coord(tok) * unit_scale;
      const double y = parse_coord(tok) * unit_scale;
      const double z = parse_coord(tok) * unit_scale;
      raw.vertices.emplace_back(x, y, z);
    }
    expect(tok, "endloop");
    expect(tok, "endfacet");
    raw.faces.push_back({base, base + 1, base + 2});
  }
  return raw;
}

TriMesh parse_binary(const std::string& bytes, double unit_scale) {
  if (bytes.size() < kBinaryHeaderSize)
    throw StlParseError("truncated binary STL header", bytes.size());
  const std::uint32_t n = read_u32(bytes.data() + 80);
  const std::size_t expected = kBinaryHeaderSize + static_cast<std::size_t>(n) * kFacetRecordSize;
  if (bytes.size() < expected)
    throw StlParseError("facet count " + std::to_string(n) + " but file holds only " +
                            std::to_string((bytes.size() - kBinaryHeaderSize) / kFacetRecordSize) +
                            " records",
                        bytes.size());

  TriMesh raw;
  raw.vertices.reserve(static_cast<std::size_t>(n) * 3);
  raw.faces.reserve(n);
  for (std::uint32_t f = 0; f < n; ++f) {
    const char* rec = bytes.data() + kBinaryHeaderSize + static_cast<std::size_t>(f) * kFacetRecordSize;
    const int base = static_cast<int>(raw.vertices.size());
    for (int k = 0; k < 3; ++k) {
      const char* vp = rec + 12 + 12 * k;  // skip the stored normal
      const double x = static_cast<double>(read_f32(vp + 0)) * unit_scale;
      const double y = static_cast<double>(read_f32(vp + 4)) * unit_scale;
      const double z = static_cast<double>(read_f32(vp + 8)) * unit_scale;
      if (!std::isfinite(x) || !std::isfinite(y) || !std::isfinite(z))
        throw StlParseError("non-finite coordinate in facet " + std::to_string(f),
                            static_cast<std::size_t>(rec - bytes.data()) + 12 + 12 * k);
      raw.vertices.emplace_back(x, y, z);
    }
    raw.faces.push_back({base, base + 1, base + 2});
  }
  return raw;
}

}  // namespace

TriMesh load_stl(const std::string& bytes, double unit_scale) {
  if (bytes.empty()) throw StlParseError("empty STL input", 0);
  TriMesh raw = looks_ascii(bytes) ? parse_ascii(bytes, unit_scale)
                                   : parse_binary(bytes, unit_scale);
  return deduplicate_vertices(raw, 1e-6);
}

TriMesh load_stl_file(const std::string& path, double unit_scale) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open STL file: " + path);
  std::ostringstream ss;
  ss << in.rdbuf();
  return load_stl(ss.str(), unit_scale);
}

std::string save_stl(const TriMesh& mesh, StlFormat format) {
  if (mesh.empty()) throw std::invalid_argument("save_stl: empty mesh");

  if (format == StlFormat::ascii) {
    std::ostringstream out;
    out << "solid fcso\n";
    char line[256];
    for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
      const Vec3 n = mesh.face_normal(f);
      std::snprintf(line, sizeof(line), "  facet normal %.9g %.9g %.9g\n", n.x(), n.y(), n.z());
      out << line << "    outer loop\n";
      for (int k = 0; k < 3; ++k) {
        const Vec3& v = mesh.v(static_cast<int>(f), k);
        std::snprintf(line, sizeof(line), "      vertex %.17g %.17g %.17g\n", v.x(), v.y(), v.z());
        out << line;
      }
      out << "    endloop\n  endfacet\n";
    }
    out << "endsolid fcso\n";
    return out.str();
  }

  std::string out(kBinaryHeaderSize, '\0');
  std::memcpy(out.data(), "fcso binary stl", 15);
  const std::uint32_t n = static_cast<std::uint32_t>(mesh.faces.size());
  std::memcpy(out.data() + 80, &n, 4);
  out.reserve(kBinaryHeaderSize + kFacetRecordSize * mesh.faces.size());
  for (std::size_t f = 0; f < mesh.faces.size(); ++f) {
    char rec[kFacetRecordSize] = {0};
    const Vec3 norm = mesh.face_normal(f);
    float vals[12] = {static_cast<float>(norm.x()), static_cast<float>(norm.y()),
                      static_cast<float>(norm.z())};
    for (int k = 0; k < 3; ++k) {
      const Vec3& v = mesh.v(static_cast<int>(f), k);
      vals[3 + 3 * k + 0] = static_cast<float>(v.x());
      vals[3 + 3 * k + 1] = static_cast<float>(v.y());
      vals[3 + 3 * k + 2] = static_cast<float>(v.z());
    }
    std::memcpy(rec, vals, 48);  // trailing uint16 attribute stays 0
    out.append(rec, kFacetRecordSize);
  }
  return out;
}

void save_stl_file(const TriMesh& mesh, const std::string& path, StlFormat format) {
  const std::string bytes = save_stl(mesh, format);
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw std::runtime_error("cannot write STL file: " + path);
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
}

}  // namespace fcso
