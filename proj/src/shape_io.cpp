#include "distfn/shape_io.hpp"

#include <algorithm>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <functional>
#include <sstream>
#include <vector>

#include "distfn/error.hpp"

namespace distfn {
namespace {

[[noreturn]] void parse_error(const std::string& what) {
  throw Error(ErrorCode::kParseError, what);
}

bool is_space(char c) {
  return c == ' ' || c == '\t' || c == '\n' || c == '\r' || c == '\v' ||
         c == '\f';
}

// Netpbm header tokenizer: whitespace-separated, '#' comments to end of line.
class HeaderReader {
 public:
  explicit HeaderReader(std::string_view bytes) : bytes_(bytes) {}

  long next_int(const char* what) {
    skip_space_and_comments();
    const char* begin = bytes_.data() + pos_;
    const char* end = bytes_.data() + bytes_.size();
    long value = 0;
    auto [ptr, ec] = std::from_chars(begin, end, value);
    if (ec != std::errc() || ptr == begin) {
      parse_error(std::string("expected ") + what);
    }
    pos_ += static_cast<std::size_t>(ptr - begin);
    return value;
  }

  std::string_view magic() {
    if (bytes_.size() < 2) parse_error("missing magic number");
    pos_ = 2;
    return bytes_.substr(0, 2);
  }

  // Exactly one whitespace byte separates the header from raster data.
  std::size_t raster_start() {
    if (pos_ >= bytes_.size() || !is_space(bytes_[pos_])) {
      parse_error("missing whitespace after header");
    }
    return pos_ + 1;
  }

  std::size_t pos() const { return pos_; }

 private:
  void skip_space_and_comments() {
    while (pos_ < bytes_.size()) {
      if (is_space(bytes_[pos_])) {
        ++pos_;
      } else if (bytes_[pos_] == '#') {
        while (pos_ < bytes_.size() && bytes_[pos_] != '\n') ++pos_;
      } else {
        break;
      }
    }
  }

  std::string_view bytes_;
  std::size_t pos_ = 0;
};

struct Greymap {
  int width = 0;
  int height = 0;
  long maxval = 0;
  std::vector<std::uint16_t> pixels;
};

Greymap read_greymap(std::string_view bytes) {
  HeaderReader in(bytes);
  const std::string_view magic = in.magic();
  if (magic != "P2" && magic != "P5") parse_error("not a P2/P5 greymap");
  Greymap g;
  const long w = in.next_int("width");
  const long h = in.next_int("height");
  g.maxval = in.next_int("maxval");
  if (w <= 0 || h <= 0 || w > 1 << 16 || h > 1 << 16) {
    parse_error("bad image dimensions");
  }
  if (g.maxval < 1 || g.maxval > 65535) parse_error("maxval out of range");
  g.width = static_cast<int>(w);
  g.height = static_cast<int>(h);
  const std::size_t n = static_cast<std::size_t>(w) * static_cast<std::size_t>(h);
  g.pixels.resize(n);

  if (magic == "P2") {
    for (std::size_t i = 0; i < n; ++i) {
      const long v = in.next_int("pixel value");
      if (v < 0 || v > g.maxval) parse_error("pixel value exceeds maxval");
      g.pixels[i] = static_cast<std::uint16_t>(v);
    }
    return g;
  }

  const std::size_t start = in.raster_start();
  const std::size_t bpp = g.maxval > 255 ? 2 : 1;
  if (bytes.size() < start + n * bpp) parse_error("truncated raster");
  const auto* raw = reinterpret_cast<const unsigned char*>(bytes.data()) + start;
  for (std::size_t i = 0; i < n; ++i) {
    const unsigned v = bpp == 2 ? (raw[2 * i] << 8) | raw[2 * i + 1] : raw[i];
    if (v > static_cast<unsigned>(g.maxval)) {
      parse_error("pixel value exceeds maxval");
    }
    g.pixels[i] = static_cast<std::uint16_t>(v);
  }
  return g;
}

std::string netpbm_header(std::string_view magic, int w, int h, int maxval) {
  return std::string(magic) + "\n" + std::to_string(w) + " " +
         std::to_string(h) + "\n" + std::to_string(maxval) + "\n";
}

std::string format_value(double v) {
  if (std::isnan(v)) return "nan";
  char buf[32];
  std::snprintf(buf, sizeof buf, "%.9g", v);
  return buf;
}

double field_max(const ScalarField& field) {
  double m = 0.0;
  for (std::size_t i = 0; i < field.size(); ++i) {
    if (field.defined(i)) m = std::max(m, field[i]);
  }
  return m > 0.0 ? m : 1.0;
}

std::uint8_t channel(double x) {
  return static_cast<std::uint8_t>(std::lround(std::clamp(x, 0.0, 1.0) * 255.0));
}

template <typename T>
T number(std::string_view key, std::string_view text) {
  T value{};
  const char* end = text.data() + text.size();
  auto [ptr, ec] = std::from_chars(text.data(), end, value);
  if (ec != std::errc() || ptr != end) {
    parse_error("bad value for '" + std::string(key) + "': " + std::string(text));
  }
  return value;
}

}  // namespace

BinaryMask read_mask_pgm(std::string_view bytes, double spacing) {
  const Greymap g = read_greymap(bytes);
  std::vector<std::uint8_t> inside(g.pixels.size());
  for (std::size_t i = 0; i < inside.size(); ++i) {
    // value >= (maxval + 1) / 2 without rounding
    inside[i] = 2L * g.pixels[i] >= g.maxval + 1 ? 1 : 0;
  }
  BinaryMask mask(g.width, g.height, std::move(inside), spacing);
  validate_mask(mask);
  return mask;
}

std::string write_mask_pgm(const BinaryMask& mask) {
  std::string out = netpbm_header("P5", mask.width(), mask.height(), 255);
  out.reserve(out.size() + mask.size());
  for (std::uint8_t v : mask.data()) out.push_back(v ? '\xff' : '\0');
  return out;
}

std::string write_field_csv(const ScalarField& field) {
  std::string out =
      std::to_string(field.width()) + " " + std::to_string(field.height()) + "\n";
  for (int y = 0; y < field.height(); ++y) {
    for (int x = 0; x < field.width(); ++x) {
      if (x) out += ',';
      out += format_value(field(x, y));
    }
    out += '\n';
  }
  return out;
}

ScalarField read_field_csv(std::string_view text) {
  std::size_t pos = 0;
  auto next_line = [&]() -> std::optional<std::string_view> {
    if (pos >= text.size()) return std::nullopt;
    std::size_t end = text.find('\n', pos);
    if (end == std::string_view::npos) end = text.size();
    std::string_view line = text.substr(pos, end - pos);
    pos = end + 1;
    if (!line.empty() && line.back() == '\r') line.remove_suffix(1);
    return line;
  };
  const auto header = next_line();
  if (!header) parse_error("empty field file");
  const std::size_t sp = header->find(' ');
  if (sp == std::string_view::npos) parse_error("header must be 'width height'");
  const int w = number<int>("width", header->substr(0, sp));
  const int h = number<int>("height", header->substr(sp + 1));
  if (w <= 0 || h <= 0) parse_error("bad field dimensions");

  ScalarField field(w, h);
  for (int y = 0; y < h; ++y) {
    const auto line = next_line();
    if (!line) parse_error("missing row " + std::to_string(y));
    std::size_t start = 0;
    for (int x = 0; x < w; ++x) {
      std::size_t comma = line->find(',', start);
      const bool last = x + 1 == w;
      if (last != (comma == std::string_view::npos)) {
        parse_error("row " + std::to_string(y) + " has the wrong column count");
      }
      if (last) comma = line->size();
      const std::string_view token = line->substr(start, comma - start);
      field(x, y) = token == "nan" ? ScalarField::kUndefined
                                   : number<double>("value", token);
      start = comma + 1;
    }
  }
  return field;
}

std::string write_field_pgm16(const ScalarField& field,
                              std::optional<double> scale_max) {
  const double scale = scale_max.value_or(field_max(field));
  std::string out = netpbm_header("P5", field.width(), field.height(), 65535);
  for (std::size_t i = 0; i < field.size(); ++i) {
    long q = 0;
    if (field.defined(i)) {
      q = std::lround(std::clamp(field[i] / scale, 0.0, 1.0) * 65535.0);
    }
    out.push_back(static_cast<char>((q >> 8) & 0xff));
    out.push_back(static_cast<char>(q & 0xff));
  }
  return out;
}

ScalarField read_field_pgm16(std::string_view bytes, double scale_max) {
  const Greymap g = read_greymap(bytes);
  ScalarField field(g.width, g.height);
  for (std::size_t i = 0; i < g.pixels.size(); ++i) {
    field[i] = static_cast<double>(g.pixels[i]) / g.maxval * scale_max;
  }
  return field;
}

std::array<std::uint8_t, 3> heat_color(double value, double scale_max) {
  const double s = std::clamp(value / scale_max, 0.0, 1.0);
  if (s <= 0.5) return {0, channel(2.0 * s), channel(1.0 - 2.0 * s)};
  return {channel(2.0 * s - 1.0), channel(2.0 - 2.0 * s), 0};
}

std::string write_heatmap_ppm(const ScalarField& field,
                              std::optional<double> scale_max) {
  const double scale = scale_max.value_or(field_max(field));
  if (!(scale > 0.0)) {
    throw Error(ErrorCode::kBadConfig, "heatmap scale must be positive");
  }
  std::string out = netpbm_header("P6", field.width(), field.height(), 255);
  out.reserve(out.size() + 3 * field.size());
  for (std::size_t i = 0; i < field.size(); ++i) {
    std::array<std::uint8_t, 3> rgb{0, 0, 0};
    if (field.defined(i)) rgb = heat_color(field[i], scale);
    for (std::uint8_t c : rgb) out.push_back(static_cast<char>(c));
  }
  return out;
}

BinaryMask make_shape(const Shape& shape, const Canvas& canvas) {
  const int W = canvas.width;
  const int H = canvas.height;
  if (W < 3 || H < 3) {
    throw Error(ErrorCode::kTooSmall, "canvas must be at least 3x3");
  }
  const double cx = 0.5 * (W - 1);
  const double cy = 0.5 * (H - 1);
  auto in_box = [](int v, int lo, int extent) { return v >= lo && v < lo + extent; };

  auto predicate = std::visit(
      [&](const auto& s) -> std::function<bool(int, int)> {
        using T = std::decay_t<decltype(s)>;
        if constexpr (std::is_same_v<T, Disk>) {
          if (!(s.radius >= 0.0)) throw Error(ErrorCode::kBadConfig, "radius < 0");
          return [=](int x, int y) {
            return (x - cx) * (x - cx) + (y - cy) * (y - cy) <= s.radius * s.radius;
          };
        } else if constexpr (std::is_same_v<T, Strip>) {
          if (s.width <= 0) throw Error(ErrorCode::kBadConfig, "strip width <= 0");
          const int y0 = (H - s.width) / 2;
          return [=](int x, int y) {
            return x >= 1 && x <= W - 2 && in_box(y, y0, s.width);
          };
        } else if constexpr (std::is_same_v<T, Rectangle>) {
          if (s.width <= 0 || s.height <= 0) {
            throw Error(ErrorCode::kBadConfig, "rectangle sides must be positive");
          }
          const int x0 = (W - s.width) / 2;
          const int y0 = (H - s.height) / 2;
          return [=](int x, int y) {
            return in_box(x, x0, s.width) && in_box(y, y0, s.height);
          };
        } else if constexpr (std::is_same_v<T, Annulus>) {
          if (!(s.r_in >= 0.0 && s.r_out > s.r_in)) {
            throw Error(ErrorCode::kBadConfig, "annulus needs 0 <= r_in < r_out");
          }
          return [=](int x, int y) {
            const double r2 = (x - cx) * (x - cx) + (y - cy) * (y - cy);
            return r2 >= s.r_in * s.r_in && r2 <= s.r_out * s.r_out;
          };
        } else {
          if (s.size <= 0 || s.thickness <= 0 || s.thickness > s.size) {
            throw Error(ErrorCode::kBadConfig, "L-shape needs 0 < thickness <= size");
          }
          const int x0 = (W - s.size) / 2;
          const int y0 = (H - s.size) / 2;
          return [=](int x, int y) {
            const bool vertical = in_box(x, x0, s.thickness) && in_box(y, y0, s.size);
            const bool horizontal = in_box(x, x0, s.size) &&
                                    in_box(y, y0 + s.size - s.thickness, s.thickness);
            return vertical || horizontal;
          };
        }
      },
      shape);

  BinaryMask mask(W, H, canvas.spacing);
  for (int y = 0; y < H; ++y) {
    for (int x = 0; x < W; ++x) {
      if (!predicate(x, y)) continue;
      if (x == 0 || y == 0 || x == W - 1 || y == H - 1) {
        throw Error(ErrorCode::kDoesNotFit,
                    "shape reaches the image border at (" + std::to_string(x) +
                        "," + std::to_string(y) + ")");
      }
      mask.set(x, y, true);
    }
  }
  validate_mask(mask);
  return mask;
}

ShapeRequest parse_shape_spec(std::string_view spec) {
  const std::size_t colon = spec.find(':');
  const std::string_view kind = spec.substr(0, colon);
  std::string_view rest =
      colon == std::string_view::npos ? std::string_view{} : spec.substr(colon + 1);

  ShapeRequest req;
  std::vector<std::pair<std::string_view, std::string_view>> params;
  while (!rest.empty()) {
    const std::size_t comma = rest.find(',');
    const std::string_view item = rest.substr(0, comma);
    const std::size_t eq = item.find('=');
    if (eq == std::string_view::npos) {
      parse_error("expected key=value in shape spec: " + std::string(item));
    }
    const std::string_view key = item.substr(0, eq);
    const std::string_view value = item.substr(eq + 1);
    if (key == "canvas") {
      const std::size_t x = value.find('x');
      if (x == std::string_view::npos) {
        req.canvas.width = req.canvas.height = number<int>(key, value);
      } else {
        req.canvas.width = number<int>(key, value.substr(0, x));
        req.canvas.height = number<int>(key, value.substr(x + 1));
      }
    } else if (key == "spacing") {
      req.canvas.spacing = number<double>(key, value);
    } else {
      params.emplace_back(key, value);
    }
    rest = comma == std::string_view::npos ? std::string_view{} : rest.substr(comma + 1);
  }

  auto take = [&](std::string_view key) -> std::string_view {
    for (auto it = params.begin(); it != params.end(); ++it) {
      if (it->first == key) {
        const auto value = it->second;
        params.erase(it);
        return value;
      }
    }
    parse_error("shape '" + std::string(kind) + "' needs " + std::string(key));
  };

  if (kind == "disk") {
    req.shape = Disk{number<double>("r", take("r"))};
  } else if (kind == "strip") {
    req.shape = Strip{number<int>("width", take("width"))};
  } else if (kind == "rect") {
    const int w = number<int>("w", take("w"));
    req.shape = Rectangle{w, number<int>("h", take("h"))};
  } else if (kind == "annulus") {
    const double r_in = number<double>("rin", take("rin"));
    req.shape = Annulus{r_in, number<double>("rout", take("rout"))};
  } else if (kind == "lshape") {
    const int size = number<int>("size", take("size"));
    req.shape = LShape{size, number<int>("thickness", take("thickness"))};
  } else {
    parse_error("unknown shape kind '" + std::string(kind) + "'");
  }
  if (!params.empty()) {
    parse_error("unknown shape parameter '" + std::string(params.front().first) + "'");
  }
  return req;
}

std::string read_file(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorCode::kIoError, "cannot open " + path.string());
  std::ostringstream ss;
  ss << in.rdbuf();
  return ss.str();
}

void write_file(const std::filesystem::path& path, std::string_view bytes) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw Error(ErrorCode::kIoError, "cannot write " + path.string());
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw Error(ErrorCode::kIoError, "write failed for " + path.string());
}

}  // namespace distfn
