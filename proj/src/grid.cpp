#include "hqr/grid.hpp"

#include <cctype>
#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <iterator>
#include <limits>
#include <sstream>

#include "hqr/error.hpp"
#include "hqr/rng.hpp"

namespace hqr {

Grid::Grid(std::size_t h, std::size_t w, Vector values)
    : height(h), width(w), data(std::move(values)) {
  if (h == 0 || w == 0 || data.size() != h * w) {
    throw DimensionError("grid buffer of length " + std::to_string(data.size()) +
                         " does not match shape " + std::to_string(h) + "x" + std::to_string(w));
  }
  if (!all_finite(data)) throw ConfigError("grid has non-finite entries");
}

GridFormat parse_grid_format(std::string_view name) {
  if (name == "csv") return GridFormat::Csv;
  if (name == "pgm") return GridFormat::Pgm;
  throw ConfigError("unknown format '" + std::string(name) + "' (expected csv or pgm)");
}

GridFormat grid_format_from_path(std::string_view path) {
  auto ends_with = [&](std::string_view suffix) {
    if (path.size() < suffix.size()) return false;
    const std::string_view tail = path.substr(path.size() - suffix.size());
    for (std::size_t i = 0; i < suffix.size(); ++i) {
      if (std::tolower(static_cast<unsigned char>(tail[i])) != suffix[i]) return false;
    }
    return true;
  };
  return ends_with(".pgm") || ends_with(".pnm") ? GridFormat::Pgm : GridFormat::Csv;
}

std::string format_real(double v) {
  if (std::isinf(v)) return v > 0 ? "inf" : "-inf";
  char buf[64];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

namespace {

std::string read_all(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw IOError("cannot open '" + path + "' for reading");
  std::string content((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) throw IOError("failed reading '" + path + "'");
  return content;
}

std::string_view trim(std::string_view s) {
  const auto first = s.find_first_not_of(" \t\r");
  if (first == std::string_view::npos) return {};
  const auto last = s.find_last_not_of(" \t\r");
  return s.substr(first, last - first + 1);
}

Grid parse_csv(const std::string& content, const std::string& path) {
  std::vector<Vector> rows;
  std::size_t line_no = 0;
  std::size_t pos = 0;
  while (pos <= content.size()) {
    const auto end = content.find('\n', pos);
    const std::string_view line =
        trim(std::string_view(content).substr(pos, end == std::string::npos ? std::string::npos
                                                                              : end - pos));
    ++line_no;
    pos = end == std::string::npos ? content.size() + 1 : end + 1;
    if (line.empty()) continue;
    Vector row;
    std::size_t start = 0;
    while (true) {
      const auto comma = line.find(',', start);
      const std::string_view field = trim(line.substr(start, comma - start));
      double v = 0.0;
      const auto [ptr, ec] = std::from_chars(field.data(), field.data() + field.size(), v);
      if (field.empty() || ec != std::errc() || ptr != field.data() + field.size() ||
          !std::isfinite(v)) {
        throw FormatError(path + ": line " + std::to_string(line_no) + ": invalid number '" +
                          std::string(field) + "'");
      }
      row.push_back(v);
      if (comma == std::string_view::npos) break;
      start = comma + 1;
    }
    if (!rows.empty() && row.size() != rows.front().size()) {
      throw FormatError(path + ": line " + std::to_string(line_no) + ": expected " +
                        std::to_string(rows.front().size()) + " columns, found " +
                        std::to_string(row.size()));
    }
    rows.push_back(std::move(row));
  }
  if (rows.empty()) throw FormatError(path + ": no data");
  const std::size_t w = rows.front().size();
  Vector data;
  data.reserve(rows.size() * w);
  for (const auto& r : rows) data.insert(data.end(), r.begin(), r.end());
  return Grid(rows.size(), w, std::move(data));
}

class PgmReader {
 public:
  PgmReader(const std::string& content, const std::string& path) : c_(content), path_(path) {}

  Grid read() {
    if (c_.size() < 2 || c_[0] != 'P' || (c_[1] != '2' && c_[1] != '5')) {
      fail(0, "expected P2 or P5 magic number");
    }
    const bool binary = c_[1] == '5';
    pos_ = 2;
    const std::size_t w = header_int("width");
    const std::size_t h = header_int("height");
    const std::size_t maxval = header_int("maxval");
    if (w == 0 || h == 0) fail(pos_, "image dimensions must be positive");
    if (maxval == 0 || maxval > 65535) fail(pos_, "maxval must be in 1..65535");
    Vector data(w * h);
    if (binary) {
      // Exactly one whitespace byte separates the header from the raster.
      if (pos_ >= c_.size() || !std::isspace(static_cast<unsigned char>(c_[pos_]))) {
        fail(pos_, "missing whitespace after maxval");
      }
      ++pos_;
      const std::size_t bytes = maxval < 256 ? 1 : 2;
      if (c_.size() - pos_ < data.size() * bytes) {
        fail(c_.size(), "raster truncated: need " + std::to_string(data.size() * bytes) +
                            " bytes");
      }
      for (std::size_t i = 0; i < data.size(); ++i) {
        std::size_t v = static_cast<unsigned char>(c_[pos_++]);
        if (bytes == 2) v = (v << 8) | static_cast<unsigned char>(c_[pos_++]);
        if (v > maxval) fail(pos_ - bytes, "pixel exceeds maxval");
        data[i] = static_cast<double>(v) / static_cast<double>(maxval);
      }
    } else {
      for (std::size_t i = 0; i < data.size(); ++i) {
        const std::size_t v = header_int("pixel");
        if (v > maxval) fail(pos_, "pixel exceeds maxval");
        data[i] = static_cast<double>(v) / static_cast<double>(maxval);
      }
    }
    return Grid(h, w, std::move(data));
  }

 private:
  [[noreturn]] void fail(std::size_t at, const std::string& msg) const {
    throw FormatError(path_ + ": byte " + std::to_string(at) + ": " + msg);
  }

  void skip_space_and_comments() {
    while (pos_ < c_.size()) {
      const char ch = c_[pos_];
      if (ch == '#') {
        while (pos_ < c_.size() && c_[pos_] != '\n') ++pos_;
      } else if (std::isspace(static_cast<unsigned char>(ch))) {
        ++pos_;
      } else {
        break;
      }
    }
  }

  std::size_t header_int(const char* what) {
    skip_space_and_comments();
    const std::size_t start = pos_;
    std::size_t v = 0;
    const auto [ptr, ec] = std::from_chars(c_.data() + pos_, c_.data() + c_.size(), v);
    if (ec != std::errc() || ptr == c_.data() + pos_) {
      fail(start, std::string("expected integer ") + what);
    }
    pos_ = static_cast<std::size_t>(ptr - c_.data());
    return v;
  }

  const std::string& c_;
  const std::string& path_;
  std::size_t pos_ = 0;
};

void write_file(const std::string& path, const std::string& bytes) {
  std::ofstream out(path, std::ios::binary | std::ios::trunc);
  if (!out) throw IOError("cannot open '" + path + "' for writing");
  out.write(bytes.data(), static_cast<std::streamsize>(bytes.size()));
  if (!out) throw IOError("failed writing '" + path + "'");
}

}  // namespace

Grid read_grid(const std::string& path, GridFormat format) {
  const std::string content = read_all(path);
  if (format == GridFormat::Csv) return parse_csv(content, path);
  return PgmReader(content, path).read();
}

void write_grid(const Grid& g, const std::string& path, GridFormat format) {
  std::string bytes;
  if (format == GridFormat::Csv) {
    for (std::size_t r = 0; r < g.height; ++r) {
      for (std::size_t c = 0; c < g.width; ++c) {
        if (c > 0) bytes += ',';
        bytes += format_real(g.data[r * g.width + c]);
      }
      bytes += '\n';
    }
  } else {
    bytes = "P5\n" + std::to_string(g.width) + " " + std::to_string(g.height) + "\n255\n";
    for (double v : g.data) {
      const double clamped = std::min(1.0, std::max(0.0, v));
      bytes += static_cast<char>(static_cast<unsigned char>(std::lround(clamped * 255.0)));
    }
  }
  write_file(path, bytes);
}

Grid add_noise(const Grid& g, double std_dev, std::uint64_t seed) {
  if (!(std_dev >= 0.0) || !std::isfinite(std_dev)) {
    throw ConfigError("noise standard deviation must be a nonnegative finite number");
  }
  Grid out = g;
  if (std_dev == 0.0) return out;
  Rng rng(seed);
  for (double& v : out.data) v += std_dev * rng.normal();
  return out;
}

Metrics metrics(const Grid& out, const Grid& ref) {
  if (out.height != ref.height || out.width != ref.width) {
    throw DimensionError("metrics: grid shapes differ");
  }
  double s = 0.0;
  for (std::size_t i = 0; i < out.size(); ++i) {
    const double d = out.data[i] - ref.data[i];
    s += d * d;
  }
  Metrics m;
  m.mse = s / static_cast<double>(out.size());
  m.psnr = m.mse < 1e-30 ? std::numeric_limits<double>::infinity() : 10.0 * std::log10(1.0 / m.mse);
  return m;
}

}  // namespace hqr
