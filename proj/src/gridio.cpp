#include "bandlet/gridio.hpp"

#include <algorithm>
#include <cctype>
#include <cmath>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <iterator>
#include <vector>

#include "bandlet/errors.hpp"

namespace bandlet {

namespace {

std::string slurp(const std::string& path) {
  std::ifstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open " + path);
  return std::string(std::istreambuf_iterator<char>(f),
                     std::istreambuf_iterator<char>());
}

// next whitespace-delimited token, skipping # comments to end of line
bool pgm_token(const char*& p, const char* end, std::string& tok) {
  while (p < end) {
    if (std::isspace(static_cast<unsigned char>(*p))) {
      ++p;
    } else if (*p == '#') {
      while (p < end && *p != '\n') ++p;
    } else {
      break;
    }
  }
  if (p >= end) return false;
  tok.clear();
  while (p < end && !std::isspace(static_cast<unsigned char>(*p)) &&
         *p != '#')
    tok += *p++;
  return true;
}

long pgm_int(const char*& p, const char* end, const std::string& path) {
  std::string tok;
  if (!pgm_token(p, end, tok)) throw io_error("truncated PGM header: " + path);
  char* q = nullptr;
  long v = std::strtol(tok.c_str(), &q, 10);
  if (q != tok.c_str() + tok.size() || v < 0)
    throw io_error("malformed PGM number: " + path);
  return v;
}

void check_side(long side, const std::string& path) {
  if (side < 2 || side > 65536 || !is_pow2(static_cast<int>(side)))
    throw io_error("grid side must be a power of two, >= 2: " + path);
}

Image read_pgm(const std::string& data, bool binary, const std::string& path) {
  const char* p = data.c_str() + 2;
  const char* end = data.c_str() + data.size();
  long w = pgm_int(p, end, path);
  long h = pgm_int(p, end, path);
  long maxval = pgm_int(p, end, path);
  if (w != h) throw io_error("PGM image must be square: " + path);
  check_side(w, path);
  if (maxval < 1 || maxval > 255)
    throw io_error("PGM maxval must be in [1, 255]: " + path);

  Image img;
  img.side = static_cast<int>(w);
  size_t n = static_cast<size_t>(w) * static_cast<size_t>(w);
  img.pix.resize(n);
  if (binary) {
    if (p >= end || !std::isspace(static_cast<unsigned char>(*p)))
      throw io_error("malformed PGM header: " + path);
    ++p;  // single whitespace byte separates header from raster
    if (static_cast<size_t>(end - p) < n)
      throw io_error("truncated PGM raster: " + path);
    for (size_t i = 0; i < n; ++i)
      img.pix[i] = static_cast<unsigned char>(p[i]) / static_cast<double>(maxval);
  } else {
    for (size_t i = 0; i < n; ++i) {
      long v = pgm_int(p, end, path);
      if (v > maxval) throw io_error("PGM value exceeds maxval: " + path);
      img.pix[i] = v / static_cast<double>(maxval);
    }
  }
  return img;
}

Image read_text_grid(const std::string& data, const std::string& path) {
  const char* p = data.c_str();
  char* q = nullptr;
  long side = std::strtol(p, &q, 10);
  if (q == p) throw io_error("malformed grid header: " + path);
  check_side(side, path);
  p = q;
  size_t n = static_cast<size_t>(side) * static_cast<size_t>(side);
  Image img;
  img.side = static_cast<int>(side);
  img.pix.resize(n);
  for (size_t i = 0; i < n; ++i) {
    double v = std::strtod(p, &q);
    if (q == p) throw io_error("grid value count mismatch: " + path);
    if (!std::isfinite(v)) throw io_error("non-finite grid value: " + path);
    img.pix[i] = v;
    p = q;
  }
  while (*p && std::isspace(static_cast<unsigned char>(*p))) ++p;
  if (*p) throw io_error("trailing data after grid values: " + path);
  return img;
}

bool has_pgm_ext(const std::string& path) {
  return path.size() >= 4 && path.compare(path.size() - 4, 4, ".pgm") == 0;
}

}  // namespace

Image read_grid(const std::string& path) {
  std::string data = slurp(path);
  if (data.size() >= 3 && data[0] == 'P' && (data[1] == '2' || data[1] == '5') &&
      std::isspace(static_cast<unsigned char>(data[2])))
    return read_pgm(data, data[1] == '5', path);
  return read_text_grid(data, path);
}

void write_grid(const Image& img, const std::string& path) {
  validate_image(img);
  std::ofstream f(path, std::ios::binary);
  if (!f) throw io_error("cannot open " + path + " for writing");
  if (has_pgm_ext(path)) {
    char head[64];
    std::snprintf(head, sizeof head, "P5\n%d %d\n255\n", img.side, img.side);
    f << head;
    std::vector<unsigned char> row(static_cast<size_t>(img.side));
    for (int y = 0; y < img.side; ++y) {
      for (int x = 0; x < img.side; ++x) {
        double v = img.pix[static_cast<size_t>(y) * img.side + x];
        v = std::min(1.0, std::max(0.0, v));
        row[static_cast<size_t>(x)] =
            static_cast<unsigned char>(std::lround(v * 255.0));
      }
      f.write(reinterpret_cast<const char*>(row.data()), img.side);
    }
  } else {
    char buf[40];
    std::string out;
    std::snprintf(buf, sizeof buf, "%d\n", img.side);
    out += buf;
    for (int y = 0; y < img.side; ++y) {
      for (int x = 0; x < img.side; ++x) {
        std::snprintf(buf, sizeof buf, "%.17g",
                      img.pix[static_cast<size_t>(y) * img.side + x]);
        out += buf;
        out += (x + 1 == img.side) ? '\n' : ' ';
      }
    }
    f.write(out.data(), static_cast<std::streamsize>(out.size()));
  }
  if (!f) throw io_error("write failed: " + path);
}

}  // namespace bandlet
