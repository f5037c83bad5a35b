#include "dirlab/pointset_io.hpp"

#include <cerrno>
#include <charconv>
#include <cstdio>
#include <cstdlib>
#include <fstream>
#include <sstream>
#include <vector>

namespace dirlab {

namespace {

bool is_integer_token(std::string_view s) {
  std::size_t i = (!s.empty() && (s[0] == '-' || s[0] == '+')) ? 1 : 0;
  if (i == s.size()) return false;
  for (; i < s.size(); ++i) {
    if (s[i] < '0' || s[i] > '9') return false;
  }
  return true;
}

BigInt parse_integer(std::string_view s) {
  std::string body(s.front() == '+' ? s.substr(1) : s);
  return BigInt(body, 10);
}

}  // namespace

Rational parse_rational(std::string_view token) {
  if (token.empty()) fail(ErrorCode::Parse, "empty numeric token");
  if (auto slash = token.find('/'); slash != std::string_view::npos) {
    auto num = token.substr(0, slash);
    auto den = token.substr(slash + 1);
    if (!is_integer_token(num) || !is_integer_token(den) || den.front() == '-' ||
        den.front() == '+') {
      fail(ErrorCode::Parse, "malformed rational '" + std::string(token) + "'");
    }
    BigInt d = parse_integer(den);
    if (d == 0) fail(ErrorCode::Parse, "zero denominator in '" + std::string(token) + "'");
    Rational r(parse_integer(num), d);
    r.canonicalize();
    return r;
  }
  if (is_integer_token(token)) return Rational(parse_integer(token));

  // Terminating decimal, optionally with an exponent: sign digits [. digits] [e exp]
  std::string_view s = token;
  bool negative = false;
  if (s.front() == '-' || s.front() == '+') {
    negative = s.front() == '-';
    s.remove_prefix(1);
  }
  std::string digits;
  long exponent = 0;
  std::size_t i = 0;
  bool seen_digit = false;
  for (; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i) {
    digits.push_back(s[i]);
    seen_digit = true;
  }
  if (i < s.size() && s[i] == '.') {
    ++i;
    for (; i < s.size() && s[i] >= '0' && s[i] <= '9'; ++i) {
      digits.push_back(s[i]);
      --exponent;
      seen_digit = true;
    }
  }
  if (i < s.size() && (s[i] == 'e' || s[i] == 'E')) {
    ++i;
    long e = 0;
    auto [ptr, ec] = std::from_chars(s.data() + i, s.data() + s.size(), e);
    if (ec != std::errc() || ptr == s.data() + i) {
      fail(ErrorCode::Parse, "malformed exponent in '" + std::string(token) + "'");
    }
    i = static_cast<std::size_t>(ptr - s.data());
    exponent += e;
  }
  if (!seen_digit || i != s.size()) {
    fail(ErrorCode::Parse, "malformed number '" + std::string(token) + "'");
  }
  if (exponent > 4000 || exponent < -4000) {
    fail(ErrorCode::Parse, "exponent out of range in '" + std::string(token) + "'");
  }
  BigInt mantissa(digits, 10);
  if (negative) mantissa = -mantissa;
  BigInt scale;
  mpz_ui_pow_ui(scale.get_mpz_t(), 10, static_cast<unsigned long>(exponent < 0 ? -exponent : exponent));
  Rational r = exponent < 0 ? Rational(mantissa, scale) : Rational(mantissa * scale);
  r.canonicalize();
  return r;
}

PointSet read_point_set(std::istream& in) {
  std::string line;
  std::size_t line_no = 0;
  auto next_line = [&](std::string& out) {
    while (std::getline(in, out)) {
      ++line_no;
      auto first = out.find_first_not_of(" \t\r");
      if (first == std::string::npos || out[first] == '#') continue;
      return true;
    }
    return false;
  };
  auto where = [&] { return "line " + std::to_string(line_no) + ": "; };

  if (!next_line(line)) fail(ErrorCode::Parse, "missing header line 'd n mode'");
  std::istringstream header(line);
  long d = 0;
  long long n = -1;
  std::string mode;
  if (!(header >> d >> n >> mode)) fail(ErrorCode::Parse, where() + "expected 'd n mode'");
  std::string extra;
  if (header >> extra) fail(ErrorCode::Parse, where() + "trailing token in header");
  if (d < 2) fail(ErrorCode::Parse, where() + "dimension must be at least 2");
  if (n < 0) fail(ErrorCode::Parse, where() + "negative point count");
  if (mode != "exact" && mode != "float") {
    fail(ErrorCode::Parse, where() + "mode must be 'exact' or 'float', got '" + mode + "'");
  }
  const bool exact = mode == "exact";
  const auto dim = static_cast<std::size_t>(d);
  std::vector<Rational> rationals;
  std::vector<double> doubles;
  for (long long row = 0; row < n; ++row) {
    if (!next_line(line)) {
      fail(ErrorCode::Parse, "expected " + std::to_string(n) + " rows, found " + std::to_string(row));
    }
    std::istringstream fields(line);
    std::string token;
    std::size_t count = 0;
    while (fields >> token) {
      ++count;
      if (count > dim) break;
      try {
        if (exact) {
          rationals.push_back(parse_rational(token));
        } else {
          char* end = nullptr;
          errno = 0;
          double v = std::strtod(token.c_str(), &end);
          if (end != token.c_str() + token.size() || errno == ERANGE) {
            fail(ErrorCode::Parse, "malformed float '" + token + "'");
          }
          doubles.push_back(v);
        }
      } catch (const Error& e) {
        fail(ErrorCode::Parse, where() + e.what());
      }
    }
    if (count != dim) {
      fail(ErrorCode::Parse, where() + "expected " + std::to_string(dim) + " coordinates");
    }
  }
  if (next_line(line)) fail(ErrorCode::Parse, where() + "unexpected data after last row");
  try {
    return exact ? PointSet::exact(static_cast<int>(d), std::move(rationals))
                 : PointSet::floating(static_cast<int>(d), std::move(doubles));
  } catch (const Error& e) {
    fail(ErrorCode::Parse, e.what());
  }
}

PointSet parse_point_set(std::string_view text) {
  std::istringstream in{std::string(text)};
  return read_point_set(in);
}

PointSet read_point_set_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) fail(ErrorCode::Io, "cannot open point-set file '" + path + "'");
  return read_point_set(in);
}

void write_point_set(std::ostream& out, const PointSet& points) {
  const auto d = static_cast<std::size_t>(points.dimension());
  out << points.dimension() << ' ' << points.size() << ' ' << mode_name(points.mode()) << '\n';
  char buf[64];
  for (std::size_t i = 0; i < points.size(); ++i) {
    for (std::size_t k = 0; k < d; ++k) {
      if (k) out << ' ';
      if (points.mode() == NumberMode::Exact) {
        const Rational& r = points.exact_row(i)[k];
        out << r.get_num().get_str() << '/' << r.get_den().get_str();
      } else {
        std::snprintf(buf, sizeof buf, "%.17g", points.row(i)[k]);
        out << buf;
      }
    }
    out << '\n';
  }
}

std::string format_point_set(const PointSet& points) {
  std::ostringstream out;
  write_point_set(out, points);
  return out.str();
}

void write_point_set_file(const std::string& path, const PointSet& points) {
  std::ofstream out(path);
  if (!out) fail(ErrorCode::Io, "cannot write point-set file '" + path + "'");
  write_point_set(out, points);
  if (!out) fail(ErrorCode::Io, "write failed for '" + path + "'");
}

}  // namespace dirlab
