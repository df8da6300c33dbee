#include "tomolift/matrix_io.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

namespace tomolift {

namespace {

double parse_double(std::string_view s, std::string_view whole) {
  double x = 0.0;
  const auto* first = s.data();
  const auto* last = s.data() + s.size();
  if (!s.empty() && s.front() == '+') ++first;
  const auto [ptr, ec] = std::from_chars(first, last, x);
  if (ec != std::errc() || ptr != last) {
    throw std::invalid_argument("malformed complex entry '" + std::string(whole) + "'");
  }
  return x;
}

}  // namespace

std::string format_complex(Complex z) {
  char buf[96];
  const double im = z.imag();
  std::snprintf(buf, sizeof buf, "%.17g%c%.17gi", z.real(), std::signbit(im) ? '-' : '+', std::abs(im));
  return buf;
}

Complex parse_complex(std::string_view token) {
  if (token.size() < 2 || token.back() != 'i') {
    throw std::invalid_argument("malformed complex entry '" + std::string(token) + "'");
  }
  const std::string_view body = token.substr(0, token.size() - 1);
  // The imaginary part starts at the last sign that is not a leading sign or
  // an exponent sign.
  std::size_t split = std::string_view::npos;
  for (std::size_t i = body.size(); i-- > 1;) {
    if ((body[i] == '+' || body[i] == '-') && body[i - 1] != 'e' && body[i - 1] != 'E') {
      split = i;
      break;
    }
  }
  if (split == std::string_view::npos) {
    throw std::invalid_argument("malformed complex entry '" + std::string(token) + "'");
  }
  return {parse_double(body.substr(0, split), token), parse_double(body.substr(split), token)};
}

void write_matrix(std::ostream& os, const ComplexMatrix& m) {
  os << "dim " << m.rows() << '\n';
  for (Eigen::Index i = 0; i < m.rows(); ++i) {
    for (Eigen::Index j = 0; j < m.cols(); ++j) {
      if (j > 0) os << ' ';
      os << format_complex(m(i, j));
    }
    os << '\n';
  }
}

void write_matrix_file(const std::filesystem::path& path, const ComplexMatrix& m) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string() + " for writing");
  write_matrix(out, m);
  if (!out) throw std::runtime_error("failed writing " + path.string());
}

ComplexMatrix read_matrix(std::istream& is) {
  std::string keyword;
  long long d = 0;
  if (!(is >> keyword >> d) || keyword != "dim" || d < 1 || d > 1024) {
    throw std::invalid_argument("matrix file must start with 'dim <d>'");
  }
  ComplexMatrix m(d, d);
  for (long long i = 0; i < d; ++i) {
    for (long long j = 0; j < d; ++j) {
      std::string tok;
      if (!(is >> tok)) throw std::invalid_argument("matrix file ended early");
      m(i, j) = parse_complex(tok);
    }
  }
  std::string extra;
  if (is >> extra) throw std::invalid_argument("unexpected trailing content in matrix file");
  return m;
}

DensityMatrix read_density_matrix(std::istream& is) { return DensityMatrix(read_matrix(is)); }

DensityMatrix read_density_matrix_file(const std::filesystem::path& path) {
  std::ifstream in(path);
  if (!in) throw std::invalid_argument("cannot open state file " + path.string());
  return read_density_matrix(in);
}

}  // namespace tomolift
