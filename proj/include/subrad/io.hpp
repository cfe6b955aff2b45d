#pragma once

#include <bit>
#include <cstdint>
#include <cstdio>
#include <cstring>
#include <filesystem>
#include <fstream>
#include <string>

#include <nlohmann/json.hpp>

#include "subrad/observables.hpp"
#include "subrad/spectral.hpp"

// File output: CSV with full double precision (17 significant digits, so
// results can be regression-locked bit for bit), JSON summaries, and a
// compact binary dump for operators and state snapshots.
//
// Binary layout (little-endian): 8-byte magic ("SUBRDOP1" for operators,
// "SUBRDST1" for states), uint64 dimension, then row-major complex
// doubles as (re, im) pairs.

namespace subrad::io {

static_assert(std::endian::native == std::endian::little,
              "binary dumps are defined little-endian");

inline std::string format_double(double v) {
  char buf[32];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

inline void write_series_csv(const TimeSeries& s, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "t,p_sur,activity,com,width\n";
  for (std::size_t i = 0; i < s.size(); ++i) {
    out << format_double(s.times[i]) << ',' << format_double(s.p_sur[i]) << ','
        << format_double(s.activity[i]) << ',' << format_double(s.com[i]) << ','
        << format_double(s.width[i]) << '\n';
  }
}

// Populations file: t, P_sur, <K>, then per-site |c_alpha^m|^2 columns in
// the internal level order (+1, 0, -1), on the population sample grid.
inline void write_populations_csv(const TimeSeries& s,
                                  const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "t,p_sur,activity";
  for (int site = 0; site < s.n; ++site)
    for (const char* level : {"p", "z", "m"})
      out << ",pop" << site << '_' << level;
  out << '\n';
  for (std::size_t i = 0; i < s.populations.size(); ++i) {
    const std::size_t idx = s.pop_indices[i];
    out << format_double(s.pop_times[i]) << ',' << format_double(s.p_sur[idx])
        << ',' << format_double(s.activity[idx]);
    for (int j = 0; j < s.populations[i].size(); ++j)
      out << ',' << format_double(s.populations[i](j));
    out << '\n';
  }
}

inline void write_spectrum_csv(const ModeSpectrum& s,
                               const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "k,p_a_over_pi,v_k,gamma_k,subradiant\n";
  for (int i = 0; i < s.n; ++i) {
    out << s.k[i] << ',' << format_double(s.p_a[i] / M_PI) << ','
        << format_double(s.energy[i]) << ',' << format_double(s.decay[i]) << ','
        << (s.subradiant(i) ? 1 : 0) << '\n';
  }
}

inline void write_operator_csv(const ComplexMatrix& m,
                               const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << "row,col,re,im\n";
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c)
      out << r << ',' << c << ',' << format_double(m(r, c).real()) << ','
          << format_double(m(r, c).imag()) << '\n';
}

namespace detail {

inline void write_complex_block(std::ofstream& out, const Complex* data,
                                std::size_t count) {
  out.write(reinterpret_cast<const char*>(data),
            static_cast<std::streamsize>(count * sizeof(Complex)));
}

}  // namespace detail

inline void write_operator_binary(const ComplexMatrix& m,
                                  const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.write("SUBRDOP1", 8);
  const std::uint64_t dim = static_cast<std::uint64_t>(m.rows());
  out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
  // Row-major on disk.
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const Complex v = m(r, c);
      detail::write_complex_block(out, &v, 1);
    }
}

inline ComplexMatrix read_operator_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (std::memcmp(magic, "SUBRDOP1", 8) != 0)
    throw std::runtime_error("bad operator dump magic in " + path.string());
  std::uint64_t dim = 0;
  in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
  ComplexMatrix m(dim, dim);
  for (std::uint64_t r = 0; r < dim; ++r)
    for (std::uint64_t c = 0; c < dim; ++c) {
      Complex v;
      in.read(reinterpret_cast<char*>(&v), sizeof(v));
      m(r, c) = v;
    }
  if (!in) throw std::runtime_error("truncated operator dump " + path.string());
  return m;
}

inline void write_state_binary(const ComplexVector& v,
                               const std::filesystem::path& path) {
  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out.write("SUBRDST1", 8);
  const std::uint64_t dim = static_cast<std::uint64_t>(v.size());
  out.write(reinterpret_cast<const char*>(&dim), sizeof(dim));
  detail::write_complex_block(out, v.data(), v.size());
}

inline ComplexVector read_state_binary(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("cannot open " + path.string());
  char magic[8];
  in.read(magic, 8);
  if (std::memcmp(magic, "SUBRDST1", 8) != 0)
    throw std::runtime_error("bad state dump magic in " + path.string());
  std::uint64_t dim = 0;
  in.read(reinterpret_cast<char*>(&dim), sizeof(dim));
  ComplexVector v(dim);
  in.read(reinterpret_cast<char*>(v.data()),
          static_cast<std::streamsize>(dim * sizeof(Complex)));
  if (!in) throw std::runtime_error("truncated state dump " + path.string());
  return v;
}

inline void write_json(const nlohmann::json& j, const std::filesystem::path& path) {
  std::ofstream out(path);
  if (!out) throw std::runtime_error("cannot open " + path.string());
  out << j.dump(2) << '\n';
}

}  // namespace subrad::io
