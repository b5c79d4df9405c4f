#include "risfdd/channel_io.hpp"

#include <cstring>
#include <fstream>
#include <stdexcept>

namespace risfdd {

namespace {

constexpr std::uint32_t kMagic = 0x48434652;  // "RFCH" little-endian
constexpr std::uint32_t kFormatVersion = 1;

void write_matrix(std::ofstream& out, const MatC& m) {
  for (Eigen::Index r = 0; r < m.rows(); ++r)
    for (Eigen::Index c = 0; c < m.cols(); ++c) {
      const double buf[2] = {m(r, c).real(), m(r, c).imag()};
      out.write(reinterpret_cast<const char*>(buf), sizeof(buf));
    }
}

MatC read_matrix(std::ifstream& in, std::int32_t rows, std::int32_t cols) {
  MatC m(rows, cols);
  for (std::int32_t r = 0; r < rows; ++r)
    for (std::int32_t c = 0; c < cols; ++c) {
      double buf[2];
      in.read(reinterpret_cast<char*>(buf), sizeof(buf));
      m(r, c) = Cplx(buf[0], buf[1]);
    }
  if (!in) throw std::runtime_error("channel dump: truncated file");
  return m;
}

}  // namespace

void save_channels(const std::filesystem::path& path, const ChannelSet& ch,
                   std::uint64_t seed) {
  if (ch.g_dl.rows() != ch.h_dl.rows() || ch.g_dl.rows() != ch.g_ul.rows() ||
      ch.g_dl.rows() != ch.h_ul.rows() || ch.g_dl.cols() != ch.g_ul.cols() ||
      ch.h_dl.cols() != ch.h_ul.cols())
    throw std::invalid_argument("channel dump: inconsistent matrix dimensions");

  std::ofstream out(path, std::ios::binary);
  if (!out) throw std::runtime_error("channel dump: cannot write " + path.string());

  const std::uint32_t header32[2] = {kMagic, kFormatVersion};
  out.write(reinterpret_cast<const char*>(header32), sizeof(header32));
  out.write(reinterpret_cast<const char*>(&seed), sizeof(seed));
  const std::int32_t dims[3] = {static_cast<std::int32_t>(ch.g_dl.rows()),
                                static_cast<std::int32_t>(ch.g_dl.cols()),
                                static_cast<std::int32_t>(ch.h_dl.cols())};
  out.write(reinterpret_cast<const char*>(dims), sizeof(dims));
  write_matrix(out, ch.g_dl);
  write_matrix(out, ch.h_dl);
  write_matrix(out, ch.g_ul);
  write_matrix(out, ch.h_ul);
  if (!out) throw std::runtime_error("channel dump: write failed for " + path.string());
}

ChannelDump load_channels(const std::filesystem::path& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw std::runtime_error("channel dump: cannot open " + path.string());

  std::uint32_t header32[2];
  in.read(reinterpret_cast<char*>(header32), sizeof(header32));
  if (!in || header32[0] != kMagic)
    throw std::runtime_error("channel dump: bad magic in " + path.string());
  if (header32[1] != kFormatVersion)
    throw std::runtime_error("channel dump: unsupported format version");

  ChannelDump dump;
  in.read(reinterpret_cast<char*>(&dump.seed), sizeof(dump.seed));
  std::int32_t dims[3];
  in.read(reinterpret_cast<char*>(dims), sizeof(dims));
  if (!in || dims[0] < 1 || dims[1] < 1 || dims[2] < 1)
    throw std::runtime_error("channel dump: bad dimensions");

  dump.channels.g_dl = read_matrix(in, dims[0], dims[1]);
  dump.channels.h_dl = read_matrix(in, dims[0], dims[2]);
  dump.channels.g_ul = read_matrix(in, dims[0], dims[1]);
  dump.channels.h_ul = read_matrix(in, dims[0], dims[2]);
  in.peek();
  if (!in.eof()) throw std::runtime_error("channel dump: trailing bytes");
  return dump;
}

}  // namespace risfdd
