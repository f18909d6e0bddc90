#include "madrl/checkpoint.hpp"

#include <array>
#include <bit>
#include <cstdint>
#include <cstring>
#include <fstream>

namespace madrl {

static_assert(std::endian::native == std::endian::little, "checkpoint I/O assumes a little-endian host");

namespace {

constexpr std::array<char, 8> kMagic{'M', 'A', 'D', 'R', 'L', 'C', 'K', '\0'};
constexpr std::uint64_t kVersion = 1;

class Writer {
 public:
  explicit Writer(const std::filesystem::path& path) : out_(path, std::ios::binary) {
    if (!out_) throw std::runtime_error("cannot write checkpoint " + path.string());
  }
  void u64(std::uint64_t v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
  void f64(double v) { out_.write(reinterpret_cast<const char*>(&v), sizeof v); }
  void str(const std::string& s) {
    u64(s.size());
    out_.write(s.data(), static_cast<std::streamsize>(s.size()));
  }
  void raw(const char* p, std::size_t n) { out_.write(p, static_cast<std::streamsize>(n)); }
  void network(const Network& net) {
    u64(net.layers().size());
    for (const auto& l : net.layers()) {
      u64(static_cast<std::uint64_t>(l.weight.rows()));
      u64(static_cast<std::uint64_t>(l.weight.cols()));
      for (Eigen::Index r = 0; r < l.weight.rows(); ++r)
        for (Eigen::Index c = 0; c < l.weight.cols(); ++c) f64(l.weight(r, c));
      for (Eigen::Index r = 0; r < l.bias.size(); ++r) f64(l.bias[r]);
    }
  }

 private:
  std::ofstream out_;
};

class Reader {
 public:
  explicit Reader(const std::filesystem::path& path) : in_(path, std::ios::binary), path_(path.string()) {
    if (!in_) throw std::runtime_error("cannot open checkpoint " + path_);
  }
  void read(char* p, std::size_t n) {
    in_.read(p, static_cast<std::streamsize>(n));
    if (!in_) throw std::runtime_error("truncated checkpoint " + path_);
  }
  std::uint64_t u64() {
    std::uint64_t v;
    read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
  }
  double f64() {
    double v;
    read(reinterpret_cast<char*>(&v), sizeof v);
    return v;
  }
  std::string str() {
    const auto n = u64();
    if (n > (1u << 20)) throw std::runtime_error("corrupt checkpoint " + path_);
    std::string s(n, '\0');
    read(s.data(), n);
    return s;
  }
  Network network() {
    const auto count = u64();
    if (count > 64) throw std::runtime_error("corrupt checkpoint " + path_);
    std::vector<DenseLayer<double>> layers;
    for (std::uint64_t k = 0; k < count; ++k) {
      const auto rows = static_cast<Eigen::Index>(u64());
      const auto cols = static_cast<Eigen::Index>(u64());
      if (rows <= 0 || cols <= 0 || rows * cols > (Eigen::Index{1} << 28))
        throw std::runtime_error("corrupt checkpoint " + path_);
      DenseLayer<double> l{Eigen::MatrixXd(rows, cols), Eigen::VectorXd(rows)};
      for (Eigen::Index r = 0; r < rows; ++r)
        for (Eigen::Index c = 0; c < cols; ++c) l.weight(r, c) = f64();
      for (Eigen::Index r = 0; r < rows; ++r) l.bias[r] = f64();
      if (!layers.empty() && layers.back().weight.rows() != cols)
        throw std::runtime_error("inconsistent layer shapes in checkpoint " + path_);
      layers.push_back(std::move(l));
    }
    return Network(std::move(layers));
  }

 private:
  std::ifstream in_;
  std::string path_;
};

}  // namespace

void save_checkpoint(const Checkpoint& ckpt, const std::filesystem::path& path) {
  Writer w(path);
  w.raw(kMagic.data(), kMagic.size());
  w.u64(kVersion);
  w.u64(ckpt.provenance.size());
  for (const auto& [k, v] : ckpt.provenance) {
    w.str(k);
    w.str(v);
  }
  w.network(ckpt.params.actor);
  w.network(ckpt.params.critic);
}

Checkpoint load_checkpoint(const std::filesystem::path& path) {
  Reader r(path);
  std::array<char, 8> magic{};
  r.read(magic.data(), magic.size());
  if (magic != kMagic) throw std::runtime_error("not a checkpoint file: " + path.string());
  if (const auto version = r.u64(); version != kVersion)
    throw std::runtime_error("unsupported checkpoint version " + std::to_string(version));
  Checkpoint ckpt;
  const auto entries = r.u64();
  for (std::uint64_t i = 0; i < entries; ++i) {
    auto k = r.str();
    ckpt.provenance[k] = r.str();
  }
  ckpt.params.actor = r.network();
  ckpt.params.critic = r.network();
  return ckpt;
}

}  // namespace madrl
