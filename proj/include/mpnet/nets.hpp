#pragma once

#include <array>
#include <cstddef>
#include <iosfwd>
#include <span>
#include <string>
#include <vector>

#include "mpnet/rng.hpp"

namespace mpnet {

enum class Arch { mlp, scn, fscn };

std::string to_string(Arch arch);
Arch parse_arch(const std::string& name);

/// Layer sizes run from the feature dimension to the two controls, e.g.
/// {4, 1, 2}. `with_vvc` appends the learned velocity-constraint gain.
struct NetSpec {
  Arch arch = Arch::mlp;
  std::vector<int> layers;
  bool with_vvc = false;

  int inputs() const { return layers.front(); }
  int outputs() const { return layers.back(); }
  int num_layers() const { return static_cast<int>(layers.size()) - 1; }

  /// Throws std::invalid_argument on an ill-formed spec.
  void validate() const;

  bool operator==(const NetSpec&) const = default;
};

/// Library-free tanh: Lambert continued fraction, clamped to [-1, 1].
double tanh_approx(double x);

/// Offsets of every block inside the flat parameter vector. Order: per layer
/// W (row-major) then b; FSCN hidden skips K(j,l) for l ascending then j
/// ascending, then output skips K(j,N_l); SCN output skip K(0,N_l); then c;
/// then the velocity-constraint gain.
struct NetLayout {
  struct Block {
    std::size_t offset = 0;
    int rows = 0;
    int cols = 0;
  };
  std::vector<Block> weights;                   // W(l), l = 0..N_l-1
  std::vector<std::size_t> biases;              // b(l)
  std::vector<std::vector<Block>> skips;        // skips[l][j]: K(j,l), l = 1..N_l (index l)
  std::size_t c = 0;
  std::size_t vvc = 0;
  std::size_t size = 0;

  explicit NetLayout(const NetSpec& spec);
};

std::size_t param_count(const NetSpec& spec);

struct ParamVec {
  NetSpec spec;
  std::vector<double> theta;

  /// Gain of the velocity-constraint law; 0 when the spec carries none.
  double vvc_gain() const { return spec.with_vvc ? theta.back() : 0.0; }
};

/// Every entry drawn as 0.001 * N(0,1).
ParamVec init_params(const NetSpec& spec, Rng& rng);

/// Evaluates the network on one feature vector. Holds scratch buffers, so an
/// instance must not be shared between threads.
class Controller {
public:
  Controller(const NetSpec& spec, std::span<const double> theta);

  /// Unclamped control pair. Throws std::invalid_argument on a feature-size mismatch.
  std::array<double, 2> operator()(std::span<const double> features) const;

  const NetSpec& spec() const { return spec_; }

private:
  NetSpec spec_;
  NetLayout layout_;
  std::span<const double> theta_;
  mutable std::vector<std::vector<double>> s_in_;
  mutable std::vector<std::vector<double>> s_out_;
};

std::array<double, 2> forward(const ParamVec& params, std::span<const double> features);

/// Header line then one shortest-round-trip decimal per line.
void write_params(std::ostream& out, const ParamVec& params);
ParamVec read_params(std::istream& in);

}  // namespace mpnet
