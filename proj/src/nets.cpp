#include "mpnet/nets.hpp"

#include <istream>
#include <ostream>
#include <sstream>
#include <stdexcept>

#include "mpnet/io.hpp"

namespace mpnet {

std::string to_string(Arch arch) {
  switch (arch) {
    case Arch::mlp: return "mlp";
    case Arch::scn: return "scn";
    case Arch::fscn: return "fscn";
  }
  return "?";
}

Arch parse_arch(const std::string& name) {
  if (name == "mlp" || name == "MLP") return Arch::mlp;
  if (name == "scn" || name == "SCN") return Arch::scn;
  if (name == "fscn" || name == "FSCN") return Arch::fscn;
  throw std::invalid_argument("unknown network architecture '" + name + "'");
}

void NetSpec::validate() const {
  if (layers.size() < 2) throw std::invalid_argument("network needs at least an input and an output layer");
  for (int n : layers) {
    if (n < 1) throw std::invalid_argument("network layer sizes must be >= 1");
  }
  if (outputs() != 2) throw std::invalid_argument("network must have exactly 2 outputs");
}

double tanh_approx(double x) {
  if (x >= 20.0) return 1.0;
  if (x <= -20.0) return -1.0;
  const double x2 = x * x;
  // x / (1 + x^2 / (3 + x^2 / (5 + ... + x^2 / 21)))
  double acc = 21.0;
  for (int k = 10; k >= 1; --k) acc = (2 * k - 1) + x2 / acc;
  const double t = x / acc;
  if (t > 1.0) return 1.0;
  if (t < -1.0) return -1.0;
  return t;
}

NetLayout::NetLayout(const NetSpec& spec) {
  spec.validate();
  const auto& N = spec.layers;
  const int Nl = spec.num_layers();
  std::size_t at = 0;
  auto block = [&at](int rows, int cols) {
    Block b{at, rows, cols};
    at += static_cast<std::size_t>(rows) * static_cast<std::size_t>(cols);
    return b;
  };
  for (int l = 0; l < Nl; ++l) {
    weights.push_back(block(N[l], N[l + 1]));
    biases.push_back(at);
    at += static_cast<std::size_t>(N[l + 1]);
  }
  skips.resize(static_cast<std::size_t>(Nl) + 1);
  if (spec.arch == Arch::fscn) {
    for (int l = 1; l <= Nl; ++l) {
      for (int j = 0; j < l; ++j) skips[l].push_back(block(N[j], N[l]));
    }
  } else if (spec.arch == Arch::scn) {
    skips[Nl].push_back(block(N[0], N[Nl]));
  }
  c = at;
  if (spec.arch != Arch::mlp) at += static_cast<std::size_t>(N[Nl]);
  vvc = at;
  if (spec.with_vvc) ++at;
  size = at;
}

std::size_t param_count(const NetSpec& spec) { return NetLayout(spec).size; }

ParamVec init_params(const NetSpec& spec, Rng& rng) {
  ParamVec params{spec, rng.fill_gaussian(param_count(spec))};
  for (double& v : params.theta) v *= 0.001;
  return params;
}

Controller::Controller(const NetSpec& spec, std::span<const double> theta)
    : spec_(spec), layout_(spec), theta_(theta) {
  if (theta.size() != layout_.size) {
    throw std::invalid_argument("parameter vector has " + std::to_string(theta.size()) + " entries, network needs " +
                                std::to_string(layout_.size));
  }
  const int Nl = spec.num_layers();
  s_in_.resize(static_cast<std::size_t>(Nl));
  s_out_.resize(static_cast<std::size_t>(Nl));
  for (int l = 0; l < Nl; ++l) {
    s_in_[l].assign(static_cast<std::size_t>(spec.layers[l]), 0.0);
    s_out_[l].assign(static_cast<std::size_t>(spec.layers[l + 1]), 0.0);
  }
}

namespace {

// out += in * K for a row-major rows x cols block.
void accumulate(std::span<const double> theta, const NetLayout::Block& K, const std::vector<double>& in,
                double* out) {
  for (int r = 0; r < K.rows; ++r) {
    const double* row = theta.data() + K.offset + static_cast<std::size_t>(r) * K.cols;
    const double v = in[r];
    for (int c = 0; c < K.cols; ++c) out[c] += v * row[c];
  }
}

}  // namespace

std::array<double, 2> Controller::operator()(std::span<const double> features) const {
  if (features.size() != static_cast<std::size_t>(spec_.inputs())) {
    throw std::invalid_argument("feature vector has " + std::to_string(features.size()) + " entries, network expects " +
                                std::to_string(spec_.inputs()));
  }
  const int Nl = spec_.num_layers();
  s_in_[0].assign(features.begin(), features.end());
  for (int l = 0; l < Nl; ++l) {
    if (l > 0) {
      s_in_[l] = s_out_[l - 1];
      for (int j = 0; j < static_cast<int>(layout_.skips[l].size()); ++j) {
        accumulate(theta_, layout_.skips[l][j], s_in_[j], s_in_[l].data());
      }
    }
    auto& out = s_out_[l];
    const double* bias = theta_.data() + layout_.biases[l];
    for (std::size_t c = 0; c < out.size(); ++c) out[c] = bias[c];
    accumulate(theta_, layout_.weights[l], s_in_[l], out.data());
    for (double& v : out) v = tanh_approx(v);
  }
  std::array<double, 2> a{s_out_[Nl - 1][0], s_out_[Nl - 1][1]};
  if (spec_.arch != Arch::mlp) {
    const auto& out_skips = layout_.skips[Nl];
    for (int j = 0; j < static_cast<int>(out_skips.size()); ++j) accumulate(theta_, out_skips[j], s_in_[j], a.data());
    a[0] += theta_[layout_.c];
    a[1] += theta_[layout_.c + 1];
  }
  return a;
}

std::array<double, 2> forward(const ParamVec& params, std::span<const double> features) {
  return Controller(params.spec, params.theta)(features);
}

void write_params(std::ostream& out, const ParamVec& params) {
  out << "mpnet-params arch=" << to_string(params.spec.arch) << " layers=";
  for (std::size_t i = 0; i < params.spec.layers.size(); ++i) out << (i ? "," : "") << params.spec.layers[i];
  out << " vvc=" << (params.spec.with_vvc ? 1 : 0) << " count=" << params.theta.size() << '\n';
  for (double v : params.theta) out << format_double(v) << '\n';
}

ParamVec read_params(std::istream& in) {
  std::string header;
  if (!std::getline(in, header)) throw std::runtime_error("parameter file is empty");
  std::istringstream fields(header);
  std::string tag;
  fields >> tag;
  if (tag != "mpnet-params") throw std::runtime_error("not a parameter block: '" + header + "'");
  ParamVec params;
  long long count = -1;
  bool have_arch = false, have_layers = false, have_vvc = false;
  std::string field;
  while (fields >> field) {
    const auto eq = field.find('=');
    if (eq == std::string::npos) throw std::runtime_error("malformed header field '" + field + "'");
    const std::string key = field.substr(0, eq), value = field.substr(eq + 1);
    if (key == "arch") {
      params.spec.arch = parse_arch(value);
      have_arch = true;
    } else if (key == "layers") {
      std::istringstream sizes(value);
      std::string n;
      while (std::getline(sizes, n, ',')) params.spec.layers.push_back(static_cast<int>(parse_int(n)));
      have_layers = true;
    } else if (key == "vvc") {
      params.spec.with_vvc = parse_int(value) != 0;
      have_vvc = true;
    } else if (key == "count") {
      count = parse_int(value);
    } else {
      throw std::runtime_error("unknown header field '" + key + "'");
    }
  }
  if (!have_arch || !have_layers || !have_vvc || count < 0) {
    throw std::runtime_error("incomplete parameter header: '" + header + "'");
  }
  params.spec.validate();
  if (static_cast<std::size_t>(count) != param_count(params.spec)) {
    throw std::runtime_error("parameter count in header does not match the network");
  }
  params.theta.reserve(static_cast<std::size_t>(count));
  std::string line;
  for (long long i = 0; i < count; ++i) {
    if (!std::getline(in, line)) throw std::runtime_error("parameter file truncated");
    params.theta.push_back(parse_double(line));
  }
  return params;
}

}  // namespace mpnet
