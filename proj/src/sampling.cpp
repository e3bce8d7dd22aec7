#include "cpr/sampling.hpp"

#include <nlohmann/json.hpp>

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <sstream>

#include "cpr/errors.hpp"

namespace cpr {

namespace {

constexpr double kPi = 3.14159265358979323846;

std::uint64_t splitmix64(std::uint64_t x) {
  x += 0x9e3779b97f4a7c15ULL;
  x = (x ^ (x >> 30)) * 0xbf58476d1ce4e5b9ULL;
  x = (x ^ (x >> 27)) * 0x94d049bb133111ebULL;
  return x ^ (x >> 31);
}

// Deterministic uniform in [-1, 1] independent of library distributions.
struct UniformStream {
  std::uint64_t state;
  explicit UniformStream(std::uint64_t seed) : state(seed) {}
  double next() {
    state = splitmix64(state);
    const double u = static_cast<double>(state >> 11) * 0x1.0p-53;  // [0,1)
    return 2.0 * u - 1.0;
  }
};

std::vector<double> chebyshev_nodes(int count, double lo, double hi) {
  std::vector<double> pts(count);
  for (int i = 0; i < count; ++i) {
    const double t = std::cos((2.0 * i + 1.0) * kPi / (2.0 * count));  // (-1,1)
    pts[i] = 0.5 * (lo + hi) + 0.5 * (hi - lo) * t;
  }
  std::sort(pts.begin(), pts.end());
  return pts;
}

nlohmann::json doubles_to_json(const std::vector<double>& v) {
  nlohmann::json a = nlohmann::json::array();
  for (double x : v) a.push_back(x);
  return a;
}

std::vector<double> doubles_from_json(const nlohmann::json& a) {
  std::vector<double> v;
  for (const auto& x : a) v.push_back(x.get<double>());
  return v;
}

}  // namespace

nlohmann::json NodeSet::to_json() const {
  return {{"gamma", doubles_to_json(gamma)},
          {"gamma_prime", doubles_to_json(gamma_prime)},
          {"period", period}};
}

NodeSet NodeSet::from_json(const nlohmann::json& j) {
  NodeSet n;
  n.gamma = doubles_from_json(j.at("gamma"));
  n.gamma_prime = doubles_from_json(j.at("gamma_prime"));
  n.period = j.at("period").get<double>();
  return n;
}

NodeSet default_nodes(int order, double period) {
  if (order < 3) throw SpecError("Hermite pathway requires N >= 3");
  if (!(period > 0.0)) throw SpecError("period must be positive");
  NodeSet n;
  n.period = period;
  n.gamma = chebyshev_nodes(2 * order - 1, 0.01 * period, 0.99 * period);
  n.gamma_prime = chebyshev_nodes(2 * order - 5, 0.013 * period, 0.987 * period);
  return n;
}

NodeSet nodes_from_list(std::vector<double> gamma, double period) {
  NodeSet n;
  n.gamma = std::move(gamma);
  n.period = period;
  return n;
}

SampleSet take_samples(const CoeffSeq& c, const Generator& g, const NodeSet& nodes,
                       double noise, std::uint64_t seed) {
  if (noise < 0.0) throw SpecError("noise level must be nonnegative");
  SampleSet s;
  s.nodes = nodes;
  s.noise = noise;
  s.seed = seed;
  if (c.empty()) return s;

  const int L = g.support_length();
  const double p = nodes.period;

  // ||f||_inf over the support by dense evaluation (4096 points/interval).
  double sup = 0.0;
  for (int j = c.k_minus(); j <= c.k_plus() + L - 1; ++j) {
    for (int i = 0; i < 4096; ++i) {
      const double u = j + (i + 0.5) / 4096.0;
      sup = std::max(sup, std::abs(eval_signal(c, g, u)));
    }
  }
  s.sup_norm = sup;
  const double noise_scale = sup * sup;

  for (int j = c.k_minus(); j <= c.k_plus() + L - 1; ++j) {
    IntervalSamples iv;
    iv.j = j;
    UniformStream rng(splitmix64(seed ^ (0x51ed2701ULL + 0x9e3779b97f4a7c15ULL *
                                          static_cast<std::uint64_t>(static_cast<std::int64_t>(j)))));
    iv.f.reserve(nodes.gamma.size());
    for (double gamma : nodes.gamma) {
      const double u = gamma / p + j;  // normalized coordinate
      double v = std::norm(eval_signal(c, g, u));
      if (noise > 0.0) v += noise_scale * noise * rng.next();
      iv.f.push_back(std::max(v, 0.0));
    }
    iv.df.reserve(nodes.gamma_prime.size());
    for (double gp : nodes.gamma_prime) {
      const double u = gp / p + j;
      // d/dt of g(t/p - k) carries 1/p.
      double v = std::norm(eval_signal_deriv(c, g, u)) / (p * p);
      if (noise > 0.0) v += noise_scale * noise * rng.next();
      iv.df.push_back(std::max(v, 0.0));
    }
    s.intervals.push_back(std::move(iv));
  }
  return s;
}

nlohmann::json SampleSet::to_json() const {
  nlohmann::json ivs = nlohmann::json::array();
  for (const auto& iv : intervals)
    ivs.push_back({{"j", iv.j}, {"f", doubles_to_json(iv.f)}, {"df", doubles_to_json(iv.df)}});
  return {{"nodes", nodes.to_json()},
          {"noise", noise},
          {"seed", seed},
          {"sup_norm", sup_norm},
          {"intervals", ivs}};
}

SampleSet SampleSet::from_json(const nlohmann::json& j) {
  SampleSet s;
  s.nodes = NodeSet::from_json(j.at("nodes"));
  s.noise = j.at("noise").get<double>();
  s.seed = j.at("seed").get<std::uint64_t>();
  s.sup_norm = j.value("sup_norm", 0.0);
  for (const auto& ivj : j.at("intervals")) {
    IntervalSamples iv;
    iv.j = ivj.at("j").get<int>();
    iv.f = doubles_from_json(ivj.at("f"));
    iv.df = doubles_from_json(ivj.at("df"));
    s.intervals.push_back(std::move(iv));
  }
  return s;
}

std::string SampleSet::to_csv() const {
  std::ostringstream out;
  out << "j,node,kind,value\n";
  char buf[64];
  auto emit = [&](int j, double node, const char* kind, double value) {
    std::snprintf(buf, sizeof(buf), "%d,%.17g,%s,%.17g\n", j, node, kind, value);
    out << buf;
  };
  for (const auto& iv : intervals) {
    for (std::size_t i = 0; i < iv.f.size(); ++i) emit(iv.j, nodes.gamma[i], "f", iv.f[i]);
    for (std::size_t i = 0; i < iv.df.size(); ++i) emit(iv.j, nodes.gamma_prime[i], "df", iv.df[i]);
  }
  return out.str();
}

SampleSet SampleSet::from_csv(const std::string& text, const NodeSet& nodes, double noise,
                              std::uint64_t seed) {
  SampleSet s;
  s.nodes = nodes;
  s.noise = noise;
  s.seed = seed;
  std::istringstream in(text);
  std::string line;
  if (!std::getline(in, line) || line.rfind("j,node,kind,value", 0) != 0)
    throw SpecError("sample CSV: missing header");
  auto find_interval = [&](int j) -> IntervalSamples& {
    for (auto& iv : s.intervals)
      if (iv.j == j) return iv;
    s.intervals.push_back(IntervalSamples{j, {}, {}});
    return s.intervals.back();
  };
  int lineno = 1;
  while (std::getline(in, line)) {
    ++lineno;
    if (line.empty()) continue;
    int j;
    double node, value;
    char kind[4];
    if (std::sscanf(line.c_str(), "%d,%lf,%3[^,],%lf", &j, &node, kind, &value) != 4)
      throw SpecError("sample CSV: bad row at line " + std::to_string(lineno));
    auto& iv = find_interval(j);
    if (kind[0] == 'f' && kind[1] == '\0')
      iv.f.push_back(value);
    else if (kind[0] == 'd' && kind[1] == 'f')
      iv.df.push_back(value);
    else
      throw SpecError("sample CSV: unknown kind at line " + std::to_string(lineno));
  }
  return s;
}

}  // namespace cpr
