#include "strip/model.hpp"

#include "strip/errors.hpp"
#include "strip/random.hpp"

#include <algorithm>
#include <cmath>
#include <fstream>
#include <numeric>

namespace strip {

namespace {

template <class... Ts>
struct overloaded : Ts... {
  using Ts::operator()...;
};
template <class... Ts>
overloaded(Ts...) -> overloaded<Ts...>;

constexpr double kSymmetryTolerance = 1e-14;
constexpr double kProbabilityTolerance = 1e-12;

bool finite(double x) { return std::isfinite(x); }

}  // namespace

void validate(const Distribution& dist) {
  std::visit(overloaded{
                 [](const Dirac& d) {
                   if (!finite(d.value)) throw ConfigError("dirac: value must be finite");
                 },
                 [](const Bernoulli& b) {
                   if (!(b.p >= 0.0 && b.p <= 1.0)) throw ConfigError("bernoulli: p must lie in [0, 1]");
                   if (!finite(b.v0) || !finite(b.v1)) throw ConfigError("bernoulli: values must be finite");
                 },
                 [](const Uniform& u) {
                   if (!finite(u.a) || !finite(u.b) || !(u.a <= u.b))
                     throw ConfigError("uniform: need finite a <= b");
                 },
                 [](const FiniteDistribution& f) {
                   if (f.values.empty() || f.values.size() != f.probs.size())
                     throw ConfigError("finite: values and probs must be non-empty and of equal length");
                   double total = 0.0;
                   for (std::size_t i = 0; i < f.values.size(); ++i) {
                     if (!finite(f.values[i])) throw ConfigError("finite: values must be finite");
                     if (!(f.probs[i] >= 0.0 && f.probs[i] <= 1.0))
                       throw ConfigError("finite: probabilities must lie in [0, 1]");
                     total += f.probs[i];
                   }
                   if (std::abs(total - 1.0) > kProbabilityTolerance)
                     throw ConfigError("finite: probabilities must sum to 1");
                 },
             },
             dist);
}

double draw(const Distribution& dist, double u) {
  return std::visit(overloaded{
                        [](const Dirac& d) { return d.value; },
                        [u](const Bernoulli& b) { return u < b.p ? b.v1 : b.v0; },
                        [u](const Uniform& un) { return un.a + (un.b - un.a) * u; },
                        [u](const FiniteDistribution& f) {
                          double acc = 0.0;
                          for (std::size_t i = 0; i < f.values.size(); ++i) {
                            acc += f.probs[i];
                            if (u < acc) return f.values[i];
                          }
                          return f.values.back();
                        },
                    },
                    dist);
}

double max_abs_value(const Distribution& dist) {
  return std::visit(overloaded{
                        [](const Dirac& d) { return std::abs(d.value); },
                        [](const Bernoulli& b) { return std::max(std::abs(b.v0), std::abs(b.v1)); },
                        [](const Uniform& u) { return std::max(std::abs(u.a), std::abs(u.b)); },
                        [](const FiniteDistribution& f) {
                          double m = 0.0;
                          for (double v : f.values) m = std::max(m, std::abs(v));
                          return m;
                        },
                    },
                    dist);
}

std::vector<double> support_points(const Distribution& dist) {
  std::vector<double> pts = std::visit(
      overloaded{
          [](const Dirac& d) { return std::vector<double>{d.value}; },
          [](const Bernoulli& b) {
            std::vector<double> v;
            if (b.p < 1.0) v.push_back(b.v0);
            if (b.p > 0.0) v.push_back(b.v1);
            return v;
          },
          [](const Uniform& u) { return u.a == u.b ? std::vector<double>{u.a} : std::vector<double>{}; },
          [](const FiniteDistribution& f) {
            std::vector<double> v;
            for (std::size_t i = 0; i < f.values.size(); ++i)
              if (f.probs[i] > 0.0) v.push_back(f.values[i]);
            return v;
          },
      },
      dist);
  std::sort(pts.begin(), pts.end());
  pts.erase(std::unique(pts.begin(), pts.end()), pts.end());
  return pts;
}

void DisorderSpec::validate() const {
  if (channels < 1) throw ConfigError("channels must be >= 1");
  if (base_coupling.rows() != channels || base_coupling.cols() != channels)
    throw ConfigError("base_coupling must be channels x channels");
  if (!base_coupling.allFinite()) throw ConfigError("base_coupling must be finite");
  if ((base_coupling - base_coupling.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance)
    throw ConfigError("base_coupling must be symmetric");
  for (const auto& e : random_entries) {
    if (e.channel < 0 || e.channel >= channels) throw ConfigError("random entry channel out of range");
    strip::validate(e.dist);
  }
  if (declared_bound && !(*declared_bound > 0.0 && std::isfinite(*declared_bound)))
    throw ConfigError("v_max must be positive and finite");
}

double DisorderSpec::apriori_bound() const {
  std::vector<double> per_channel(static_cast<std::size_t>(channels), 0.0);
  for (const auto& e : random_entries) per_channel[static_cast<std::size_t>(e.channel)] += max_abs_value(e.dist);
  const double diag = per_channel.empty() ? 0.0 : *std::max_element(per_channel.begin(), per_channel.end());
  return operator_norm(base_coupling) + diag;
}

double DisorderSpec::potential_bound() const { return declared_bound ? *declared_bound : apriori_bound(); }

Matrix DisorderSpec::mean_potential() const {
  Matrix m = base_coupling;
  for (const auto& e : random_entries) {
    const double mean = std::visit(overloaded{
                                       [](const Dirac& d) { return d.value; },
                                       [](const Bernoulli& b) { return (1.0 - b.p) * b.v0 + b.p * b.v1; },
                                       [](const Uniform& u) { return 0.5 * (u.a + u.b); },
                                       [](const FiniteDistribution& f) {
                                         return std::inner_product(f.values.begin(), f.values.end(),
                                                                   f.probs.begin(), 0.0);
                                       },
                                   },
                                   e.dist);
    m(e.channel, e.channel) += mean;
  }
  return m;
}

DisorderSpec model2_preset(const Distribution& nu) {
  DisorderSpec spec;
  spec.channels = 2;
  spec.base_coupling = Matrix{{0.0, 1.0}, {1.0, 0.0}};
  spec.random_entries = {RandomEntry{0, nu}, RandomEntry{1, nu}};
  return spec;
}

DisorderSpec constant_potential(const Matrix& v) {
  DisorderSpec spec;
  spec.channels = static_cast<int>(v.rows());
  spec.base_coupling = v;
  return spec;
}

// ---------------------------------------------------------------------------

CellPotential::CellPotential(std::vector<PotentialPiece> pieces) : pieces_(std::move(pieces)) {
  if (pieces_.empty()) throw DomainError("cell potential needs at least one piece");
  if (pieces_.front().start != 0.0) throw DomainError("first piece must start at 0");
  const Eigen::Index n = pieces_.front().value.rows();
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const auto& p = pieces_[i];
    if (p.value.rows() != n || p.value.cols() != n) throw DomainError("piece matrices must all be N x N");
    if (!(p.start >= 0.0 && p.start < 1.0)) throw DomainError("breakpoints must lie in [0, 1)");
    if (i > 0 && !(p.start > pieces_[i - 1].start)) throw DomainError("breakpoints must increase strictly");
    if (!p.value.allFinite()) throw DomainError("piece matrix must be finite");
    if ((p.value - p.value.transpose()).cwiseAbs().maxCoeff() > kSymmetryTolerance)
      throw DomainError("piece matrix is not symmetric");
  }
}

CellPotential CellPotential::constant(const Matrix& v) { return CellPotential({PotentialPiece{0.0, v}}); }

const Matrix& CellPotential::value_at(double s) const {
  auto it = std::upper_bound(pieces_.begin(), pieces_.end(), s,
                             [](double x, const PotentialPiece& p) { return x < p.start; });
  if (it == pieces_.begin()) return pieces_.front().value;
  return std::prev(it)->value;
}

Matrix CellPotential::integral(double a, double b) const {
  Matrix acc = Matrix::Zero(channels(), channels());
  for (std::size_t i = 0; i < pieces_.size(); ++i) {
    const double lo = std::max(a, pieces_[i].start);
    const double hi = std::min(b, piece_end(i));
    if (hi > lo) acc += (hi - lo) * pieces_[i].value;
  }
  return acc;
}

double CellPotential::sup_norm() const {
  double m = 0.0;
  for (const auto& p : pieces_) m = std::max(m, operator_norm(p.value));
  return m;
}

CellPotential sample_cell(const DisorderSpec& spec, std::uint64_t seed, std::int64_t n) {
  Matrix v = spec.base_coupling;
  for (std::size_t k = 0; k < spec.random_entries.size(); ++k) {
    const auto& e = spec.random_entries[k];
    const double u = to_unit_interval(counter_hash(seed, static_cast<std::uint64_t>(n), k));
    v(e.channel, e.channel) += draw(e.dist, u);
  }
  if (spec.declared_bound && operator_norm(v) > *spec.declared_bound * (1.0 + 1e-12))
    throw ConfigError("sampled cell exceeds the declared v_max");
  return CellPotential::constant(v);
}

// ---------------------------------------------------------------------------

Realization::Realization(DisorderSpec spec, std::uint64_t seed) : spec_(std::move(spec)), seed_(seed) {
  spec_.validate();
}

Matrix Realization::value_at(double x) const {
  const double fl = std::floor(x);
  return cell(static_cast<std::int64_t>(fl)).value_at(x - fl);
}

Matrix Realization::average(double a, double b) const {
  if (!(b > a)) throw DomainError("average needs a < b");
  Matrix acc = Matrix::Zero(channels(), channels());
  auto n = static_cast<std::int64_t>(std::floor(a));
  for (; static_cast<double>(n) < b; ++n) {
    const double lo = std::max(a, static_cast<double>(n)) - static_cast<double>(n);
    const double hi = std::min(b, static_cast<double>(n + 1)) - static_cast<double>(n);
    if (hi > lo) acc += cell(n).integral(lo, hi);
  }
  return acc / (b - a);
}

// ---------------------------------------------------------------------------

namespace {

Distribution parse_distribution(const nlohmann::json& j) {
  const std::string type = j.at("type").get<std::string>();
  if (type == "dirac") return Dirac{j.at("value").get<double>()};
  if (type == "bernoulli")
    return Bernoulli{j.value("p", 0.5), j.value("v0", 0.0), j.value("v1", 1.0)};
  if (type == "uniform") return Uniform{j.at("a").get<double>(), j.at("b").get<double>()};
  if (type == "finite")
    return FiniteDistribution{j.at("values").get<std::vector<double>>(), j.at("probs").get<std::vector<double>>()};
  throw ConfigError("unknown distribution type '" + type + "'");
}

nlohmann::json distribution_to_json(const Distribution& d) {
  return std::visit(overloaded{
                        [](const Dirac& x) { return nlohmann::json{{"type", "dirac"}, {"value", x.value}}; },
                        [](const Bernoulli& x) {
                          return nlohmann::json{{"type", "bernoulli"}, {"p", x.p}, {"v0", x.v0}, {"v1", x.v1}};
                        },
                        [](const Uniform& x) { return nlohmann::json{{"type", "uniform"}, {"a", x.a}, {"b", x.b}}; },
                        [](const FiniteDistribution& x) {
                          return nlohmann::json{{"type", "finite"}, {"values", x.values}, {"probs", x.probs}};
                        },
                    },
                    d);
}

}  // namespace

DisorderSpec parse_model(const nlohmann::json& j) {
  try {
    DisorderSpec spec;
    if (j.contains("preset")) {
      const std::string preset = j.at("preset").get<std::string>();
      if (preset != "two-coupled-strings-bernoulli") throw ConfigError("unknown preset '" + preset + "'");
      spec = j.contains("dist") ? model2_preset(parse_distribution(j.at("dist"))) : model2_preset();
    } else {
      spec.channels = j.at("channels").get<int>();
      if (spec.channels < 1) throw ConfigError("channels must be >= 1");
      spec.base_coupling = Matrix::Zero(spec.channels, spec.channels);
      if (j.contains("base_coupling")) {
        const auto rows = j.at("base_coupling").get<std::vector<std::vector<double>>>();
        if (static_cast<int>(rows.size()) != spec.channels) throw ConfigError("base_coupling has wrong shape");
        for (int r = 0; r < spec.channels; ++r) {
          if (static_cast<int>(rows[r].size()) != spec.channels) throw ConfigError("base_coupling has wrong shape");
          for (int c = 0; c < spec.channels; ++c) spec.base_coupling(r, c) = rows[r][c];
        }
      }
      if (j.contains("random_entries"))
        for (const auto& e : j.at("random_entries"))
          spec.random_entries.push_back(RandomEntry{e.at("channel").get<int>(), parse_distribution(e.at("dist"))});
    }
    if (j.contains("v_max")) spec.declared_bound = j.at("v_max").get<double>();
    spec.validate();
    return spec;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError(std::string("malformed model: ") + e.what());
  }
}

nlohmann::json model_to_json(const DisorderSpec& spec) {
  nlohmann::json j;
  j["channels"] = spec.channels;
  std::vector<std::vector<double>> rows(static_cast<std::size_t>(spec.channels));
  for (int r = 0; r < spec.channels; ++r)
    for (int c = 0; c < spec.channels; ++c) rows[r].push_back(spec.base_coupling(r, c));
  j["base_coupling"] = rows;
  j["random_entries"] = nlohmann::json::array();
  for (const auto& e : spec.random_entries)
    j["random_entries"].push_back({{"channel", e.channel}, {"dist", distribution_to_json(e.dist)}});
  if (spec.declared_bound) j["v_max"] = *spec.declared_bound;
  return j;
}

DisorderSpec load_model_file(const std::string& path) {
  std::ifstream in(path);
  if (!in) throw ConfigError("cannot open model file '" + path + "'");
  nlohmann::json j;
  try {
    in >> j;
  } catch (const nlohmann::json::exception& e) {
    throw ConfigError("cannot parse model file '" + path + "': " + e.what());
  }
  return parse_model(j);
}

}  // namespace strip
