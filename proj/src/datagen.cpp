#include "credal/datagen.hpp"

#include <cmath>

#include "credal/errors.hpp"
#include "credal/rng.hpp"

namespace credal {

Matrix cholesky_psd(const Matrix& a) {
  const std::size_t p = a.rows();
  if (a.cols() != p) throw InvalidArgument("covariance must be square");
  double scale = 0.0;
  for (std::size_t i = 0; i < p; ++i)
    for (std::size_t j = 0; j < p; ++j) {
      if (std::abs(a(i, j) - a(j, i)) > 1e-12 * (1.0 + std::abs(a(i, j))))
        throw InvalidArgument("covariance is not symmetric");
      scale = std::max(scale, std::abs(a(i, j)));
    }
  const double tol = 1e-12 * (1.0 + scale);
  Matrix l(p, p);
  for (std::size_t j = 0; j < p; ++j) {
    double diag = a(j, j);
    for (std::size_t k = 0; k < j; ++k) diag -= l(j, k) * l(j, k);
    if (diag < -tol) throw InvalidArgument("covariance is not positive semi-definite");
    if (diag <= tol) {
      // Semi-definite direction: the column must vanish below the diagonal.
      for (std::size_t i = j + 1; i < p; ++i) {
        double off = a(i, j);
        for (std::size_t k = 0; k < j; ++k) off -= l(i, k) * l(j, k);
        if (std::abs(off) > tol) throw InvalidArgument("covariance is not positive semi-definite");
      }
      continue;
    }
    l(j, j) = std::sqrt(diag);
    for (std::size_t i = j + 1; i < p; ++i) {
      double off = a(i, j);
      for (std::size_t k = 0; k < j; ++k) off -= l(i, k) * l(j, k);
      l(i, j) = off / l(j, j);
    }
  }
  return l;
}

Dataset generate(const ScenarioSpec& spec) {
  if (spec.clusters.empty()) throw InvalidArgument("scenario '" + spec.name + "' has no clusters");
  if (!(spec.noise_sigma >= 0.0)) throw InvalidArgument("noise sigma must be >= 0");
  const std::size_t p = spec.clusters.front().mean.size();
  std::size_t n = 0;
  std::vector<Matrix> factors;
  for (const auto& cl : spec.clusters) {
    if (cl.mean.size() != p || cl.covariance.rows() != p)
      throw InvalidArgument("scenario '" + spec.name + "': inconsistent cluster dimensions");
    if (cl.size < 1) throw InvalidArgument("scenario '" + spec.name + "': empty cluster");
    factors.push_back(cholesky_psd(cl.covariance));
    n += cl.size;
  }

  Rng rng(spec.seed);
  Dataset out{Matrix(n, p), std::vector<int>(n), spec.name};
  std::vector<double> z(p);
  std::size_t row = 0;
  for (std::size_t k = 0; k < spec.clusters.size(); ++k) {
    const auto& cl = spec.clusters[k];
    for (std::size_t s = 0; s < cl.size; ++s, ++row) {
      for (double& v : z) v = rng.normal();
      auto x = out.features.row(row);
      for (std::size_t i = 0; i < p; ++i) {
        double acc = cl.mean[i];
        for (std::size_t j = 0; j <= i; ++j) acc += factors[k](i, j) * z[j];
        x[i] = acc;
      }
      (*out.labels)[row] = static_cast<int>(k + 1);
    }
  }
  if (spec.noise_sigma > 0.0)
    for (double& v : out.features.data()) v += spec.noise_sigma * rng.normal();
  return out;
}

namespace {

Matrix scaled_identity(std::size_t p, double s) {
  Matrix m(p, p);
  for (std::size_t i = 0; i < p; ++i) m(i, i) = s;
  return m;
}

ScenarioSpec mixture(std::string name, const std::vector<std::vector<double>>& means,
                     double variance, std::size_t size, double noise = 0.0) {
  ScenarioSpec spec{std::move(name), {}, noise, 0};
  for (const auto& mu : means)
    spec.clusters.push_back({mu, scaled_identity(mu.size(), variance), size});
  return spec;
}

std::map<std::string, ScenarioSpec> make_builtins() {
  const std::vector<std::vector<double>> three = {{0, 0, 0}, {0, 0, 5}, {0, 5, 0}};
  const std::vector<std::vector<double>> four = {{0, 0, 0}, {0, 0, 5}, {0, 5, 0}, {5, 0, 0}};
  std::map<std::string, ScenarioSpec> out;
  auto add = [&out](ScenarioSpec s) { out.emplace(s.name, std::move(s)); };
  add(mixture("S1-1", three, 3.0, 200));
  add(mixture("T1-1", three, 4.0, 20));
  add(mixture("S1-2", four, 3.0, 200));
  add(mixture("T1-2", four, 4.0, 20));
  // Contaminated targets: source geometry plus additive noise.
  add(mixture("T1-3", three, 3.0, 200, 5.0));
  add(mixture("T1-4", four, 3.0, 200, 3.0));
  add(mixture("S2-1", {{0, 0}, {1, 0}}, 1.0, 100));
  add(mixture("T2-1", {{0, 0.2}, {1, 0.2}}, 1.0, 10));
  add(mixture("S2-2", {{0, 0}, {1, 0}, {0, 1}, {1, 1}}, 1.0, 100));
  add(mixture("T2-2", {{0.2, 0.2}, {1.2, 0.2}, {0.2, 1.2}, {1.2, 1.2}}, 1.0, 30));
  return out;
}

}  // namespace

const std::map<std::string, ScenarioSpec>& builtin_scenarios() {
  static const std::map<std::string, ScenarioSpec> scenarios = make_builtins();
  return scenarios;
}

ScenarioSpec builtin_scenario(const std::string& name) {
  const auto& all = builtin_scenarios();
  auto it = all.find(name);
  if (it == all.end()) {
    std::string known;
    for (const auto& [key, _] : all) known += (known.empty() ? "" : ", ") + key;
    throw InvalidArgument("unknown scenario '" + name + "' (known: " + known + ")");
  }
  return it->second;
}

}  // namespace credal
