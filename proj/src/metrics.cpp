#include "credal/metrics.hpp"

#include <algorithm>
#include <cmath>
#include <limits>
#include <string>

#include "credal/errors.hpp"

namespace credal {

namespace {

void check_lengths(std::span<const int> pred, std::span<const int> truth, const char* what) {
  if (pred.size() != truth.size())
    throw InvalidArgument(std::string(what) + ": label vectors differ in length (" +
                          std::to_string(pred.size()) + " vs " + std::to_string(truth.size()) +
                          ")");
}

// Dense re-indexing of arbitrary integer labels, in ascending label order.
struct Codes {
  std::vector<int> values;          // code -> label
  std::vector<std::size_t> of;      // object -> code
};

Codes encode(std::span<const int> labels) {
  Codes out;
  out.values.assign(labels.begin(), labels.end());
  std::sort(out.values.begin(), out.values.end());
  out.values.erase(std::unique(out.values.begin(), out.values.end()), out.values.end());
  out.of.reserve(labels.size());
  for (int l : labels)
    out.of.push_back(static_cast<std::size_t>(
        std::lower_bound(out.values.begin(), out.values.end(), l) - out.values.begin()));
  return out;
}

std::vector<std::vector<double>> contingency(const Codes& a, const Codes& b) {
  std::vector<std::vector<double>> table(a.values.size(),
                                         std::vector<double>(b.values.size(), 0.0));
  for (std::size_t i = 0; i < a.of.size(); ++i) table[a.of[i]][b.of[i]] += 1.0;
  return table;
}

}  // namespace

std::vector<std::size_t> max_weight_assignment(const std::vector<std::vector<double>>& weight) {
  // Shortest augmenting path formulation on costs = -weight, 1-based
  // potentials u (rows) and v (columns).
  const std::size_t n = weight.size();
  const double inf = std::numeric_limits<double>::infinity();
  std::vector<double> u(n + 1, 0.0), v(n + 1, 0.0);
  std::vector<std::size_t> match(n + 1, 0), way(n + 1, 0);
  for (std::size_t row = 1; row <= n; ++row) {
    match[0] = row;
    std::size_t col0 = 0;
    std::vector<double> minv(n + 1, inf);
    std::vector<bool> used(n + 1, false);
    do {
      used[col0] = true;
      const std::size_t r0 = match[col0];
      double delta = inf;
      std::size_t col1 = 0;
      for (std::size_t col = 1; col <= n; ++col) {
        if (used[col]) continue;
        const double cur = -weight[r0 - 1][col - 1] - u[r0] - v[col];
        if (cur < minv[col]) {
          minv[col] = cur;
          way[col] = col0;
        }
        if (minv[col] < delta) {
          delta = minv[col];
          col1 = col;
        }
      }
      for (std::size_t col = 0; col <= n; ++col) {
        if (used[col]) {
          u[match[col]] += delta;
          v[col] -= delta;
        } else {
          minv[col] -= delta;
        }
      }
      col0 = col1;
    } while (match[col0] != 0);
    do {
      const std::size_t col1 = way[col0];
      match[col0] = match[col1];
      col0 = col1;
    } while (col0 != 0);
  }
  std::vector<std::size_t> assignment(n);
  for (std::size_t col = 1; col <= n; ++col) assignment[match[col] - 1] = col - 1;
  return assignment;
}

AccuracyResult accuracy(std::span<const int> pred, std::span<const int> truth) {
  check_lengths(pred, truth, "accuracy");
  if (pred.empty()) throw InvalidArgument("accuracy: no objects");
  const Codes p = encode(pred), t = encode(truth);
  const auto table = contingency(p, t);
  const std::size_t k = std::max(p.values.size(), t.values.size());
  std::vector<std::vector<double>> square(k, std::vector<double>(k, 0.0));
  for (std::size_t a = 0; a < p.values.size(); ++a)
    for (std::size_t b = 0; b < t.values.size(); ++b) square[a][b] = table[a][b];

  const auto assignment = max_weight_assignment(square);
  AccuracyResult out{0.0, {}};
  double correct = 0.0;
  for (std::size_t a = 0; a < p.values.size(); ++a) {
    const std::size_t b = assignment[a];
    if (b >= t.values.size()) continue;
    out.matching.emplace(p.values[a], t.values[b]);
    correct += square[a][b];
  }
  out.ac = correct / static_cast<double>(pred.size());
  return out;
}

double rand_index(std::span<const int> pred, std::span<const int> truth) {
  check_lengths(pred, truth, "rand_index");
  const std::size_t n = pred.size();
  if (n < 2) throw InvalidArgument("rand_index: needs at least two objects");
  // Pair counts from the contingency table: together-in-both, together in
  // each partition, all pairs.
  const auto table = contingency(encode(pred), encode(truth));
  auto pairs = [](double m) { return m * (m - 1.0) / 2.0; };
  double both = 0.0, in_pred = 0.0, in_truth = 0.0;
  std::vector<double> col_totals(table.empty() ? 0 : table[0].size(), 0.0);
  for (const auto& row : table) {
    double row_total = 0.0;
    for (std::size_t b = 0; b < row.size(); ++b) {
      both += pairs(row[b]);
      row_total += row[b];
      col_totals[b] += row[b];
    }
    in_pred += pairs(row_total);
  }
  for (double t : col_totals) in_truth += pairs(t);
  const double total = pairs(static_cast<double>(n));
  const double apart_both = total - in_pred - in_truth + both;
  return (both + apart_both) / total;
}

double nmi(std::span<const int> pred, std::span<const int> truth) {
  check_lengths(pred, truth, "nmi");
  if (pred.empty()) throw InvalidArgument("nmi: no objects");
  const auto table = contingency(encode(pred), encode(truth));
  const double n = static_cast<double>(pred.size());
  std::vector<double> rows(table.size(), 0.0), cols(table[0].size(), 0.0);
  for (std::size_t a = 0; a < table.size(); ++a)
    for (std::size_t b = 0; b < table[a].size(); ++b) {
      rows[a] += table[a][b];
      cols[b] += table[a][b];
    }
  auto entropy = [n](const std::vector<double>& counts) {
    double h = 0.0;
    for (double m : counts)
      if (m > 0.0) h -= (m / n) * std::log(m / n);
    return h;
  };
  const double hx = entropy(rows), hy = entropy(cols);
  if (hx + hy <= 0.0) return 1.0;
  double mi = 0.0;
  for (std::size_t a = 0; a < table.size(); ++a)
    for (std::size_t b = 0; b < table[a].size(); ++b)
      if (table[a][b] > 0.0)
        mi += (table[a][b] / n) * std::log(n * table[a][b] / (rows[a] * cols[b]));
  return std::clamp(2.0 * mi / (hx + hy), 0.0, 1.0);
}

EvaluationReport evaluate(std::span<const int> pred, std::span<const int> truth) {
  auto acc = accuracy(pred, truth);
  return {acc.ac, pred.size() >= 2 ? rand_index(pred, truth) : 1.0, nmi(pred, truth),
          std::move(acc.matching)};
}

}  // namespace credal
