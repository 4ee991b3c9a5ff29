#include "mdke/downstream.hpp"

#include <algorithm>
#include <cmath>
#include <map>
#include <numeric>
#include <set>
#include <stdexcept>
#include <unordered_map>

#include <Eigen/Cholesky>

#include "mdke/errors.hpp"
#include "parallel.hpp"

namespace mdke {

namespace {

std::vector<int> sorted_classes(const std::vector<int>& labels) {
  std::set<int> s(labels.begin(), labels.end());
  return {s.begin(), s.end()};
}

void check_square(const Eigen::MatrixXd& gram, std::size_t n_labels, const char* where) {
  if (gram.rows() != gram.cols()) throw std::invalid_argument(std::string(where) + ": Gram must be square");
  if (static_cast<std::size_t>(gram.rows()) != n_labels)
    throw std::invalid_argument(std::string(where) + ": Gram size does not match label count");
  if (!gram.allFinite()) throw std::invalid_argument(std::string(where) + ": Gram has non-finite entries");
}

std::vector<std::string> default_ids(std::vector<std::string> ids, std::size_t n) {
  if (ids.empty()) {
    ids.reserve(n);
    for (std::size_t i = 0; i < n; ++i) ids.push_back(std::to_string(i));
  }
  if (ids.size() != n) throw std::invalid_argument("id count does not match Gram size");
  return ids;
}

Eigen::MatrixXd submatrix(const Eigen::MatrixXd& m, const std::vector<std::size_t>& rows,
                          const std::vector<std::size_t>& cols) {
  Eigen::MatrixXd out(rows.size(), cols.size());
  for (std::size_t r = 0; r < rows.size(); ++r)
    for (std::size_t c = 0; c < cols.size(); ++c)
      out(static_cast<Eigen::Index>(r), static_cast<Eigen::Index>(c)) =
          m(static_cast<Eigen::Index>(rows[r]), static_cast<Eigen::Index>(cols[c]));
  return out;
}

std::vector<int> pick(const std::vector<int>& v, const std::vector<std::size_t>& idx) {
  std::vector<int> out;
  out.reserve(idx.size());
  for (auto i : idx) out.push_back(v[i]);
  return out;
}

std::pair<double, double> mean_variance(const std::vector<double>& v) {
  if (v.empty()) return {0.0, 0.0};
  const double mean = std::accumulate(v.begin(), v.end(), 0.0) / static_cast<double>(v.size());
  double var = 0.0;
  for (double x : v) var += (x - mean) * (x - mean);
  return {mean, var / static_cast<double>(v.size())};
}

}  // namespace

ClassifierModel svm_fit(const Eigen::MatrixXd& gram, const std::vector<int>& labels, double c,
                        std::vector<std::string> ids, const SmoOptions& options) {
  check_square(gram, labels.size(), "svm_fit");
  ClassifierModel model;
  model.kind = ClassifierKind::kSvmSmo;
  model.classes = sorted_classes(labels);
  if (model.classes.size() < 2) throw std::invalid_argument("svm_fit: need at least two classes");
  model.train_ids = default_ids(std::move(ids), labels.size());
  model.regularization = c;

  const Eigen::MatrixXd k = shift_to_psd(gram, &model.psd_shift);
  const auto n = static_cast<Eigen::Index>(labels.size());
  const auto n_classes = static_cast<Eigen::Index>(model.classes.size());
  model.alpha.resize(n, n_classes);
  model.coefficients.resize(n, n_classes);
  model.bias.resize(n_classes);
  for (Eigen::Index ci = 0; ci < n_classes; ++ci) {
    Eigen::VectorXd y(n);
    for (Eigen::Index i = 0; i < n; ++i)
      y(i) = labels[static_cast<std::size_t>(i)] == model.classes[static_cast<std::size_t>(ci)] ? 1.0 : -1.0;
    BinarySvmResult r = smo_solve(k, y, c, options);
    model.alpha.col(ci) = r.alpha;
    model.coefficients.col(ci) = r.alpha.cwiseProduct(y);
    model.bias(ci) = r.bias;
    r.alpha.resize(0);
    model.diagnostics.push_back(std::move(r));
  }
  return model;
}

ClassifierModel kernel_ridge_fit(const Eigen::MatrixXd& gram, const std::vector<int>& labels, double lambda,
                                 std::vector<std::string> ids) {
  check_square(gram, labels.size(), "kernel_ridge_fit");
  if (!(lambda > 0.0)) throw std::invalid_argument("kernel_ridge_fit: lambda must be > 0");
  ClassifierModel model;
  model.kind = ClassifierKind::kKernelRidge;
  model.classes = sorted_classes(labels);
  model.train_ids = default_ids(std::move(ids), labels.size());
  model.regularization = lambda;

  const auto n = static_cast<Eigen::Index>(labels.size());
  const auto n_classes = static_cast<Eigen::Index>(model.classes.size());
  Eigen::MatrixXd y = Eigen::MatrixXd::Zero(n, n_classes);
  for (Eigen::Index i = 0; i < n; ++i) {
    const auto it = std::lower_bound(model.classes.begin(), model.classes.end(), labels[static_cast<std::size_t>(i)]);
    y(i, it - model.classes.begin()) = 1.0;
  }
  Eigen::MatrixXd a = gram;
  a.diagonal().array() += lambda;
  Eigen::LDLT<Eigen::MatrixXd> ldlt(a);
  if (ldlt.info() != Eigen::Success) throw NumericalError("kernel_ridge_fit: factorization failed");
  model.coefficients = ldlt.solve(y);
  if (!model.coefficients.allFinite()) throw NumericalError("kernel_ridge_fit: non-finite coefficients");
  model.bias = Eigen::VectorXd::Zero(n_classes);
  return model;
}

Eigen::MatrixXd decision_values(const ClassifierModel& model, const Eigen::MatrixXd& cross) {
  if (cross.cols() != model.coefficients.rows())
    throw std::invalid_argument("cross Gram has " + std::to_string(cross.cols()) + " columns, model has " +
                                std::to_string(model.coefficients.rows()) + " training points");
  Eigen::MatrixXd out = cross * model.coefficients;
  out.rowwise() += model.bias.transpose();
  return out;
}

std::vector<int> predict(const ClassifierModel& model, const Eigen::MatrixXd& cross) {
  const Eigen::MatrixXd d = decision_values(model, cross);
  std::vector<int> out(static_cast<std::size_t>(d.rows()));
  for (Eigen::Index r = 0; r < d.rows(); ++r) {
    Eigen::Index best = 0;
    for (Eigen::Index c = 1; c < d.cols(); ++c)
      if (d(r, c) > d(r, best)) best = c;
    out[static_cast<std::size_t>(r)] = model.classes[static_cast<std::size_t>(best)];
  }
  return out;
}

std::vector<int> predict(const ClassifierModel& model, const Eigen::MatrixXd& cross,
                         const std::vector<std::string>& column_ids) {
  if (column_ids.size() != static_cast<std::size_t>(cross.cols()))
    throw std::invalid_argument("column id count does not match cross Gram");
  if (column_ids.size() != model.train_ids.size())
    throw std::invalid_argument("id mismatch: cross Gram has " + std::to_string(column_ids.size()) +
                                " columns, model has " + std::to_string(model.train_ids.size()) + " training ids");
  std::unordered_map<std::string, Eigen::Index> where;
  for (std::size_t c = 0; c < column_ids.size(); ++c)
    if (!where.emplace(column_ids[c], static_cast<Eigen::Index>(c)).second)
      throw std::invalid_argument("id mismatch: duplicate column id " + column_ids[c]);
  Eigen::MatrixXd ordered(cross.rows(), cross.cols());
  for (std::size_t t = 0; t < model.train_ids.size(); ++t) {
    const auto it = where.find(model.train_ids[t]);
    if (it == where.end()) throw std::invalid_argument("id mismatch: training id " + model.train_ids[t] + " missing");
    ordered.col(static_cast<Eigen::Index>(t)) = cross.col(it->second);
  }
  return predict(model, ordered);
}

std::vector<double> default_c_grid() {
  constexpr int kCount = 50;
  std::vector<double> grid(kCount);
  for (int k = 0; k < kCount; ++k) grid[k] = std::pow(10.0, -7.0 + 12.0 * k / (kCount - 1));
  grid.front() = 1e-7;
  grid.back() = 1e5;
  return grid;
}

double accuracy(const std::vector<int>& truth, const std::vector<int>& predicted) {
  if (truth.size() != predicted.size()) throw std::invalid_argument("accuracy: size mismatch");
  if (truth.empty()) return 0.0;
  std::size_t hit = 0;
  for (std::size_t i = 0; i < truth.size(); ++i) hit += truth[i] == predicted[i];
  return static_cast<double>(hit) / static_cast<double>(truth.size());
}

Split stratified_split(const std::vector<int>& labels, const std::vector<std::size_t>& pool,
                       double train_fraction, std::size_t max_redraws, Rng& rng) {
  std::map<int, std::vector<std::size_t>> by_class;
  for (auto i : pool) by_class[labels.at(i)].push_back(i);
  for (std::size_t attempt = 0; attempt < std::max<std::size_t>(1, max_redraws); ++attempt) {
    Split s;
    bool degenerate = false;
    for (const auto& [cls, members] : by_class) {
      const auto order = rng.sample_without_replacement(members.size(), members.size());
      const auto n_train = static_cast<std::size_t>(std::lround(train_fraction * static_cast<double>(members.size())));
      if (n_train == 0 || n_train == members.size()) degenerate = true;
      for (std::size_t k = 0; k < order.size(); ++k)
        (k < n_train ? s.train : s.validation).push_back(members[order[k]]);
    }
    if (!degenerate) {
      std::sort(s.train.begin(), s.train.end());
      std::sort(s.validation.begin(), s.validation.end());
      return s;
    }
  }
  throw DataError("degenerate split: a class is absent from a fold after " + std::to_string(max_redraws) +
                  " draws");
}

EvalReport grid_search_eval(const Eigen::MatrixXd& gram, const std::vector<int>& labels,
                            const std::vector<bool>& heldout, const EvalProtocol& protocol) {
  check_square(gram, labels.size(), "grid_search_eval");
  if (labels.size() < 10) throw std::invalid_argument("grid_search_eval: need at least 10 distributions");
  if (!heldout.empty() && heldout.size() != labels.size())
    throw std::invalid_argument("grid_search_eval: held-out mask size does not match labels");
  if (protocol.c_grid.empty() || protocol.splits == 0) throw std::invalid_argument("grid_search_eval: empty protocol");

  EvalReport report;
  report.classes = sorted_classes(labels);
  std::vector<std::size_t> pool;
  std::vector<std::size_t> test;
  for (std::size_t i = 0; i < labels.size(); ++i) (!heldout.empty() && heldout[i] ? test : pool).push_back(i);
  {
    std::map<int, std::size_t> counts;
    for (auto i : pool) ++counts[labels[i]];
    if (counts.size() < 2) throw DataError("grid_search_eval: training portion has fewer than two classes");
    for (const auto& [cls, n] : counts)
      if (n < 2) throw DataError("grid_search_eval: class " + std::to_string(cls) + " has fewer than 2 training rows");
  }

  Rng rng(protocol.seed);
  std::vector<Split> splits;
  for (std::size_t s = 0; s < protocol.splits; ++s)
    splits.push_back(stratified_split(labels, pool, protocol.train_fraction, protocol.max_redraws, rng));

  const Eigen::MatrixXd k = shift_to_psd(gram);
  const std::size_t n_c = protocol.c_grid.size();
  std::vector<double> cell(n_c * splits.size());
  detail::parallel_for(cell.size(), protocol.threads, [&](std::size_t idx) {
    const std::size_t ci = idx / splits.size();
    const Split& sp = splits[idx % splits.size()];
    const auto model = svm_fit(submatrix(k, sp.train, sp.train), pick(labels, sp.train), protocol.c_grid[ci]);
    cell[idx] = accuracy(pick(labels, sp.validation), predict(model, submatrix(k, sp.validation, sp.train)));
  });

  std::size_t best = 0;
  double best_mean = -1.0;
  for (std::size_t ci = 0; ci < n_c; ++ci) {
    double sum = 0.0;
    for (std::size_t s = 0; s < splits.size(); ++s) sum += cell[ci * splits.size() + s];
    const double mean = sum / static_cast<double>(splits.size());
    if (mean > best_mean) {
      best_mean = mean;
      best = ci;
    }
  }
  report.best_c = protocol.c_grid[best];
  report.split_accuracies.assign(cell.begin() + static_cast<std::ptrdiff_t>(best * splits.size()),
                                 cell.begin() + static_cast<std::ptrdiff_t>((best + 1) * splits.size()));
  std::tie(report.mean, report.variance) = mean_variance(report.split_accuracies);

  const std::size_t nk = report.classes.size();
  report.confusion.assign(nk, std::vector<std::size_t>(nk, 0));
  auto class_index = [&](int c) {
    return static_cast<std::size_t>(std::lower_bound(report.classes.begin(), report.classes.end(), c) -
                                    report.classes.begin());
  };
  if (!test.empty()) {
    const auto model = svm_fit(submatrix(k, pool, pool), pick(labels, pool), report.best_c);
    const auto truth = pick(labels, test);
    const auto pred = predict(model, submatrix(k, test, pool));
    report.heldout_accuracies.push_back(accuracy(truth, pred));
    report.heldout_mean = report.heldout_accuracies.front();
    report.heldout_variance = 0.0;
    for (std::size_t i = 0; i < truth.size(); ++i) ++report.confusion[class_index(truth[i])][class_index(pred[i])];
  } else {
    for (const auto& sp : splits) {
      const auto model = svm_fit(submatrix(k, sp.train, sp.train), pick(labels, sp.train), report.best_c);
      const auto truth = pick(labels, sp.validation);
      const auto pred = predict(model, submatrix(k, sp.validation, sp.train));
      for (std::size_t i = 0; i < truth.size(); ++i) ++report.confusion[class_index(truth[i])][class_index(pred[i])];
    }
  }
  return report;
}

EvalReport grid_search_eval(const std::vector<Eigen::MatrixXd>& grams, const std::vector<int>& labels,
                            const std::vector<bool>& heldout, const EvalProtocol& protocol) {
  if (grams.empty()) throw std::invalid_argument("grid_search_eval: no Grams supplied");
  EvalReport first = grid_search_eval(grams.front(), labels, heldout, protocol);
  if (grams.size() == 1) return first;
  std::vector<double> acc = first.heldout_accuracies;
  for (std::size_t r = 1; r < grams.size(); ++r) {
    const EvalReport rep = grid_search_eval(grams[r], labels, heldout, protocol);
    acc.insert(acc.end(), rep.heldout_accuracies.begin(), rep.heldout_accuracies.end());
    for (std::size_t a = 0; a < first.confusion.size(); ++a)
      for (std::size_t b = 0; b < first.confusion.size(); ++b) first.confusion[a][b] += rep.confusion[a][b];
  }
  first.heldout_accuracies = acc;
  if (!acc.empty()) {
    const auto [m, v] = mean_variance(acc);
    first.heldout_mean = m;
    first.heldout_variance = v;
  }
  return first;
}

}  // namespace mdke
