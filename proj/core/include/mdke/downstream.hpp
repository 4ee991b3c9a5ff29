#pragma once

#include <cstdint>
#include <optional>
#include <string>
#include <vector>

#include <Eigen/Core>

#include "mdke/kernels.hpp"
#include "mdke/random.hpp"

namespace mdke {

struct BinarySvmResult {
  Eigen::VectorXd alpha;  // dual weights, 0 <= alpha_i <= C
  double bias = 0.0;      // decision = sum_j alpha_j y_j K(x, j) + bias
  std::size_t iterations = 0;
  double kkt_gap = 0.0;  // maximal violating pair gap at termination
  bool converged = false;
};

struct SmoOptions {
  double tolerance = 1e-3;
  std::size_t max_iterations = 100000;
};

/// C-SVM dual by SMO with maximal-violating-pair working set selection.
/// `y` holds +1 / -1. The Gram is used as given (see shift_to_psd).
BinarySvmResult smo_solve(const Eigen::MatrixXd& gram, const Eigen::VectorXd& y, double c,
                          const SmoOptions& options = {});

/// Returns gram + |min eig| I when the smallest eigenvalue is negative,
/// otherwise gram unchanged. `shift` receives the amount added.
Eigen::MatrixXd shift_to_psd(const Eigen::MatrixXd& gram, double* shift = nullptr);

enum class ClassifierKind { kSvmSmo, kKernelRidge };

struct ClassifierModel {
  ClassifierKind kind = ClassifierKind::kSvmSmo;
  std::vector<int> classes;             // ascending
  std::vector<std::string> train_ids;   // column order of `coefficients`
  Eigen::MatrixXd alpha;                // n_train x n_classes, SVM only
  Eigen::MatrixXd coefficients;         // decision = cross * coefficients + bias
  Eigen::VectorXd bias;                 // per class
  double regularization = 0.0;          // C or ridge lambda
  std::vector<BinarySvmResult> diagnostics;  // per class, SVM only (alpha moved out)
  double psd_shift = 0.0;
};

/// One-vs-rest SVM over the training Gram.
ClassifierModel svm_fit(const Eigen::MatrixXd& gram, const std::vector<int>& labels, double c,
                        std::vector<std::string> ids = {}, const SmoOptions& options = {});

/// Dual kernel ridge on one-hot targets: coefficients = (K + lambda I)^-1 Y.
ClassifierModel kernel_ridge_fit(const Eigen::MatrixXd& gram, const std::vector<int>& labels, double lambda,
                                 std::vector<std::string> ids = {});

/// n_test x n_classes decision values; cross columns follow model.train_ids.
Eigen::MatrixXd decision_values(const ClassifierModel& model, const Eigen::MatrixXd& cross);

/// Argmax of decision values, ties to the lowest class.
std::vector<int> predict(const ClassifierModel& model, const Eigen::MatrixXd& cross);

/// As above, with the cross Gram's columns named; columns are matched to the
/// model's training ids (throws std::invalid_argument on mismatch).
std::vector<int> predict(const ClassifierModel& model, const Eigen::MatrixXd& cross,
                         const std::vector<std::string>& column_ids);

/// 50 log-spaced values from 1e-7 to 1e5.
std::vector<double> default_c_grid();

struct EvalProtocol {
  std::vector<double> c_grid = default_c_grid();
  std::size_t splits = 5;
  double train_fraction = 0.7;
  std::size_t max_redraws = 20;
  std::uint64_t seed = 0;
  unsigned threads = 1;
};

struct EvalReport {
  double best_c = 0.0;
  std::vector<double> split_accuracies;  // validation accuracy per split at best_c
  double mean = 0.0;                     // mean of split_accuracies
  double variance = 0.0;                 // population variance of split_accuracies
  std::vector<double> heldout_accuracies;  // one per supplied Gram
  std::optional<double> heldout_mean;
  std::optional<double> heldout_variance;
  std::vector<int> classes;
  std::vector<std::vector<std::size_t>> confusion;  // [true][predicted], held-out when present
};

struct Split {
  std::vector<std::size_t> train;
  std::vector<std::size_t> validation;
};

/// Stratified split of `pool` (indices into labels); throws DataError when a
/// class is absent from either side after max_redraws attempts.
Split stratified_split(const std::vector<int>& labels, const std::vector<std::size_t>& pool,
                       double train_fraction, std::size_t max_redraws, Rng& rng);

/// Grid search over C with stratified splits of the non-held-out rows, refit
/// on all of them with the best C and scoring of the held-out rows.
/// `heldout[i]` marks row i as held out; empty means none.
EvalReport grid_search_eval(const Eigen::MatrixXd& gram, const std::vector<int>& labels,
                            const std::vector<bool>& heldout, const EvalProtocol& protocol);

/// Runs grid_search_eval on each Gram (same rows, e.g. repeated subsampling)
/// and aggregates held-out accuracy mean and variance. Selection fields come
/// from the first Gram.
EvalReport grid_search_eval(const std::vector<Eigen::MatrixXd>& grams, const std::vector<int>& labels,
                            const std::vector<bool>& heldout, const EvalProtocol& protocol);

double accuracy(const std::vector<int>& truth, const std::vector<int>& predicted);

}  // namespace mdke
