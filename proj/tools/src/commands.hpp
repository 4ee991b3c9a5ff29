#pragma once

#include <cstdint>
#include <ostream>
#include <stdexcept>
#include <string>
#include <vector>

namespace mdke::cli {

/// Raised when a diagnostic or invariant fails (exit code 1).
class InvariantFailure : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

/// Raised for bad usage or bad input data (exit code 2).
class UsageError : public std::runtime_error {
 public:
  using std::runtime_error::runtime_error;
};

struct CommonOptions {
  std::string config;
  std::uint64_t seed = 0;
  std::string out;
  unsigned threads = 1;
};

struct TrainOptions : CommonOptions {
  std::string data;
  std::string format = "auto";
  std::string encoder = "auto";
  std::string metrics;
  std::size_t steps = 300;
  std::size_t batch_distributions = 8;
  std::size_t samples_per_distribution = 32;
  double lr = 5e-4;
  double epsilon = 0.0;
  std::string objective = "entropy";
  std::string family = "gaussian";
  std::string gamma1 = "auto";
  std::string gamma2 = "auto";
  long latent_dim = 3;
  long hidden_dim = 64;
  std::size_t log_every = 1;
};

struct GramOptions : CommonOptions {
  std::string checkpoint;
  std::string data;
  std::string format = "auto";
  std::string family;
  std::string gamma1 = "auto";
  std::string gamma2 = "auto";
  std::string lambda = "auto";
  std::size_t projections = 100;
  std::size_t samples = 0;
  std::size_t repeats = 1;
};

struct ClassifyOptions : CommonOptions {
  std::vector<std::string> grams;
  std::string labels;
  std::size_t repeats = 1;
  double holdout_fraction = 0.0;
  std::size_t splits = 5;
  double train_fraction = 0.7;
};

struct CheckOptions : CommonOptions {
  std::string checkpoint;
  std::string data;
  std::string format = "auto";
  std::string gram;
  std::string family;
  std::string gamma1 = "auto";
  std::string gamma2 = "auto";
  std::size_t samples = 0;
  long latent_dim = 3;
  long hidden_dim = 64;
};

struct ToyOptions : CommonOptions {
  std::vector<double> spreads;
  std::size_t m = 6;
  std::size_t n = 200;
  long dim = 3;
  double gamma1 = 5.0;
  double gamma2 = 10.0;
  std::string family = "gaussian";
};

struct SynthOptions : CommonOptions {
  std::string kind = "sphere";
  std::size_t m = 6;
  std::size_t m_per_class = 20;
  std::size_t n = 200;
  long dim = 3;
  double spread = 0.5;
  double separation = 1.0;
};

/// 12 log-spaced spreads from 1e-3 to 2.
std::vector<double> default_toy_spreads();

/// Output path for repeat r of `repeats`: unchanged when repeats == 1,
/// otherwise "<stem>.r<r><ext>".
std::string repeat_path(const std::string& path, std::size_t r, std::size_t repeats);

int cmd_train(const TrainOptions& opts, std::ostream& out);
int cmd_gram(const GramOptions& opts, std::ostream& out);
int cmd_classify(const ClassifyOptions& opts, std::ostream& out);
int cmd_check(const CheckOptions& opts, std::ostream& out);
int cmd_toy(const ToyOptions& opts, std::ostream& out);
int cmd_synth(const SynthOptions& opts, std::ostream& out);

}  // namespace mdke::cli
