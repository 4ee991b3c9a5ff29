#include "cli.hpp"

#include <fstream>

#include <CLI11.hpp>
#include <json.hpp>

#include "commands.hpp"
#include "json_config.hpp"
#include "mdke/errors.hpp"

namespace mdke::cli {

namespace {

CLI::App* add_command(CLI::App& app, const std::string& name, const std::string& description,
                      CommonOptions& common) {
  CLI::App* sub = app.add_subcommand(name, description);
  sub->add_option("--config", common.config, "JSON config file; command-line flags take precedence")->configurable(false);
  sub->add_option("--seed", common.seed, "Random seed")->capture_default_str();
  sub->add_option("--out", common.out, "Output path (stdout when omitted)");
  sub->add_option("--threads", common.threads, "Worker threads")->capture_default_str()->check(CLI::PositiveNumber);
  return sub;
}

// Fills options absent from the command line with values from the JSON
// config given by --config. Unknown keys are rejected.
void apply_config(CLI::App* sub) {
  const CLI::Option* config = sub->get_option("--config");
  if (config->count() == 0) return;
  const auto path = config->as<std::string>();
  std::ifstream in(path);
  if (!in) throw CLI::FileError::Missing(path);
  for (const CLI::ConfigItem& item : JsonConfig{}.from_config(in)) {
    CLI::Option* opt = sub->get_option_no_throw("--" + item.name);
    if (opt == nullptr || !opt->get_configurable())
      throw CLI::ConfigError("unknown config key: " + item.name);
    if (opt->count() > 0) continue;
    for (const auto& v : item.inputs) opt->add_result(v);
    opt->run_callback();
  }
}

void error_json(std::ostream& err, const std::string& kind, const std::string& message, int code) {
  nlohmann::json j;
  j["error"] = message;
  j["kind"] = kind;
  j["exit_code"] = code;
  err << j.dump() << "\n";
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Learned distribution kernels by maximum distribution kernel entropy", "mdke"};
  app.require_subcommand(1);

  TrainOptions train;
  CLI::App* c_train = add_command(app, "train", "Train an encoder and write a checkpoint plus metrics CSV", train);
  c_train->add_option("--data", train.data, "Dataset JSONL");
  c_train->add_option("--format", train.format, "auto | jsonl | histogram-jsonl")->capture_default_str();
  c_train->add_option("--encoder", train.encoder, "auto | mlp | table")->capture_default_str();
  c_train->add_option("--metrics", train.metrics, "Metrics CSV path (default <out>.metrics.csv)");
  c_train->add_option("--steps", train.steps, "Optimizer steps")->capture_default_str();
  c_train->add_option("--batch-distributions", train.batch_distributions, "Distributions per batch")
      ->capture_default_str();
  c_train->add_option("--samples-per-distribution", train.samples_per_distribution,
                      "Points drawn per distribution (0 = all)")
      ->capture_default_str();
  c_train->add_option("--lr", train.lr, "Adam learning rate")->capture_default_str();
  c_train->add_option("--epsilon", train.epsilon, "Log-determinant regularizer weight")->capture_default_str();
  c_train->add_option("--objective", train.objective, "Training objective")
      ->check(CLI::IsMember({"entropy", "variance"}))
      ->capture_default_str();
  c_train->add_option("--family", train.family, "gaussian | cauchy | imq")->capture_default_str();
  c_train->add_option("--gamma1", train.gamma1, "Embedding kernel bandwidth or auto")->capture_default_str();
  c_train->add_option("--gamma2", train.gamma2, "Distribution kernel bandwidth or auto")->capture_default_str();
  c_train->add_option("--latent-dim", train.latent_dim, "Latent sphere dimension")->capture_default_str();
  c_train->add_option("--hidden-dim", train.hidden_dim, "MLP hidden width")->capture_default_str();
  c_train->add_option("--log-every", train.log_every, "Log metrics every k steps")->capture_default_str();

  GramOptions gram;
  CLI::App* c_gram = add_command(app, "gram", "Compute a distribution kernel Gram matrix as CSV", gram);
  c_gram->add_option("--checkpoint", gram.checkpoint, "Checkpoint JSON (omit for raw-space kernels)");
  c_gram->add_option("--data", gram.data, "Dataset JSONL");
  c_gram->add_option("--format", gram.format, "auto | jsonl | histogram-jsonl")->capture_default_str();
  c_gram->add_option("--family", gram.family, "linear | gaussian | cauchy | imq | sw1 | sw2 (default: checkpoint's)");
  c_gram->add_option("--gamma1", gram.gamma1, "Embedding bandwidth or auto")->capture_default_str();
  c_gram->add_option("--gamma2", gram.gamma2, "Distribution bandwidth or auto")->capture_default_str();
  c_gram->add_option("--lambda", gram.lambda, "Sliced Wasserstein kernel scale or auto")->capture_default_str();
  c_gram->add_option("--projections", gram.projections, "Sliced Wasserstein directions")->capture_default_str();
  c_gram->add_option("--samples", gram.samples, "Points drawn per distribution (0 = all)")->capture_default_str();
  c_gram->add_option("--repeats", gram.repeats, "Independent estimates, written as <stem>.r<k><ext>")
      ->capture_default_str();

  ClassifyOptions cls;
  CLI::App* c_cls = add_command(app, "classify", "SVM grid search on a precomputed Gram", cls);
  c_cls->add_option("--gram", cls.grams, "Gram CSV file(s); several files are treated as repeats");
  c_cls->add_option("--labels", cls.labels, "Labels JSONL {id,label[,split]} or CSV id,label[,split]");
  c_cls->add_option("--repeats", cls.repeats, "Read <stem>.r<k><ext> for k < repeats from one --gram base path")
      ->capture_default_str();
  c_cls->add_option("--holdout-fraction", cls.holdout_fraction,
                    "Stratified held-out fraction when labels carry no split field")
      ->capture_default_str();
  c_cls->add_option("--splits", cls.splits, "Validation splits for the C search")->capture_default_str();
  c_cls->add_option("--train-fraction", cls.train_fraction, "Train share of each validation split")
      ->capture_default_str();

  CheckOptions chk;
  CLI::App* c_chk = add_command(app, "check", "Evaluate entropy diagnostics and identity checks", chk);
  c_chk->add_option("--checkpoint", chk.checkpoint, "Checkpoint JSON (omit for a fresh random encoder)");
  c_chk->add_option("--data", chk.data, "Dataset JSONL");
  c_chk->add_option("--format", chk.format, "auto | jsonl | histogram-jsonl")->capture_default_str();
  c_chk->add_option("--gram", chk.gram, "Gram CSV to check for symmetry and PSD");
  c_chk->add_option("--family", chk.family, "gaussian | cauchy | imq (default: checkpoint's)");
  c_chk->add_option("--gamma1", chk.gamma1, "Embedding bandwidth or auto")->capture_default_str();
  c_chk->add_option("--gamma2", chk.gamma2, "Distribution bandwidth or auto")->capture_default_str();
  c_chk->add_option("--samples", chk.samples, "Points drawn per distribution (0 = all)")->capture_default_str();
  c_chk->add_option("--latent-dim", chk.latent_dim, "Latent dimension of a fresh encoder")->capture_default_str();
  c_chk->add_option("--hidden-dim", chk.hidden_dim, "Hidden width of a fresh encoder")->capture_default_str();

  ToyOptions toy;
  CLI::App* c_toy = add_command(app, "toy", "Entropy diagnostics for six distributions on a sphere", toy);
  c_toy->add_option("--spreads", toy.spreads, "Spread values (default: 12 log-spaced in [1e-3, 2])");
  c_toy->add_option("--m", toy.m, "Number of distributions")->capture_default_str();
  c_toy->add_option("--n", toy.n, "Samples per distribution")->capture_default_str();
  c_toy->add_option("--dim", toy.dim, "Ambient dimension")->capture_default_str();
  c_toy->add_option("--gamma1", toy.gamma1, "Embedding bandwidth")->capture_default_str();
  c_toy->add_option("--gamma2", toy.gamma2, "Distribution bandwidth")->capture_default_str();
  c_toy->add_option("--family", toy.family, "gaussian | cauchy | imq")->capture_default_str();

  SynthOptions syn;
  CLI::App* c_syn = add_command(app, "synth", "Write a synthetic dataset as JSONL", syn);
  c_syn->add_option("--kind", syn.kind, "sphere | two-class")->capture_default_str();
  c_syn->add_option("--m", syn.m, "Distributions (sphere)")->capture_default_str();
  c_syn->add_option("--m-per-class", syn.m_per_class, "Distributions per class (two-class)")->capture_default_str();
  c_syn->add_option("--n", syn.n, "Samples per distribution")->capture_default_str();
  c_syn->add_option("--dim", syn.dim, "Dimension")->capture_default_str();
  c_syn->add_option("--spread", syn.spread, "Noise scale around each centre (sphere)")->capture_default_str();
  c_syn->add_option("--separation", syn.separation, "Class mean offset (two-class)")->capture_default_str();

  std::vector<std::string> reversed(args.rbegin(), args.rend());
  try {
    app.parse(reversed);
    for (CLI::App* sub : app.get_subcommands()) apply_config(sub);
  } catch (const CLI::CallForHelp&) {
    const CLI::App* target = &app;
    for (const CLI::App* sub : app.get_subcommands())
      if (sub->parsed()) target = sub;
    out << target->help();
    return 0;
  } catch (const CLI::CallForAllHelp&) {
    out << app.help("", CLI::AppFormatMode::All);
    return 0;
  } catch (const CLI::ParseError& e) {
    error_json(err, "usage", e.what(), 2);
    return 2;
  }

  try {
    if (c_train->parsed()) return cmd_train(train, out);
    if (c_gram->parsed()) return cmd_gram(gram, out);
    if (c_cls->parsed()) return cmd_classify(cls, out);
    if (c_chk->parsed()) return cmd_check(chk, out);
    if (c_toy->parsed()) return cmd_toy(toy, out);
    if (c_syn->parsed()) return cmd_synth(syn, out);
  } catch (const InvariantFailure& e) {
    error_json(err, "invariant", e.what(), 1);
    return 1;
  } catch (const NumericalError& e) {
    error_json(err, "numerical", e.what(), 1);
    return 1;
  } catch (const std::exception& e) {
    error_json(err, "data", e.what(), 2);
    return 2;
  }
  error_json(err, "usage", "no subcommand given", 2);
  return 2;
}

int run(int argc, const char* const* argv, std::ostream& out, std::ostream& err) {
  std::vector<std::string> args;
  for (int i = 1; i < argc; ++i) args.emplace_back(argv[i]);
  return run(args, out, err);
}

}  // namespace mdke::cli
