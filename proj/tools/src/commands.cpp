#include "commands.hpp"

#include <charconv>
#include <cmath>
#include <filesystem>
#include <fstream>
#include <map>
#include <optional>
#include <set>
#include <variant>

#include <json.hpp>

#include "labels.hpp"
#include "mdke/bandwidth.hpp"
#include "mdke/checkpoint.hpp"
#include "mdke/dataset_io.hpp"
#include "mdke/downstream.hpp"
#include "mdke/errors.hpp"
#include "mdke/file_util.hpp"
#include "mdke/gram_io.hpp"
#include "mdke/kernels.hpp"
#include "mdke/objective.hpp"
#include "mdke/sliced_wasserstein.hpp"
#include "mdke/trainer.hpp"

namespace mdke::cli {

namespace fs = std::filesystem;
using nlohmann::json;

namespace {

constexpr std::uint64_t kHoldoutStream = 0x401D0u;
constexpr std::uint64_t kRawBandwidthStream = 0xBA4D0u;
// Cap on the point count fed to the latent nearest-neighbour heuristic.
constexpr std::size_t kHeuristicPointCap = 1000;

std::optional<double> parse_auto(const std::string& text, const char* name) {
  if (text == "auto" || text.empty()) return std::nullopt;
  double v = 0.0;
  const auto [ptr, ec] = std::from_chars(text.data(), text.data() + text.size(), v);
  if (ec != std::errc{} || ptr != text.data() + text.size() || !(v > 0.0) || !std::isfinite(v))
    throw UsageError(std::string(name) + " must be a positive number or \"auto\", got \"" + text + "\"");
  return v;
}

void require_file(const std::string& path, const char* what) {
  if (path.empty()) throw UsageError(std::string(what) + " path is required");
  if (!fs::exists(path)) throw UsageError(std::string(what) + " not found: " + path);
}

void require_output_dir(const std::string& path) {
  if (path.empty()) return;
  const fs::path parent = fs::path(path).parent_path();
  if (!parent.empty() && !fs::is_directory(parent))
    throw UsageError("output directory does not exist: " + parent.string());
}

DatasetFormat resolve_format(const std::string& path, const std::string& format) {
  if (format != "auto") return parse_dataset_format(format);
  std::ifstream in(path);
  std::string line;
  while (std::getline(in, line)) {
    if (line.find_first_not_of(" \t\r") == std::string::npos) continue;
    try {
      const json j = json::parse(line);
      return j.is_object() && j.contains("indices") ? DatasetFormat::kHistogramJsonl : DatasetFormat::kJsonl;
    } catch (const json::parse_error&) {
      throw UsageError("dataset line is not valid JSON: " + path);
    }
  }
  return DatasetFormat::kJsonl;
}

AnyDataset load_any(const std::string& path, const std::string& format) {
  if (path.empty()) throw UsageError("dataset path is required");
  if (!fs::exists(path)) throw UsageError("dataset not found: " + path);
  return load_dataset(path, resolve_format(path, format));
}

void emit(const std::string& path, const std::string& text, std::ostream& out) {
  if (path.empty() || path == "-") out << text;
  else write_file_atomic(path, text);
}

void check_encoder_fits(const Checkpoint& ckpt, const AnyDataset& data) {
  if (const auto* ds = std::get_if<DistributionDataset>(&data)) {
    const auto* mlp = std::get_if<MlpEncoder>(&ckpt.encoder);
    if (!mlp) throw UsageError("checkpoint/dataset mismatch: table encoder cannot read sample datasets");
    if (mlp->input_dim() != ds->input_dim())
      throw UsageError("checkpoint/dataset mismatch: encoder input dimension " + std::to_string(mlp->input_dim()) +
                       ", dataset dimension " + std::to_string(ds->input_dim()));
  } else {
    const auto& hs = std::get<SupportIndexDataset>(data);
    const auto* table = std::get_if<TableEncoder>(&ckpt.encoder);
    if (!table) throw UsageError("checkpoint/dataset mismatch: mlp encoder cannot read histogram datasets");
    if (static_cast<std::size_t>(table->support_size()) != hs.support_size())
      throw UsageError("checkpoint/dataset mismatch: encoder support size " + std::to_string(table->support_size()) +
                       ", dataset support size " + std::to_string(hs.support_size()));
  }
}

std::vector<std::string> dataset_ids(const AnyDataset& data) {
  return std::visit([](const auto& d) { return d.ids(); }, data);
}

std::size_t dataset_size(const AnyDataset& data) {
  return std::visit([](const auto& d) { return d.size(); }, data);
}

std::size_t mean_points(const AnyDataset& data) {
  std::size_t total = 0;
  if (const auto* ds = std::get_if<DistributionDataset>(&data)) {
    for (const auto& d : ds->distributions()) total += static_cast<std::size_t>(d.size());
  } else {
    for (const auto& h : std::get<SupportIndexDataset>(data).distributions()) total += h.indices.size();
  }
  return std::max<std::size_t>(1, total / std::max<std::size_t>(1, dataset_size(data)));
}

std::vector<WeightedPoints> encode_any(const Encoder& enc, const AnyDataset& data, std::size_t samples, Rng& rng) {
  return std::visit([&](const auto& d) { return encode_dataset(enc, d, samples, rng); }, data);
}

std::vector<WeightedPoints> raw_points(const DistributionDataset& ds, std::size_t samples, Rng& rng) {
  std::vector<WeightedPoints> out;
  out.reserve(ds.size());
  for (const auto& d : ds.distributions())
    out.push_back(uniform_points(samples > 0 ? subsample(d, samples, rng).samples() : d.samples()));
  return out;
}

// Latent-sphere heuristic bandwidths for a checkpoint-free (fresh) encoder.
Bandwidths latent_bandwidths(const AnyDataset& data, std::size_t samples, long latent_dim, std::uint64_t seed,
                             const std::string& gamma1, const std::string& gamma2) {
  TrainConfig tc;
  const std::size_t m = dataset_size(data);
  const std::size_t s = samples > 0 ? samples : mean_points(data);
  tc.batch_distributions = std::max<std::size_t>(1, std::min(m, kHeuristicPointCap / std::max<std::size_t>(1, s)));
  tc.samples_per_distribution = std::min(s, kHeuristicPointCap);
  tc.latent_dim = latent_dim;
  tc.seed = seed;
  KernelConfig kc;
  kc.gamma1 = parse_auto(gamma1, "gamma1");
  kc.gamma2 = parse_auto(gamma2, "gamma2");
  return resolve_bandwidths(tc, kc, m, s);
}

json vec_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (Eigen::Index i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json report_json(const EvalReport& r, std::size_t splits, std::size_t c_grid_size, std::size_t repeats) {
  json j;
  j["best_C"] = r.best_c;
  j["split_accuracies"] = r.split_accuracies;
  j["mean"] = r.mean;
  j["variance"] = r.variance;
  j["heldout_accuracies"] = r.heldout_accuracies;
  j["heldout_mean"] = r.heldout_mean ? json(*r.heldout_mean) : json(nullptr);
  j["heldout_variance"] = r.heldout_variance ? json(*r.heldout_variance) : json(nullptr);
  j["classes"] = r.classes;
  j["confusion"] = r.confusion;
  j["splits"] = splits;
  j["c_grid_size"] = c_grid_size;
  j["repeats"] = repeats;
  return j;
}

}  // namespace

std::vector<double> default_toy_spreads() {
  constexpr int kCount = 12;
  std::vector<double> out(kCount);
  const double lo = std::log(1e-3);
  const double hi = std::log(2.0);
  for (int k = 0; k < kCount; ++k) out[k] = std::exp(lo + (hi - lo) * k / (kCount - 1));
  out.front() = 1e-3;
  out.back() = 2.0;
  return out;
}

std::string repeat_path(const std::string& path, std::size_t r, std::size_t repeats) {
  if (repeats <= 1) return path;
  const fs::path p(path);
  fs::path name = p.stem();
  name += ".r" + std::to_string(r);
  name += p.extension();
  return (p.parent_path() / name).string();
}

int cmd_train(const TrainOptions& opts, std::ostream& out) {
  require_output_dir(opts.out);
  require_output_dir(opts.metrics);
  if (opts.out.empty()) throw UsageError("--out checkpoint path is required");
  const AnyDataset data = load_any(opts.data, opts.format);

  TrainConfig tc;
  tc.steps = opts.steps;
  tc.batch_distributions = opts.batch_distributions;
  tc.samples_per_distribution = opts.samples_per_distribution;
  tc.lr = opts.lr;
  tc.epsilon = opts.epsilon;
  tc.objective = parse_objective(opts.objective);
  tc.seed = opts.seed;
  tc.log_every = opts.log_every;
  tc.latent_dim = opts.latent_dim;
  tc.hidden_dim = opts.hidden_dim;
  KernelConfig kc;
  kc.family = parse_distribution_kernel(opts.family);
  kc.gamma1 = parse_auto(opts.gamma1, "gamma1");
  kc.gamma2 = parse_auto(opts.gamma2, "gamma2");

  const bool histogram = std::holds_alternative<SupportIndexDataset>(data);
  const EncoderKind kind = opts.encoder == "auto" ? (histogram ? EncoderKind::kTable : EncoderKind::kMlp)
                                                  : parse_encoder_kind(opts.encoder);
  const TrainResult result = histogram ? train(std::get<SupportIndexDataset>(data), kind, tc, kc)
                                       : train(std::get<DistributionDataset>(data), kind, tc, kc);

  std::string metrics_path = opts.metrics;
  if (metrics_path.empty()) {
    fs::path p(opts.out);
    p.replace_extension(".metrics.csv");
    metrics_path = p.string();
  }
  save_checkpoint(opts.out, result.checkpoint);
  write_file_atomic(metrics_path, metrics_csv(result.log));

  json summary;
  summary["checkpoint"] = opts.out;
  summary["metrics"] = metrics_path;
  summary["step_count"] = result.checkpoint.step_count;
  summary["gamma1"] = result.checkpoint.gamma1;
  summary["gamma2"] = result.checkpoint.gamma2;
  summary["final_logged_s2_nats"] = result.log.empty() ? json(nullptr) : json(result.log.back().s2);
  if (result.full_report) {
    summary["full_s2_nats"] = result.full_report->s2;
    summary["full_v_gram"] = result.full_report->v_gram;
    summary["full_min_eigenvalue"] = result.full_report->eigenvalues.minCoeff();
  }
  out << summary.dump(2) << "\n";
  return 0;
}

int cmd_gram(const GramOptions& opts, std::ostream& out) {
  if (!opts.checkpoint.empty()) require_file(opts.checkpoint, "checkpoint");
  require_output_dir(opts.out);
  if (opts.repeats < 1) throw UsageError("repeats must be >= 1");
  if (opts.repeats > 1 && opts.out.empty()) throw UsageError("--out is required with --repeats > 1");
  const AnyDataset data = load_any(opts.data, opts.format);

  std::optional<Checkpoint> ckpt;
  if (!opts.checkpoint.empty()) {
    ckpt = load_checkpoint(opts.checkpoint);
    check_encoder_fits(*ckpt, data);
  }
  const DistributionKernel family = opts.family.empty()
                                        ? (ckpt ? ckpt->family : DistributionKernel::kGaussian)
                                        : parse_distribution_kernel(opts.family);
  const auto ids = dataset_ids(data);
  Rng rng(opts.seed);

  for (std::size_t r = 0; r < opts.repeats; ++r) {
    GramMatrix gram;
    if (family == DistributionKernel::kSw1 || family == DistributionKernel::kSw2) {
      const auto* ds = std::get_if<DistributionDataset>(&data);
      if (!ds) throw UsageError("sliced Wasserstein kernels need a sample dataset");
      std::vector<EmpiricalDistribution> dists;
      for (const auto& d : ds->distributions()) {
        const EmpiricalDistribution src = opts.samples > 0 ? subsample(d, opts.samples, rng) : d;
        if (ckpt) dists.emplace_back(src.id(), encode(ckpt->encoder, make_input(src)).points, src.label());
        else dists.push_back(src);
      }
      const DistributionDataset view(ds->name(), std::move(dists));
      const int p = family == DistributionKernel::kSw1 ? 1 : 2;
      const auto lambda = parse_auto(opts.lambda, "lambda");
      gram = sw_kernel_gram(view, p, lambda ? *lambda : sw_lambda_heuristic(view, p), opts.projections, rng,
                            opts.threads);
    } else {
      std::vector<WeightedPoints> encoded;
      double gamma1 = 0.0;
      double gamma2 = 0.0;
      if (ckpt) {
        encoded = encode_any(ckpt->encoder, data, opts.samples, rng);
        gamma1 = parse_auto(opts.gamma1, "gamma1").value_or(ckpt->gamma1);
        gamma2 = parse_auto(opts.gamma2, "gamma2").value_or(ckpt->gamma2);
      } else {
        const auto* ds = std::get_if<DistributionDataset>(&data);
        if (!ds) throw UsageError("histogram datasets need a checkpoint (table encoder) for MMD-family Grams");
        encoded = raw_points(*ds, opts.samples, rng);
        Rng bw_rng(opts.seed ^ kRawBandwidthStream);
        gamma1 = parse_auto(opts.gamma1, "gamma1").value_or(0.0);
        if (gamma1 == 0.0) gamma1 = median_heuristic_gamma(*ds, bw_rng);
        gamma2 = parse_auto(opts.gamma2, "gamma2").value_or(0.0);
        if (gamma2 == 0.0 && family != DistributionKernel::kLinear)
          gamma2 = median_inverse_gamma(mmd_sq_matrix(mean_embedding_gram(encoded, gamma1, opts.threads)));
      }
      gram = distribution_gram(encoded, ids, family, gamma1, gamma2, opts.threads);
    }
    if (opts.out.empty()) out << to_csv(gram);
    else save_gram_csv(repeat_path(opts.out, r, opts.repeats), gram);
  }
  return 0;
}

int cmd_classify(const ClassifyOptions& opts, std::ostream& out) {
  if (opts.grams.empty()) throw UsageError("--gram is required");
  std::vector<std::string> paths;
  if (opts.repeats > 1) {
    if (opts.grams.size() != 1) throw UsageError("--repeats expects a single --gram base path");
    for (std::size_t r = 0; r < opts.repeats; ++r) paths.push_back(repeat_path(opts.grams.front(), r, opts.repeats));
  } else {
    paths = opts.grams;
  }
  for (const auto& p : paths) require_file(p, "gram");
  require_file(opts.labels, "labels");
  require_output_dir(opts.out);
  if (opts.holdout_fraction < 0.0 || opts.holdout_fraction >= 1.0)
    throw UsageError("holdout-fraction must lie in [0, 1)");

  const auto entries = load_labels(opts.labels);
  std::map<std::string, const LabelEntry*> by_id;
  for (const auto& e : entries)
    if (!by_id.emplace(e.id, &e).second) throw UsageError("duplicate id in labels: " + e.id);

  std::vector<Eigen::MatrixXd> grams;
  std::vector<std::string> ids;
  for (const auto& p : paths) {
    GramMatrix g = load_gram_csv(p);
    if (ids.empty()) {
      ids = g.ids;
      if (ids.size() != by_id.size())
        throw UsageError("id mismatch: Gram has " + std::to_string(ids.size()) + " ids, labels have " +
                         std::to_string(by_id.size()));
      for (const auto& id : ids)
        if (!by_id.count(id)) throw UsageError("id mismatch: no label for Gram id " + id);
      grams.push_back(std::move(g.values));
    } else {
      if (g.ids.size() != ids.size()) throw UsageError("id mismatch between Gram files: " + p);
      std::map<std::string, Eigen::Index> where;
      for (std::size_t i = 0; i < g.ids.size(); ++i) where[g.ids[i]] = static_cast<Eigen::Index>(i);
      std::vector<Eigen::Index> order;
      for (const auto& id : ids) {
        const auto it = where.find(id);
        if (it == where.end()) throw UsageError("id mismatch between Gram files: " + id + " missing in " + p);
        order.push_back(it->second);
      }
      grams.emplace_back(g.values(order, order));
    }
  }

  std::vector<int> labels;
  std::vector<bool> heldout;
  bool any_split = false;
  for (const auto& id : ids) {
    const LabelEntry* e = by_id.at(id);
    labels.push_back(e->label);
    heldout.push_back(e->heldout.value_or(false));
    any_split = any_split || e->heldout.has_value();
  }
  if (any_split && opts.holdout_fraction > 0.0)
    throw UsageError("labels carry split fields; --holdout-fraction cannot be combined with them");
  if (!any_split) {
    heldout.assign(labels.size(), false);
    if (opts.holdout_fraction > 0.0) {
      Rng rng(opts.seed ^ kHoldoutStream);
      std::vector<std::size_t> all(labels.size());
      for (std::size_t i = 0; i < all.size(); ++i) all[i] = i;
      const Split s = stratified_split(labels, all, 1.0 - opts.holdout_fraction, 20, rng);
      for (auto i : s.validation) heldout[i] = true;
    }
  }

  EvalProtocol protocol;
  protocol.splits = opts.splits;
  protocol.train_fraction = opts.train_fraction;
  protocol.seed = opts.seed;
  protocol.threads = opts.threads;
  const EvalReport report = grid_search_eval(grams, labels, heldout, protocol);
  emit(opts.out, report_json(report, protocol.splits, protocol.c_grid.size(), grams.size()).dump(2) + "\n", out);
  return 0;
}

int cmd_check(const CheckOptions& opts, std::ostream& out) {
  if (!opts.checkpoint.empty()) require_file(opts.checkpoint, "checkpoint");
  if (!opts.gram.empty()) require_file(opts.gram, "gram");
  if (opts.data.empty() && opts.gram.empty()) throw UsageError("check needs --data and/or --gram");
  require_output_dir(opts.out);

  json report;
  std::map<std::string, bool> checks;
  std::vector<std::string> failed_details;
  auto record = [&](const std::string& name, bool ok, const std::string& detail) {
    checks[name] = ok;
    if (!ok) failed_details.push_back(name + ": " + detail);
  };

  if (!opts.gram.empty()) {
    const GramMatrix g = load_gram_csv(opts.gram);
    const double scale = std::max(1.0, g.values.cwiseAbs().maxCoeff());
    const double asym = (g.values - g.values.transpose()).cwiseAbs().maxCoeff();
    record("gram_file_symmetric", asym <= 1e-12 * scale, "max |K - K^T| = " + format_double(asym));
    const Eigen::MatrixXd sym = 0.5 * (g.values + g.values.transpose());
    const Eigen::VectorXd eig = spectrum_report(sym);
    const double min_eig = eig(eig.size() - 1);
    record("gram_file_psd", min_eig >= -1e-9 * scale, "min eigenvalue of K/M = " + format_double(min_eig));
    report["gram_file"] = {{"path", opts.gram},
                           {"max_asymmetry", asym},
                           {"eigenvalues", vec_json(eig)},
                           {"min_eigenvalue", min_eig}};
  }

  if (!opts.data.empty()) {
    const AnyDataset data = load_any(opts.data, opts.format);
    std::optional<Checkpoint> ckpt;
    if (!opts.checkpoint.empty()) {
      ckpt = load_checkpoint(opts.checkpoint);
      check_encoder_fits(*ckpt, data);
    }
    const bool histogram = std::holds_alternative<SupportIndexDataset>(data);
    Encoder encoder = ckpt ? ckpt->encoder
                           : init_encoder(histogram ? EncoderKind::kTable : EncoderKind::kMlp,
                                          {histogram ? static_cast<Eigen::Index>(std::get<SupportIndexDataset>(data).support_size())
                                                     : std::get<DistributionDataset>(data).input_dim(),
                                           opts.hidden_dim, opts.latent_dim},
                                          opts.seed);
    const DistributionKernel family = opts.family.empty()
                                          ? (ckpt ? ckpt->family : DistributionKernel::kGaussian)
                                          : parse_distribution_kernel(opts.family);
    if (!is_normalized(family) || !is_mmd_family(family))
      throw UsageError("check needs a normalized MMD family (gaussian, cauchy, imq)");
    Bandwidths bw;
    if (ckpt) {
      bw.gamma1 = parse_auto(opts.gamma1, "gamma1").value_or(ckpt->gamma1);
      bw.gamma2 = parse_auto(opts.gamma2, "gamma2").value_or(ckpt->gamma2);
    } else {
      bw = latent_bandwidths(data, opts.samples, opts.latent_dim, opts.seed, opts.gamma1, opts.gamma2);
    }
    Rng rng(opts.seed);
    const auto encoded = encode_any(encoder, data, opts.samples, rng);
    const std::size_t m = encoded.size();
    if (m < 2) throw UsageError("check needs at least two distributions");

    const Eigen::MatrixXd g = mean_embedding_gram(encoded, bw.gamma1, opts.threads);
    const Eigen::MatrixXd k = distribution_kernel_matrix(g, family, bw.gamma2);
    const EntropyReport er = entropy_report(g, k, bw.gamma2);

    const double asym = std::max((g - g.transpose()).cwiseAbs().maxCoeff(), (k - k.transpose()).cwiseAbs().maxCoeff());
    record("gram_symmetric", asym == 0.0, "max asymmetry " + format_double(asym));
    const double vdiff = std::max(std::abs(er.v_gram - er.v_gap), std::abs(er.v_gram - er.j_half));
    record("variance_identities", vdiff <= 1e-9, "max route difference " + format_double(vdiff));
    const double trace_err = std::abs(er.eigenvalues.sum() - 1.0);
    record("spectrum_trace", trace_err <= 1e-9, "|sum eig - 1| = " + format_double(trace_err));
    const double ln_m = std::log(static_cast<double>(m));
    record("entropy_range", er.s2 >= -1e-12 && er.s2 <= ln_m + 1e-12,
           "S2 = " + format_double(er.s2) + " outside [0, ln M]");
    const double min_eig = er.eigenvalues(er.eigenvalues.size() - 1);
    record("psd", min_eig >= -1e-9, "min eigenvalue " + format_double(min_eig));
    double gv_err = 0.0;
    for (const auto& p : encoded) {
      const GeneralizedVariance gv = generalized_variance(p, bw.gamma1);
      gv_err = std::max(gv_err, std::abs(gv.var_h - gv.one_minus_norm));
    }
    record("generalized_variance", gv_err <= 1e-12, "max path difference " + format_double(gv_err));
    if (family == DistributionKernel::kGaussian) {
      const BoundReport b = entropy_bound_check(k, g, bw.gamma2, family);
      record("entropy_bound", b.slack >= -1e-9, "slack " + format_double(b.slack));
      report["bound_slack"] = b.slack;
    } else {
      report["bound_slack"] = nullptr;
    }

    report["s2_nats"] = er.s2;
    report["v_gram"] = er.v_gram;
    report["v_gap"] = er.v_gap;
    report["j_half"] = er.j_half;
    report["avg_sq_norm"] = er.avg_sq_norm;
    report["mixture_sq_norm"] = er.mixture_sq_norm;
    report["eigenvalues"] = vec_json(er.eigenvalues);
    report["min_eigenvalue"] = min_eig;
    report["gamma1"] = bw.gamma1;
    report["gamma2"] = bw.gamma2;
    report["family"] = to_string(family);
    report["distributions"] = m;
    report["encoder"] = ckpt ? "checkpoint" : "fresh";
  }

  report["checks"] = checks;
  std::vector<std::string> failed;
  for (const auto& [name, ok] : checks)
    if (!ok) failed.push_back(name);
  report["failed"] = failed;
  emit(opts.out, report.dump(2) + "\n", out);
  if (!failed_details.empty()) {
    std::string msg = "invariant violated: ";
    for (std::size_t i = 0; i < failed_details.size(); ++i) msg += (i ? "; " : "") + failed_details[i];
    throw InvariantFailure(msg);
  }
  return 0;
}

int cmd_toy(const ToyOptions& opts, std::ostream& out) {
  const std::vector<double> spreads = opts.spreads.empty() ? default_toy_spreads() : opts.spreads;
  if (spreads.size() < 2) throw UsageError("toy sweep needs at least two spread values");
  for (double s : spreads)
    if (!(s >= 0.0) || !std::isfinite(s)) throw UsageError("spread values must be finite and >= 0");
  require_output_dir(opts.out);
  const DistributionKernel family = parse_distribution_kernel(opts.family);
  if (!is_normalized(family) || !is_mmd_family(family))
    throw UsageError("toy sweep needs a normalized MMD family (gaussian, cauchy, imq)");

  std::string csv = "spread,s2,v,avg_sq_norm,mixture_sq_norm";
  for (std::size_t i = 0; i < opts.m; ++i) csv += ",eig_" + std::to_string(i);
  csv += '\n';
  for (double spread : spreads) {
    const DistributionDataset ds = synth_sphere_mixture(opts.m, opts.n, opts.dim, spread, opts.seed);
    std::vector<WeightedPoints> encoded;
    for (const auto& d : ds.distributions()) encoded.push_back(uniform_points(d.samples()));
    const EntropyReport r = entropy_report(encoded, opts.gamma1, family, opts.gamma2, opts.threads);
    csv += format_double(spread);
    for (double v : {r.s2, r.v_gram, r.avg_sq_norm, r.mixture_sq_norm}) csv += ',' + format_double(v);
    for (Eigen::Index i = 0; i < r.eigenvalues.size(); ++i) csv += ',' + format_double(r.eigenvalues(i));
    csv += '\n';
  }
  emit(opts.out, csv, out);
  return 0;
}

int cmd_synth(const SynthOptions& opts, std::ostream& out) {
  require_output_dir(opts.out);
  DistributionDataset ds = [&] {
    if (opts.kind == "sphere") return synth_sphere_mixture(opts.m, opts.n, opts.dim, opts.spread, opts.seed);
    if (opts.kind == "two-class")
      return synth_two_class_task(opts.m_per_class, opts.n, opts.dim, opts.separation, opts.seed);
    throw UsageError("unknown synthetic kind \"" + opts.kind + "\" (expected sphere or two-class)");
  }();
  emit(opts.out, to_jsonl(ds), out);
  return 0;
}

}  // namespace mdke::cli
