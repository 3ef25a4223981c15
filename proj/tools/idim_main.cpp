// Command-line front end: dataset ingestion, intrinsic-dimension estimation,
// class-wise profiles, imbalance-mitigation artifacts, synthetic data and
// robustness sweeps. All outputs are deterministic for fixed flags.

#include <CLI11.hpp>
#include <cmath>
#include <cstdint>
#include <iostream>
#include <json.hpp>
#include <string>
#include <vector>

#include "idim/bench.hpp"
#include "idim/error.hpp"
#include "idim/fishers.hpp"
#include "idim/imbalance.hpp"
#include "idim/io.hpp"
#include "idim/report.hpp"
#include "idim/synth.hpp"
#include "idim/version.hpp"

namespace {

using idim::EstimatorSelector;
using nlohmann::json;

struct InputFlags {
  std::string path;
  std::string format = "csv";
  bool has_header = false;
  std::string pixel_scale = "unit";

  void attach(CLI::App& cmd, bool required = true) {
    auto* opt = cmd.add_option("--input", path, "input dataset path");
    if (required) opt->required();
    cmd.add_option("--format", format, "input format")->check(CLI::IsMember({"csv", "idm1", "cifar10"}));
    cmd.add_flag("--has-header", has_header, "skip the first CSV row");
    cmd.add_option("--pixel-scale", pixel_scale, "CIFAR-10 pixel scaling")
        ->check(CLI::IsMember({"unit", "raw"}));
  }

  idim::io::PixelScale scale() const {
    return pixel_scale == "raw" ? idim::io::PixelScale::Raw : idim::io::PixelScale::Unit;
  }
};

struct EstimatorFlags {
  std::string name = "fishers";
  std::string alpha_grid;
  double cond_number = 10.0;
  double selection_factor = 0.9;
  int min_samples = 10;
  bool dedupe = false;
  int k = 20;
  bool no_correction = false;
  double tle_epsilon = 1e-4;
  std::string tle_aggregation = "harmonic";
  bool fallback_mean = false;

  void attach(CLI::App& cmd) {
    cmd.add_option("--estimator", name, "ID estimator")->check(CLI::IsMember({"fishers", "mle", "tle"}));
    cmd.add_option("--alpha-grid", alpha_grid, "FisherS alpha grid as start:stop:step");
    cmd.add_option("--cond-number", cond_number, "FisherS conditional number C");
    cmd.add_option("--selection-factor", selection_factor, "FisherS alpha selection factor");
    cmd.add_option("--min-samples", min_samples, "minimum samples per FisherS run");
    cmd.add_flag("--dedupe", dedupe, "drop duplicate rows before FisherS estimation");
    cmd.add_option("--k", k, "neighbor count for mle/tle");
    cmd.add_flag("--no-correction", no_correction, "disable the MLE asymptotic correction");
    cmd.add_option("--tle-epsilon", tle_epsilon, "TLE small-measurement cutoff (relative to r)");
    cmd.add_option("--tle-aggregation", tle_aggregation, "TLE aggregation")
        ->check(CLI::IsMember({"harmonic", "arithmetic"}));
    cmd.add_flag("--fallback-mean", fallback_mean, "mean-impute classes whose estimation fails");
  }

  EstimatorSelector selector() const {
    EstimatorSelector out;
    out.kind = idim::estimator_kind_from_string(name);
    out.fishers.conditional_number = cond_number;
    out.fishers.selection_factor = selection_factor;
    out.fishers.min_samples = min_samples;
    out.fishers.dedupe = dedupe;
    if (!alpha_grid.empty()) out.fishers.alpha_grid = parse_alpha_grid(alpha_grid);
    out.knn.k = k;
    out.knn.apply_correction = !no_correction;
    out.knn.tle_epsilon = tle_epsilon;
    out.knn.tle_aggregation = tle_aggregation == "arithmetic" ? idim::TleAggregation::Arithmetic
                                                              : idim::TleAggregation::Harmonic;
    out.fallback_to_mean = fallback_mean;
    if (out.kind == idim::EstimatorKind::FisherS) {
      out.fishers.validate();
    } else {
      out.knn.validate();
    }
    return out;
  }

  static std::vector<double> parse_alpha_grid(const std::string& text) {
    double start = 0.0, stop = 0.0, step = 0.0;
    if (std::sscanf(text.c_str(), "%lf:%lf:%lf", &start, &stop, &step) != 3 || !(step > 0.0)) {
      throw idim::Error(idim::ErrorKind::DomainError, "alpha grid must be start:stop:step with step > 0");
    }
    std::vector<double> grid;
    const int points = static_cast<int>(std::floor((stop - start) / step + 1e-9)) + 1;
    for (int i = 0; i < points; ++i) grid.push_back(start + step * i);
    return grid;
  }
};

json curve_to_json(const idim::SeparabilityCurve& curve) {
  json out = json::array();
  for (const auto& entry : curve) {
    out.push_back(json{{"alpha", entry.alpha},
                       {"p_bar", entry.p_bar},
                       {"n_alpha", entry.valid ? json(entry.n_alpha) : json()},
                       {"valid", entry.valid}});
  }
  return out;
}

json estimate_to_json(const idim::IdEstimate& estimate) {
  json out{{"value", estimate.value},
           {"alpha_star", std::isfinite(estimate.alpha_star) ? json(estimate.alpha_star) : json()},
           {"retained_k", estimate.retained_k},
           {"degenerate", estimate.degenerate},
           {"sample_count", estimate.sample_count},
           {"duplicate_count", estimate.duplicate_count},
           {"excluded_count", estimate.excluded_count},
           {"estimator", estimate.estimator}};
  out["curve"] = curve_to_json(estimate.curve);
  return out;
}

int cmd_estimate(const InputFlags& input, const EstimatorFlags& est, std::uint64_t seed,
                 const std::string& out_path) {
  const idim::SampleMatrix data = idim::io::read_matrix(input.path, input.format, input.has_header,
                                                        input.scale());
  const EstimatorSelector selector = est.selector();
  const idim::IdEstimate estimate = selector.run(data);

  json doc{{"schema_version", 1},
           {"tool_version", idim::kVersion},
           {"seed", seed},
           {"estimate", estimate_to_json(estimate)}};
  const std::string text = doc.dump(2) + "\n";
  if (out_path.empty()) {
    std::cout << text;
  } else {
    idim::io::write_file_atomic(out_path, text);
    std::cout << "id=" << estimate.value << " retained_k=" << estimate.retained_k
              << (estimate.degenerate ? " (degenerate)" : "") << "\n";
  }
  return 0;
}

int cmd_classwise(const InputFlags& input, const EstimatorFlags& est, std::uint64_t seed,
                  const std::string& out_path) {
  const idim::LabeledDataset dataset = idim::io::read_labeled(input.path, input.format, input.has_header,
                                                              input.scale());
  const EstimatorSelector selector = est.selector();
  const idim::ClassIdProfile profile = idim::classwise_id(dataset, selector);

  std::vector<int> labels(profile.num_classes());
  for (std::size_t c = 0; c < labels.size(); ++c) labels[c] = static_cast<int>(c);
  const auto report = idim::io::ReportJson::from_profile(profile, selector, seed, labels);
  idim::io::write_report(out_path, report);

  for (std::size_t c = 0; c < profile.num_classes(); ++c) {
    std::cout << "class " << c << ": n=" << profile.counts[c] << " id=" << profile.raw[c]
              << " normalized=" << profile.normalized[c]
              << (profile.degenerate[c] ? " (degenerate)" : "") << "\n";
  }
  return 0;
}

int cmd_weights(const std::string& report_path, const std::string& kind_name, double dro_scale,
                const std::string& blend, const std::string& transform, std::uint64_t seed,
                const std::string& out_path) {
  auto report = idim::io::read_report(report_path);
  idim::ClassIdProfile profile = report.profile();

  std::string provenance = profile.estimator_tag;
  if (transform == "reversed") {
    profile = idim::transform_profile(profile, idim::ProfileTransform::Reversed);
    provenance += "+reversed";
  } else if (transform == "shuffled") {
    profile = idim::transform_profile(profile, idim::ProfileTransform::Shuffled, seed);
    provenance += "+shuffled(seed=" + std::to_string(seed) + ")";
  }

  idim::MitigationReport artifact;
  artifact.kind = idim::mitigation_kind_from_string(kind_name);
  artifact.provenance = provenance;
  switch (artifact.kind) {
    case idim::MitigationKind::Sampling: {
      const auto probs = idim::id_sampling_probs(profile);
      artifact.values = probs.class_probs;
      if (!blend.empty()) {
        double t = 0.0, total = 0.0;
        if (std::sscanf(blend.c_str(), "%lf/%lf", &t, &total) != 2) {
          throw idim::Error(idim::ErrorKind::DomainError, "blend must be t/T");
        }
        const auto instance = idim::instance_balanced_probs(profile.counts);
        artifact.values = idim::progressive_blend(instance, probs.class_probs, t, total);
        artifact.params.emplace_back("blend_t", t);
        artifact.params.emplace_back("blend_total", total);
      }
      break;
    }
    case idim::MitigationKind::LossWeights:
      artifact.values = idim::loss_weights(profile);
      break;
    case idim::MitigationKind::LdamMargins:
      artifact.values = idim::ldam_margins(profile);
      break;
    case idim::MitigationKind::DroMargins: {
      const auto margins = idim::dro_margins(profile, dro_scale);
      artifact.values = margins.margins;
      artifact.params.emplace_back("scale_c", dro_scale);
      break;
    }
    case idim::MitigationKind::LogitDeltas:
      artifact.values = idim::logit_adjust_deltas(profile);
      break;
  }

  // Replace any prior artifact of the same kind.
  std::erase_if(report.artifacts, [&](const auto& a) { return a.kind == artifact.kind; });
  report.artifacts.push_back(artifact);
  idim::io::write_report(out_path.empty() ? report_path : out_path, report);

  std::cout << idim::to_string(artifact.kind) << ":";
  for (double v : artifact.values) std::cout << " " << v;
  std::cout << "\n";
  return 0;
}

idim::synth::CovarianceKind parse_covariance(const std::string& text) {
  if (text == "identity") return idim::synth::Identity{};
  double value = 0.0;
  if (std::sscanf(text.c_str(), "spherical:%lf", &value) == 1) return idim::synth::Spherical{value};
  if (std::sscanf(text.c_str(), "diag:%lf", &value) == 1) return idim::synth::DiagonalFixedTrace{value};
  if (std::sscanf(text.c_str(), "full:%lf", &value) == 1) return idim::synth::FullFixedDet{value};
  throw idim::Error(idim::ErrorKind::DomainError,
                    "covariance must be identity, spherical:s, diag:v or full:g");
}

void write_dataset(const std::string& path, const std::string& format, const idim::SampleMatrix& data,
                   const std::vector<int>* labels) {
  if (format == "csv") {
    idim::io::write_csv(path, data, labels);
  } else if (format == "idm1") {
    idim::io::write_idm1(path, data, labels);
  } else {
    throw idim::Error(idim::ErrorKind::DomainError, "output format must be csv or idm1");
  }
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"intrinsic-dimension estimation and class-imbalance artifacts"};
  app.set_version_flag("--version", idim::kVersion);
  app.require_subcommand(1);

  // estimate
  auto* estimate_cmd = app.add_subcommand("estimate", "estimate the ID of one point cloud");
  InputFlags est_input;
  EstimatorFlags est_flags;
  std::uint64_t est_seed = 0;
  std::string est_out;
  est_input.attach(*estimate_cmd);
  est_flags.attach(*estimate_cmd);
  estimate_cmd->add_option("--seed", est_seed, "seed recorded in the output");
  estimate_cmd->add_option("--out", est_out, "output JSON path (stdout when omitted)");

  // classwise
  auto* classwise_cmd = app.add_subcommand("classwise", "estimate per-class IDs of a labeled dataset");
  InputFlags cls_input;
  EstimatorFlags cls_flags;
  std::uint64_t cls_seed = 0;
  std::string cls_out;
  cls_input.attach(*classwise_cmd);
  cls_flags.attach(*classwise_cmd);
  classwise_cmd->add_option("--seed", cls_seed, "seed recorded in the report");
  classwise_cmd->add_option("--out", cls_out, "report JSON path")->required();

  // weights
  auto* weights_cmd = app.add_subcommand("weights", "derive mitigation artifacts from a stored report");
  std::string w_report, w_kind, w_blend, w_transform = "none", w_out;
  double w_dro_scale = 0.5;
  std::uint64_t w_seed = 0;
  weights_cmd->add_option("--report", w_report, "input report JSON")->required();
  weights_cmd->add_option("--weights-kind", w_kind, "artifact kind")
      ->required()
      ->check(CLI::IsMember({"sampling", "loss", "ldam", "dro", "logit"}));
  weights_cmd->add_option("--dro-scale", w_dro_scale, "DRO margin scale C");
  weights_cmd->add_option("--blend", w_blend, "progressive blend epoch as t/T (sampling only)");
  weights_cmd->add_option("--transform", w_transform, "profile transform")
      ->check(CLI::IsMember({"none", "reversed", "shuffled"}));
  weights_cmd->add_option("--seed", w_seed, "seed for the shuffled transform");
  weights_cmd->add_option("--out", w_out, "output report path (defaults to --report)");

  // synth
  auto* synth_cmd = app.add_subcommand("synth", "generate or perturb datasets");
  std::string s_kind = "gaussian", s_cov = "identity", s_out, s_out_format = "idm1";
  int s_d = 1, s_D = 0, s_classes = 10;
  std::int64_t s_n = 1000, s_nmax = 5000;
  double s_rho = 100.0, s_sigma = 0.0, s_clip_lo = 0.0, s_clip_hi = 1.0;
  bool s_rotate = false, s_labeled = false;
  std::uint64_t s_seed = 0;
  InputFlags s_input;
  synth_cmd->add_option("--kind", s_kind, "gaussian | longtail | noise")
      ->check(CLI::IsMember({"gaussian", "longtail", "noise"}));
  s_input.attach(*synth_cmd, /*required=*/false);
  synth_cmd->add_option("--d", s_d, "intrinsic dimension");
  synth_cmd->add_option("--D", s_D, "extrinsic dimension (defaults to --d)");
  synth_cmd->add_option("--n", s_n, "sample count");
  synth_cmd->add_option("--cov", s_cov, "identity | spherical:s | diag:v | full:g");
  synth_cmd->add_flag("--rotate", s_rotate, "rotate the embedded cloud");
  synth_cmd->add_option("--classes", s_classes, "long-tail class count check");
  synth_cmd->add_option("--n-max", s_nmax, "long-tail head-class count");
  synth_cmd->add_option("--rho", s_rho, "long-tail imbalance ratio");
  synth_cmd->add_option("--sigma", s_sigma, "noise standard deviation");
  synth_cmd->add_option("--clip-lo", s_clip_lo, "noise clip lower bound");
  synth_cmd->add_option("--clip-hi", s_clip_hi, "noise clip upper bound");
  synth_cmd->add_flag("--labeled", s_labeled, "treat --input as labeled for noise");
  synth_cmd->add_option("--seed", s_seed, "generator seed");
  synth_cmd->add_option("--out", s_out, "output dataset path")->required();
  synth_cmd->add_option("--out-format", s_out_format, "csv | idm1")
      ->check(CLI::IsMember({"csv", "idm1"}));

  // bench
  auto* bench_cmd = app.add_subcommand("bench", "run a robustness sweep and write CSV");
  std::string b_suite, b_out;
  std::uint64_t b_seed = 0;
  int b_repeats = 1, b_rotation_passes = 1;
  EstimatorFlags b_flags;
  InputFlags b_input;
  bench_cmd->add_option("--suite", b_suite, "sweep name")
      ->required()
      ->check(CLI::IsMember(idim::bench::suite_names()));
  bench_cmd->add_option("--seed", b_seed, "base seed");
  bench_cmd->add_option("--repeats", b_repeats, "seeds per sweep point");
  bench_cmd->add_option("--rotation-passes", b_rotation_passes, "consecutive-pair rotation passes");
  b_flags.attach(*bench_cmd);
  b_input.attach(*bench_cmd, /*required=*/false);
  bench_cmd->add_option("--out", b_out, "output CSV path")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::CallForHelp& e) {
    return app.exit(e);
  } catch (const CLI::CallForVersion& e) {
    return app.exit(e);
  } catch (const CLI::ParseError& e) {
    app.exit(e);
    return 2;
  }

  std::string stage = "cli";
  try {
    if (estimate_cmd->parsed()) {
      stage = "estimate";
      return cmd_estimate(est_input, est_flags, est_seed, est_out);
    }
    if (classwise_cmd->parsed()) {
      stage = "classwise";
      return cmd_classwise(cls_input, cls_flags, cls_seed, cls_out);
    }
    if (weights_cmd->parsed()) {
      stage = "weights";
      return cmd_weights(w_report, w_kind, w_dro_scale, w_blend, w_transform, w_seed, w_out);
    }
    if (synth_cmd->parsed()) {
      stage = "synth";
      if (s_kind == "gaussian") {
        idim::synth::GaussianSpec spec;
        spec.intrinsic_d = s_d;
        spec.extrinsic_D = s_D > 0 ? s_D : s_d;
        spec.n = s_n;
        spec.covariance = parse_covariance(s_cov);
        spec.rotate = s_rotate;
        spec.seed = s_seed;
        write_dataset(s_out, s_out_format, idim::synth::sample_gaussian(spec), nullptr);
      } else if (s_kind == "longtail") {
        const auto dataset = idim::io::read_labeled(s_input.path, s_input.format, s_input.has_header,
                                                    s_input.scale());
        idim::synth::LongTailSpec spec{dataset.num_classes(), s_nmax, s_rho, s_seed};
        const auto counts = idim::synth::longtail_counts(spec);
        const auto subset = idim::synth::subsample_longtail(dataset, counts, s_seed);
        write_dataset(s_out, s_out_format, subset.data, &subset.labels);
      } else {
        idim::synth::NoiseSpec noise{s_sigma, s_clip_lo, s_clip_hi, s_seed};
        if (s_labeled) {
          const auto dataset = idim::io::read_labeled(s_input.path, s_input.format, s_input.has_header,
                                                      s_input.scale());
          write_dataset(s_out, s_out_format, idim::synth::add_noise(dataset.data, noise), &dataset.labels);
        } else {
          const auto data = idim::io::read_matrix(s_input.path, s_input.format, s_input.has_header,
                                                  s_input.scale());
          write_dataset(s_out, s_out_format, idim::synth::add_noise(data, noise), nullptr);
        }
      }
      return 0;
    }
    if (bench_cmd->parsed()) {
      stage = "bench";
      idim::bench::SweepOptions opts;
      opts.seed = b_seed;
      opts.repeats = b_repeats;
      opts.estimator = b_flags.selector();
      opts.rotation_passes = b_rotation_passes;
      idim::SampleMatrix noise_input;
      const idim::SampleMatrix* input_ptr = nullptr;
      if (b_suite == "noise" && !b_input.path.empty()) {
        noise_input = idim::io::read_matrix(b_input.path, b_input.format, b_input.has_header,
                                            b_input.scale());
        input_ptr = &noise_input;
      }
      const auto rows = idim::bench::run_suite(b_suite, opts, input_ptr);
      idim::io::write_file_atomic(b_out, idim::bench::rows_to_csv(rows));
      std::cout << "wrote " << rows.size() << " rows to " << b_out << "\n";
      return 0;
    }
  } catch (const idim::Error& err) {
    std::cerr << "error: " << stage << ": " << err.what() << "\n";
    return 1;
  } catch (const std::exception& err) {
    std::cerr << "error: " << stage << ": " << err.what() << "\n";
    return 1;
  }
  return 0;
}
