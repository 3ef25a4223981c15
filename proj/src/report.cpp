#include "idim/report.hpp"

#include <algorithm>
#include <cmath>
#include <cstdio>
#include <fstream>
#include <json.hpp>
#include <sstream>

#include "idim/error.hpp"
#include "idim/io.hpp"
#include "idim/version.hpp"

namespace idim::io {

namespace {

using nlohmann::json;

[[noreturn]] void schema_error(const std::string& path, const std::string& what) {
  throw Error(ErrorKind::SchemaError, path + ": " + what);
}

const json& require(const json& node, const char* key, const std::string& path) {
  const auto it = node.find(key);
  if (it == node.end()) schema_error(path + "." + key, "missing field");
  return *it;
}

double require_number(const json& node, const char* key, const std::string& path) {
  const json& value = require(node, key, path);
  if (!value.is_number()) schema_error(path + "." + key, "expected a number");
  return value.get<double>();
}

EstimatorSelector estimator_from_json(const json& node) {
  const std::string path = "estimator";
  const json& name = require(node, "name", path);
  if (!name.is_string()) schema_error(path + ".name", "expected a string");
  EstimatorSelector selector;
  selector.kind = estimator_kind_from_string(name.get<std::string>());
  const json& config = require(node, "config", path);
  if (!config.is_object()) schema_error(path + ".config", "expected an object");
  const std::string cfg_path = path + ".config";
  switch (selector.kind) {
    case EstimatorKind::FisherS: {
      selector.fishers.conditional_number = require_number(config, "conditional_number", cfg_path);
      const json& grid = require(config, "alpha_grid", cfg_path);
      if (!grid.is_array() || grid.empty()) schema_error(cfg_path + ".alpha_grid", "expected a non-empty array");
      selector.fishers.alpha_grid.clear();
      for (const auto& a : grid) {
        if (!a.is_number()) schema_error(cfg_path + ".alpha_grid", "expected numbers");
        selector.fishers.alpha_grid.push_back(a.get<double>());
      }
      selector.fishers.selection_factor = require_number(config, "selection_factor", cfg_path);
      selector.fishers.min_samples = static_cast<int>(require_number(config, "min_samples", cfg_path));
      selector.fishers.dedupe = require(config, "dedupe", cfg_path).get<bool>();
      selector.fishers.validate();
      break;
    }
    case EstimatorKind::Mle:
      selector.knn.k = static_cast<int>(require_number(config, "k", cfg_path));
      selector.knn.apply_correction = require(config, "apply_correction", cfg_path).get<bool>();
      selector.knn.validate();
      break;
    case EstimatorKind::Tle: {
      selector.knn.k = static_cast<int>(require_number(config, "k", cfg_path));
      selector.knn.tle_epsilon = require_number(config, "tle_epsilon", cfg_path);
      const std::string agg = require(config, "tle_aggregation", cfg_path).get<std::string>();
      if (agg == "harmonic") {
        selector.knn.tle_aggregation = TleAggregation::Harmonic;
      } else if (agg == "arithmetic") {
        selector.knn.tle_aggregation = TleAggregation::Arithmetic;
      } else {
        schema_error(cfg_path + ".tle_aggregation", "unknown aggregation '" + agg + "'");
      }
      selector.knn.validate();
      break;
    }
  }
  if (const auto it = node.find("fallback_to_mean"); it != node.end()) {
    selector.fallback_to_mean = it->get<bool>();
  }
  return selector;
}

void validate_report(const ReportJson& report) {
  if (report.classes.empty()) schema_error("classes", "report has no classes");
  double norm_sum = 0.0;
  for (const auto& record : report.classes) {
    if (record.count < 1) schema_error("classes[].count", "non-positive class count");
    norm_sum += record.id_norm;
  }
  if (std::abs(norm_sum - 1.0) > 1e-9) {
    schema_error("classes[].id_norm", "normalized IDs sum to " + std::to_string(norm_sum));
  }
  for (std::size_t i = 0; i < report.classes.size(); ++i) {
    if (report.classes[i].label != static_cast<int>(i)) {
      schema_error("classes[" + std::to_string(i) + "].label", "labels must be 0..K-1 in order");
    }
  }
}

}  // namespace

ClassIdProfile ReportJson::profile() const {
  ClassIdProfile out;
  out.estimator_tag = estimator.tag();
  for (const auto& record : classes) {
    out.raw.push_back(record.id_raw);
    out.normalized.push_back(record.id_norm);
    out.counts.push_back(record.count);
    out.degenerate.push_back(record.degenerate);
  }
  return out;
}

ReportJson ReportJson::from_profile(const ClassIdProfile& profile, const EstimatorSelector& selector,
                                    std::uint64_t seed, const std::vector<int>& labels) {
  if (labels.size() != profile.num_classes()) {
    throw Error(ErrorKind::ShapeMismatch, "label list does not match profile classes");
  }
  ReportJson report;
  report.tool_version = kVersion;
  report.estimator = selector;
  report.seed = seed;
  for (std::size_t c = 0; c < profile.num_classes(); ++c) {
    ClassRecord record;
    record.label = labels[c];
    record.count = profile.counts[c];
    record.id_raw = profile.raw[c];
    record.id_norm = profile.normalized[c];
    record.degenerate = c < profile.degenerate.size() && profile.degenerate[c];
    report.classes.push_back(record);
  }
  return report;
}

namespace {

// The wire format pins numbers at 17 significant digits, which %.17g
// delivers losslessly for doubles; nlohmann's shortest-round-trip printing
// would not honor that, so the writer emits the document by hand.
class JsonWriter {
 public:
  std::string take() && { return std::move(out_); }

  void number(double value) {
    if (!std::isfinite(value)) {
      throw Error(ErrorKind::SchemaError, "non-finite number cannot be serialized");
    }
    char buf[40];
    std::snprintf(buf, sizeof(buf), "%.17g", value);
    out_ += buf;
  }

  void integer(long long value) { out_ += std::to_string(value); }
  void unsigned_integer(unsigned long long value) { out_ += std::to_string(value); }
  void boolean(bool value) { out_ += value ? "true" : "false"; }

  void string(const std::string& value) {
    out_.push_back('"');
    for (char c : value) {
      switch (c) {
        case '"': out_ += "\\\""; break;
        case '\\': out_ += "\\\\"; break;
        case '\n': out_ += "\\n"; break;
        case '\t': out_ += "\\t"; break;
        case '\r': out_ += "\\r"; break;
        default:
          if (static_cast<unsigned char>(c) < 0x20) {
            char buf[8];
            std::snprintf(buf, sizeof(buf), "\\u%04x", c);
            out_ += buf;
          } else {
            out_.push_back(c);
          }
      }
    }
    out_.push_back('"');
  }

  void raw(const char* text) { out_ += text; }
  void newline_indent(int depth) {
    out_.push_back('\n');
    out_.append(static_cast<std::size_t>(depth) * 2, ' ');
  }
  void key(const std::string& name, int depth) {
    newline_indent(depth);
    string(name);
    out_ += ": ";
  }

  void double_array(const std::vector<double>& values) {
    out_.push_back('[');
    for (std::size_t i = 0; i < values.size(); ++i) {
      if (i > 0) out_ += ", ";
      number(values[i]);
    }
    out_.push_back(']');
  }

 private:
  std::string out_;
};

void emit_estimator(JsonWriter& w, const EstimatorSelector& selector, int depth) {
  w.raw("{");
  w.key("name", depth + 1);
  w.string(to_string(selector.kind));
  w.raw(",");
  w.key("config", depth + 1);
  w.raw("{");
  switch (selector.kind) {
    case EstimatorKind::FisherS:
      w.key("conditional_number", depth + 2);
      w.number(selector.fishers.conditional_number);
      w.raw(",");
      w.key("alpha_grid", depth + 2);
      w.double_array(selector.fishers.alpha_grid);
      w.raw(",");
      w.key("selection_factor", depth + 2);
      w.number(selector.fishers.selection_factor);
      w.raw(",");
      w.key("min_samples", depth + 2);
      w.integer(selector.fishers.min_samples);
      w.raw(",");
      w.key("dedupe", depth + 2);
      w.boolean(selector.fishers.dedupe);
      break;
    case EstimatorKind::Mle:
      w.key("k", depth + 2);
      w.integer(selector.knn.k);
      w.raw(",");
      w.key("apply_correction", depth + 2);
      w.boolean(selector.knn.apply_correction);
      break;
    case EstimatorKind::Tle:
      w.key("k", depth + 2);
      w.integer(selector.knn.k);
      w.raw(",");
      w.key("tle_epsilon", depth + 2);
      w.number(selector.knn.tle_epsilon);
      w.raw(",");
      w.key("tle_aggregation", depth + 2);
      w.string(selector.knn.tle_aggregation == TleAggregation::Harmonic ? "harmonic" : "arithmetic");
      break;
  }
  w.newline_indent(depth + 1);
  w.raw("},");
  w.key("fallback_to_mean", depth + 1);
  w.boolean(selector.fallback_to_mean);
  w.newline_indent(depth);
  w.raw("}");
}

}  // namespace

std::string report_to_json(const ReportJson& report) {
  validate_report(report);
  JsonWriter w;
  w.raw("{");
  w.key("schema_version", 1);
  w.integer(report.schema_version);
  w.raw(",");
  w.key("tool_version", 1);
  w.string(report.tool_version);
  w.raw(",");
  w.key("seed", 1);
  w.unsigned_integer(report.seed);
  w.raw(",");
  w.key("estimator", 1);
  emit_estimator(w, report.estimator, 1);
  w.raw(",");
  w.key("classes", 1);
  w.raw("[");
  for (std::size_t i = 0; i < report.classes.size(); ++i) {
    const auto& record = report.classes[i];
    if (i > 0) w.raw(",");
    w.newline_indent(2);
    w.raw("{\"label\": ");
    w.integer(record.label);
    w.raw(", \"count\": ");
    w.integer(record.count);
    w.raw(", \"id_raw\": ");
    w.number(record.id_raw);
    w.raw(", \"id_norm\": ");
    w.number(record.id_norm);
    w.raw(", \"degenerate\": ");
    w.boolean(record.degenerate);
    w.raw("}");
  }
  w.newline_indent(1);
  w.raw("],");
  w.key("artifacts", 1);
  w.raw("{");
  // stable order: sort artifacts by kind name
  std::vector<const MitigationReport*> ordered;
  for (const auto& artifact : report.artifacts) ordered.push_back(&artifact);
  std::sort(ordered.begin(), ordered.end(), [](const MitigationReport* a, const MitigationReport* b) {
    return std::string(to_string(a->kind)) < to_string(b->kind);
  });
  for (std::size_t i = 0; i < ordered.size(); ++i) {
    const auto& artifact = *ordered[i];
    if (i > 0) w.raw(",");
    w.key(to_string(artifact.kind), 2);
    w.raw("{");
    w.key("values", 3);
    w.double_array(artifact.values);
    w.raw(",");
    w.key("params", 3);
    w.raw("{");
    auto params = artifact.params;
    std::sort(params.begin(), params.end());
    for (std::size_t p = 0; p < params.size(); ++p) {
      if (p > 0) w.raw(",");
      w.key(params[p].first, 4);
      w.number(params[p].second);
    }
    if (!params.empty()) w.newline_indent(3);
    w.raw("},");
    w.key("provenance", 3);
    w.string(artifact.provenance);
    w.raw(",");
    w.key("timestamp", 3);
    w.string(artifact.timestamp);
    w.newline_indent(2);
    w.raw("}");
  }
  if (!ordered.empty()) w.newline_indent(1);
  w.raw("}");
  w.newline_indent(0);
  w.raw("}\n");
  return std::move(w).take();
}

ReportJson report_from_json(const std::string& text) {
  json doc;
  try {
    doc = json::parse(text);
  } catch (const json::parse_error& err) {
    throw Error(ErrorKind::SchemaError, std::string("invalid JSON: ") + err.what());
  }
  if (!doc.is_object()) schema_error("$", "expected a JSON object");

  ReportJson report;
  report.schema_version = static_cast<int>(require_number(doc, "schema_version", "$"));
  if (report.schema_version != 1) schema_error("schema_version", "unsupported version");
  report.tool_version = require(doc, "tool_version", "$").get<std::string>();
  const json& seed = require(doc, "seed", "$");
  if (!seed.is_number_unsigned() && !seed.is_number_integer()) schema_error("seed", "expected an integer");
  report.seed = seed.get<std::uint64_t>();
  report.estimator = estimator_from_json(require(doc, "estimator", "$"));

  const json& classes = require(doc, "classes", "$");
  if (!classes.is_array() || classes.empty()) schema_error("classes", "expected a non-empty array");
  for (std::size_t i = 0; i < classes.size(); ++i) {
    const std::string path = "classes[" + std::to_string(i) + "]";
    const json& node = classes[i];
    ClassRecord record;
    record.label = static_cast<int>(require_number(node, "label", path));
    record.count = static_cast<std::int64_t>(require_number(node, "count", path));
    record.id_raw = require_number(node, "id_raw", path);
    record.id_norm = require_number(node, "id_norm", path);
    record.degenerate = require(node, "degenerate", path).get<bool>();
    report.classes.push_back(record);
  }

  if (const auto it = doc.find("artifacts"); it != doc.end()) {
    if (!it->is_object()) schema_error("artifacts", "expected an object");
    for (const auto& [key, node] : it->items()) {
      const std::string path = "artifacts." + key;
      MitigationReport artifact;
      artifact.kind = mitigation_kind_from_string(key);
      const json& values = require(node, "values", path);
      if (!values.is_array()) schema_error(path + ".values", "expected an array");
      for (const auto& v : values) artifact.values.push_back(v.get<double>());
      const json& params = require(node, "params", path);
      if (!params.is_object()) schema_error(path + ".params", "expected an object");
      for (const auto& [pk, pv] : params.items()) {
        if (!pv.is_number()) schema_error(path + ".params." + pk, "expected a number");
        artifact.params.emplace_back(pk, pv.get<double>());
      }
      artifact.provenance = require(node, "provenance", path).get<std::string>();
      artifact.timestamp = require(node, "timestamp", path).get<std::string>();
      report.artifacts.push_back(std::move(artifact));
    }
  }

  validate_report(report);
  return report;
}

void write_report(const std::string& path, const ReportJson& report) {
  write_file_atomic(path, report_to_json(report));
}

ReportJson read_report(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) throw Error(ErrorKind::ParseError, "cannot open '" + path + "'");
  std::ostringstream buffer;
  buffer << in.rdbuf();
  return report_from_json(buffer.str());
}

}  // namespace idim::io
