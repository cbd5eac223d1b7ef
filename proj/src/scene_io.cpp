#include "corrsel/scene_io.hpp"

#include <charconv>
#include <cmath>
#include <fstream>
#include <iterator>
#include <utility>

#include <json.hpp>

namespace corrsel {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& msg) { throw Error(ErrorKind::InvalidInput, msg); }

double checked(double v, const char* what) {
  if (!std::isfinite(v)) bad(std::string(what) + " must be finite");
  return v;
}

// Shortest decimal form that parses back to the identical double.
std::string num(double v) { return json(v).dump(); }

std::string quoted(const std::string& s) { return json(s).dump(); }

double finite_number(const json& j, const std::string& what) {
  if (!j.is_number()) bad(what + " must be a number");
  const double v = j.get<double>();
  if (!std::isfinite(v)) bad(what + " must be finite");
  return v;
}

std::array<double, 2> number_pair(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 2) bad(what + " must be an array of two numbers");
  return {finite_number(j[0], what), finite_number(j[1], what)};
}

ImageSize read_size(const json& j, const std::string& what) {
  const auto wh = number_pair(j, what);
  if (!(wh[0] > 0.0 && wh[1] > 0.0)) bad(what + " must be positive");
  return {wh[0], wh[1]};
}

std::array<double, 9> number_nine(const json& j, const std::string& what) {
  if (!j.is_array() || j.size() != 9) bad(what + " must be an array of nine numbers");
  std::array<double, 9> out{};
  for (std::size_t i = 0; i < 9; ++i) out[i] = finite_number(j[i], what);
  return out;
}

Correspondence read_correspondence(const json& j) {
  if (!j.is_object()) bad("each correspondence must be an object");
  Correspondence c;
  bool saw_x = false;
  bool saw_xp = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "x") {
      const auto p = number_pair(value, "x");
      c.p = {p[0], p[1]};
      saw_x = true;
    } else if (key == "xp") {
      const auto p = number_pair(value, "xp");
      c.q = {p[0], p[1]};
      saw_xp = true;
    } else if (key == "quality") {
      const double q = finite_number(value, "quality");
      if (q < 0.0 || q > 1.0) bad("quality must lie in [0, 1]");
      c.quality = q;
    } else if (key == "affine") {
      if (!value.is_array() || value.size() != 4) bad("affine must be an array of four numbers");
      LocalAffine a;
      a.a11 = finite_number(value[0], "affine");
      a.a12 = finite_number(value[1], "affine");
      a.a21 = finite_number(value[2], "affine");
      a.a22 = finite_number(value[3], "affine");
      c.affine = a;
    } else if (key == "label") {
      if (!value.is_number_integer()) bad("label must be 0 or 1");
      const auto raw = value.get<long long>();
      if (raw != 0 && raw != 1) bad("label must be 0 or 1");
      c.gt_label = raw == 1;
    } else {
      bad("unknown correspondence field " + key);
    }
  }
  if (!saw_x || !saw_xp) bad("correspondence needs both x and xp");
  return c;
}

void emit_correspondence(std::string& out, const Correspondence& c) {
  out += "{\"x\":[";
  out += num(checked(c.p.x, "x"));
  out += ',';
  out += num(checked(c.p.y, "x"));
  out += "],\"xp\":[";
  out += num(checked(c.q.x, "xp"));
  out += ',';
  out += num(checked(c.q.y, "xp"));
  out += ']';
  if (c.quality) {
    const double q = checked(*c.quality, "quality");
    if (q < 0.0 || q > 1.0) bad("quality must lie in [0, 1]");
    out += ",\"quality\":";
    out += num(q);
  }
  if (c.affine) {
    out += ",\"affine\":[";
    out += num(checked(c.affine->a11, "affine"));
    out += ',';
    out += num(checked(c.affine->a12, "affine"));
    out += ',';
    out += num(checked(c.affine->a21, "affine"));
    out += ',';
    out += num(checked(c.affine->a22, "affine"));
    out += ']';
  }
  if (c.gt_label) {
    out += ",\"label\":";
    out += *c.gt_label ? '1' : '0';
  }
  out += '}';
}

// Ordered (key, JSON literal) pairs for the effective parameter set.
std::vector<std::pair<std::string, std::string>> param_literals(const MethodParams& params) {
  std::vector<std::pair<std::string, std::string>> kv;
  const auto d = [](double v) { return num(v); };
  const auto i = [](long long v) { return std::to_string(v); };
  if (const auto* p = std::get_if<NnsrParams>(&params)) {
    kv.emplace_back("threshold_mode", p->t_nnsr ? "\"fixed\"" : "\"adaptive\"");
    if (p->t_nnsr) kv.emplace_back("t_nnsr", d(*p->t_nnsr));
  } else if (const auto* p = std::get_if<RansacParams>(&params)) {
    kv.emplace_back("t_ransac", d(p->t_ransac));
    kv.emplace_back("n_ransac", i(p->n_ransac));
    kv.emplace_back("confidence", d(p->confidence));
    kv.emplace_back("model_kind",
                    p->model_kind == ModelKind::Homography ? "\"homography\"" : "\"fundamental\"");
  } else if (const auto* p = std::get_if<StParams>(&params)) {
    kv.emplace_back("t_st", d(p->t_st));
  } else if (const auto* p = std::get_if<GtmParams>(&params)) {
    kv.emplace_back("lambda_gtm", d(p->lambda_gtm));
    kv.emplace_back("n_gtm", i(p->n_gtm));
    kv.emplace_back("threshold_mode", p->t_gtm ? "\"fixed\"" : "\"adaptive\"");
    if (p->t_gtm) kv.emplace_back("t_gtm", d(*p->t_gtm));
  } else if (const auto* p = std::get_if<UsacParams>(&params)) {
    kv.emplace_back("n_usac", i(p->n_usac));
    kv.emplace_back("t_H", d(p->t_h));
    kv.emplace_back("t_F", d(p->t_f));
    kv.emplace_back("confidence", d(p->confidence));
    kv.emplace_back("model_kind",
                    p->model_kind == ModelKind::Homography ? "\"homography\"" : "\"fundamental\"");
    kv.emplace_back("sprt_eps0", d(p->sprt_eps0));
    kv.emplace_back("sprt_delta0", d(p->sprt_delta0));
    kv.emplace_back("lo_inner_rounds", i(p->lo_inner_rounds));
  } else if (const auto* p = std::get_if<VfcParams>(&params)) {
    kv.emplace_back("beta", d(p->beta));
    kv.emplace_back("lambda_vfc", d(p->lambda_vfc));
    kv.emplace_back("t_vfc", d(p->t_vfc));
    kv.emplace_back("gamma0", d(p->gamma0));
    kv.emplace_back("max_em_iters", i(p->max_em_iters));
    kv.emplace_back("tol", d(p->tol));
    kv.emplace_back("max_basis", i(p->max_basis));
  } else if (const auto* p = std::get_if<GmsParams>(&params)) {
    kv.emplace_back("alpha", d(p->alpha));
    kv.emplace_back("grid", i(p->grid));
  } else if (const auto* p = std::get_if<LpmParams>(&params)) {
    kv.emplace_back("lambda_lpm", d(p->lambda_lpm));
    kv.emplace_back("k", i(p->k));
    kv.emplace_back("normalize_coords", p->normalize_coords ? "true" : "false");
  }
  return kv;
}

std::string join_flags(const std::vector<std::string>& flags) {
  std::string out;
  for (std::size_t i = 0; i < flags.size(); ++i) {
    if (i) out += ';';
    out += flags[i];
  }
  return out;
}

std::string csv_num(double v) {
  char buf[64];
  const auto res = std::to_chars(buf, buf + sizeof buf, v);
  return std::string(buf, res.ptr);
}

}  // namespace

std::string scene_to_json(const Scene& scene) {
  std::string out;
  out += "{\n";
  out += "  \"name\": " + quoted(scene.set.name) + ",\n";
  out += "  \"image1_size\": [" + num(checked(scene.set.image1.width, "image1_size")) + ", " +
         num(checked(scene.set.image1.height, "image1_size")) + "],\n";
  out += "  \"image2_size\": [" + num(checked(scene.set.image2.width, "image2_size")) + ", " +
         num(checked(scene.set.image2.height, "image2_size")) + "],\n";
  if (!(scene.set.image1.width > 0 && scene.set.image1.height > 0 &&
        scene.set.image2.width > 0 && scene.set.image2.height > 0)) {
    bad("image sizes must be positive");
  }
  if (scene.set.items.empty()) {
    out += "  \"correspondences\": [],\n";
  } else {
    out += "  \"correspondences\": [\n";
    for (std::size_t i = 0; i < scene.set.items.size(); ++i) {
      out += "    ";
      emit_correspondence(out, scene.set.items[i]);
      out += i + 1 < scene.set.items.size() ? ",\n" : "\n";
    }
    out += "  ],\n";
  }
  out += "  \"ground_truth\": ";
  if (scene.gt.kind == GroundTruth::Kind::Homography) {
    if (!scene.gt.h) {
      throw Error(ErrorKind::MissingGroundTruth, "homography truth without a homography");
    }
    out += "{\"type\": \"homography\", \"H\": [";
    for (std::size_t i = 0; i < 9; ++i) {
      if (i) out += ", ";
      out += num(checked(scene.gt.h->m[i], "H"));
    }
    out += "]}";
  } else {
    for (const Correspondence& c : scene.set.items) {
      if (!c.gt_label) {
        throw Error(ErrorKind::MissingGroundTruth,
                    "labels truth needs a label on every correspondence");
      }
    }
    out += "{\"type\": \"labels\"}";
  }
  out += "\n}\n";
  return out;
}

Scene scene_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    bad(std::string("scene parse: ") + e.what());
  }
  if (!j.is_object()) bad("scene file must be a JSON object");

  Scene scene;
  bool saw_name = false, saw_i1 = false, saw_i2 = false, saw_corr = false, saw_gt = false;
  for (const auto& [key, value] : j.items()) {
    if (key == "name") {
      if (!value.is_string()) bad("name must be a string");
      scene.set.name = value.get<std::string>();
      saw_name = true;
    } else if (key == "image1_size") {
      scene.set.image1 = read_size(value, "image1_size");
      saw_i1 = true;
    } else if (key == "image2_size") {
      scene.set.image2 = read_size(value, "image2_size");
      saw_i2 = true;
    } else if (key == "correspondences") {
      if (!value.is_array()) bad("correspondences must be an array");
      scene.set.items.reserve(value.size());
      for (const auto& item : value) scene.set.items.push_back(read_correspondence(item));
      saw_corr = true;
    } else if (key == "ground_truth") {
      if (!value.is_object()) bad("ground_truth must be an object");
      std::string type;
      std::optional<std::array<double, 9>> h;
      for (const auto& [gk, gv] : value.items()) {
        if (gk == "type") {
          if (!gv.is_string()) bad("ground_truth type must be a string");
          type = gv.get<std::string>();
        } else if (gk == "H") {
          h = number_nine(gv, "H");
        } else {
          bad("unknown ground_truth field " + gk);
        }
      }
      if (type == "homography") {
        if (!h) bad("homography ground truth needs H");
        scene.gt.kind = GroundTruth::Kind::Homography;
        scene.gt.h = Homography::from(*h);
      } else if (type == "labels") {
        if (h) bad("labels ground truth carries no H");
        scene.gt.kind = GroundTruth::Kind::Labels;
      } else {
        bad("unknown ground truth type \"" + type + "\"");
      }
      saw_gt = true;
    } else {
      bad("unknown scene field " + key);
    }
  }
  if (!saw_name || !saw_i1 || !saw_i2 || !saw_corr || !saw_gt) {
    bad("scene file is missing a required field");
  }
  if (scene.gt.kind == GroundTruth::Kind::Labels) {
    scene.gt.labels.reserve(scene.set.items.size());
    for (const Correspondence& c : scene.set.items) {
      if (!c.gt_label) {
        throw Error(ErrorKind::MissingGroundTruth,
                    "labels truth needs a label on every correspondence");
      }
      scene.gt.labels.push_back(*c.gt_label);
    }
  }
  return scene;
}

std::string result_to_json(const MethodSpec& spec, std::uint64_t seed,
                           const SelectionResult& result) {
  std::string out;
  out += "{\n";
  out += "  \"method\": " + quoted(spec.name) + ",\n";
  out += "  \"seed\": " + std::to_string(seed) + ",\n";
  out += "  \"params\": {";
  const auto kv = param_literals(spec.params);
  for (std::size_t i = 0; i < kv.size(); ++i) {
    if (i) out += ", ";
    out += '"' + kv[i].first + "\": " + kv[i].second;
  }
  out += "},\n";
  out += "  \"selected\": [";
  for (std::size_t i = 0; i < result.selected.size(); ++i) {
    if (i) out += ',';
    out += std::to_string(result.selected[i]);
  }
  out += "],\n";
  if (result.confidence) {
    out += "  \"confidence\": [";
    for (std::size_t i = 0; i < result.confidence->size(); ++i) {
      if (i) out += ',';
      out += num(checked((*result.confidence)[i], "confidence"));
    }
    out += "],\n";
  }
  if (result.model) {
    const bool homography = std::holds_alternative<Homography>(*result.model);
    const auto& m = homography ? std::get<Homography>(*result.model).m
                               : std::get<Fundamental>(*result.model).m;
    out += "  \"model\": {\"type\": ";
    out += homography ? "\"homography\"" : "\"fundamental\"";
    out += ", \"m\": [";
    for (std::size_t i = 0; i < 9; ++i) {
      if (i) out += ", ";
      out += num(checked(m[i], "model"));
    }
    out += "]},\n";
  }
  out += "  \"iterations_used\": " + std::to_string(result.iterations_used) + ",\n";
  out += "  \"runtime_ns\": " + std::to_string(result.runtime.count()) + ",\n";
  out += "  \"flags\": [";
  for (std::size_t i = 0; i < result.flags.size(); ++i) {
    if (i) out += ", ";
    out += quoted(result.flags[i]);
  }
  out += "]\n}\n";
  return out;
}

StoredResult result_from_json(const std::string& text) {
  json j;
  try {
    j = json::parse(text);
  } catch (const json::exception& e) {
    bad(std::string("result parse: ") + e.what());
  }
  if (!j.is_object()) bad("result file must be a JSON object");

  const json* method = nullptr;
  const json* seed = nullptr;
  const json* params = nullptr;
  const json* selected = nullptr;
  const json* confidence = nullptr;
  const json* model = nullptr;
  const json* iterations = nullptr;
  const json* runtime = nullptr;
  const json* flags = nullptr;
  for (const auto& [key, value] : j.items()) {
    if (key == "method") method = &value;
    else if (key == "seed") seed = &value;
    else if (key == "params") params = &value;
    else if (key == "selected") selected = &value;
    else if (key == "confidence") confidence = &value;
    else if (key == "model") model = &value;
    else if (key == "iterations_used") iterations = &value;
    else if (key == "runtime_ns") runtime = &value;
    else if (key == "flags") flags = &value;
    else bad("unknown result field " + key);
  }
  if (!method || !seed || !params || !selected || !iterations || !runtime || !flags) {
    bad("result file is missing a required field");
  }

  StoredResult out;
  if (!method->is_string()) bad("method must be a string");
  out.spec = method_defaults(method->get<std::string>());

  if (!seed->is_number_unsigned()) bad("seed must be a nonnegative integer");
  out.seed = seed->get<std::uint64_t>();

  if (!params->is_object()) bad("params must be an object");
  for (const auto& [key, value] : params->items()) {
    const std::string literal = value.is_string() ? value.get<std::string>() : value.dump();
    apply_param(out.spec, key, literal);
  }

  if (!selected->is_array()) bad("selected must be an array");
  out.result.selected.reserve(selected->size());
  for (const auto& v : *selected) {
    if (!v.is_number_unsigned()) bad("selected indices must be nonnegative integers");
    const auto idx = v.get<std::uint64_t>();
    if (!out.result.selected.empty() && idx <= out.result.selected.back()) {
      bad("selected indices must be strictly increasing");
    }
    out.result.selected.push_back(static_cast<std::size_t>(idx));
  }

  if (confidence) {
    if (!confidence->is_array()) bad("confidence must be an array");
    std::vector<double> conf;
    conf.reserve(confidence->size());
    for (const auto& v : *confidence) conf.push_back(finite_number(v, "confidence"));
    out.result.confidence = std::move(conf);
  }

  if (model) {
    if (!model->is_object()) bad("model must be an object");
    std::string type;
    std::optional<std::array<double, 9>> m;
    for (const auto& [mk, mv] : model->items()) {
      if (mk == "type") {
        if (!mv.is_string()) bad("model type must be a string");
        type = mv.get<std::string>();
      } else if (mk == "m") {
        m = number_nine(mv, "model m");
      } else {
        bad("unknown model field " + mk);
      }
    }
    if (!m) bad("model needs m");
    if (type == "homography") out.result.model = Homography::from(*m);
    else if (type == "fundamental") out.result.model = Fundamental::from(*m);
    else bad("unknown model type \"" + type + "\"");
  }

  if (!iterations->is_number_integer()) bad("iterations_used must be an integer");
  out.result.iterations_used = iterations->get<int>();

  if (!runtime->is_number_unsigned()) bad("runtime_ns must be a nonnegative integer");
  out.result.runtime = std::chrono::nanoseconds(runtime->get<std::int64_t>());

  if (!flags->is_array()) bad("flags must be an array");
  for (const auto& f : *flags) {
    if (!f.is_string()) bad("flags must be strings");
    out.result.flags.push_back(f.get<std::string>());
  }
  return out;
}

std::string eval_csv(const std::vector<EvaluationReport>& reports) {
  std::string out =
      "method,tau,precision,recall,f_measure,n_selected,n_correct,n_gt,runtime_ms,flags\n";
  for (const EvaluationReport& report : reports) {
    const std::string flags = join_flags(report.flags);
    const std::string ms =
        csv_num(std::chrono::duration<double, std::milli>(report.runtime).count());
    for (const EvalRow& row : report.rows) {
      out += report.method;
      out += ',';
      out += csv_num(row.tau);
      out += ',';
      out += csv_num(row.precision);
      out += ',';
      out += csv_num(row.recall);
      out += ',';
      out += csv_num(row.f_measure);
      out += ',';
      out += std::to_string(row.n_selected);
      out += ',';
      out += std::to_string(row.n_correct);
      out += ',';
      out += std::to_string(row.n_gt);
      out += ',';
      out += ms;
      out += ',';
      out += flags;
      out += '\n';
    }
  }
  return out;
}

std::string bench_csv(const std::vector<BenchRow>& rows) {
  std::string out = "method,n,mean_ms,stddev_ms,failures\n";
  for (const BenchRow& row : rows) {
    out += row.method;
    out += ',';
    out += std::to_string(row.n);
    out += ',';
    if (row.completed > 0) out += csv_num(row.mean_ms);
    out += ',';
    if (row.completed > 0) out += csv_num(row.stddev_ms);
    out += ',';
    out += std::to_string(row.failures);
    out += '\n';
  }
  return out;
}

std::string read_text_file(const std::string& path) {
  std::ifstream in(path, std::ios::binary);
  if (!in) bad("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  if (in.bad()) bad("cannot read " + path);
  return text;
}

void write_text_file(const std::string& path, const std::string& text) {
  std::ofstream outfile(path, std::ios::binary);
  if (!outfile) bad("cannot open " + path + " for writing");
  outfile.write(text.data(), static_cast<std::streamsize>(text.size()));
  outfile.flush();
  if (!outfile) bad("cannot write " + path);
}

}  // namespace corrsel
