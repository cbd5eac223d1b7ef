#include "corrsel/dispatch.hpp"

#include <charconv>
#include <cmath>
#include <cstdio>

namespace corrsel {

namespace {

double parse_double(const std::string& key, const std::string& value) {
  double out = 0.0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size() || !std::isfinite(out)) {
    throw Error(ErrorKind::InvalidInput, "bad numeric value for " + key);
  }
  return out;
}

int parse_int(const std::string& key, const std::string& value) {
  int out = 0;
  const auto [ptr, ec] = std::from_chars(value.data(), value.data() + value.size(), out);
  if (ec != std::errc{} || ptr != value.data() + value.size()) {
    throw Error(ErrorKind::InvalidInput, "bad integer value for " + key);
  }
  return out;
}

bool parse_bool(const std::string& key, const std::string& value) {
  if (value == "1" || value == "true") return true;
  if (value == "0" || value == "false") return false;
  throw Error(ErrorKind::InvalidInput, "bad boolean value for " + key);
}

ModelKind parse_model(const std::string& value) {
  if (value == "homography") return ModelKind::Homography;
  if (value == "fundamental") return ModelKind::Fundamental;
  throw Error(ErrorKind::InvalidInput, "unknown model kind " + value);
}

std::string print_double(double v) {
  char buf[40];
  std::snprintf(buf, sizeof buf, "%g", v);
  return buf;
}

const char* model_name(ModelKind kind) {
  return kind == ModelKind::Homography ? "homography" : "fundamental";
}

}  // namespace

const std::vector<std::string>& method_names() {
  static const std::vector<std::string> names = {"nnsr", "ransac", "st",  "gtm",
                                                 "usac", "vfc",    "gms", "lpm"};
  return names;
}

MethodSpec method_defaults(const std::string& name) {
  if (name == "nnsr") return {name, NnsrParams{}};
  if (name == "ransac") return {name, RansacParams{}};
  if (name == "st") return {name, StParams{}};
  if (name == "gtm") return {name, GtmParams{}};
  if (name == "usac") return {name, UsacParams{}};
  if (name == "vfc") return {name, VfcParams{}};
  if (name == "gms") return {name, GmsParams{}};
  if (name == "lpm") return {name, LpmParams{}};
  throw Error(ErrorKind::InvalidInput, "unknown method " + name);
}

std::vector<std::string> param_keys(const std::string& name) {
  if (name == "nnsr") return {"threshold_mode", "t_nnsr"};
  if (name == "ransac") return {"t_ransac", "n_ransac", "confidence", "model_kind"};
  if (name == "st") return {"t_st"};
  if (name == "gtm") return {"lambda_gtm", "n_gtm", "threshold_mode", "t_gtm"};
  if (name == "usac") {
    return {"n_usac",     "t_H",         "t_F",             "confidence", "model_kind",
            "sprt_eps0",  "sprt_delta0", "lo_inner_rounds"};
  }
  if (name == "vfc") {
    return {"beta", "lambda_vfc", "t_vfc", "gamma0", "max_em_iters", "tol", "max_basis"};
  }
  if (name == "gms") return {"alpha", "grid"};
  if (name == "lpm") return {"lambda_lpm", "k", "normalize_coords"};
  throw Error(ErrorKind::InvalidInput, "unknown method " + name);
}

void apply_param(MethodSpec& spec, const std::string& key, const std::string& value) {
  const auto unknown = [&]() -> Error {
    return Error(ErrorKind::InvalidInput, "method " + spec.name + " has no parameter " + key);
  };
  if (auto* p = std::get_if<NnsrParams>(&spec.params)) {
    if (key == "t_nnsr") {
      p->t_nnsr = parse_double(key, value);
    } else if (key == "threshold_mode") {
      if (value == "adaptive") {
        p->t_nnsr.reset();
      } else if (value != "fixed") {
        throw Error(ErrorKind::InvalidInput, "unknown threshold mode " + value);
      }
    } else {
      throw unknown();
    }
  } else if (auto* p = std::get_if<RansacParams>(&spec.params)) {
    if (key == "t_ransac") p->t_ransac = parse_double(key, value);
    else if (key == "n_ransac") p->n_ransac = parse_int(key, value);
    else if (key == "confidence") p->confidence = parse_double(key, value);
    else if (key == "model_kind") p->model_kind = parse_model(value);
    else throw unknown();
  } else if (auto* p = std::get_if<StParams>(&spec.params)) {
    if (key == "t_st") p->t_st = parse_double(key, value);
    else throw unknown();
  } else if (auto* p = std::get_if<GtmParams>(&spec.params)) {
    if (key == "lambda_gtm") p->lambda_gtm = parse_double(key, value);
    else if (key == "n_gtm") p->n_gtm = parse_int(key, value);
    else if (key == "t_gtm") p->t_gtm = parse_double(key, value);
    else if (key == "threshold_mode") {
      if (value == "adaptive") p->t_gtm.reset();
      else if (value != "fixed") throw Error(ErrorKind::InvalidInput, "unknown threshold mode " + value);
    } else {
      throw unknown();
    }
  } else if (auto* p = std::get_if<UsacParams>(&spec.params)) {
    if (key == "n_usac") p->n_usac = parse_int(key, value);
    else if (key == "t_H") p->t_h = parse_double(key, value);
    else if (key == "t_F") p->t_f = parse_double(key, value);
    else if (key == "confidence") p->confidence = parse_double(key, value);
    else if (key == "model_kind") p->model_kind = parse_model(value);
    else if (key == "sprt_eps0") p->sprt_eps0 = parse_double(key, value);
    else if (key == "sprt_delta0") p->sprt_delta0 = parse_double(key, value);
    else if (key == "lo_inner_rounds") p->lo_inner_rounds = parse_int(key, value);
    else throw unknown();
  } else if (auto* p = std::get_if<VfcParams>(&spec.params)) {
    if (key == "beta") p->beta = parse_double(key, value);
    else if (key == "lambda_vfc") p->lambda_vfc = parse_double(key, value);
    else if (key == "t_vfc") p->t_vfc = parse_double(key, value);
    else if (key == "gamma0") p->gamma0 = parse_double(key, value);
    else if (key == "max_em_iters") p->max_em_iters = parse_int(key, value);
    else if (key == "tol") p->tol = parse_double(key, value);
    else if (key == "max_basis") p->max_basis = parse_int(key, value);
    else throw unknown();
  } else if (auto* p = std::get_if<GmsParams>(&spec.params)) {
    if (key == "alpha") p->alpha = parse_double(key, value);
    else if (key == "grid") p->grid = parse_int(key, value);
    else throw unknown();
  } else if (auto* p = std::get_if<LpmParams>(&spec.params)) {
    if (key == "lambda_lpm") p->lambda_lpm = parse_double(key, value);
    else if (key == "k") p->k = parse_int(key, value);
    else if (key == "normalize_coords") p->normalize_coords = parse_bool(key, value);
    else throw unknown();
  }
}

std::vector<std::pair<std::string, std::string>> describe_params(const MethodSpec& spec) {
  std::vector<std::pair<std::string, std::string>> out;
  if (const auto* p = std::get_if<NnsrParams>(&spec.params)) {
    out.emplace_back("threshold_mode", p->t_nnsr ? "fixed" : "adaptive");
    if (p->t_nnsr) out.emplace_back("t_nnsr", print_double(*p->t_nnsr));
  } else if (const auto* p = std::get_if<RansacParams>(&spec.params)) {
    out.emplace_back("t_ransac", print_double(p->t_ransac));
    out.emplace_back("n_ransac", std::to_string(p->n_ransac));
    out.emplace_back("confidence", print_double(p->confidence));
    out.emplace_back("model_kind", model_name(p->model_kind));
  } else if (const auto* p = std::get_if<StParams>(&spec.params)) {
    out.emplace_back("t_st", print_double(p->t_st));
  } else if (const auto* p = std::get_if<GtmParams>(&spec.params)) {
    out.emplace_back("lambda_gtm", print_double(p->lambda_gtm));
    out.emplace_back("n_gtm", std::to_string(p->n_gtm));
    out.emplace_back("threshold_mode", p->t_gtm ? "fixed" : "adaptive");
    if (p->t_gtm) out.emplace_back("t_gtm", print_double(*p->t_gtm));
  } else if (const auto* p = std::get_if<UsacParams>(&spec.params)) {
    out.emplace_back("n_usac", std::to_string(p->n_usac));
    out.emplace_back("t_H", print_double(p->t_h));
    out.emplace_back("t_F", print_double(p->t_f));
    out.emplace_back("confidence", print_double(p->confidence));
    out.emplace_back("model_kind", model_name(p->model_kind));
    out.emplace_back("sprt_eps0", print_double(p->sprt_eps0));
    out.emplace_back("sprt_delta0", print_double(p->sprt_delta0));
    out.emplace_back("lo_inner_rounds", std::to_string(p->lo_inner_rounds));
  } else if (const auto* p = std::get_if<VfcParams>(&spec.params)) {
    out.emplace_back("beta", print_double(p->beta));
    out.emplace_back("lambda_vfc", print_double(p->lambda_vfc));
    out.emplace_back("t_vfc", print_double(p->t_vfc));
    out.emplace_back("gamma0", print_double(p->gamma0));
    out.emplace_back("max_em_iters", std::to_string(p->max_em_iters));
    out.emplace_back("tol", print_double(p->tol));
    out.emplace_back("max_basis", std::to_string(p->max_basis));
  } else if (const auto* p = std::get_if<GmsParams>(&spec.params)) {
    out.emplace_back("alpha", print_double(p->alpha));
    out.emplace_back("grid", std::to_string(p->grid));
  } else if (const auto* p = std::get_if<LpmParams>(&spec.params)) {
    out.emplace_back("lambda_lpm", print_double(p->lambda_lpm));
    out.emplace_back("k", std::to_string(p->k));
    out.emplace_back("normalize_coords", p->normalize_coords ? "true" : "false");
  }
  return out;
}

SelectionResult run_method(const MethodSpec& spec, const CorrespondenceSet& set,
                           std::uint64_t seed) {
  if (const auto* p = std::get_if<NnsrParams>(&spec.params)) return select_nnsr(set, *p);
  if (const auto* p = std::get_if<RansacParams>(&spec.params)) return select_ransac(set, *p, seed);
  if (const auto* p = std::get_if<StParams>(&spec.params)) return select_st(set, *p);
  if (const auto* p = std::get_if<GtmParams>(&spec.params)) return select_gtm(set, *p);
  if (const auto* p = std::get_if<UsacParams>(&spec.params)) return select_usac(set, *p, seed);
  if (const auto* p = std::get_if<VfcParams>(&spec.params)) return select_vfc(set, *p);
  if (const auto* p = std::get_if<GmsParams>(&spec.params)) return select_gms(set, *p);
  return select_lpm(set, std::get<LpmParams>(spec.params));
}

}  // namespace corrsel
