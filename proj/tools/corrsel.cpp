#include <cstdint>
#include <cstdio>
#include <optional>
#include <string>
#include <vector>

#include <CLI11.hpp>

#include "corrsel/dispatch.hpp"
#include "corrsel/metrics.hpp"
#include "corrsel/scene_io.hpp"
#include "corrsel/synthgen.hpp"

namespace {

using namespace corrsel;

void report(const Error& e) { std::fprintf(stderr, "error: %s\n", e.what()); }

std::vector<std::string> split(const std::string& s, char sep) {
  std::vector<std::string> out;
  std::size_t start = 0;
  while (true) {
    const std::size_t pos = s.find(sep, start);
    if (pos == std::string::npos) {
      out.push_back(s.substr(start));
      return out;
    }
    out.push_back(s.substr(start, pos - start));
    start = pos + 1;
  }
}

double parse_real(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const double v = std::stod(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidInput, "bad " + what + " \"" + s + "\"");
  }
}

int parse_count(const std::string& s, const std::string& what) {
  try {
    std::size_t used = 0;
    const int v = std::stoi(s, &used);
    if (used != s.size()) throw std::invalid_argument(s);
    return v;
  } catch (const std::exception&) {
    throw Error(ErrorKind::InvalidInput, "bad " + what + " \"" + s + "\"");
  }
}

ImageSize parse_image_size(const std::string& s) {
  const std::size_t pos = s.find('x');
  if (pos == std::string::npos || pos == 0 || pos + 1 == s.size()) {
    throw Error(ErrorKind::InvalidInput, "image size must look like 800x600");
  }
  ImageSize size{parse_real(s.substr(0, pos), "image width"),
                 parse_real(s.substr(pos + 1), "image height")};
  if (!(size.width > 0.0 && size.height > 0.0)) {
    throw Error(ErrorKind::InvalidInput, "image size must be positive");
  }
  return size;
}

QualityModel parse_quality_model(const std::string& s) {
  if (s == "correlated") return QualityModel::Correlated;
  if (s == "uncorrelated") return QualityModel::Uncorrelated;
  throw Error(ErrorKind::InvalidInput, "unknown quality model \"" + s + "\"");
}

// translation:dx,dy | rotation:deg | zoom:s | homography | multi:K
TransformSpec parse_transform(const std::string& s, const ImageSize& image1,
                              const ImageSize& image2, std::uint64_t seed) {
  if (s == "homography") return RandomPerspective{};
  const std::size_t colon = s.find(':');
  const std::string head = s.substr(0, colon);
  const std::string tail = colon == std::string::npos ? "" : s.substr(colon + 1);
  if (head == "translation") {
    const auto parts = split(tail, ',');
    if (parts.size() != 2) {
      throw Error(ErrorKind::InvalidInput, "translation needs dx,dy");
    }
    return Translation{parse_real(parts[0], "dx"), parse_real(parts[1], "dy")};
  }
  if (head == "rotation") {
    return Rotation{parse_real(tail, "rotation angle")};
  }
  if (head == "zoom") {
    return Zoom{parse_real(tail, "zoom factor")};
  }
  if (head == "multi") {
    const int k = parse_count(tail, "structure count");
    if (k < 2) throw Error(ErrorKind::InvalidInput, "multi needs at least 2 structures");
    Rng rng(Rng::derive(seed, 77));
    MultiStructure multi;
    multi.structures.reserve(static_cast<std::size_t>(k));
    for (int i = 0; i < k; ++i) {
      multi.structures.push_back({random_perspective(rng, image1, image2), 1.0 / k});
    }
    return multi;
  }
  throw Error(ErrorKind::InvalidInput, "unknown transform \"" + s + "\"");
}

struct SceneFlags {
  int n = 1000;
  double inlier_ratio = 0.5;
  double noise = 1.0;
  std::string transform = "translation:0,0";
  std::string image_size = "800x600";
  std::string image2_size;
  std::string quality_model = "correlated";
  bool affine_frames = false;
  std::uint64_t seed = 0;
};

void add_scene_flags(CLI::App* cmd, SceneFlags& f, bool for_gen) {
  if (for_gen) cmd->add_option("--n", f.n, "number of correspondences");
  cmd->add_option("--inlier-ratio", f.inlier_ratio, "fraction of true matches, in (0,1]");
  cmd->add_option("--noise", f.noise, "image-2 position noise sigma, pixels");
  cmd->add_option("--transform", f.transform,
                  "translation:dx,dy | rotation:deg | zoom:s | homography | multi:K");
  cmd->add_option("--image-size", f.image_size, "both image frames, WxH pixels");
  cmd->add_option("--image2-size", f.image2_size, "second frame override, WxH pixels");
  cmd->add_option("--quality-model", f.quality_model, "correlated | uncorrelated");
  cmd->add_flag("--affine-frames", f.affine_frames, "attach local affine frames");
  if (for_gen) cmd->add_option("--seed", f.seed, "generator seed");
}

SceneSpec build_scene_spec(const SceneFlags& f) {
  SceneSpec spec;
  spec.n = f.n;
  spec.inlier_ratio = f.inlier_ratio;
  spec.noise_sigma = f.noise;
  spec.image1 = parse_image_size(f.image_size);
  spec.image2 = f.image2_size.empty() ? spec.image1 : parse_image_size(f.image2_size);
  spec.quality_model = parse_quality_model(f.quality_model);
  spec.affine_frames = f.affine_frames;
  spec.seed = f.seed;
  spec.transform = parse_transform(f.transform, spec.image1, spec.image2, f.seed);
  return spec;
}

MethodSpec build_method_spec(const std::string& method, const std::vector<std::string>& params) {
  MethodSpec spec = method_defaults(method);
  for (const std::string& kv : params) {
    const std::size_t eq = kv.find('=');
    if (eq == std::string::npos || eq == 0) {
      throw Error(ErrorKind::InvalidInput, "--param needs key=value, got \"" + kv + "\"");
    }
    apply_param(spec, kv.substr(0, eq), kv.substr(eq + 1));
  }
  return spec;
}

void emit(const std::string& text, const std::string& out_path) {
  if (out_path.empty()) {
    std::fputs(text.c_str(), stdout);
  } else {
    write_text_file(out_path, text);
  }
}

int run_gen(const SceneFlags& flags, const std::string& out_path) {
  SceneSpec spec;
  try {
    spec = build_scene_spec(flags);
  } catch (const Error& e) {
    report(e);
    return 2;
  }
  try {
    const Scene scene = generate_scene(spec);
    write_text_file(out_path, scene_to_json(scene));
  } catch (const Error& e) {
    report(e);
    return e.kind() == ErrorKind::InvalidInput ? 2 : 3;
  }
  return 0;
}

int run_select(const std::string& method, const std::vector<std::string>& params,
               const std::string& scene_path, const std::string& out_path, std::uint64_t seed) {
  MethodSpec spec;
  try {
    spec = build_method_spec(method, params);
  } catch (const Error& e) {
    report(e);
    return 2;
  }
  try {
    const Scene scene = scene_from_json(read_text_file(scene_path));
    const SelectionResult result = run_method(spec, scene.set, seed);
    write_text_file(out_path, result_to_json(spec, seed, result));
    std::printf("%s: selected %zu of %zu in %.3f ms\n", spec.name.c_str(),
                result.selected.size(), scene.set.size(),
                static_cast<double>(result.runtime.count()) / 1e6);
  } catch (const Error& e) {
    report(e);
    return 4;
  }
  return 0;
}

int run_eval(const std::string& scene_path, const std::string& result_path,
             const std::string& out_path, double t_gt, const std::string& tau_list) {
  EvalOptions opts;
  try {
    opts.t_gt = t_gt;
    opts.taus.clear();
    for (const std::string& part : split(tau_list, ',')) {
      opts.taus.push_back(parse_real(part, "tau"));
    }
  } catch (const Error& e) {
    report(e);
    return 2;
  }
  try {
    const Scene scene = scene_from_json(read_text_file(scene_path));
    const StoredResult stored = result_from_json(read_text_file(result_path));
    const EvaluationReport rep =
        evaluate(scene.set, stored.result, scene.gt, opts, stored.spec.name);
    emit(eval_csv({rep}), out_path);
  } catch (const Error& e) {
    report(e);
    return 5;
  }
  return 0;
}

int run_bench(const std::string& method_list, const std::string& size_list, int repeats,
              std::uint64_t bench_seed, const SceneFlags& scene_flags,
              const std::string& out_path) {
  std::vector<MethodSpec> methods;
  BenchOptions opts;
  try {
    for (const std::string& name : split(method_list, ',')) {
      methods.push_back(method_defaults(name));
    }
    for (const std::string& part : split(size_list, ',')) {
      opts.sizes.push_back(parse_count(part, "size"));
    }
    opts.repeats = repeats;
    opts.seed = bench_seed;
    opts.scene_template = build_scene_spec(scene_flags);
  } catch (const Error& e) {
    report(e);
    return 2;
  }
  try {
    emit(bench_csv(bench(methods, opts)), out_path);
  } catch (const Error& e) {
    report(e);
    if (e.kind() == ErrorKind::InvalidInput) return 2;
    return e.kind() == ErrorKind::GenerationFailure ? 3 : 4;
  }
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"feature-correspondence selection toolkit"};
  app.require_subcommand(1);

  SceneFlags gen_flags;
  std::string gen_out;
  CLI::App* gen = app.add_subcommand("gen", "synthesize a scene with known ground truth");
  add_scene_flags(gen, gen_flags, true);
  gen->add_option("--out", gen_out, "scene file to write")->required();

  std::string sel_method, sel_scene, sel_out;
  std::vector<std::string> sel_params;
  std::uint64_t sel_seed = 0;
  CLI::App* select = app.add_subcommand("select", "run one selection method on a scene");
  select->add_option("--method", sel_method, "nnsr|ransac|st|gtm|usac|vfc|gms|lpm")->required();
  select->add_option("--scene", sel_scene, "scene file")->required();
  select->add_option("--out", sel_out, "result file to write")->required();
  select->add_option("--param", sel_params, "override, key=value, repeatable");
  select->add_option("--seed", sel_seed, "selection seed (sampling methods)");

  std::string eval_scene, eval_result, eval_out;
  double eval_t_gt = 10.0;
  std::string eval_taus = "1,2,3,4,5,6,7,8,9,10";
  CLI::App* eval = app.add_subcommand("eval", "score a result against scene ground truth");
  eval->add_option("--scene", eval_scene, "scene file")->required();
  eval->add_option("--result", eval_result, "result file")->required();
  eval->add_option("--out", eval_out, "CSV file (default stdout)");
  eval->add_option("--t-gt", eval_t_gt, "ground-truth residual gate, pixels");
  eval->add_option("--taus", eval_taus, "comma list of correctness thresholds");

  std::string bench_methods, bench_sizes, bench_out;
  int bench_repeats = 10;
  std::uint64_t bench_seed = 1;
  SceneFlags bench_flags;
  CLI::App* bench_cmd = app.add_subcommand("bench", "time methods across scene sizes");
  bench_cmd->add_option("--methods", bench_methods, "comma list of methods")->required();
  bench_cmd->add_option("--sizes", bench_sizes, "comma list of scene sizes")->required();
  bench_cmd->add_option("--repeats", bench_repeats, "scenes per cell");
  bench_cmd->add_option("--seed", bench_seed, "seed for the timing grid");
  add_scene_flags(bench_cmd, bench_flags, false);
  bench_cmd->add_option("--out", bench_out, "CSV file (default stdout)");

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 2;
  }

  if (gen->parsed()) return run_gen(gen_flags, gen_out);
  if (select->parsed()) return run_select(sel_method, sel_params, sel_scene, sel_out, sel_seed);
  if (eval->parsed()) return run_eval(eval_scene, eval_result, eval_out, eval_t_gt, eval_taus);
  return run_bench(bench_methods, bench_sizes, bench_repeats, bench_seed, bench_flags, bench_out);
}
