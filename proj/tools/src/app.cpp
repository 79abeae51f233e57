#include "kldproj_cli/app.hpp"

#include <cstdlib>
#include <fstream>
#include <iostream>
#include <map>
#include <sstream>

#include "CLI11.hpp"
#include "io.hpp"
#include "kldproj/error.hpp"
#include "kldproj/synth.hpp"

namespace kldproj::cli {

namespace fs = std::filesystem;

namespace {

constexpr const char* kVersion = "0.1.0";

struct AscentFlags {
  double learning_rate = AscentOptions{}.learning_rate;
  int max_iters = AscentOptions{}.max_iters;
  int patience = AscentOptions{}.patience;
  double rel_tol = AscentOptions{}.rel_tol;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--lr", learning_rate, "Adam learning rate")->capture_default_str();
    cmd.add_option("--max-iters", max_iters, "ascent iteration budget")->capture_default_str();
    cmd.add_option("--patience", patience, "plateau window in iterations")->capture_default_str();
    cmd.add_option("--rel-tol", rel_tol, "relative plateau tolerance")->capture_default_str();
  }
  AscentOptions options() const {
    AscentOptions o;
    o.learning_rate = learning_rate;
    o.max_iters = max_iters;
    o.patience = patience;
    o.rel_tol = rel_tol;
    return o;
  }
  json to_json() const {
    return {{"lr", learning_rate}, {"max_iters", max_iters}, {"patience", patience},
            {"rel_tol", rel_tol}};
  }
};

// Class inputs shared by fit, eval and regime: parameter files or a labeled
// dataset whose per-class estimates stand in for the parameters.
struct ClassInputs {
  std::vector<std::string> params;
  std::string data;
  double ridge = 1e-8;

  void add_to(CLI::App& cmd) {
    cmd.add_option("--params", params, "class parameter JSON (repeat once per class)");
    cmd.add_option("--data", data, "labeled CSV (x1..xd,label); classes are estimated");
    cmd.add_option("--ridge", ridge, "covariance ridge for estimates, times tr(S)/d")
        ->capture_default_str();
  }
  json to_json() const { return {{"params", params}, {"data", data}, {"ridge", ridge}}; }
};

struct Loaded {
  std::vector<GaussianParams> classes;
  std::vector<int> labels;          // class ids, data input only
  std::optional<LabeledDataset> data;
  Matrix pooled;                    // LoL pooled covariance
};

Loaded load_classes(const ClassInputs& in) {
  if (in.params.empty() == in.data.empty()) {
    throw Error(ErrorCode::InvalidArgument, "give either --params files or --data, not both");
  }
  Loaded out;
  if (!in.data.empty()) {
    out.data = read_dataset(in.data);
    out.labels = out.data->classes();
    for (int id : out.labels) out.classes.push_back(estimate_params(*out.data, id, in.ridge));
    out.pooled = pooled_within_class_covariance(*out.data);
  } else {
    for (const std::string& path : in.params) out.classes.push_back(read_params(path));
    for (std::size_t i = 1; i < out.classes.size(); ++i) {
      if (out.classes[i].dim() != out.classes[0].dim()) {
        throw Error(ErrorCode::DimensionMismatch, "parameter files differ in dimension");
      }
    }
    out.pooled = average_covariance(out.classes);
  }
  if (out.classes.size() < 2) throw Error(ErrorCode::InvalidArgument, "need at least two classes");
  return out;
}

void require_two(const Loaded& loaded, const std::string& what) {
  if (loaded.classes.size() != 2) {
    throw Error(ErrorCode::InvalidArgument, what + " needs exactly two classes");
  }
}

json regime_json(const RegimeReport& report) {
  json j{{"d_mu", report.d_mu},
         {"d_sigma", report.d_sigma},
         {"r", report.r},
         {"recommendation", std::string(to_string(report.recommendation))}};
  j["threshold"] = std::isinf(report.threshold) ? json("inf") : json(report.threshold);
  return j;
}

ProjectionResult fit_two_class(Method method, const GaussianParams& p1, const GaussianParams& p2,
                               Index r, AutoMode mode, const Matrix& pooled) {
  switch (method) {
    case Method::Alg1: return algorithm1(p1, p2, r);
    case Method::Alg2: return algorithm2(p1, p2, r);
    case Method::Lol: return lol_projection(p1, p2, r, pooled);
    case Method::Lda:
      if (r != 1) throw Error(ErrorCode::InvalidArgument, "lda gives a single direction (r=1)");
      return lda_direction(p1, p2);
    default: return fit_auto(p1, p2, r, mode);
  }
}

// ---------------------------------------------------------------- gen

struct GenArgs {
  std::optional<std::uint64_t> seed;
  Index d = 0;
  Index t = 0;
  double noise_var = 1.0;
  Index classes = 2;
  Index n = 0;
  Index test_n = 0;
  double mean_scale = 1.0;
  double eig_min = 0.1;
  double eig_max = 10.0;
  bool common_cov = false;
  double target_ratio = 0.0;
  std::string out = ".";

  json to_json() const {
    return {{"command", "gen"}, {"version", kVersion}, {"seed", *seed},
            {"d", d},           {"t", t},              {"noise_var", noise_var},
            {"classes", classes}, {"n", n},            {"test_n", test_n},
            {"mean_scale", mean_scale}, {"eig_min", eig_min}, {"eig_max", eig_max},
            {"common_cov", common_cov}, {"target_ratio", target_ratio}, {"out", out}};
  }
};

int cmd_gen(const GenArgs& a, std::ostream& out) {
  if (!a.seed) throw Error(ErrorCode::InvalidArgument, "gen requires --seed");
  if (a.d < 1) throw Error(ErrorCode::InvalidArgument, "--d must be at least 1");
  if (a.classes < 2) throw Error(ErrorCode::InvalidArgument, "--classes must be at least 2");
  if (a.t > 0 && a.classes != 2) {
    throw Error(ErrorCode::InvalidArgument, "channel generation (--t) makes exactly two classes");
  }
  if (a.target_ratio > 0.0 && a.classes != 2) {
    throw Error(ErrorCode::InvalidArgument, "--target-ratio needs exactly two classes");
  }
  if (a.n < 0 || a.test_n < 0) throw Error(ErrorCode::InvalidArgument, "sample counts must be >= 0");
  const std::uint64_t seed = *a.seed;
  const json config = a.to_json();
  const fs::path dir(a.out);

  std::vector<GaussianParams> classes;
  json channel;
  if (a.t > 0) {
    ClassPairSpec spec{a.t, a.eig_min, a.eig_max, a.mean_scale, a.common_cov, Rng::derive(seed, 1)};
    const std::vector<GaussianParams> signal = random_classes(spec, 2);
    const ChannelEmbedding e =
        embed_channel(signal[0], signal[1], {a.d, a.t, a.noise_var, Rng::derive(seed, 2)});
    classes = {e.x1, e.x2};
    channel = {{"t", a.t},
               {"d", a.d},
               {"noise_var", a.noise_var},
               {"attempts", e.attempts},
               {"h", to_json(e.h)},
               {"signal_class1", params_to_json(signal[0])},
               {"signal_class2", params_to_json(signal[1])}};
  } else {
    ClassPairSpec spec{a.d, a.eig_min, a.eig_max, a.mean_scale, a.common_cov, Rng::derive(seed, 1)};
    classes = random_classes(spec, a.classes);
  }
  json summary{{"classes", classes.size()}, {"d", a.d}};
  if (classes.size() == 2) {
    if (a.target_ratio > 0.0) {
      const double factor = separation_factor_for_ratio(classes[0], classes[1], a.target_ratio);
      scale_mean_separation(classes[0], classes[1], factor);
      summary["separation_factor"] = factor;
    }
    const KldBreakdown split = kld_split(classes[0], classes[1]);
    summary["kld"] = split.total;
    summary["d_mu"] = split.d_mu;
    summary["d_sigma"] = split.d_sigma;
  }

  for (std::size_t k = 0; k < classes.size(); ++k) {
    json j = params_to_json(classes[k]);
    j["class"] = k + 1;
    j["config"] = config;
    write_json(dir / ("class" + std::to_string(k + 1) + ".json"), j);
  }
  if (!channel.is_null()) {
    channel["config"] = config;
    write_json(dir / "channel.json", channel);
  }
  if (a.n > 0) {
    write_atomic(dir / "data.csv", dataset_csv(sample_dataset(classes, a.n, Rng::derive(seed, 3))));
  }
  if (a.test_n > 0) {
    write_atomic(dir / "test.csv",
                 dataset_csv(sample_dataset(classes, a.test_n, Rng::derive(seed, 4))));
  }
  out << summary.dump() << "\n";
  return kOk;
}

// ---------------------------------------------------------------- fit

struct FitArgs {
  ClassInputs inputs;
  Index r = 0;
  std::string method = "auto";
  std::string mode = "rule";
  bool refine = false;
  AscentFlags ascent;
  std::string out;

  json to_json() const {
    return {{"command", "fit"}, {"version", kVersion}, {"inputs", inputs.to_json()},
            {"r", r},           {"method", method},    {"mode", mode},
            {"refine", refine}, {"ascent", ascent.to_json()}, {"out", out}};
  }
};

AutoMode parse_mode(const std::string& mode) {
  if (mode == "rule") return AutoMode::Rule;
  if (mode == "compare") return AutoMode::Compare;
  throw Error(ErrorCode::InvalidArgument, "--mode must be rule or compare");
}

int cmd_fit(const FitArgs& a, std::ostream& out) {
  const Loaded loaded = load_classes(a.inputs);
  const AutoMode mode = parse_mode(a.mode);
  const bool multiclass = loaded.classes.size() > 2;
  Method method = a.method == "auto" ? (multiclass ? Method::MulticlassLda : Method::Alg1)
                                     : parse_method(a.method);
  const bool automatic = a.method == "auto" && !multiclass;
  if (method == Method::Refined) {
    throw Error(ErrorCode::InvalidArgument, "use --refine to refine a closed-form method");
  }
  if (multiclass && method != Method::MulticlassLda) {
    throw Error(ErrorCode::InvalidArgument, "more than two classes need --method mclda");
  }
  if (a.refine && multiclass) {
    throw Error(ErrorCode::InvalidArgument, "--refine applies to two-class projections");
  }
  Index r = a.r;
  if (r == 0 && method == Method::Lda) r = 1;
  if (r == 0 && method != Method::MulticlassLda) {
    throw Error(ErrorCode::InvalidArgument, "--r is required for method " + a.method);
  }

  ProjectionResult result;
  if (method == Method::MulticlassLda) {
    result = multiclass_lda(loaded.classes, r);
  } else {
    result = fit_two_class(automatic ? Method::Refined : method, loaded.classes[0],
                           loaded.classes[1], r, mode, loaded.pooled);
  }

  json report;
  report["requested_method"] = a.method;
  if (!multiclass) {
    const GaussianParams& p1 = loaded.classes[0];
    const GaussianParams& p2 = loaded.classes[1];
    report["full_kld"] = kld(p1, p2);
    report["regime"] = regime_json(select_regime(p1, p2, result.rank()));
    if (a.refine) {
      const AscentTrace trace = gradient_ascent(result.original_matrix, p1, p2, a.ascent.options());
      report["refine"] = {{"base_method", std::string(to_string(result.method))},
                          {"initial_kld", result.achieved_kld},
                          {"ascent_start_kld", trace.initial_objective},
                          {"refined_kld", trace.final_objective},
                          {"iterations", trace.iterations_run},
                          {"stop_reason", trace.stop_reason},
                          {"converged", trace.converged}};
      ProjectionResult refined;
      refined.method = Method::Refined;
      refined.frame = Frame::Original;
      refined.matrix = trace.final_matrix;
      refined.original_matrix = trace.final_matrix;
      refined.center = Vector::Zero(p1.dim());
      refined.achieved_kld = trace.final_objective;
      refined.warnings = result.warnings;
      result = std::move(refined);
    }
  }
  report["pairwise_ratios"] = to_json(pairwise_preservation(loaded.classes, result.original_matrix));
  if (!loaded.labels.empty()) report["class_labels"] = loaded.labels;

  json doc = projection_to_json(result);
  doc.update(report);
  doc["config"] = a.to_json();
  write_json(a.out, doc);
  out << json{{"method", doc["method"]}, {"r", doc["r"]}, {"achieved_kld", doc["achieved_kld"]},
              {"out", a.out}}
             .dump()
      << "\n";
  return kOk;
}

// ---------------------------------------------------------------- eval

struct EvalArgs {
  ClassInputs inputs;
  std::string test;
  std::string projection;
  std::string sweep;
  std::string methods = "alg1,alg2,lol";
  bool refine = false;
  AscentFlags ascent;
  bool classify = false;
  Index r = 2;
  bool density = false;
  Index grid_res = 200;
  double grid_width = 4.0;
  bool scatter = false;
  std::string out;

  json to_json() const {
    return {{"command", "eval"},    {"version", kVersion},    {"inputs", inputs.to_json()},
            {"test", test},         {"projection", projection}, {"sweep_r", sweep},
            {"methods", methods},   {"refine", refine},       {"ascent", ascent.to_json()},
            {"classify", classify}, {"r", r},                 {"density_grid", density},
            {"grid_res", grid_res}, {"grid_width", grid_width}, {"scatter", scatter},
            {"out", out}};
  }
};

std::vector<Method> parse_methods(const std::string& text) {
  std::vector<Method> out;
  std::stringstream ss(text);
  std::string item;
  while (std::getline(ss, item, ',')) {
    if (!item.empty()) out.push_back(parse_method(item));
  }
  if (out.empty()) throw Error(ErrorCode::InvalidArgument, "--methods is empty");
  return out;
}

std::vector<Index> parse_range(const std::string& text) {
  const auto dots = text.find("..");
  try {
    const long lo = std::stol(text.substr(0, dots));
    const long hi = dots == std::string::npos ? lo : std::stol(text.substr(dots + 2));
    if (lo < 1 || hi < lo) throw std::invalid_argument("order");
    std::vector<Index> out;
    for (long r = lo; r <= hi; ++r) out.push_back(static_cast<Index>(r));
    return out;
  } catch (const std::logic_error&) {
    throw Error(ErrorCode::InvalidArgument, "--sweep-r expects a..b with 1 <= a <= b");
  }
}

int cmd_eval(const EvalArgs& a, std::ostream& out) {
  if (a.sweep.empty() && !a.classify && !a.density && !a.scatter) {
    throw Error(ErrorCode::InvalidArgument,
                "nothing to do: pass --sweep-r, --classify, --density-grid or --scatter");
  }
  const Loaded loaded = load_classes(a.inputs);
  const fs::path dir(a.out);
  std::optional<ProjectionResult> projection;
  if (!a.projection.empty()) {
    projection = projection_from_json(read_json(a.projection));
    if (projection->original_matrix.cols() != loaded.classes[0].dim()) {
      throw Error(ErrorCode::DimensionMismatch, "projection and class dimensions differ");
    }
  }
  json report;
  report["config"] = a.to_json();
  json files = json::array();

  if (!a.sweep.empty()) {
    require_two(loaded, "--sweep-r");
    SweepOptions opts;
    opts.methods = parse_methods(a.methods);
    opts.r_values = parse_range(a.sweep);
    opts.refine = a.refine;
    opts.ascent = a.ascent.options();
    opts.pooled_cov = loaded.pooled;
    const SweepTable table = sweep_r(loaded.classes[0], loaded.classes[1], opts);
    std::string csv = "method,r,kld\n";
    for (const SweepRow& row : table.rows) {
      csv += row.method + "," + std::to_string(row.r) + "," + number(row.kld) + "\n";
    }
    write_atomic(dir / "sweep.csv", csv);
    files.push_back("sweep.csv");
    report["sweep"] = {{"full_kld", table.full_kld},
                       {"violations", sweep_violations(table, loaded.classes[0].dim(), !a.refine)}};
  }

  if (a.classify) {
    if (!loaded.data || a.test.empty()) {
      throw Error(ErrorCode::InvalidArgument, "--classify needs --data (training) and --test");
    }
    const LabeledDataset& train = *loaded.data;
    const LabeledDataset test = read_dataset(a.test);
    if (test.dim() != train.dim()) throw Error(ErrorCode::DimensionMismatch, "test data dimension");
    json accuracy, divergence;
    if (projection) {
      accuracy["projection"] = PluginClassifier::train(train, *projection).accuracy(test);
    }
    for (Method m : parse_methods(a.methods)) {
      ProjectionResult p;
      if (m == Method::MulticlassLda) {
        p = multiclass_lda(loaded.classes);
      } else {
        require_two(loaded, std::string("method ") + std::string(to_string(m)));
        p = fit_two_class(m, loaded.classes[0], loaded.classes[1], a.r, AutoMode::Rule,
                          loaded.pooled);
      }
      const std::string name(to_string(m));
      accuracy[name] = PluginClassifier::train(train, p).accuracy(test);
      divergence[name] = p.achieved_kld;
    }
    accuracy["full"] = PluginClassifier::train_full(train).accuracy(test);
    json classify{{"accuracy", accuracy}, {"kld", divergence}, {"r", a.r},
                  {"train_size", train.size()}, {"test_size", test.size()},
                  {"config", a.to_json()}};
    write_json(dir / "classify.json", classify);
    files.push_back("classify.json");
    report["classify"] = {{"accuracy", accuracy}, {"kld", divergence}};
  }

  if (a.density) {
    require_two(loaded, "--density-grid");
    if (!projection) throw Error(ErrorCode::InvalidArgument, "--density-grid needs --projection");
    const GridSpec grid =
        default_grid(*projection, loaded.classes[0], loaded.classes[1], a.grid_width, a.grid_res);
    const DensityGrid g = density_grid(*projection, loaded.classes[0], loaded.classes[1], grid);
    std::string csv = "x,y,class,density\n";
    for (int c = 1; c <= 2; ++c) {
      const Matrix& values = c == 1 ? g.values_class1 : g.values_class2;
      for (Index j = 0; j < g.y_axis.size(); ++j) {
        for (Index i = 0; i < g.x_axis.size(); ++i) {
          csv += number(g.x_axis(i)) + "," + number(g.y_axis(j)) + "," + std::to_string(c) + "," +
                 number(values(j, i)) + "\n";
        }
      }
    }
    write_atomic(dir / "density.csv", csv);
    files.push_back("density.csv");
    report["density_grid"] = {{"x_range", {grid.x_min, grid.x_max}},
                              {"y_range", {grid.y_min, grid.y_max}},
                              {"resolution", {grid.nx, grid.ny}},
                              {"peak", {g.peak_class1, g.peak_class2}},
                              {"contour_level", {g.contour_level_class1(), g.contour_level_class2()}}};
  }

  if (a.scatter) {
    if (!projection) throw Error(ErrorCode::InvalidArgument, "--scatter needs --projection");
    if (projection->rank() != 2) throw Error(ErrorCode::DimensionMismatch, "--scatter needs r = 2");
    const LabeledDataset samples = a.test.empty() ? (loaded.data ? *loaded.data : LabeledDataset{})
                                                  : read_dataset(a.test);
    if (samples.size() == 0) throw Error(ErrorCode::InvalidArgument, "--scatter needs --data or --test");
    const Matrix y = projection->apply(samples.samples);
    std::string csv = "x,y,class\n";
    for (Index i = 0; i < y.rows(); ++i) {
      csv += number(y(i, 0)) + "," + number(y(i, 1)) + "," +
             std::to_string(samples.labels[static_cast<std::size_t>(i)]) + "\n";
    }
    write_atomic(dir / "scatter.csv", csv);
    files.push_back("scatter.csv");
  }

  report["files"] = files;
  write_json(dir / "report.json", report);
  out << json{{"out", a.out}, {"files", files}}.dump() << "\n";
  return kOk;
}

// ---------------------------------------------------------------- regime

struct RegimeArgs {
  ClassInputs inputs;
  Index r = 0;
  std::string out;
};

int cmd_regime(const RegimeArgs& a, std::ostream& out) {
  const Loaded loaded = load_classes(a.inputs);
  require_two(loaded, "regime");
  if (a.r < 1) throw Error(ErrorCode::InvalidArgument, "--r must be at least 1");
  json j = regime_json(select_regime(loaded.classes[0], loaded.classes[1], a.r));
  j["config"] = {{"command", "regime"}, {"version", kVersion}, {"inputs", a.inputs.to_json()},
                 {"r", a.r}};
  if (!a.out.empty()) write_json(a.out, j);
  out << j.dump(2) << "\n";
  return kOk;
}

// ---------------------------------------------------------------- check

int cmd_check(std::uint64_t seed, const std::string& workdir, std::ostream& out) {
  checks::CheckOptions opts;
  opts.seed = seed;
  std::vector<checks::CriterionResult> results = checks::run_property_checks(opts);

  fs::path dir = workdir;
  const bool temporary = dir.empty();
  if (temporary) {
    dir = fs::temp_directory_path() / ("kldproj-check-" + std::to_string(seed));
  }
  results.push_back(determinism_check(dir));
  if (temporary) {
    std::error_code ec;
    fs::remove_all(dir, ec);
  }

  int passed = 0;
  for (const auto& r : results) {
    out << checks::format_result(r) << "\n";
    passed += r.passed;
  }
  out << passed << "/" << results.size() << " criteria passed\n";
  return passed == static_cast<int>(results.size()) ? kOk : kCheckFailed;
}

void report_error(std::ostream& err, std::string_view code, std::string_view kind,
                  const std::string& message) {
  err << json{{"error", {{"code", code}, {"kind", kind}, {"message", message}}}}.dump() << "\n";
}

std::map<fs::path, std::string> snapshot(const fs::path& dir) {
  std::map<fs::path, std::string> out;
  for (const auto& entry : fs::recursive_directory_iterator(dir)) {
    if (!entry.is_regular_file()) continue;
    std::ifstream in(entry.path(), std::ios::binary);
    std::ostringstream bytes;
    bytes << in.rdbuf();
    out[fs::relative(entry.path(), dir)] = bytes.str();
  }
  return out;
}

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  CLI::App app{"Dimension reduction that keeps the divergence between Gaussian classes",
               "kldproj"};
  app.require_subcommand(1);
  app.set_version_flag("--version", kVersion);

  GenArgs gen;
  std::uint64_t gen_seed = 0;
  auto* gen_cmd = app.add_subcommand("gen", "generate class parameters and samples");
  gen_cmd->add_option("--seed", gen_seed, "seed for every random draw")->required();
  gen_cmd->add_option("--d", gen.d, "ambient dimension")->required();
  gen_cmd->add_option("--t", gen.t, "signal dimension; enables the noisy channel x = H s + z");
  gen_cmd->add_option("--noise-var", gen.noise_var, "channel noise variance")->capture_default_str();
  gen_cmd->add_option("--classes", gen.classes, "number of classes")->capture_default_str();
  gen_cmd->add_option("--n", gen.n, "training samples per class (data.csv)");
  gen_cmd->add_option("--test-n", gen.test_n, "test samples per class (test.csv)");
  gen_cmd->add_option("--mean-scale", gen.mean_scale, "scale of the random means")
      ->capture_default_str();
  gen_cmd->add_option("--eig-min", gen.eig_min, "smallest covariance eigenvalue")
      ->capture_default_str();
  gen_cmd->add_option("--eig-max", gen.eig_max, "largest covariance eigenvalue")
      ->capture_default_str();
  gen_cmd->add_flag("--common-cov", gen.common_cov, "share one covariance between classes");
  gen_cmd->add_option("--target-ratio", gen.target_ratio,
                      "rescale the mean separation so that d_mu / d_sigma hits this value");
  gen_cmd->add_option("--out", gen.out, "output directory")->capture_default_str();

  FitArgs fit;
  auto* fit_cmd = app.add_subcommand("fit", "fit a projection");
  fit.inputs.add_to(*fit_cmd);
  fit_cmd->add_option("--r", fit.r, "target dimension");
  fit_cmd->add_option("--method", fit.method, "auto|alg1|alg2|lda|mclda|lol")
      ->capture_default_str();
  fit_cmd->add_option("--mode", fit.mode, "auto mode: rule|compare")->capture_default_str();
  fit_cmd->add_flag("--refine", fit.refine, "refine with gradient ascent");
  fit.ascent.add_to(*fit_cmd);
  fit_cmd->add_option("--out", fit.out, "projection JSON")->required();

  EvalArgs eval;
  auto* eval_cmd = app.add_subcommand("eval", "sweeps, classification, density grids");
  eval.inputs.add_to(*eval_cmd);
  eval_cmd->add_option("--test", eval.test, "labeled test CSV");
  eval_cmd->add_option("--projection", eval.projection, "projection JSON from fit");
  eval_cmd->add_option("--sweep-r", eval.sweep, "r range a..b for the KLD sweep");
  eval_cmd->add_option("--methods", eval.methods, "comma-separated methods")
      ->capture_default_str();
  eval_cmd->add_flag("--refine", eval.refine, "add gradient-refined sweep rows");
  eval.ascent.add_to(*eval_cmd);
  eval_cmd->add_flag("--classify", eval.classify, "plug-in classifier accuracy per method");
  eval_cmd->add_option("--r", eval.r, "target dimension for --classify methods")
      ->capture_default_str();
  eval_cmd->add_flag("--density-grid", eval.density, "projected class densities (r = 2)");
  eval_cmd->add_option("--grid-res", eval.grid_res, "grid points per axis")->capture_default_str();
  eval_cmd->add_option("--grid-width", eval.grid_width, "half-width in standard deviations")
      ->capture_default_str();
  eval_cmd->add_flag("--scatter", eval.scatter, "projected samples (r = 2)");
  eval_cmd->add_option("--out", eval.out, "output directory")->required();

  RegimeArgs regime;
  auto* regime_cmd = app.add_subcommand("regime", "d_mu / d_sigma split and method rule");
  regime.inputs.add_to(*regime_cmd);
  regime_cmd->add_option("--r", regime.r, "target dimension")->required();
  regime_cmd->add_option("--out", regime.out, "also write the report here");

  std::uint64_t check_seed = checks::CheckOptions{}.seed;
  std::string check_dir;
  auto* check_cmd = app.add_subcommand("check", "run the acceptance property suite");
  check_cmd->add_option("--seed", check_seed, "seed for the random instances")
      ->capture_default_str();
  check_cmd->add_option("--workdir", check_dir, "scratch directory for the determinism run");

  std::vector<std::string> reversed(args.rbegin(), args.rend() - (args.empty() ? 0 : 1));
  try {
    app.parse(reversed);
  } catch (const CLI::CallForHelp&) {
    out << app.help();
    return kOk;
  } catch (const CLI::CallForVersion&) {
    out << kVersion << "\n";
    return kOk;
  } catch (const CLI::ParseError& e) {
    report_error(err, "InvalidArgument", "validation", e.what());
    return kValidation;
  }

  try {
    if (gen_cmd->parsed()) {
      gen.seed = gen_seed;
      return cmd_gen(gen, out);
    }
    if (fit_cmd->parsed()) return cmd_fit(fit, out);
    if (eval_cmd->parsed()) return cmd_eval(eval, out);
    if (regime_cmd->parsed()) return cmd_regime(regime, out);
    return cmd_check(check_seed, check_dir, out);
  } catch (const Error& e) {
    const ErrorKind kind = kind_of(e.code());
    const char* kind_name =
        kind == ErrorKind::Io ? "io" : kind == ErrorKind::Numerical ? "numerical" : "validation";
    report_error(err, to_string(e.code()), kind_name, e.what());
    return kind == ErrorKind::Io ? kIo : kind == ErrorKind::Numerical ? kNumerical : kValidation;
  } catch (const fs::filesystem_error& e) {
    report_error(err, "Io", "io", e.what());
    return kIo;
  } catch (const std::exception& e) {
    report_error(err, "Internal", "numerical", e.what());
    return kNumerical;
  }
}

checks::CriterionResult determinism_check(const fs::path& workdir) {
  const auto start = std::chrono::steady_clock::now();
  const std::string w = workdir.string();
  const std::vector<std::vector<std::string>> script{
      {"gen", "--seed", "7", "--d", "30", "--t", "5", "--noise-var", "1", "--out", w + "/channel"},
      {"gen", "--seed", "3", "--d", "6", "--n", "2000", "--test-n", "500", "--eig-min", "0.01",
       "--eig-max", "100", "--out", w + "/data"},
      {"gen", "--seed", "5", "--d", "8", "--classes", "3", "--common-cov", "--out", w + "/multi"},
      {"fit", "--params", w + "/channel/class1.json", "--params", w + "/channel/class2.json",
       "--method", "auto", "--r", "2", "--refine", "--out", w + "/fit/auto.json"},
      {"fit", "--data", w + "/data/data.csv", "--method", "alg2", "--r", "2", "--out",
       w + "/fit/alg2.json"},
      {"fit", "--params", w + "/multi/class1.json", "--params", w + "/multi/class2.json",
       "--params", w + "/multi/class3.json", "--method", "mclda", "--out", w + "/fit/mclda.json"},
      {"eval", "--params", w + "/channel/class1.json", "--params", w + "/channel/class2.json",
       "--sweep-r", "1..6", "--refine", "--out", w + "/eval/sweep"},
      {"eval", "--data", w + "/data/data.csv", "--test", w + "/data/test.csv", "--projection",
       w + "/fit/alg2.json", "--classify", "--density-grid", "--grid-res", "60", "--scatter",
       "--out", w + "/eval/data"},
  };

  std::string detail;
  bool passed = true;
  std::map<fs::path, std::string> first;
  std::error_code ec;
  fs::remove_all(workdir, ec);
  for (int pass = 0; pass < 2 && passed; ++pass) {
    for (const auto& cmd : script) {
      std::vector<std::string> args{"kldproj"};
      args.insert(args.end(), cmd.begin(), cmd.end());
      std::ostringstream sink, errors;
      const int code = run(args, sink, errors);
      if (code != kOk) {
        passed = false;
        detail = "`" + cmd.front() + "` exited with " + std::to_string(code) + ": " + errors.str();
        break;
      }
    }
    if (!passed) break;
    if (pass == 0) {
      first = snapshot(workdir);
      continue;
    }
    const auto second = snapshot(workdir);
    std::size_t differing = 0;
    std::string example;
    for (const auto& [path, bytes] : first) {
      const auto it = second.find(path);
      if (it == second.end() || it->second != bytes) {
        ++differing;
        if (example.empty()) example = path.string();
      }
    }
    differing += second.size() > first.size() ? second.size() - first.size() : 0;
    passed = differing == 0 && !first.empty();
    detail = std::to_string(script.size()) + " gen/fit/eval runs repeated, " +
             std::to_string(first.size()) + " files compared, " + std::to_string(differing) +
             " differ" + (example.empty() ? "" : " (first: " + example + ")");
  }
  const double seconds =
      std::chrono::duration<double>(std::chrono::steady_clock::now() - start).count();
  return {11, "repeated runs write byte-identical files", passed, detail, seconds};
}

}  // namespace kldproj::cli
