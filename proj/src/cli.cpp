#include "nspcert/cli.hpp"

#include <CLI11.hpp>
#include <json.hpp>

#include <algorithm>
#include <cstdlib>
#include <filesystem>
#include <fstream>
#include <functional>
#include <optional>
#include <ostream>
#include <thread>

#include "nspcert/bounds.hpp"
#include "nspcert/errors.hpp"
#include "nspcert/exact.hpp"
#include "nspcert/experiments.hpp"

namespace nspcert::cli {
namespace {

using json = nlohmann::ordered_json;

// ---------------------------------------------------------------------------
// JSON config: every key becomes "--key value" unless given on the command line.

std::optional<std::string> extract_config_path(std::vector<std::string>& args) {
  std::optional<std::string> path;
  for (std::size_t i = 0; i < args.size();) {
    if (args[i] == "--config") {
      if (i + 1 >= args.size()) throw ValidationError("--config needs a file path");
      path = args[i + 1];
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i),
                 args.begin() + static_cast<std::ptrdiff_t>(i) + 2);
    } else if (args[i].starts_with("--config=")) {
      path = args[i].substr(9);
      args.erase(args.begin() + static_cast<std::ptrdiff_t>(i));
    } else {
      ++i;
    }
  }
  return path;
}

bool flag_given(const std::vector<std::string>& args, const std::string& flag) {
  return std::any_of(args.begin(), args.end(), [&](const std::string& a) {
    return a == flag || a.starts_with(flag + "=");
  });
}

void apply_config(const std::string& path, std::vector<std::string>& args) {
  std::ifstream in(path);
  if (!in) throw ValidationError("cannot open config file: " + path);
  json config;
  try {
    config = json::parse(in);
  } catch (const json::parse_error& e) {
    throw ValidationError("malformed config file " + path + ": " + e.what());
  }
  if (!config.is_object()) throw ValidationError("config file must hold a JSON object");
  for (const auto& [key, value] : config.items()) {
    const std::string flag = "--" + key;
    if (flag_given(args, flag)) continue;
    if (value.is_boolean()) {
      if (value.get<bool>()) args.push_back(flag);
    } else if (value.is_string()) {
      args.push_back(flag);
      args.push_back(value.get<std::string>());
    } else if (value.is_number()) {
      args.push_back(flag);
      args.push_back(value.dump());
    } else {
      throw ValidationError("config key '" + key + "' must be a string, number or boolean");
    }
  }
}

// ---------------------------------------------------------------------------
// Shared option groups.

struct Common {
  std::string out;
  unsigned threads = 0;

  unsigned resolved_threads() const {
    if (threads > 0) return threads;
    return std::max(1u, std::thread::hardware_concurrency());
  }
};

void add_common(CLI::App* cmd, Common& common) {
  cmd->add_option("--out", common.out, "Output file (default: $" + std::string(kOutDirEnv) +
                                           "/<command>.json or .csv)");
  cmd->add_option("--threads", common.threads, "Worker threads, 0 = all cores");
}

std::string output_path(const Common& common, const std::string& default_name) {
  if (!common.out.empty()) return common.out;
  const char* dir = std::getenv(kOutDirEnv);
  return (std::filesystem::path(dir && *dir ? dir : ".") / default_name).string();
}

std::ofstream open_output(const std::string& path) {
  std::ofstream file(path, std::ios::binary);
  if (!file) throw ValidationError("cannot open output file: " + path);
  return file;
}

void write_json(const std::string& path, const json& doc) {
  auto file = open_output(path);
  file << doc.dump(2) << '\n';
}

struct MatrixSource {
  std::string matrix_csv;
  std::optional<std::uint64_t> seed;
  int rows = 8;
  int cols = 9;
  std::uint64_t budget = EnumerationOptions{}.budget;
  std::optional<std::string> ric;
};

void add_matrix_source(CLI::App* cmd, MatrixSource& src) {
  cmd->add_option("--matrix", src.matrix_csv, "Matrix CSV (first line \"M,N\")");
  cmd->add_option("--seed", src.seed, "Seed for a column-normalized Gaussian matrix");
  cmd->add_option("--rows", src.rows, "Rows of the random matrix")->check(CLI::PositiveNumber);
  cmd->add_option("--cols", src.cols, "Columns of the random matrix")->check(CLI::PositiveNumber);
  cmd->add_option("--budget", src.budget, "Maximum number of enumerated supports");
}

void add_ric_convention(CLI::App* cmd, MatrixSource& src, const std::string& fallback) {
  cmd->add_option("--ric", src.ric, "scaled (best rescaling c * Phi) | unscaled; default " +
                                        fallback)
      ->check(CLI::IsMember({"scaled", "unscaled"}));
}

RicConvention ric_convention(const MatrixSource& src, RicConvention fallback) {
  if (!src.ric) return fallback;
  return *src.ric == "unscaled" ? RicConvention::unscaled : RicConvention::scaled;
}

ExperimentConfig experiment_config(const MatrixSource& src, const Common& common) {
  ExperimentConfig config;
  config.seed = src.seed;
  if (!src.matrix_csv.empty()) config.matrix_csv = src.matrix_csv;
  config.rows = src.rows;
  config.cols = src.cols;
  config.out = common.out;
  return config;
}

EnumerationOptions enumeration(const MatrixSource& src, const Common& common) {
  return EnumerationOptions{src.budget, common.resolved_threads()};
}

struct Grid {
  double lo;
  double hi;
  int points;
};

void add_p_grid(CLI::App* cmd, Grid& grid) {
  cmd->add_option("--p-min", grid.lo, "Smallest p");
  cmd->add_option("--p-max", grid.hi, "Largest p");
  cmd->add_option("--p-points", grid.points, "Number of evenly spaced p values");
}

std::vector<double> linear_p_grid(const Grid& g) {
  if (g.points < 1) throw ValidationError("--p-points must be >= 1");
  if (!(g.lo > 0.0 && g.hi <= 1.0 && g.lo <= g.hi)) {
    throw ValidationError("p grid needs 0 < p-min <= p-max <= 1");
  }
  if (g.points == 1) return {g.lo};
  if (g.lo == g.hi) throw ValidationError("p-min must be below p-max for more than one point");
  std::vector<double> grid(static_cast<std::size_t>(g.points));
  for (int k = 0; k < g.points; ++k) {
    grid[static_cast<std::size_t>(k)] = g.lo + (g.hi - g.lo) * k / (g.points - 1);
  }
  return grid;
}

struct FamilyArgs {
  std::string family = "lorentzian";
  double p = 0.5;
  std::optional<double> p1;
};

void add_family(CLI::App* cmd, FamilyArgs& fa) {
  cmd->add_option("--family", fa.family,
                  "power | lorentzian | concave_exp | mixed_norm");
  cmd->add_option("--p", fa.p, "Exponent p (p2 for mixed_norm)");
  cmd->add_option("--p1", fa.p1, "Lower exponent of the uniform mixed-norm measure");
}

SparsityFunction make_function(const FamilyArgs& fa) {
  const Family family = parse_family(fa.family);
  if (family == Family::mixed_norm) {
    if (!fa.p1) throw ValidationError("mixed_norm needs --p1");
    return SparsityFunction::mixed_norm(Measure::uniform(*fa.p1, fa.p));
  }
  return SparsityFunction::of_family(family, fa.p);
}

void print_summary(std::ostream& out, const std::string& name, double value) {
  out << name << " = " << format_real(value) << '\n';
}

// ---------------------------------------------------------------------------

class Cli {
 public:
  Cli(std::ostream& out) : out_(out) {
    app_.name("nspcert");
    app_.description("Null space constant and RIC-based recovery certificates");
    app_.require_subcommand(1);
    build_bound();
    build_exact();
    build_experiments();
  }

  CLI::App& app() { return app_; }

  int dispatch() {
    for (auto& [cmd, action] : actions_) {
      if (cmd->parsed()) return action();
    }
    throw ValidationError("no subcommand selected");
  }

 private:
  void on(CLI::App* cmd, std::function<int()> action) {
    actions_.emplace_back(cmd, std::move(action));
  }

  void build_bound() {
    CLI::App* bound = app_.add_subcommand("bound", "RIC-based bounds");
    bound->require_subcommand(1);

    CLI::App* nsc = bound->add_subcommand("nsc", "Upper bound gamma* on the null space constant");
    add_common(nsc, common_);
    add_family(nsc, family_);
    nsc->add_option("--k", k_, "Sparsity K")->required();
    nsc->add_option("--k0", k0_, "Order K0 with known delta_{2K0}")->required();
    nsc->add_option("--delta", delta_, "delta_{2K0}")->required();
    nsc->add_option("--zeta", zeta_form_, "sharp | published (mixed_norm only)")
        ->check(CLI::IsMember({"sharp", "published"}));
    on(nsc, [this] { return bound_nsc(); });

    CLI::App* ric = bound->add_subcommand("ric", "RIC threshold guaranteeing recovery");
    add_common(ric, common_);
    add_family(ric, family_);
    ric->add_option("--k", k_, "Sparsity K")->required();
    ric->add_option("--k0", k0_, "Order K0")->required();
    on(ric, [this] { return bound_ric(); });

    CLI::App* mp = bound->add_subcommand("max-p", "Largest admissible exponent");
    add_common(mp, common_);
    mp->add_option("--family", family_.family, "lorentzian | concave_exp | mixed_norm");
    mp->add_option("--k", k_, "Sparsity K")->required();
    mp->add_option("--k0", k0_, "Order K0")->required();
    mp->add_option("--delta", delta_, "delta_{2K0}")->required();
    on(mp, [this] { return bound_max_p(); });

    CLI::App* mk = bound->add_subcommand("max-k", "Largest certified sparsity");
    add_common(mk, common_);
    add_family(mk, family_);
    mk->add_option("--k0", k0_, "Order K0")->required();
    mk->add_option("--delta", delta_, "delta_{2K0}")->required();
    on(mk, [this] { return bound_max_k(); });
  }

  void build_exact() {
    CLI::App* exact = app_.add_subcommand("exact", "Brute-force matrix quantities");
    exact->require_subcommand(1);

    CLI::App* ric = exact->add_subcommand("ric", "Restricted isometry constant delta_K");
    add_common(ric, common_);
    add_matrix_source(ric, matrix_);
    add_ric_convention(ric, matrix_, "unscaled");
    ric->add_option("--k", k_, "Order K")->required();
    on(ric, [this] { return exact_ric(); });

    CLI::App* sp = exact->add_subcommand("spark", "Smallest number of dependent columns");
    add_common(sp, common_);
    add_matrix_source(sp, matrix_);
    on(sp, [this] { return exact_spark(); });

    CLI::App* nsc = exact->add_subcommand("nsc", "Null space constant, one-dimensional kernel");
    add_common(nsc, common_);
    add_matrix_source(nsc, matrix_);
    add_family(nsc, family_);
    nsc->add_option("--k", k_, "Sparsity K")->required();
    on(nsc, [this] { return exact_nsc(); });
  }

  void build_experiments() {
    CLI::App* pd = app_.add_subcommand("phase-diagram", "1-sparse recovery over (lambda, p)");
    add_common(pd, common_);
    pd->add_option("--family", family_.family, "power | lorentzian | concave_exp");
    pd->add_option("--matrix", matrix_.matrix_csv,
                   "M x (M+1) matrix CSV (default: the 2 x 3 kernel example)");
    pd->add_option("--index", index_, "Signal support index (default: largest kernel entry)");
    pd->add_option("--lambda-min", lambda_.lo, "Smallest lambda");
    pd->add_option("--lambda-max", lambda_.hi, "Largest lambda");
    pd->add_option("--lambda-points", lambda_.points, "Number of log-spaced lambda values");
    add_p_grid(pd, p_grid_);
    on(pd, [this] { return phase(); });

    CLI::App* f3 = app_.add_subcommand("fig3", "Exact NSC versus its bounds over p");
    add_common(f3, common_);
    add_matrix_source(f3, matrix_);
    add_ric_convention(f3, matrix_, "scaled");
    add_p_grid(f3, p_grid_);
    f3->add_option("--k", k_, "Sparsity K")->required();
    on(f3, [this] { return fig3(); });

    CLI::App* f4 = app_.add_subcommand("fig4", "Largest recoverable K over p");
    add_common(f4, common_);
    add_matrix_source(f4, matrix_);
    add_ric_convention(f4, matrix_, "scaled");
    add_p_grid(f4, p_grid_);
    on(f4, [this] { return fig4(); });

    CLI::App* f5 = app_.add_subcommand("fig5", "RIC thresholds f1, f2 over K and p");
    add_common(f5, common_);
    f5->add_option("--k-max", k_max_, "Largest K (K = 1..k-max)");
    f5->add_option("--ratio", ratio_, "same (K0 = K) | twice (K0 = 2K)")
        ->check(CLI::IsMember({"same", "twice"}));
    add_p_grid(f5, fig5_p_);
    on(f5, [this] { return fig5(); });

    CLI::App* gr = app_.add_subcommand("gaussian-rows", "Rows making delta_{2K0} small w.h.p.");
    add_common(gr, common_);
    gr->add_option("--n", n_, "Signal length N")->required();
    gr->add_option("--k0", k0_, "Order K0")->required();
    gr->add_option("--epsilon", epsilon_, "Failure probability")->required();
    gr->add_option("--ric-bound", ric_bound_, "Target bound on delta_{2K0}")->required();
    on(gr, [this] { return rows(); });
  }

  // --- bound --------------------------------------------------------------

  int bound_nsc() {
    const SparsityFunction f = make_function(family_);
    const NscBoundInput input{k_, k0_, delta_};
    input.validate();
    const ZetaForm form = zeta_form_ == "published" ? ZetaForm::published : ZetaForm::sharp;
    const std::string path = output_path(common_, "bound_nsc.json");
    const NscBoundResult r = gamma_star(f, input, form);
    write_json(path, {{"family", std::string(to_string(f.family()))},
                      {"p", family_.p},
                      {"K", k_},
                      {"K0", k0_},
                      {"delta", delta_},
                      {"c_prime", r.c_prime},
                      {"zeta", r.zeta},
                      {"pi", r.pi_f},
                      {"gamma_star", r.gamma_star},
                      {"recoverable", r.recoverable}});
    print_summary(out_, "gamma_star", r.gamma_star);
    return kExitOk;
  }

  int bound_ric() {
    const BoundFamily family = bound_family_of(parse_family(family_.family));
    const std::string path = output_path(common_, "bound_ric.json");
    const double threshold = ric_threshold(family, k_, k0_, family_.p);
    write_json(path, {{"family", family_.family},
                      {"p", family_.p},
                      {"K", k_},
                      {"K0", k0_},
                      {"delta_threshold", threshold}});
    print_summary(out_, "delta_threshold", threshold);
    return kExitOk;
  }

  int bound_max_p() {
    const BoundFamily family = bound_family_of(parse_family(family_.family));
    const std::string path = output_path(common_, "bound_max_p.json");
    const double p = max_p(family, k_, k0_, delta_);
    write_json(path, {{"family", family_.family},
                      {"K", k_},
                      {"K0", k0_},
                      {"delta", delta_},
                      {"max_p", p}});
    print_summary(out_, "max_p", p);
    return kExitOk;
  }

  int bound_max_k() {
    const BoundFamily family = bound_family_of(parse_family(family_.family));
    if (family == BoundFamily::mixed_norm && !family_.p1) {
      throw ValidationError("mixed_norm needs --p1");
    }
    const std::string path = output_path(common_, "bound_max_k.json");
    const int k = max_k(family, k0_, delta_, family_.p, family_.p1.value_or(0.0));
    write_json(path, {{"family", family_.family},
                      {"p", family_.p},
                      {"K0", k0_},
                      {"delta", delta_},
                      {"max_k", k}});
    out_ << "max_k = " << k << '\n';
    return kExitOk;
  }

  // --- exact --------------------------------------------------------------

  SensingMatrix load_matrix() {
    const ExperimentConfig config = experiment_config(matrix_, common_);
    if (!config.seed && !config.matrix_csv) {
      throw ValidationError("--seed is required for a random matrix (or pass --matrix)");
    }
    config.validate();
    return config.matrix();
  }

  int exact_ric() {
    if (k_ < 1) throw ValidationError("--k must be >= 1");
    const SensingMatrix m = load_matrix();
    const std::string path = output_path(common_, "exact_ric.json");
    const bool scaled =
        ric_convention(matrix_, RicConvention::unscaled) == RicConvention::scaled;
    const EnumerationOptions options = enumeration(matrix_, common_);
    const double delta = scaled ? scaled_ric(m, k_, options) : ric(m, k_, options);
    write_json(path, {{"rows", m.rows()},
                      {"cols", m.cols()},
                      {"K", k_},
                      {"convention", scaled ? "scaled" : "unscaled"},
                      {"delta", delta}});
    print_summary(out_, "delta_" + std::to_string(k_), delta);
    return kExitOk;
  }

  int exact_spark() {
    const SensingMatrix m = load_matrix();
    const std::string path = output_path(common_, "exact_spark.json");
    const std::optional<int> s = spark(m, enumeration(matrix_, common_));
    json doc = {{"rows", m.rows()}, {"cols", m.cols()}};
    doc["spark"] = s ? json(*s) : json(nullptr);
    write_json(path, doc);
    out_ << "spark = " << (s ? std::to_string(*s) : std::string("full")) << '\n';
    return kExitOk;
  }

  int exact_nsc() {
    const SparsityFunction f = make_function(family_);
    const SensingMatrix m = load_matrix();
    const NullSpaceVector z = null_space_vector(m);
    if (k_ < 1 || k_ >= static_cast<int>(z.z_plus.size())) {
      throw ValidationError("--k must lie in [1, N-1]");
    }
    const std::string path = output_path(common_, "exact_nsc.json");
    const bool closed_form = f.has_nonincreasing_elasticity();
    const double gamma = closed_form ? exact_nsc_power(z, k_, family_.p)
                                     : exact_nsc_numeric(f, z, k_);
    write_json(path, {{"family", std::string(to_string(f.family()))},
                      {"p", family_.p},
                      {"K", k_},
                      {"method", closed_form ? "closed_form" : "numeric"},
                      {"gamma", gamma},
                      {"kernel", std::vector<double>(z.z.data(), z.z.data() + z.z.size())}});
    print_summary(out_, "gamma", gamma);
    return kExitOk;
  }

  // --- experiments --------------------------------------------------------

  int phase() {
    const Family family = parse_family(family_.family);
    if (family == Family::mixed_norm) {
      throw ValidationError("phase-diagram needs a single-exponent family");
    }
    if (lambda_.points < 2) throw ValidationError("--lambda-points must be >= 2");
    if (!(lambda_.lo > 0.0 && lambda_.lo < lambda_.hi)) {
      throw ValidationError("lambda grid needs 0 < lambda-min < lambda-max");
    }
    const std::vector<double> lambdas =
        log_grid(lambda_.lo, lambda_.hi, static_cast<std::size_t>(lambda_.points));
    const std::vector<double> ps = linear_p_grid(p_grid_);
    const SensingMatrix m = matrix_.matrix_csv.empty()
                                ? kernel_example_matrix()
                                : read_matrix_csv_file(matrix_.matrix_csv);
    const NullSpaceVector z = null_space_vector(m);
    const std::size_t i = index_ ? *index_ : largest_entry_index(z.z);
    if (i >= static_cast<std::size_t>(z.z.size())) throw ValidationError("--index out of range");
    const std::string path = output_path(common_, "phase_diagram.csv");
    auto file = open_output(path);

    const PhaseDiagram d = phase_diagram(family, z.z, i, lambdas, ps, common_.resolved_threads());
    write_csv(file, d);
    const auto recovered = std::count(d.recovered.begin(), d.recovered.end(), 1);
    out_ << "recovered = " << recovered << " / " << d.recovered.size() << '\n';
    return kExitOk;
  }

  MatrixAnalysis analysis() {
    const SensingMatrix m = load_matrix();
    return analyze_matrix(m, enumeration(matrix_, common_), ric_convention(matrix_, RicConvention::scaled));
  }

  int fig3() {
    const std::vector<double> ps = linear_p_grid(p_grid_);
    const MatrixAnalysis a = analysis();
    const std::string path = output_path(common_, "fig3.csv");
    auto file = open_output(path);
    const auto rows = nsc_comparison(a, k_, ps);
    write_csv(file, std::span<const NscComparisonRow>(rows));
    out_ << "K0 = " << a.K0 << ", rows = " << rows.size() << '\n';
    return kExitOk;
  }

  int fig4() {
    const std::vector<double> ps = linear_p_grid(p_grid_);
    const MatrixAnalysis a = analysis();
    const std::string path = output_path(common_, "fig4.csv");
    auto file = open_output(path);
    const auto rows = recoverable_k_vs_p(a, ps);
    write_csv(file, std::span<const RecoverableKRow>(rows));
    out_ << "K0 = " << a.K0 << ", rows = " << rows.size() << '\n';
    return kExitOk;
  }

  int fig5() {
    if (k_max_ < 1) throw ValidationError("--k-max must be >= 1");
    const std::vector<double> ps = linear_p_grid(fig5_p_);
    std::vector<int> ks(static_cast<std::size_t>(k_max_));
    for (int k = 1; k <= k_max_; ++k) ks[static_cast<std::size_t>(k - 1)] = k;
    const K0Ratio ratio = ratio_ == "twice" ? K0Ratio::twice : K0Ratio::same;
    const std::string path = output_path(common_, "fig5.csv");
    auto file = open_output(path);
    const auto rows = delta_bound_comparison(ks, ratio, ps);
    write_csv(file, std::span<const DeltaBoundRow>(rows));
    out_ << "rows = " << rows.size() << '\n';
    return kExitOk;
  }

  int rows() {
    const std::string path = output_path(common_, "gaussian_rows.json");
    const std::uint64_t m = gaussian_rows(n_, k0_, epsilon_, ric_bound_);
    write_json(path, {{"N", n_},
                      {"K0", k0_},
                      {"epsilon", epsilon_},
                      {"ric_bound", ric_bound_},
                      {"rows", m}});
    out_ << "rows = " << m << '\n';
    return kExitOk;
  }

  std::ostream& out_;
  CLI::App app_;
  std::vector<std::pair<CLI::App*, std::function<int()>>> actions_;

  Common common_;
  FamilyArgs family_;
  MatrixSource matrix_;
  int k_ = 1;
  int k0_ = 1;
  double delta_ = 0.0;
  std::string zeta_form_ = "sharp";
  std::optional<std::size_t> index_;
  Grid lambda_{1e-3, 1e3, 200};
  Grid p_grid_{0.01, 1.0, 100};
  Grid fig5_p_{0.05, 1.0, 96};
  int k_max_ = 10;
  std::string ratio_ = "same";
  int n_ = 0;
  double epsilon_ = 0.0;
  double ric_bound_ = 0.0;
};

}  // namespace

int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err) {
  Cli cli(out);
  try {
    std::vector<std::string> argv = args;
    if (const auto config = extract_config_path(argv)) apply_config(*config, argv);
    std::reverse(argv.begin(), argv.end());
    try {
      cli.app().parse(argv);
    } catch (const CLI::CallForHelp&) {
      out << cli.app().help();
      return kExitOk;
    } catch (const CLI::CallForAllHelp&) {
      out << cli.app().help("", CLI::AppFormatMode::All);
      return kExitOk;
    } catch (const CLI::ParseError& e) {
      err << "error: " << e.what() << "\n\n" << cli.app().help();
      return kExitValidation;
    }
    return cli.dispatch();
  } catch (const DomainError& e) {
    err << "error: " << e.what() << '\n';
    return kExitDomain;
  } catch (const ValidationError& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const BudgetExceeded& e) {
    err << "error: " << e.what() << '\n';
    return kExitValidation;
  } catch (const std::exception& e) {
    err << "error: " << e.what() << '\n';
    return kExitFailure;
  }
}

}  // namespace nspcert::cli
