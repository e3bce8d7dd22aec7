// Command-line front end: reproducible sampling/recovery runs, synthetic
// experiments, spanning analysis and frame reports. All randomness is
// seeded; rerunning a command with the same spec reproduces its output
// byte for byte.

#include <CLI11.hpp>
#include <nlohmann/json.hpp>

#include <atomic>
#include <cstdio>
#include <filesystem>
#include <fstream>
#include <iostream>
#include <sstream>
#include <thread>

#include "cpr/engine.hpp"
#include "cpr/errors.hpp"
#include "cpr/frame_analysis.hpp"

namespace fs = std::filesystem;
using nlohmann::json;
using namespace cpr;

namespace {

std::string fmt(double v) {
  char buf[40];
  std::snprintf(buf, sizeof(buf), "%.17g", v);
  return buf;
}

[[noreturn]] void spec_fail(const std::string& msg) { throw SpecError(msg); }

json load_json(const std::string& path) {
  std::ifstream in(path);
  if (!in) spec_fail("cannot open " + path);
  std::string text((std::istreambuf_iterator<char>(in)), std::istreambuf_iterator<char>());
  try {
    return json::parse(text);
  } catch (const json::parse_error& e) {
    // map the byte offset to a line number
    std::size_t line = 1;
    for (std::size_t i = 0; i < std::min<std::size_t>(e.byte, text.size()); ++i)
      if (text[i] == '\n') ++line;
    spec_fail(path + ":" + std::to_string(line) + ": " + e.what());
  }
}

void write_file(const fs::path& path, const std::string& text) {
  if (!path.parent_path().empty()) fs::create_directories(path.parent_path());
  std::ofstream out(path, std::ios::binary);
  if (!out) spec_fail("cannot write " + path.string());
  out << text;
}

Generator generator_from_spec(const json& j) {
  if (j.is_string()) {
    const std::string name = j.get<std::string>();
    if (name == "phi1") return phi1();
    if (name == "fig1") return fig1_generator(false);
    if (name == "fig1-printed") return fig1_generator(true);
    if (name.rfind("bspline:", 0) == 0) return bspline(std::stoi(name.substr(8)));
    spec_fail("unknown generator name: " + name);
  }
  return Generator::from_json(j);
}

void reject_unknown(const json& j, std::initializer_list<const char*> allowed,
                    const std::string& where) {
  for (const auto& [key, value] : j.items()) {
    (void)value;
    bool ok = false;
    for (const char* a : allowed) ok = ok || (key == a);
    if (!ok) spec_fail(where + ": unknown key \"" + key + "\"");
  }
}

struct ExperimentSpec {
  json generator_spec = "bspline:3";
  Pathway pathway = Pathway::hermite;
  double period = 1.0;
  double noise = 0.0;
  std::uint64_t seed = 1;
  int trials = 1;
  int coeff_offset = 0;
  int coeff_count = 6;
  double lo = -1.0, hi = 1.0;
  bool require_cpr = true;
};

ExperimentSpec parse_spec(const json& j) {
  reject_unknown(
      j, {"generator", "pathway", "period", "noise", "seed", "trials", "coeff", "require_cpr"},
      "spec");
  ExperimentSpec s;
  if (j.contains("generator")) s.generator_spec = j.at("generator");
  if (j.contains("pathway")) {
    const std::string p = j.at("pathway").get<std::string>();
    if (p == "hermite")
      s.pathway = Pathway::hermite;
    else if (p == "gram")
      s.pathway = Pathway::gram;
    else
      spec_fail("pathway must be \"hermite\" or \"gram\"");
  }
  if (j.contains("period")) s.period = j.at("period").get<double>();
  if (j.contains("noise")) s.noise = j.at("noise").get<double>();
  if (j.contains("seed")) s.seed = j.at("seed").get<std::uint64_t>();
  if (j.contains("trials")) s.trials = j.at("trials").get<int>();
  if (j.contains("coeff")) {
    const json& c = j.at("coeff");
    reject_unknown(c, {"offset", "count", "re_min", "re_max"}, "spec.coeff");
    s.coeff_offset = c.value("offset", 0);
    s.coeff_count = c.value("count", 6);
    s.lo = c.value("re_min", -1.0);
    s.hi = c.value("re_max", 1.0);
  }
  if (j.contains("require_cpr")) s.require_cpr = j.at("require_cpr").get<bool>();
  if (s.trials < 1) spec_fail("trials must be positive");
  if (s.coeff_count < 1) spec_fail("coeff.count must be positive");
  return s;
}

RecoveryConfig config_from_spec(const ExperimentSpec& s) {
  return make_config(generator_from_spec(s.generator_spec), s.pathway, s.period, s.noise, s.seed);
}

CoeffSeq draw_coeffs(const ExperimentSpec& s, std::uint64_t seed) {
  const Generator g = generator_from_spec(s.generator_spec);
  for (int attempt = 0; attempt < 64; ++attempt) {
    CoeffSeq c = random_coeffs(s.coeff_offset, s.coeff_count, s.lo, s.hi,
                               derive_seed(seed, 0xc0ef + attempt));
    if (!s.require_cpr || is_cpr(c, g.support_length()).retrievable) return c;
  }
  throw RecoveryError("could not draw a retrievable coefficient sequence");
}

int cmd_analyze(const std::string& gen_name, const std::string& out_dir) {
  const Generator g = generator_from_spec(json(gen_name));
  const int L = g.support_length();
  const int dim = spanning_dimension(g, false);
  const int dim_d = spanning_dimension(g, true);
  bool lli = true;
  try {
    local_basis_matrix(g);
  } catch (const RecoveryError&) {
    lli = false;
  }
  json rep = {{"generator", gen_name},
              {"L", L},
              {"degree", g.degree()},
              {"dim_W", dim},
              {"dim_W_with_deriv", dim_d},
              {"spanning", dim == L * (L + 1) / 2},
              {"hermite_spanning", dim_d == L * (L + 1) / 2},
              {"local_linear_independence", lli}};
  const std::string text = rep.dump(2) + "\n";
  std::cout << text;
  if (!out_dir.empty()) write_file(fs::path(out_dir) / "analysis.json", text);
  return 0;
}

int cmd_frame_check(int order, int trials, int restarts, std::uint64_t seed,
                    const std::string& out_dir) {
  const NodeSet nodes = default_nodes(order);
  const RealFrame frame = vandermonde_frame(order, nodes.gamma, nodes.gamma_prime);
  const bool suff = cpr_sufficient(frame);
  const CertifyReport cert = certify_by_recovery(frame, trials, seed);
  const FalsifyReport fals = falsify_cpr(frame, restarts, derive_seed(seed, 0xfa15));
  json rep = {{"order", order},
              {"vectors", frame.vectors.size()},
              {"sufficient_spanning", suff},
              {"monte_carlo_trials", cert.trials},
              {"monte_carlo_failures", cert.failures},
              {"monte_carlo_max_dist", cert.max_dist},
              {"monte_carlo_mean_dist", cert.mean_dist},
              {"falsifier", fals.to_json()}};
  const std::string text = rep.dump(2) + "\n";
  std::cout << text;
  if (!out_dir.empty()) write_file(fs::path(out_dir) / "frame_report.json", text);
  return 0;
}

json config_to_json(const ExperimentSpec& s) {
  return {{"generator", s.generator_spec},
          {"pathway", s.pathway == Pathway::hermite ? "hermite" : "gram"},
          {"period", s.period},
          {"noise", s.noise},
          {"seed", s.seed}};
}

int cmd_sample(const ExperimentSpec& spec, const std::string& out_dir) {
  RecoveryConfig cfg = config_from_spec(spec);
  const CoeffSeq truth = draw_coeffs(spec, spec.seed);
  const SampleSet samples = sample_signal(truth, cfg);
  json doc = {{"config", config_to_json(spec)}, {"samples", samples.to_json()}};
  write_file(fs::path(out_dir) / "samples.json", doc.dump(2) + "\n");
  write_file(fs::path(out_dir) / "samples.csv", samples.to_csv());
  write_file(fs::path(out_dir) / "truth.json", truth.to_json().dump(2) + "\n");
  std::cout << "wrote " << (fs::path(out_dir) / "samples.json").string() << "\n";
  return 0;
}

int cmd_recover(const std::string& samples_path, const std::string& truth_path,
                const std::string& out_dir) {
  const json doc = load_json(samples_path);
  reject_unknown(doc, {"config", "samples"}, "samples file");
  ExperimentSpec spec = parse_spec(doc.at("config"));
  RecoveryConfig cfg = config_from_spec(spec);
  const SampleSet samples = SampleSet::from_json(doc.at("samples"));
  const RecoveryResult res = recover_signal(samples, cfg);

  json rep = {{"coeffs", res.coeffs.to_json()},
              {"alignment", res.alignment.to_json()},
              {"cond_f", res.cond_f},
              {"cond_df", res.cond_df},
              {"cond_warning", res.cond_warning}};
  json diags = json::array();
  for (const auto& d : res.interval_diagnostics)
    diags.push_back({{"j", d.j}, {"residual", d.residual}, {"real_flag", d.real_flag}});
  rep["intervals"] = diags;
  if (!truth_path.empty()) {
    const CoeffSeq truth = CoeffSeq::from_json(load_json(truth_path));
    rep["errors"] = verify_recovery(truth, res.coeffs).to_json();
  }
  write_file(fs::path(out_dir) / "coeffs.json", res.coeffs.to_json().dump(2) + "\n");
  write_file(fs::path(out_dir) / "report.json", rep.dump(2) + "\n");
  std::cout << "wrote " << (fs::path(out_dir) / "report.json").string() << "\n";
  return 0;
}

int cmd_experiment(const ExperimentSpec& spec, const std::string& out_dir, int jobs) {
  struct Row {
    int trial = 0;
    std::uint64_t seed = 0;
    TrialResult result;
  };
  std::vector<Row> rows(spec.trials);

  std::atomic<int> next{0};
  auto worker = [&]() {
    for (;;) {
      const int t = next.fetch_add(1);
      if (t >= spec.trials) return;
      ExperimentSpec local = spec;
      local.seed = derive_seed(spec.seed, 1000 + t);
      RecoveryConfig cfg = config_from_spec(local);
      const CoeffSeq truth = draw_coeffs(local, local.seed);
      rows[t] = Row{t, local.seed, run_trial(truth, cfg)};
    }
  };
  const unsigned hw = std::max(1u, std::thread::hardware_concurrency());
  const int nthreads = std::max(1, std::min<int>(jobs, static_cast<int>(hw)));
  std::vector<std::thread> pool;
  for (int i = 0; i < nthreads; ++i) pool.emplace_back(worker);
  for (auto& th : pool) th.join();

  std::ostringstream csv;
  csv << "trial,seed,ok,dist,l2_rel,max_rel_re,max_rel_im,error\n";
  int ok_count = 0;
  double worst = 0.0;
  for (const auto& r : rows) {
    const auto& rep = r.result.report;
    csv << r.trial << "," << r.seed << "," << (r.result.ok ? 1 : 0) << "," << fmt(rep.dist) << ","
        << fmt(rep.l2_rel) << "," << fmt(rep.max_rel_re) << "," << fmt(rep.max_rel_im) << ","
        << r.result.error << "\n";
    if (r.result.ok) {
      ++ok_count;
      worst = std::max(worst, rep.l2_rel);
    }
  }
  write_file(fs::path(out_dir) / "experiment.csv", csv.str());
  json summary = {{"trials", spec.trials},
                  {"ok", ok_count},
                  {"success_rate", spec.trials ? double(ok_count) / spec.trials : 0.0},
                  {"worst_l2_rel", worst}};
  write_file(fs::path(out_dir) / "summary.json", summary.dump(2) + "\n");
  std::cout << summary.dump(2) << "\n";
  return 0;
}

int cmd_figure1(std::uint64_t seed, double noise, bool printed_psi, const std::string& out_dir) {
  RecoveryConfig cfg = figure1_config(seed, noise, printed_psi);
  const CoeffSeq truth = random_coeffs(-3, 5, -1.0, 1.0, derive_seed(seed, 0xf1));
  const SampleSet samples = sample_signal(truth, cfg);
  const RecoveryResult res = recover_signal(samples, cfg);
  const EquivResult eq = dist_up_to_equiv(truth, res.coeffs);
  const ErrorReport errors = verify_recovery(truth, res.coeffs);

  // plot series on a 2048-point grid in physical coordinates
  const double period = cfg.period;
  const int L = cfg.generator.support_length();
  const double t0 = period * truth.k_minus();
  const double t1 = period * (truth.k_plus() + L);
  std::ostringstream re_csv, im_csv;
  re_csv << "x,re_f,re_frec\n";
  im_csv << "x,im_f,im_frec\n";
  for (int i = 0; i < 2048; ++i) {
    const double t = t0 + (t1 - t0) * i / 2047.0;
    const cplx f = eval_signal(truth, cfg.generator, t / period);
    const cplx fr = eval_signal(eq.aligned, cfg.generator, t / period);
    re_csv << fmt(t) << "," << fmt(f.real()) << "," << fmt(fr.real()) << "\n";
    im_csv << fmt(t) << "," << fmt(f.imag()) << "," << fmt(fr.imag()) << "\n";
  }
  write_file(fs::path(out_dir) / "figure1_re.csv", re_csv.str());
  write_file(fs::path(out_dir) / "figure1_im.csv", im_csv.str());
  json rep = {{"seed", seed},
              {"noise", noise},
              {"printed_psi", printed_psi},
              {"errors", errors.to_json()},
              {"truth", truth.to_json()},
              {"recovered", res.coeffs.to_json()}};
  write_file(fs::path(out_dir) / "figure1_report.json", rep.dump(2) + "\n");
  std::cout << errors.to_json().dump(2) << "\n";
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"conjugate phase retrieval of spline signals from phaseless Hermite samples"};
  app.require_subcommand(1);

  std::string spec_path, out_dir, samples_path, truth_path, gen_name = "bspline:3";
  std::uint64_t seed = 1;
  double noise = -1.0;
  std::string pathway;
  bool verbose = false, printed_psi = false;
  int order = 3, trials = 1000, restarts = 40, jobs = 8;

  app.add_flag("--verbose", verbose, "chatty progress output");

  auto* analyze = app.add_subcommand("analyze", "spanning-dimension report for a generator");
  analyze->add_option("--generator", gen_name, "bspline:<N>, phi1, fig1, fig1-printed");
  analyze->add_option("--out", out_dir, "output directory");

  auto* frame = app.add_subcommand("frame-check", "Vandermonde frame report");
  frame->add_option("--order", order, "polynomial order N >= 3");
  frame->add_option("--trials", trials, "Monte-Carlo certification trials");
  frame->add_option("--restarts", restarts, "falsifier restarts");
  frame->add_option("--seed", seed, "RNG seed");
  frame->add_option("--out", out_dir, "output directory");

  auto* sample = app.add_subcommand("sample", "draw a signal and write phaseless samples");
  sample->add_option("--spec", spec_path, "experiment spec JSON")->required();
  sample->add_option("--out", out_dir, "output directory")->required();
  sample->add_option("--seed", seed, "override the spec seed");
  sample->add_option("--noise", noise, "override the spec noise level");
  sample->add_option("--pathway", pathway, "override the spec pathway");

  auto* recover = app.add_subcommand("recover", "recover coefficients from a sample file");
  recover->add_option("--samples", samples_path, "samples.json from `sample`")->required();
  recover->add_option("--truth", truth_path, "optional truth.json for an error report");
  recover->add_option("--out", out_dir, "output directory")->required();

  auto* experiment = app.add_subcommand("experiment", "seeded multi-trial benchmark");
  experiment->add_option("--spec", spec_path, "experiment spec JSON")->required();
  experiment->add_option("--out", out_dir, "output directory")->required();
  experiment->add_option("--seed", seed, "override the spec seed");
  experiment->add_option("--noise", noise, "override the spec noise level");
  experiment->add_option("--pathway", pathway, "override the spec pathway");
  experiment->add_option("--jobs", jobs, "worker threads");

  auto* figure1 = app.add_subcommand("figure1", "single-draw reconstruction experiment");
  figure1->add_option("--seed", seed, "RNG seed");
  figure1->add_option("--noise", noise, "noise level (default 1e-5)");
  figure1->add_flag("--printed-psi", printed_psi, "use the non-differentiable printed generator");
  figure1->add_option("--out", out_dir, "output directory")->required();

  try {
    app.parse(argc, argv);
  } catch (const CLI::ParseError& e) {
    const int code = app.exit(e);
    return code == 0 ? 0 : 3;
  }

  try {
    auto spec_with_overrides = [&]() {
      ExperimentSpec s = parse_spec(load_json(spec_path));
      for (const CLI::App* cmd : {sample, experiment}) {
        if (!cmd->parsed()) continue;
        if (cmd->count("--seed")) s.seed = seed;
        if (cmd->count("--noise")) s.noise = noise;
        if (cmd->count("--pathway")) {
          if (pathway == "hermite")
            s.pathway = Pathway::hermite;
          else if (pathway == "gram")
            s.pathway = Pathway::gram;
          else
            spec_fail("pathway must be \"hermite\" or \"gram\"");
        }
      }
      return s;
    };
    if (analyze->parsed()) return cmd_analyze(gen_name, out_dir);
    if (frame->parsed()) return cmd_frame_check(order, trials, restarts, seed, out_dir);
    if (sample->parsed()) return cmd_sample(spec_with_overrides(), out_dir);
    if (recover->parsed()) return cmd_recover(samples_path, truth_path, out_dir);
    if (experiment->parsed()) return cmd_experiment(spec_with_overrides(), out_dir, jobs);
    if (figure1->parsed())
      return cmd_figure1(seed, noise < 0.0 ? 1e-5 : noise, printed_psi, out_dir);
  } catch (const SpecError& e) {
    std::cerr << "spec error: " << e.what() << "\n";
    return 3;
  } catch (const RecoveryError& e) {
    std::cerr << "recovery error: " << e.what() << "\n";
    return 2;
  }
  return 0;
}
