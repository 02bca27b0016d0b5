// Batch front door: configure a domain, run the analyses, emit JSON reports.
//
// Exit codes: 0 success, 2 pseudoconvexity violation, 3 non-stabilized core,
// 1 any other error (structured JSON on stderr).

#include <CLI11.hpp>
#include <chrono>
#include <fstream>
#include <iostream>

#include "levicore/annulus.hpp"
#include "levicore/df_index.hpp"
#include "levicore/parallel.hpp"
#include "levicore/report.hpp"

using namespace levicore;

namespace {

struct RunConfig {
  std::string domain = "ball";
  std::map<std::string, double> params;
  std::string strategy = "grid";
  int samples = 200;
  std::uint64_t seed = 1;
  std::string basis;       // default chosen per domain
  std::string basisSmall;  // for the reduction check
  double K = std::numeric_limits<double>::infinity();
  double deltaMin = 0.02, deltaMax = 0.999, deltaRes = 1e-3;
  double collarEps = 0.0;  // 0: 0.1 * domain scale (worm: 0.05)
  int collarStrata = 4;
  double kernelRelTol = 1e-6;
  double angleTolDeg = 5.0;
  int maxIter = 12;
  int threads = 0;
  bool normalized = false;
  bool reduction = false;
  std::string out;
  std::string csv;  // optional grid/curve dump
  // oracle subcommand
  double beta = 1.0;
  double width = 1.0;
  int oracleM = 64;
  int laurentDeg = 8;
};

json config_echo(const RunConfig& c) {
  json j;
  j["domain"] = c.domain;
  j["params"] = c.params;
  j["strategy"] = c.strategy;
  j["samples"] = c.samples;
  j["seed"] = c.seed;
  j["basis"] = c.basis;
  j["basisSmall"] = c.basisSmall;
  j["K"] = std::isinf(c.K) ? json("inf") : json(c.K);
  j["deltaGrid"] = {{"min", c.deltaMin}, {"max", c.deltaMax}, {"res", c.deltaRes}};
  j["collar"] = {{"eps0", c.collarEps}, {"strata", c.collarStrata}};
  j["kernelRelTol"] = c.kernelRelTol;
  j["angleTolDeg"] = c.angleTolDeg;
  j["maxIter"] = c.maxIter;
  j["threads"] = c.threads;
  j["normalized"] = c.normalized;
  return j;
}

void load_config_file(const std::string& path, RunConfig& c) {
  std::ifstream in(path);
  if (!in) throw std::runtime_error("cannot open config file " + path);
  json j;
  in >> j;
  if (j.contains("domain")) c.domain = j["domain"];
  if (j.contains("params"))
    for (auto& [k, v] : j["params"].items()) c.params[k] = v;
  if (j.contains("strategy")) c.strategy = j["strategy"];
  if (j.contains("samples")) c.samples = j["samples"];
  if (j.contains("seed")) c.seed = j["seed"];
  if (j.contains("basis")) c.basis = j["basis"];
  if (j.contains("basisSmall")) c.basisSmall = j["basisSmall"];
  if (j.contains("K") && j["K"].is_number()) c.K = j["K"];
  if (j.contains("deltaGrid")) {
    auto& g = j["deltaGrid"];
    if (g.contains("min")) c.deltaMin = g["min"];
    if (g.contains("max")) c.deltaMax = g["max"];
    if (g.contains("res")) c.deltaRes = g["res"];
  }
  if (j.contains("collar")) {
    auto& g = j["collar"];
    if (g.contains("eps0")) c.collarEps = g["eps0"];
    if (g.contains("strata")) c.collarStrata = g["strata"];
  }
  if (j.contains("kernelRelTol")) c.kernelRelTol = j["kernelRelTol"];
  if (j.contains("angleTolDeg")) c.angleTolDeg = j["angleTolDeg"];
  if (j.contains("maxIter")) c.maxIter = j["maxIter"];
  if (j.contains("threads")) c.threads = j["threads"];
  if (j.contains("normalized")) c.normalized = j["normalized"];
  if (j.contains("out")) c.out = j["out"];
}

struct Timer {
  std::chrono::steady_clock::time_point t0 = std::chrono::steady_clock::now();
  double ms() const {
    return std::chrono::duration<double, std::milli>(std::chrono::steady_clock::now() - t0)
        .count();
  }
};

void emit(const json& j, const std::string& out) {
  if (out.empty()) {
    std::cout << j.dump(2) << "\n";
  } else {
    std::ofstream o(out);
    o << j.dump(2) << "\n";
  }
}

struct Prepared {
  ExampleDomain dom;
  std::vector<BoundaryPoint> sample;       // full sample (pseudoconvexity)
  std::vector<BoundaryPoint> nullSample;   // restricted to the analysis patch
  std::unique_ptr<GaugeBasis> basis, basisSmall;
  std::vector<Eigen::VectorXd> warmStarts;
  bool radialSeed = false;
  bool samplePartial = false;  // fewer projections than requested
  double tangentScale = 0.0;   // 0: engine default (3x median NN spacing)
};

SampleStrategy parse_strategy(const std::string& s) {
  if (s == "grid") return SampleStrategy::Grid;
  if (s == "random") return SampleStrategy::Random;
  if (s == "param") return SampleStrategy::Param;
  throw std::runtime_error("unknown strategy: " + s);
}

Prepared prepare(RunConfig& c) {
  Prepared p{make_domain(c.domain, c.params), {}, {}, nullptr, nullptr, {}, false};
  const auto& meta = p.dom.meta;

  if (c.strategy == "param" && !meta.weakLocus)
    throw std::runtime_error(c.domain + " has no parametrized stratum");
  BoundarySample base = sample_boundary(
      p.dom.f, parse_strategy(c.strategy), c.samples, c.seed,
      meta.weakLocus ? &meta.weakLocus : nullptr);
  p.sample = base.points;
  p.samplePartial = base.partial;
  // resolve the weak locus exactly: add parametrized points when available
  if (meta.weakLocus && c.strategy != "param") {
    BoundarySample extra =
        sample_boundary(p.dom.f, SampleStrategy::Param, std::min(c.samples, 96), c.seed,
                        &meta.weakLocus);
    for (auto& bp : extra.points) p.sample.push_back(std::move(bp));
  }
  for (const auto& bp : p.sample)
    if (!meta.analysisPatch || meta.analysisPatch(bp.p)) p.nullSample.push_back(bp);

  double rho1 = 0, rho2 = 0;
  if (meta.annulus) {
    rho1 = meta.annulus->rho1;
    rho2 = meta.annulus->rho2;
  }
  std::string spec = c.basis.empty() ? (meta.annulus ? "radial:20" : "poly:4") : c.basis;
  std::string specSmall = c.basisSmall.empty() ? (meta.annulus ? "radial:10" : "poly:2") : c.basisSmall;
  p.basis = make_basis(spec, p.dom.f.n, p.dom.f.scale, rho1, rho2);
  p.basisSmall = make_basis(specSmall, p.dom.f.n, p.dom.f.scale, rho1, rho2);
  c.basis = spec;
  c.basisSmall = specSmall;

  if (meta.annulus && spec.rfind("radial", 0) == 0) {
    // the tangent scale comes from the isotropic lattice before the graded
    // rings skew the global spacing statistics
    std::vector<Eigen::VectorXd> iso;
    for (const auto& bp : p.nullSample)
      if (std::abs(bp.p(1)) < 1e-8) iso.push_back(to_real(bp.p));
    if (iso.size() > 4) p.tangentScale = 3.0 * median_nn_spacing(iso);
    // the radial gauge family must not out-resolve the sampled annulus, or
    // the norm optimizer dodges between rings: add graded rings matched to
    // the basis size, plus the equality-profile warm start
    AnnulusProblem prob{rho1, rho2, meta.annulus->beta,
                        std::max(32, 2 * p.basis->count())};
    int ringIdx = 0;
    for (double rho : annulus_oracle_nodes(prob)) {
      for (int j = 0; j < 4; ++j) {
        const double th = 2.0 * M_PI * (j + 0.618 * ringIdx) / 4.0;
        Eigen::VectorXcd q(2);
        q << std::polar(std::exp(rho), th), 0.0;
        p.nullSample.push_back(project_to_boundary(p.dom.f, q));
      }
      ++ringIdx;
    }
    if (prob.beta > 0) {
      p.warmStarts.push_back(radial_equality_seed(prob, *p.basis, 1.05));
      if (specSmall.rfind("radial", 0) == 0)
        p.warmStarts.push_back(radial_equality_seed(prob, *p.basisSmall, 1.05));
      p.radialSeed = true;
    }
  }
  if (c.collarEps <= 0) c.collarEps = meta.annulus ? 0.05 : 0.1 * p.dom.f.scale;
  return p;
}

json null_summary(const SampledDistribution& d) {
  json j;
  j["samples"] = d.samples.size();
  j["supportSize"] = d.support_size();
  std::map<int, int> dims;
  for (const auto& s : d.samples)
    if (s.fiber.cols() > 0) dims[(int)s.fiber.cols()]++;
  json hist = json::object();
  for (auto [k, v] : dims) hist[std::to_string(k)] = v;
  j["fiberDims"] = hist;
  return j;
}

int cmd_analyze(RunConfig c) {
  Timer wall;
  Prepared p = prepare(c);
  json rep;
  rep["schema"] = kSchemaVersion;
  rep["tool"] = {{"name", "levicore"}, {"version", kToolVersion}};
  rep["config"] = config_echo(c);
  rep["radialSeed"] = p.radialSeed;
  rep["samplePartial"] = p.samplePartial;
  rep["sampleSize"] = p.sample.size();

  Timer tPsc;
  PseudoconvexityReport psc = pseudoconvexity_report(p.dom.f, p.sample);
  rep["pseudoconvexity"] = to_json(psc);
  const double tPscMs = tPsc.ms();
  if (!psc.violations.empty()) {
    rep["error"] = "pseudoconvexity violation";
    emit(rep, c.out);
    return 2;
  }

  SampledDistribution nullDist = levi_null(p.dom.f, p.nullSample, c.kernelRelTol);
  rep["nullDistribution"] = null_summary(nullDist);

  DerivedOptions dopt;
  dopt.angleTolDeg = c.angleTolDeg;
  dopt.scale = p.tangentScale;
  CoreResult core = iterate_to_core(nullDist, c.maxIter, dopt);
  json coreJ = null_summary(core.core);
  coreJ["k"] = core.k;
  coreJ["stabilized"] = core.stabilized;
  coreJ["supportSizes"] = core.supportSizes;
  rep["core"] = coreJ;
  if (!core.stabilized) {
    rep["error"] = "core did not stabilize within maxIter";
    emit(rep, c.out);
    return 3;
  }

  OptBudget budget;
  Timer tNorm;
  RouteB routeB = df_via_norm(p.dom.f, core.core, *p.basis, c.K, budget, c.seed, p.warmStarts);
  const double tNormMs = tNorm.ms();
  rep["norm"] = to_json(routeB.est);

  if (c.reduction) {
    rep["reduction"] =
        to_json(reduction_check(p.dom.f, nullDist, core.core, *p.basisSmall, *p.basis, c.K,
                                budget, c.seed, p.warmStarts));
  }

  Timer tScan;
  CollarGrid grid = build_collar(p.dom.f, p.nullSample, c.collarEps, c.collarStrata);
  DfScanOptions sopt;
  sopt.deltaMin = c.deltaMin;
  sopt.deltaMax = c.deltaMax;
  sopt.deltaRes = c.deltaRes;
  std::vector<Eigen::VectorXd> scanStarts = p.warmStarts;
  if (routeB.est.coeff.size()) scanStarts.push_back(routeB.est.coeff);
  DfScanResult routeA = df_scan(p.dom.f, grid, sopt, p.basis.get(), c.seed, scanStarts);
  const double tScanMs = tScan.ms();

  json dfJ;
  dfJ["routeA"] = to_json(routeA);
  dfJ["routeB"] = {{"nEstimate", to_json(routeB.est)["value"]}, {"df", routeB.df}};
  dfJ["agreementGap"] =
      routeB.df > 0 ? std::abs(routeA.deltaStar - routeB.df) / routeB.df : 0.0;
  dfJ["gridSpec"] = {{"points", grid.pts.size()}, {"eps0", grid.eps0}, {"strata", grid.strata}};
  rep["df"] = dfJ;

  if (!c.csv.empty()) {  // defect curve as CSV for plotting pipelines
    std::ofstream csvOut(c.csv);
    csvOut << "delta,defect\n";
    for (auto [d, v] : routeA.defectCurve) csvOut << d << "," << v << "\n";
  }

  Eigen::VectorXd fSmall = Eigen::VectorXd::Zero(p.basis->count());
  if (fSmall.size()) fSmall(0) = 0.1;
  rep["consistency"] = to_json(consistency_suite(p.dom.f, *p.basis, fSmall, core.core));

  json lemma = json::array();
  int done = 0;
  for (const auto& s : core.core.samples) {
    if (s.fiber.cols() == 0 || done >= 8) continue;
    BoundaryPoint bp = project_to_boundary(p.dom.f, to_complex(s.x));
    lemma.push_back(key_lemma_check(p.dom.f, bp, s.fiber.col(0)));
    ++done;
  }
  rep["keyLemmaResiduals"] = lemma;

  rep["timingsMs"] = c.normalized
                         ? json({{"pseudoconvexity", 0}, {"norm", 0}, {"dfScan", 0}, {"wall", 0}})
                         : json({{"pseudoconvexity", tPscMs},
                                 {"norm", tNormMs},
                                 {"dfScan", tScanMs},
                                 {"wall", wall.ms()}});
  emit(rep, c.out);
  return 0;
}

int cmd_core(RunConfig c) {
  Prepared p = prepare(c);
  PseudoconvexityReport psc = pseudoconvexity_report(p.dom.f, p.sample);
  if (!psc.violations.empty()) {
    emit(json{{"error", "pseudoconvexity violation"}, {"pseudoconvexity", to_json(psc)}}, c.out);
    return 2;
  }
  SampledDistribution nullDist = levi_null(p.dom.f, p.nullSample, c.kernelRelTol);
  DerivedOptions dopt;
  dopt.angleTolDeg = c.angleTolDeg;
  dopt.scale = p.tangentScale;
  CoreResult core = iterate_to_core(nullDist, c.maxIter, dopt);
  json j;
  j["schema"] = kSchemaVersion;
  j["config"] = config_echo(c);
  j["null"] = null_summary(nullDist);
  j["k"] = core.k;
  j["stabilized"] = core.stabilized;
  j["core"] = to_json(core.core);
  emit(j, c.out);
  return core.stabilized ? 0 : 3;
}

int cmd_norm(RunConfig c) {
  Prepared p = prepare(c);
  SampledDistribution nullDist = levi_null(p.dom.f, p.nullSample, c.kernelRelTol);
  DerivedOptions dopt;
  dopt.angleTolDeg = c.angleTolDeg;
  dopt.scale = p.tangentScale;
  CoreResult core = iterate_to_core(nullDist, c.maxIter, dopt);
  if (!core.stabilized) return 3;
  OptBudget budget;
  NormEstimate est = optimize_n(p.dom.f, core.core, *p.basis, c.K, budget, c.seed, p.warmStarts);
  json j;
  j["schema"] = kSchemaVersion;
  j["config"] = config_echo(c);
  j["radialSeed"] = p.radialSeed;
  j["norm"] = to_json(est);
  emit(j, c.out);
  return 0;
}

int cmd_df_scan(RunConfig c) {
  Prepared p = prepare(c);
  CollarGrid grid = build_collar(p.dom.f, p.nullSample, c.collarEps, c.collarStrata);
  DfScanOptions sopt;
  sopt.deltaMin = c.deltaMin;
  sopt.deltaMax = c.deltaMax;
  sopt.deltaRes = c.deltaRes;
  DfScanResult r = df_scan(p.dom.f, grid, sopt, p.basis.get(), c.seed, p.warmStarts);
  json j;
  j["schema"] = kSchemaVersion;
  j["config"] = config_echo(c);
  j["dfScan"] = to_json(r);
  emit(j, c.out);
  return 0;
}

int cmd_oracle(RunConfig c) {
  json j;
  j["schema"] = kSchemaVersion;
  j["beta"] = c.beta;
  j["width"] = c.width;
  AnnulusProblem prob{-c.width / 2, c.width / 2, c.beta, c.oracleM};
  j["oracle"] = to_json(annulus_norm_oracle(prob));
  json conv = json::array();
  for (int m : {32, 64, 128}) {
    AnnulusProblem q = prob;
    q.m = m;
    conv.push_back(json::array({m, annulus_norm_oracle(q).value}));
  }
  j["convergence"] = conv;
  if (!c.csv.empty()) {
    std::ofstream csvOut(c.csv);
    csvOut << "m,value\n";
    for (const auto& row : conv) csvOut << row[0] << "," << row[1] << "\n";
  }
  j["appendixNorms"] = to_json(appendix_norms(prob, c.laurentDeg, 1500, c.seed));
  emit(j, c.out);
  return 0;
}

int cmd_examples(const RunConfig& c) {
  json j = json::array();
  for (const auto& n : registry_names())
    j.push_back(json{{"name", n}, {"schema", registry_schema(n)}});
  emit(j, c.out);
  return 0;
}

}  // namespace

int main(int argc, char** argv) {
  CLI::App app{"levicore: CR invariants of pseudoconvex domains"};
  app.require_subcommand(1);
  RunConfig cfg;
  std::string configFile;
  std::vector<std::string> paramKVs;

  auto addCommon = [&](CLI::App* sub) {
    sub->add_option("--config", configFile, "JSON config file (flags override)");
    sub->add_option("--domain", cfg.domain, "domain name");
    sub->add_option("--param", paramKVs, "domain parameter k=v (repeatable)");
    sub->add_option("--samples", cfg.samples, "boundary sample count");
    sub->add_option("--strategy", cfg.strategy, "grid|random|param");
    sub->add_option("--seed", cfg.seed, "RNG seed");
    sub->add_option("--basis", cfg.basis, "gauge basis spec, e.g. poly:4 or radial:20");
    sub->add_option("--basis-small", cfg.basisSmall, "smaller basis for the reduction check");
    sub->add_option("--K", cfg.K, "size bound for the norm optimization");
    sub->add_option("--delta-min", cfg.deltaMin, "");
    sub->add_option("--delta-max", cfg.deltaMax, "");
    sub->add_option("--delta-res", cfg.deltaRes, "");
    sub->add_option("--collar", cfg.collarEps, "collar depth eps0");
    sub->add_option("--collar-strata", cfg.collarStrata, "");
    sub->add_option("--kernel-rel-tol", cfg.kernelRelTol, "");
    sub->add_option("--angle-tol", cfg.angleTolDeg, "principal angle cutoff (degrees)");
    sub->add_option("--max-iter", cfg.maxIter, "derived-distribution iteration cap");
    sub->add_option("--threads", cfg.threads, "worker threads (0: all)");
    sub->add_flag("--normalized", cfg.normalized, "strip timings for byte-stable reports");
    sub->add_flag("--reduction", cfg.reduction, "run the two-basis reduction check");
    sub->add_option("--out", cfg.out, "output path (default stdout)");
    sub->add_option("--csv", cfg.csv, "CSV path for curve dumps (defect curve)");
  };

  auto* aAnalyze = app.add_subcommand("analyze", "full pipeline: sample, core, norms, DF routes");
  addCommon(aAnalyze);
  auto* aCore = app.add_subcommand("core", "null distribution and Levi core only");
  addCommon(aCore);
  auto* aNorm = app.add_subcommand("norm", "norm optimization on the core");
  addCommon(aNorm);
  auto* aScan = app.add_subcommand("df-scan", "direct plurisubharmonicity scan");
  addCommon(aScan);
  auto* aOracle = app.add_subcommand("oracle", "annulus radial oracle and appendix norms");
  aOracle->add_option("--beta", cfg.beta, "winding parameter");
  aOracle->add_option("--width", cfg.width, "annulus log-radius width");
  aOracle->add_option("--m", cfg.oracleM, "radial mesh size");
  aOracle->add_option("--laurent-deg", cfg.laurentDeg, "Laurent degree for appendix norms");
  aOracle->add_option("--seed", cfg.seed, "RNG seed");
  aOracle->add_option("--out", cfg.out, "output path");
  aOracle->add_option("--csv", cfg.csv, "CSV path for the convergence table");
  auto* aExamples = app.add_subcommand("examples", "list the domain registry");
  aExamples->add_option("--out", cfg.out, "output path");

  // config file loads first, flags then override on top
  for (int i = 1; i + 1 < argc; ++i)
    if (std::string(argv[i]) == "--config") {
      try {
        load_config_file(argv[i + 1], cfg);
      } catch (const std::exception& e) {
        std::cerr << json{{"error", e.what()}}.dump() << "\n";
        return 1;
      }
    }

  CLI11_PARSE(app, argc, argv);

  try {
    for (const auto& kv : paramKVs) {
      const auto eq = kv.find('=');
      if (eq == std::string::npos) throw std::runtime_error("bad --param " + kv);
      cfg.params[kv.substr(0, eq)] = std::stod(kv.substr(eq + 1));
    }
    par::set_threads(cfg.threads);

    if (aAnalyze->parsed()) return cmd_analyze(cfg);
    if (aCore->parsed()) return cmd_core(cfg);
    if (aNorm->parsed()) return cmd_norm(cfg);
    if (aScan->parsed()) return cmd_df_scan(cfg);
    if (aOracle->parsed()) return cmd_oracle(cfg);
    if (aExamples->parsed()) return cmd_examples(cfg);
  } catch (const std::exception& e) {
    std::cerr << json{{"error", e.what()}}.dump() << "\n";
    return 1;
  }
  return 0;
}
