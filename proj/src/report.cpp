#include "levicore/report.hpp"

namespace levicore {

json to_json(const Eigen::VectorXd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) a.push_back(v(i));
  return a;
}

json to_json(const Eigen::VectorXcd& v) {
  json a = json::array();
  for (int i = 0; i < v.size(); ++i) {
    a.push_back(v(i).real());
    a.push_back(v(i).imag());
  }
  return a;
}

json to_json(const Eigen::MatrixXcd& m) {
  json j;
  j["rows"] = m.rows();
  j["cols"] = m.cols();
  json data = json::array();
  for (int r = 0; r < m.rows(); ++r)
    for (int c = 0; c < m.cols(); ++c) {
      data.push_back(m(r, c).real());
      data.push_back(m(r, c).imag());
    }
  j["data"] = data;
  return j;
}

json to_json(const SampledDistribution& d) {
  json j;
  j["schema"] = kSchemaVersion;
  j["kind"] = d.complexKind ? "complex" : "real";
  j["pointDim"] = d.pointDim;
  j["fiberDim"] = d.fiberDim;
  j["sourceTol"] = d.sourceTol;
  j["iteration"] = d.iteration;
  json samples = json::array();
  for (const auto& s : d.samples) {
    json e;
    e["point"] = to_json(s.x);
    e["fiber"] = to_json(s.fiber);
    samples.push_back(e);
  }
  j["samples"] = samples;
  return j;
}

SampledDistribution distribution_from_json(const json& j) {
  SampledDistribution d;
  d.complexKind = j.at("kind") == "complex";
  d.pointDim = j.at("pointDim");
  d.fiberDim = j.at("fiberDim");
  d.sourceTol = j.at("sourceTol");
  d.iteration = j.at("iteration");
  for (const auto& e : j.at("samples")) {
    SampledDistribution::Sample s;
    const auto& pt = e.at("point");
    s.x.resize(pt.size());
    for (std::size_t i = 0; i < pt.size(); ++i) s.x((int)i) = pt[i];
    const auto& fm = e.at("fiber");
    const int rows = fm.at("rows"), cols = fm.at("cols");
    s.fiber.resize(rows, cols);
    const auto& data = fm.at("data");
    for (int r = 0; r < rows; ++r)
      for (int c = 0; c < cols; ++c) {
        const int k = 2 * (r * cols + c);
        s.fiber(r, c) = cplx(data[k], data[k + 1]);
      }
    d.samples.push_back(std::move(s));
  }
  return d;
}

json to_json(const PseudoconvexityReport& r) {
  json j;
  j["minEigenvalue"] = r.minEigenvalue;
  j["violations"] = r.violations;
  j["tolerance"] = r.tolerance;
  return j;
}

json to_json(const NormEstimate& e) {
  json j;
  j["value"] = std::isinf(e.value) ? json("inf") : json(e.value);
  j["upperBound"] = true;
  j["coeff"] = to_json(e.coeff);
  j["basisId"] = e.basisId;
  j["K"] = std::isinf(e.K) ? json("inf") : json(e.K);
  j["seed"] = e.seed;
  j["evals"] = e.evals;
  j["worstPoint"] = e.worstPoint;
  j["sizeAtOpt"] = e.sizeAtOpt;
  j["allInfeasible"] = e.allInfeasible;
  json pp = json::array();
  for (double v : e.perPointRatio) pp.push_back(std::isinf(v) ? json("inf") : json(v));
  j["perPointRatio"] = pp;
  return j;
}

json to_json(const DfScanResult& r) {
  json j;
  j["deltaStar"] = r.deltaStar;
  j["coeff"] = to_json(r.coeff);
  json curve = json::array();
  for (auto [d, v] : r.defectCurve) curve.push_back(json::array({d, v}));
  j["defectCurve"] = curve;
  return j;
}

namespace {
json finite_or_inf(double v) { return std::isfinite(v) ? json(v) : json("inf"); }
}  // namespace

json to_json(const ReductionReport& r) {
  json j;
  j["nullSmall"] = finite_or_inf(r.nullSmall);
  j["coreSmall"] = finite_or_inf(r.coreSmall);
  j["nullLarge"] = finite_or_inf(r.nullLarge);
  j["coreLarge"] = finite_or_inf(r.coreLarge);
  j["gapSmall"] = finite_or_inf(r.gapSmall);
  j["gapLarge"] = finite_or_inf(r.gapLarge);
  j["monotoneOk"] = r.monotoneOk;
  j["gapNonIncreasing"] = r.gapNonIncreasing;
  return j;
}

json to_json(const ConsistencyReport& r) {
  json j;
  j["resGaugeShift"] = r.resGaugeShift;
  j["resClosedness"] = r.resClosedness;
  j["resHermitian"] = r.resHermitian;
  j["checked"] = r.checked;
  j["skipped"] = r.skipped;
  return j;
}

json to_json(const OracleResult& r) {
  json j;
  j["value"] = std::isinf(r.value) ? json("inf") : json(r.value);
  j["feasible"] = r.feasible;
  j["bisections"] = r.bisections;
  return j;
}

json to_json(const AppendixNorms& r) {
  json j;
  j["l1"] = r.l1;
  j["linf"] = r.linf;
  j["ratio"] = r.ratio;
  j["evals"] = r.evals;
  return j;
}

}  // namespace levicore
