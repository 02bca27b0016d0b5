#pragma once

#include <string>

#include <json.hpp>

#include "levicore/annulus.hpp"
#include "levicore/df_index.hpp"
#include "levicore/distributions.hpp"
#include "levicore/domains.hpp"

namespace levicore {

using json = nlohmann::ordered_json;

inline constexpr const char* kToolVersion = "0.1.0";
inline constexpr int kSchemaVersion = 1;

json to_json(const Eigen::VectorXd& v);
json to_json(const Eigen::VectorXcd& v);
/// complex matrices as row-major interleaved re/im, with shape
json to_json(const Eigen::MatrixXcd& m);

json to_json(const SampledDistribution& d);
SampledDistribution distribution_from_json(const json& j);

json to_json(const PseudoconvexityReport& r);
json to_json(const NormEstimate& e);
json to_json(const DfScanResult& r);
json to_json(const ReductionReport& r);
json to_json(const ConsistencyReport& r);
json to_json(const OracleResult& r);
json to_json(const AppendixNorms& r);

}  // namespace levicore
