#pragma once

#include <json.hpp>
#include <optional>
#include <string>

#include "moran/boundary.hpp"
#include "moran/metric.hpp"
#include "moran/rearrange.hpp"
#include "moran/spec.hpp"
#include "moran/tree.hpp"

namespace moran {

inline constexpr const char* kToolVersion = "1.0.0";
inline constexpr int kSchemaVersion = 1;

// FNV-1a fingerprint of a file's bytes, as a 16-digit hex string. Used to tie
// a report to the exact spec file it was produced from; not cryptographic.
std::string file_fingerprint(const std::string& path);

// Canonical serialization: sorted keys, two-space indent, trailing newline.
// Every report goes through this so byte-compares are meaningful.
std::string dump_report(const nlohmann::json& j);

nlohmann::json half_int_json(const HalfInt& h);

nlohmann::json validate_report(const ValidationReport& rep, int depth);
nlohmann::json build_report(const AugTree& tree);
nlohmann::json components_report(const AugTree& tree, bool members);
nlohmann::json geodesic_report(const AugTree& tree, VertexRef x, VertexRef y,
                               std::optional<double> a);
nlohmann::json diagnose_report(const DiagnoseReport& rep);
nlohmann::json rearrange_report(const AugTree& tree, const RearrangeVerdict& v, int plan_levels);
nlohmann::json sigma_report(const AugTree& tree, const SigmaMap& sigma, const DeviationStats& dev,
                            bool full_map);
nlohmann::json map_report(const Ray& ray, const BoundaryPointApprox& pt);
nlohmann::json distortion_json(const DistortionStats& st);

}  // namespace moran
