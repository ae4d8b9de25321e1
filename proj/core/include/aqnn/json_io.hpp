#pragma once

#include <span>
#include <string>

#include "aqnn/cpwl.hpp"
#include "aqnn/mesh.hpp"
#include "aqnn/net.hpp"

namespace aqnn {

// Pretty-printed JSON documents. Infinite tangent abscissae are omitted.
std::string to_json(const CpwlFunction& f);
std::string to_json(const AdaptedMesh& mesh);
std::string to_json(const NetworkParams& params);

// Report of fits with increasing piece counts: per-fit distances and
// pieces, plus the log-log convergence slope when there are two or more.
std::string fit_report_json(const SmoothActivation& act, std::span<const CpwlFit> fits);

}  // namespace aqnn
