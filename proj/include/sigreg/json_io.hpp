#pragma once

#include "sigreg/pipeline.hpp"

#include <json.hpp>

namespace sigreg {

using json = nlohmann::ordered_json;

json sigma_to_json(const DaeSystem& sys, const SignatureMatrix& sigma,
                   const Offsets* off);
json system_to_json(const DaeSystem& sys);
json jacobian_to_json(const DaeSystem& sys, const SystemJacobian& J);
json report_to_json(const DaeSystem& sys, const AnalysisReport& rep);
json scheme_to_json(const DaeSystem& sys, const SolutionScheme& sch);
json check_to_json(const DaeSystem& sys, const SuccessCheck& chk);

} // namespace sigreg
