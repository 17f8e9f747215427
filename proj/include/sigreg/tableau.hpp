#pragma once

#include "sigreg/pipeline.hpp"

#include <string>

namespace sigreg {

/// Signature tableau in the paper's layout: one row per equation, `*` marks
/// the HVT, `-` marks minus infinity, c_i on the right margin, d_j at the
/// bottom, Val in the corner.
std::string render_tableau(const DaeSystem& sys, const SignatureMatrix& sigma,
                           const Offsets* off);

/// Parse a rendered tableau back into entries and marked transversal
/// (round-trip check).
struct ParsedTableau {
    std::vector<std::vector<int>> s;
    std::vector<int> hvt;
};
ParsedTableau parse_tableau(const std::string& text);

std::string render_jacobian(const DaeSystem& sys, const SystemJacobian& J);
std::string render_scheme(const DaeSystem& sys, const SolutionScheme& sch);
std::string render_report(const DaeSystem& sys, const AnalysisReport& rep);

} // namespace sigreg
