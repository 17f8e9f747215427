#pragma once

#include "sigreg/pipeline.hpp"

#include <string>
#include <vector>

namespace sigreg {

struct Expectation {
    std::string path;
    std::string mode = "analyze";  // analyze | regularize-lc | regularize-es | regularize-auto
    std::optional<long long> val;
    std::optional<int> index;
    std::optional<long long> dof;
    std::optional<std::string> verdict;
    std::optional<std::string> det;        // matched up to sign, parsed in context
    std::optional<int> iterations;         // conversion steps performed
    std::optional<std::string> val_trace;  // comma list of Val per iteration
    std::optional<int> dindex;             // known differentiation index (nu_S >= nu_d)
    std::vector<std::string> subst;        // declared substitutions, rel = 0
    std::optional<std::string> offsets_c;  // user offsets, comma lists
    std::optional<std::string> offsets_d;
    std::optional<int> pivot;              // 1-based first-step pivot
};

Expectation parse_expectation(const std::string& path);

struct CorpusEntry {
    std::string file;
    bool config_error = false;
    bool pass = false;
    std::string message;
};

struct CorpusSummary {
    std::vector<CorpusEntry> entries;
    int passed = 0;
    int failed = 0;
    int config_errors = 0;
};

/// Run every .dae file in a directory against its .exp sidecar (if present).
CorpusSummary corpus_run(const std::string& dir);

std::string render_corpus_summary(const CorpusSummary& s);

/// Evaluate one system against an expectation (used by corpus_run and tests).
CorpusEntry run_expectation(const std::string& dae_path, const Expectation& exp);

} // namespace sigreg
