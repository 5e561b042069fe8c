#pragma once

#include <optional>
#include <string>
#include <utility>
#include <vector>

#include "fsys/bvp.hpp"

namespace fsys {

/// Serializable summary of one problem analysis.  predicted dims are
/// recomputable from the stored inertias, so a report is self-checking.
struct AnalysisReport {
    std::string problem_id;
    bool f1_ok = false;
    double f1_max_defect = 0.0;
    double mu0 = 0.0;            ///< half the sampled minimum of the symmetric part
    double mu0_certified = 0.0;  ///< Lipschitz-corrected certified bound
    bool f2_ok = false;
    Inertia inertia_a;
    Inertia inertia_b;
    KernelDims predicted;
    std::optional<KernelDims> measured;
    int graph_codim = 0;

    struct FormSample {
        std::string trace;
        std::complex<double> value;
    };
    std::vector<std::string> bc_summary;
    std::vector<FormSample> form_samples;
    std::vector<std::pair<std::string, double>> timings_ms;
};

AnalysisReport analyze(const FriedrichsProblem& problem, int n_samples = 257);

/// Fixed key order, 17 significant digits; timings are opt-in because they
/// are the one non-reproducible field.
std::string report_to_json(const AnalysisReport& report, bool include_timings = false);

/// Names and documents of the problems compiled into the library.
const std::vector<std::pair<std::string, std::string>>& bundled_problems();
FriedrichsProblem load_bundled(const std::string& name);

struct VerifyLine {
    bool ok = false;
    std::string name;
    std::string detail;
};

/// Per-problem invariant suite used by the verify command; kernel dims are
/// measured on the given grid ladder.
std::vector<VerifyLine> verify_problem(const FriedrichsProblem& problem, const std::vector<int>& grids);

}  // namespace fsys
