#pragma once

#include <functional>
#include <string>
#include <vector>

#include "tuplevar/generators.hpp"
#include "tuplevar/multilinear.hpp"

namespace tuplevar {

struct AcceptanceOptions {
    /// Largest ambient dimension exercised (2..4).
    int max_n = 3;
    /// On-variety and random tuples per partition in the zero-set check.
    int samples = 50;
    Seed seed{20240601};
};

struct CriterionResult {
    int id = 0;
    std::string name;
    bool passed = false;
    std::string detail;
    double seconds = 0.0;
};

/// Every composition (ordered partition) of n.
std::vector<Partition> compositions(int n);

CriterionResult check_zero_set(const AcceptanceOptions& o);              // 1
CriterionResult check_kernel_deficiency(const AcceptanceOptions& o);     // 2
CriterionResult check_degrees(const AcceptanceOptions& o);               // 3
CriterionResult check_joint_homogeneity(const AcceptanceOptions& o);     // 4
CriterionResult check_kronecker_spectrum(const AcceptanceOptions& o);    // 5
CriterionResult check_covector_pairing(const AcceptanceOptions& o);      // 6
CriterionResult check_commutator_ratio(const AcceptanceOptions& o);      // 7
CriterionResult check_permutation_invariance(const AcceptanceOptions& o);  // 8
CriterionResult check_collision_uniqueness(const AcceptanceOptions& o);  // 9

/// Runs criteria 1..9 in order, calling `report` after each one.
std::vector<CriterionResult> run_acceptance(const AcceptanceOptions& o,
                                            const std::function<void(const CriterionResult&)>& report = {});

/// One line: "PASS [1] name (1.23 s): detail".
std::string format_result(const CriterionResult& r);

}  // namespace tuplevar
