// Command-line front end: certify, oracle, eval, gen, selftest.
//
// Exit codes: 0 Generic, 10 OnVariety, 20 Indeterminate, 1 input error,
// 2 generation failure.  selftest exits 0 when every criterion passes.

#include <cmath>
#include <fstream>
#include <iostream>
#include <iterator>
#include <optional>
#include <sstream>
#include <string>
#include <vector>

#include <CLI11.hpp>
#include <json.hpp>

#include "tuplevar/acceptance.hpp"
#include "tuplevar/certifier.hpp"
#include "tuplevar/document.hpp"
#include "tuplevar/error.hpp"
#include "tuplevar/generators.hpp"
#include "tuplevar/oracle.hpp"
#include "tuplevar/spectral.hpp"

namespace {

using nlohmann::json;
using namespace tuplevar;

constexpr int kExitGeneric = 0;
constexpr int kExitInput = 1;
constexpr int kExitGeneration = 2;
constexpr int kExitOnVariety = 10;
constexpr int kExitIndeterminate = 20;

// Relative size below which a computed P or D is reported as numerically zero.
constexpr double kNumericalZero = 1e-8;

struct Common {
    std::string input = "-";
    std::uint64_t seed = CertifyConfig{}.seed.value;
    double drop = CertifyConfig{}.drop;
    double margin = CertifyConfig{}.margin;
    double gap_tol = CertifyConfig{}.gap_tol;
    std::size_t size_cap = kDefaultSizeCap;
};

void add_common(CLI::App* cmd, Common& c, bool with_input = true) {
    if (with_input)
        cmd->add_option("--input", c.input, "Tuple document (JSON); '-' reads stdin")->envname("TUPLEVAR_INPUT");
    cmd->add_option("--seed", c.seed, "Seed for every randomized step")->envname("TUPLEVAR_SEED");
    cmd->add_option("--tolerance-drop", c.drop, "OnVariety when residual < scale - drop")
        ->envname("TUPLEVAR_TOLERANCE_DROP");
    cmd->add_option("--tolerance-margin", c.margin, "Generic when residual > scale - margin")
        ->envname("TUPLEVAR_TOLERANCE_MARGIN");
    cmd->add_option("--gap-tol", c.gap_tol, "Smallest eigenvalue gap treated as distinct")
        ->envname("TUPLEVAR_GAP_TOL");
    cmd->add_option("--size-cap", c.size_cap, "Refuse tensor dimensions above this")->envname("TUPLEVAR_SIZE_CAP");
}

TupleDocument read_document(const std::string& path) {
    std::string text;
    if (path == "-") {
        text.assign(std::istreambuf_iterator<char>(std::cin), std::istreambuf_iterator<char>());
    } else {
        std::ifstream in(path);
        if (!in) throw Error(ErrorKind::InvalidDocument, "cannot open " + path);
        text.assign(std::istreambuf_iterator<char>(in), std::istreambuf_iterator<char>());
    }
    return parse_document(text);
}

json number(double x) {
    if (std::isfinite(x)) return x;
    if (std::isnan(x)) return nullptr;
    return x > 0 ? "inf" : "-inf";
}

json log_value(const LogComplex& v, bool numerically_zero) {
    json j;
    j["zero"] = v.is_zero || numerically_zero;
    j["exact_zero"] = v.is_zero;
    if (!v.is_zero) {
        j["log10_mag"] = number(v.log10_mag());
        j["phase"] = number(v.phase);
    }
    return j;
}

json choice_json(const std::vector<Subset>& choice) {
    json out = json::array();
    for (const auto& s : choice) {
        json one = json::array();
        for (int x : s) one.push_back(x + 1);
        out.push_back(one);
    }
    return out;
}

std::vector<int> parse_list(const std::string& text) {
    std::vector<int> out;
    std::stringstream ss(text);
    std::string item;
    while (std::getline(ss, item, ',')) {
        try {
            std::size_t used = 0;
            out.push_back(std::stoi(item, &used));
            if (used != item.size()) throw std::invalid_argument(item);
        } catch (const std::exception&) {
            throw Error(ErrorKind::InvalidPartition, "expected a comma-separated integer list, got '" + text + "'");
        }
    }
    return out;
}

CertifyConfig certify_config(const Common& c) {
    CertifyConfig cfg;
    cfg.drop = c.drop;
    cfg.margin = c.margin;
    cfg.gap_tol = c.gap_tol;
    cfg.seed = Seed{c.seed};
    cfg.size_cap = c.size_cap;
    return cfg;
}

void emit(const json& j) { std::cout << j.dump(2) << std::endl; }

int run_certify(const Common& c) {
    const TupleDocument doc = read_document(c.input);
    const CertifyConfig cfg = certify_config(c);
    const Verdict v = certify_membership(doc.tuple, cfg);
    json j;
    j["command"] = "certify";
    j["partition"] = doc.tuple.partition().to_string();
    j["verdict"] = to_string(v.status);
    j["residual"] = number(v.residual);
    j["scale"] = number(v.scale);
    j["denom_margin"] = number(v.denom_margin);
    j["log_abs_phat"] = number(v.log_abs_phat);
    j["eigen_gaps"] = json::array();
    for (double g : v.eigen_gaps) j["eigen_gaps"].push_back(number(g));
    j["notes"] = v.notes;
    j["seed"] = c.seed;
    j["thresholds"] = {{"drop", cfg.drop}, {"margin", cfg.margin}, {"gap_tol", cfg.gap_tol}};
    emit(j);
    switch (v.status) {
        case VerdictStatus::OnVariety: return kExitOnVariety;
        case VerdictStatus::Generic: return kExitGeneric;
        case VerdictStatus::Indeterminate: return kExitIndeterminate;
    }
    return kExitIndeterminate;
}

int run_oracle(const Common& c) {
    const TupleDocument doc = read_document(c.input);
    json j;
    j["command"] = "oracle";
    j["partition"] = doc.tuple.partition().to_string();
    try {
        const OracleResult r = oracle_detect(doc.tuple, c.gap_tol);
        const bool dependent = r.min_sigma < kOracleSigmaThreshold;
        j["min_sigma"] = r.min_sigma;
        j["witness"] = {{"choice", choice_json(r.witness.choice)}, {"sigma_min", r.witness.sigma_min}};
        j["dependent"] = dependent;
        emit(j);
        return dependent ? kExitOnVariety : kExitGeneric;
    } catch (const Error& e) {
        if (e.kind() != ErrorKind::NonDiagonalizable) throw;
        j["error"] = to_string(e.kind());
        j["message"] = std::string(e.what()) + "; the oracle abstains";
        emit(j);
        return kExitIndeterminate;
    }
}

int run_eval(const Common& c, const std::string& which, const std::string& sub_text, const std::string& route,
             const std::vector<int>& partition_only) {
    json j;
    j["command"] = "eval";
    j["which"] = which;
    if (which == "degrees" && !partition_only.empty()) {
        int n = 0;
        for (int k : partition_only) n += k;
        const Partition p(n, partition_only);
        j["partition"] = p.to_string();
        j["per_matrix"] = json::array();
        for (int i = 0; i < p.length(); ++i) j["per_matrix"].push_back(hatP_degree(p, i));
        j["total"] = hatP_total_degree(p);
        emit(j);
        return kExitGeneric;
    }

    const TupleDocument doc = read_document(c.input);
    const MatrixTuple& t = doc.tuple;
    const Partition& p = t.partition();
    j["partition"] = p.to_string();
    EvalOptions opts;
    opts.size_cap = c.size_cap;
    opts.gap_tol = c.gap_tol;
    if (route == "spectral") {
        opts.route = PRoute::Spectral;
    } else if (route == "explicit") {
        opts.krylov = KrylovMethod::Explicit;
    }
    j["route"] = route;

    if (which == "degrees") {
        j["per_matrix"] = json::array();
        for (int i = 0; i < p.length(); ++i) j["per_matrix"].push_back(hatP_degree(p, i));
        j["total"] = hatP_total_degree(p);
    } else if (which == "P") {
        const Evaluator ev(p, opts);
        const LogComplex v = ev.P(t);
        const ComplexMatrix a = kronecker_sum_operator(t, opts.size_cap);
        const int dim = krylov_dimension(a, ev.covector(), kNumericalZero);
        const auto big_n = static_cast<int>(p.dimension());
        j["P"] = log_value(v, dim < big_n);
        j["krylov_dimension"] = dim;
        j["N"] = big_n;
    } else if (which == "D") {
        const auto spectra = spectra_of(t);
        const double log_scale = std::log(eigenvalue_scale(spectra));
        std::vector<SubPartition> subs;
        if (!sub_text.empty()) {
            SubPartition s{parse_list(sub_text)};
            check_sub_partition(p, s);
            subs.push_back(std::move(s));
        } else {
            subs = enumerate_sub_partitions(p);
        }
        j["D"] = json::array();
        for (const auto& s : subs) {
            const DValue d = eval_D(spectra, p, s);
            const bool tiny = std::isfinite(d.min_log_factor) && d.min_log_factor - log_scale < std::log(kNumericalZero);
            json e = log_value(d.value, tiny);
            e["sub_partition"] = s.to_string();
            e["exponent"] = exponent(p, s);
            e["pair_count"] = fg_pair_count(p, s);
            j["D"].push_back(std::move(e));
        }
    } else if (which == "Phat") {
        const PhatValue v = Evaluator(p, opts).Phat(t);
        j["Phat"] = log_value(v.value, false);
        j["P"] = log_value(v.p, false);
        j["denominator"] = log_value(v.denominator.value, false);
        j["denom_margin"] = number(v.denominator.margin);
        j["indeterminate"] = v.indeterminate;
        if (v.denominator.vanished) j["vanished_sub_partition"] = v.denominator.vanished->to_string();
        if (v.indeterminate) j["note"] = "0/0 at a D-locus; retry with a small random perturbation";
    }
    emit(j);
    return kExitGeneric;
}

int run_gen(const std::string& kind, const std::optional<int>& n_opt, const std::string& partition_text,
            const std::string& sub_text, bool diagonal, const Common& c) {
    const std::vector<int> parts = parse_list(partition_text);
    int sum = 0;
    for (int k : parts) sum += k;
    const Partition p(n_opt.value_or(sum), parts);
    const Seed seed{c.seed};
    TupleDocument doc{random_tuple(p, seed), c.seed, std::nullopt};
    if (kind == "random") {
        doc.description = "random unit-norm tuple " + p.to_string();
    } else if (kind == "on-variety") {
        const PlantedTuple planted = on_variety_tuple(p, seed, c.gap_tol);
        doc.tuple = planted.tuple;
        doc.description = "planted non-spanning invariant subspaces " + p.to_string() + " choice " +
                          choice_json(planted.planted.choice).dump();
    } else {
        if (sub_text.empty()) throw Error(ErrorKind::InvalidPartition, "collision requires --sub-partition");
        const SubPartition s{parse_list(sub_text)};
        doc.tuple = single_collision_tuple(p, s, seed, CollisionOptions{!diagonal});
        doc.description = "single collision at sub-partition " + s.to_string() + " " + p.to_string();
    }
    std::cout << serialize_document(doc) << std::endl;
    return kExitGeneric;
}

int run_selftest(int max_n, int samples, const Common& c) {
    AcceptanceOptions o;
    o.max_n = max_n;
    o.samples = samples;
    o.seed = Seed{c.seed};
    bool all = true;
    run_acceptance(o, [&](const CriterionResult& r) {
        std::cout << format_result(r) << std::endl;
        all = all && r.passed;
    });
    std::cout << (all ? "all criteria passed" : "some criteria FAILED") << " (seed " << c.seed << ")" << std::endl;
    return all ? 0 : 1;
}

}  // namespace

int main(int argc, char** argv) {
    CLI::App app{"Invariant-subspace variety certifier"};
    app.require_subcommand(1);

    Common certify_c, oracle_c, eval_c, gen_c, self_c;
    self_c.seed = AcceptanceOptions{}.seed.value;
    gen_c.seed = 0;

    auto* certify = app.add_subcommand("certify", "Decide whether a tuple lies on the variety");
    add_common(certify, certify_c);

    auto* oracle = app.add_subcommand("oracle", "Brute-force search for dependent invariant subspaces");
    add_common(oracle, oracle_c);

    auto* eval = app.add_subcommand("eval", "Print P, D factors, P-hat or the degrees");
    add_common(eval, eval_c);
    std::string which = "P", sub_text, route = "krylov", eval_partition;
    eval->add_option("--which", which, "P | D | Phat | degrees")
        ->check(CLI::IsMember({"P", "D", "Phat", "degrees"}));
    eval->add_option("--sub-partition", sub_text, "k' as comma-separated integers (D only)");
    eval->add_option("--route", route, "krylov | explicit | spectral")
        ->check(CLI::IsMember({"krylov", "explicit", "spectral"}));
    eval->add_option("--partition", eval_partition, "With --which degrees: use this partition instead of a document");

    auto* gen = app.add_subcommand("gen", "Emit a generated tuple document");
    add_common(gen, gen_c, false);
    std::string kind;
    std::optional<int> gen_n;
    std::string gen_partition, gen_sub;
    bool diagonal = false;
    gen->add_option("kind", kind, "random | on-variety | collision")
        ->required()
        ->check(CLI::IsMember({"random", "on-variety", "collision"}));
    gen->add_option("--n", gen_n, "Ambient dimension (defaults to the partition sum)");
    gen->add_option("--partition", gen_partition, "k_1,...,k_l")->required();
    gen->add_option("--sub-partition", gen_sub, "k'_1,...,k'_l (collision only)");
    gen->add_flag("--diagonal", diagonal, "Collision: skip the random similarity");

    auto* selftest = app.add_subcommand("selftest", "Run the acceptance criteria");
    add_common(selftest, self_c, false);
    int max_n = 3, samples = 50;
    selftest->add_option("--max-n", max_n, "Largest n exercised (2..4)");
    selftest->add_option("--samples", samples, "Tuples per partition in the zero-set check");

    try {
        app.parse(argc, argv);
    } catch (const CLI::ParseError& e) {
        return app.exit(e) == 0 ? 0 : kExitInput;
    }

    try {
        if (*certify) return run_certify(certify_c);
        if (*oracle) return run_oracle(oracle_c);
        if (*eval) return run_eval(eval_c, which, sub_text, route, eval_partition.empty() ? std::vector<int>{} : parse_list(eval_partition));
        if (*gen) return run_gen(kind, gen_n, gen_partition, gen_sub, diagonal, gen_c);
        if (*selftest) return run_selftest(max_n, samples, self_c);
    } catch (const Error& e) {
        std::cerr << "error (" << to_string(e.kind()) << "): " << e.what() << std::endl;
        if (e.kind() == ErrorKind::GenerationFailure) return kExitGeneration;
        if (e.kind() == ErrorKind::NonDiagonalizable || e.kind() == ErrorKind::NumericalFailure)
            return kExitIndeterminate;
        return kExitInput;
    }
    return kExitInput;
}
