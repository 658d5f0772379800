#include "tuplevar/document.hpp"

#include <cmath>

#include <json.hpp>

#include "tuplevar/error.hpp"

namespace tuplevar {

namespace {

using nlohmann::json;

[[noreturn]] void bad(const std::string& what) { throw Error(ErrorKind::InvalidDocument, what); }

double finite_number(const json& v, const std::string& where) {
    if (!v.is_number()) bad(where + ": expected a number");
    const double x = v.get<double>();
    if (!std::isfinite(x)) bad(where + ": non-finite entry");
    return x;
}

}  // namespace

TupleDocument parse_document(const std::string& text) {
    json j;
    try {
        j = json::parse(text);
    } catch (const json::parse_error& e) {
        bad("malformed JSON at byte " + std::to_string(e.byte) + ": " + e.what());
    }
    if (!j.is_object()) bad("document must be a JSON object");
    if (!j.contains("n") || !j["n"].is_number_integer()) bad("missing integer field \"n\"");
    if (!j.contains("partition") || !j["partition"].is_array()) bad("missing array field \"partition\"");
    if (!j.contains("matrices") || !j["matrices"].is_array()) bad("missing array field \"matrices\"");

    const int n = j["n"].get<int>();
    std::vector<int> parts;
    for (const auto& k : j["partition"]) {
        if (!k.is_number_integer()) bad("partition entries must be integers");
        parts.push_back(k.get<int>());
    }
    Partition p(n, std::move(parts));

    const auto& ms = j["matrices"];
    if (static_cast<int>(ms.size()) != p.length())
        bad("expected " + std::to_string(p.length()) + " matrices, found " + std::to_string(ms.size()));
    std::vector<ComplexMatrix> matrices;
    for (std::size_t m = 0; m < ms.size(); ++m) {
        const std::string where = "matrices[" + std::to_string(m) + "]";
        const auto& rows = ms[m];
        if (!rows.is_array() || static_cast<int>(rows.size()) != n) bad(where + ": expected " + std::to_string(n) + " rows");
        ComplexMatrix a(n, n);
        for (int r = 0; r < n; ++r) {
            const auto& row = rows[static_cast<std::size_t>(r)];
            if (!row.is_array() || static_cast<int>(row.size()) != n)
                bad(where + "[" + std::to_string(r) + "]: expected " + std::to_string(n) + " entries");
            for (int c = 0; c < n; ++c) {
                const auto& e = row[static_cast<std::size_t>(c)];
                const std::string at = where + "[" + std::to_string(r) + "][" + std::to_string(c) + "]";
                if (e.is_number()) {
                    a(r, c) = Complex(finite_number(e, at), 0.0);
                } else if (e.is_array() && e.size() == 2) {
                    a(r, c) = Complex(finite_number(e[0], at), finite_number(e[1], at));
                } else {
                    bad(at + ": expected [re, im]");
                }
            }
        }
        matrices.push_back(std::move(a));
    }

    TupleDocument doc{MatrixTuple(p, std::move(matrices)), std::nullopt, std::nullopt};
    if (j.contains("metadata") && j["metadata"].is_object()) {
        const auto& meta = j["metadata"];
        if (meta.contains("seed") && meta["seed"].is_number_unsigned()) doc.seed = meta["seed"].get<std::uint64_t>();
        if (meta.contains("description") && meta["description"].is_string())
            doc.description = meta["description"].get<std::string>();
    }
    return doc;
}

std::string serialize_document(const TupleDocument& doc, int indent) {
    const Partition& p = doc.tuple.partition();
    json j;
    j["n"] = p.n();
    j["partition"] = p.parts();
    json ms = json::array();
    for (const auto& a : doc.tuple.matrices()) {
        json rows = json::array();
        for (Eigen::Index r = 0; r < a.rows(); ++r) {
            json row = json::array();
            for (Eigen::Index c = 0; c < a.cols(); ++c) row.push_back({a(r, c).real(), a(r, c).imag()});
            rows.push_back(std::move(row));
        }
        ms.push_back(std::move(rows));
    }
    j["matrices"] = std::move(ms);
    if (doc.seed || doc.description) {
        json meta = json::object();
        if (doc.seed) meta["seed"] = *doc.seed;
        if (doc.description) meta["description"] = *doc.description;
        j["metadata"] = std::move(meta);
    }
    return j.dump(indent);
}

}  // namespace tuplevar
