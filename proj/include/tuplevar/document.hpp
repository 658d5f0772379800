#pragma once

#include <cstdint>
#include <optional>
#include <string>

#include "tuplevar/multilinear.hpp"

namespace tuplevar {

/// JSON form of a tuple: {"n", "partition", "matrices": [[[re, im], ...], ...], "metadata"}.
struct TupleDocument {
    MatrixTuple tuple;
    std::optional<std::uint64_t> seed;
    std::optional<std::string> description;
};

/// Throws Error(InvalidDocument) on malformed JSON (with byte position) or bad
/// shapes, and Error(InvalidPartition) when the partition itself is invalid.
TupleDocument parse_document(const std::string& text);

/// Shortest round-trip decimal for every entry; parse(serialize(d)) == d bit for bit.
std::string serialize_document(const TupleDocument& doc, int indent = -1);

}  // namespace tuplevar
