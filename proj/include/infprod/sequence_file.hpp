#pragma once

#include <cstddef>
#include <filesystem>
#include <optional>
#include <string>
#include <string_view>
#include <vector>

#include "infprod/analyzer.hpp"
#include "infprod/block_form.hpp"
#include "infprod/norms.hpp"

namespace infprod {

enum class FileKind { Periodic, Finite, Set, Matrix };

std::string to_string(FileKind kind);

/// JSON document describing a sequence, a set, or a single square matrix:
///
///   {"kind": "periodic" | "finite" | "set", "s": 1, "d": 2,
///    "norm": "inf", "rate": 0.9,
///    "matrices": [{"B": [[1]], "C": [[0.5]]}, ...]}
///
///   {"kind": "matrix", "C": [[0, 2], [0, 0]]}
///
/// Scalars are bare numbers (real) or [re, im] pairs. "norm" is one of
/// "one", "inf", "fro", "auto"; a concrete norm needs a "rate" and declares
/// ||C|| <= rate for every member.
struct SequenceFile {
    FileKind kind = FileKind::Periodic;
    std::size_t s = 0;
    std::size_t d = 0;
    std::vector<BlockUpperTriangular> matrices;
    /// Only for kind "matrix".
    std::optional<ComplexMatrix> matrix;
    std::optional<std::string> norm;
    std::optional<double> rate;

    /// The declared certificate, if the file names a concrete norm. Throws
    /// InvalidCertificateError for a rate outside [0, 1).
    std::optional<ContractionCertificate> declared_certificate() const;

    /// Periodic or finite presentation (with the declared certificate
    /// attached). Throws ParseError for other kinds.
    SequencePresentation presentation() const;
};

/// Throws ParseError on malformed JSON, unknown kinds or keys, ragged or
/// non-numeric arrays, and dimension mismatches.
SequenceFile parse_sequence_file(std::string_view text);
SequenceFile load_sequence_file(const std::filesystem::path& path);

/// Canonical JSON text; parse_sequence_file(serialize(f)) reproduces f exactly.
std::string serialize(const SequenceFile& file);

}  // namespace infprod
