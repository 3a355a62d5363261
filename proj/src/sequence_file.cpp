#include "infprod/sequence_file.hpp"

#include <fstream>
#include <set>
#include <sstream>

#include <json.hpp>

#include "infprod/errors.hpp"

namespace infprod {

namespace {

using nlohmann::json;

Complex parse_scalar(const json& v, const std::string& where) {
    if (v.is_number()) return {v.get<double>(), 0.0};
    if (v.is_array() && v.size() == 2 && v[0].is_number() && v[1].is_number())
        return {v[0].get<double>(), v[1].get<double>()};
    throw ParseError(where + ": expected a number or a [re, im] pair");
}

ComplexMatrix parse_matrix(const json& v, std::size_t rows, std::size_t cols,
                           const std::string& where) {
    if (!v.is_array() || v.size() != rows)
        throw ParseError(where + ": expected " + std::to_string(rows) + " rows");
    std::vector<Complex> entries;
    entries.reserve(rows * cols);
    for (std::size_t i = 0; i < rows; ++i) {
        const auto& row = v[i];
        if (!row.is_array() || row.size() != cols)
            throw ParseError(where + ": row " + std::to_string(i) + " must have " +
                             std::to_string(cols) + " entries");
        for (std::size_t j = 0; j < cols; ++j)
            entries.push_back(parse_scalar(row[j], where + "[" + std::to_string(i) + "][" +
                                                       std::to_string(j) + "]"));
    }
    return {rows, cols, std::move(entries)};
}

std::size_t parse_size(const json& doc, const char* key) {
    if (!doc.contains(key)) throw ParseError(std::string("missing \"") + key + "\"");
    const auto& v = doc[key];
    if (!v.is_number_integer() || v.get<long long>() < 1)
        throw ParseError(std::string("\"") + key + "\" must be a positive integer");
    return static_cast<std::size_t>(v.get<long long>());
}

void reject_unknown_keys(const json& doc, const std::set<std::string>& allowed) {
    for (const auto& [key, value] : doc.items())
        if (!allowed.count(key)) throw ParseError("unknown key \"" + key + "\"");
}

json scalar_json(const Complex& z) {
    if (z.imag() == 0.0) return z.real();
    return json::array({z.real(), z.imag()});
}

json matrix_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (std::size_t i = 0; i < m.rows(); ++i) {
        json row = json::array();
        for (std::size_t j = 0; j < m.cols(); ++j) row.push_back(scalar_json(m(i, j)));
        rows.push_back(std::move(row));
    }
    return rows;
}

NormKind declared_norm(const std::string& name) {
    if (name == "one") return NormKind::one();
    if (name == "inf") return NormKind::inf();
    if (name == "fro") return NormKind::frobenius();
    throw ParseError("\"norm\" must be one of one, inf, fro, auto");
}

}  // namespace

std::string to_string(FileKind kind) {
    switch (kind) {
        case FileKind::Periodic: return "periodic";
        case FileKind::Finite: return "finite";
        case FileKind::Set: return "set";
        case FileKind::Matrix: return "matrix";
    }
    return "?";
}

std::optional<ContractionCertificate> SequenceFile::declared_certificate() const {
    if (!norm || *norm == "auto") return std::nullopt;
    return ContractionCertificate::declared(declared_norm(*norm), rate.value_or(-1.0));
}

SequencePresentation SequenceFile::presentation() const {
    std::optional<SequencePresentation> out;
    switch (kind) {
        case FileKind::Periodic: out = SequencePresentation::periodic(matrices); break;
        case FileKind::Finite: out = SequencePresentation::finite(matrices); break;
        default: throw ParseError("kind \"" + to_string(kind) + "\" is not a sequence");
    }
    if (auto cert = declared_certificate()) out->declare(*cert);
    return *out;
}

namespace {

SequenceFile parse_document(std::string_view text) {
    json doc;
    try {
        doc = json::parse(text);
    } catch (const json::parse_error& e) {
        throw ParseError(std::string("invalid JSON: ") + e.what());
    }
    if (!doc.is_object()) throw ParseError("top level must be an object");
    if (!doc.contains("kind") || !doc["kind"].is_string()) throw ParseError("missing \"kind\"");

    SequenceFile out;
    const auto kind = doc["kind"].get<std::string>();
    if (kind == "matrix") {
        reject_unknown_keys(doc, {"kind", "C"});
        out.kind = FileKind::Matrix;
        if (!doc.contains("C") || !doc["C"].is_array() || doc["C"].empty())
            throw ParseError("missing \"C\"");
        const std::size_t n = doc["C"].size();
        out.matrix = parse_matrix(doc["C"], n, n, "C");
        return out;
    }
    if (kind == "periodic") out.kind = FileKind::Periodic;
    else if (kind == "finite") out.kind = FileKind::Finite;
    else if (kind == "set") out.kind = FileKind::Set;
    else throw ParseError("unknown kind \"" + kind + "\"");

    reject_unknown_keys(doc, {"kind", "s", "d", "matrices", "norm", "rate"});
    out.s = parse_size(doc, "s");
    out.d = parse_size(doc, "d");
    if (out.s >= out.d) throw ParseError("need 1 <= s < d");
    const std::size_t tail = out.d - out.s;

    if (doc.contains("norm")) {
        if (!doc["norm"].is_string()) throw ParseError("\"norm\" must be a string");
        out.norm = doc["norm"].get<std::string>();
        if (*out.norm != "auto") declared_norm(*out.norm);
    }
    if (doc.contains("rate")) {
        if (!doc["rate"].is_number()) throw ParseError("\"rate\" must be a number");
        out.rate = doc["rate"].get<double>();
    }
    const bool concrete_norm = out.norm && *out.norm != "auto";
    if (concrete_norm && !out.rate) throw ParseError("a declared norm needs a \"rate\"");
    if (out.rate && !concrete_norm) throw ParseError("\"rate\" needs a declared norm");

    if (!doc.contains("matrices") || !doc["matrices"].is_array() || doc["matrices"].empty())
        throw ParseError("\"matrices\" must be a nonempty array");
    const auto& list = doc["matrices"];
    for (std::size_t k = 0; k < list.size(); ++k) {
        const auto& entry = list[k];
        const std::string where = "matrices[" + std::to_string(k) + "]";
        if (!entry.is_object() || !entry.contains("B") || !entry.contains("C"))
            throw ParseError(where + ": needs \"B\" and \"C\"");
        reject_unknown_keys(entry, {"B", "C"});
        out.matrices.emplace_back(out.s, parse_matrix(entry["B"], out.s, tail, where + ".B"),
                                  parse_matrix(entry["C"], tail, tail, where + ".C"));
    }
    return out;
}

}  // namespace

SequenceFile parse_sequence_file(std::string_view text) {
    try {
        return parse_document(text);
    } catch (const ShapeError& e) {
        throw ParseError(e.what());
    } catch (const NonFiniteError& e) {
        throw ParseError(e.what());
    } catch (const json::exception& e) {
        throw ParseError(e.what());
    }
}

SequenceFile load_sequence_file(const std::filesystem::path& path) {
    std::ifstream in(path);
    if (!in) throw ParseError("cannot open " + path.string());
    std::ostringstream buffer;
    buffer << in.rdbuf();
    return parse_sequence_file(buffer.str());
}

std::string serialize(const SequenceFile& file) {
    json doc;
    doc["kind"] = to_string(file.kind);
    if (file.kind == FileKind::Matrix) {
        doc["C"] = matrix_json(file.matrix.value());
        return doc.dump(2);
    }
    doc["s"] = file.s;
    doc["d"] = file.d;
    if (file.norm) doc["norm"] = *file.norm;
    if (file.rate) doc["rate"] = *file.rate;
    json list = json::array();
    for (const auto& a : file.matrices)
        list.push_back({{"B", matrix_json(a.b())}, {"C", matrix_json(a.c())}});
    doc["matrices"] = std::move(list);
    return doc.dump(2);
}

}  // namespace infprod
