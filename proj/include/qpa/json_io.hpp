#pragma once

// JSON schema:
//   complex    [re, im]
//   matrix     array of rows
//   Basis      {"label": str, "vectors": [[c, ...], ...]} or {"label": str, "projectors": [matrix, ...]}
//   Assignment {"basis": Basis, "probs": [r, ...]}
//   AssignmentSet {"dimension": n, "assignments": [Assignment, ...]}
// A density matrix is a bare matrix or {"rho": matrix}.

#include <istream>
#include <string>
#include <vector>

#include <json.hpp>

#include "qpa/error.hpp"
#include "qpa/model.hpp"
#include "qpa/numerics.hpp"
#include "qpa/sampler.hpp"

namespace qpa::json_io {

using json = nlohmann::json;

inline json to_json(Complex c) { return json::array({c.real(), c.imag()}); }

inline json to_json(const ComplexMatrix& m) {
    json rows = json::array();
    for (Eigen::Index r = 0; r < m.rows(); ++r) {
        json row = json::array();
        for (Eigen::Index c = 0; c < m.cols(); ++c) row.push_back(to_json(m(r, c)));
        rows.push_back(std::move(row));
    }
    return rows;
}

inline json to_json(const Basis& b) {
    json vectors = json::array();
    for (std::size_t i = 0; i < b.dimension(); ++i) {
        const ComplexVector v = b.vector(i);
        json vec = json::array();
        for (Eigen::Index k = 0; k < v.size(); ++k) vec.push_back(to_json(v(k)));
        vectors.push_back(std::move(vec));
    }
    return {{"label", b.label()}, {"vectors", std::move(vectors)}};
}

inline json to_json(const AssignmentSet& f) {
    json items = json::array();
    for (const auto& a : f.assignments()) items.push_back({{"basis", to_json(a.basis())}, {"probs", a.probs().values()}});
    return {{"dimension", f.dimension()}, {"assignments", std::move(items)}};
}

inline json to_json(const MeasurementRecord& r) {
    return {{"basis", r.basis_label}, {"shots", r.shots}, {"counts", r.counts}};
}

namespace detail {

[[noreturn]] inline void malformed(const std::string& what) { throw Error(ErrorKind::MalformedInput, what); }

inline Complex complex_from(const json& j) {
    if (j.is_number()) return {j.get<double>(), 0.0};
    if (!j.is_array() || j.size() != 2 || !j[0].is_number() || !j[1].is_number())
        malformed("complex number must be [re, im]");
    return {j[0].get<double>(), j[1].get<double>()};
}

inline ComplexMatrix matrix_from(const json& j) {
    if (!j.is_array() || j.empty()) malformed("matrix must be a non-empty array of rows");
    const auto rows = static_cast<Eigen::Index>(j.size());
    if (!j[0].is_array()) malformed("matrix rows must be arrays");
    const auto cols = static_cast<Eigen::Index>(j[0].size());
    ComplexMatrix m(rows, cols);
    for (Eigen::Index r = 0; r < rows; ++r) {
        const auto& row = j[static_cast<std::size_t>(r)];
        if (!row.is_array() || static_cast<Eigen::Index>(row.size()) != cols) malformed("matrix rows differ in length");
        for (Eigen::Index c = 0; c < cols; ++c) m(r, c) = complex_from(row[static_cast<std::size_t>(c)]);
    }
    return m;
}

inline ComplexVector vector_from(const json& j) {
    if (!j.is_array() || j.empty()) malformed("vector must be a non-empty array");
    ComplexVector v(static_cast<Eigen::Index>(j.size()));
    for (std::size_t k = 0; k < j.size(); ++k) v(static_cast<Eigen::Index>(k)) = complex_from(j[k]);
    return v;
}

} // namespace detail

inline Basis basis_from_json(const json& j) {
    if (!j.is_object()) detail::malformed("basis must be an object");
    const std::string label = j.contains("label") && j["label"].is_string() ? j["label"].get<std::string>() : "";
    if (j.contains("vectors")) {
        if (!j["vectors"].is_array()) detail::malformed("basis vectors must be an array");
        std::vector<ComplexVector> vs;
        for (const auto& v : j["vectors"]) vs.push_back(detail::vector_from(v));
        return basis_from_vectors(vs, label);
    }
    if (j.contains("projectors")) {
        if (!j["projectors"].is_array()) detail::malformed("basis projectors must be an array");
        std::vector<ComplexMatrix> ps;
        for (const auto& p : j["projectors"]) ps.push_back(detail::matrix_from(p));
        return validate_basis(ps, label);
    }
    detail::malformed("basis needs \"vectors\" or \"projectors\"");
}

inline AssignmentSet assignment_set_from_json(const json& j) {
    if (!j.is_object() || !j.contains("dimension") || !j.contains("assignments"))
        detail::malformed("assignment set needs \"dimension\" and \"assignments\"");
    if (!j["dimension"].is_number_unsigned()) detail::malformed("dimension must be a positive integer");
    if (!j["assignments"].is_array()) detail::malformed("assignments must be an array");
    const auto n = j["dimension"].get<std::size_t>();
    std::vector<Assignment> items;
    for (std::size_t k = 0; k < j["assignments"].size(); ++k) {
        const auto& a = j["assignments"][k];
        if (!a.is_object() || !a.contains("basis") || !a.contains("probs"))
            detail::malformed("assignment " + std::to_string(k) + " needs \"basis\" and \"probs\"");
        const auto& probs = a["probs"];
        if (!probs.is_array()) detail::malformed("assignment " + std::to_string(k) + ": probs must be an array");
        std::vector<double> p;
        for (const auto& x : probs) {
            if (!x.is_number()) detail::malformed("assignment " + std::to_string(k) + ": probabilities must be numbers");
            p.push_back(x.get<double>());
        }
        try {
            Basis b = basis_from_json(a["basis"]);
            if (b.dimension() != n)
                throw Error(ErrorKind::DimensionMismatch, "basis dimension differs from set dimension", k);
            items.emplace_back(std::move(b), ProbabilityVector::from_values(std::move(p)));
        } catch (const Error& e) {
            throw Error(e.kind(), "assignment " + std::to_string(k) + ": " + e.what(), e.index());
        }
    }
    return AssignmentSet(n, std::move(items));
}

inline DensityMatrix density_from_json(const json& j) {
    if (j.is_object()) {
        if (!j.contains("rho")) detail::malformed("state object needs \"rho\"");
        return DensityMatrix::from_matrix(detail::matrix_from(j["rho"]));
    }
    return DensityMatrix::from_matrix(detail::matrix_from(j));
}

inline json parse(std::istream& in) {
    try {
        return json::parse(in);
    } catch (const json::exception& e) {
        detail::malformed(std::string("invalid JSON: ") + e.what());
    }
}

} // namespace qpa::json_io
