#include <gtest/gtest.h>

#include <sstream>

#include "qpa/generators.hpp"
#include "qpa/json_io.hpp"

using namespace qpa;
using json_io::json;

namespace {

ErrorKind kind_of_parse(const std::string& text) {
    try {
        std::istringstream s(text);
        json_io::assignment_set_from_json(json_io::parse(s));
    } catch (const Error& e) {
        return e.kind();
    }
    ADD_FAILURE() << "accepted: " << text;
    return ErrorKind::ConstructionFailed;
}

} // namespace

TEST(JsonIo, AssignmentSetRoundTripsBitExactly) {
    CounterRng rng(1);
    for (std::size_t n = 2; n <= 4; ++n) {
        std::vector<Basis> bases = standard_family(n);
        bases.push_back(random_unitary_basis(n, rng));
        const auto f = forward_assignments(interior_state(n, n), bases);
        std::istringstream s(json_io::to_json(f).dump(2));
        const auto g = json_io::assignment_set_from_json(json_io::parse(s));
        ASSERT_EQ(g.size(), f.size());
        EXPECT_EQ(g.dimension(), n);
        for (std::size_t k = 0; k < f.size(); ++k) {
            EXPECT_EQ(g[k].probs().values(), f[k].probs().values());
            EXPECT_EQ(g[k].basis().label(), f[k].basis().label());
            for (std::size_t i = 0; i < n; ++i)
                EXPECT_LT((g[k].basis()[i].matrix() - f[k].basis()[i].matrix()).norm(), 1e-14);
        }
    }
}

TEST(JsonIo, ProjectorFormIsAccepted) {
    const std::string text = R"({"dimension": 2, "assignments": [
        {"basis": {"label": "z", "projectors": [[[1, 0], [0, 0]], [[0, 0], [0, 1]]]}, "probs": [0.25, 0.75]}]})";
    std::istringstream s(text);
    const auto f = json_io::assignment_set_from_json(json_io::parse(s));
    EXPECT_EQ(f[0].basis().label(), "z");
    EXPECT_EQ(f[0].probs()[1], 0.75);
}

TEST(JsonIo, ComplexEntriesArePairs) {
    EXPECT_EQ(json_io::to_json(Complex(0.5, -2.0)), json::array({0.5, -2.0}));
    const json m = json_io::to_json(dim2_example()[3].basis()[0].matrix());
    EXPECT_EQ(m.size(), 2u);
    EXPECT_EQ(m[0][1].size(), 2u);
}

TEST(JsonIo, MalformedInputs) {
    EXPECT_EQ(kind_of_parse("not json"), ErrorKind::MalformedInput);
    EXPECT_EQ(kind_of_parse(R"({"dimension": 2})"), ErrorKind::MalformedInput);
    EXPECT_EQ(kind_of_parse(R"({"dimension": -2, "assignments": []})"), ErrorKind::MalformedInput);
    EXPECT_EQ(kind_of_parse(R"({"dimension": 2, "assignments": [{"probs": [1, 0]}]})"), ErrorKind::MalformedInput);
    EXPECT_EQ(kind_of_parse(R"({"dimension": 2, "assignments": [{"basis": {"label": "z"}, "probs": [1, 0]}]})"),
              ErrorKind::MalformedInput);
    EXPECT_EQ(kind_of_parse(R"({"dimension": 2, "assignments": [
        {"basis": {"vectors": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}, "probs": ["a", 0]}]})"),
              ErrorKind::MalformedInput);
}

TEST(JsonIo, ValidationErrorsKeepTheirKind) {
    EXPECT_EQ(kind_of_parse(R"({"dimension": 2, "assignments": [
        {"basis": {"vectors": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}, "probs": [0.7, 0.7]}]})"),
              ErrorKind::InvalidProbabilities);
    EXPECT_EQ(kind_of_parse(R"({"dimension": 3, "assignments": [
        {"basis": {"vectors": [[[1, 0], [0, 0]], [[0, 0], [1, 0]]]}, "probs": [0.5, 0.5]}]})"),
              ErrorKind::DimensionMismatch);
    EXPECT_EQ(kind_of_parse(R"({"dimension": 2, "assignments": [
        {"basis": {"vectors": [[[1, 0], [0, 0]], [[0.6, 0], [0.8, 0]]]}, "probs": [0.5, 0.5]}]})"),
              ErrorKind::NotComplete);
}

TEST(JsonIo, DensityMatrixForms) {
    std::istringstream bare("[[[0.5, 0], [0, 0]], [[0, 0], [0.5, 0]]]");
    EXPECT_EQ(json_io::density_from_json(json_io::parse(bare)).dimension(), 2u);
    std::istringstream wrapped(R"({"rho": [[1, 0], [0, 0]]})");
    EXPECT_EQ(json_io::density_from_json(json_io::parse(wrapped)).matrix()(0, 0), Complex(1.0, 0.0));
    std::istringstream bad(R"({"state": []})");
    EXPECT_THROW(json_io::density_from_json(json_io::parse(bad)), Error);
}
