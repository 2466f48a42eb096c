#include <gtest/gtest.h>

#include <clocale>

#include "tasep/io.hpp"

using namespace tasep;
using io::json;

TEST(Io, ComplexPairs) {
    const json j = io::to_json(cplx(2.0, -0.5));
    EXPECT_EQ(j.dump(), "[2.0,-0.5]");
    EXPECT_EQ(io::complex_from_json(j), cplx(2.0, -0.5));
    EXPECT_THROW(io::complex_from_json(json::array({1.0})), DomainError);
}

TEST(Io, SeventeenDigitsLocaleIndependent) {
    EXPECT_EQ(io::format_double(1.0 / 6.0), "0.16666666666666666");
    EXPECT_EQ(io::format_double(0.25), "0.25");
    std::setlocale(LC_NUMERIC, "de_DE.UTF-8");
    EXPECT_EQ(io::format_double(1.5), "1.5");
    std::setlocale(LC_NUMERIC, "C");
}

TEST(Io, CatalogSchema) {
    const auto cat = solve_all({2, 1});
    const json j = io::to_json(cat);
    EXPECT_EQ(j.at("M"), 2);
    EXPECT_EQ(j.at("N"), 1);
    EXPECT_TRUE(j.at("includes_stationary").get<bool>());
    ASSERT_EQ(j.at("solutions").size(), 1U);
    const auto &s = j.at("solutions")[0];
    for (const char *key : {"w", "B", "E", "U2", "theta1", "residual", "subset"}) {
        EXPECT_TRUE(s.contains(key)) << key;
    }
    const cplx w = io::complex_from_json(s.at("w")[0]);
    EXPECT_NEAR(w.real(), 2.0, 1e-13);
    EXPECT_NEAR(w.imag(), 0.0, 1e-13);
    EXPECT_TRUE(j.at("diagnostics").contains("failed_subsets"));
}

TEST(Io, EmptyCatalog) {
    const json j = io::to_json(solve_all({1, 1}));
    EXPECT_TRUE(j.at("solutions").empty());
}

TEST(Io, CatalogRoundTrip) {
    const auto cat = solve_all({6, 3});
    const auto back = io::catalog_from_json(json::parse(io::to_json(cat).dump()));
    ASSERT_EQ(back.solutions.size(), cat.solutions.size());
    for (std::size_t i = 0; i < cat.solutions.size(); ++i) {
        EXPECT_EQ(back.solutions[i].w, cat.solutions[i].w);
        EXPECT_EQ(back.solutions[i].energy, cat.solutions[i].energy);
        EXPECT_EQ(back.solutions[i].subset, cat.solutions[i].subset);
    }
    EXPECT_NO_THROW(validate_catalog(back));
}

TEST(Io, Manifest) {
    io::RunManifest m{"correlate", {4, 2}, {{"t", json::array({0.0, 1.0})}, {"method", "both"}}};
    const json j = io::to_json(m);
    EXPECT_EQ(j.at("command"), "correlate");
    EXPECT_EQ(j.at("M"), 4);
    EXPECT_EQ(j.at("parameters").at("method"), "both");
    EXPECT_EQ(j.at("tool_version"), io::tool_version);
    const std::string ts = j.at("timestamp");
    EXPECT_EQ(ts.size(), 20U);
    EXPECT_EQ(ts.back(), 'Z');
}

TEST(Io, SpectrumAndEstimate) {
    const json s = io::to_json(spectrum(build_generator({2, 1})));
    EXPECT_EQ(s.at("eigenvalues").size(), 2U);
    const json e = io::to_json(McEstimate{1.0, 0.0, 10});
    EXPECT_EQ(e.at("mean"), 1.0);
    EXPECT_EQ(e.at("std_error"), 0.0);
}
