#include <gtest/gtest.h>

#include <json.hpp>

#include "vortex/error.hpp"
#include "vortex/spectrum_io.hpp"

namespace vortex {
namespace {

TEST(SpectrumIo, ParsesEveryKind) {
  EXPECT_EQ(spectrum_from_json(R"({"dimension":3,"kind":"blackbody","W":2,"c":1})").kind_name(),
            "blackbody");
  EXPECT_EQ(spectrum_from_json(R"({"dimension":3,"kind":"monochromatic","k0":1,"omega0":1})")
                .kind_name(),
            "monochromatic");
  EXPECT_EQ(
      spectrum_from_json(R"({"dimension":3,"kind":"monochromatic-modulus","k0":1,"omega0":1})")
          .kind_name(),
      "monochromatic_modulus");
  EXPECT_EQ(spectrum_from_json(
                R"({"dimension":2,"kind":"ring_mixture","rings":[[1,1,1],[1,2,-1]]})")
                .kind_name(),
            "ring_mixture");
  EXPECT_EQ(spectrum_from_json(R"({"dimension":2,"kind":"special_dispersion","k0":1,"c":1})")
                .kind_name(),
            "special_dispersion");
  const Spectrum t = spectrum_from_json(
      R"({"dimension":3,"kind":"tabulated","omega_grid":[0,1],"k_grid":[0,1],
          "phi":[[1,1],[1,1]],"field_variance":2})");
  EXPECT_EQ(t.kind_name(), "tabulated");
  EXPECT_DOUBLE_EQ(t.field_variance(), 2.0);
}

TEST(SpectrumIo, RoundTripPreservesMoments) {
  const Spectrum s(RingMixture{{{1.0, 1.0, 0.3}, {2.0, 1.5, -0.7}}}, Dimension::three, 1.5);
  const Spectrum r = spectrum_from_json(spectrum_to_json(s));
  const SpectralMoments a = moments(s), b = moments(r);
  EXPECT_DOUBLE_EQ(a.k2, b.k2);
  EXPECT_DOUBLE_EQ(a.wk2, b.wk2);
  EXPECT_DOUBLE_EQ(a.f2, b.f2);
}

TEST(SpectrumIo, RejectsMalformedInput) {
  EXPECT_THROW(spectrum_from_json("not json"), InvalidInput);
  EXPECT_THROW(spectrum_from_json(R"({"dimension":3})"), InvalidInput);
  EXPECT_THROW(spectrum_from_json(R"({"dimension":5,"kind":"blackbody"})"), InvalidInput);
  EXPECT_THROW(spectrum_from_json(R"({"dimension":3,"kind":"nope"})"), InvalidInput);
  EXPECT_THROW(spectrum_from_json(R"({"dimension":3,"kind":"blackbody","W":"hot"})"),
               InvalidInput);
  EXPECT_THROW(load_spectrum_file("/nonexistent/spectrum.json"), InvalidInput);
}

TEST(SpectrumIo, MatricesJsonHoldsSquareMatrices) {
  const CorrelationModel3D m =
      build_3d(moments(Spectrum(Blackbody{1.0, 1.0}, Dimension::three)));
  const auto j = nlohmann::json::parse(matrices_json(m));
  ASSERT_TRUE(j.contains("corr"));
  EXPECT_EQ(j["corr"].size(), 8u);
  EXPECT_EQ(j["corr"][0].size(), 8u);
}

}  // namespace
}  // namespace vortex
