#include <filesystem>
#include <limits>

#include <gtest/gtest.h>

#include <tpflag/io.hpp>

#include "oracles.hpp"

using namespace tpflag;

TEST(Json, RationalMatrixRoundTripIsBitExact) {
    Rng rng(1);
    for (int i = 0; i < 100; ++i) {
        const std::size_t n = 2 + i % 5;
        const RationalMatrix m = oracle::random_sl(n, rng);
        const std::string text = matrix_to_json(m).dump();
        EXPECT_EQ(matrix_from_json<Rational>(parse_json(text)), m);
        EXPECT_EQ(matrix_to_json(matrix_from_json<Rational>(parse_json(text))).dump(), text);
    }
}

TEST(Json, RealMatrixRoundTripIsBitExact) {
    Rng rng(2);
    RealMatrix m(3, 3);
    for (std::size_t i = 0; i < 3; ++i)
        for (std::size_t k = 0; k < 3; ++k) m(i, k) = rng.uniform(-1e3, 1e3) / 7;
    EXPECT_EQ(matrix_from_json<double>(parse_json(matrix_to_json(m).dump())), m);
}

TEST(Json, MatrixFormat) {
    const RationalMatrix m{{1, Rational(1, 2)}, {0, 2}};
    EXPECT_EQ(matrix_to_json(m).dump(), R"({"entries":[["1","1/2"],["0","2"]],"n":2})");
    EXPECT_EQ(matrix_from_json<Rational>(parse_json(R"({"n":2,"entries":[[1,"1/2"],[0,2]]})")), m);
    EXPECT_EQ(matrix_from_json<Rational>(parse_json(R"({"entries":[["2/4"]]})"))(0, 0), Rational(1, 2));
}

TEST(Json, MalformedInput) {
    EXPECT_THROW(parse_json(R"({"n":2,"entries":[[1,0],)"), InputError);
    EXPECT_THROW(matrix_from_json<Rational>(parse_json(R"({"n":2})")), InputError);
    EXPECT_THROW(matrix_from_json<Rational>(parse_json(R"({"n":3,"entries":[[1,0],[0,1]]})")), InputError);
    EXPECT_THROW(matrix_from_json<Rational>(parse_json(R"({"entries":[[1,0],[0]]})")), InputError);
    EXPECT_THROW(matrix_from_json<Rational>(parse_json(R"({"entries":[[1,"x"],[0,1]]})")), InputError);
    EXPECT_THROW(matrix_from_json<Rational>(parse_json(R"({"entries":[[1,"1/0"],[0,1]]})")), InputError);
    EXPECT_THROW(matrix_from_json<Rational>(parse_json(R"({"entries":[[1,0.5],[0,1]]})")), InputError);
    EXPECT_THROW(params_from_json<Rational>(parse_json(R"({"word":[1,2],"params":["1"]})")), InputError);
}

TEST(Json, ParamsAndPoints) {
    const LusztigParams<Rational> p{{1, 2, 1}, {Rational(2, 3), Rational(5), Rational(1, 4)}};
    EXPECT_EQ(params_to_json(p).dump(), R"({"params":["2/3","5","1/4"],"word":[1,2,1]})");
    EXPECT_EQ(params_from_json<Rational>(params_to_json(p)), p);

    const ParabolicPoint<Rational> P{{1}, sample_unipotent(3, Triangle::Lower, 1)};
    EXPECT_EQ(parabolic_point_from_json<Rational>(to_json(P)), P);
    const FlagPoint<Rational> B{sample_unipotent(3, Triangle::Lower, 2)};
    EXPECT_EQ(flag_point_from_json<Rational>(to_json(B)), B);

    const CellCoordinates c{p, {Rational(1), Rational(7, 2)}};
    EXPECT_EQ(cell_coordinates_from_json(to_json(c)), c);
}

TEST(Json, VerdictWitnessIsOneBased) {
    const PositivityVerdict v = PositivityVerdict::no({"lower", {1, 2}, {0, 1}, -1});
    const Json j = to_json(v);
    EXPECT_FALSE(j["member"].get<bool>());
    EXPECT_EQ(j["witness"]["rows"], Json({2, 3}));
    EXPECT_EQ(j["witness"]["cols"], Json({1, 2}));
}

TEST(Json, CampaignConfig) {
    CampaignConfig c;
    CampaignFiles files;
    campaign_config_from_json(parse_json(R"({"n":3,"trials":5,"seed":7,"starts":12,"residual_tolerance":1e-9,"csv":"x.csv"})"), c, files);
    EXPECT_EQ(c.n, 3u);
    EXPECT_EQ(c.trials, 5u);
    EXPECT_EQ(c.seed, 7u);
    EXPECT_EQ(c.solver.starts, 12u);
    EXPECT_EQ(c.solver.residual_tolerance, 1e-9);
    EXPECT_EQ(files.csv, "x.csv");
    validate_campaign_config(c);

    // Serializing and reading back reproduces the config.
    CampaignConfig d;
    CampaignFiles dfiles;
    campaign_config_from_json(to_json(c, files), d, dfiles);
    EXPECT_EQ(to_json(d, dfiles), to_json(c, files));

    EXPECT_THROW(campaign_config_from_json(parse_json(R"({"bogus":1})"), c, files), InputError);
    EXPECT_THROW(campaign_config_from_json(parse_json(R"({"trials":-1})"), c, files), InputError);
    c.trials = 0;
    EXPECT_THROW(validate_campaign_config(c), InputError);
    c.trials = 1;
    c.solver.newton_tolerance = 0;
    EXPECT_THROW(validate_campaign_config(c), InputError);
}

TEST(Json, FormatDoubleRoundTrips) {
    for (double x : {0.1, 1.0 / 3, 1e-300, 123456789.125, 2.0}) EXPECT_EQ(std::strtod(format_double(x).c_str(), nullptr), x);
    EXPECT_EQ(format_double(2.0), "2");
    EXPECT_EQ(format_double(std::numeric_limits<double>::infinity()), "inf");
}

TEST(Campaign, ReportsRegenerateByteIdentically) {
    const auto dir = std::filesystem::temp_directory_path() / "tpflag_io_test";
    std::filesystem::remove_all(dir);
    CampaignConfig c;
    c.n = 3;
    c.trials = 8;
    c.seed = 11;
    CampaignFiles files{(dir / "a.csv").string(), (dir / "a.json").string(), (dir / "cx").string()};
    write_campaign(verify_conjecture(c), files, "T");
    const std::string csv1 = campaign_csv(verify_conjecture(c));
    c.threads = 1;
    const CampaignReport again = verify_conjecture(c);
    c.threads = 0;
    EXPECT_EQ(campaign_csv(again), csv1);
    EXPECT_EQ(campaign_summary(verify_conjecture(c), files, "T").dump(2) + "\n", read_json_file(files.summary).dump(2) + "\n");
    EXPECT_TRUE(std::filesystem::exists(files.csv));
    EXPECT_FALSE(std::filesystem::exists(files.csv + ".tmp"));
    EXPECT_FALSE(std::filesystem::exists(dir / "cx"));
    std::filesystem::remove_all(dir);
}
