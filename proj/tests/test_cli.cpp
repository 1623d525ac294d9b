#include <catch2/catch_amalgamated.hpp>

#include "cnb/cli.hpp"

using namespace cnb;
using cli::CommandOptions;
using cli::parse_scenario;
using cli::run_command;
using Catch::Approx;

TEST_CASE("parse_scenario") {
    SECTION("defaults applied") {
        const cli::Scenario s = parse_scenario(R"({"n": 3, "alpha": 1.0})");
        REQUIRE(s.n == 3);
        REQUIRE(s.alpha == 1.0);
        REQUIRE_FALSE(s.masses.has_value());
        REQUIRE(s.integrator.dt == 1e-3);
        REQUIRE(s.integrator.T == 100.0);
        REQUIRE(s.mass_vector().size() == 3);
        REQUIRE(s.phi_or_polygon()[2] == Approx(2.0 * kPi).margin(1e-15));
    }
    SECTION("even n without an explicit configuration is invalid") {
        REQUIRE_THROWS_AS(parse_scenario(R"({"n": 4})"), ValidationError);
    }
    SECTION("non-positive masses rejected") {
        REQUIRE_THROWS_AS(parse_scenario(R"({"n": 3, "masses": [1, -1, 1]})"), ValidationError);
    }
    SECTION("unknown fields rejected") {
        REQUIRE_THROWS_AS(parse_scenario(R"({"n": 3, "omega": 2})"), ValidationError);
        REQUIRE_THROWS_AS(parse_scenario(R"({"n": 3, "integrator": {"step": 0.1}})"),
                          ValidationError);
    }
    SECTION("malformed JSON raises ParseError with context") {
        try {
            parse_scenario("{\"n\": 3,,}");
            FAIL("expected ParseError");
        } catch (const ParseError& e) {
            REQUIRE(std::string(e.what()).find("parse error") != std::string::npos);
        }
    }
    SECTION("length and range validation") {
        REQUIRE_THROWS_AS(parse_scenario(R"({"n": 3, "phi": [1.0, 2.0]})"), ValidationError);
        REQUIRE_THROWS_AS(parse_scenario(R"({"n": 3, "theta": [0.0, 1.0, 1.0]})"),
                          ValidationError);
        REQUIRE_THROWS_AS(parse_scenario(R"({"n": 3, "integrator": {"dt": -1}})"),
                          ValidationError);
    }
}

TEST_CASE("run_command") {
    SECTION("spectrum reports theta1") {
        const auto s = parse_scenario(R"({"n": 3})");
        const auto r = run_command("spectrum", s, {});
        REQUIRE(r.exit_code == 0);
        REQUIRE(r.payload["theta1"].get<double>() == Approx(4.6188021535170061).margin(1e-9));
        REQUIRE(r.payload["signatures"]["theta"]["zeros"].get<int>() == 2);
    }
    SECTION("classify verdicts") {
        const auto stable = run_command("classify", parse_scenario(R"({"n": 3, "alpha": 3})"), {});
        REQUIRE(stable.exit_code == 0);
        REQUIRE(stable.payload["s2_verdict"].get<std::string>() == "LyapunovStable");
        const auto unstable =
            run_command("classify", parse_scenario(R"({"n": 3, "alpha": 1})"), {});
        REQUIRE(unstable.payload["s2_verdict"].get<std::string>() == "LinearlyUnstable");
        REQUIRE(unstable.payload["s1_verdict"].get<std::string>() == "LyapunovStable");
    }
    SECTION("verify flags the polygon as an equilibrium") {
        const auto r = run_command("verify", parse_scenario(R"({"n": 5})"), {});
        REQUIRE(r.exit_code == 0);
        REQUIRE(r.payload["is_equilibrium"].get<bool>());
        REQUIRE(r.payload["s1_residual_max"].get<double>() < 1e-12);
    }
    SECTION("domain errors carry the module error name and exit code 1") {
        // Coincident bodies: a singular configuration.
        const auto s = parse_scenario(
            R"({"n": 3, "phi": [0.1, 0.1, 2.0], "theta": [1.5707963, 1.5707963, 1.5707963]})");
        const auto r = run_command("verify", s, {});
        REQUIRE(r.exit_code == 1);
        REQUIRE(r.payload["error"]["name"].get<std::string>() == "SingularConfiguration");
    }
    SECTION("input errors exit with code 2") {
        const auto r = run_command("classify", parse_scenario(R"({"n": 3})"), {});
        REQUIRE(r.exit_code == 2);
        REQUIRE(r.payload["error"]["name"].get<std::string>() == "ValidationError");
    }
    SECTION("masses command is deterministic given the seed") {
        const auto s = parse_scenario(R"({"n": 5, "seed": 9})");
        const auto a = run_command("masses", s, {});
        const auto b = run_command("masses", s, {});
        REQUIRE(a.exit_code == 0);
        REQUIRE(cli::render("masses", a, "json") == cli::render("masses", b, "json"));
        REQUIRE(a.payload["residual"].get<double>() <= 1e-10);
    }
    SECTION("bifurcate reports the intersection gap") {
        CommandOptions opt;
        opt.points = 11;
        const auto r = run_command("bifurcate", parse_scenario(R"({"n": 3})"), opt);
        REQUIRE(r.exit_code == 0);
        REQUIRE(r.payload["points"].size() == 11);
        REQUIRE(r.payload["intersection_gap"].get<double>() <= 1e-10);
    }
    SECTION("sweep crosses the n-list with the alpha grid") {
        CommandOptions opt;
        opt.n_list = {3, 5};
        opt.alpha_list = {1.0, 5.0};
        const auto r = run_command("sweep", parse_scenario(R"({"n": 3})"), opt);
        REQUIRE(r.exit_code == 0);
        REQUIRE(r.payload["rows"].size() == 4);
        REQUIRE(r.payload["rows"][0]["s2_verdict"].get<std::string>() == "LinearlyUnstable");
        REQUIRE(r.payload["rows"][1]["s2_verdict"].get<std::string>() == "LyapunovStable");
    }
}

TEST_CASE("simulate and rendering") {
    SECTION("trajectory CSV columns") {
        const auto s = parse_scenario(
            R"({"n": 3, "alpha": 1.0, "integrator": {"T": 0.02, "dt": 0.01, "sample_stride": 1}})");
        const auto r = run_command("simulate", s, {});
        REQUIRE(r.exit_code == 0);
        const std::string csv = cli::render("simulate", r, "csv");
        REQUIRE(csv.rfind("t,phi_1,theta_1,p_phi_1,p_theta_1,phi_2,theta_2,p_phi_2,p_theta_2,"
                          "phi_3,theta_3,p_phi_3,p_theta_3,H,J2,shape_deviation\n",
                          0) == 0);
        // header + 3 samples (t = 0, 0.01, 0.02)
        REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 4);
    }
    SECTION("simulate conserves energy on the relative equilibrium") {
        const auto s = parse_scenario(
            R"({"n": 3, "alpha": 1.0, "integrator": {"T": 1.0, "dt": 0.001}})");
        const auto r = run_command("simulate", s, {});
        REQUIRE(r.exit_code == 0);
        REQUIRE(r.payload["energy_drift"].get<double>() < 1e-10);
        REQUIRE(r.payload["max_shape_deviation"].get<double>() < 1e-10);
    }
    SECTION("json rendering is deterministic") {
        const auto s = parse_scenario(R"({"n": 3, "seed": 4, "alpha": 2.0,
                                          "integrator": {"T": 0.05, "dt": 0.01}})");
        const auto a = cli::render("simulate", run_command("simulate", s, {}), "json");
        const auto b = cli::render("simulate", run_command("simulate", s, {}), "json");
        REQUIRE(a == b);
    }
    SECTION("unknown format rejected") {
        const auto r = run_command("spectrum", parse_scenario(R"({"n": 3})"), {});
        REQUIRE_THROWS_AS(cli::render("spectrum", r, "xml"), ValidationError);
    }
    SECTION("spectrum CSV has one row per k") {
        const auto r = run_command("spectrum", parse_scenario(R"({"n": 5})"), {});
        const std::string csv = cli::render("spectrum", r, "csv");
        REQUIRE(csv.rfind("k,gamma,phi,theta\n", 0) == 0);
        REQUIRE(std::count(csv.begin(), csv.end(), '\n') == 6);
    }
}
