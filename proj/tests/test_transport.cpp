#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace wqnet;

namespace {
PipeSpec pipe(double length, double diameter, double dm = 1.3e-9)
{
    PipeSpec p;
    p.id = "P";
    p.length = length;
    p.diameter = diameter;
    p.dm = dm;
    return p;
}
}  // namespace

TEST_CASE("Reynolds number")
{
    FluidProps fluid;  // rho 998.4, mu 3.6e-5
    CHECK(reynolds_number(pipe(100, 0.3), 0.0, fluid) == 0.0);
    CHECK(reynolds_number(pipe(100, 0.3), 0.1, fluid) == Catch::Approx(8.32e5).epsilon(1e-9));
    double re = reynolds_number(pipe(100, 0.1), 8e-4, fluid);
    CHECK(re == Catch::Approx(2218.6666666667).epsilon(1e-9));
    CHECK(classify_regime(re) == FlowRegime::Laminar);
    CHECK(reynolds_number(pipe(100, 0.3), -0.1, fluid) ==
          reynolds_number(pipe(100, 0.3), 0.1, fluid));
}

TEST_CASE("regime boundary sits exactly at Re = 2300")
{
    CHECK(classify_regime(2299.9999) == FlowRegime::Laminar);
    CHECK(classify_regime(2300.0) == FlowRegime::TransitionalTurbulent);
    CHECK(classify_regime(2300.0001) == FlowRegime::TransitionalTurbulent);
}

TEST_CASE("dispersion coefficient")
{
    TransportConfig cfg;  // shear fraction 0.1
    SECTION("stagnant limit") { CHECK(dispersion_coefficient(pipe(100, 0.3), 0.0, FlowRegime::Laminar) == 0.0); }
    SECTION("laminar long-residence asymptote")
    {
        // bracket -> 1, D -> d^2 v^2 / (12 dm)
        auto p = pipe(1e9, 0.1);  // t_r enormous
        double v = 5e-4;
        double d_inf = p.diameter * p.diameter * v * v / (12 * p.dm);
        CHECK(dispersion_coefficient(p, v, FlowRegime::Laminar, cfg) ==
              Catch::Approx(d_inf).epsilon(1e-6));
    }
    SECTION("turbulent branch, frozen oracle value")
    {
        // d = 0.3, v = 0.1, shear fraction 0.1, Re = 8.32e5:
        // (d v_tau / 2) (10.1 + 577 (Re/100)^-2.2) evaluated independently
        double d = dispersion_coefficient(pipe(1000, 0.3), 0.1, FlowRegime::TransitionalTurbulent, cfg);
        CHECK(d == Catch::Approx(0.0151500020558705).epsilon(1e-12));
    }
    SECTION("dispersion_scale test hook") {
        TransportConfig off = cfg;
        off.dispersion_scale = 0.0;
        CHECK(dispersion_coefficient(pipe(1000, 0.3), 0.1, FlowRegime::TransitionalTurbulent, off) == 0.0);
    }
}

TEST_CASE("Peclet number and the dispersion-active test")
{
    TransportConfig cfg;
    SECTION("dispersion-dominant limit: D large, Pe -> 0")
    {
        CHECK(peclet_number(pipe(1000, 0.3), 0.1, 1e12) < 1e-6);
    }
    SECTION("advective case above the threshold")
    {
        double pe = peclet_number(pipe(1000, 0.3), 0.1, 0.05);
        CHECK(pe == Catch::Approx(2000.0).epsilon(1e-12));
        CHECK(pe > cfg.peclet_threshold);  // dispersion neglected at the default 1000
    }
    SECTION("dispersion-active case")
    {
        double pe = peclet_number(pipe(100, 0.3), 0.001, 0.01);
        CHECK(pe == Catch::Approx(10.0).epsilon(1e-12));
        CHECK(pe <= cfg.peclet_threshold);
    }
    SECTION("stagnant sentinel: D = 0 gives +inf, never dispersion-active")
    {
        double pe = peclet_number(pipe(100, 0.3), 0.0, 0.0);
        CHECK(std::isinf(pe));
        CHECK_FALSE(pe <= cfg.peclet_threshold);
    }
}

TEST_CASE("stencil coefficients")
{
    SECTION("LW at unit Courant is a pure one-cell shift")
    {
        auto c = stencil_coefficients(SchemeId::LW, 1.0, 0.0);
        CHECK(c.lw_under == 1.0);
        CHECK(c.lw_mid == 0.0);
        CHECK(c.lw_over == 0.0);
        CHECK(c.row.rhs[0] == 1.0);
        CHECK(c.row.rhs[1] == 0.0);
        CHECK(c.row.rhs[2] == 0.0);
    }
    SECTION("LW at zero Courant is the identity")
    {
        auto c = stencil_coefficients(SchemeId::LW, 0.0, 0.0);
        CHECK(c.lw_under == 0.0);
        CHECK(c.lw_mid == 1.0);
        CHECK(c.lw_over == 0.0);
    }
    SECTION("EU at lambda 0.5 averages upstream and self")
    {
        auto c = stencil_coefficients(SchemeId::EU, 0.5, 0.0);
        CHECK(c.row.rhs[0] == 0.5);
        CHECK(c.row.rhs[1] == 0.5);
        CHECK(c.row.lhs[1] == 1.0);
    }
    SECTION("IU first-segment row couples the junction at t+dt")
    {
        auto c = stencil_coefficients(SchemeId::IU, 0.7, 0.0);
        CHECK(c.row.lhs[0] == Catch::Approx(-0.7));
        CHECK(c.row.lhs[1] == Catch::Approx(1.7));
        CHECK(c.row.rhs[1] == 1.0);
    }
    SECTION("BE row carries central advection and dispersion at t+dt")
    {
        auto c = stencil_coefficients(SchemeId::BE, 0.4, 0.3);
        CHECK(c.row.lhs[0] == Catch::Approx(-0.5 * 0.4 - 0.3));
        CHECK(c.row.lhs[1] == Catch::Approx(1.0 + 0.6));
        CHECK(c.row.lhs[2] == Catch::Approx(0.5 * 0.4 - 0.3));
    }
    SECTION("LW weights sum to one across the Courant range")
    {
        for (double lam = 0; lam <= 1.0; lam += 0.01) {
            auto c = stencil_coefficients(SchemeId::LW, lam, 0.17);
            CHECK(c.lw_under + c.lw_mid + c.lw_over == Catch::Approx(1.0).margin(1e-14));
        }
    }
    SECTION("unknown scheme id")
    {
        CHECK_THROWS_AS(stencil_coefficients(static_cast<SchemeId>(99), 0.1, 0.1), std::exception);
    }
}
