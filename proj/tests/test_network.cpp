#include <catch2/catch_amalgamated.hpp>

#include "support.hpp"

using namespace wqnet;

TEST_CASE("minimal network file loads with correct counts")
{
    auto dir = testsup::temp_dir("net_min");
    write_file(dir + "/min.net",
               "[junctions]\nJ1\n[reservoirs]\nR1 cl=1\n[pipes]\n"
               "P1 from=R1 to=J1 length=100 diameter=0.1\n");
    auto topo = load_network(dir + "/min.net");
    CHECK(topo.n_nodes() == 2);
    CHECK(topo.n_pipes() == 1);
    CHECK(topo.n_junctions() == 1);
    CHECK(topo.n_reservoirs() == 1);
}

TEST_CASE("BLA-M fixture has the published component counts")
{
    auto topo = load_network(testsup::fixture("blam.net"));
    CHECK(topo.n_junctions() == 30);
    CHECK(topo.n_reservoirs() == 1);
    CHECK(topo.n_tanks() == 0);
    CHECK(topo.n_pipes() == 30);
    CHECK(topo.n_pumps() == 0);
}

TEST_CASE("pipe referencing a missing node names the pipe")
{
    auto dir = testsup::temp_dir("net_bad");
    write_file(dir + "/bad.net",
               "[junctions]\nJ1\n[reservoirs]\nR1 cl=1\n[pipes]\n"
               "P9 from=R1 to=NOPE length=100 diameter=0.1\n");
    CHECK_THROWS_WITH(load_network(dir + "/bad.net"),
                      Catch::Matchers::ContainsSubstring("P9") &&
                          Catch::Matchers::ContainsSubstring("NOPE"));
}

TEST_CASE("network round trip is field-identical")
{
    auto topo = load_network(testsup::fixture("tank_net.net"));
    auto dir = testsup::temp_dir("net_rt");
    write_file(dir + "/rt.net", serialize_network(topo));
    auto again = load_network(dir + "/rt.net");
    CHECK(serialize_network(again) == serialize_network(topo));
    CHECK(again.n_links() == topo.n_links());
    CHECK(again.tanks[0].vmax == topo.tanks[0].vmax);
    CHECK(again.pipes[0].dm == topo.pipes[0].dm);
    CHECK(again.boosters[0].umax == topo.boosters[0].umax);
}

TEST_CASE("invalid specs are rejected")
{
    NetworkTopology t;
    t.junctions.push_back({"J1"});
    t.reservoirs.push_back({"R1", {1, 0, 0}});
    PipeSpec p;
    p.id = "P1";
    p.from = 1;
    p.to = 0;
    p.length = -5;
    p.diameter = 0.1;
    t.pipes.push_back(p);
    t.rebuild_index();
    CHECK_THROWS_AS(t.validate(), ValidationError);
    t.pipes[0].length = 5;
    t.validate();

    SECTION("tank volume ordering")
    {
        t.tanks.push_back({"TK1", 10, 5, 7, 0});  // vmin > vmax
        t.rebuild_index();
        CHECK_THROWS_AS(t.validate(), ValidationError);
    }
    SECTION("booster on a reservoir")
    {
        t.boosters.push_back({"B1", 1, 4.0, Species::Chlorine});
        CHECK_THROWS_AS(t.validate(), ValidationError);
    }
    SECTION("disconnected graph")
    {
        t.junctions.push_back({"J2"});  // no link touches it
        t.rebuild_index();
        CHECK_THROWS_AS(t.validate(), ValidationError);
    }
}

TEST_CASE("hydraulic trace loads and checks continuity")
{
    auto topo = load_network(testsup::fixture("single_pipe.net"));
    auto trace = load_hydraulics(testsup::fixture("single_pipe.hyd"), topo);
    CHECK(trace.steps == 24);
    CHECK(trace.dt_hyd == 3600);
    CHECK(trace.duration() == Catch::Approx(86400.0));

    SECTION("a 10% junction imbalance is rejected with step and node")
    {
        auto dir = testsup::temp_dir("hyd_bad");
        std::string txt = serialize_hydraulics(topo, trace);
        // corrupt step 3's demand column
        auto pos = txt.find("\n3 ");
        std::string head = txt.substr(0, pos + 1);
        std::string row = txt.substr(pos + 1, txt.find('\n', pos + 1) - pos);
        auto toks = text::split_ws(row);
        toks.back() = text::format_g(text::parse_double(toks.back(), "t") * 1.1);
        std::string fixed;
        for (auto& t : toks) fixed += t + " ";
        write_file(dir + "/bad.hyd", head + fixed + txt.substr(txt.find('\n', pos + 1)));
        CHECK_THROWS_WITH(load_hydraulics(dir + "/bad.hyd", topo),
                          Catch::Matchers::ContainsSubstring("step 3") &&
                              Catch::Matchers::ContainsSubstring("J1"));
    }
    SECTION("all-zero flows form a valid stagnant trace")
    {
        HydraulicTrace z = trace;
        z.pipe_velocity.setZero();
        z.link_flow.setZero();
        z.demand.setZero();
        auto dir = testsup::temp_dir("hyd_zero");
        write_file(dir + "/zero.hyd", serialize_hydraulics(topo, z));
        CHECK_NOTHROW(load_hydraulics(dir + "/zero.hyd", topo));
    }
}

TEST_CASE("trace with missing columns or wrong ids is rejected")
{
    auto topo = load_network(testsup::fixture("single_pipe.net"));
    auto dir = testsup::temp_dir("hyd_cols");
    write_file(dir + "/m.hyd", "dt 3600\nsteps 1\ncolumns v:P1 q:P1\n0 0.1 0.00706858347\n");
    CHECK_THROWS_AS(load_hydraulics(dir + "/m.hyd", topo), ValidationError);
    write_file(dir + "/u.hyd",
               "dt 3600\nsteps 1\ncolumns v:P1 q:P1 d:JX\n0 0.1 0.00706858347 0.00706858347\n");
    CHECK_THROWS_AS(load_hydraulics(dir + "/u.hyd", topo), ValidationError);
}

TEST_CASE("flow continuity is symmetric in pipe orientation")
{
    // reversing a pipe's reference direction and negating its velocity
    // leaves the validation outcome unchanged
    auto topo = load_network(testsup::fixture("single_pipe.net"));
    auto trace = load_hydraulics(testsup::fixture("single_pipe.hyd"), topo);

    NetworkTopology rev = topo;
    std::swap(rev.pipes[0].from, rev.pipes[0].to);
    rev.rebuild_index();
    HydraulicTrace rtrace = trace;
    rtrace.pipe_velocity = -trace.pipe_velocity;
    rtrace.link_flow = -trace.link_flow;
    auto dir = testsup::temp_dir("hyd_rev");
    write_file(dir + "/rev.hyd", serialize_hydraulics(rev, rtrace));
    CHECK_NOTHROW(load_hydraulics(dir + "/rev.hyd", rev));

    SpeciesInitialState init;
    auto rep_fwd = validate_scenario(topo, trace, init);
    auto rep_rev = validate_scenario(rev, rtrace, init);
    CHECK(rep_fwd.ok() == rep_rev.ok());
}

TEST_CASE("validate_scenario reports findings without throwing")
{
    auto topo = load_network(testsup::fixture("mpc_net.net"));
    auto trace = load_hydraulics(testsup::fixture("mpc_net.hyd"), topo);
    auto init = load_initial_state(testsup::fixture("mpc_net.init"), topo);

    SECTION("consistent fixture gives an empty report")
    {
        auto rep = validate_scenario(topo, trace, init);
        CHECK(rep.ok());
    }
    SECTION("negative initial chlorine is one nonnegativity finding")
    {
        auto bad = init;
        bad.block(Species::Chlorine).node["J1"] = -0.2;
        auto rep = validate_scenario(topo, trace, bad);
        REQUIRE(rep.findings.size() == 1);
        CHECK(rep.findings[0].code == "nonnegative");
    }
    SECTION("booster on a nonexistent node is reported")
    {
        auto broken = topo;
        broken.boosters[0].node = 99;
        auto rep = validate_scenario(broken, trace, init);
        REQUIRE_FALSE(rep.ok());
        CHECK(rep.findings[0].code == "topology");
    }
}

TEST_CASE("tank trace volume bookkeeping")
{
    auto topo = load_network(testsup::fixture("tank_net.net"));
    auto trace = load_hydraulics(testsup::fixture("tank_net.hyd"), topo);
    // end-of-step volume matches the next step's start
    for (int k = 0; k + 1 < trace.steps; ++k)
        CHECK(trace.tank_volume_end(topo, k, 0) ==
              Catch::Approx(trace.tank_volume(k + 1, 0)).epsilon(1e-9));

    SECTION("volume outside [vmin, vmax] is rejected")
    {
        HydraulicTrace bad = trace;
        bad.tank_volume(5, 0) = 200.0;  // above vmax
        auto dir = testsup::temp_dir("tank_bad");
        write_file(dir + "/bad.hyd", serialize_hydraulics(topo, bad));
        CHECK_THROWS_AS(load_hydraulics(dir + "/bad.hyd", topo), ValidationError);
    }
}

TEST_CASE("initial state loader handles per-segment pipe values")
{
    auto topo = load_network(testsup::fixture("single_pipe.net"));
    auto dir = testsup::temp_dir("init_seg");
    write_file(dir + "/i.init", "[chlorine]\nJ1 0.5\nP1 0.1 0.2 0.3\n");
    auto init = load_initial_state(dir + "/i.init", topo);
    CHECK(init.block(Species::Chlorine).pipe.at("P1").size() == 3);

    DiscretizationPlan plan;
    plan.dt = 300;
    plan.substeps = 12;
    plan.segments = {3};
    plan.dx = {1000.0 / 3};
    StateLayout ly(topo, plan);
    auto x = expand_initial_state(topo, ly, init);
    CHECK(x[ly.state(Species::Chlorine, ly.segment_location(0, 1))] == 0.2);
    CHECK(x[ly.state(Species::Chlorine, ly.node_location(0))] == 0.5);
    // reservoir concentration comes from the network file
    CHECK(x[ly.state(Species::Chlorine, ly.node_location(1))] == 1.0);

    plan.segments = {4};
    StateLayout ly4(topo, plan);
    CHECK_THROWS_AS(expand_initial_state(topo, ly4, init), ValidationError);
}
