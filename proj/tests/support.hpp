#ifndef WQNET_TESTS_SUPPORT_HPP
#define WQNET_TESTS_SUPPORT_HPP

#include <filesystem>
#include <random>
#include <string>

#include "wqnet/wqnet.hpp"

namespace testsup {

inline std::string fixture(const std::string& name)
{
    return std::string(WQNET_FIXTURE_DIR) + "/" + name;
}

inline std::string temp_dir(const std::string& tag)
{
    auto dir = std::filesystem::temp_directory_path() / ("wqnet_" + tag);
    std::filesystem::create_directories(dir);
    return dir.string();
}

// Single pipe R1 -> P1 -> J1 with a constant-velocity trace.
struct SinglePipe {
    wqnet::NetworkTopology topo;
    wqnet::HydraulicTrace trace;
};

inline SinglePipe single_pipe(double length, double diameter, double v, double kb, int steps = 24,
                              double dt_hyd = 3600, double source_cl = 1.0)
{
    SinglePipe s;
    s.topo.junctions.push_back({"J1"});
    s.topo.reservoirs.push_back({"R1", {source_cl, 0.0, 0.0}});
    wqnet::PipeSpec p;
    p.id = "P1";
    p.from = 1;
    p.to = 0;
    p.length = length;
    p.diameter = diameter;
    p.kb = kb;
    s.topo.pipes.push_back(p);
    s.topo.rebuild_index();
    s.topo.validate();
    s.trace.dt_hyd = dt_hyd;
    s.trace.steps = steps;
    double q = v * p.area();
    s.trace.pipe_velocity.setConstant(steps, 1, v);
    s.trace.link_flow.setConstant(steps, 1, q);
    s.trace.demand.setConstant(steps, 1, q);
    s.trace.tank_volume.resize(steps, 0);
    s.trace.booster_flow.resize(steps, 0);
    return s;
}

inline Eigen::MatrixXd random_orthogonal(int n, std::mt19937& rng)
{
    std::normal_distribution<double> nd;
    Eigen::MatrixXd m(n, n);
    for (int i = 0; i < n; ++i)
        for (int j = 0; j < n; ++j) m(i, j) = nd(rng);
    Eigen::HouseholderQR<Eigen::MatrixXd> qr(m);
    return Eigen::MatrixXd(qr.householderQ());
}

inline wqnet::SpMat to_sparse(const Eigen::MatrixXd& m)
{
    return m.sparseView(1.0, 0.0);
}

}  // namespace testsup

#endif
