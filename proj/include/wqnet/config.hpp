#ifndef WQNET_CONFIG_HPP
#define WQNET_CONFIG_HPP

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <vector>

#include "wqnet/assembly.hpp"
#include "wqnet/controllability.hpp"
#include "wqnet/mpc.hpp"
#include "wqnet/plan.hpp"

namespace wqnet {

// Scenario configuration: structured-text file of "key value" lines plus
// command-line overrides. Every ControlProblemSpec and discretization
// option has a key here.
struct ScenarioConfig {
    // paths
    std::string network, hydraulics, initial, targets, weights_file, disturbances, outdir = "out";
    // discretization
    SchemeFamily family = SchemeFamily::Implicit;
    double pe_threshold = 1000;
    PlanConfig plan;
    // transport/reaction
    TransportSelect transport = TransportSelect::Auto;
    ReactionParams reaction;
    ModelMode mode = ModelMode::Nonlinear;
    int op_refresh = 0;
    // controllability weighting
    WeightOptions weight;
    bool uniform_weights = false;
    // control
    ControlProblemSpec control;
    double qp_tol = 1e-7;
    int qp_max_iter = 50000;
    // misc
    std::vector<std::string> monitored;
    unsigned seed = 0;
    double golden_tol = 1e-9;

    // Relative input paths in the file resolve against the file's directory.
    static ScenarioConfig from_file(const std::string& path)
    {
        ScenarioConfig cfg;
        TextFile f(path);
        for (size_t i = 0; i < f.size(); ++i) {
            auto toks = text::split_ws(f.line(i));
            if (toks.size() < 2) throw ParseError("expected 'key value' at " + f.where(i));
            std::string rest;
            for (size_t t = 1; t < toks.size(); ++t) rest += (t > 1 ? " " : "") + toks[t];
            cfg.set(toks[0], rest);
        }
        std::string dir = std::filesystem::path(path).parent_path().string();
        if (!dir.empty()) {
            auto anchor = [&](std::string& p) {
                if (!p.empty() && p[0] != '/') p = dir + "/" + p;
            };
            anchor(cfg.network);
            anchor(cfg.hydraulics);
            anchor(cfg.initial);
            anchor(cfg.targets);
            anchor(cfg.weights_file);
            anchor(cfg.disturbances);
        }
        return cfg;
    }

    void set(const std::string& key, const std::string& value)
    {
        auto num = [&] { return text::parse_double(value, "config key " + key); };
        auto integer = [&] { return static_cast<int>(text::parse_int(value, "config key " + key)); };
        if (key == "network") network = value;
        else if (key == "hydraulics") hydraulics = value;
        else if (key == "initial") initial = value;
        else if (key == "targets") targets = value;
        else if (key == "weights_file") weights_file = value;
        else if (key == "disturbances") disturbances = value;
        else if (key == "outdir") outdir = value;
        else if (key == "family") {
            if (value == "explicit") family = SchemeFamily::Explicit;
            else if (value == "implicit") family = SchemeFamily::Implicit;
            else throw ParseError("family must be explicit or implicit");
        } else if (key == "pe_threshold") pe_threshold = num();
        else if (key == "dt_cap") plan.dt_cap = num();
        else if (key == "dt_min") plan.dt_min = num();
        else if (key == "seg_mode") {
            if (value == "paper-fixed") plan.seg_mode = SegmentationMode::PaperFixed;
            else if (value == "length-scaled") plan.seg_mode = SegmentationMode::LengthScaled;
            else throw ParseError("seg_mode must be paper-fixed or length-scaled");
        } else if (key == "fixed_segments") plan.fixed_segments = integer();
        else if (key == "dx_target") plan.dx_target = num();
        else if (key == "shear_fraction") plan.transport.shear_fraction = num();
        else if (key == "density") plan.transport.fluid.density = num();
        else if (key == "viscosity") plan.transport.fluid.viscosity = num();
        else if (key == "dispersion_scale") plan.transport.dispersion_scale = num();
        else if (key == "transport") {
            if (value == "ar") transport = TransportSelect::AdvectionOnly;
            else if (value == "adr") transport = TransportSelect::AdvectionDispersion;
            else if (value == "auto") transport = TransportSelect::Auto;
            else throw ParseError("transport must be ar, adr or auto");
        } else if (key == "kr") reaction.kr = num();
        else if (key == "y_fr") reaction.y_fr = num();
        else if (key == "y_thms") reaction.y_thms = num();
        else if (key == "mode") {
            if (value == "nonlinear") mode = ModelMode::Nonlinear;
            else if (value == "linearized") mode = ModelMode::Linearized;
            else throw ParseError("mode must be nonlinear or linearized");
        } else if (key == "op_refresh") op_refresh = integer();
        else if (key == "weight_mapping") {
            if (value == "literal") weight.mapping = WeightMapping::Literal;
            else if (value == "inverse") weight.mapping = WeightMapping::Inverse;
            else throw ParseError("weight_mapping must be literal or inverse");
        } else if (key == "q_target") weight.q_target = num();
        else if (key == "q_base") weight.q_base = num();
        else if (key == "weight_q_scale") weight.q_scale = num();
        else if (key == "weight_horizon") weight.horizon = integer();
        else if (key == "uniform_weights") uniform_weights = value == "1" || value == "true";
        else if (key == "cl_min") control.cl_min = num();
        else if (key == "cl_max") control.cl_max = num();
        else if (key == "thm_cap") control.thm_cap = num();
        else if (key == "fr_cap") control.fr_cap = num();
        else if (key == "eps_cost") control.eps_cost = num();
        else if (key == "horizon") control.horizon = integer();
        else if (key == "control_horizon") control.control_horizon = integer();
        else if (key == "move_block") control.move_block = integer();
        else if (key == "slack_penalty") control.slack_penalty = num();
        else if (key == "x_ref") control.x_ref_cl = num();
        else if (key == "q_scale") control.q_scale = num();
        else if (key == "r_scale") control.r_scale = num();
        else if (key == "constraint_stride") control.constraint_stride = integer();
        else if (key == "cadence") control.cadence = integer();
        else if (key == "qp_tol") qp_tol = num();
        else if (key == "qp_max_iter") qp_max_iter = integer();
        else if (key == "monitored") monitored = text::split(value, ',');
        else if (key == "seed") seed = static_cast<unsigned>(integer());
        else if (key == "golden_tol") golden_tol = num();
        else throw ParseError("unknown config key '" + key + "'");
    }

    void apply_overrides(const std::vector<std::string>& overrides)
    {
        for (const auto& ov : overrides) {
            auto [k, v] = text::parse_kv(ov, "command-line override");
            set(k, v);
        }
    }

    EngineOptions engine_options() const
    {
        EngineOptions e;
        e.transport = transport;
        e.transport_cfg = plan.transport;
        e.transport_cfg.peclet_threshold = pe_threshold;
        e.monitored_nodes = monitored;
        return e;
    }
};

}  // namespace wqnet

#endif
