#ifndef WQNET_REACTIONS_HPP
#define WQNET_REACTIONS_HPP

#include <Eigen/Dense>

#include "wqnet/network.hpp"

namespace wqnet {

// Global multi-species reaction constants. Per-pipe and per-tank
// first-order decay rates derive from the element specs.
struct ReactionParams {
    double kr = 0;       // mutual reaction coefficient, L/(mg s)
    double y_fr = 1.0;   // fictitious reactant yield ratio
    double y_thms = 0;   // THMs yield ratio
};

/// First-order chlorine decay rate in a pipe: kb + 2 kw kf / (r (kw + kf)).
inline double pipe_decay_rate(const PipeSpec& pipe)
{
    double wall = pipe.kw + pipe.kf;
    if (wall <= 0) return pipe.kb;
    return pipe.kb + 2.0 * pipe.kw * pipe.kf / (pipe.radius() * wall);
}

inline double tank_decay_rate(const TankSpec& tank) { return tank.kb; }

struct ReactionTerms {
    double cl = 0;   // mg/L/s
    double fr = 0;
    double thm = 0;
};

// Multi-species decay/reaction rates at one location: first-order
// chlorine decay plus the second-order mutual reaction forming THMs.
inline ReactionTerms reaction_terms(double cl, double fr, double k, const ReactionParams& p)
{
    double mutual = p.kr * cl * fr;
    return {-k * cl - mutual, -p.y_fr * mutual, p.y_thms * mutual};
}

// Operating point of the Taylor linearization, per location.
struct OperatingPoint {
    Eigen::VectorXd cl;  // n_locations
    Eigen::VectorXd fr;
    double time = 0;  // when it was last refreshed

    static OperatingPoint uniform(int n_locations, double cl0, double fr0)
    {
        OperatingPoint op;
        op.cl = Eigen::VectorXd::Constant(n_locations, cl0);
        op.fr = Eigen::VectorXd::Constant(n_locations, fr0);
        return op;
    }
};

// Coefficients of the linearized reaction rows at one location:
// R(c) ~ dcl_dc * c + dcl_dfr * c~ + cl_const, and likewise for the
// reactant and THM rows. Evaluating at (cl_o, fr_o) reproduces the
// nonlinear terms exactly.
struct LinearizedReaction {
    double dcl_dc, dcl_dfr, cl_const;
    double dfr_dc, dfr_dfr, fr_const;
    double dthm_dc, dthm_dfr, thm_const;
};

inline LinearizedReaction linearized_reaction(double k, const ReactionParams& p, double cl_o,
                                              double fr_o)
{
    LinearizedReaction l;
    double cross = p.kr * cl_o * fr_o;
    l.dcl_dc = -k - p.kr * fr_o;
    l.dcl_dfr = -p.kr * cl_o;
    l.cl_const = cross;
    l.dfr_dc = -p.y_fr * p.kr * fr_o;
    l.dfr_dfr = -p.y_fr * p.kr * cl_o;
    l.fr_const = p.y_fr * cross;
    l.dthm_dc = p.y_thms * p.kr * fr_o;
    l.dthm_dfr = p.y_thms * p.kr * cl_o;
    l.thm_const = -p.y_thms * cross;
    return l;
}

}  // namespace wqnet

#endif
