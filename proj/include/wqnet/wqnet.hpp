#ifndef WQNET_WQNET_HPP
#define WQNET_WQNET_HPP

#include "wqnet/assembly.hpp"
#include "wqnet/cli.hpp"
#include "wqnet/config.hpp"
#include "wqnet/controllability.hpp"
#include "wqnet/hydraulics.hpp"
#include "wqnet/layout.hpp"
#include "wqnet/mpc.hpp"
#include "wqnet/network.hpp"
#include "wqnet/plan.hpp"
#include "wqnet/qp.hpp"
#include "wqnet/reactions.hpp"
#include "wqnet/scenario.hpp"
#include "wqnet/stepping.hpp"
#include "wqnet/transport.hpp"

#endif
