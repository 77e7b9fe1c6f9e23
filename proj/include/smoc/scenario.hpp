#pragma once

#include <iosfwd>
#include <memory>
#include <string>
#include <string_view>
#include <vector>

#include "smoc/controller.hpp"
#include "smoc/fabric.hpp"
#include "smoc/netgraph.hpp"

// Scenario files and the text surfaces of a simulation run: parsing,
// controller construction, CSV and summary rendering. All formats carry a
// `format=1` version header and are stable for golden-file comparison.
namespace smoc::scn {

enum class ControllerKind { Smoc, SpanningTree, ShortestPath };

// Line-oriented scenario file, '#' comments:
//   format=1
//   topology <path>          # optional; CLI arguments take precedence
//   controller <smoc|stp|spf>
//   step <seconds>
//   duration <seconds>
//   install_delay <seconds>
//   seed <n>
//   session <id> <initiator_host> <listener_host> <subflows> <start_time>
// Omitted settings keep SimConfig defaults; the controller defaults to smoc.
struct Scenario {
    std::string topology;  // empty unless the file names one
    ControllerKind controller = ControllerKind::Smoc;
    sim::SimConfig config;
    std::vector<sim::Session> sessions;
};

// Throws ParseError with the offending line number.
Scenario parse_scenario(std::istream& in);

std::unique_ptr<ctrl::Controller> make_controller(ControllerKind kind,
                                                  const net::Topology& topo);

sim::RunResult run_scenario(const net::Topology& topo, const Scenario& scenario);

// CSV: `format=1`, then `time,session:<id>,...,link:<u>-<v>,...`, then one
// %.6f row per step.
std::string format_csv(const sim::ThroughputSeries& series);

// Summary record:
//   format=1
//   controller=<name> step=<s> duration=<s> install_delay=<s> seed=<n> steps=<n>
//   session=<id> steady=<rate> time_to_steady=<t>   (one line per session)
//   aggregate_steady=<rate>
std::string format_summary(const Scenario& scenario, const sim::ThroughputSeries& series);

}  // namespace smoc::scn
