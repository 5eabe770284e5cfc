#pragma once

// Bundled machine descriptions.
//
//   fig2     two latches, a compute sub-net and a control sub-net, no hazards
//   ooc      out-of-order completion machine with an ALU feedback path
//   scalar5  classic five-stage in-order pipeline with two forwarding sources

#include <string>
#include <string_view>
#include <vector>

#include "rcpn/descriptor.hpp"

namespace rcpn {

ModelDescriptor build_fig2_model();
ModelDescriptor build_example_ooc_model(bool forwarding = true);
ModelDescriptor build_scalar5_model(bool forwarding = true);

// fig2, ooc, scalar5, plus the forwarding-free variants ooc-nofwd and
// scalar5-nofwd.
ModelDescriptor model_by_name(std::string_view name);
std::vector<std::string> model_names();

MemoryUnit::Access mem_access(MemoryUnit& unit, MemoryUnit::Op op, Word addr, Word value = 0);

}  // namespace rcpn
