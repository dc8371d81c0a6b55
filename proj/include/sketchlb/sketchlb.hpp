#pragma once

#include <memory>
#include <string>

#include "agm.hpp"
#include "bits.hpp"
#include "combinatorics.hpp"
#include "errors.hpp"
#include "layout.hpp"
#include "lbgraph.hpp"
#include "mincut.hpp"
#include "model.hpp"
#include "multigraph.hpp"
#include "overlap.hpp"
#include "protocols.hpp"
#include "reduction.hpp"
#include "setfam.hpp"

namespace sketchlb {

struct ProtocolOptions {
  unsigned window_bits = 2;
  double delta = 0.05;
};

/// Names: full, constant, window, parity, agm.
inline std::unique_ptr<SketchProtocol> make_sketch_protocol(const std::string& name, Params params,
                                                            const ProtocolOptions& options = {}) {
  if (name == "full") return std::make_unique<FullInformationProtocol>(params);
  if (name == "constant") return std::make_unique<ConstantProtocol>(params);
  if (name == "window") return std::make_unique<WindowProtocol>(params, options.window_bits);
  if (name == "parity") return std::make_unique<ParityProtocol>(params);
  if (name == "agm") return std::make_unique<AgmSketchProtocol>(params, options.delta);
  throw Error("unknown sketch protocol '" + name + "'");
}

inline nlohmann::json transcript_to_json(const Transcript& t) {
  nlohmann::json messages = nlohmann::json::array();
  for (const auto& m : t.messages) messages.push_back({{"id", m.id}, {"bits", m.bits.to_string()}});
  return {{"messages", messages}, {"decision", to_string(t.decision)}};
}

}  // namespace sketchlb
