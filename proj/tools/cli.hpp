#pragma once

#include <iosfwd>
#include <string>
#include <vector>

namespace sketchbench {

/// Runs one subcommand. args excludes the program name. Returns 0 when every
/// asserted invariant held, 1 on an invariant failure, 2 on a usage error.
int run(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

/// Git blob hash: sha1("blob <size>\0" + content), lowercase hex.
std::string blob_hash(const std::string& content);

}  // namespace sketchbench
