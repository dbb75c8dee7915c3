#ifndef RADONBL_TOOLS_CLI_HPP
#define RADONBL_TOOLS_CLI_HPP

#include <ostream>
#include <string>
#include <vector>

#include "radonbl/bl_core.hpp"
#include "radonbl/radon_lab.hpp"
#include "serialize.hpp"

namespace radonbl::tools {

// Exit status: 0 success, 1 usage or input errors, 2 numerical failures
// and regress mismatches. args excludes the program name.
int run_cli(const std::vector<std::string>& args, std::ostream& out, std::ostream& err);

// {"command": ..., "parameters": {"subcommand": ..., ...}, "seed": ..., "output_path": ...}
std::vector<std::string> manifest_to_args(const Json& manifest);

// loomis-whitney-2d/3d, moment-curve-n{2,3,4}, parabola, max-codim-k1
EqualExpDatum named_datum(const std::string& name);
ModelOperator named_operator(const std::string& name);
std::vector<std::string> named_data();

}  // namespace radonbl::tools

#endif  // RADONBL_TOOLS_CLI_HPP
