#ifndef ALGPATH_TOOLS_CLI_HPP
#define ALGPATH_TOOLS_CLI_HPP

namespace algpath::cli {

int run(int argc, char** argv);

}  // namespace algpath::cli

#endif
