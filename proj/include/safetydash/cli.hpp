#pragma once

#include <ostream>

namespace safetydash {

// Exit codes: 0 ok, 2 usage or data error, 1 anything unexpected.
int run_cli(int argc, char** argv, std::ostream& out, std::ostream& err);

}  // namespace safetydash
