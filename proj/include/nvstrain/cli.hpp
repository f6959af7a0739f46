#pragma once

namespace nvstrain::cli {

// Exit codes: 0 success, 2 config error, 3 fit/numeric error, 64 usage.
int run(int argc, char** argv);

}  // namespace nvstrain::cli
