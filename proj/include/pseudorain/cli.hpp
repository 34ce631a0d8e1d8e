#pragma once

namespace pseudorain {

enum ExitCode : int {
  kExitOk = 0,
  kExitFatal = 1,
  kExitSampleFailures = 2,
};

/// Entry point of the `pseudorain` command line tool (`synth` and `score`).
int run_cli(int argc, const char* const* argv);

}  // namespace pseudorain
