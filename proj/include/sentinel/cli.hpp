#pragma once

#include <iosfwd>

namespace sentinel {

// Subcommands: ingest, detect, calibrate, render, generate, plant, colormap, serve.
// Returns 0 on success, 1 on usage or data errors, 2 on internal errors.
int run_cli(int argc, const char* const* argv, std::ostream& out, std::ostream& err);

} // namespace sentinel
