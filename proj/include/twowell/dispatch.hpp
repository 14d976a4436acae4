#ifndef TWOWELL_DISPATCH_HPP
#define TWOWELL_DISPATCH_HPP

#include "twowell/runconfig.hpp"

#include <iosfwd>

namespace twowell {

// Runs exactly one command, writes its artifacts plus a manifest under
// cfg.out, and returns the exit status (0 success, 1 domain error /
// failed verification, 2 configuration error). Error reports go to `err`
// as one machine-readable JSON line.
int dispatch(const RunConfig& cfg, std::ostream& out, std::ostream& err);

} // namespace twowell

#endif
