#pragma once

#include <string>

namespace mpsenc::cli {

// Desk-scale sweeps for the named artifact; writes CSVs under out_dir and
// prints one PASS/FAIL line per check. Returns 0 when all checks pass, 2
// otherwise. target in {fig2, fig4, fig5, fig6, table1, table2}.
int cmd_reproduce(const std::string& target, const std::string& out_dir);

}  // namespace mpsenc::cli
