#pragma once

#include <filesystem>
#include <functional>
#include <iosfwd>
#include <optional>

#include "wavehf/kernel_operator.hpp"
#include "wavehf/lattice.hpp"
#include "wavehf/shell/config.hpp"

namespace wavehf::shell {

/// Process exit codes.
enum ExitCode : int { kOk = 0, kNumerical = 1, kConfig = 2, kIo = 3 };

System build_system(const RunConfig& config);

/// The configured initial state, including the optional projected perturbation.
KernelOperator build_initial_state(const RunConfig& config, const System& system);

/// Each command validates the config first and writes its report to `report`.
/// `out` overrides the primary output path: the CSV for evolve, the JSON report otherwise.
int cmd_evolve(const RunConfig& config, const std::optional<std::filesystem::path>& out, std::ostream& report);
int cmd_groundstate(const RunConfig& config, const std::optional<std::filesystem::path>& out,
                    std::ostream& report);
int cmd_gradcheck(const RunConfig& config, const std::optional<std::filesystem::path>& out, std::ostream& report);
int cmd_vncheck(const RunConfig& config, const std::optional<std::filesystem::path>& out, std::ostream& report);

/// Runs `body`, mapping library exceptions to exit codes with a message on `err`.
int run_guarded(const std::function<int()>& body, std::ostream& err);

}  // namespace wavehf::shell
