#pragma once
#include <string>
#include <vector>

#include "qw2d/config.hpp"
#include "qw2d/disorder.hpp"

namespace qw {

inline constexpr const char* kLibraryVersion = "1.0.0";

// Shared key scheme: disorder (kind), theta1/2, alpha1/2, beta1/2, the
// binary-set keys, and seed.
DisorderSpec disorder_from_config(const Config& cfg);

struct ValidationReport {
  std::vector<std::string> errors, warnings;  // "field: message"
  bool ok() const { return errors.empty(); }
};

ValidationReport validate_config(const Config& cfg);

// Runs the configured experiment and writes its outputs plus a manifest
// (resolved config, version, per-file checksums) into out_dir; returns
// the written file names, manifest last. Throws on invalid configs.
std::vector<std::string> run_experiment(const Config& cfg,
                                        const std::string& out_dir);

}  // namespace qw
