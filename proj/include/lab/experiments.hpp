#pragma once

#include <memory>
#include <string>
#include <vector>

#include "lab/decoder.hpp"
#include "lab/report.hpp"

namespace lab {

// Majority table over local inputs, voted by the true witness bits of
// `n_blocks` freshly sampled on-promise blocks.
PlugInTable train_plugin_table(const EnsembleParams& params,
                               const SilsSpec& sils, size_t n_blocks,
                               uint64_t seed, uint32_t workers = 1);

// Decoder lookup by registry name. "plugin" trains a fresh table on
// `plugin_train_blocks` blocks drawn from a dedicated seed stream; the other
// names construct stateless decoders from the config. Unknown names raise
// ConfigError.
std::shared_ptr<const Decoder> make_decoder(const std::string& name,
                                            const LabConfig& cfg,
                                            size_t plugin_train_blocks = 4000);

// Registry holding every built-in decoder under the config's parameters
// (plugin excluded unless supplied).
DecoderRegistry make_registry(const LabConfig& cfg);

Report run_sample(const LabConfig& cfg);
Report run_neutrality(const LabConfig& cfg);
Report run_sparsify(const LabConfig& cfg);
Report run_treelike(const LabConfig& cfg);
Report run_isolate(const LabConfig& cfg);
Report run_switch(const LabConfig& cfg);
Report run_success(const LabConfig& cfg);
Report run_codec(const LabConfig& cfg);
Report run_clash(const LabConfig& cfg);

const std::vector<std::string>& experiment_names();

// Dispatch by subcommand name and fill in wall-clock metadata. Unknown names
// raise ConfigError.
Report run_experiment(const std::string& name, const LabConfig& cfg);

}  // namespace lab
