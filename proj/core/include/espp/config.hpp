#pragma once

#include <filesystem>
#include <map>
#include <optional>
#include <string>
#include <string_view>

#include "espp/types.hpp"

namespace espp {

/// Hyperparameters of the ESPP rule for one layer.
struct EsppConfig {
    Real beta = 0.9;             ///< membrane and trace decay
    Real c_pos = 2.0;            ///< hinge margin constant for fixations, > 0
    Real c_neg = -1.0;           ///< hinge margin constant for saccades, < 0
    Real input_threshold = 0.02; ///< minimum fraction of active input channels for an update
    Real learning_rate = 1e-4;
    Real theta = 1.0;            ///< spike threshold
    Real slope = 2.0;            ///< arctan surrogate slope

    /// Throws std::invalid_argument naming the first violated constraint.
    void validate() const;

    Real margin_constant(PairLabel y) const noexcept { return y == PairLabel::Fixation ? c_pos : c_neg; }

    friend bool operator==(const EsppConfig&, const EsppConfig&) = default;
};

/// A named hyperparameter bundle: rule constants plus the data/architecture settings that go with them.
struct Preset {
    std::string name;
    EsppConfig rule;
    int steps = 0;
    int hidden_size = 0;
    int hidden_layers = 0;
    int epochs = 0;
};

/// Built-in presets "nmnist" and "shd".
std::optional<Preset> builtin_preset(std::string_view name);

/// Parses `key = value` lines; '#' starts a comment. Throws std::runtime_error with the line number on bad syntax.
std::map<std::string, std::string> parse_key_values(std::string_view text);

/// Applies key/value overrides onto a preset. Unknown keys are rejected.
Preset apply_key_values(Preset base, const std::map<std::string, std::string>& kv);

Preset load_preset_file(const std::filesystem::path& path);

std::string format_preset(const Preset& preset);

}  // namespace espp
