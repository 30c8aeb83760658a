#pragma once

#include <filesystem>
#include <string_view>

#include <nlohmann/json.hpp>

#include "cebound/bounds.hpp"
#include "cebound/hermitian.hpp"
#include "cebound/variational.hpp"

namespace cebound {

/// State file: {"dim_p": int, "dim_q": int, "matrix": [[[re, im], ...], ...]}
/// holding the full density matrix row-major. Reading validates shape,
/// Hermiticity, positivity and trace; failures throw ValidationError.
[[nodiscard]] BlockState state_from_json(const nlohmann::json& j);
[[nodiscard]] BlockState parse_state(std::string_view text);
[[nodiscard]] BlockState load_state_file(const std::filesystem::path& path);
[[nodiscard]] nlohmann::json state_to_json(const BlockState& state);

[[nodiscard]] nlohmann::json to_json(const BoundReport& report);
[[nodiscard]] nlohmann::json to_json(const OptimizerResult& result);
[[nodiscard]] nlohmann::json to_json(const VariationalCheck& check);
[[nodiscard]] nlohmann::json to_json(const SeparationPoint& point);

} // namespace cebound
